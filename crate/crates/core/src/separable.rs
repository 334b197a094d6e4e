//! Sums of tensor products `u(x) = sum_t c_t prod_i f_{t,i}(x_i)` on a product
//! of periodic 1-d grids.
//!
//! Pairings against product test functions, even-`p` Lebesgue norms and the
//! product-window dyadic norm all reduce to sums of products of 1-d
//! quadratures, which is what makes high oscillation counts affordable: the
//! cost grows with the 1-d resolution instead of its `n`-th power.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::besov::{fft_nd, frequency, low_bump, BesovParams};
use crate::error::{domain, Result};
use crate::grid_field::{GridBox, GridField, GridSpec};
use crate::multiindex::enumerate;
use crate::smooth::Jet;

/// Upper bound on expanded product terms before a computation is refused.
const MAX_EXPANSION: usize = 20_000_000;

/// `points` periodic nodes `lower + i * length / points`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Axis1d {
    lower: f64,
    length: f64,
    points: usize,
}

impl Axis1d {
    pub fn new(lower: f64, length: f64, points: usize) -> Result<Self> {
        if !(length > 0.0) || !lower.is_finite() || !length.is_finite() {
            return domain(format!("axis needs a positive finite length, got {length}"));
        }
        if points < 4 {
            return domain(format!("axis needs at least 4 points, got {points}"));
        }
        Ok(Self { lower, length, points })
    }

    /// `[0, 2 pi)` with `points` nodes.
    pub fn torus(points: usize) -> Result<Self> {
        Self::new(0.0, 2.0 * PI, points)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        self.length / self.points as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.spacing();
        (0..self.points).map(|i| self.lower + i as f64 * h).collect()
    }

    fn is_torus(&self) -> bool {
        self.lower.abs() < 1e-12 && (self.length - 2.0 * PI).abs() < 1e-9
    }
}

#[derive(Clone, Debug)]
struct Term {
    coeff: f64,
    /// `factors[axis][node]`
    factors: Vec<Vec<Jet>>,
}

#[derive(Clone, Debug)]
pub struct SeparableField {
    axes: Vec<Axis1d>,
    terms: Vec<Term>,
}

/// Permutations of `0..k` with their signs.
fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = vec![(Vec::new(), 1.0)];
    for next in 0..k {
        let mut grown = Vec::new();
        for (perm, sgn) in &out {
            for pos in 0..=perm.len() {
                let mut q = perm.clone();
                q.insert(pos, next);
                // inserting `next` (the largest so far) before `len - pos` entries
                let s = if (perm.len() - pos) % 2 == 0 { *sgn } else { -*sgn };
                grown.push((q, s));
            }
        }
        out = grown;
    }
    out
}

impl SeparableField {
    pub fn new(axes: Vec<Axis1d>) -> Result<Self> {
        if axes.is_empty() {
            return domain("a separable field needs at least one axis");
        }
        Ok(Self { axes, terms: Vec::new() })
    }

    /// Adds `coeff * prod_i factors[i](x_i)`.
    pub fn push_term(&mut self, coeff: f64, factors: &[&dyn Fn(f64) -> Jet]) -> Result<()> {
        if factors.len() != self.axes.len() {
            return domain(format!("{} factors for {} axes", factors.len(), self.axes.len()));
        }
        let mut sampled = Vec::with_capacity(factors.len());
        for (axis, f) in self.axes.iter().zip(factors) {
            let vals: Vec<Jet> = axis.nodes().into_iter().map(|t| f(t)).collect();
            if vals.iter().any(|j| !(j.v.is_finite() && j.d1.is_finite() && j.d2.is_finite())) {
                return domain("non-finite factor sample");
            }
            sampled.push(vals);
        }
        self.terms.push(Term { coeff, factors: sampled });
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis1d] {
        &self.axes
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Samples the full tensor grid (small grids only).
    pub fn to_grid_field(&self) -> Result<GridField> {
        let bbox = GridBox::new(
            self.axes.iter().map(|a| a.lower).collect(),
            self.axes.iter().map(|a| a.lower + a.length).collect(),
        )?;
        let spec = GridSpec::periodic(bbox, self.axes.iter().map(|a| a.points).collect())?;
        let n = self.dim();
        let mut idx = vec![0; n];
        let samples = (0..spec.len())
            .map(|flat| {
                spec.unflatten(flat, &mut idx);
                self.terms.iter().map(|t| t.coeff * (0..n).map(|a| t.factors[a][idx[a]].v).product::<f64>()).sum()
            })
            .collect();
        GridField::new(spec, samples)
    }

    fn derivative(&self, t: usize, axis: usize, order: u8) -> impl Iterator<Item = f64> + '_ {
        self.terms[t].factors[axis].iter().map(move |j| match order {
            0 => j.v,
            1 => j.d1,
            _ => j.d2,
        })
    }

    /// `int F_k[u] prod_i phi_i(x_i) dx`.
    ///
    /// `F_k` is expanded as `sum_alpha sum_pi sgn(pi) prod_r (D^2 u)_{alpha_r, alpha_pi(r)}`;
    /// every product of Hessian entries of tensor terms is itself a tensor
    /// product, so each contribution is a product of 1-d integrals.
    pub fn pair_fk(&self, k: usize, phi: &[&dyn Fn(f64) -> f64]) -> Result<f64> {
        let n = self.dim();
        if k == 0 || k > n {
            return domain(format!("k must lie in 1..={n}, got {k}"));
        }
        if phi.len() != n {
            return domain(format!("{} test factors for {n} axes", phi.len()));
        }
        let nt = self.terms.len();
        let expansion = nt.checked_pow(k as u32).unwrap_or(usize::MAX);
        if expansion > MAX_EXPANSION {
            return domain(format!("{nt} terms at k = {k} expand to too many products"));
        }
        let phis: Vec<Vec<f64>> = self.axes.iter().zip(phi).map(|(a, f)| a.nodes().into_iter().map(|t| f(t)).collect()).collect();
        let perms = permutations(k);
        let mut memo: HashMap<(usize, Vec<(usize, u8)>), f64> = HashMap::new();
        let mut total = 0.0;
        let mut tuple = vec![0usize; k];
        for alpha in enumerate(k, n)? {
            let a: Vec<usize> = alpha.zero_based().collect();
            for (perm, sgn) in &perms {
                // derivative orders[r][axis] of entry (a_r, a_perm(r))
                let orders: Vec<Vec<u8>> = (0..k)
                    .map(|r| {
                        let mut e = vec![0u8; n];
                        e[a[r]] += 1;
                        e[a[perm[r]]] += 1;
                        e
                    })
                    .collect();
                for combo in 0..expansion {
                    let mut c = combo;
                    for slot in tuple.iter_mut() {
                        *slot = c % nt;
                        c /= nt;
                    }
                    let mut value = sgn * tuple.iter().map(|&t| self.terms[t].coeff).product::<f64>();
                    for axis in 0..n {
                        let mut key: Vec<(usize, u8)> = (0..k).map(|r| (tuple[r], orders[r][axis])).collect();
                        key.sort_unstable();
                        let integral = match memo.get(&(axis, key.clone())) {
                            Some(&v) => v,
                            None => {
                                let v = self.axis_integral(axis, &key, &phis[axis]);
                                memo.insert((axis, key), v);
                                v
                            }
                        };
                        value *= integral;
                        if value == 0.0 {
                            break;
                        }
                    }
                    total += value;
                }
            }
        }
        Ok(total)
    }

    fn axis_integral(&self, axis: usize, key: &[(usize, u8)], weight: &[f64]) -> f64 {
        let mut acc: Vec<f64> = weight.to_vec();
        for &(t, order) in key {
            for (slot, v) in acc.iter_mut().zip(self.derivative(t, axis, order)) {
                *slot *= v;
            }
        }
        self.axes[axis].spacing() * acc.iter().sum::<f64>()
    }

    /// `||u||_p` for an even integer `p`, exactly expanded.
    pub fn lp_norm_even(&self, p: u32) -> Result<f64> {
        if p == 0 || p % 2 == 1 {
            return domain(format!("the separable L^p norm needs an even p, got {p}"));
        }
        let values: Vec<Vec<Vec<f64>>> = self
            .terms
            .iter()
            .map(|t| t.factors.iter().map(|f| f.iter().map(|j| j.v).collect()).collect())
            .collect();
        let coeffs: Vec<f64> = self.terms.iter().map(|t| t.coeff).collect();
        let integral = power_integral(&self.axes, &coeffs, &values, p)?;
        Ok(integral.max(0.0).powf(1.0 / p as f64))
    }

    /// Dyadic norm with product windows `prod_i rho(|l_i| / 2^j)`.
    ///
    /// Needs every axis to be `[0, 2 pi)` and an even integer `p`.
    pub fn dyadic_norm_product(&self, params: BesovParams) -> Result<f64> {
        let p = params.p();
        if p.fract() != 0.0 || (p as u32) % 2 == 1 {
            return domain(format!("the separable dyadic norm needs an even p, got {p}"));
        }
        let p_int = p as u32;
        if let Some(a) = self.axes.iter().position(|a| !a.is_torus()) {
            return domain(format!("axis {a} is not [0, 2 pi)"));
        }
        let n = self.dim();
        let spectra: Vec<Vec<Vec<Complex64>>> = self
            .terms
            .iter()
            .map(|t| {
                t.factors
                    .iter()
                    .map(|f| {
                        let mut buf: Vec<Complex64> = f.iter().map(|j| Complex64::new(j.v, 0.0)).collect();
                        let len = buf.len();
                        fft_nd(&mut buf, &[len], false);
                        buf
                    })
                    .collect()
            })
            .collect();
        let filtered = |spec: &[Complex64], scale: f64| -> Vec<f64> {
            let len = spec.len();
            let mut buf: Vec<Complex64> = spec
                .iter()
                .enumerate()
                .map(|(i, c)| c * low_bump(frequency(i, len).unsigned_abs() as f64 / scale))
                .collect();
            fft_nd(&mut buf, &[len], true);
            buf.iter().map(|c| c.re).collect()
        };
        let max_freq = self.axes.iter().map(|a| a.points / 2).max().unwrap_or(0) as f64;
        let mut total = self.lp_norm_even(p_int)?.powi(p_int as i32);
        let mut j = 1u32;
        while 0.625 * 2f64.powi(j as i32) < max_freq {
            let lo = 2f64.powi(j as i32);
            // per term and axis: (rho_j f, (rho_{j+1} - rho_j) f)
            let mut parts: Vec<Vec<(Vec<f64>, Vec<f64>)>> = Vec::with_capacity(self.terms.len());
            let mut any_d = false;
            for term in &spectra {
                let mut axes = Vec::with_capacity(n);
                for spec in term {
                    let a = filtered(spec, lo);
                    let b = filtered(spec, 2.0 * lo);
                    let d: Vec<f64> = b.iter().zip(&a).map(|(x, y)| x - y).collect();
                    any_d |= d.iter().any(|v| v.abs() > 0.0);
                    axes.push((a, d));
                }
                parts.push(axes);
            }
            if any_d {
                // T_j u = sum_t c_t sum_{S != {}} prod_{i in S} d_ti prod_{i not in S} a_ti
                let mut coeffs = Vec::new();
                let mut values = Vec::new();
                for (t, term) in parts.iter().enumerate() {
                    for mask in 1u32..(1 << n) {
                        coeffs.push(self.terms[t].coeff);
                        values.push(
                            (0..n)
                                .map(|i| if mask & (1 << i) != 0 { term[i].1.clone() } else { term[i].0.clone() })
                                .collect::<Vec<_>>(),
                        );
                    }
                }
                let block = power_integral(&self.axes, &coeffs, &values, p_int)?;
                total += 2f64.powf(params.s() * j as f64 * p) * block.max(0.0);
            }
            j += 1;
        }
        Ok(total.powf(1.0 / p))
    }
}

/// `int (sum_t c_t prod_i v_{t,i})^p` by multinomial expansion into 1-d integrals.
fn power_integral(axes: &[Axis1d], coeffs: &[f64], values: &[Vec<Vec<f64>>], p: u32) -> Result<f64> {
    let nt = coeffs.len();
    let n = axes.len();
    let expansion = nt.checked_pow(p).unwrap_or(usize::MAX);
    if expansion > MAX_EXPANSION {
        return domain(format!("{nt} terms at p = {p} expand to too many products"));
    }
    let mut memo: HashMap<(usize, Vec<usize>), f64> = HashMap::new();
    let mut tuple = vec![0usize; p as usize];
    let mut total = 0.0;
    for combo in 0..expansion {
        let mut c = combo;
        for slot in tuple.iter_mut() {
            *slot = c % nt;
            c /= nt;
        }
        // only non-decreasing tuples, weighted by their multinomial count
        if tuple.windows(2).any(|w| w[0] > w[1]) {
            continue;
        }
        let mut value = multinomial(&tuple) * tuple.iter().map(|&t| coeffs[t]).product::<f64>();
        for axis in 0..n {
            let key = tuple.clone();
            let integral = match memo.get(&(axis, key.clone())) {
                Some(&v) => v,
                None => {
                    let mut acc = vec![1.0; axes[axis].points];
                    for &t in &key {
                        for (slot, v) in acc.iter_mut().zip(&values[t][axis]) {
                            *slot *= v;
                        }
                    }
                    let v = axes[axis].spacing() * acc.iter().sum::<f64>();
                    memo.insert((axis, key), v);
                    v
                }
            };
            value *= integral;
            if value == 0.0 {
                break;
            }
        }
        total += value;
    }
    Ok(total)
}

/// Number of distinct orderings of a sorted tuple.
fn multinomial(sorted: &[usize]) -> f64 {
    let fact = |m: usize| (1..=m).map(|v| v as f64).product::<f64>();
    let mut out = fact(sorted.len());
    let mut run = 1;
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            out /= fact(run);
            run = 1;
        }
    }
    out / fact(run)
}
