//! Real trigonometric polynomials on `[0, 2 pi)^n` with sparse integer
//! frequencies, for lacunary sums whose spectra are too spread out for a grid.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;

use crate::besov::{block_window, BesovParams, WindowShape};
use crate::error::{domain, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TrigPoly {
    dim: usize,
    coeffs: BTreeMap<Vec<i64>, Complex64>,
}

impl TrigPoly {
    pub fn zero(dim: usize) -> Self {
        Self { dim, coeffs: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut p = Self::zero(dim);
        p.coeffs.insert(vec![0; dim], Complex64::new(c, 0.0));
        p
    }

    /// `sin^2(freq * x_axis) = 1/2 - (e^{2 i freq x} + e^{-2 i freq x}) / 4`.
    pub fn sin_squared(dim: usize, axis: usize, freq: i64) -> Self {
        let mut p = Self::constant(dim, 0.5);
        let mut l = vec![0; dim];
        l[axis] = 2 * freq;
        p.coeffs.insert(l.clone(), Complex64::new(-0.25, 0.0));
        l[axis] = -2 * freq;
        p.coeffs.insert(l, Complex64::new(-0.25, 0.0));
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&Vec<i64>, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (l, c) in &other.coeffs {
            *out.coeffs.entry(l.clone()).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        out.prune();
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, coeffs: self.coeffs.iter().map(|(l, c)| (l.clone(), c * s)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        for (la, ca) in &self.coeffs {
            for (lb, cb) in &other.coeffs {
                let l: Vec<i64> = la.iter().zip(lb).map(|(a, b)| a + b).collect();
                *out.coeffs.entry(l).or_insert(Complex64::new(0.0, 0.0)) += ca * cb;
            }
        }
        out.prune();
        out
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| c.norm_sqr() != 0.0);
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .map(|(l, c)| {
                let phase: f64 = l.iter().zip(x).map(|(&li, &xi)| li as f64 * xi).sum();
                (c * Complex64::from_polar(1.0, phase)).re
            })
            .sum()
    }

    /// Applies a frequency multiplier.
    pub fn filter(&self, mut window: impl FnMut(&[f64]) -> f64) -> Self {
        let mut out = Self::zero(self.dim);
        for (l, c) in &self.coeffs {
            let lf: Vec<f64> = l.iter().map(|&v| v as f64).collect();
            let w = window(&lf);
            if w != 0.0 {
                out.coeffs.insert(l.clone(), c * w);
            }
        }
        out
    }

    /// `int_{[0, 2 pi)^n} f^2` by Parseval.
    pub fn l2_squared(&self) -> f64 {
        (2.0 * PI).powi(self.dim as i32) * self.coeffs.values().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// `||f||_p` for even integer `p`, as `(int (f^{p/2})^2)^{1/p}`.
    pub fn lp_norm_even(&self, p: u32) -> Result<f64> {
        if p == 0 || p % 2 == 1 {
            return domain(format!("exact trigonometric L^p norms need an even p, got {p}"));
        }
        let mut g = self.clone();
        for _ in 1..p / 2 {
            g = g.mul(self);
        }
        Ok(g.l2_squared().powf(1.0 / p as f64))
    }

    fn max_frequency(&self) -> f64 {
        self.coeffs.keys().map(|l| l.iter().map(|&v| (v * v) as f64).sum::<f64>().sqrt()).fold(0.0, f64::max)
    }

    /// The dyadic norm `( ||f||_p^p + sum_j 2^{s j p} ||T_j f||_p^p )^{1/p}`, exact
    /// up to rounding for even `p`.
    pub fn dyadic_norm(&self, params: BesovParams, shape: WindowShape) -> Result<f64> {
        let p = params.p();
        if p.fract() != 0.0 || (p as u32) % 2 == 1 {
            return domain(format!("exact trigonometric dyadic norms need an even p, got {p}"));
        }
        let pi = p as u32;
        let mut total = self.lp_norm_even(pi)?.powi(pi as i32);
        let top = self.max_frequency();
        let mut j = 1u32;
        while 0.625 * 2f64.powi(j as i32) < top {
            let block = self.filter(|l| block_window(j, l, shape));
            if !block.is_empty() {
                total += 2f64.powf(params.s() * j as f64 * p) * block.lp_norm_even(pi)?.powi(pi as i32);
            }
            j += 1;
        }
        Ok(total.powf(1.0 / p))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::besov::dyadic_norm_with;
    use crate::grid_field::{GridBox, GridField, GridSpec};

    #[test]
    fn sin_squared_evaluates() {
        let p = TrigPoly::sin_squared(2, 1, 3);
        for x in [[0.1, 0.4], [2.0, -1.0]] {
            assert!((p.eval(&x) - (3.0 * x[1]).sin().powi(2)).abs() < 1e-14);
        }
        let prod = p.mul(&TrigPoly::sin_squared(2, 0, 5));
        let x = [0.3, 0.9];
        assert!((prod.eval(&x) - (3.0 * 0.9f64).sin().powi(2) * (5.0 * 0.3f64).sin().powi(2)).abs() < 1e-14);
    }

    #[test]
    fn norms_match_sampled_fields() {
        let f = TrigPoly::sin_squared(2, 0, 2)
            .mul(&TrigPoly::sin_squared(2, 1, 3))
            .scale(0.7)
            .add(&TrigPoly::sin_squared(2, 0, 5).scale(0.2));
        let spec = GridSpec::periodic(GridBox::cube(2, 0.0, 2.0 * PI).unwrap(), vec![64, 64]).unwrap();
        let grid = GridField::sample(&spec, |x| f.eval(x)).unwrap();
        for p in [2u32, 4] {
            let a = f.lp_norm_even(p).unwrap();
            let b = grid.lp_norm(p as f64).unwrap();
            assert!((a - b).abs() < 1e-10 * b);
        }
        let params = BesovParams::new(4.0 / 3.0, 4.0).unwrap();
        for shape in [WindowShape::Radial, WindowShape::Product] {
            let a = f.dyadic_norm(params, shape).unwrap();
            let b = dyadic_norm_with(&grid, params, shape).unwrap();
            assert!((a - b).abs() < 1e-9 * b, "{shape:?}: {a} vs {b}");
        }
        assert!(f.lp_norm_even(3).is_err());
    }
}
