//! Randomised identity suite over the minor algebra and the Hessian module.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Check;
use crate::constructions::{sect4::omega_boxes, sect4_factors, ConstructionSpec, Family};
use crate::error::{domain, Result};
use crate::grid_field::{GridBox, GridField, GridSpec};
use crate::hessian::{cofactor_divergence, extension_integrand, fd_hessian_at, tensor_minor, ExtensionForm, TensorFactor};
use crate::minor_algebra::{
    adj_entry, binet_sum, empirical_minor_lipschitz, k_trace, laplace_expansion, minor, sym_func, SquareMatrix,
};
use crate::multiindex::{enumerate, MultiIndex};
use crate::smooth::unit_bump;

/// Relative tolerance of the exact algebraic identities.
pub const ALGEBRA_TOLERANCE: f64 = 1e-9;
/// Relative tolerance of the tensor-product closed form against FD.
pub const TENSOR_TOLERANCE: f64 = 1e-4;
/// Minimum observed order of the cofactor divergence under refinement.
pub const DIVERGENCE_ORDER: f64 = 0.9;

/// Outcome of one identity with its worst residual.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentityResult {
    pub name: &'static str,
    pub trials: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    /// `true` when larger residuals are better (observed orders).
    pub lower_bound: bool,
}

impl IdentityResult {
    pub fn passed(&self) -> bool {
        if self.lower_bound {
            self.max_residual >= self.tolerance
        } else {
            self.max_residual.is_finite() && self.max_residual <= self.tolerance
        }
    }

    pub fn check(&self) -> Check {
        let rel = if self.lower_bound { ">=" } else { "<=" };
        Check::new(
            self.name,
            self.passed(),
            format!("{} trials, worst {:.3e} {rel} {:.1e}", self.trials, self.max_residual, self.tolerance),
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport {
    pub seed: u64,
    pub results: Vec<IdentityResult>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(IdentityResult::passed)
    }

    pub fn get(&self, name: &str) -> Option<&IdentityResult> {
        self.results.iter().find(|r| r.name == name)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "identity suite, seed {}", self.seed);
        for r in &self.results {
            let _ = writeln!(out, "{}", r.check().line());
        }
        out
    }
}

fn random_index(rng: &mut impl Rng, k: usize, n: usize) -> MultiIndex {
    let all = enumerate(k, n).expect("k <= n");
    all[rng.gen_range(0..all.len())].clone()
}

fn rel(diff: f64, scale: f64) -> f64 {
    diff.abs() / scale.abs().max(1.0)
}

fn binet(rng: &mut impl Rng, trials: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let d = rng.gen_range(1..=6);
        let k = rng.gen_range(1..=d);
        let a = SquareMatrix::random(d, rng);
        let b = SquareMatrix::random(d, rng);
        let (al, be) = (random_index(rng, k, d), random_index(rng, k, d));
        let want = minor(&a.add(&b), &al, &be)?;
        worst = worst.max(rel(binet_sum(&a, &b, &al, &be)? - want, want));
    }
    Ok(worst)
}

fn laplace(rng: &mut impl Rng, trials: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let d = rng.gen_range(1..=6);
        let k = rng.gen_range(1..=d);
        let a = SquareMatrix::random(d, rng);
        let (al, be) = (random_index(rng, k, d), random_index(rng, k, d));
        let want = minor(&a, &al, &be)?;
        for &i in be.entries() {
            worst = worst.max(rel(laplace_expansion(&a, &al, &be, i)? - want, want));
        }
    }
    Ok(worst)
}

fn trace_vs_spectrum(rng: &mut impl Rng, trials: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let d = rng.gen_range(1..=6);
        let k = rng.gen_range(1..=d);
        let a = SquareMatrix::random_symmetric(d, rng);
        let lam = a.symmetric_eigenvalues();
        let want = k_trace(&a, k)?;
        // scale by the size of the individual products, not their (cancelling) sum
        let scale = sym_func(&lam.iter().map(|l| l.abs()).collect::<Vec<_>>(), k)?;
        worst = worst.max(rel(sym_func(&lam, k)? - want, scale));
    }
    Ok(worst)
}

/// `sum_{j in alpha} a_{j,i'} adj_j^i = delta_{i i'} M_alpha^beta`.
fn adjugate_round_trip(rng: &mut impl Rng, trials: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let d = rng.gen_range(1..=6);
        let k = rng.gen_range(1..=d);
        let a = SquareMatrix::random(d, rng);
        let (al, be) = (random_index(rng, k, d), random_index(rng, k, d));
        let det = minor(&a, &al, &be)?;
        for &i in be.entries() {
            for &ip in be.entries() {
                let mut acc = 0.0;
                for &j in al.entries() {
                    acc += a.get(j - 1, ip - 1) * adj_entry(&a, &al, &be, i, j)?;
                }
                let want = if i == ip { det } else { 0.0 };
                worst = worst.max(rel(acc - want, det));
            }
        }
    }
    Ok(worst)
}

/// Closed-form tensor minors against FD minors at random nodes of an
/// oscillating `(n, k) = (3, 3)` member.
pub fn tensor_oracle(seed: u64, nodes: usize) -> Result<f64> {
    let spec = ConstructionSpec::new(Family::Sect4, 3, 3, 7.0 / 6.0, 4, 4.0, GridBox::cube(3, 0.0, 2.0 * std::f64::consts::PI)?)?;
    let (coeff, fs) = sect4_factors(&spec)?;
    let factors: Vec<TensorFactor> = fs.iter().map(|f| f.as_ref() as TensorFactor).collect();
    let u = |x: &[f64]| coeff * fs.iter().zip(x).map(|(f, &t)| f(t).v).product::<f64>();
    let (omega, _) = omega_boxes(&spec.bbox)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..nodes {
        let x: Vec<f64> = (0..3).map(|i| rng.gen_range(omega.lower()[i]..omega.upper()[i])).collect();
        let hess = fd_hessian_at(u, &x, 1e-3)?;
        for k in 2..=3 {
            for alpha in enumerate(k, 3)? {
                let closed = coeff.powi(k as i32) * tensor_minor(&factors, &alpha, &x)?;
                let fd = minor(&hess, &alpha, &alpha)?;
                // near a zero of the minor, measure against the typical product size
                let scale = closed.abs().max(1e-3 * hess.max_abs().powi(k as i32)).max(f64::MIN_POSITIVE);
                worst = worst.max((closed - fd).abs() / scale);
            }
        }
    }
    Ok(worst)
}

/// Smallest observed order of `sup |sum_i d_i adj_j^i|` over successive
/// grid doublings, for a smooth bump in `n` dimensions.
pub fn divergence_order(n: usize, levels: &[usize]) -> Result<f64> {
    if levels.len() < 2 {
        return domain("need at least two refinement levels");
    }
    let alpha = MultiIndex::full(n);
    let mut sups = Vec::new();
    let mut hs = Vec::new();
    for &pts in levels {
        let spec = GridSpec::cube(n, -1.0, 1.0, pts)?;
        let u = GridField::sample(&spec, |x| {
            let r2: f64 = x.iter().enumerate().map(|(i, v)| (v - 0.05 * i as f64).powi(2)).sum();
            unit_bump(r2.sqrt() / 0.8).v * (1.0 + 0.5 * x[0])
        })?;
        let mut sup: f64 = 0.0;
        for &j in alpha.entries() {
            sup = sup.max(cofactor_divergence(&u, &alpha, j)?.max_abs());
        }
        sups.push(sup);
        hs.push(spec.spacing(0));
    }
    let mut order = f64::INFINITY;
    for w in 0..levels.len() - 1 {
        order = order.min((sups[w] / sups[w + 1]).ln() / (hs[w] / hs[w + 1]).ln());
    }
    Ok(order)
}

/// Both arrangements of the extended integrand, and the statement form
/// against adjugate entries, on random symmetric Hessians.
fn extension_forms(rng: &mut impl Rng, trials: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let n = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=n);
        let alpha = random_index(rng, k, n);
        let hu = SquareMatrix::random_symmetric(n + 2, rng);
        let hp = SquareMatrix::random_symmetric(n + 2, rng);
        let st = extension_integrand(&alpha, ExtensionForm::Statement, &hu, &hp)?;
        let pf = extension_integrand(&alpha, ExtensionForm::ProofFinal, &hu, &hp)?;
        let lifted = alpha.lift(n + 2)?;
        let rows = lifted.insert(n + 2)?;
        let cols = lifted.insert(n + 1)?;
        let mut adj = 0.0;
        for &i in cols.entries() {
            for &j in rows.entries() {
                adj += adj_entry(&hu, &rows, &cols, i, j)? * hp.get(i - 1, j - 1);
            }
        }
        worst = worst.max(rel(st - pf, st)).max(rel(st - adj, adj));
    }
    Ok(worst)
}

/// Runs every identity family `trials` times (the FD-based checks use fixed
/// refinement ladders).
pub fn run_identities(seed: u64, trials: usize) -> Result<IdentityReport> {
    if trials == 0 {
        return domain("trials must be at least 1");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exact = |name, r: f64| IdentityResult { name, trials, max_residual: r, tolerance: ALGEBRA_TOLERANCE, lower_bound: false };
    let mut results = vec![
        exact("binet", binet(&mut rng, trials)?),
        exact("laplace", laplace(&mut rng, trials)?),
        exact("k_trace_vs_spectrum", trace_vs_spectrum(&mut rng, trials)?),
        exact("adjugate_round_trip", adjugate_round_trip(&mut rng, trials)?),
        exact("extension_forms", extension_forms(&mut rng, trials)?),
    ];
    results.push(IdentityResult {
        name: "tensor_minor_vs_fd",
        trials,
        max_residual: tensor_oracle(seed, trials)?,
        tolerance: TENSOR_TOLERANCE,
        lower_bound: false,
    });
    results.push(IdentityResult {
        name: "cofactor_divergence_order",
        trials: 3,
        max_residual: divergence_order(2, &[161, 321, 641])?.min(divergence_order(3, &[41, 81])?),
        tolerance: DIVERGENCE_ORDER,
        lower_bound: true,
    });
    let lip = empirical_minor_lipschitz(4, 3, trials, &mut rng)?;
    results.push(IdentityResult { name: "minor_lipschitz_constant", trials, max_residual: lip, tolerance: 1e6, lower_bound: false });
    Ok(IdentityReport { seed, results })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes_and_is_deterministic() {
        let a = run_identities(5, 10).unwrap();
        assert!(a.passed(), "{}", a.to_text());
        assert_eq!(a.to_text(), run_identities(5, 10).unwrap().to_text());
        assert!(run_identities(5, 0).is_err());
    }
}
