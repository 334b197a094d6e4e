//! Random sweep of the continuity estimate
//! `|<F_k[u1] - F_k[u2], phi>| <= C ||u1 - u2|| (||u1||^{k-1} + ||u2||^{k-1}) ||D^2 phi||_inf`
//! in the norm of `B(2 - 2/k, k)`.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Check;
use crate::besov::{besov_norm, BesovParams, NormMethod};
use crate::error::{domain, Result};
use crate::grid_field::{GridField, GridSpec};
use crate::hessian::{hessian_sup, pair_direct};
use crate::smooth::bump;

/// The later half's max may exceed the earlier half's by at most this factor.
pub const STABILITY_FACTOR: f64 = 2.0;

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub n: usize,
    pub k: usize,
    pub samples: usize,
    pub points: usize,
    pub budget: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { n: 3, k: 3, samples: 50, points: 24, budget: 20_000, seed: 1 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSample {
    pub pairing_gap: f64,
    pub norm_diff: f64,
    pub norm_u1: f64,
    pub norm_u2: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub phi_hessian_sup: f64,
    pub samples: Vec<SweepSample>,
}

/// A sum of two product bumps with random centres, widths and amplitudes,
/// supported inside `[-0.9, 0.9]^n`.
struct RandomField {
    terms: Vec<(f64, Vec<(f64, f64)>)>,
}

impl RandomField {
    fn draw(rng: &mut ChaCha8Rng, n: usize) -> Self {
        let terms = (0..2)
            .map(|_| {
                let amp = rng.gen_range(-1.0..1.0);
                let axes = (0..n)
                    .map(|_| {
                        let w = rng.gen_range(0.4..0.6);
                        let c = rng.gen_range(-(0.9 - w)..(0.9 - w));
                        (c, w)
                    })
                    .collect();
                (amp, axes)
            })
            .collect();
        Self { terms }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(a, axes)| a * axes.iter().zip(x).map(|(&(c, w), &t)| bump(t, c, w).v).product::<f64>())
            .sum()
    }
}

impl SweepReport {
    pub fn ratios(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.ratio).collect()
    }

    pub fn max_ratio(&self) -> f64 {
        self.ratios().into_iter().fold(0.0, f64::max)
    }

    /// Max ratio over the first and the second half of the samples.
    pub fn half_maxima(&self) -> (f64, f64) {
        let r = self.ratios();
        let half = r.len() / 2;
        let first = r[..half].iter().copied().fold(0.0, f64::max);
        let second = r[half..].iter().copied().fold(0.0, f64::max);
        (first, second)
    }

    pub fn check(&self) -> Check {
        let (a, b) = self.half_maxima();
        let finite = self.samples.iter().all(|s| s.ratio.is_finite());
        let passed = finite && a > 0.0 && b <= STABILITY_FACTOR * a;
        Check::new(
            "continuity_ratio",
            passed,
            format!("max ratio {:.4e}; first half {a:.4e}, second half {b:.4e} (limit x{STABILITY_FACTOR})", self.max_ratio()),
        )
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample,pairing_gap,norm_diff,norm_u1,norm_u2,ratio\n");
        for (i, s) in self.samples.iter().enumerate() {
            let _ = writeln!(
                out,
                "{i},{:e},{:e},{:e},{:e},{:e}",
                s.pairing_gap, s.norm_diff, s.norm_u1, s.norm_u2, s.ratio
            );
        }
        out
    }
}

/// Runs the sweep on `[-1, 1]^n` against a fixed product-bump `phi`.
///
/// Half the pairs are independent draws; the other half are small
/// perturbations `u2 = u1 + eps v`, which probe the estimate near the
/// diagonal where it is tightest.
pub fn run_continuity_sweep(config: &SweepConfig) -> Result<SweepReport> {
    let SweepConfig { n, k, samples, points, budget, seed } = *config;
    if k < 2 || k > n {
        return domain(format!("need 2 <= k <= n, got k = {k}, n = {n}"));
    }
    if samples < 2 {
        return domain("the sweep needs at least 2 samples");
    }
    let params = BesovParams::new(2.0 - 2.0 / k as f64, k as f64)?;
    let grid = GridSpec::cube(n, -1.0, 1.0, points)?;
    let phi = GridField::sample(&grid, |x| x.iter().map(|&t| bump(t, 0.0, 0.8).v).product())?;
    let phi_sup = hessian_sup(&phi);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let norm = |u: &GridField, s: u64| -> Result<f64> {
        Ok(besov_norm(u, params, NormMethod::Gagliardo, budget, s)?.total)
    };
    let mut out = Vec::with_capacity(samples);
    for i in 0..samples {
        let a = RandomField::draw(&mut rng, n);
        let b = RandomField::draw(&mut rng, n);
        let eps = if i % 2 == 0 { 1.0 } else { rng.gen_range(0.01..0.2) };
        let u1 = GridField::sample(&grid, |x| a.eval(x))?;
        let u2 = if i % 2 == 0 {
            GridField::sample(&grid, |x| b.eval(x))?
        } else {
            GridField::sample(&grid, |x| a.eval(x) + eps * b.eval(x))?
        };
        let nseed = seed.wrapping_add(i as u64);
        let gap = (pair_direct(&u1, k, &phi)?.value - pair_direct(&u2, k, &phi)?.value).abs();
        let norm_diff = norm(&u1.sub(&u2)?, nseed)?;
        let (n1, n2) = (norm(&u1, nseed)?, norm(&u2, nseed)?);
        let e = (k - 1) as i32;
        let ratio = gap / (norm_diff * (n1.powi(e) + n2.powi(e)) * phi_sup);
        out.push(SweepSample { pairing_gap: gap, norm_diff, norm_u1: n1, norm_u2: n2, ratio });
    }
    Ok(SweepReport { config: config.clone(), phi_hessian_sup: phi_sup, samples: out })
}
