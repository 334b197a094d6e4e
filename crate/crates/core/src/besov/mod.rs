//! Discretized Besov norms `||u||_{s,p}`: the `W^{1,p}` part, a Monte Carlo
//! Gagliardo seminorm of `Du`, a Littlewood–Paley norm on the torus, and the
//! embedding classifier into `B_loc(2 - 2/k, k)`.

mod dyadic;
mod embedding;
mod gagliardo;

pub use dyadic::{
    block_window, dyadic_blocks, dyadic_norm, dyadic_norm_with, fft_nd, frequency, low_bump, WindowShape,
};
pub use embedding::{embedding_case, closure_case, ClosureCase, Embedding};
pub use gagliardo::{gagliardo_seminorm, DEFAULT_BUDGET, DEFAULT_SEED};

use std::fmt;

use crate::error::{domain, Result};
use crate::grid_field::GridField;

/// Regularity `s` and integrability `p` of a Besov norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesovParams {
    s: f64,
    p: f64,
}

impl BesovParams {
    pub fn new(s: f64, p: f64) -> Result<Self> {
        if !(s > 0.0 && s < 2.0) {
            return domain(format!("Besov regularity must lie in (0, 2), got s = {s}"));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return domain(format!("Besov integrability must lie in [1, inf), got p = {p}"));
        }
        Ok(Self { s, p })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn p(&self) -> f64 {
        self.p
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormMethod {
    Gagliardo,
    Dyadic,
}

impl fmt::Display for NormMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormMethod::Gagliardo => "gagliardo",
            NormMethod::Dyadic => "dyadic",
        })
    }
}

impl std::str::FromStr for NormMethod {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gagliardo" => Ok(NormMethod::Gagliardo),
            "dyadic" => Ok(NormMethod::Dyadic),
            other => Err(crate::Error::Parse(format!("unknown norm method {other:?}"))),
        }
    }
}

/// One norm evaluation.
///
/// For the dyadic method `w1p` holds `||u||_p` and `seminorm` the remainder,
/// so that `total = w1p + seminorm` in both cases.
#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub w1p: f64,
    pub seminorm: f64,
    pub total: f64,
    pub method: NormMethod,
    pub params: BesovParams,
    pub sampling_budget: usize,
    pub seed: u64,
}

impl NormReport {
    pub const CSV_HEADER: &'static str = "method,s,p,w1p,seminorm,total,budget,seed";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:e},{:e},{:e},{},{}",
            self.method,
            self.params.s,
            self.params.p,
            self.w1p,
            self.seminorm,
            self.total,
            self.sampling_budget,
            self.seed
        )
    }
}

/// `||u||_p + || |Du| ||_p`.
pub fn w1p_norm(u: &GridField, p: f64) -> Result<f64> {
    let zero = u.lp_norm(p)?;
    let grad = u.gradient();
    let mag = GridField::from_parts(
        u.spec().clone(),
        (0..u.spec().len()).map(|i| grad.iter().map(|g| g.samples()[i] * g.samples()[i]).sum::<f64>().sqrt()).collect(),
    );
    Ok(zero + mag.lp_norm(p)?)
}

/// `|| |D^2 u|_F ||_p`.
pub fn hessian_lp_norm(u: &GridField, p: f64) -> Result<f64> {
    let hess = u.hessian();
    let n = u.dim();
    let mut buf = vec![0.0; n * n];
    let mag: Vec<f64> = (0..u.spec().len())
        .map(|i| {
            hess.fill_at(i, &mut buf);
            buf.iter().map(|v| v * v).sum::<f64>().sqrt()
        })
        .collect();
    GridField::from_parts(u.spec().clone(), mag).lp_norm(p)
}

/// Computes a full norm report by the requested method.
pub fn besov_norm(u: &GridField, params: BesovParams, method: NormMethod, budget: usize, seed: u64) -> Result<NormReport> {
    match method {
        NormMethod::Gagliardo => {
            let w1p = w1p_norm(u, params.p)?;
            let seminorm = gagliardo_seminorm(u, params, budget, seed)?;
            Ok(NormReport { w1p, seminorm, total: w1p + seminorm, method, params, sampling_budget: budget, seed })
        }
        NormMethod::Dyadic => {
            let total = dyadic_norm(u, params)?;
            let lp = u.lp_norm(params.p)?;
            Ok(NormReport {
                w1p: lp,
                seminorm: (total - lp).max(0.0),
                total,
                method,
                params,
                sampling_budget: 0,
                seed,
            })
        }
    }
}

/// `(||u||_{s,p}, ||u||_p^{1 - s/2} ||D^2 u||_p^{s/2})` with the Gagliardo form
/// of the norm.
pub fn interpolation_report(u: &GridField, params: BesovParams, budget: usize, seed: u64) -> Result<(f64, f64)> {
    let lhs = besov_norm(u, params, NormMethod::Gagliardo, budget, seed)?.total;
    let s = params.s();
    let lp = u.lp_norm(params.p())?;
    let d2 = hessian_lp_norm(u, params.p())?;
    let product = if lp == 0.0 || d2 == 0.0 { 0.0 } else { lp.powf(1.0 - s / 2.0) * d2.powf(s / 2.0) };
    Ok((lhs, product))
}
