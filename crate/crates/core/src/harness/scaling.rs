//! Scaling studies: build each family member, measure its norm and pairing,
//! fit rates and compare them with the closed-form exponents.

use std::fmt::Write;

use super::config::RunConfig;
use super::fit::{fit_linear, fit_loglog, Fit};
use super::Check;
use crate::besov::{besov_norm, NormMethod, WindowShape};
use crate::constructions::{
    make_profile, product_bump_factors, sect3_field, sect3_grid, sect4_separable, sect5_gamma_poly, sect5_separable,
    test_phi, ConstructionSpec, Family, PhiKind,
};
use crate::error::{domain, Result};
use crate::hessian::pair_direct;
use crate::separable::SeparableField;

/// Slack allowed between fitted and predicted slopes.
pub const SLOPE_TOLERANCE: f64 = 0.15;
/// Fits below this `r^2` are flagged as degraded.
pub const MIN_R_SQUARED: f64 = 0.8;
/// Largest allowed ratio of the sect5 norms across `m`.
pub const NORM_SPREAD_LIMIT: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingRow {
    pub m: u64,
    pub norm: f64,
    pub pairing: f64,
    /// Points per axis of the grid (full or 1-d separable) used for this row.
    pub grid_points: usize,
}

/// How the pairing column is fitted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairingAxis {
    /// `log |pairing|` against `log m`.
    LogLog,
    /// `|pairing|` against `log m`.
    LogLinear,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalingReport {
    pub config: RunConfig,
    pub rows: Vec<ScalingRow>,
    pub norm_fit: Fit,
    pub pairing_fit: Fit,
    pub pairing_axis: PairingAxis,
    pub predicted_norm_exponent: f64,
    /// `None` for the lacunary family, whose pairing grows like `log m`.
    pub predicted_pairing_exponent: Option<f64>,
    pub norm_method: &'static str,
    pub pairing_method: &'static str,
}

pub const CSV_HEADER: &str = "m,grid_points,norm_sp,pairing";

fn next_pow2(v: usize) -> usize {
    v.next_power_of_two()
}

fn separable_points(config: &RunConfig, spec: &ConstructionSpec) -> usize {
    next_pow2(config.grid_points.max(spec.min_points(config.bbox.1 - config.bbox.0)))
}

fn even_p(p: f64) -> Result<u32> {
    if p.fract() != 0.0 || p < 2.0 || (p as u32) % 2 == 1 {
        return domain(format!("the separable norms need an even integer p, got {p}"));
    }
    Ok(p as u32)
}

fn separable_pairing(field: &SeparableField, spec: &ConstructionSpec) -> Result<f64> {
    let phis = product_bump_factors(&spec.bbox);
    let refs: Vec<&dyn Fn(f64) -> f64> = phis.iter().map(|f| f as &dyn Fn(f64) -> f64).collect();
    field.pair_fk(spec.k, &refs)
}

fn measure(config: &RunConfig, spec: &ConstructionSpec) -> Result<ScalingRow> {
    let params = config.besov()?;
    match spec.family {
        Family::Sect3 => {
            let profile = make_profile(config.seed, spec.k, spec.n)?;
            let grid = sect3_grid(spec, config.grid_points)?;
            let u = sect3_field(spec, &profile, &grid)?;
            let norm = besov_norm(&u, params, NormMethod::Gagliardo, config.budget, config.seed)?.total;
            let phi = test_phi(PhiKind::QuadraticOrigin, &grid)?;
            let pairing = pair_direct(&u, spec.k, &phi)?.value;
            Ok(ScalingRow { m: spec.m, norm, pairing, grid_points: config.grid_points })
        }
        Family::Sect4 => {
            even_p(config.p)?;
            let points = separable_points(config, spec);
            let field = sect4_separable(spec, points)?;
            let norm = field.dyadic_norm_product(params)?;
            let pairing = separable_pairing(&field, spec)?;
            Ok(ScalingRow { m: spec.m, norm, pairing, grid_points: points })
        }
        Family::Sect5 => {
            even_p(config.p)?;
            let points = separable_points(config, spec);
            let field = sect5_separable(spec, points)?;
            let norm = sect5_gamma_poly(spec)?.dyadic_norm(params, WindowShape::Radial)?;
            let pairing = separable_pairing(&field, spec)?;
            Ok(ScalingRow { m: spec.m, norm, pairing, grid_points: points })
        }
    }
}

fn predictions(config: &RunConfig) -> (f64, Option<f64>) {
    let (n, k, s, p, rho) = (config.n as f64, config.k as f64, config.s, config.p, config.rho);
    match config.family {
        Family::Sect3 => (s - rho - n / p, Some(2.0 * k - rho * k - n - 2.0)),
        Family::Sect4 => (s - rho, Some(2.0 * k - 2.0 - rho * k)),
        Family::Sect5 => (0.0, None),
    }
}

/// Runs one study. `rho` is checked against the family's interval whenever
/// `k >= 2`; with `k = 1` the run is the linear control.
pub fn run_scaling(config: &RunConfig) -> Result<ScalingReport> {
    config.validate()?;
    let params = config.besov()?;
    let mut rows = Vec::with_capacity(config.m_list.len());
    for &m in &config.m_list {
        let spec = config.spec(m)?;
        if spec.k >= 2 {
            spec.check_rho(params)?;
        }
        rows.push(measure(config, &spec)?);
    }
    let norm_pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.m as f64, r.norm)).collect();
    let norm_fit = fit_loglog(&norm_pts)?;
    let (predicted_norm_exponent, predicted_pairing_exponent) = predictions(config);
    let (pairing_fit, pairing_axis) = match config.family {
        Family::Sect5 => {
            let pts: Vec<(f64, f64)> = rows.iter().map(|r| ((r.m as f64).ln(), r.pairing.abs())).collect();
            (fit_linear(&pts)?, PairingAxis::LogLinear)
        }
        _ => {
            let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.m as f64, r.pairing)).collect();
            (fit_loglog(&pts)?, PairingAxis::LogLog)
        }
    };
    let (norm_method, pairing_method) = match config.family {
        Family::Sect3 => ("gagliardo", "direct"),
        Family::Sect4 => ("dyadic-product", "separable"),
        Family::Sect5 => ("dyadic-trig", "separable"),
    };
    Ok(ScalingReport {
        config: config.clone(),
        rows,
        norm_fit,
        pairing_fit,
        pairing_axis,
        predicted_norm_exponent,
        predicted_pairing_exponent,
        norm_method,
        pairing_method,
    })
}

impl ScalingReport {
    pub fn degraded(&self) -> bool {
        self.norm_fit.r_squared < MIN_R_SQUARED || self.pairing_fit.r_squared < MIN_R_SQUARED
    }

    /// Signs of the pairing column (`+1`, `-1` or `0`), recorded apart from the fit.
    pub fn pairing_signs(&self) -> Vec<i8> {
        self.rows.iter().map(|r| if r.pairing > 0.0 { 1 } else if r.pairing < 0.0 { -1 } else { 0 }).collect()
    }

    pub fn norm_spread(&self) -> f64 {
        let max = self.rows.iter().map(|r| r.norm).fold(f64::NEG_INFINITY, f64::max);
        let min = self.rows.iter().map(|r| r.norm).fold(f64::INFINITY, f64::min);
        max / min
    }

    pub fn checks(&self) -> Vec<Check> {
        let mut out = Vec::new();
        match self.predicted_pairing_exponent {
            Some(pred) => {
                let got = self.pairing_fit.slope;
                out.push(Check::new(
                    "pairing_slope",
                    (got - pred).abs() <= SLOPE_TOLERANCE,
                    format!("fitted {got:.4}, predicted {pred:.4} +/- {SLOPE_TOLERANCE}"),
                ));
                let norm = self.norm_fit.slope;
                let bound = self.predicted_norm_exponent + SLOPE_TOLERANCE;
                out.push(Check::new("norm_slope", norm <= bound, format!("fitted {norm:.4} <= {bound:.4}")));
            }
            None => {
                let spread = self.norm_spread();
                out.push(Check::new(
                    "norm_bounded",
                    spread <= NORM_SPREAD_LIMIT,
                    format!("max/min norm {spread:.4} <= {NORM_SPREAD_LIMIT}"),
                ));
                let c = self.pairing_fit.slope;
                let r2 = self.pairing_fit.r_squared;
                out.push(Check::new(
                    "pairing_log_growth",
                    c > 0.0 && r2 >= MIN_R_SQUARED,
                    format!("slope in log m {c:.4e} > 0, r^2 {r2:.4} >= {MIN_R_SQUARED}"),
                ));
            }
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(out, "{},{},{:e},{:e}", r.m, r.grid_points, r.norm, r.pairing);
        }
        out
    }

    /// Config echo, code version, seed, fits and check outcomes.
    pub fn manifest(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# khessian {} scaling run", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "version = {}", env!("CARGO_PKG_VERSION"));
        out.push_str(&self.config.to_text());
        let _ = writeln!(out, "norm_method = {}", self.norm_method);
        let _ = writeln!(out, "pairing_method = {}", self.pairing_method);
        let _ = writeln!(out, "fitted_norm_slope = {:.6}", self.norm_fit.slope);
        let _ = writeln!(out, "norm_r_squared = {:.6}", self.norm_fit.r_squared);
        let _ = writeln!(out, "predicted_norm_exponent = {:.6}", self.predicted_norm_exponent);
        let axis = match self.pairing_axis {
            PairingAxis::LogLog => "loglog",
            PairingAxis::LogLinear => "log_m_linear",
        };
        let _ = writeln!(out, "pairing_fit = {axis}");
        let _ = writeln!(out, "fitted_pairing_slope = {:.6}", self.pairing_fit.slope);
        let _ = writeln!(out, "pairing_r_squared = {:.6}", self.pairing_fit.r_squared);
        match self.predicted_pairing_exponent {
            Some(e) => {
                let _ = writeln!(out, "predicted_pairing_exponent = {e:.6}");
            }
            None => {
                let _ = writeln!(out, "predicted_pairing_exponent = none (log growth)");
            }
        }
        let signs: Vec<String> = self.pairing_signs().iter().map(|s| s.to_string()).collect();
        let _ = writeln!(out, "pairing_signs = {}", signs.join(","));
        let _ = writeln!(out, "degraded = {}", self.degraded());
        for c in self.checks() {
            let _ = writeln!(out, "check {} = {} ({})", c.name, if c.passed { "pass" } else { "FAIL" }, c.detail);
        }
        out
    }
}
