//! Embedding of `B(s, p)` into `B_loc(2 - 2/k, k)`.

use crate::error::{domain, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Embedding {
    Holds,
    Fails,
}

/// Which of the three failure regimes a parameter point falls into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosureCase {
    /// `p <= k` and `s + 2/k < 2 + n/p - n/k`: rescaled radial bumps.
    Concentration,
    /// `p > k` and `s < 2 - 2/k`: oscillatory tensor products.
    Oscillation,
    /// `p > k` and `s = 2 - 2/k`: lacunary sums.
    Lacunary,
}

impl ClosureCase {
    pub fn label(&self) -> &'static str {
        match self {
            ClosureCase::Concentration => "I",
            ClosureCase::Oscillation => "II",
            ClosureCase::Lacunary => "III",
        }
    }
}

const EQ_TOL: f64 = 1e-9;

fn check(s: f64, p: f64, k: usize, n: usize) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return domain(format!("embedding needs 1 < p < inf, got {p}"));
    }
    if !(s > 0.0 && s < 2.0) {
        return domain(format!("embedding needs 0 < s < 2, got {s}"));
    }
    if k < 2 || k > n {
        return domain(format!("embedding needs 2 <= k <= n, got k = {k}, n = {n}"));
    }
    Ok(())
}

/// Holds iff `s + 2/k > 2 + max(0, n/p - n/k)`, or equality with `p <= k`.
///
/// Equality is detected with an absolute tolerance of `1e-9`.
pub fn embedding_case(s: f64, p: f64, k: usize, n: usize) -> Result<Embedding> {
    check(s, p, k, n)?;
    let (kf, nf) = (k as f64, n as f64);
    let lhs = s + 2.0 / kf;
    let rhs = 2.0 + (nf / p - nf / kf).max(0.0);
    let holds = if (lhs - rhs).abs() <= EQ_TOL { p <= kf + EQ_TOL } else { lhs > rhs };
    Ok(if holds { Embedding::Holds } else { Embedding::Fails })
}

/// The failure regime a point belongs to, if any.
pub fn closure_case(s: f64, p: f64, k: usize, n: usize) -> Result<Option<ClosureCase>> {
    check(s, p, k, n)?;
    let (kf, nf) = (k as f64, n as f64);
    let crit = 2.0 - 2.0 / kf;
    if p <= kf + EQ_TOL {
        if s + 2.0 / kf < 2.0 + nf / p - nf / kf - EQ_TOL {
            return Ok(Some(ClosureCase::Concentration));
        }
        return Ok(None);
    }
    if (s - crit).abs() <= EQ_TOL {
        Ok(Some(ClosureCase::Lacunary))
    } else if s < crit {
        Ok(Some(ClosureCase::Oscillation))
    } else {
        Ok(None)
    }
}
