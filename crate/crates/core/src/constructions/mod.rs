//! The explicit counterexample families: rescaled radial bumps, oscillatory
//! tensor products and lacunary sums, with their cutoffs and test functions.

use std::f64::consts::PI;
use std::fmt;

use crate::besov::BesovParams;
use crate::error::{domain, Error, Result};
use crate::grid_field::{GridBox, GridSpec};

pub mod cutoff;
pub mod profile;
pub mod sect3;
pub mod sect4;
pub mod sect5;

pub use cutoff::{cutoff, product_bump_factors, product_windows, quadratic_phi, test_phi, PhiKind};
pub use profile::{
    radial_identity_check, radial_identity_rhs, make_profile, radial_g, radial_hessian, sphere_area, wallis, RadialIdentityReport, ProfileKind,
    RadialProfile,
};
pub use sect3::{sect3_field, sect3_grid};
pub use sect4::{sect4_factors, sect4_field, sect4_separable};
pub use sect5::{lacunary_frequencies, sect5_coefficients, sect5_field, sect5_gamma_poly, sect5_separable};

/// Grid points per oscillation period `pi / m` demanded on every axis.
pub const POINTS_PER_PERIOD: f64 = 10.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// `m^{-rho} g(m x)`: concentration.
    Sect3,
    /// `m^{-rho} chi prod sin^2(m x_i) prod x_j`: oscillation.
    Sect4,
    /// Lacunary sum of oscillatory products at the critical exponent.
    Sect5,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Sect3 => "sect3",
            Family::Sect4 => "sect4",
            Family::Sect5 => "sect5",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sect3" => Ok(Family::Sect3),
            "sect4" => Ok(Family::Sect4),
            "sect5" => Ok(Family::Sect5),
            other => Err(Error::Parse(format!("unknown family '{other}' (expected sect3, sect4 or sect5)"))),
        }
    }
}

/// One member of a counterexample family.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionSpec {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub rho: f64,
    pub m: u64,
    /// Geometric ratio of the lacunary frequencies (sect5 only).
    pub lacunary_base: f64,
    pub bbox: GridBox,
}

/// `ceil(10 m L / pi)`, the fewest points resolving frequency `m` over length `L`.
pub fn resolution_points(freq: u64, length: f64) -> usize {
    (POINTS_PER_PERIOD * freq as f64 * length / PI - 1e-9).ceil().max(4.0) as usize
}

impl ConstructionSpec {
    pub fn new(family: Family, n: usize, k: usize, rho: f64, m: u64, lacunary_base: f64, bbox: GridBox) -> Result<Self> {
        if n == 0 || k == 0 || k > n {
            return domain(format!("need 1 <= k <= n, got k = {k}, n = {n}"));
        }
        if bbox.dim() != n {
            return domain(format!("box of dimension {} for n = {n}", bbox.dim()));
        }
        if m == 0 {
            return domain("m must be positive");
        }
        if !rho.is_finite() {
            return domain("rho must be finite");
        }
        match family {
            Family::Sect3 => {}
            Family::Sect4 | Family::Sect5 => {
                if k < 2 {
                    return domain(format!("{family} needs 2 <= k <= n, got k = {k}, n = {n}"));
                }
            }
        }
        if family == Family::Sect5 && !(lacunary_base >= 2.0 && lacunary_base.is_finite()) {
            return domain(format!("lacunary base must be at least 2, got {lacunary_base}"));
        }
        Ok(Self { family, n, k, rho, m, lacunary_base, bbox })
    }

    pub fn with_m(&self, m: u64) -> Result<Self> {
        Self::new(self.family, self.n, self.k, self.rho, m, self.lacunary_base, self.bbox.clone())
    }

    /// Open interval of admissible `rho` for the family at `(s, p)`.
    pub fn rho_interval(&self, params: BesovParams) -> Option<(f64, f64)> {
        let (n, k) = (self.n as f64, self.k as f64);
        let (s, p) = (params.s(), params.p());
        match self.family {
            Family::Sect3 => Some((s - n / p, 2.0 - n / k - 2.0 / k)),
            Family::Sect4 => Some((s.max(2.0 - 4.0 / k), 2.0 - 2.0 / k)),
            Family::Sect5 => None,
        }
    }

    /// Checks `rho` against the family's interval for `(s, p)`.
    pub fn check_rho(&self, params: BesovParams) -> Result<()> {
        if let Some((lo, hi)) = self.rho_interval(params) {
            if !(lo < self.rho && self.rho < hi) {
                return domain(format!(
                    "{}: rho = {} must lie in ({lo}, {hi}) for s = {}, p = {}",
                    self.family,
                    self.rho,
                    params.s(),
                    params.p()
                ));
            }
        }
        Ok(())
    }

    /// Largest oscillation frequency of the member (`0` for sect3).
    pub fn top_frequency(&self) -> u64 {
        match self.family {
            Family::Sect3 => 0,
            Family::Sect4 => self.m,
            Family::Sect5 => *lacunary_frequencies(self.lacunary_base, self.m).last().unwrap_or(&0),
        }
    }

    /// Points needed along an axis of length `length`.
    pub fn min_points(&self, length: f64) -> usize {
        match self.family {
            Family::Sect3 => 4,
            _ => resolution_points(self.top_frequency(), length),
        }
    }

    /// Refuses a grid that under-resolves the oscillation.
    pub fn check_resolution(&self, grid: &GridSpec) -> Result<()> {
        for axis in 0..grid.dim() {
            let length = grid.bbox().length(axis);
            let need = self.min_points(length);
            if grid.points()[axis] < need {
                return domain(format!(
                    "{} at m = {} needs {need} points on axis {axis} (length {length:.4}), grid has {}",
                    self.family,
                    self.m,
                    grid.points()[axis]
                ));
            }
        }
        Ok(())
    }

    pub(crate) fn expect(&self, family: Family) -> Result<()> {
        if self.family != family {
            return domain(format!("expected a {family} spec, got {}", self.family));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: Family, rho: f64) -> ConstructionSpec {
        ConstructionSpec::new(family, 3, 3, rho, 4, 4.0, GridBox::cube(3, 0.0, 2.0 * PI).unwrap()).unwrap()
    }

    #[test]
    fn default_rho_values_are_admissible() {
        spec(Family::Sect3, 0.0).check_rho(BesovParams::new(1.1, 2.0).unwrap()).unwrap();
        spec(Family::Sect4, 7.0 / 6.0).check_rho(BesovParams::new(1.0, 4.0).unwrap()).unwrap();
        let (lo, hi) = spec(Family::Sect3, 0.0).rho_interval(BesovParams::new(1.1, 2.0).unwrap()).unwrap();
        assert!((lo + 0.4).abs() < 1e-12 && (hi - 1.0 / 3.0).abs() < 1e-12);
        assert!(spec(Family::Sect4, 1.4).check_rho(BesovParams::new(1.0, 4.0).unwrap()).is_err());
        assert!(spec(Family::Sect3, 0.5).check_rho(BesovParams::new(1.1, 2.0).unwrap()).is_err());
    }

    #[test]
    fn construction_errors() {
        let b = GridBox::cube(3, 0.0, 1.0).unwrap();
        assert!(ConstructionSpec::new(Family::Sect5, 3, 3, 0.0, 2, 1.5, b.clone()).is_err());
        assert!(ConstructionSpec::new(Family::Sect4, 3, 1, 0.0, 2, 4.0, b.clone()).is_err());
        assert!(ConstructionSpec::new(Family::Sect3, 2, 2, 0.0, 2, 4.0, b.clone()).is_err());
        assert!(ConstructionSpec::new(Family::Sect3, 3, 3, 0.0, 0, 4.0, b).is_err());
        assert!("sect6".parse::<Family>().is_err());
        assert_eq!("sect5".parse::<Family>().unwrap().to_string(), "sect5");
    }

    #[test]
    fn resolution_rule() {
        assert_eq!(resolution_points(4, 2.0 * PI), 80);
        assert_eq!(resolution_points(1, PI), 10);
        let s = spec(Family::Sect4, 7.0 / 6.0);
        let coarse = GridSpec::periodic(s.bbox.clone(), vec![64; 3]).unwrap();
        assert!(s.check_resolution(&coarse).is_err());
        let fine = GridSpec::periodic(s.bbox.clone(), vec![80; 3]).unwrap();
        s.check_resolution(&fine).unwrap();
    }
}
