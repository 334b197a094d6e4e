//! Smooth cutoffs and the two test functions used by the scaling studies.

use std::fmt;

use crate::error::{domain, Error, Result};
use crate::grid_field::{GridBox, GridField, GridSpec};
use crate::smooth::{bump, Jet, Window1d};

/// Per-axis windows equal to 1 on `inner` and 0 outside `outer`.
pub fn product_windows(inner: &GridBox, outer: &GridBox) -> Result<Vec<Window1d>> {
    if inner.dim() != outer.dim() {
        return domain(format!("inner box has dimension {}, outer {}", inner.dim(), outer.dim()));
    }
    if !outer.strictly_contains_box(inner) {
        return domain("cutoff inner box must lie strictly inside the outer box");
    }
    (0..inner.dim())
        .map(|i| Window1d::new((inner.lower()[i], inner.upper()[i]), (outer.lower()[i], outer.upper()[i])))
        .collect()
}

/// `chi(x) = prod_i w_i(x_i)` sampled on `grid`.
pub fn cutoff(inner: &GridBox, outer: &GridBox, grid: &GridSpec) -> Result<GridField> {
    let windows = product_windows(inner, outer)?;
    if grid.dim() != windows.len() {
        return domain(format!("cutoff of dimension {} on a {}-d grid", windows.len(), grid.dim()));
    }
    GridField::sample(grid, |x| windows.iter().zip(x).map(|(w, &t)| w.eval(t).v).product())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiKind {
    /// `|x|^2 chi(x)` with `chi = 1` on `[-3/4, 3/4]^n`, `0` off `[-1, 1]^n`.
    QuadraticOrigin,
    /// `prod_i phi_i(x_i)`, each a bump over the middle 60% of its axis.
    ProductBumps,
}

impl fmt::Display for PhiKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhiKind::QuadraticOrigin => "quadratic_origin",
            PhiKind::ProductBumps => "product_bumps",
        })
    }
}

impl std::str::FromStr for PhiKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quadratic_origin" => Ok(PhiKind::QuadraticOrigin),
            "product_bumps" => Ok(PhiKind::ProductBumps),
            other => Err(Error::Parse(format!("unknown test function '{other}'"))),
        }
    }
}

const QUADRATIC_INNER: f64 = 0.75;

/// 1-d factor of the quadratic test function's cutoff.
fn quadratic_window() -> Window1d {
    Window1d { inner: (-QUADRATIC_INNER, QUADRATIC_INNER), outer: (-1.0, 1.0) }
}

/// Centre and half-width of the product bump on `[lo, hi]`.
pub fn bump_geometry(lo: f64, hi: f64) -> (f64, f64) {
    (0.5 * (lo + hi), 0.3 * (hi - lo))
}

/// The 1-d factors of [`PhiKind::ProductBumps`] on `bbox`.
pub fn product_bump_factors(bbox: &GridBox) -> Vec<impl Fn(f64) -> f64> {
    (0..bbox.dim())
        .map(|i| {
            let (c, w) = bump_geometry(bbox.lower()[i], bbox.upper()[i]);
            move |t: f64| bump(t, c, w).v
        })
        .collect()
}

/// Point value of the quadratic test function.
pub fn quadratic_phi(x: &[f64]) -> f64 {
    let w = quadratic_window();
    let r2: f64 = x.iter().map(|v| v * v).sum();
    r2 * x.iter().map(|&t| w.eval(t).v).product::<f64>()
}

/// Samples a test function on `grid`; product bumps are laid out over
/// `grid.bbox()`.
pub fn test_phi(kind: PhiKind, grid: &GridSpec) -> Result<GridField> {
    match kind {
        PhiKind::QuadraticOrigin => GridField::sample(grid, quadratic_phi),
        PhiKind::ProductBumps => {
            let fs = product_bump_factors(grid.bbox());
            GridField::sample(grid, |x| fs.iter().zip(x).map(|(f, &t)| f(t)).product())
        }
    }
}

/// `w(t)` times the jet of `f`, for building cut-off tensor factors.
pub(crate) fn windowed(w: &Window1d, f: Jet, t: f64) -> Jet {
    w.eval(t) * f
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn cutoff_is_one_inside_zero_outside() {
        let inner = GridBox::cube(2, -0.5, 0.5).unwrap();
        let outer = GridBox::cube(2, -0.9, 0.9).unwrap();
        let grid = GridSpec::cube(2, -1.0, 1.0, 21).unwrap();
        let chi = cutoff(&inner, &outer, &grid).unwrap();
        // node (10, 10) is the origin, (0, 0) the corner
        assert_eq!(chi.samples()[grid.flatten(&[10, 10])], 1.0);
        assert_eq!(chi.samples()[grid.flatten(&[12, 8])], 1.0);
        assert_eq!(chi.samples()[0], 0.0);
        assert!(chi.samples().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn cutoff_geometry_errors() {
        let inner = GridBox::cube(2, -0.5, 0.95).unwrap();
        let outer = GridBox::cube(2, -0.9, 0.9).unwrap();
        let grid = GridSpec::cube(2, -1.0, 1.0, 21).unwrap();
        assert!(cutoff(&inner, &outer, &grid).is_err());
        let outer3 = GridBox::cube(3, -0.9, 0.9).unwrap();
        assert!(product_windows(&GridBox::cube(2, 0.0, 0.1).unwrap(), &outer3).is_err());
    }

    #[test]
    fn quadratic_phi_near_origin() {
        assert_eq!(quadratic_phi(&[0.0, 0.0, 0.0]), 0.0);
        let x = [0.2, -0.1, 0.3];
        assert!((quadratic_phi(&x) - 0.14).abs() < 1e-15);
        assert_eq!(quadratic_phi(&[1.2, 0.0, 0.0]), 0.0);
        // Hessian 2 I at the origin by central differences
        let h = 1e-3;
        for a in 0..3 {
            let mut e = [0.0; 3];
            e[a] = h;
            let mut m = [0.0; 3];
            m[a] = -h;
            let d2 = (quadratic_phi(&e) - 2.0 * quadratic_phi(&[0.0; 3]) + quadratic_phi(&m)) / (h * h);
            assert!((d2 - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn product_bumps_nonnegative_and_inside_torus() {
        let grid = GridSpec::periodic(GridBox::cube(2, 0.0, 2.0 * PI).unwrap(), vec![64, 64]).unwrap();
        let phi = test_phi(PhiKind::ProductBumps, &grid).unwrap();
        assert!(phi.samples().iter().all(|&v| v >= 0.0));
        assert!(phi.max_abs() > 0.9);
        let (c, w) = bump_geometry(0.0, 2.0 * PI);
        assert!(c - w > 1.0 && c + w < 2.0 * PI - 1.0);
        assert_eq!("product_bumps".parse::<PhiKind>().unwrap(), PhiKind::ProductBumps);
        assert!("gauss".parse::<PhiKind>().is_err());
    }
}
