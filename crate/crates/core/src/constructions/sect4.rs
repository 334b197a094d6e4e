//! Oscillating family `u_m = m^{-rho} chi(x) prod_{i<k} sin^2(m x_i) prod_{i>=k} x_i`.

use super::cutoff::{product_windows, windowed};
use super::{ConstructionSpec, Family};
use crate::error::{domain, Result};
use crate::grid_field::{GridBox, GridField, GridSpec};
use crate::separable::{Axis1d, SeparableField};
use crate::smooth::{Jet, Window1d};

/// Fractions of each axis length trimmed to get `Omega` (where `chi = 1`) and
/// the cutoff's outer box.
const OMEGA_MARGIN: f64 = 0.16;
const CUTOFF_MARGIN: f64 = 0.04;

/// `(Omega, outer)` for a family box; on `[0, 2 pi]` these are roughly
/// `[1, 2 pi - 1]` and `[1/4, 2 pi - 1/4]`.
pub fn omega_boxes(bbox: &GridBox) -> Result<(GridBox, GridBox)> {
    let shrink = |f: f64| {
        GridBox::new(
            (0..bbox.dim()).map(|i| bbox.lower()[i] + f * bbox.length(i)).collect(),
            (0..bbox.dim()).map(|i| bbox.upper()[i] - f * bbox.length(i)).collect(),
        )
    };
    Ok((shrink(OMEGA_MARGIN)?, shrink(CUTOFF_MARGIN)?))
}

pub(crate) fn sin_squared(freq: f64, t: f64) -> Jet {
    let a = freq * t;
    Jet::new(a.sin().powi(2), freq * (2.0 * a).sin(), 2.0 * freq * freq * (2.0 * a).cos())
}

pub(crate) fn family_windows(spec: &ConstructionSpec) -> Result<Vec<Window1d>> {
    let (omega, outer) = omega_boxes(&spec.bbox)?;
    for axis in spec.k - 1..spec.n {
        if omega.lower()[axis] <= 0.0 {
            return domain(format!("Omega must lie in x_{} > 0, its lower edge is {}", axis + 1, omega.lower()[axis]));
        }
    }
    product_windows(&omega, &outer)
}

/// A boxed 1-d tensor factor.
pub type BoxedFactor = Box<dyn Fn(f64) -> Jet>;

/// `(m^{-rho}, [f_1, ..., f_n])` with `u_m = m^{-rho} prod_i f_i(x_i)`, each
/// `f_i` including its cutoff window.
pub fn sect4_factors(spec: &ConstructionSpec) -> Result<(f64, Vec<BoxedFactor>)> {
    spec.expect(Family::Sect4)?;
    let windows = family_windows(spec)?;
    let m = spec.m as f64;
    let factors = windows
        .into_iter()
        .enumerate()
        .map(|(axis, w)| -> BoxedFactor {
            if axis < spec.k - 1 {
                Box::new(move |t| windowed(&w, sin_squared(m, t), t))
            } else {
                Box::new(move |t| windowed(&w, Jet::var(t), t))
            }
        })
        .collect();
    Ok((m.powf(-spec.rho), factors))
}

/// Samples the member on `grid` (any sub-box of the family box, or the
/// periodic box itself); the resolution rule is enforced on `grid`.
pub fn sect4_field(spec: &ConstructionSpec, grid: &GridSpec) -> Result<GridField> {
    if grid.dim() != spec.n {
        return domain(format!("{}-d grid for n = {}", grid.dim(), spec.n));
    }
    let (coeff, factors) = sect4_factors(spec)?;
    spec.check_resolution(grid)?;
    GridField::sample(grid, |x| coeff * factors.iter().zip(x).map(|(f, &t)| f(t).v).product::<f64>())
}

fn family_axes(spec: &ConstructionSpec, points: usize) -> Result<Vec<Axis1d>> {
    (0..spec.n)
        .map(|i| {
            let length = spec.bbox.length(i);
            let need = spec.min_points(length);
            if points < need {
                return domain(format!("{} at m = {} needs {need} points per axis, got {points}", spec.family, spec.m));
            }
            Axis1d::new(spec.bbox.lower()[i], length, points)
        })
        .collect()
}

/// The member as a one-term separable field with `points` nodes per axis.
pub fn sect4_separable(spec: &ConstructionSpec, points: usize) -> Result<SeparableField> {
    let (coeff, factors) = sect4_factors(spec)?;
    let mut field = SeparableField::new(family_axes(spec, points)?)?;
    let refs: Vec<&dyn Fn(f64) -> Jet> = factors.iter().map(|f| f.as_ref()).collect();
    field.push_term(coeff, &refs)?;
    Ok(field)
}

pub(crate) fn separable_axes(spec: &ConstructionSpec, points: usize) -> Result<Vec<Axis1d>> {
    family_axes(spec, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hessian::{fd_hessian_at, tensor_minor, TensorFactor};
    use crate::minor_algebra::minor;
    use crate::multiindex::enumerate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn spec(m: u64) -> ConstructionSpec {
        ConstructionSpec::new(Family::Sect4, 3, 3, 7.0 / 6.0, m, 4.0, GridBox::cube(3, 0.0, 2.0 * PI).unwrap()).unwrap()
    }

    #[test]
    fn equals_uncut_product_on_omega() {
        let s = spec(4);
        let (omega, _) = omega_boxes(&s.bbox).unwrap();
        let grid = GridSpec::closed(omega.clone(), vec![60; 3]).unwrap();
        let u = sect4_field(&s, &grid).unwrap();
        let c = 4f64.powf(-7.0 / 6.0);
        for flat in (0..grid.len()).step_by(97) {
            let x = grid.coords(flat);
            let want = c * (4.0 * x[0]).sin().powi(2) * (4.0 * x[1]).sin().powi(2) * x[2];
            assert!((u.samples()[flat] - want).abs() < 1e-14);
        }
        assert!(omega.lower()[0] > 1.0 && omega.upper()[0] < 2.0 * PI - 1.0);
    }

    #[test]
    fn sup_norm_decays_like_m_to_minus_rho() {
        for m in [2u64, 4, 8] {
            let s = spec(m);
            let n = s.min_points(2.0 * PI);
            let grid = GridSpec::periodic(s.bbox.clone(), vec![n; 3]).unwrap();
            let u = sect4_field(&s, &grid).unwrap();
            assert!(u.max_abs() <= 2.0 * PI * (m as f64).powf(-7.0 / 6.0));
        }
    }

    #[test]
    fn under_resolved_grid_is_refused() {
        let s = spec(8);
        let grid = GridSpec::periodic(s.bbox.clone(), vec![100; 3]).unwrap();
        assert!(sect4_field(&s, &grid).is_err());
        assert!(sect4_separable(&s, 100).is_err());
        assert_eq!(sect4_separable(&s, 160).unwrap().term_count(), 1);
    }

    #[test]
    fn tensor_minors_match_fd_on_omega() {
        let s = spec(4);
        let (coeff, fs) = sect4_factors(&s).unwrap();
        let factors: Vec<TensorFactor> = fs.iter().map(|f| f.as_ref() as TensorFactor).collect();
        let (omega, _) = omega_boxes(&s.bbox).unwrap();
        let u = |x: &[f64]| coeff * fs.iter().zip(x).map(|(f, &t)| f(t).v).product::<f64>();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x: Vec<f64> = (0..3).map(|i| rng.gen_range(omega.lower()[i]..omega.upper()[i])).collect();
            let hess = fd_hessian_at(u, &x, 1e-3).unwrap();
            for k in 2..=3 {
                for alpha in enumerate(k, 3).unwrap() {
                    let closed = coeff.powi(k as i32) * tensor_minor(&factors, &alpha, &x).unwrap();
                    let fd = minor(&hess, &alpha, &alpha).unwrap();
                    let scale = closed.abs().max(1e-3 * hess.max_abs().powi(k as i32));
                    assert!((closed - fd).abs() <= 1e-4 * scale, "{alpha:?} at {x:?}: {closed} vs {fd}");
                }
            }
        }
    }

    #[test]
    fn gamma_bar_must_be_positive() {
        let s = ConstructionSpec::new(Family::Sect4, 3, 3, 1.2, 2, 4.0, GridBox::cube(3, -3.0, 3.0).unwrap()).unwrap();
        assert!(sect4_factors(&s).is_err());
    }
}
