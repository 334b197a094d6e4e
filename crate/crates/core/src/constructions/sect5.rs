//! Lacunary family `u_m = chi(x) sum_{l<=m} n_l^{-(2-2/k)} l^{-1/k} g_l(x)` with
//! the desk-scale frequencies `n_l = ceil(base^l)`.

use super::cutoff::windowed;
use super::sect4::{family_windows, separable_axes, sin_squared, BoxedFactor};
use super::{ConstructionSpec, Family};
use crate::error::{domain, Result};
use crate::grid_field::{GridField, GridSpec};
use crate::separable::SeparableField;
use crate::smooth::Jet;
use crate::trig::TrigPoly;

/// `n_l = ceil(base^l)` for `l = 1..=m`.
pub fn lacunary_frequencies(base: f64, m: u64) -> Vec<u64> {
    (1..=m).map(|l| (base.powi(l as i32) - 1e-9).ceil() as u64).collect()
}

/// `c_l = 1 / (n_l^{2-2/k} l^{1/k})`.
pub fn sect5_coefficients(spec: &ConstructionSpec) -> Vec<f64> {
    let k = spec.k as f64;
    lacunary_frequencies(spec.lacunary_base, spec.m)
        .iter()
        .enumerate()
        .map(|(i, &nl)| 1.0 / ((nl as f64).powf(2.0 - 2.0 / k) * ((i + 1) as f64).powf(1.0 / k)))
        .collect()
}

fn term_factors(spec: &ConstructionSpec) -> Result<Vec<(f64, Vec<BoxedFactor>)>> {
    spec.expect(Family::Sect5)?;
    let windows = family_windows(spec)?;
    let freqs = lacunary_frequencies(spec.lacunary_base, spec.m);
    Ok(freqs
        .iter()
        .zip(sect5_coefficients(spec))
        .map(|(&nl, c)| {
            let f = nl as f64;
            let factors = windows
                .iter()
                .enumerate()
                .map(|(axis, &w)| -> BoxedFactor {
                    if axis < spec.k - 1 {
                        Box::new(move |t| windowed(&w, sin_squared(f, t), t))
                    } else {
                        Box::new(move |t| windowed(&w, Jet::var(t), t))
                    }
                })
                .collect();
            (c, factors)
        })
        .collect())
}

/// Samples the member on `grid`; the top frequency must pass the resolution rule.
pub fn sect5_field(spec: &ConstructionSpec, grid: &GridSpec) -> Result<GridField> {
    if grid.dim() != spec.n {
        return domain(format!("{}-d grid for n = {}", grid.dim(), spec.n));
    }
    let terms = term_factors(spec)?;
    spec.check_resolution(grid)?;
    GridField::sample(grid, |x| {
        terms.iter().map(|(c, fs)| c * fs.iter().zip(x).map(|(f, &t)| f(t).v).product::<f64>()).sum()
    })
}

/// The member as an `m`-term separable field.
pub fn sect5_separable(spec: &ConstructionSpec, points: usize) -> Result<SeparableField> {
    let terms = term_factors(spec)?;
    let mut field = SeparableField::new(separable_axes(spec, points)?)?;
    for (c, fs) in &terms {
        let refs: Vec<&dyn Fn(f64) -> Jet> = fs.iter().map(|f| f.as_ref()).collect();
        field.push_term(*c, &refs)?;
    }
    Ok(field)
}

/// `w_m(x_gamma) = sum_l c_l prod_{i in gamma} sin^2(n_l x_i)` on the
/// `(k-1)`-torus, as an exact trigonometric polynomial.
pub fn sect5_gamma_poly(spec: &ConstructionSpec) -> Result<TrigPoly> {
    spec.expect(Family::Sect5)?;
    let dim = spec.k - 1;
    let freqs = lacunary_frequencies(spec.lacunary_base, spec.m);
    let mut total = TrigPoly::zero(dim);
    for (&nl, c) in freqs.iter().zip(sect5_coefficients(spec)) {
        let mut term = TrigPoly::constant(dim, c);
        for axis in 0..dim {
            term = term.mul(&TrigPoly::sin_squared(dim, axis, nl as i64));
        }
        total = total.add(&term);
    }
    Ok(total)
}
