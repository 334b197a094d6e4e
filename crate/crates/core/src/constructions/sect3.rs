//! Concentrating family `u_m(x) = m^{-rho} g(m x)`.

use super::profile::{radial_g, RadialProfile};
use super::{ConstructionSpec, Family};
use crate::error::{domain, Result};
use crate::grid_field::{GridBox, GridField, GridSpec};

/// Closed grid on `spec.bbox / m`, so every member is resolved by the same
/// number of points across its support.
pub fn sect3_grid(spec: &ConstructionSpec, points: usize) -> Result<GridSpec> {
    spec.expect(Family::Sect3)?;
    let m = spec.m as f64;
    let bbox = GridBox::new(
        spec.bbox.lower().iter().map(|v| v / m).collect(),
        spec.bbox.upper().iter().map(|v| v / m).collect(),
    )?;
    GridSpec::closed(bbox, vec![points; spec.n])
}

/// Samples `m^{-rho} g(m x)`; the grid box must cover `[-1/m, 1/m]^n`.
pub fn sect3_field(spec: &ConstructionSpec, profile: &RadialProfile, grid: &GridSpec) -> Result<GridField> {
    spec.expect(Family::Sect3)?;
    if grid.dim() != spec.n {
        return domain(format!("{}-d grid for n = {}", grid.dim(), spec.n));
    }
    let m = spec.m as f64;
    let reach = 1.0 / m;
    let b = grid.bbox();
    for axis in 0..spec.n {
        if b.lower()[axis] > -reach || b.upper()[axis] < reach {
            return domain(format!(
                "box [{}, {}] on axis {axis} does not cover the support radius {reach}",
                b.lower()[axis],
                b.upper()[axis]
            ));
        }
    }
    let amp = m.powf(-spec.rho);
    let mut y = vec![0.0; spec.n];
    GridField::sample(grid, |x| {
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = m * xi;
        }
        amp * radial_g(profile, &y)
    })
}
