//! Numerics for distributional k-Hessians.
//!
//! The library covers the determinantal algebra behind `F_k[u] = [D^2 u]_k`,
//! sampled fields with finite differences and quadrature, discretized Besov
//! norms, direct and weak pairings `<F_k[u], phi>`, and the explicit families
//! of fields whose Besov norms vanish while their pairings do not.

pub mod besov;
pub mod constructions;
pub mod error;
pub mod grid_field;
pub mod harness;
pub mod hessian;
pub mod minor_algebra;
pub mod multiindex;
pub mod separable;
pub mod smooth;
pub mod trig;

pub use error::{Error, Result};
pub use grid_field::{GridBox, GridField, GridSpec, Sampling};
pub use minor_algebra::SquareMatrix;
pub use multiindex::MultiIndex;
