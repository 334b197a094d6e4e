//! Pointwise `F_k[u] = [D^2 u]_k` on grids and the pairings `<F_k[u], phi>`.

mod extension;
mod tensor;

pub use extension::{extension_integrand, pair_extension, pair_extension_alpha, ExtensionForm};
pub use tensor::{fd_hessian_at, tensor_minor, TensorFactor};

use std::fmt;

use crate::error::{domain, Result};
use crate::grid_field::GridField;
use crate::minor_algebra::{adj_entry, PrincipalMinors};
use crate::multiindex::MultiIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairingMethod {
    Direct,
    Weak2,
    Extension,
    Separable,
}

impl fmt::Display for PairingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PairingMethod::Direct => "direct",
            PairingMethod::Weak2 => "weak2",
            PairingMethod::Extension => "extension",
            PairingMethod::Separable => "separable",
        })
    }
}

impl std::str::FromStr for PairingMethod {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(PairingMethod::Direct),
            "weak2" => Ok(PairingMethod::Weak2),
            "extension" => Ok(PairingMethod::Extension),
            "separable" => Ok(PairingMethod::Separable),
            other => Err(crate::Error::Parse(format!("unknown pairing method {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairingResult {
    pub value: f64,
    pub method: PairingMethod,
    /// Grid summary, see [`crate::GridSpec::summary`].
    pub grid: String,
    pub k: usize,
}

impl PairingResult {
    pub const CSV_HEADER: &'static str = "method,k,m,value,grid";

    pub fn csv_row(&self, m: u64) -> String {
        format!("{},{},{},{:e},{}", self.method, self.k, m, self.value, self.grid)
    }
}

fn check_k(u: &GridField, k: usize) -> Result<()> {
    if k == 0 || k > u.dim() {
        return domain(format!("k must lie in 1..={}, got {k}", u.dim()));
    }
    Ok(())
}

/// `[D^2 u]_k` at every node, from the FD Hessian.
pub fn fk_pointwise(u: &GridField, k: usize) -> Result<GridField> {
    check_k(u, k)?;
    let n = u.dim();
    let pm = PrincipalMinors::new(n, k);
    let mut idx = vec![0; n];
    let mut h = vec![0.0; n * n];
    let out = (0..u.spec().len())
        .map(|flat| {
            u.hessian_at(flat, &mut idx, &mut h);
            pm.sum(&h)
        })
        .collect();
    Ok(GridField::from_parts(u.spec().clone(), out))
}

/// `int F_k[u] phi dx` by trapezoid quadrature over the shared grid.
///
/// Streams over nodes, skipping those where `phi` vanishes, so only `u` and
/// `phi` are held in memory.
pub fn pair_direct(u: &GridField, k: usize, phi: &GridField) -> Result<PairingResult> {
    check_k(u, k)?;
    u.check_same_grid(phi)?;
    let spec = u.spec();
    let n = spec.dim();
    let pm = PrincipalMinors::new(n, k);
    let weights: Vec<Vec<f64>> = (0..n).map(|a| spec.axis_weights(a)).collect();
    let mut idx = vec![0; n];
    let mut h = vec![0.0; n * n];
    let mut total = 0.0;
    for (flat, &ph) in phi.samples().iter().enumerate() {
        if ph == 0.0 {
            continue;
        }
        u.hessian_at(flat, &mut idx, &mut h);
        let w: f64 = idx.iter().enumerate().map(|(a, &i)| weights[a][i]).product();
        total += w * ph * pm.sum(&h);
    }
    Ok(PairingResult { value: total, method: PairingMethod::Direct, grid: spec.summary(), k })
}

/// First-order weak form of `<F_2[u], phi>`:
/// `sum_{i<j} int u_i u_j phi_ij - u_i^2 phi_jj / 2 - u_j^2 phi_ii / 2`.
///
/// Each unordered pair is counted once, so the result equals the direct
/// pairing for smooth `u`.
pub fn pair_weak2(u: &GridField, phi: &GridField) -> Result<PairingResult> {
    let n = u.dim();
    if n < 2 {
        return domain("the weak 2-Hessian needs n >= 2");
    }
    u.check_same_grid(phi)?;
    let grad = u.gradient();
    let hphi = phi.hessian();
    let len = u.spec().len();
    let mut integrand = vec![0.0; len];
    for i in 0..n {
        for j in i + 1..n {
            let (ui, uj) = (grad[i].samples(), grad[j].samples());
            let (pij, pii, pjj) = (hphi.get(i, j).samples(), hphi.get(i, i).samples(), hphi.get(j, j).samples());
            for t in 0..len {
                integrand[t] += ui[t] * uj[t] * pij[t] - 0.5 * ui[t] * ui[t] * pjj[t] - 0.5 * uj[t] * uj[t] * pii[t];
            }
        }
    }
    let value = GridField::from_parts(u.spec().clone(), integrand).integrate();
    Ok(PairingResult { value, method: PairingMethod::Weak2, grid: u.spec().summary(), k: 2 })
}

/// `sum_{i in alpha} d_i (adj (D^2 u)_alpha^alpha)_j^i` by finite differences.
///
/// Vanishes identically for `C^3` fields; the discrete value measures the
/// combined FD error.
pub fn cofactor_divergence(u: &GridField, alpha: &MultiIndex, j: usize) -> Result<GridField> {
    if !alpha.contains(j) {
        return domain(format!("{j} is not in {alpha}"));
    }
    if alpha.ambient() != u.dim() {
        return domain(format!("{alpha} does not live in dimension {}", u.dim()));
    }
    let hess = u.hessian();
    let len = u.spec().len();
    let mut total = vec![0.0; len];
    for &i in alpha.entries() {
        let mut entry = vec![0.0; len];
        for (flat, slot) in entry.iter_mut().enumerate() {
            *slot = adj_entry(&hess.at(flat), alpha, alpha, i, j)?;
        }
        let d = GridField::from_parts(u.spec().clone(), entry).partial(i - 1);
        for (t, v) in total.iter_mut().zip(d.samples()) {
            *t += v;
        }
    }
    Ok(GridField::from_parts(u.spec().clone(), total))
}

/// Max over nodes of the largest FD Hessian entry, the discrete `||D^2 phi||_inf`.
pub fn hessian_sup(phi: &GridField) -> f64 {
    let n = phi.dim();
    let mut idx = vec![0; n];
    let mut h = vec![0.0; n * n];
    let mut best: f64 = 0.0;
    for flat in 0..phi.spec().len() {
        phi.hessian_at(flat, &mut idx, &mut h);
        best = h.iter().fold(best, |m, v| m.max(v.abs()));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_field::GridSpec;
    use crate::minor_algebra::{k_trace, SquareMatrix};
    use crate::smooth::unit_bump;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quadratic(spec: &GridSpec, a: &SquareMatrix) -> GridField {
        let n = a.dim();
        GridField::sample(spec, |x| {
            let mut q = 0.0;
            for r in 0..n {
                for c in 0..n {
                    q += x[r] * a.get(r, c) * x[c];
                }
            }
            0.5 * q
        })
        .unwrap()
    }

    fn bump(spec: &GridSpec, center: &[f64], radius: f64) -> GridField {
        GridField::sample(spec, |x| {
            let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
            unit_bump(r2.sqrt() / radius).v
        })
        .unwrap()
    }

    #[test]
    fn fk_of_half_square_norm_is_binomial() {
        let spec = GridSpec::cube(3, -1.0, 1.0, 7).unwrap();
        let u = quadratic(&spec, &SquareMatrix::identity(3));
        for (k, want) in [(1, 3.0), (2, 3.0), (3, 1.0)] {
            let f = fk_pointwise(&u, k).unwrap();
            assert!(f.samples().iter().all(|v| (v - want).abs() < 1e-9));
        }
        assert!(fk_pointwise(&u, 4).is_err());
    }

    #[test]
    fn fk_of_quadratic_is_k_trace_and_rotation_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let spec = GridSpec::cube(3, -1.0, 1.0, 6).unwrap();
        let a = SquareMatrix::random_symmetric(3, &mut rng);
        // rotation about the third axis followed by one about the first
        let (c1, s1) = (0.7f64.cos(), 0.7f64.sin());
        let (c2, s2) = (1.9f64.cos(), 1.9f64.sin());
        let r1 = SquareMatrix::new(3, vec![c1, -s1, 0.0, s1, c1, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let r2 = SquareMatrix::new(3, vec![1.0, 0.0, 0.0, 0.0, c2, -s2, 0.0, s2, c2]).unwrap();
        let r = r1.matmul(&r2);
        let rotated = r.transpose().matmul(&a).matmul(&r);
        for k in 1..=3 {
            let want = k_trace(&a, k).unwrap();
            for field in [quadratic(&spec, &a), quadratic(&spec, &rotated)] {
                let f = fk_pointwise(&field, k).unwrap();
                assert!(f.samples().iter().all(|v| (v - want).abs() < 1e-8 * (1.0 + want.abs())));
            }
        }
    }

    #[test]
    fn k_one_is_the_laplacian() {
        let spec = GridSpec::cube(2, 0.0, 1.0, 12).unwrap();
        let u = GridField::sample(&spec, |x| (x[0] * 2.0).sin() * x[1].exp()).unwrap();
        let lap = u.partial2(0, 0).add(&u.partial2(1, 1)).unwrap();
        let f = fk_pointwise(&u, 1).unwrap();
        assert!(f.sub(&lap).unwrap().max_abs() < 1e-9);
    }

    #[test]
    fn direct_pairing_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let spec = GridSpec::cube(3, -1.0, 1.0, 21).unwrap();
        let a = SquareMatrix::random_symmetric(3, &mut rng);
        let u = quadratic(&spec, &a);
        let phi = bump(&spec, &[0.0, 0.0, 0.0], 0.8);
        for k in 1..=3 {
            let want = k_trace(&a, k).unwrap() * phi.integrate();
            let got = pair_direct(&u, k, &phi).unwrap().value;
            assert!((got - want).abs() <= 1e-9 * (1.0 + want.abs()));
        }
        assert_eq!(pair_direct(&u, 2, &GridField::zeros(&spec)).unwrap().value, 0.0);
        let other = GridSpec::cube(3, -1.0, 1.0, 20).unwrap();
        assert!(pair_direct(&u, 2, &GridField::zeros(&other)).is_err());
    }

    #[test]
    fn direct_pairing_is_homogeneous_and_linear_in_phi() {
        let spec = GridSpec::cube(3, -1.0, 1.0, 17).unwrap();
        let u = GridField::sample(&spec, |x| (x[0] + 0.3 * x[1]).sin() * (x[2] * x[1]).cos()).unwrap();
        let phi = bump(&spec, &[0.1, 0.0, -0.1], 0.7);
        let psi = bump(&spec, &[-0.2, 0.1, 0.0], 0.5);
        for k in 1..=3 {
            let base = pair_direct(&u, k, &phi).unwrap().value;
            let scaled = pair_direct(&u.scale(1.7), k, &phi).unwrap().value;
            assert!((scaled - 1.7f64.powi(k as i32) * base).abs() <= 1e-10 * base.abs());
            let lin = pair_direct(&u, k, &phi.scale(2.0).add(&psi).unwrap()).unwrap().value;
            let parts = 2.0 * base + pair_direct(&u, k, &psi).unwrap().value;
            assert!((lin - parts).abs() <= 1e-10 * (1.0 + parts.abs()));
        }
    }

    #[test]
    fn weak2_matches_direct_on_quadratics() {
        let spec = GridSpec::cube(2, -1.0, 1.0, 81).unwrap();
        let u = quadratic(&spec, &SquareMatrix::identity(2));
        let phi = bump(&spec, &[0.0, 0.0], 0.7);
        let weak = pair_weak2(&u, &phi).unwrap().value;
        let direct = pair_direct(&u, 2, &phi).unwrap().value;
        assert!((direct - phi.integrate()).abs() < 1e-10);
        assert!((weak - direct).abs() < 2e-3 * direct.abs(), "{weak} vs {direct}");
    }

    #[test]
    fn weak2_of_affine_is_quadrature_noise() {
        let spec = GridSpec::cube(2, -1.0, 1.0, 61).unwrap();
        let u = GridField::sample(&spec, |x| 3.0 * x[0] - x[1] + 0.5).unwrap();
        let phi = bump(&spec, &[0.0, 0.0], 0.7);
        assert!(pair_weak2(&u, &phi).unwrap().value.abs() < 1e-8);
        assert!(pair_direct(&u, 2, &phi).unwrap().value.abs() < 1e-9);
        let line = GridSpec::cube(1, 0.0, 1.0, 8).unwrap();
        assert!(pair_weak2(&GridField::zeros(&line), &GridField::zeros(&line)).is_err());
    }

    #[test]
    fn cofactor_divergence_trivial_cases() {
        let spec = GridSpec::cube(3, -1.0, 1.0, 9).unwrap();
        let alpha = MultiIndex::full(3);
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let u = quadratic(&spec, &SquareMatrix::random_symmetric(3, &mut rng));
        assert!(cofactor_divergence(&u, &alpha, 2).unwrap().max_abs() < 1e-8);
        let one_var = GridField::sample(&spec, |x| (2.0 * x[1]).sin()).unwrap();
        for j in 1..=3 {
            assert!(cofactor_divergence(&one_var, &alpha, j).unwrap().max_abs() < 1e-10);
        }
        let pair = MultiIndex::new(vec![1, 3], 3).unwrap();
        assert!(cofactor_divergence(&u, &pair, 2).is_err());
    }

    #[test]
    fn hessian_sup_of_quadratic() {
        let spec = GridSpec::cube(2, -1.0, 1.0, 9).unwrap();
        let u = GridField::sample(&spec, |x| x[0] * x[0] + 3.0 * x[0] * x[1]).unwrap();
        assert!((hessian_sup(&u) - 3.0).abs() < 1e-10);
    }
}
