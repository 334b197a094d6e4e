//! Principal minors of the Hessian of a tensor product `F(x) = prod_i f_i(x_i)`.

use crate::error::{domain, Result};
use crate::grid_field::{GridBox, GridField, GridSpec};
use crate::minor_algebra::SquareMatrix;
use crate::multiindex::MultiIndex;
use crate::smooth::Jet;

/// A 1-d factor with exact first and second derivatives.
pub type TensorFactor<'a> = &'a dyn Fn(f64) -> Jet;

/// Closed form of `M_alpha^alpha(D^2 F)` for `F = prod f_i(x_i)`:
///
/// `(F_abar)^k (F_alpha)^{k-2} { prod_{i in alpha} g_i + sum_{j in alpha} prod_{i in alpha-j} g_i (f_j')^2 }`
///
/// with `g_i = f_i'' f_i - (f_i')^2` and `F_beta = prod_{i in beta} f_i`.
pub fn tensor_minor(factors: &[TensorFactor<'_>], alpha: &MultiIndex, x: &[f64]) -> Result<f64> {
    let n = factors.len();
    if x.len() != n || alpha.ambient() != n {
        return domain(format!("{n} factors, {} coordinates and ambient {}", x.len(), alpha.ambient()));
    }
    let k = alpha.len();
    if k < 2 {
        return domain(format!("the tensor-product minor formula needs |alpha| >= 2, got {k}"));
    }
    let jets: Vec<Jet> = factors.iter().zip(x).map(|(f, &t)| f(t)).collect();
    let f_out: f64 = alpha.complement().zero_based().map(|i| jets[i].v).product();
    let f_in: f64 = alpha.zero_based().map(|i| jets[i].v).product();
    let g: Vec<f64> = alpha.zero_based().map(|i| jets[i].d2 * jets[i].v - jets[i].d1 * jets[i].d1).collect();
    let mut bracket: f64 = g.iter().product();
    for (pos, j) in alpha.zero_based().enumerate() {
        let others: f64 = g.iter().enumerate().filter(|&(q, _)| q != pos).map(|(_, v)| v).product();
        bracket += others * jets[j].d1 * jets[j].d1;
    }
    Ok(f_out.powi(k as i32) * f_in.powi(k as i32 - 2) * bracket)
}

/// FD Hessian of `f` at `x` from a local 5-point-per-axis patch of spacing `h`.
pub fn fd_hessian_at(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Result<SquareMatrix> {
    let n = x.len();
    let bbox = GridBox::new(x.iter().map(|c| c - 2.0 * h).collect(), x.iter().map(|c| c + 2.0 * h).collect())?;
    let spec = GridSpec::closed(bbox, vec![5; n])?;
    let patch = GridField::sample(&spec, |y| f(y))?;
    let centre = spec.flatten(&vec![2; n]);
    let mut idx = vec![0; n];
    let mut out = vec![0.0; n * n];
    patch.hessian_at(centre, &mut idx, &mut out);
    SquareMatrix::new(n, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::minor_algebra::minor;
    use crate::multiindex::enumerate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_factors() {
        // F = x1 x2 x3: det D^2 F = 2 x1 x2 x3; for k = 2 the bracket is g^2 + 2 g = -1
        let id = |t: f64| Jet::var(t);
        let fs: Vec<TensorFactor> = vec![&id, &id, &id];
        let x = [0.3, -1.2, 0.8];
        let full = MultiIndex::full(3);
        let want = 2.0 * x[0] * x[1] * x[2];
        assert!((tensor_minor(&fs, &full, &x).unwrap() - want).abs() < 1e-14);
        let a = MultiIndex::new(vec![1, 3], 3).unwrap();
        // M = x2^2 * (x1 x3)^0 * (1 - 2) = -x2^2
        assert!((tensor_minor(&fs, &a, &x).unwrap() + x[1] * x[1]).abs() < 1e-14);
    }

    #[test]
    fn vanishing_outside_factor_kills_the_minor() {
        let s = |t: f64| Jet::var(t).sin();
        let zero = |_t: f64| Jet::ZERO;
        let fs: Vec<TensorFactor> = vec![&s, &s, &zero];
        let a = MultiIndex::new(vec![1, 2], 3).unwrap();
        assert_eq!(tensor_minor(&fs, &a, &[0.4, 0.9, 0.1]).unwrap(), 0.0);
        assert!(tensor_minor(&fs, &MultiIndex::new(vec![1], 3).unwrap(), &[0.4, 0.9, 0.1]).is_err());
    }

    #[test]
    fn matches_fd_minors_at_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let f1 = |t: f64| Jet::var(t).scale(1.3).sin() + Jet::constant(1.5);
        let f2 = |t: f64| (Jet::var(t) * Jet::var(t)).scale(0.5) + Jet::var(t);
        let f3 = |t: f64| Jet::var(t).scale(0.7).exp();
        let f4 = |t: f64| Jet::var(t).scale(2.0).sin().powi(2);
        let fs: Vec<TensorFactor> = vec![&f1, &f2, &f3, &f4];
        let eval = |y: &[f64]| -> f64 { fs.iter().zip(y).map(|(f, &t)| f(t).v).product() };
        for _ in 0..20 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(0.2..1.5)).collect();
            let h = fd_hessian_at(eval, &x, 1e-3).unwrap();
            for k in 2..=4 {
                for alpha in enumerate(k, 4).unwrap() {
                    let closed = tensor_minor(&fs, &alpha, &x).unwrap();
                    let fd = minor(&h, &alpha, &alpha).unwrap();
                    let scale = h.max_abs().powi(k as i32);
                    assert!((closed - fd).abs() <= 1e-4 * closed.abs().max(1e-3 * scale), "{alpha}: {closed} vs {fd}");
                }
            }
        }
    }
}
