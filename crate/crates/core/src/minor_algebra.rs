//! Determinantal minors, adjugate entries, Laplace and Binet expansions,
//! k-traces and elementary symmetric functions.
//!
//! Matrix positions are 0-based in storage; multi-indices are 1-based. A
//! minor `M_alpha^beta(A)` takes rows from `alpha` and columns from `beta`.

use std::fmt;

use rand::Rng;

use crate::error::{domain, Result};
use crate::multiindex::{self, sign_single_first, MultiIndex};

/// Dense square matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct SquareMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SquareMatrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return domain("matrix dimension must be at least 1");
        }
        if data.len() != dim * dim {
            return domain(format!("{} entries for a {dim}x{dim} matrix", data.len()));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return domain("matrix entries must be finite");
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be at least 1");
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| if r == c { 1.0 } else { 0.0 })
    }

    pub fn diag(values: &[f64]) -> Self {
        Self::from_fn(values.len(), |r, c| if r == c { values[r] } else { 0.0 })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(dim > 0, "matrix dimension must be at least 1");
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    /// Uniform entries in `[-1, 1]`.
    pub fn random(dim: usize, rng: &mut impl Rng) -> Self {
        Self::from_fn(dim, |_, _| rng.gen_range(-1.0..=1.0))
    }

    /// Symmetric with uniform entries in `[-1, 1]`.
    pub fn random_symmetric(dim: usize, rng: &mut impl Rng) -> Self {
        let mut m = Self::random(dim, rng);
        for r in 0..dim {
            for c in 0..r {
                let v = m.get(c, r);
                m.set(r, c, v);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[row * self.dim + col] = value;
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self { dim: self.dim, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_fn(self.dim, |r, c| (0..self.dim).map(|t| self.get(r, t) * other.get(t, c)).sum())
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, a| m.max(a.abs()))
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.dim).all(|r| (0..r).all(|c| self.get(r, c) == self.get(c, r)))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn det(&self) -> f64 {
        det_dense(&self.data, self.dim)
    }

    /// Eigenvalues of the symmetric part, ascending.
    pub fn symmetric_eigenvalues(&self) -> Vec<f64> {
        let m = nalgebra::DMatrix::from_fn(self.dim, self.dim, |r, c| 0.5 * (self.get(r, c) + self.get(c, r)));
        let mut values: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }

    fn check_index(&self, idx: &MultiIndex) -> Result<()> {
        match idx.entries().last() {
            Some(&e) if e > self.dim => domain(format!("{idx} exceeds matrix dimension {}", self.dim)),
            _ => Ok(()),
        }
    }

    /// Copies the block with rows `alpha` and columns `beta` into `buf`.
    fn extract(&self, alpha: &MultiIndex, beta: &MultiIndex, buf: &mut Vec<f64>) {
        buf.clear();
        for r in alpha.zero_based() {
            for c in beta.zero_based() {
                buf.push(self.get(r, c));
            }
        }
    }
}

impl fmt::Debug for SquareMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "SquareMatrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<f64> = (0..self.dim).map(|c| self.get(r, c)).collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

/// Determinant of a dense row-major `k x k` block.
///
/// Closed-form expansions up to `k = 4`, LU with partial pivoting above.
pub fn det_dense(a: &[f64], k: usize) -> f64 {
    debug_assert_eq!(a.len(), k * k);
    match k {
        0 => 1.0,
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 => det3(a),
        4 => det4(a),
        _ => det_lu(a, k),
    }
}

#[inline]
fn det3(a: &[f64]) -> f64 {
    a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
        + a[2] * (a[3] * a[7] - a[4] * a[6])
}

#[inline]
fn det4(a: &[f64]) -> f64 {
    // 2x2 minors of the bottom two rows
    let s0 = a[8] * a[13] - a[9] * a[12];
    let s1 = a[8] * a[14] - a[10] * a[12];
    let s2 = a[8] * a[15] - a[11] * a[12];
    let s3 = a[9] * a[14] - a[10] * a[13];
    let s4 = a[9] * a[15] - a[11] * a[13];
    let s5 = a[10] * a[15] - a[11] * a[14];
    // 2x2 minors of the top two rows
    let c0 = a[0] * a[5] - a[1] * a[4];
    let c1 = a[0] * a[6] - a[2] * a[4];
    let c2 = a[0] * a[7] - a[3] * a[4];
    let c3 = a[1] * a[6] - a[2] * a[5];
    let c4 = a[1] * a[7] - a[3] * a[5];
    let c5 = a[2] * a[7] - a[3] * a[6];
    c0 * s5 - c1 * s4 + c2 * s3 + c3 * s2 - c4 * s1 + c5 * s0
}

fn det_lu(a: &[f64], k: usize) -> f64 {
    let mut m = a.to_vec();
    let mut det = 1.0;
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&x, &y| m[x * k + col].abs().total_cmp(&m[y * k + col].abs()))
            .unwrap();
        let p = m[pivot * k + col];
        if p == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for c in 0..k {
                m.swap(pivot * k + c, col * k + c);
            }
            det = -det;
        }
        det *= p;
        for r in col + 1..k {
            let factor = m[r * k + col] / p;
            if factor != 0.0 {
                for c in col + 1..k {
                    m[r * k + c] -= factor * m[col * k + c];
                }
            }
        }
    }
    det
}

/// `M_alpha^beta(A) = det A_alpha^beta`; the empty minor is 1.
pub fn minor(a: &SquareMatrix, alpha: &MultiIndex, beta: &MultiIndex) -> Result<f64> {
    if alpha.len() != beta.len() {
        return domain(format!("minor needs |alpha| = |beta|, got {alpha} and {beta}"));
    }
    a.check_index(alpha)?;
    a.check_index(beta)?;
    let mut buf = Vec::with_capacity(alpha.len() * alpha.len());
    a.extract(alpha, beta, &mut buf);
    Ok(det_dense(&buf, alpha.len()))
}

/// `(adj A_alpha^beta)_j^i = sigma(i, beta - i) sigma(j, alpha - j) det A_{alpha-j}^{beta-i}`
/// for a column `i in beta` and a row `j in alpha`.
pub fn adj_entry(a: &SquareMatrix, alpha: &MultiIndex, beta: &MultiIndex, i: usize, j: usize) -> Result<f64> {
    if alpha.len() != beta.len() {
        return domain(format!("adjugate needs |alpha| = |beta|, got {alpha} and {beta}"));
    }
    let beta_i = beta.remove(i)?;
    let alpha_j = alpha.remove(j)?;
    let s = sign_single_first(i, &beta_i) * sign_single_first(j, &alpha_j);
    Ok(f64::from(s) * minor(a, &alpha_j, &beta_i)?)
}

/// Laplace expansion of `M_alpha^beta(A)` along column `i in beta`:
/// `sum_{j in alpha} a_{j,i} (adj A_alpha^beta)_j^i`.
pub fn laplace_expansion(a: &SquareMatrix, alpha: &MultiIndex, beta: &MultiIndex, i: usize) -> Result<f64> {
    let mut total = 0.0;
    for &j in alpha.entries() {
        total += a.get(j - 1, i - 1) * adj_entry(a, alpha, beta, i, j)?;
    }
    Ok(total)
}

/// Right-hand side of the Binet formula for `M_alpha^beta(A + B)`: a sum over
/// splittings `alpha' + alpha'' = alpha`, `beta' + beta'' = beta` with
/// `|alpha'| = |beta'|` of `sigma(alpha', alpha'') sigma(beta', beta'')
/// M_{alpha'}^{beta'}(A) M_{alpha''}^{beta''}(B)`.
pub fn binet_sum(a: &SquareMatrix, b: &SquareMatrix, alpha: &MultiIndex, beta: &MultiIndex) -> Result<f64> {
    if alpha.len() != beta.len() {
        return domain(format!("Binet sum needs |alpha| = |beta|, got {alpha} and {beta}"));
    }
    if a.dim() != b.dim() {
        return domain("Binet sum needs matrices of equal dimension");
    }
    a.check_index(alpha)?;
    a.check_index(beta)?;
    let mut total = 0.0;
    for size in 0..=alpha.len() {
        let row_splits: Vec<_> = alpha
            .subsets(size)
            .into_iter()
            .map(|a1| {
                let a2 = alpha.difference(&a1).expect("subset");
                let s = multiindex::sign(&a1, &a2).expect("disjoint");
                (a1, a2, s)
            })
            .collect();
        for b1 in beta.subsets(size) {
            let b2 = beta.difference(&b1)?;
            let sb = multiindex::sign(&b1, &b2)?;
            for (a1, a2, sa) in &row_splits {
                let term = minor(a, a1, &b1)? * minor(b, a2, &b2)?;
                total += f64::from(sa * sb) * term;
            }
        }
    }
    Ok(total)
}

/// `[A]_k`: sum of the principal `k x k` minors.
pub fn k_trace(a: &SquareMatrix, k: usize) -> Result<f64> {
    if k == 0 || k > a.dim() {
        return domain(format!("k-trace needs 1 <= k <= {}, got {k}", a.dim()));
    }
    Ok(PrincipalMinors::new(a.dim(), k).sum(a.as_slice()))
}

/// Precomputed principal index sets for repeated k-trace evaluation on
/// matrices of a fixed size (the per-node hot path of the Hessian module).
#[derive(Clone, Debug)]
pub struct PrincipalMinors {
    dim: usize,
    k: usize,
    sets: Vec<Vec<usize>>,
}

impl PrincipalMinors {
    pub fn new(dim: usize, k: usize) -> Self {
        Self { dim, k, sets: multiindex::combinations(dim, k) }
    }

    /// Sum of principal minors of a row-major `dim x dim` slice.
    pub fn sum(&self, a: &[f64]) -> f64 {
        let mut buf = [0.0f64; 64];
        let mut total = 0.0;
        if self.k > 8 {
            let mut heap = vec![0.0; self.k * self.k];
            for set in &self.sets {
                fill_block(a, self.dim, set, &mut heap);
                total += det_dense(&heap, self.k);
            }
            return total;
        }
        let kk = self.k * self.k;
        for set in &self.sets {
            fill_block(a, self.dim, set, &mut buf[..kk]);
            total += det_dense(&buf[..kk], self.k);
        }
        total
    }
}

fn fill_block(a: &[f64], dim: usize, set: &[usize], out: &mut [f64]) {
    let k = set.len();
    for (r, &sr) in set.iter().enumerate() {
        for (c, &sc) in set.iter().enumerate() {
            out[r * k + c] = a[sr * dim + sc];
        }
    }
}

/// `S_k(lambda)`, the k-th elementary symmetric function.
pub fn sym_func(lambda: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > lambda.len() {
        return domain(format!("S_k needs 1 <= k <= {}, got {k}", lambda.len()));
    }
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for &l in lambda {
        for j in (1..=k).rev() {
            e[j] += l * e[j - 1];
        }
    }
    Ok(e[k])
}

/// Largest observed `|M(A) - M(B)| / ((|A| + |B|)^{k-1} |A - B|)` over all
/// `alpha, beta in I(k, dim)` and `samples` random pairs (Frobenius norms).
pub fn empirical_minor_lipschitz(dim: usize, k: usize, samples: usize, rng: &mut impl Rng) -> Result<f64> {
    if k == 0 || k > dim {
        return domain(format!("need 1 <= k <= {dim}, got {k}"));
    }
    let sets = multiindex::enumerate(k, dim)?;
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let a = SquareMatrix::random(dim, rng);
        // mix of nearby and far pairs
        let scale = 10f64.powf(rng.gen_range(-3.0..0.5));
        let b = a.add(&SquareMatrix::random(dim, rng).scale(scale));
        let denom = (a.frobenius() + b.frobenius()).powi(k as i32 - 1) * a.sub(&b).frobenius();
        if denom == 0.0 {
            continue;
        }
        for alpha in &sets {
            for beta in &sets {
                let diff = (minor(&a, alpha, beta)? - minor(&b, alpha, beta)?).abs();
                worst = worst.max(diff / denom);
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiindex::enumerate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn mi(e: &[usize], n: usize) -> MultiIndex {
        MultiIndex::new(e.to_vec(), n).unwrap()
    }

    /// Cofactor-free 3x3 determinant (rule of Sarrus).
    fn sarrus(b: [[f64; 3]; 3]) -> f64 {
        b[0][0] * b[1][1] * b[2][2] + b[0][1] * b[1][2] * b[2][0] + b[0][2] * b[1][0] * b[2][1]
            - b[0][2] * b[1][1] * b[2][0]
            - b[0][0] * b[1][2] * b[2][1]
            - b[0][1] * b[1][0] * b[2][2]
    }

    /// Leibniz-formula determinant over all permutations.
    fn leibniz(a: &[f64], k: usize) -> f64 {
        fn perms(k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(k - 1) {
                for pos in 0..=p.len() {
                    let mut q = p.clone();
                    q.insert(pos, k - 1);
                    out.push(q);
                }
            }
            out
        }
        perms(k)
            .into_iter()
            .map(|p| {
                let mut inv = 0;
                for x in 0..k {
                    for y in x + 1..k {
                        if p[x] > p[y] {
                            inv += 1;
                        }
                    }
                }
                let s = if inv % 2 == 0 { 1.0 } else { -1.0 };
                s * (0..k).map(|r| a[r * k + p[r]]).product::<f64>()
            })
            .sum()
    }

    #[test]
    fn minor_examples() {
        let id = SquareMatrix::identity(4);
        assert_eq!(minor(&id, &mi(&[1, 3], 4), &mi(&[1, 3], 4)).unwrap(), 1.0);
        let d = SquareMatrix::diag(&[1.0, 2.0, 3.0]);
        assert_eq!(minor(&d, &mi(&[2, 3], 3), &mi(&[2, 3], 3)).unwrap(), 6.0);
        assert_eq!(minor(&d, &MultiIndex::empty(3), &MultiIndex::empty(3)).unwrap(), 1.0);
        assert!(minor(&d, &mi(&[1], 3), &mi(&[1, 2], 3)).is_err());
    }

    #[test]
    fn minor_matches_sarrus_on_all_3x3_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = SquareMatrix::random(5, &mut rng);
        for alpha in enumerate(3, 5).unwrap() {
            for beta in enumerate(3, 5).unwrap() {
                let mut blk = [[0.0; 3]; 3];
                for (r, ar) in alpha.zero_based().enumerate() {
                    for (c, bc) in beta.zero_based().enumerate() {
                        blk[r][c] = a.get(ar, bc);
                    }
                }
                let got = minor(&a, &alpha, &beta).unwrap();
                assert!((got - sarrus(blk)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn closed_forms_and_lu_agree_with_leibniz() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for k in 1..=6 {
            let a = SquareMatrix::random(k, &mut rng);
            let want = leibniz(a.as_slice(), k);
            assert!((a.det() - want).abs() <= 1e-12 * (1.0 + want.abs()), "k = {k}");
        }
        // singular matrix through the LU path
        let mut s = SquareMatrix::random(5, &mut rng);
        for c in 0..5 {
            let v = s.get(0, c);
            s.set(1, c, v);
        }
        assert!(s.det().abs() < 1e-14);
    }

    #[test]
    fn adj_entry_examples() {
        let id = SquareMatrix::identity(3);
        let ab = mi(&[1, 2], 3);
        assert_eq!(adj_entry(&id, &ab, &ab, 1, 1).unwrap(), 1.0);
        let one = mi(&[2], 3);
        assert_eq!(adj_entry(&id, &one, &one, 2, 2).unwrap(), 1.0);
        assert!(adj_entry(&id, &ab, &ab, 3, 1).is_err());
    }

    #[test]
    fn laplace_holds_for_every_column() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let d = rng.gen_range(1..=6);
            let a = SquareMatrix::random(d, &mut rng);
            let k = rng.gen_range(1..=d);
            let all = enumerate(k, d).unwrap();
            let alpha = &all[rng.gen_range(0..all.len())];
            let beta = &all[rng.gen_range(0..all.len())];
            let m = minor(&a, alpha, beta).unwrap();
            for &i in beta.entries() {
                let lap = laplace_expansion(&a, alpha, beta, i).unwrap();
                assert!((lap - m).abs() <= 1e-12 * (1.0 + m.abs()));
            }
        }
    }

    #[test]
    fn binet_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = SquareMatrix::random(4, &mut rng);
        let b = SquareMatrix::random(4, &mut rng);
        let idx = mi(&[1, 2, 4], 4);
        let direct = minor(&a.add(&b), &idx, &idx).unwrap();
        let binet = binet_sum(&a, &b, &idx, &idx).unwrap();
        assert!((binet - direct).abs() <= 1e-10 * direct.abs().max(1e-300));
        let zero = SquareMatrix::zeros(4);
        let alpha = mi(&[1, 3], 4);
        let beta = mi(&[2, 4], 4);
        let only_a = binet_sum(&a, &zero, &alpha, &beta).unwrap();
        assert!((only_a - minor(&a, &alpha, &beta).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn binet_rank_one_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 5;
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let a = SquareMatrix::from_fn(n, |r, c| x[r] * x[c]);
        let b = SquareMatrix::random(n, &mut rng);
        let alpha = mi(&[1, 2, 4], n);
        let beta = mi(&[2, 3, 5], n);
        let mut reduced = minor(&b, &alpha, &beta).unwrap();
        for &i in alpha.entries() {
            for &j in beta.entries() {
                let ai = alpha.remove(i).unwrap();
                let bj = beta.remove(j).unwrap();
                let s = sign_single_first(i, &ai) * sign_single_first(j, &bj);
                reduced += f64::from(s) * a.get(i - 1, j - 1) * minor(&b, &ai, &bj).unwrap();
            }
        }
        let full = binet_sum(&a, &b, &alpha, &beta).unwrap();
        assert!((full - reduced).abs() < 1e-12);
    }

    #[test]
    fn k_trace_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = SquareMatrix::random(4, &mut rng);
        assert!((k_trace(&a, 1).unwrap() - a.trace()).abs() < 1e-15);
        assert!((k_trace(&a, 4).unwrap() - a.det()).abs() < 1e-15);
        assert_eq!(k_trace(&SquareMatrix::diag(&[1.0, 2.0, 3.0]), 2).unwrap(), 11.0);
        assert!(k_trace(&a, 0).is_err());
        assert!(k_trace(&a, 5).is_err());
    }

    #[test]
    fn sym_func_examples() {
        assert_eq!(sym_func(&[1.0, 2.0, 3.0], 2).unwrap(), 11.0);
        for n in 1..=7usize {
            for k in 1..=n {
                let binom = (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
                assert_eq!(sym_func(&vec![1.0; n], k).unwrap(), binom as f64);
            }
        }
        assert!(sym_func(&[1.0], 2).is_err());
    }

    #[test]
    fn sym_func_of_spectrum_is_k_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..30 {
            let d = rng.gen_range(1..=6);
            let a = SquareMatrix::random_symmetric(d, &mut rng);
            let ev = a.symmetric_eigenvalues();
            for k in 1..=d {
                let lhs = sym_func(&ev, k).unwrap();
                let rhs = k_trace(&a, k).unwrap();
                assert!((lhs - rhs).abs() <= 1e-8 * (1.0 + rhs.abs()));
            }
        }
    }

    #[test]
    fn lipschitz_constant_is_finite_and_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let small = empirical_minor_lipschitz(5, 3, 100, &mut rng).unwrap();
        let large = empirical_minor_lipschitz(5, 3, 400, &mut rng).unwrap();
        assert!(small.is_finite() && large.is_finite());
        assert!(large <= 2.0 * small.max(1e-12));
    }
}
