//! The pairing `<M_alpha^alpha(D^2 u), phi>` rewritten on `R^n x (0,1)^2`
//! through product extensions `U = u(x) eta(t1) eta(t2)`, `Phi = phi(x) eta(t1) eta(t2)`.

use super::{PairingMethod, PairingResult};
use crate::error::{domain, Result};
use crate::grid_field::GridField;
use crate::minor_algebra::{det_dense, SquareMatrix};
use crate::multiindex::{enumerate, sign, sign_single_first, MultiIndex};
use crate::smooth::{Jet, StepProfile};

/// Which arrangement of the extended integrand to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtensionForm {
    /// `sum_{i in alpha+(n+1)} sum_{j in alpha+(n+2)} adj((D^2 U)_{alpha+(n+2)}^{alpha+(n+1)})_j^i d_ij Phi`.
    Statement,
    /// The two-group form: for `beta = alpha - i + (n+1)`,
    /// `sigma(beta, i) { -sum_{j in alpha} sigma(alpha-j, j) M_{alpha-j+(n+2)}^beta d_ij Phi + M_alpha^beta d_{i,n+2} Phi }`.
    ProofFinal,
}

/// One signed minor times one second derivative of `Phi`, all 0-based.
struct Term {
    sign: f64,
    rows: Vec<usize>,
    cols: Vec<usize>,
    pi: usize,
    pj: usize,
}

fn zero_based(idx: &MultiIndex) -> Vec<usize> {
    idx.zero_based().collect()
}

fn terms_for(alpha: &MultiIndex, form: ExtensionForm) -> Result<Vec<Term>> {
    let n = alpha.ambient();
    let lifted = alpha.lift(n + 2)?;
    let t1 = n + 1;
    let t2 = n + 2;
    let mut terms = Vec::new();
    match form {
        ExtensionForm::Statement => {
            let rows = lifted.insert(t2)?;
            let cols = lifted.insert(t1)?;
            for &i in cols.entries() {
                let cols_i = cols.remove(i)?;
                for &j in rows.entries() {
                    let rows_j = rows.remove(j)?;
                    let s = sign_single_first(i, &cols_i) * sign_single_first(j, &rows_j);
                    terms.push(Term {
                        sign: f64::from(s),
                        rows: zero_based(&rows_j),
                        cols: zero_based(&cols_i),
                        pi: i - 1,
                        pj: j - 1,
                    });
                }
            }
        }
        ExtensionForm::ProofFinal => {
            let plus = lifted.insert(t1)?;
            for &i in plus.entries() {
                let beta = plus.remove(i)?;
                let single = MultiIndex::new(vec![i], n + 2)?;
                let outer = f64::from(sign(&beta, &single)?);
                for &j in lifted.entries() {
                    let rest = lifted.remove(j)?;
                    let sj = f64::from(sign(&rest, &MultiIndex::new(vec![j], n + 2)?)?);
                    terms.push(Term {
                        sign: -outer * sj,
                        rows: zero_based(&rest.insert(t2)?),
                        cols: zero_based(&beta),
                        pi: i - 1,
                        pj: j - 1,
                    });
                }
                terms.push(Term { sign: outer, rows: zero_based(&lifted), cols: zero_based(&beta), pi: i - 1, pj: t2 - 1 });
            }
        }
    }
    Ok(terms)
}

/// Node-local data of a field: value, gradient, Hessian.
struct Local {
    v: f64,
    d: Vec<f64>,
    h: Vec<f64>,
}

/// Fills the `(n+2) x (n+2)` Hessian of `f(x) e(t1) e(t2)`.
fn extended_hessian(loc: &Local, n: usize, e1: Jet, e2: Jet, out: &mut [f64]) {
    let m = n + 2;
    let (a1, a2) = (n, n + 1);
    for a in 0..n {
        for b in 0..n {
            out[a * m + b] = loc.h[a * n + b] * e1.v * e2.v;
        }
        let x1 = loc.d[a] * e1.d1 * e2.v;
        let x2 = loc.d[a] * e1.v * e2.d1;
        out[a * m + a1] = x1;
        out[a1 * m + a] = x1;
        out[a * m + a2] = x2;
        out[a2 * m + a] = x2;
    }
    out[a1 * m + a1] = loc.v * e1.d2 * e2.v;
    out[a2 * m + a2] = loc.v * e1.v * e2.d2;
    let c = loc.v * e1.d1 * e2.d1;
    out[a1 * m + a2] = c;
    out[a2 * m + a1] = c;
}

fn pair_terms(
    u: &GridField,
    phi: &GridField,
    term_sets: &[Vec<Term>],
    eta: StepProfile,
    t_points: usize,
) -> Result<f64> {
    u.check_same_grid(phi)?;
    if t_points < 4 {
        return domain(format!("extension axes need at least 4 points, got {t_points}"));
    }
    let spec = u.spec();
    let n = spec.dim();
    let m = n + 2;
    let weights: Vec<Vec<f64>> = (0..n).map(|a| spec.axis_weights(a)).collect();
    let ugrad = u.gradient();
    let pgrad = phi.gradient();

    let ht = 1.0 / (t_points - 1) as f64;
    let (_, b) = eta.bounds();
    // eta vanishes with all derivatives on [b, 1]
    let t_nodes: Vec<(f64, Jet)> = (0..t_points)
        .filter_map(|i| {
            let t = i as f64 * ht;
            let w = if i == 0 || i == t_points - 1 { 0.5 * ht } else { ht };
            (t < b).then(|| (w, eta.eval(t)))
        })
        .collect();

    let max_k = term_sets.iter().flat_map(|ts| ts.iter().map(|t| t.rows.len())).max().unwrap_or(0);
    let mut block = vec![0.0; max_k * max_k];
    let mut idx = vec![0; n];
    let mut hu = Local { v: 0.0, d: vec![0.0; n], h: vec![0.0; n * n] };
    let mut hp = Local { v: 0.0, d: vec![0.0; n], h: vec![0.0; n * n] };
    let mut big_u = vec![0.0; m * m];
    let mut big_p = vec![0.0; m * m];
    let mut total = 0.0;
    for flat in 0..spec.len() {
        phi.hessian_at(flat, &mut idx, &mut hp.h);
        hp.v = phi.samples()[flat];
        for a in 0..n {
            hp.d[a] = pgrad[a].samples()[flat];
        }
        if hp.v == 0.0 && hp.d.iter().all(|&v| v == 0.0) && hp.h.iter().all(|&v| v == 0.0) {
            continue;
        }
        u.hessian_at(flat, &mut idx, &mut hu.h);
        hu.v = u.samples()[flat];
        for a in 0..n {
            hu.d[a] = ugrad[a].samples()[flat];
        }
        let wx: f64 = idx.iter().enumerate().map(|(a, &i)| weights[a][i]).product();
        let mut node = 0.0;
        for &(w1, e1) in &t_nodes {
            for &(w2, e2) in &t_nodes {
                extended_hessian(&hu, n, e1, e2, &mut big_u);
                extended_hessian(&hp, n, e1, e2, &mut big_p);
                let mut acc = 0.0;
                for terms in term_sets {
                    for t in terms {
                        let d2phi = big_p[t.pi * m + t.pj];
                        if d2phi == 0.0 {
                            continue;
                        }
                        let k = t.rows.len();
                        for (r, &row) in t.rows.iter().enumerate() {
                            for (c, &col) in t.cols.iter().enumerate() {
                                block[r * k + c] = big_u[row * m + col];
                            }
                        }
                        acc += t.sign * det_dense(&block[..k * k], k) * d2phi;
                    }
                }
                node += w1 * w2 * acc;
            }
        }
        total += wx * node;
    }
    Ok(total)
}

/// Pointwise extended integrand for one `alpha`, given the `(n+2) x (n+2)`
/// Hessians of `U` and `Phi` at a point.
pub fn extension_integrand(alpha: &MultiIndex, form: ExtensionForm, hu: &SquareMatrix, hphi: &SquareMatrix) -> Result<f64> {
    let m = alpha.ambient() + 2;
    if hu.dim() != m || hphi.dim() != m {
        return domain(format!("extended Hessians must be {m} x {m}"));
    }
    let mut block = Vec::new();
    let mut total = 0.0;
    for t in terms_for(alpha, form)? {
        let k = t.rows.len();
        block.clear();
        for &row in &t.rows {
            for &col in &t.cols {
                block.push(hu.get(row, col));
            }
        }
        total += t.sign * det_dense(&block, k) * hphi.get(t.pi, t.pj);
    }
    Ok(total)
}

/// Extended form of `int M_alpha^alpha(D^2 u) phi dx` for one `alpha`.
pub fn pair_extension_alpha(
    u: &GridField,
    alpha: &MultiIndex,
    phi: &GridField,
    eta: StepProfile,
    t_points: usize,
    form: ExtensionForm,
) -> Result<f64> {
    if alpha.ambient() != u.dim() || alpha.is_empty() {
        return domain(format!("{alpha} is not a non-empty index in dimension {}", u.dim()));
    }
    pair_terms(u, phi, &[terms_for(alpha, form)?], eta, t_points)
}

/// Extended form of `<F_k[u], phi>`, summed over `alpha in I(k, n)`.
pub fn pair_extension(
    u: &GridField,
    k: usize,
    phi: &GridField,
    eta: StepProfile,
    t_points: usize,
    form: ExtensionForm,
) -> Result<PairingResult> {
    let n = u.dim();
    if k == 0 || k > n {
        return domain(format!("k must lie in 1..={n}, got {k}"));
    }
    let sets: Vec<Vec<Term>> = enumerate(k, n)?.iter().map(|a| terms_for(a, form)).collect::<Result<_>>()?;
    let value = pair_terms(u, phi, &sets, eta, t_points)?;
    let grid = format!("{} x t{}^2", u.spec().summary(), t_points);
    Ok(PairingResult { value, method: PairingMethod::Extension, grid, k })
}
