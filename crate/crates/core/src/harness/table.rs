//! Embedding classification over an `(s, p)` grid, with an exact rational
//! cross-check.

use std::fmt::Write;

use crate::besov::{embedding_case, closure_case, ClosureCase, Embedding};
use crate::error::Result;

/// A rational `num / den` with `den > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub num: i64,
    pub den: i64,
}

impl Ratio {
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den > 0, "denominator must be positive");
        Self { num, den }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// The default `20 x 20` grid: `s_i = 2(i+1)/21`, `p_j = 1 + (j+1)/4`.
pub fn default_grid() -> (Vec<Ratio>, Vec<Ratio>) {
    let s = (0..20).map(|i| Ratio::new(2 * (i + 1), 21)).collect();
    let p = (0..20).map(|j| Ratio::new(j + 5, 4)).collect();
    (s, p)
}

/// Exact classification by integer arithmetic.
pub fn exact_classification(s: Ratio, p: Ratio, k: usize, n: usize) -> (Embedding, Option<ClosureCase>) {
    let (k, n) = (k as i128, n as i128);
    let (sn, sd, pn, pd) = (s.num as i128, s.den as i128, p.num as i128, p.den as i128);
    // scale everything by D = sd * k * pn > 0
    let d = sd * k * pn;
    let lhs = sn * k * pn + 2 * sd * pn - 2 * d; // D (s + 2/k - 2)
    let gap = n * sd * (pd * k - pn); // D (n/p - n/k)
    let p_le_k = pn <= k * pd;
    let rhs = gap.max(0);
    let holds = lhs > rhs || (lhs == rhs && p_le_k);
    let emb = if holds { Embedding::Holds } else { Embedding::Fails };
    let crit = sn * k - sd * (2 * k - 2); // sign of s - (2 - 2/k)
    let case = if p_le_k {
        (lhs < gap).then_some(ClosureCase::Concentration)
    } else if crit == 0 {
        Some(ClosureCase::Lacunary)
    } else if crit < 0 {
        Some(ClosureCase::Oscillation)
    } else {
        None
    };
    (emb, case)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableRow {
    pub s: Ratio,
    pub p: Ratio,
    pub embedding: Embedding,
    pub case: Option<ClosureCase>,
    /// Whether the floating classifier agrees with the exact one.
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    pub k: usize,
    pub n: usize,
    pub rows: Vec<TableRow>,
}

pub const CSV_HEADER: &str = "s,p,k,n,embedding,case,exact_agreement";

impl EmbeddingTable {
    pub fn mismatches(&self) -> usize {
        self.rows.iter().filter(|r| !r.agrees).count()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let emb = match r.embedding {
                Embedding::Holds => "holds",
                Embedding::Fails => "fails",
            };
            let case = r.case.map(|c| c.label()).unwrap_or("-");
            let _ = writeln!(
                out,
                "{}/{},{}/{},{},{},{emb},{case},{}",
                r.s.num, r.s.den, r.p.num, r.p.den, self.k, self.n, r.agrees
            );
        }
        out
    }
}

/// Classifies every `(s, p)` pair with the floating classifier and compares
/// against [`exact_classification`].
pub fn run_embedding_table(s_values: &[Ratio], p_values: &[Ratio], k: usize, n: usize) -> Result<EmbeddingTable> {
    let mut rows = Vec::with_capacity(s_values.len() * p_values.len());
    for &s in s_values {
        for &p in p_values {
            let embedding = embedding_case(s.value(), p.value(), k, n)?;
            let case = closure_case(s.value(), p.value(), k, n)?;
            let agrees = exact_classification(s, p, k, n) == (embedding, case);
            rows.push(TableRow { s, p, embedding, case, agrees });
        }
    }
    Ok(EmbeddingTable { k, n, rows })
}
