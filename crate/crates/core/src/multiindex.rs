//! Ordered multi-indices `I(k, n)`.
//!
//! Entries are 1-based and strictly increasing. The empty index is a regular
//! value: it is the single element of `I(0, n)` and the complement of the
//! full index `(1, ..., n)`.

use std::fmt;

use crate::error::{domain, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex {
    entries: Vec<usize>,
    ambient: usize,
}

impl MultiIndex {
    pub fn new(entries: Vec<usize>, ambient: usize) -> Result<Self> {
        if ambient == 0 {
            return domain("ambient dimension must be at least 1");
        }
        if entries.len() > ambient {
            return domain(format!("{} entries exceed ambient dimension {ambient}", entries.len()));
        }
        for (pos, &e) in entries.iter().enumerate() {
            if e == 0 || e > ambient {
                return domain(format!("entry {e} outside 1..={ambient}"));
            }
            if pos > 0 && entries[pos - 1] >= e {
                return domain(format!("entries {entries:?} are not strictly increasing"));
            }
        }
        Ok(Self { entries, ambient })
    }

    pub fn empty(ambient: usize) -> Self {
        Self { entries: Vec::new(), ambient }
    }

    pub fn full(ambient: usize) -> Self {
        Self { entries: (1..=ambient).collect(), ambient }
    }


    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.entries.binary_search(&i).is_ok()
    }

    /// 0-based entries, for indexing into storage.
    pub fn zero_based(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&e| e - 1)
    }

    /// The increasing arrangement of `{1..n} \ self`.
    pub fn complement(&self) -> Self {
        let entries = (1..=self.ambient).filter(|&i| !self.contains(i)).collect();
        Self { entries, ambient: self.ambient }
    }

    /// `self - i`.
    pub fn remove(&self, i: usize) -> Result<Self> {
        match self.entries.binary_search(&i) {
            Ok(pos) => {
                let mut entries = self.entries.clone();
                entries.remove(pos);
                Ok(Self { entries, ambient: self.ambient })
            }
            Err(_) => domain(format!("{i} is not in {self}")),
        }
    }

    /// `self + j`, reordered increasingly.
    pub fn insert(&self, j: usize) -> Result<Self> {
        if j == 0 || j > self.ambient {
            return domain(format!("{j} outside 1..={}", self.ambient));
        }
        match self.entries.binary_search(&j) {
            Ok(_) => domain(format!("{j} is already in {self}")),
            Err(pos) => {
                let mut entries = self.entries.clone();
                entries.insert(pos, j);
                Ok(Self { entries, ambient: self.ambient })
            }
        }
    }

    /// Re-embeds the index into a larger ambient dimension.
    pub fn lift(&self, ambient: usize) -> Result<Self> {
        Self::new(self.entries.clone(), ambient)
    }

    /// Disjoint union, sorted.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.ambient != other.ambient {
            return domain("multi-indices live in different ambient dimensions");
        }
        let mut entries = Vec::with_capacity(self.len() + other.len());
        let (mut a, mut b) = (0, 0);
        while a < self.len() || b < other.len() {
            let next = match (self.entries.get(a), other.entries.get(b)) {
                (Some(&x), Some(&y)) if x == y => {
                    return domain(format!("{self} and {other} overlap at {x}"));
                }
                (Some(&x), Some(&y)) if x < y => {
                    a += 1;
                    x
                }
                (Some(&x), None) => {
                    a += 1;
                    x
                }
                (_, Some(&y)) => {
                    b += 1;
                    y
                }
                (None, None) => unreachable!(),
            };
            entries.push(next);
        }
        Ok(Self { entries, ambient: self.ambient })
    }

    /// `self \ other`; `other` must be contained in `self`.
    pub fn difference(&self, other: &Self) -> Result<Self> {
        if let Some(&e) = other.entries.iter().find(|&&e| !self.contains(e)) {
            return domain(format!("{e} is not in {self}"));
        }
        let entries = self.entries.iter().copied().filter(|&e| !other.contains(e)).collect();
        Ok(Self { entries, ambient: self.ambient })
    }

    /// All sub-indices of length `k`, in lexicographic order.
    pub fn subsets(&self, k: usize) -> Vec<Self> {
        combinations(self.len(), k)
            .into_iter()
            .map(|pos| Self {
                entries: pos.into_iter().map(|p| self.entries[p]).collect(),
                ambient: self.ambient,
            })
            .collect()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// All `k`-subsets of `0..n` as increasing position lists, lexicographic.
pub(crate) fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    loop {
        out.push(current.clone());
        // rightmost position that can still advance
        let Some(pos) = (0..k).rev().find(|&p| current[p] < n - k + p) else {
            return out;
        };
        current[pos] += 1;
        for q in pos + 1..k {
            current[q] = current[q - 1] + 1;
        }
    }
}

/// `I(k, n)` in lexicographic order.
pub fn enumerate(k: usize, n: usize) -> Result<Vec<MultiIndex>> {
    if n == 0 {
        return domain("ambient dimension must be at least 1");
    }
    if k > n {
        return domain(format!("k = {k} exceeds n = {n}"));
    }
    Ok(combinations(n, k)
        .into_iter()
        .map(|pos| MultiIndex { entries: pos.into_iter().map(|p| p + 1).collect(), ambient: n })
        .collect())
}

/// Sign of the permutation sorting the concatenation `(alpha, beta)`.
pub fn sign(alpha: &MultiIndex, beta: &MultiIndex) -> Result<i32> {
    if alpha.ambient != beta.ambient {
        return domain("multi-indices live in different ambient dimensions");
    }
    let mut inversions = 0usize;
    for &a in &alpha.entries {
        if beta.contains(a) {
            return domain(format!("{alpha} and {beta} overlap at {a}"));
        }
        inversions += beta.entries.partition_point(|&b| b < a);
    }
    Ok(if inversions % 2 == 0 { 1 } else { -1 })
}

/// `sign((i), alpha)` for a single index `i`, i.e. `(-1)^{#{a in alpha : a < i}}`.
pub(crate) fn sign_single_first(i: usize, alpha: &MultiIndex) -> i32 {
    let below = alpha.entries.partition_point(|&a| a < i);
    if below % 2 == 0 {
        1
    } else {
        -1
    }
}
