//! Scalar fields sampled on uniform tensor grids, with finite differences,
//! trapezoidal quadrature and a plain-text serialization.
//!
//! # Text format
//!
//! ```text
//! n; lower_1 .. lower_n; upper_1 .. upper_n; points_1 .. points_n[; periodic]
//! sample_0
//! sample_1
//! ...
//! ```
//!
//! Fields inside a header group are separated by single spaces. Samples are
//! row-major (the last axis varies fastest), one per line, written with the
//! shortest decimal representation that round-trips exactly. A closed grid
//! includes both endpoints; a periodic grid of `N` points covers
//! `[lower, upper)` with spacing `(upper - lower) / N`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{domain, Error, Result};
use crate::minor_algebra::SquareMatrix;

/// Axis-aligned box `prod [lower_i, upper_i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl GridBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return domain("box bounds must be non-empty and of equal dimension");
        }
        if lower.iter().zip(&upper).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return domain(format!("box needs lower < upper on every axis, got {lower:?} and {upper:?}"));
        }
        Ok(Self { lower, upper })
    }

    /// `[lo, hi]^n`.
    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.length(a)).product()
    }

    pub fn contains_box(&self, other: &GridBox) -> bool {
        self.dim() == other.dim()
            && (0..self.dim()).all(|a| self.lower[a] <= other.lower[a] && other.upper[a] <= self.upper[a])
    }

    pub fn strictly_contains_box(&self, other: &GridBox) -> bool {
        self.dim() == other.dim()
            && (0..self.dim()).all(|a| self.lower[a] < other.lower[a] && other.upper[a] < self.upper[a])
    }

    pub fn translated(&self, shift: &[f64]) -> Result<Self> {
        Self::new(
            self.lower.iter().zip(shift).map(|(a, s)| a + s).collect(),
            self.upper.iter().zip(shift).map(|(a, s)| a + s).collect(),
        )
    }
}

/// Node placement along every axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sampling {
    /// Endpoints included.
    Closed,
    /// `[lower, upper)` without the duplicated endpoint.
    Periodic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    bbox: GridBox,
    points: Vec<usize>,
    sampling: Sampling,
}

impl GridSpec {
    pub fn new(bbox: GridBox, points: Vec<usize>, sampling: Sampling) -> Result<Self> {
        if points.len() != bbox.dim() {
            return domain(format!("{} point counts for a {}-d box", points.len(), bbox.dim()));
        }
        if let Some(p) = points.iter().find(|&&p| p < 4) {
            return domain(format!("every axis needs at least 4 points, got {p}"));
        }
        let total = points.iter().try_fold(1usize, |acc, &p| acc.checked_mul(p));
        if total.is_none() {
            return domain("grid size overflows");
        }
        Ok(Self { bbox, points, sampling })
    }

    pub fn closed(bbox: GridBox, points: Vec<usize>) -> Result<Self> {
        Self::new(bbox, points, Sampling::Closed)
    }

    pub fn periodic(bbox: GridBox, points: Vec<usize>) -> Result<Self> {
        Self::new(bbox, points, Sampling::Periodic)
    }

    /// Closed grid on `[lo, hi]^n` with `points` per axis.
    pub fn cube(n: usize, lo: f64, hi: f64, points: usize) -> Result<Self> {
        Self::closed(GridBox::cube(n, lo, hi)?, vec![points; n])
    }

    pub fn bbox(&self) -> &GridBox {
        &self.bbox
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn sampling(&self) -> Sampling {
        self.sampling
    }

    pub fn is_periodic(&self) -> bool {
        self.sampling == Sampling::Periodic
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        let n = self.points[axis] as f64;
        match self.sampling {
            Sampling::Closed => self.bbox.length(axis) / (n - 1.0),
            Sampling::Periodic => self.bbox.length(axis) / n,
        }
    }

    pub fn min_spacing(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).fold(f64::INFINITY, f64::min)
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    /// Node coordinates along one axis.
    pub fn axis_nodes(&self, axis: usize) -> Vec<f64> {
        let h = self.spacing(axis);
        let lo = self.bbox.lower[axis];
        (0..self.points[axis]).map(|i| lo + i as f64 * h).collect()
    }

    /// Trapezoid weights along one axis.
    pub fn axis_weights(&self, axis: usize) -> Vec<f64> {
        let h = self.spacing(axis);
        let n = self.points[axis];
        let mut w = vec![h; n];
        if self.sampling == Sampling::Closed {
            w[0] = 0.5 * h;
            w[n - 1] = 0.5 * h;
        }
        w
    }

    /// Row-major strides.
    pub fn strides(&self) -> Vec<usize> {
        let mut s = vec![1; self.dim()];
        for a in (0..self.dim().saturating_sub(1)).rev() {
            s[a] = s[a + 1] * self.points[a + 1];
        }
        s
    }

    pub fn unflatten(&self, mut flat: usize, out: &mut [usize]) {
        for a in (0..self.dim()).rev() {
            out[a] = flat % self.points[a];
            flat /= self.points[a];
        }
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.points).fold(0, |acc, (&i, &p)| acc * p + i)
    }

    pub fn coords(&self, flat: usize) -> Vec<f64> {
        let mut idx = vec![0; self.dim()];
        self.unflatten(flat, &mut idx);
        (0..self.dim()).map(|a| self.bbox.lower[a] + idx[a] as f64 * self.spacing(a)).collect()
    }

    /// One-line description used in reports: `closed 3d 80x80x80 h=0.03`.
    pub fn summary(&self) -> String {
        let pts: Vec<String> = self.points.iter().map(|p| p.to_string()).collect();
        let kind = match self.sampling {
            Sampling::Closed => "closed",
            Sampling::Periodic => "periodic",
        };
        format!("{kind} {}d {} h={:.4e}", self.dim(), pts.join("x"), self.min_spacing())
    }
}

/// Samples on a [`GridSpec`], row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    spec: GridSpec,
    samples: Vec<f64>,
}

impl GridField {
    pub fn new(spec: GridSpec, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != spec.len() {
            return domain(format!("{} samples for a grid of {} nodes", samples.len(), spec.len()));
        }
        if let Some(pos) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::Evaluation { coords: spec.coords(pos), msg: "non-finite sample".into() });
        }
        Ok(Self { spec, samples })
    }

    /// Internal constructor for derived fields known to be finite.
    pub(crate) fn from_parts(spec: GridSpec, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), spec.len());
        Self { spec, samples }
    }

    pub fn zeros(spec: &GridSpec) -> Self {
        Self { samples: vec![0.0; spec.len()], spec: spec.clone() }
    }

    pub fn constant(spec: &GridSpec, c: f64) -> Self {
        Self { samples: vec![c; spec.len()], spec: spec.clone() }
    }

    /// Evaluates `f` at every node.
    pub fn sample(spec: &GridSpec, mut f: impl FnMut(&[f64]) -> f64) -> Result<Self> {
        let n = spec.dim();
        let axes: Vec<Vec<f64>> = (0..n).map(|a| spec.axis_nodes(a)).collect();
        let mut idx = vec![0usize; n];
        let mut x = vec![0.0; n];
        let mut samples = Vec::with_capacity(spec.len());
        for flat in 0..spec.len() {
            spec.unflatten(flat, &mut idx);
            for a in 0..n {
                x[a] = axes[a][idx[a]];
            }
            let v = f(&x);
            if !v.is_finite() {
                return Err(Error::Evaluation { coords: x, msg: format!("non-finite value {v}") });
            }
            samples.push(v);
        }
        Ok(Self { spec: spec.clone(), samples })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self { spec: self.spec.clone(), samples: self.samples.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with(&self, other: &Self, mut f: impl FnMut(f64, f64) -> f64) -> Result<Self> {
        self.check_same_grid(other)?;
        let samples = self.samples.iter().zip(&other.samples).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { spec: self.spec.clone(), samples })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.spec != other.spec {
            return domain(format!("grid mismatch: {} vs {}", self.spec.summary(), other.spec.summary()));
        }
        Ok(())
    }

    /// First partial derivative along `axis`.
    pub fn partial(&self, axis: usize) -> Self {
        let samples = apply_axis(&self.spec, &self.samples, axis, Stencil::First);
        Self { spec: self.spec.clone(), samples }
    }

    /// Second partial `d^2/dx_a dx_b`; the pure case uses the three-point stencil.
    pub fn partial2(&self, a: usize, b: usize) -> Self {
        if a == b {
            let samples = apply_axis(&self.spec, &self.samples, a, Stencil::Second);
            return Self { spec: self.spec.clone(), samples };
        }
        self.partial(a.max(b)).partial(a.min(b))
    }

    pub fn gradient(&self) -> Vec<GridField> {
        (0..self.dim()).map(|a| self.partial(a)).collect()
    }

    pub fn hessian(&self) -> HessianField {
        let n = self.dim();
        let first: Vec<GridField> = self.gradient();
        let mut entries = Vec::with_capacity(n * (n + 1) / 2);
        for a in 0..n {
            for b in a..n {
                if a == b {
                    entries.push(self.partial2(a, a));
                } else {
                    // average both orders; on a tensor grid they agree up to rounding
                    let ab = first[b].partial(a);
                    let ba = first[a].partial(b);
                    let samples = ab.samples.iter().zip(&ba.samples).map(|(x, y)| 0.5 * (x + y)).collect();
                    entries.push(Self { spec: self.spec.clone(), samples });
                }
            }
        }
        HessianField { n, entries }
    }

    /// FD Hessian at a single node, identical to [`GridField::hessian`] there.
    pub fn hessian_at(&self, flat: usize, idx: &mut [usize], out: &mut [f64]) {
        let spec = &self.spec;
        let n = spec.dim();
        spec.unflatten(flat, idx);
        let strides = spec.strides();
        let periodic = spec.is_periodic();
        let data = &self.samples;
        let mut st1 = [[(0usize, 0.0f64); 3]; 8];
        let mut len1 = [0usize; 8];
        assert!(n <= 8, "local stencils support up to 8 dimensions");
        for a in 0..n {
            len1[a] = first_stencil(idx[a], spec.points[a], spec.spacing(a), periodic, &mut st1[a]);
        }
        for a in 0..n {
            let base_a = flat - idx[a] * strides[a];
            let mut st2 = [(0usize, 0.0f64); 4];
            let l2 = second_stencil(idx[a], spec.points[a], spec.spacing(a), periodic, &mut st2);
            out[a * n + a] = st2[..l2].iter().map(|&(p, w)| w * data[base_a + p * strides[a]]).sum();
            for b in a + 1..n {
                let base = base_a - idx[b] * strides[b];
                let mut v = 0.0;
                for &(p, wp) in &st1[a][..len1[a]] {
                    for &(q, wq) in &st1[b][..len1[b]] {
                        v += wp * wq * data[base + p * strides[a] + q * strides[b]];
                    }
                }
                out[a * n + b] = v;
                out[b * n + a] = v;
            }
        }
    }

    /// Tensor-product trapezoid rule (rectangle rule on periodic grids).
    pub fn integrate(&self) -> f64 {
        weighted_sum(&self.spec, &self.samples)
    }

    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) || !p.is_finite() {
            return domain(format!("L^p norm needs finite p >= 1, got {p}"));
        }
        let powered: Vec<f64> = self.samples.iter().map(|v| v.abs().powf(p)).collect();
        Ok(weighted_sum(&self.spec, &powered).powf(1.0 / p))
    }

    pub fn to_text(&self) -> String {
        let spec = &self.spec;
        let join = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ");
        let pts: Vec<String> = spec.points.iter().map(|p| p.to_string()).collect();
        let mut out = format!(
            "{}; {}; {}; {}",
            spec.dim(),
            join(spec.bbox.lower()),
            join(spec.bbox.upper()),
            pts.join(" ")
        );
        if spec.is_periodic() {
            out.push_str("; periodic");
        }
        out.push('\n');
        for v in &self.samples {
            let _ = writeln!(out, "{v}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty field file".into()))?;
        let groups: Vec<&str> = header.split(';').map(str::trim).collect();
        if groups.len() != 4 && groups.len() != 5 {
            return Err(Error::Parse(format!("header needs 4 or 5 ';'-separated groups: {header:?}")));
        }
        let n: usize = groups[0].parse().map_err(|_| Error::Parse(format!("bad dimension {:?}", groups[0])))?;
        let floats = |g: &str| -> Result<Vec<f64>> {
            g.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {t:?}"))))
                .collect()
        };
        let lower = floats(groups[1])?;
        let upper = floats(groups[2])?;
        let points: Vec<usize> = groups[3]
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| Error::Parse(format!("bad point count {t:?}"))))
            .collect::<Result<_>>()?;
        if lower.len() != n || upper.len() != n || points.len() != n {
            return Err(Error::Parse(format!("header groups disagree with dimension {n}")));
        }
        let sampling = match groups.get(4) {
            None => Sampling::Closed,
            Some(&"periodic") => Sampling::Periodic,
            Some(other) => return Err(Error::Parse(format!("unknown sampling tag {other:?}"))),
        };
        let spec = GridSpec::new(GridBox::new(lower, upper)?, points, sampling)?;
        let samples: Vec<f64> = lines
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| l.parse::<f64>().map_err(|_| Error::Parse(format!("bad sample {l:?}"))))
            .collect::<Result<_>>()?;
        Self::new(spec, samples)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }
}

/// Symmetric Hessian of a field, stored as its upper triangle.
#[derive(Clone, Debug)]
pub struct HessianField {
    n: usize,
    entries: Vec<GridField>,
}

impl HessianField {
    pub fn dim(&self) -> usize {
        self.n
    }

    fn slot(&self, a: usize, b: usize) -> usize {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        a * self.n - a * (a + 1) / 2 + b
    }

    pub fn get(&self, a: usize, b: usize) -> &GridField {
        &self.entries[self.slot(a, b)]
    }

    pub fn spec(&self) -> &GridSpec {
        self.entries[0].spec()
    }

    /// Writes the `n x n` matrix at a node into `out` (row-major).
    pub fn fill_at(&self, flat: usize, out: &mut [f64]) {
        let n = self.n;
        for a in 0..n {
            for b in a..n {
                let v = self.entries[self.slot(a, b)].samples[flat];
                out[a * n + b] = v;
                out[b * n + a] = v;
            }
        }
    }

    pub fn at(&self, flat: usize) -> SquareMatrix {
        let mut buf = vec![0.0; self.n * self.n];
        self.fill_at(flat, &mut buf);
        SquareMatrix::new(self.n, buf).expect("finite hessian")
    }
}

#[derive(Clone, Copy)]
enum Stencil {
    First,
    Second,
}

fn apply_axis(spec: &GridSpec, data: &[f64], axis: usize, stencil: Stencil) -> Vec<f64> {
    let len = spec.points[axis];
    let stride = spec.strides()[axis];
    let outer = spec.len() / (len * stride);
    let h = spec.spacing(axis);
    let periodic = spec.is_periodic();
    let mut out = vec![0.0; data.len()];
    let mut line = vec![0.0; len];
    let mut res = vec![0.0; len];
    for o in 0..outer {
        for inner in 0..stride {
            let base = o * len * stride + inner;
            for (t, slot) in line.iter_mut().enumerate() {
                *slot = data[base + t * stride];
            }
            match stencil {
                Stencil::First => first_diff(&line, h, periodic, &mut res),
                Stencil::Second => second_diff(&line, h, periodic, &mut res),
            }
            for (t, v) in res.iter().enumerate() {
                out[base + t * stride] = *v;
            }
        }
    }
    out
}

fn first_diff(f: &[f64], h: f64, periodic: bool, out: &mut [f64]) {
    let n = f.len();
    let inv = 0.5 / h;
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - f[i - 1]) * inv;
    }
    if periodic {
        out[0] = (f[1] - f[n - 1]) * inv;
        out[n - 1] = (f[0] - f[n - 2]) * inv;
    } else {
        out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * inv;
        out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * inv;
    }
}

fn second_diff(f: &[f64], h: f64, periodic: bool, out: &mut [f64]) {
    let n = f.len();
    let inv = 1.0 / (h * h);
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) * inv;
    }
    if periodic {
        out[0] = (f[1] - 2.0 * f[0] + f[n - 1]) * inv;
        out[n - 1] = (f[0] - 2.0 * f[n - 1] + f[n - 2]) * inv;
    } else {
        out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) * inv;
        out[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) * inv;
    }
}

fn first_stencil(i: usize, n: usize, h: f64, periodic: bool, out: &mut [(usize, f64); 3]) -> usize {
    let c = 0.5 / h;
    if i > 0 && i < n - 1 {
        out[0] = (i - 1, -c);
        out[1] = (i + 1, c);
        return 2;
    }
    if periodic {
        let (lo, hi) = if i == 0 { (n - 1, 1) } else { (n - 2, 0) };
        out[0] = (lo, -c);
        out[1] = (hi, c);
        return 2;
    }
    if i == 0 {
        *out = [(0, -3.0 * c), (1, 4.0 * c), (2, -c)];
    } else {
        *out = [(n - 1, 3.0 * c), (n - 2, -4.0 * c), (n - 3, c)];
    }
    3
}

fn second_stencil(i: usize, n: usize, h: f64, periodic: bool, out: &mut [(usize, f64); 4]) -> usize {
    let c = 1.0 / (h * h);
    if i > 0 && i < n - 1 {
        out[..3].copy_from_slice(&[(i - 1, c), (i, -2.0 * c), (i + 1, c)]);
        return 3;
    }
    if periodic {
        let (lo, hi) = if i == 0 { (n - 1, 1) } else { (n - 2, 0) };
        out[..3].copy_from_slice(&[(lo, c), (i, -2.0 * c), (hi, c)]);
        return 3;
    }
    if i == 0 {
        *out = [(0, 2.0 * c), (1, -5.0 * c), (2, 4.0 * c), (3, -c)];
    } else {
        *out = [(n - 1, 2.0 * c), (n - 2, -5.0 * c), (n - 3, 4.0 * c), (n - 4, -c)];
    }
    4
}

/// `sum_nodes prod_a w_a(i_a) * data[node]`, contracting one axis at a time.
pub(crate) fn weighted_sum(spec: &GridSpec, data: &[f64]) -> f64 {
    let mut cur: Vec<f64> = data.to_vec();
    for axis in (0..spec.dim()).rev() {
        let w = spec.axis_weights(axis);
        let len = w.len();
        let mut next = Vec::with_capacity(cur.len() / len);
        for chunk in cur.chunks_exact(len) {
            next.push(chunk.iter().zip(&w).map(|(v, w)| v * w).sum());
        }
        cur = next;
    }
    cur[0]
}
