//! Radial profiles `h` on `(0, 1)` with zero mean, and `g(x) = int_0^{|x|} h`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::minor_algebra::{det_dense, SquareMatrix};
use crate::smooth::{bump, unit_bump, Jet};

/// Minimum `|int_0^1 h^k r^{n+1-k} dr|` accepted for a shipped profile.
pub const MOMENT_THRESHOLD: f64 = 1e-3;

/// Largest tolerated `|int_0^1 h|`.
pub const MEAN_TOLERANCE: f64 = 1e-10;

const TABLE_CELLS: usize = 4096;
const QUAD_CELLS: usize = 2048;

// 5-point Gauss-Legendre on [-1, 1]
const GL_X: [f64; 5] = [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
const GL_W: [f64; 5] = [0.236_926_885_056_189, 0.478_628_670_499_366, 0.568_888_888_888_889, 0.478_628_670_499_366, 0.236_926_885_056_189];

fn gauss(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    GL_X.iter().zip(&GL_W).map(|(x, w)| w * f(mid + half * x)).sum::<f64>() * half
}

/// Composite Gauss-Legendre over `[a, b]`.
pub(crate) fn integrate_1d(f: impl Fn(f64) -> f64, a: f64, b: f64, cells: usize) -> f64 {
    let h = (b - a) / cells as f64;
    (0..cells).map(|c| gauss(&f, a + c as f64 * h, a + (c + 1) as f64 * h)).sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProfileKind {
    /// `b1 - c b2` for disjoint bumps, `c` calibrated.
    TwoBump,
    /// A single profile odd about `r = 1/2`.
    OddReflected,
    /// Three calibrated bumps with both the mean and the moment cancelled.
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Piece {
    center: f64,
    halfwidth: f64,
    amplitude: f64,
}

#[derive(Clone, Debug, PartialEq)]
enum Shape {
    Bumps(Vec<Piece>),
    /// `-scale (r - 1/2) bump(r; 1/2, halfwidth)`
    Odd { halfwidth: f64, scale: f64 },
}

impl Shape {
    fn eval(&self, r: f64) -> Jet {
        match self {
            Shape::Bumps(pieces) => {
                pieces.iter().fold(Jet::ZERO, |acc, p| acc + bump(r, p.center, p.halfwidth).scale(p.amplitude))
            }
            Shape::Odd { halfwidth, scale } => {
                let t = (r - 0.5) / halfwidth;
                let b = unit_bump(t);
                let b = Jet::new(b.v, b.d1 / halfwidth, b.d2 / (halfwidth * halfwidth));
                (Jet::var(r) - Jet::constant(0.5)) * b.scale(-scale)
            }
        }
    }

    fn support(&self) -> (f64, f64) {
        match self {
            Shape::Bumps(pieces) => {
                let lo = pieces.iter().map(|p| p.center - p.halfwidth).fold(f64::INFINITY, f64::min);
                let hi = pieces.iter().map(|p| p.center + p.halfwidth).fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
            Shape::Odd { halfwidth, .. } => (0.5 - halfwidth, 0.5 + halfwidth),
        }
    }
}

/// A compactly supported `h` in `(0, 1)` with `int h = 0`, plus a tabulated
/// antiderivative for `g(x) = G(|x|)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    kind: ProfileKind,
    shape: Shape,
    support: (f64, f64),
    mean: f64,
    order: (usize, usize),
    moment: f64,
    table: Vec<f64>,
}

/// Seeded two-bump profile calibrated to mean zero and checked for a
/// nonvanishing `(k, n)` moment.
pub fn make_profile(seed: u64, k: usize, n: usize) -> Result<RadialProfile> {
    check_order(k, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // as wide as disjointness allows: supports [c1 - w1, c1 + w1] and [c2 - w2, c2 + w2] in [0.01, 0.99]
    let c1 = 0.25 + 0.01 * rng.gen::<f64>();
    let w1 = 0.22 + 0.02 * rng.gen::<f64>();
    let c2 = 0.74 + 0.01 * rng.gen::<f64>();
    let w2 = 0.22 + 0.02 * rng.gen::<f64>();
    let b1 = piece_mass(c1, w1);
    let b2 = piece_mass(c2, w2);
    let pieces = vec![
        Piece { center: c1, halfwidth: w1, amplitude: 1.0 },
        Piece { center: c2, halfwidth: w2, amplitude: -b1 / b2 },
    ];
    let profile = RadialProfile::build(ProfileKind::TwoBump, Shape::Bumps(pieces), k, n);
    profile.require_moment()?;
    Ok(profile)
}

fn piece_mass(center: f64, halfwidth: f64) -> f64 {
    integrate_1d(|r| bump(r, center, halfwidth).v, center - halfwidth, center + halfwidth, QUAD_CELLS)
}

fn check_order(k: usize, n: usize) -> Result<()> {
    if k == 0 || k > n {
        return domain(format!("profile moments need 1 <= k <= n, got k = {k}, n = {n}"));
    }
    Ok(())
}

impl RadialProfile {
    /// The odd-symmetric alternative; its mean vanishes without calibration.
    pub fn odd_reflected(k: usize, n: usize) -> Result<Self> {
        check_order(k, n)?;
        let profile = Self::build(ProfileKind::OddReflected, Shape::Odd { halfwidth: 0.45, scale: 4.0 }, k, n);
        profile.require_moment()?;
        Ok(profile)
    }

    /// Mean-zero profile whose `(k, n)` moment also vanishes. Only odd `k`
    /// admit one (for even `k` the moment integrand is nonnegative).
    pub fn degenerate(k: usize, n: usize) -> Result<Self> {
        check_order(k, n)?;
        if k % 2 == 0 {
            return domain(format!("no degenerate profile exists for even k = {k}"));
        }
        let (cs, w) = ([0.2, 0.5, 0.8], 0.15);
        let e = (n + 1 - k) as i32;
        let mom: Vec<f64> = cs
            .iter()
            .map(|&c| integrate_1d(|r| bump(r, c, w).v.powi(k as i32) * r.powi(e), c - w, c + w, QUAD_CELLS))
            .collect();
        // mean: 1 - a + c = 0 with equal masses, so c = a - 1; solve the moment in a
        let f = |a: f64| mom[0] - a.powi(k as i32) * mom[1] + (a - 1.0).powi(k as i32) * mom[2];
        let (mut lo, mut hi) = (1.0, 2.0);
        while f(hi) < 0.0 {
            hi *= 2.0;
            if hi > 1e6 {
                return Err(Error::Construction("degenerate profile root not bracketed".into()));
            }
        }
        if f(lo) >= 0.0 {
            return Err(Error::Construction("degenerate profile root not bracketed".into()));
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let a = 0.5 * (lo + hi);
        // normalised so the middle bump has unit height
        let pieces = vec![
            Piece { center: cs[0], halfwidth: w, amplitude: 1.0 / a },
            Piece { center: cs[1], halfwidth: w, amplitude: -1.0 },
            Piece { center: cs[2], halfwidth: w, amplitude: (a - 1.0) / a },
        ];
        Ok(Self::build(ProfileKind::Degenerate, Shape::Bumps(pieces), k, n))
    }

    fn build(kind: ProfileKind, shape: Shape, k: usize, n: usize) -> Self {
        let support = shape.support();
        let h = |r: f64| shape.eval(r).v;
        let mean = integrate_1d(h, 0.0, 1.0, QUAD_CELLS);
        let dr = 1.0 / TABLE_CELLS as f64;
        let mut table = Vec::with_capacity(TABLE_CELLS + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for c in 0..TABLE_CELLS {
            acc += gauss(&h, c as f64 * dr, (c + 1) as f64 * dr);
            table.push(acc);
        }
        let mut profile = Self { kind, shape, support, mean, order: (k, n), moment: 0.0, table };
        profile.moment = profile.moment_for(k, n);
        profile
    }

    fn require_moment(&self) -> Result<()> {
        if self.mean.abs() > MEAN_TOLERANCE {
            return Err(Error::Construction(format!("profile mean {:e} exceeds {MEAN_TOLERANCE:e}", self.mean)));
        }
        if self.moment.abs() < MOMENT_THRESHOLD {
            let (k, n) = self.order;
            return Err(Error::Construction(format!(
                "moment for (k, n) = ({k}, {n}) is {:e}, below {MOMENT_THRESHOLD:e}; pick other bump centres",
                self.moment
            )));
        }
        Ok(())
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    /// `h`, `h'`, `h''` at `r`.
    pub fn h(&self, r: f64) -> Jet {
        if r <= self.support.0 || r >= self.support.1 {
            return Jet::ZERO;
        }
        self.shape.eval(r)
    }

    /// Closed support interval of `h` inside `(0, 1)`.
    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    /// `int_0^1 h`, by quadrature.
    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// The moment for the `(k, n)` the profile was built for.
    pub fn moment(&self) -> f64 {
        self.moment
    }

    pub fn order(&self) -> (usize, usize) {
        self.order
    }

    /// `int_0^1 h^k r^{n+1-k} dr`.
    pub fn moment_for(&self, k: usize, n: usize) -> f64 {
        let e = n as i32 + 1 - k as i32;
        let (lo, hi) = self.support;
        integrate_1d(|r| self.shape.eval(r).v.powi(k as i32) * r.powi(e), lo, hi, QUAD_CELLS)
    }

    /// `G(r) = int_0^r h`, cubic Hermite on the table with exact slopes;
    /// exactly zero off the support.
    pub fn antiderivative(&self, r: f64) -> f64 {
        if r <= self.support.0 || r >= self.support.1 {
            return 0.0;
        }
        let pos = r * TABLE_CELLS as f64;
        let c = (pos.floor() as usize).min(TABLE_CELLS - 1);
        let t = pos - c as f64;
        let dr = 1.0 / TABLE_CELLS as f64;
        let (r0, r1) = (c as f64 * dr, (c + 1) as f64 * dr);
        let (g0, g1) = (self.table[c], self.table[c + 1]);
        let (m0, m1) = (self.shape.eval(r0).v * dr, self.shape.eval(r1).v * dr);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * g0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * g1 + (t3 - t2) * m1
    }
}

/// `g(x) = int_0^{|x|} h(r) dr`.
pub fn radial_g(profile: &RadialProfile, x: &[f64]) -> f64 {
    profile.antiderivative(norm(x))
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Exact `D^2 g(x) = h'(r) xhat xhat^T + h(r)/r (I - xhat xhat^T)`.
pub fn radial_hessian(profile: &RadialProfile, x: &[f64]) -> SquareMatrix {
    let n = x.len();
    let r = norm(x);
    let h = profile.h(r);
    if h == Jet::ZERO {
        return SquareMatrix::zeros(n);
    }
    let tangential = h.v / r;
    SquareMatrix::from_fn(n, |a, b| {
        let p = x[a] * x[b] / (r * r);
        let id = if a == b { 1.0 } else { 0.0 };
        h.d1 * p + tangential * (id - p)
    })
}

/// `I(s) = int_0^pi sin^s`, by the Wallis recursion.
pub fn wallis(s: usize) -> f64 {
    match s {
        0 => PI,
        1 => 2.0,
        _ => (s as f64 - 1.0) / s as f64 * wallis(s - 2),
    }
}

/// Both sides of the radial identity
/// `int_{B(0,1)} M_alpha^alpha(D^2 g) |x|^2 dx = -(2/n) |S^{n-1}| int_0^1 h^k r^{n+1-k} dr`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialIdentityReport {
    pub k: usize,
    pub n: usize,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs` at the coarser of the two quadrature levels.
    pub lhs_coarse: f64,
    /// `int |M_alpha^alpha(D^2 g)| |x|^2`, the scale against which a vanishing
    /// `lhs` is judged.
    pub magnitude: f64,
    pub points: (usize, usize),
}

impl RadialIdentityReport {
    pub fn relative_error(&self) -> f64 {
        (self.lhs - self.rhs).abs() / self.rhs.abs().max(f64::MIN_POSITIVE)
    }
}

/// Surface area of the unit sphere in `R^n`, as `2 pi prod_{i=1}^{n-2} I(i)`.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI * (1..n.saturating_sub(1)).map(wallis).product::<f64>()
}

/// Right-hand side `-(2/n) |S^{n-1}| moment`.
pub fn radial_identity_rhs(moment: f64, n: usize) -> f64 {
    -2.0 / n as f64 * sphere_area(n) * moment
}

/// Tensor trapezoid of `M_alpha^alpha(D^2 g) |x|^2` over `[-1, 1]^n` with
/// `alpha = (1, ..., k)` and the exact Hessian.
pub fn radial_identity_lhs(profile: &RadialProfile, k: usize, n: usize, points: usize) -> f64 {
    radial_identity_sums(profile, k, n, points).0
}

/// The signed integral together with the integral of its absolute value.
fn radial_identity_sums(profile: &RadialProfile, k: usize, n: usize, points: usize) -> (f64, f64) {
    let h = 2.0 / (points - 1) as f64;
    let (_, hi) = profile.support();
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    let mut sub = vec![0.0; k * k];
    let mut total = 0.0;
    let mut magnitude = 0.0;
    let count = points.pow(n as u32);
    for flat in 0..count {
        let mut f = flat;
        for slot in idx.iter_mut().rev() {
            *slot = f % points;
            f /= points;
        }
        // the integrand vanishes at the box faces, so plain sums are the trapezoid rule
        for (xi, &i) in x.iter_mut().zip(&idx) {
            *xi = -1.0 + i as f64 * h;
        }
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 >= hi * hi {
            continue;
        }
        let hess = radial_hessian(profile, &x);
        for a in 0..k {
            for b in 0..k {
                sub[a * k + b] = hess.get(a, b);
            }
        }
        let v = det_dense(&sub, k) * r2;
        total += v;
        magnitude += v.abs();
    }
    let w = h.powi(n as i32);
    (total * w, magnitude * w)
}

/// Checks the radial identity by two quadrature levels; errors if the levels
/// disagree by more than half a percent of the larger of `|lhs|` and a
/// thousandth of `int |integrand|`.
pub fn radial_identity_check(profile: &RadialProfile, k: usize, n: usize) -> Result<RadialIdentityReport> {
    if !(2 <= k && k <= n && n <= 4) {
        return domain(format!("the radial check needs 2 <= k <= n <= 4, got k = {k}, n = {n}"));
    }
    let points = if n == 4 { (41, 61) } else { (81, 121) };
    let lhs_coarse = radial_identity_lhs(profile, k, n, points.0);
    let (lhs, magnitude) = radial_identity_sums(profile, k, n, points.1);
    let rhs = radial_identity_rhs(profile.moment_for(k, n), n);
    let scale = lhs.abs().max(rhs.abs()).max(1e-3 * magnitude).max(1e-12);
    if (lhs - lhs_coarse).abs() > 5e-3 * scale {
        return Err(Error::Quadrature(format!(
            "radial integral moved from {lhs_coarse:e} ({} points/axis) to {lhs:e} ({} points/axis)",
            points.0, points.1
        )));
    }
    Ok(RadialIdentityReport { k, n, lhs, rhs, lhs_coarse, magnitude, points })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn calibrated_mean_and_moment() {
        for seed in 0..5 {
            let p = make_profile(seed, 3, 3).unwrap();
            assert!(p.mean().abs() <= MEAN_TOLERANCE);
            assert!(p.moment().abs() >= MOMENT_THRESHOLD);
            assert_eq!(p.kind(), ProfileKind::TwoBump);
        }
        let odd = RadialProfile::odd_reflected(3, 3).unwrap();
        assert!(odd.mean().abs() <= MEAN_TOLERANCE);
        assert!(odd.moment().abs() >= MOMENT_THRESHOLD);
    }

    #[test]
    fn same_seed_same_profile() {
        assert_eq!(make_profile(7, 2, 2).unwrap(), make_profile(7, 2, 2).unwrap());
        assert_ne!(make_profile(7, 2, 2).unwrap(), make_profile(8, 2, 2).unwrap());
    }

    #[test]
    fn wallis_values() {
        assert!((wallis(1) - 2.0).abs() < 1e-15);
        assert!((wallis(2) - PI / 2.0).abs() < 1e-15);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-12);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-12);
        // |S^3| = 2 pi^2
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn rhs_prefactor_for_three_three() {
        let p = make_profile(1, 3, 3).unwrap();
        let want = -(8.0 * PI / 3.0) * p.moment_for(3, 3);
        assert!((radial_identity_rhs(p.moment_for(3, 3), 3) - want).abs() < 1e-14);
    }

    #[test]
    fn antiderivative_matches_quadrature_and_vanishes_outside() {
        let p = make_profile(3, 3, 3).unwrap();
        for &r in &[0.1, 0.27, 0.5, 0.61, 0.83] {
            let want = integrate_1d(|t| p.h(t).v, 0.0, r, 4000);
            assert!((p.antiderivative(r) - want).abs() < 1e-11, "r = {r}");
        }
        assert_eq!(radial_g(&p, &[0.8, 0.7, 0.0]), 0.0);
        assert_eq!(radial_g(&p, &[1.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn g_is_radial() {
        let p = make_profile(2, 3, 3).unwrap();
        let x = [0.3, -0.2, 0.1];
        // rotation by 90 degrees in the (1, 2) plane, then a reflection
        let y = [0.2, 0.3, -0.1];
        assert!((radial_g(&p, &x) - radial_g(&p, &y)).abs() < 1e-15);
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let p = RadialProfile::odd_reflected(3, 3).unwrap();
        let x = [0.31, -0.22, 0.17];
        let h = 1e-4;
        let exact = radial_hessian(&p, &x);
        for a in 0..3 {
            for b in 0..3 {
                let f = |da: f64, db: f64| {
                    let mut y = x;
                    y[a] += da;
                    y[b] += db;
                    radial_g(&p, &y)
                };
                let fd = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
                assert!((fd - exact.get(a, b)).abs() < 1e-5, "({a}, {b}): {fd} vs {}", exact.get(a, b));
            }
        }
    }

    #[test]
    fn degenerate_profile_has_tiny_moment() {
        let p = RadialProfile::degenerate(3, 3).unwrap();
        assert!(p.mean().abs() < 1e-12);
        assert!(p.moment().abs() < 1e-12);
        assert!(RadialProfile::degenerate(2, 2).is_err());
        let rep = radial_identity_check(&p, 3, 3).unwrap();
        assert!(rep.lhs.abs() < 1e-3 * rep.magnitude, "{rep:?}");
        assert!(rep.rhs.abs() < 1e-10);
    }

    #[test]
    fn order_checks() {
        assert!(make_profile(1, 4, 3).is_err());
        assert!(radial_identity_check(&make_profile(1, 3, 3).unwrap(), 1, 3).is_err());
        assert!(radial_identity_check(&make_profile(1, 3, 3).unwrap(), 3, 5).is_err());
    }

    #[test]
    fn radial_identity_in_the_plane() {
        for p in [make_profile(1, 2, 2).unwrap(), RadialProfile::odd_reflected(2, 2).unwrap()] {
            let rep = radial_identity_check(&p, 2, 2).unwrap();
            assert!(rep.relative_error() < 0.02, "{rep:?}");
        }
    }
}
