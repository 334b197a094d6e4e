use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::BesovParams;
use crate::error::{domain, Result};
use crate::grid_field::GridField;

pub const DEFAULT_BUDGET: usize = 2_000_000;
pub const DEFAULT_SEED: u64 = 1;

/// `( int int |Du(x) - Du(y)|^p / |x - y|^{n + (s-1) p} dx dy )^{1/p}`.
///
/// Monte Carlo over `budget` uniformly drawn node pairs, scaled by the squared
/// box volume; coincident nodes contribute zero. With `budget == 0` on a 1-d
/// grid the full trapezoid double sum is evaluated instead.
pub fn gagliardo_seminorm(u: &GridField, params: BesovParams, budget: usize, seed: u64) -> Result<f64> {
    let (s, p) = (params.s(), params.p());
    if !(s > 1.0 && s < 2.0) {
        return domain(format!("the Gagliardo form needs 1 < s < 2, got s = {s}; use the dyadic norm"));
    }
    let spec = u.spec();
    let n = spec.dim();
    if budget == 0 && n != 1 {
        return domain("the exhaustive double sum (budget 0) is only available in one dimension");
    }
    let exponent = n as f64 + (s - 1.0) * p;
    let grad = u.gradient();
    let nodes: Vec<Vec<f64>> = (0..n).map(|a| spec.axis_nodes(a)).collect();
    let band = 0.5 * spec.min_spacing();
    let mut ia = vec![0usize; n];
    let mut ib = vec![0usize; n];
    let term = |a: usize, b: usize, ia: &mut [usize], ib: &mut [usize]| -> f64 {
        spec.unflatten(a, ia);
        spec.unflatten(b, ib);
        let mut dist2 = 0.0;
        let mut diff2 = 0.0;
        for ax in 0..n {
            let d = nodes[ax][ia[ax]] - nodes[ax][ib[ax]];
            dist2 += d * d;
            let g = grad[ax].samples()[a] - grad[ax].samples()[b];
            diff2 += g * g;
        }
        let dist = dist2.sqrt();
        if dist < band || diff2 == 0.0 {
            return 0.0;
        }
        diff2.powf(0.5 * p) / dist.powf(exponent)
    };

    let integral = if budget == 0 {
        let w = spec.axis_weights(0);
        let mut total = 0.0;
        for a in 0..spec.len() {
            for b in 0..spec.len() {
                total += w[a] * w[b] * term(a, b, &mut ia, &mut ib);
            }
        }
        total
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = spec.len();
        let mut acc = 0.0;
        for _ in 0..budget {
            let a = rng.gen_range(0..len);
            let b = rng.gen_range(0..len);
            acc += term(a, b, &mut ia, &mut ib);
        }
        let vol = spec.bbox().volume();
        vol * vol * acc / budget as f64
    };
    Ok(integral.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_field::{GridBox, GridSpec};
    use crate::smooth::unit_bump;

    fn params() -> BesovParams {
        BesovParams::new(1.5, 2.0).unwrap()
    }

    fn bump_on(spec: &GridSpec, center: &[f64], scale: f64) -> GridField {
        GridField::sample(spec, |x| {
            let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
            unit_bump(r2.sqrt() * scale).v
        })
        .unwrap()
    }

    #[test]
    fn zero_and_affine_vanish() {
        let spec = GridSpec::cube(2, 0.0, 1.0, 16).unwrap();
        assert_eq!(gagliardo_seminorm(&GridField::zeros(&spec), params(), 5000, 1).unwrap(), 0.0);
        let aff = GridField::sample(&spec, |x| 2.0 * x[0] - 3.0 * x[1] + 1.0).unwrap();
        assert!(gagliardo_seminorm(&aff, params(), 5000, 1).unwrap() < 1e-5);
    }

    #[test]
    fn rejects_out_of_range_s() {
        let spec = GridSpec::cube(1, 0.0, 1.0, 16).unwrap();
        let u = GridField::zeros(&spec);
        assert!(gagliardo_seminorm(&u, BesovParams::new(1.0, 2.0).unwrap(), 10, 1).is_err());
        assert!(gagliardo_seminorm(&u, BesovParams::new(0.5, 2.0).unwrap(), 10, 1).is_err());
        let sq = GridSpec::cube(2, 0.0, 1.0, 8).unwrap();
        assert!(gagliardo_seminorm(&GridField::zeros(&sq), params(), 0, 1).is_err());
    }

    #[test]
    fn adding_an_affine_field_changes_nothing() {
        let spec = GridSpec::cube(2, -1.5, 1.5, 33).unwrap();
        let u = bump_on(&spec, &[0.0, 0.0], 1.0);
        let aff = GridField::sample(&spec, |x| 0.7 * x[0] - 0.2 * x[1] + 4.0).unwrap();
        let v = u.add(&aff).unwrap();
        let a = gagliardo_seminorm(&u, params(), 50_000, 9).unwrap();
        let b = gagliardo_seminorm(&v, params(), 50_000, 9).unwrap();
        assert!((a - b).abs() <= 1e-9 * a);
    }

    #[test]
    fn translation_invariance() {
        let spec = GridSpec::cube(2, -1.5, 1.5, 41).unwrap();
        let shifted_box = spec.bbox().translated(&[0.3, -0.2]).unwrap();
        let shifted = GridSpec::closed(shifted_box, spec.points().to_vec()).unwrap();
        let a = gagliardo_seminorm(&bump_on(&spec, &[0.0, 0.0], 1.0), params(), 100_000, 4).unwrap();
        let b = gagliardo_seminorm(&bump_on(&shifted, &[0.3, -0.2], 1.0), params(), 100_000, 4).unwrap();
        assert!((a - b).abs() <= 1e-9 * a, "{a} vs {b}");
    }

    #[test]
    fn budget_sentinel_matches_monte_carlo_in_1d() {
        let spec = GridSpec::closed(GridBox::cube(1, -1.5, 1.5).unwrap(), vec![301]).unwrap();
        let u = bump_on(&spec, &[0.0], 1.0);
        let exact = gagliardo_seminorm(&u, params(), 0, 0).unwrap();
        let mc = gagliardo_seminorm(&u, params(), 400_000, 2).unwrap();
        assert!((exact - mc).abs() < 0.05 * exact, "{exact} vs {mc}");
    }

    #[test]
    fn dilation_scaling_law() {
        // u_l(x) = u(l x) scales like l^{s - n/p} when both supports sit inside the box
        let spec = GridSpec::cube(2, -1.2, 1.2, 97).unwrap();
        let base = gagliardo_seminorm(&bump_on(&spec, &[0.0, 0.0], 1.0), params(), 1_000_000, 6).unwrap();
        let dil = gagliardo_seminorm(&bump_on(&spec, &[0.0, 0.0], 2.0), params(), 1_000_000, 6).unwrap();
        let want = 2f64.powf(1.5 - 1.0);
        assert!((dil / base / want - 1.0).abs() < 0.1, "ratio {} want {want}", dil / base);
    }

    #[test]
    fn deterministic_given_seed() {
        let spec = GridSpec::cube(2, -1.5, 1.5, 25).unwrap();
        let u = bump_on(&spec, &[0.0, 0.0], 1.0);
        assert_eq!(
            gagliardo_seminorm(&u, params(), 10_000, 77).unwrap(),
            gagliardo_seminorm(&u, params(), 10_000, 77).unwrap()
        );
    }
}
