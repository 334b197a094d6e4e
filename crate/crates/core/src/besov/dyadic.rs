//! Littlewood–Paley blocks on the torus `[0, 2 pi)^n`.
//!
//! The low-pass bump is `rho(t) = 1` on `[0, 5/8]`, `0` on `[1, inf)`, with a
//! smoothed step between. Block `j >= 1` has multiplier
//! `rho(|l| / 2^{j+1}) - rho(|l| / 2^j)`, supported in `5/8 2^j < |l| < 2^{j+1}`;
//! together with the low part `rho(|l| / 2)` they sum to one at every frequency.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use super::BesovParams;
use crate::error::{domain, Result};
use crate::grid_field::GridField;
use crate::smooth::smooth_step;

/// How `|l|` is measured for a frequency vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WindowShape {
    /// Euclidean length of `l`.
    Radial,
    /// Tensor windows `prod_i rho(|l_i| / 2^j)`; these factor across axes.
    Product,
}

/// The low-pass bump.
pub fn low_bump(t: f64) -> f64 {
    1.0 - smooth_step((t - 0.625) / 0.375).v
}

/// Multiplier of block `j`; `j == 0` is the low part `rho(|l| / 2)`.
pub fn block_window(j: u32, l: &[f64], shape: WindowShape) -> f64 {
    let rho = |scale: f64| -> f64 {
        match shape {
            WindowShape::Radial => low_bump(l.iter().map(|v| v * v).sum::<f64>().sqrt() / scale),
            WindowShape::Product => l.iter().map(|v| low_bump(v.abs() / scale)).product(),
        }
    };
    if j == 0 {
        return rho(2.0);
    }
    let lo = 2f64.powi(j as i32);
    rho(2.0 * lo) - rho(lo)
}

/// Integer frequency of DFT bin `i` out of `n`.
pub fn frequency(i: usize, n: usize) -> i64 {
    if i <= n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

/// In-place n-dimensional DFT (unnormalized forward; inverse divides by the size).
pub fn fft_nd(data: &mut [Complex64], dims: &[usize], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let total: usize = dims.iter().product();
    debug_assert_eq!(total, data.len());
    let mut stride = total;
    for &len in dims {
        stride /= len;
        let plan = if inverse { planner.plan_fft_inverse(len) } else { planner.plan_fft_forward(len) };
        let outer = total / (len * stride);
        let mut line = vec![Complex64::new(0.0, 0.0); len];
        for o in 0..outer {
            for inner in 0..stride {
                let base = o * len * stride + inner;
                for (t, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + t * stride];
                }
                plan.process(&mut line);
                for (t, v) in line.iter().enumerate() {
                    data[base + t * stride] = *v;
                }
            }
        }
    }
    if inverse {
        let scale = 1.0 / total as f64;
        data.iter_mut().for_each(|v| *v *= scale);
    }
}

fn check_torus(u: &GridField) -> Result<()> {
    let spec = u.spec();
    if !spec.is_periodic() {
        return domain("the dyadic norm needs a periodic grid");
    }
    for a in 0..spec.dim() {
        if (spec.bbox().length(a) - 2.0 * PI).abs() > 1e-9 {
            return domain(format!("the dyadic norm needs period 2 pi on every axis, axis {a} has {}", spec.bbox().length(a)));
        }
    }
    Ok(())
}

struct Spectrum {
    coeffs: Vec<Complex64>,
    freqs: Vec<Vec<f64>>,
    top_block: u32,
}

fn spectrum(u: &GridField) -> Spectrum {
    let spec = u.spec();
    let dims = spec.points().to_vec();
    let mut coeffs: Vec<Complex64> = u.samples().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft_nd(&mut coeffs, &dims, false);
    let mut idx = vec![0; dims.len()];
    let freqs: Vec<Vec<f64>> = (0..spec.len())
        .map(|flat| {
            spec.unflatten(flat, &mut idx);
            idx.iter().zip(&dims).map(|(&i, &n)| frequency(i, n) as f64).collect()
        })
        .collect();
    let max_len = freqs.iter().map(|l| l.iter().map(|v| v * v).sum::<f64>().sqrt()).fold(0.0, f64::max);
    // block j is non-zero only where 5/8 2^j < |l|
    let mut top = 1;
    while 0.625 * 2f64.powi(top as i32) < max_len {
        top += 1;
    }
    Spectrum { coeffs, freqs, top_block: top }
}

fn apply_block(sp: &Spectrum, u: &GridField, j: u32, shape: WindowShape) -> Option<GridField> {
    let mut buf: Vec<Complex64> =
        sp.coeffs.iter().zip(&sp.freqs).map(|(c, l)| c * block_window(j, l, shape)).collect();
    if buf.iter().all(|c| c.norm_sqr() == 0.0) {
        return None;
    }
    fft_nd(&mut buf, u.spec().points(), true);
    Some(GridField::from_parts(u.spec().clone(), buf.iter().map(|c| c.re).collect()))
}

/// Low part and blocks `T_1 u, T_2 u, ...` (zero blocks included as zero fields).
pub fn dyadic_blocks(u: &GridField, shape: WindowShape) -> Result<(GridField, Vec<GridField>)> {
    check_torus(u)?;
    let sp = spectrum(u);
    let zero = || GridField::zeros(u.spec());
    let low = apply_block(&sp, u, 0, shape).unwrap_or_else(zero);
    let blocks = (1..=sp.top_block).map(|j| apply_block(&sp, u, j, shape).unwrap_or_else(zero)).collect();
    Ok((low, blocks))
}

/// `( ||u||_p^p + sum_{j >= 1} 2^{s j p} ||T_j u||_p^p )^{1/p}` with radial windows.
pub fn dyadic_norm(u: &GridField, params: BesovParams) -> Result<f64> {
    dyadic_norm_with(u, params, WindowShape::Radial)
}

pub fn dyadic_norm_with(u: &GridField, params: BesovParams, shape: WindowShape) -> Result<f64> {
    check_torus(u)?;
    let (s, p) = (params.s(), params.p());
    let sp = spectrum(u);
    let mut total = u.lp_norm(p)?.powf(p);
    for j in 1..=sp.top_block {
        if let Some(block) = apply_block(&sp, u, j, shape) {
            total += 2f64.powf(s * j as f64 * p) * block.lp_norm(p)?.powf(p);
        }
    }
    Ok(total.powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_field::{GridBox, GridSpec};

    fn torus(n: usize, pts: usize) -> GridSpec {
        GridSpec::periodic(GridBox::cube(n, 0.0, 2.0 * PI).unwrap(), vec![pts; n]).unwrap()
    }

    #[test]
    fn windows_partition_unity() {
        for shape in [WindowShape::Radial, WindowShape::Product] {
            for l in [[0.0, 0.0], [1.0, 0.0], [3.0, 4.0], [17.0, -9.0], [100.0, 3.0]] {
                let sum: f64 = (0..12).map(|j| block_window(j, &l, shape)).sum();
                assert!((sum - 1.0).abs() < 1e-14, "{l:?}");
            }
        }
        assert_eq!(block_window(0, &[2.0], WindowShape::Radial), 0.0);
        assert_eq!(block_window(1, &[1.0], WindowShape::Radial), 0.0);
    }

    #[test]
    fn constant_field_has_only_lp_part() {
        let spec = torus(2, 16);
        let u = GridField::constant(&spec, 3.0);
        let params = BesovParams::new(1.2, 3.0).unwrap();
        let want = u.lp_norm(3.0).unwrap();
        assert!((dyadic_norm(&u, params).unwrap() - want).abs() < 1e-12 * want);
    }

    #[test]
    fn single_frequency_hits_one_block() {
        let spec = torus(1, 256);
        let big_j = 4;
        let freq = 2f64.powi(big_j);
        let u = GridField::sample(&spec, |x| (freq * x[0]).sin()).unwrap();
        let (_, blocks) = dyadic_blocks(&u, WindowShape::Radial).unwrap();
        for (j, b) in blocks.iter().enumerate() {
            let nonzero = b.max_abs() > 1e-12;
            assert_eq!(nonzero, j + 1 == big_j as usize, "block {}", j + 1);
        }
        let s = 0.7;
        let params = BesovParams::new(s, 2.0).unwrap();
        let l2 = PI.sqrt();
        let want = l2 * (1.0 + 2f64.powf(2.0 * s * big_j as f64)).sqrt();
        assert!((dyadic_norm(&u, params).unwrap() - want).abs() < 1e-10 * want);
    }

    #[test]
    fn blocks_reconstruct_band_limited_fields() {
        let spec = torus(2, 64);
        let u = GridField::sample(&spec, |x| {
            (3.0 * x[0]).cos() * (x[1]).sin() + 0.5 * (11.0 * x[0] + 7.0 * x[1]).sin() + 0.25
        })
        .unwrap();
        for shape in [WindowShape::Radial, WindowShape::Product] {
            let (low, blocks) = dyadic_blocks(&u, shape).unwrap();
            let mut sum = low;
            for b in &blocks {
                sum = sum.add(b).unwrap();
            }
            let err = sum.sub(&u).unwrap().lp_norm(2.0).unwrap();
            assert!(err < 1e-8, "{shape:?}: {err}");
        }
    }

    #[test]
    fn rejects_non_torus_grids() {
        let params = BesovParams::new(1.2, 2.0).unwrap();
        let closed = GridSpec::cube(1, 0.0, 2.0 * PI, 16).unwrap();
        assert!(dyadic_norm(&GridField::zeros(&closed), params).is_err());
        let short = GridSpec::periodic(GridBox::cube(1, 0.0, 1.0).unwrap(), vec![16]).unwrap();
        assert!(dyadic_norm(&GridField::zeros(&short), params).is_err());
    }

    #[test]
    fn fft_round_trip() {
        let dims = [4, 6, 5];
        let orig: Vec<Complex64> = (0..120).map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let mut data = orig.clone();
        fft_nd(&mut data, &dims, false);
        fft_nd(&mut data, &dims, true);
        assert!(data.iter().zip(&orig).all(|(a, b)| (a - b).norm() < 1e-12));
    }
}
