//! Translation-invariant Haar soft-thresholding.
//!
//! Undecimated (à trous) Haar analysis with per-level orthonormal
//! normalization and circular indexing, soft shrinkage of every detail
//! coefficient, and the tight-frame averaging inverse. This is exactly
//! cycle spinning of the decimated orthonormal Haar transform over all
//! 2^levels × 2^levels circular shifts: the undecimated coefficients are the
//! union of the shifted decimated ones, and averaging the per-shift
//! reconstructions is the averaging inverse used here. Threshold 0 is the
//! identity up to rounding, and the whole map is nonexpansive (tight frame
//! composed with 1-Lipschitz shrinkage).

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::Result;
use crate::grid::Image;

use super::{soft_threshold, TiHaarParams};

/// One undecimated analysis level with gap `h` along rows then columns.
/// Returns (ll, lh, hl, hh), each n×n.
fn analyze(approx: &[f64], n: usize, h: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut low = vec![0.0; n * n];
    let mut high = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let a = approx[i * n + j];
            let b = approx[i * n + (j + h) % n];
            low[i * n + j] = (a + b) * FRAC_1_SQRT_2;
            high[i * n + j] = (a - b) * FRAC_1_SQRT_2;
        }
    }
    let mut ll = vec![0.0; n * n];
    let mut lh = vec![0.0; n * n];
    let mut hl = vec![0.0; n * n];
    let mut hh = vec![0.0; n * n];
    for i in 0..n {
        let ih = (i + h) % n;
        for j in 0..n {
            let l0 = low[i * n + j];
            let l1 = low[ih * n + j];
            ll[i * n + j] = (l0 + l1) * FRAC_1_SQRT_2;
            lh[i * n + j] = (l0 - l1) * FRAC_1_SQRT_2;
            let h0 = high[i * n + j];
            let h1 = high[ih * n + j];
            hl[i * n + j] = (h0 + h1) * FRAC_1_SQRT_2;
            hh[i * n + j] = (h0 - h1) * FRAC_1_SQRT_2;
        }
    }
    (ll, lh, hl, hh)
}

/// Tight-frame inverse of one level: average the two exact reconstructions
/// offered by the redundant coefficients (pairs at i and i−h).
fn synthesize(ll: &[f64], lh: &[f64], hl: &[f64], hh: &[f64], n: usize, h: usize) -> Vec<f64> {
    let half = 0.5 * FRAC_1_SQRT_2;
    let mut low = vec![0.0; n * n];
    let mut high = vec![0.0; n * n];
    for i in 0..n {
        let im = (i + n - h) % n;
        for j in 0..n {
            low[i * n + j] = half
                * (ll[i * n + j] + lh[i * n + j] + ll[im * n + j] - lh[im * n + j]);
            high[i * n + j] = half
                * (hl[i * n + j] + hh[i * n + j] + hl[im * n + j] - hh[im * n + j]);
        }
    }
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let jm = (j + n - h) % n;
            out[i * n + j] = half
                * (low[i * n + j] + high[i * n + j] + low[i * n + jm] - high[i * n + jm]);
        }
    }
    out
}

/// Translation-invariant Haar soft-thresholding to `levels` scales. The
/// approximation band is never thresholded. Requires a power-of-two side.
pub fn ti_haar_filter(img: &Image, params: &TiHaarParams) -> Result<Image> {
    let n = img.n();
    params.validate_for(n)?;
    let t = params.threshold;

    let mut approx = img.samples().to_vec();
    let mut details: Vec<(Vec<f64>, Vec<f64>, Vec<f64>)> = Vec::with_capacity(params.levels);
    for level in 0..params.levels {
        let h = 1usize << level;
        let (ll, lh, hl, hh) = analyze(&approx, n, h);
        details.push((lh, hl, hh));
        approx = ll;
    }

    for level in (0..params.levels).rev() {
        let h = 1usize << level;
        let (lh, hl, hh) = &mut details[level];
        for band in [lh as &mut Vec<f64>, hl, hh] {
            for c in band.iter_mut() {
                *c = soft_threshold(*c, t);
            }
        }
        approx = synthesize(&approx, &details[level].0, &details[level].1, &details[level].2, n, h);
    }

    Ok(Image::from_raw(n, approx))
}

#[cfg(test)]
mod tests {
    use super::super::tests::random_image;
    use super::*;
    use crate::error::Error;

    #[test]
    fn threshold_zero_is_identity() {
        let img = random_image(16, 7);
        let out = ti_haar_filter(
            &img,
            &TiHaarParams {
                threshold: 0.0,
                levels: 4,
            },
        )
        .unwrap();
        for (a, b) in img.samples().iter().zip(out.samples()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_is_unchanged_for_any_threshold() {
        let img = Image::constant(16, 0.42).unwrap();
        for t in [0.0, 0.1, 10.0] {
            let out = ti_haar_filter(&img, &TiHaarParams { threshold: t, levels: 4 }).unwrap();
            for &v in out.samples() {
                assert!((v - 0.42).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_non_power_of_two() {
        let img = random_image(12, 3);
        assert!(matches!(
            ti_haar_filter(&img, &TiHaarParams { threshold: 0.1, levels: 2 }),
            Err(Error::NotPowerOfTwo { n: 12 })
        ));
    }

    // ----- cycle-spinning oracle -----

    /// Decimated orthonormal 2D Haar DWT, `levels` deep, on the top-left
    /// approx block at each stage.
    fn dwt2(data: &mut [f64], n: usize, levels: usize) {
        let mut size = n;
        for _ in 0..levels {
            // Rows.
            for i in 0..size {
                let mut row = vec![0.0; size];
                for j in 0..size / 2 {
                    let a = data[i * n + 2 * j];
                    let b = data[i * n + 2 * j + 1];
                    row[j] = (a + b) * FRAC_1_SQRT_2;
                    row[size / 2 + j] = (a - b) * FRAC_1_SQRT_2;
                }
                for j in 0..size {
                    data[i * n + j] = row[j];
                }
            }
            // Columns.
            for j in 0..size {
                let mut col = vec![0.0; size];
                for i in 0..size / 2 {
                    let a = data[2 * i * n + j];
                    let b = data[(2 * i + 1) * n + j];
                    col[i] = (a + b) * FRAC_1_SQRT_2;
                    col[size / 2 + i] = (a - b) * FRAC_1_SQRT_2;
                }
                for i in 0..size {
                    data[i * n + j] = col[i];
                }
            }
            size /= 2;
        }
    }

    fn idwt2(data: &mut [f64], n: usize, levels: usize) {
        let mut size = n >> levels;
        for _ in 0..levels {
            size *= 2;
            // Columns.
            for j in 0..size {
                let mut col = vec![0.0; size];
                for i in 0..size / 2 {
                    let l = data[i * n + j];
                    let h = data[(size / 2 + i) * n + j];
                    col[2 * i] = (l + h) * FRAC_1_SQRT_2;
                    col[2 * i + 1] = (l - h) * FRAC_1_SQRT_2;
                }
                for i in 0..size {
                    data[i * n + j] = col[i];
                }
            }
            // Rows.
            for i in 0..size {
                let mut row = vec![0.0; size];
                for j in 0..size / 2 {
                    let l = data[i * n + j];
                    let h = data[i * n + size / 2 + j];
                    row[2 * j] = (l + h) * FRAC_1_SQRT_2;
                    row[2 * j + 1] = (l - h) * FRAC_1_SQRT_2;
                }
                for j in 0..size {
                    data[i * n + j] = row[j];
                }
            }
        }
    }

    fn shift2(src: &[f64], n: usize, si: usize, sj: usize) -> Vec<f64> {
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = src[((i + si) % n) * n + (j + sj) % n];
            }
        }
        out
    }

    /// Full cycle spinning over all 2^levels × 2^levels circular shifts of
    /// the decimated transform, averaged in row-major shift order.
    fn cycle_spin_oracle(img: &Image, levels: usize, t: f64) -> Vec<f64> {
        let n = img.n();
        let shifts = 1usize << levels;
        let approx = n >> levels;
        let mut acc = vec![0.0; n * n];
        for si in 0..shifts {
            for sj in 0..shifts {
                let mut data = shift2(img.samples(), n, si, sj);
                dwt2(&mut data, n, levels);
                for i in 0..n {
                    for j in 0..n {
                        if i < approx && j < approx {
                            continue; // final approximation band untouched
                        }
                        data[i * n + j] = soft_threshold(data[i * n + j], t);
                    }
                }
                idwt2(&mut data, n, levels);
                let unshifted = shift2(&data, n, n - si, n - sj);
                for (a, v) in acc.iter_mut().zip(&unshifted) {
                    *a += v;
                }
            }
        }
        let scale = 1.0 / (shifts * shifts) as f64;
        acc.iter().map(|v| v * scale).collect()
    }

    #[test]
    fn matches_full_cycle_spinning() {
        for (n, levels) in [(8usize, 1usize), (8, 2), (16, 2)] {
            let img = random_image(n, 1234 + (n + levels) as u64);
            for t in [0.0, 0.05, 0.3] {
                let fast = ti_haar_filter(&img, &TiHaarParams { threshold: t, levels }).unwrap();
                let slow = cycle_spin_oracle(&img, levels, t);
                for (a, b) in fast.samples().iter().zip(&slow) {
                    assert!(
                        (a - b).abs() < 1e-10,
                        "n={n} levels={levels} t={t}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn thresholding_reduces_energy_of_details() {
        let img = random_image(16, 42);
        let gentle = ti_haar_filter(&img, &TiHaarParams { threshold: 0.05, levels: 3 }).unwrap();
        let harsh = ti_haar_filter(&img, &TiHaarParams { threshold: 5.0, levels: 3 }).unwrap();
        // A harsh threshold leaves little more than the approximation band.
        let var = |im: &Image| {
            let mu = im.mean();
            im.samples().iter().map(|v| (v - mu) * (v - mu)).sum::<f64>()
        };
        assert!(var(&harsh) < var(&gentle));
        assert!(var(&gentle) < var(&img));
    }
}
