//! Sliding block-DCT soft-thresholding with wrap-around tiling.
//!
//! Every block origin on the stride lattice gets an orthonormal type-II DCT,
//! soft shrinkage of all coefficients except the block DC, and an inverse
//! transform; overlapping estimates are averaged with equal weights in
//! row-major origin order.

use std::f64::consts::PI;

use crate::grid::Image;

use super::{soft_threshold, BlockDctParams};

/// Orthonormal DCT-II basis matrix, row-major: basis[u*b + x].
fn dct_basis(b: usize) -> Vec<f64> {
    let mut m = vec![0.0; b * b];
    let norm0 = (1.0 / b as f64).sqrt();
    let norm = (2.0 / b as f64).sqrt();
    for u in 0..b {
        let alpha = if u == 0 { norm0 } else { norm };
        for x in 0..b {
            m[u * b + x] = alpha * (PI * (2 * x + 1) as f64 * u as f64 / (2 * b) as f64).cos();
        }
    }
    m
}

/// C = M·P·Mᵀ (forward when M is the DCT basis).
fn transform(block: &[f64], basis: &[f64], b: usize, out: &mut [f64], tmp: &mut [f64]) {
    // tmp = M·P
    for u in 0..b {
        for x in 0..b {
            let mut acc = 0.0;
            for t in 0..b {
                acc += basis[u * b + t] * block[t * b + x];
            }
            tmp[u * b + x] = acc;
        }
    }
    // out = tmp·Mᵀ
    for u in 0..b {
        for v in 0..b {
            let mut acc = 0.0;
            for t in 0..b {
                acc += tmp[u * b + t] * basis[v * b + t];
            }
            out[u * b + v] = acc;
        }
    }
}

/// P = Mᵀ·C·M (inverse of `transform`).
fn inverse_transform(coeffs: &[f64], basis: &[f64], b: usize, out: &mut [f64], tmp: &mut [f64]) {
    // tmp = Mᵀ·C
    for x in 0..b {
        for v in 0..b {
            let mut acc = 0.0;
            for t in 0..b {
                acc += basis[t * b + x] * coeffs[t * b + v];
            }
            tmp[x * b + v] = acc;
        }
    }
    // out = tmp·M
    for x in 0..b {
        for y in 0..b {
            let mut acc = 0.0;
            for t in 0..b {
                acc += tmp[x * b + t] * basis[t * b + y];
            }
            out[x * b + y] = acc;
        }
    }
}

/// Sliding block-DCT shrinkage. Valid params assumed (see
/// [`BlockDctParams::validate_for`]); callers go through `apply_filter`.
pub fn block_dct_filter(img: &Image, params: &BlockDctParams) -> Image {
    let n = img.n();
    let b = params.block.min(n);
    let step = params.step.min(b);
    let t = params.threshold;
    let basis = dct_basis(b);
    let samples = img.samples();

    let mut acc = vec![0.0; n * n];
    let mut weight = vec![0.0f64; n * n];
    let mut patch = vec![0.0; b * b];
    let mut coeffs = vec![0.0; b * b];
    let mut est = vec![0.0; b * b];
    let mut tmp = vec![0.0; b * b];

    let origins: Vec<usize> = (0..n).step_by(step).collect();
    for &r0 in &origins {
        for &c0 in &origins {
            for bi in 0..b {
                let src = ((r0 + bi) % n) * n;
                for bj in 0..b {
                    patch[bi * b + bj] = samples[src + (c0 + bj) % n];
                }
            }
            transform(&patch, &basis, b, &mut coeffs, &mut tmp);
            for (idx, c) in coeffs.iter_mut().enumerate() {
                if idx != 0 {
                    *c = soft_threshold(*c, t);
                }
            }
            inverse_transform(&coeffs, &basis, b, &mut est, &mut tmp);
            for bi in 0..b {
                let dst = ((r0 + bi) % n) * n;
                for bj in 0..b {
                    let at = dst + (c0 + bj) % n;
                    acc[at] += est[bi * b + bj];
                    weight[at] += 1.0;
                }
            }
        }
    }

    let out = acc
        .iter()
        .zip(&weight)
        .map(|(a, w)| a / w)
        .collect();
    Image::from_raw(n, out)
}

#[cfg(test)]
mod tests {
    use super::super::tests::random_image;
    use super::*;

    #[test]
    fn threshold_zero_is_identity() {
        let img = random_image(16, 5);
        let out = block_dct_filter(
            &img,
            &BlockDctParams {
                threshold: 0.0,
                block: 8,
                step: 4,
            },
        );
        for (a, b) in img.samples().iter().zip(out.samples()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_is_unchanged() {
        let img = Image::constant(16, 0.83).unwrap();
        for t in [0.0, 0.4, 7.0] {
            let out = block_dct_filter(
                &img,
                &BlockDctParams {
                    threshold: t,
                    block: 8,
                    step: 3,
                },
            );
            for &v in out.samples() {
                assert!((v - 0.83).abs() < 1e-10);
            }
        }
    }

    /// Direct coefficient-by-coefficient DCT evaluation from the definition.
    fn dct2_direct(block: &[f64], b: usize) -> Vec<f64> {
        let mut out = vec![0.0; b * b];
        for u in 0..b {
            for v in 0..b {
                let mut acc = 0.0;
                for x in 0..b {
                    for y in 0..b {
                        acc += block[x * b + y]
                            * (PI * (2 * x + 1) as f64 * u as f64 / (2 * b) as f64).cos()
                            * (PI * (2 * y + 1) as f64 * v as f64 / (2 * b) as f64).cos();
                    }
                }
                let au = if u == 0 { (1.0 / b as f64).sqrt() } else { (2.0 / b as f64).sqrt() };
                let av = if v == 0 { (1.0 / b as f64).sqrt() } else { (2.0 / b as f64).sqrt() };
                out[u * b + v] = au * av * acc;
            }
        }
        out
    }

    #[test]
    fn single_block_shrinks_one_coefficient() {
        // Build an 8×8 image from a single mid-frequency coefficient.
        let b = 8;
        let amplitude = 0.9;
        let threshold = 0.25;
        let basis = dct_basis(b);
        let mut coeffs = vec![0.0; b * b];
        coeffs[2 * b + 3] = amplitude;
        let mut samples = vec![0.0; b * b];
        let mut tmp = vec![0.0; b * b];
        inverse_transform(&coeffs, &basis, b, &mut samples, &mut tmp);
        let img = Image::new(b, samples).unwrap();

        let out = block_dct_filter(
            &img,
            &BlockDctParams {
                threshold,
                block: b,
                step: b,
            },
        );

        // The direct oracle sees exactly one coefficient, shrunk by t.
        let observed = dct2_direct(out.samples(), b);
        for u in 0..b {
            for v in 0..b {
                let expected = if (u, v) == (2, 3) { amplitude - threshold } else { 0.0 };
                assert!(
                    (observed[u * b + v] - expected).abs() < 1e-10,
                    "coeff ({u},{v}): {} vs {expected}",
                    observed[u * b + v]
                );
            }
        }
    }

    #[test]
    fn forward_matches_direct_oracle() {
        let b = 8;
        let img = random_image(b, 61);
        let basis = dct_basis(b);
        let mut coeffs = vec![0.0; b * b];
        let mut tmp = vec![0.0; b * b];
        transform(img.samples(), &basis, b, &mut coeffs, &mut tmp);
        let direct = dct2_direct(img.samples(), b);
        for (a, d) in coeffs.iter().zip(&direct) {
            assert!((a - d).abs() < 1e-12);
        }
    }

    #[test]
    fn uneven_strides_still_average_to_full_coverage() {
        // step 3 does not divide 16; per-pixel weights differ but every
        // pixel is covered and threshold 0 stays the identity.
        let img = random_image(16, 33);
        let out = block_dct_filter(
            &img,
            &BlockDctParams {
                threshold: 0.0,
                block: 8,
                step: 3,
            },
        );
        for (a, b) in img.samples().iter().zip(out.samples()) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
