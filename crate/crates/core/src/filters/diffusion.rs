//! Explicit 4-neighbor nonlinear diffusion steps and the separable Gaussian
//! blur backing the regularized variant.
//!
//! One step: u ← u + dt·Σ_d g(|∇_d v|)·∇_d u over d ∈ {N,S,E,W}, where
//! ∇_d is the forward difference toward neighbor d and v is either u itself
//! (Perona-Malik) or a Gaussian-presmoothed copy (regularized diffusion).
//! Mirror boundaries make out-of-range differences exactly zero, so the
//! scheme conserves the image mean: edge fluxes cancel pairwise because the
//! conductance on an edge is the same from both sides.

use crate::grid::Image;

use super::{conductance, ConductanceKind, PmParams, RegDiffParams};

/// Neighbor offsets (di, dj) for N, S, W, E.
const NEIGHBORS: [(isize, isize); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

fn diffuse_once(
    u: &[f64],
    guide: &[f64],
    n: usize,
    edge_scale_k: f64,
    time_step: f64,
    kind: ConductanceKind,
) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let idx = i * n + j;
            let center = u[idx];
            let guide_center = guide[idx];
            let mut acc = 0.0;
            for (di, dj) in NEIGHBORS {
                let ni = i as isize + di;
                let nj = j as isize + dj;
                if ni < 0 || nj < 0 || ni >= n as isize || nj >= n as isize {
                    continue; // mirrored neighbor equals the pixel: zero flux
                }
                let nidx = (ni as usize) * n + nj as usize;
                let grad = u[nidx] - center;
                let guide_grad = guide[nidx] - guide_center;
                acc += conductance(guide_grad.abs(), edge_scale_k, kind) * grad;
            }
            out[idx] = center + time_step * acc;
        }
    }
    out
}

/// Perona-Malik diffusion: `steps_per_projection` explicit steps where the
/// conductance sees the evolving image itself.
pub fn pm_step(img: &Image, params: &PmParams) -> Image {
    let n = img.n();
    let mut u = img.samples().to_vec();
    for _ in 0..params.steps_per_projection {
        u = diffuse_once(
            &u,
            &u,
            n,
            params.edge_scale_k,
            params.time_step,
            params.conductance,
        );
    }
    Image::from_raw(n, u)
}

/// Regularized diffusion: identical stencil, but the conductance arguments
/// come from a Gaussian-presmoothed copy of the current image. Fluxes still
/// use the unsmoothed differences. Rational conductance.
pub fn regdiff_step(img: &Image, params: &RegDiffParams) -> Image {
    let n = img.n();
    let mut u = img.samples().to_vec();
    for _ in 0..params.steps_per_projection {
        let guide = blur_samples(&u, n, params.presmooth_sigma);
        u = diffuse_once(
            &u,
            &guide,
            n,
            params.edge_scale_k,
            params.time_step,
            ConductanceKind::Rational,
        );
    }
    Image::from_raw(n, u)
}

/// Sampled Gaussian taps at offsets −r..=r, r = ceil(3σ), normalized to sum 1.
fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil() as i64;
    let inv = 1.0 / (2.0 * sigma * sigma);
    let mut kernel: Vec<f64> = (-radius..=radius)
        .map(|t| (-(t * t) as f64 * inv).exp())
        .collect();
    let sum: f64 = kernel.iter().sum();
    for w in &mut kernel {
        *w /= sum;
    }
    kernel
}

/// Half-sample mirror: ..., u[1], u[0] | u[0], u[1], ...
fn reflect(mut idx: isize, n: usize) -> usize {
    let n = n as isize;
    loop {
        if idx < 0 {
            idx = -idx - 1;
        } else if idx >= n {
            idx = 2 * n - 1 - idx;
        } else {
            return idx as usize;
        }
    }
}

fn blur_samples(samples: &[f64], n: usize, sigma: f64) -> Vec<f64> {
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() / 2) as isize;

    // Rows.
    let mut tmp = vec![0.0; n * n];
    for i in 0..n {
        let row = &samples[i * n..(i + 1) * n];
        for j in 0..n {
            let mut acc = 0.0;
            for (t, &w) in kernel.iter().enumerate() {
                let src = reflect(j as isize + t as isize - radius, n);
                acc += w * row[src];
            }
            tmp[i * n + j] = acc;
        }
    }
    // Columns.
    let mut out = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            let mut acc = 0.0;
            for (t, &w) in kernel.iter().enumerate() {
                let src = reflect(i as isize + t as isize - radius, n);
                acc += w * tmp[src * n + j];
            }
            out[i * n + j] = acc;
        }
    }
    out
}

/// Separable Gaussian blur with truncated sampled kernel and mirror
/// boundaries. Requires sigma > 0.
pub fn gaussian_blur(img: &Image, sigma: f64) -> Image {
    assert!(sigma > 0.0, "gaussian_blur needs sigma > 0");
    Image::from_raw(img.n(), blur_samples(img.samples(), img.n(), sigma))
}
