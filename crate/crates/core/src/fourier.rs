//! 2D DFT, radial-line sampling masks, the measurement operator and the
//! data-consistency projection.
//!
//! Convention: unnormalized forward transform
//! `F(m,k) = Σ f(x,y)·exp(−2πi(mx+ky)/n)` with DC at (0,0), inverse scaled by
//! 1/n² followed by discarding imaginary parts (the iterates are real
//! images). Because every transformed signal here is real, `dft2` enforces
//! exact Hermitian symmetry on its output; the adjustment is at the
//! last-ulp level and keeps downstream conjugate-symmetry invariants exact
//! rather than merely approximate.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{Image, Spectrum};

/// n×n boolean sampling pattern over DFT indices, DC at (0,0).
///
/// Always conjugate-symmetric and always samples DC.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingMask {
    n: usize,
    flags: Vec<bool>,
}

impl SamplingMask {
    pub fn new(n: usize, flags: Vec<bool>) -> Result<Self> {
        if n == 0 {
            return Err(Error::GridTooSmall { n, min: 1 });
        }
        if flags.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                got: flags.len(),
            });
        }
        if !flags[0] {
            return Err(Error::param("flags", "DC must be sampled"));
        }
        for m in 0..n {
            for k in 0..n {
                let mirror = ((n - m) % n) * n + ((n - k) % n);
                if flags[m * n + k] != flags[mirror] {
                    return Err(Error::AsymmetricMask { m, k });
                }
            }
        }
        Ok(Self { n, flags })
    }

    /// Every coefficient sampled.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(n, vec![true; n * n])
    }

    /// Only the DC coefficient sampled.
    pub fn dc_only(n: usize) -> Result<Self> {
        let mut flags = vec![false; n * n];
        flags[0] = true;
        Self::new(n, flags)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn is_sampled(&self, m: usize, k: usize) -> bool {
        self.flags[m * self.n + k]
    }

    pub fn count_sampled(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    pub fn sampled_fraction(&self) -> f64 {
        self.count_sampled() as f64 / (self.n * self.n) as f64
    }
}

/// Partial Fourier measurements: a mask plus coefficient values that are
/// exactly zero off the mask and conjugate-symmetric on it.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    mask: SamplingMask,
    values: Spectrum,
}

impl Observation {
    pub fn new(mask: SamplingMask, values: Spectrum) -> Result<Self> {
        let n = mask.n();
        if values.n() != n {
            return Err(Error::DimensionMismatch {
                left: values.n(),
                right: n,
            });
        }
        let coeffs = values.coeffs();
        for m in 0..n {
            for k in 0..n {
                let idx = m * n + k;
                if !mask.flags()[idx] {
                    if coeffs[idx] != Complex64::new(0.0, 0.0) {
                        return Err(Error::OffMaskValue { m, k });
                    }
                    continue;
                }
                let mirror = ((n - m) % n) * n + ((n - k) % n);
                if coeffs[idx] != coeffs[mirror].conj() {
                    return Err(Error::AsymmetricObservation { m, k });
                }
            }
        }
        Ok(Self { mask, values })
    }

    pub(crate) fn from_raw(mask: SamplingMask, values: Spectrum) -> Self {
        debug_assert_eq!(mask.n(), values.n());
        Self { mask, values }
    }

    pub fn n(&self) -> usize {
        self.mask.n()
    }

    pub fn mask(&self) -> &SamplingMask {
        &self.mask
    }

    pub fn values(&self) -> &Spectrum {
        &self.values
    }
}

static FFT_PLANS: Lazy<Mutex<HashMap<(usize, bool), Arc<dyn Fft<f64>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

fn fft_plan(n: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    let key = (n, direction == FftDirection::Forward);
    let mut plans = FFT_PLANS.lock().unwrap();
    plans
        .entry(key)
        .or_insert_with(|| FftPlanner::new().plan_fft(n, direction))
        .clone()
}

fn transpose_in_place(data: &mut [Complex64], n: usize) {
    for m in 0..n {
        for k in (m + 1)..n {
            data.swap(m * n + k, k * n + m);
        }
    }
}

/// Row-column 2D FFT, in place, unnormalized.
fn fft2_in_place(data: &mut [Complex64], n: usize, direction: FftDirection) {
    let fft = fft_plan(n, direction);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
    for row in data.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose_in_place(data, n);
    for row in data.chunks_exact_mut(n) {
        fft.process_with_scratch(row, &mut scratch);
    }
    transpose_in_place(data, n);
}

/// Pins F(−m,−k) = conj(F(m,k)) exactly: conjugate pairs are averaged and
/// self-conjugate bins lose their (rounding-level) imaginary part.
fn hermitian_symmetrize(data: &mut [Complex64], n: usize) {
    for m in 0..n {
        for k in 0..n {
            let idx = m * n + k;
            let mirror = ((n - m) % n) * n + ((n - k) % n);
            if mirror == idx {
                data[idx].im = 0.0;
            } else if idx < mirror {
                let avg = (data[idx] + data[mirror].conj()) * 0.5;
                data[idx] = avg;
                data[mirror] = avg.conj();
            }
        }
    }
}

/// Unnormalized forward 2D DFT of a real image, Hermitian-exact.
pub fn dft2(img: &Image) -> Spectrum {
    let n = img.n();
    let mut data: Vec<Complex64> = img
        .samples()
        .iter()
        .map(|&v| Complex64::new(v, 0.0))
        .collect();
    fft2_in_place(&mut data, n, FftDirection::Forward);
    hermitian_symmetrize(&mut data, n);
    Spectrum::from_raw(n, data)
}

/// Inverse 2D DFT with 1/n² normalization; imaginary parts are discarded.
pub fn idft2(spec: &Spectrum) -> Image {
    let n = spec.n();
    let mut data = spec.coeffs().to_vec();
    fft2_in_place(&mut data, n, FftDirection::Inverse);
    let scale = 1.0 / (n * n) as f64;
    let samples = data.iter().map(|c| c.re * scale).collect();
    Image::from_raw(n, samples)
}

/// Radial-line sampling pattern: `lines` lines through DC at angles
/// θ_ℓ = π·ℓ/lines, rasterized by rounding polar samples at integer radii
/// −n/2..n/2−1 (half away from zero), then conjugate-symmetrized.
pub fn radial_mask(n: usize, lines: usize) -> Result<SamplingMask> {
    if n < 2 {
        return Err(Error::GridTooSmall { n, min: 2 });
    }
    if n % 2 != 0 {
        return Err(Error::OddGrid { n });
    }
    if lines == 0 {
        return Err(Error::param("lines", "need at least one radial line"));
    }
    let half = (n / 2) as i64;
    let mut flags = vec![false; n * n];
    for line in 0..lines {
        let theta = PI * line as f64 / lines as f64;
        let (sin_t, cos_t) = theta.sin_cos();
        for r in -half..half {
            let rf = r as f64;
            let m = (rf * cos_t).round() as i64;
            let k = (rf * sin_t).round() as i64;
            let mi = m.rem_euclid(n as i64) as usize;
            let ki = k.rem_euclid(n as i64) as usize;
            flags[mi * n + ki] = true;
        }
    }
    let mut symmetrized = flags.clone();
    for m in 0..n {
        for k in 0..n {
            if flags[m * n + k] {
                symmetrized[((n - m) % n) * n + ((n - k) % n)] = true;
            }
        }
    }
    symmetrized[0] = true;
    SamplingMask::new(n, symmetrized)
}

/// Takes the image's DFT restricted to the mask (zero elsewhere).
pub fn measure(img: &Image, mask: &SamplingMask) -> Result<Observation> {
    let n = img.n();
    if n != mask.n() {
        return Err(Error::DimensionMismatch {
            left: n,
            right: mask.n(),
        });
    }
    let full = dft2(img);
    let coeffs = full
        .coeffs()
        .iter()
        .zip(mask.flags())
        .map(|(&c, &keep)| if keep { c } else { Complex64::new(0.0, 0.0) })
        .collect();
    Ok(Observation::from_raw(mask.clone(), Spectrum::from_raw(n, coeffs)))
}

/// Overwrites the masked coefficients with the observed values (bit-exact
/// copy); everything off the mask passes through untouched.
pub fn data_projection(spec: &Spectrum, obs: &Observation) -> Result<Spectrum> {
    let n = spec.n();
    if n != obs.n() {
        return Err(Error::DimensionMismatch {
            left: n,
            right: obs.n(),
        });
    }
    let mut out = spec.coeffs().to_vec();
    let observed = obs.values().coeffs();
    for (idx, &keep) in obs.mask().flags().iter().enumerate() {
        if keep {
            out[idx] = observed[idx];
        }
    }
    Ok(Spectrum::from_raw(n, out))
}

/// Minimum-energy data-consistent image: inverse transform of the
/// zero-filled observed spectrum.
pub fn back_projection_init(obs: &Observation) -> Image {
    idft2(obs.values())
}
