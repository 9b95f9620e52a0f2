//! Square pixel/frequency grids and the image-quality metrics used by the
//! reconstruction loop.
//!
//! An [`Image`] is an n×n real grid in row-major order; a [`Spectrum`] is the
//! matching complex DFT grid with the DC coefficient at index (0,0). Values
//! are nominally in [0,1] but never clamped here.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};

/// n×n real-valued pixel grid, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    n: usize,
    samples: Vec<f64>,
}

impl Image {
    /// Validates side length, buffer length and finiteness.
    pub fn new(n: usize, samples: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::GridTooSmall { n, min: 1 });
        }
        if samples.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                got: samples.len(),
            });
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(Self { n, samples })
    }

    /// Internal constructor for values produced by already-validated inputs.
    pub(crate) fn from_raw(n: usize, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), n * n);
        Self { n, samples }
    }

    pub fn constant(n: usize, value: f64) -> Result<Self> {
        Self::new(n, vec![value; n * n])
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::constant(n, 0.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.samples[row * self.n + col]
    }

    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / (self.samples.len() as f64)
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|v| v.is_finite())
    }
}

/// n×n complex DFT grid, row-major, DC at (0,0).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    n: usize,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn new(n: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::GridTooSmall { n, min: 1 });
        }
        if coeffs.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                got: coeffs.len(),
            });
        }
        if let Some(index) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFiniteSample { index });
        }
        Ok(Self { n, coeffs })
    }

    pub(crate) fn from_raw(n: usize, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), n * n);
        Self { n, coeffs }
    }

    pub fn zeros(n: usize) -> Result<Self> {
        Self::new(n, vec![Complex64::new(0.0, 0.0); n * n])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn get(&self, m: usize, k: usize) -> Complex64 {
        self.coeffs[m * self.n + k]
    }
}

/// MSE plus PSNR against a fixed peak of 1.0. Exact agreement is reported as
/// `psnr_db == f64::INFINITY`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub mse: f64,
    pub psnr_db: f64,
}

/// Euclidean norm of the sample sequence.
pub fn l2_norm(img: &Image) -> f64 {
    img.samples().iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Mean of squared per-pixel differences.
pub fn mse(a: &Image, b: &Image) -> Result<f64> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    let sum: f64 = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum();
    Ok(sum / (a.samples().len() as f64))
}

/// PSNR with peak 1.0; identical inputs give the infinite sentinel.
pub fn psnr(reference: &Image, candidate: &Image) -> Result<QualityReport> {
    let mse = mse(reference, candidate)?;
    let psnr_db = if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (1.0 / mse).log10()
    };
    Ok(QualityReport { mse, psnr_db })
}
