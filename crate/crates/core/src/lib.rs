//! Image reconstruction from partial Fourier samples by alternating
//! projections.
//!
//! The pipeline: rasterize an analytic phantom, sample its spectrum along
//! radial lines, then alternate a nonlinear denoising filter (the prior
//! projection, with a decaying strength parameter) against the
//! data-consistency projection that re-imposes the observed coefficients.
//! With a suitable schedule the Shepp-Logan phantom is recovered from 22
//! radial lines to better than 48 dB PSNR.
//!
//! Modules:
//! - [`grid`]: images, spectra, norms, MSE/PSNR.
//! - [`phantom`]: analytic ellipse phantoms and rasterization.
//! - [`fourier`]: DFT pair, radial masks, measurement, data projection.
//! - [`filters`]: the four prior projections and the annealing schedule.
//! - [`recon`]: the alternating-projection loop and its CSV trace.
//! - [`io`]: exact binary containers and PGM export.

pub mod error;
pub mod filters;
pub mod fourier;
pub mod grid;
pub mod io;
pub mod phantom;
pub mod recon;

pub use error::{Error, Result};
pub use filters::{
    anneal_value, apply_filter, block_dct_filter, conductance, gaussian_blur, pm_step,
    regdiff_step, soft_threshold, ti_haar_filter, AnnealSchedule, BlockDctParams,
    ConductanceKind, FilterParams, FilterSpec, PmParams, RegDiffParams, TiHaarParams,
};
pub use fourier::{
    back_projection_init, data_projection, dft2, idft2, measure, radial_mask, Observation,
    SamplingMask,
};
pub use grid::{l2_norm, mse, psnr, Image, QualityReport, Spectrum};
pub use phantom::{modified_shepp_logan_spec, rasterize, Ellipse, PhantomSpec};
pub use recon::{
    reconstruct, reconstruct_observed, trace_to_csv, ReconConfig, ReconResult, TraceRow,
};
