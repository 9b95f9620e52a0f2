//! Nonlinear filters used as prior-constraint projections, plus the
//! deterministic-annealing schedule that weakens them across iterations.
//!
//! Four interchangeable filters: Perona-Malik diffusion, regularized
//! (presmoothed-gradient) diffusion, translation-invariant Haar
//! soft-thresholding, and sliding block-DCT soft-thresholding. Each is a
//! deterministic map Image → Image; the thresholding filters are
//! nonexpansive by construction (tight frames plus 1-Lipschitz shrinkage).

mod dct;
mod diffusion;
mod haar;

pub use dct::block_dct_filter;
pub use diffusion::{gaussian_blur, pm_step, regdiff_step};
pub use haar::ti_haar_filter;

use crate::error::{Error, Result};
use crate::grid::Image;

/// The two classic edge-stopping conductance functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConductanceKind {
    Rational,
    Exponential,
}

/// g(s; K): 1 at zero gradient, decaying toward 0 across strong edges.
pub fn conductance(s: f64, edge_scale_k: f64, kind: ConductanceKind) -> f64 {
    let r = s / edge_scale_k;
    match kind {
        ConductanceKind::Rational => 1.0 / (1.0 + r * r),
        ConductanceKind::Exponential => (-(r * r)).exp(),
    }
}

/// Shrinkage toward zero by t: sign(x)·max(|x|−t, 0).
pub fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// Perona-Malik explicit step parameters. `edge_scale_k` is the effective
/// (already annealed) conductance scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmParams {
    pub edge_scale_k: f64,
    pub time_step: f64,
    pub conductance: ConductanceKind,
    pub steps_per_projection: usize,
}

impl PmParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.edge_scale_k > 0.0) {
            return Err(Error::param("edge_scale_k", "must be positive"));
        }
        if !(self.time_step > 0.0 && self.time_step <= 0.25) {
            return Err(Error::param("time_step", "must lie in (0, 0.25]"));
        }
        if self.steps_per_projection == 0 {
            return Err(Error::param("steps_per_projection", "must be positive"));
        }
        Ok(())
    }
}

/// Regularized diffusion: the conductance sees a Gaussian-presmoothed copy
/// of the image. Uses the rational conductance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegDiffParams {
    pub edge_scale_k: f64,
    pub time_step: f64,
    pub presmooth_sigma: f64,
    pub steps_per_projection: usize,
}

impl RegDiffParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.edge_scale_k > 0.0) {
            return Err(Error::param("edge_scale_k", "must be positive"));
        }
        if !(self.time_step > 0.0 && self.time_step <= 0.25) {
            return Err(Error::param("time_step", "must lie in (0, 0.25]"));
        }
        if !(self.presmooth_sigma > 0.0) {
            return Err(Error::param("presmooth_sigma", "must be positive"));
        }
        if self.steps_per_projection == 0 {
            return Err(Error::param("steps_per_projection", "must be positive"));
        }
        Ok(())
    }
}

/// Translation-invariant Haar soft-thresholding parameters (soft mode only).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TiHaarParams {
    pub threshold: f64,
    pub levels: usize,
}

impl TiHaarParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold >= 0.0) {
            return Err(Error::param("threshold", "must be nonnegative"));
        }
        if self.levels == 0 {
            return Err(Error::param("levels", "must be positive"));
        }
        Ok(())
    }

    pub fn validate_for(&self, n: usize) -> Result<()> {
        self.validate()?;
        if !n.is_power_of_two() {
            return Err(Error::NotPowerOfTwo { n });
        }
        if (1usize << self.levels) > n {
            return Err(Error::param(
                "levels",
                format!("levels {} exceeds log2({n})", self.levels),
            ));
        }
        Ok(())
    }
}

/// Sliding block-DCT soft-thresholding parameters. The per-block DC
/// coefficient is exempt so constant images are fixed points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockDctParams {
    pub threshold: f64,
    pub block: usize,
    pub step: usize,
}

impl BlockDctParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold >= 0.0) {
            return Err(Error::param("threshold", "must be nonnegative"));
        }
        if self.block == 0 || !self.block.is_power_of_two() {
            return Err(Error::param("block", "must be a power of two"));
        }
        if self.step == 0 || self.step > self.block {
            return Err(Error::param("step", "must lie in 1..=block"));
        }
        Ok(())
    }

    pub fn validate_for(&self, n: usize) -> Result<()> {
        self.validate()?;
        if self.block > n {
            return Err(Error::param(
                "block",
                format!("block {} exceeds image side {n}", self.block),
            ));
        }
        Ok(())
    }
}

/// Geometric decay with a floor: value(k) = max(floor, initial·decay^k).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    pub initial: f64,
    pub decay: f64,
    pub floor: f64,
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial > 0.0) {
            return Err(Error::param("initial", "must be positive"));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::param("decay", "must lie in (0, 1]"));
        }
        if !(self.floor > 0.0 && self.floor <= self.initial) {
            return Err(Error::param("floor", "must lie in (0, initial]"));
        }
        Ok(())
    }

    pub fn constant(value: f64) -> Self {
        Self {
            initial: value,
            decay: 1.0,
            floor: value,
        }
    }
}

/// Annealed parameter value at iteration k.
pub fn anneal_value(schedule: &AnnealSchedule, k: usize) -> f64 {
    let power = schedule.decay.powi(k.min(i32::MAX as usize) as i32);
    (schedule.initial * power).max(schedule.floor)
}

/// Kind-specific parameters for one prior projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterParams {
    PeronaMalik(PmParams),
    RegularizedDiffusion(RegDiffParams),
    TiHaar(TiHaarParams),
    BlockDct(BlockDctParams),
}

impl FilterParams {
    pub fn kind_name(&self) -> &'static str {
        match self {
            FilterParams::PeronaMalik(_) => "pm",
            FilterParams::RegularizedDiffusion(_) => "regdiff",
            FilterParams::TiHaar(_) => "ti_haar",
            FilterParams::BlockDct(_) => "block_dct",
        }
    }
}

/// A prior projection choice: which filter, with which parameters, and how
/// its strength parameter (K or threshold) decays across iterations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub params: FilterParams,
    pub schedule: AnnealSchedule,
}

impl FilterSpec {
    pub fn validate_for(&self, n: usize) -> Result<()> {
        self.schedule.validate()?;
        match &self.params {
            FilterParams::PeronaMalik(p) => p.validate(),
            FilterParams::RegularizedDiffusion(p) => p.validate(),
            FilterParams::TiHaar(p) => p.validate_for(n),
            FilterParams::BlockDct(p) => p.validate_for(n),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        self.params.kind_name()
    }

    /// Kind-specific parameters with the annealed strength substituted in.
    pub fn annealed(&self, k: usize) -> FilterParams {
        let value = anneal_value(&self.schedule, k);
        match self.params {
            FilterParams::PeronaMalik(p) => FilterParams::PeronaMalik(PmParams {
                edge_scale_k: value,
                ..p
            }),
            FilterParams::RegularizedDiffusion(p) => {
                FilterParams::RegularizedDiffusion(RegDiffParams {
                    edge_scale_k: value,
                    ..p
                })
            }
            FilterParams::TiHaar(p) => FilterParams::TiHaar(TiHaarParams {
                threshold: value,
                ..p
            }),
            FilterParams::BlockDct(p) => FilterParams::BlockDct(BlockDctParams {
                threshold: value,
                ..p
            }),
        }
    }

    /// Declared default configuration for Perona-Malik diffusion.
    pub fn pm_defaults() -> Self {
        Self {
            params: FilterParams::PeronaMalik(PmParams {
                edge_scale_k: 0.5,
                time_step: 0.25,
                conductance: ConductanceKind::Rational,
                steps_per_projection: 1,
            }),
            schedule: AnnealSchedule {
                initial: 0.5,
                decay: 0.999,
                floor: 1e-3,
            },
        }
    }

    /// Declared default configuration for regularized diffusion.
    pub fn regdiff_defaults() -> Self {
        Self {
            params: FilterParams::RegularizedDiffusion(RegDiffParams {
                edge_scale_k: 0.5,
                time_step: 0.25,
                presmooth_sigma: 1.0,
                steps_per_projection: 1,
            }),
            schedule: AnnealSchedule {
                initial: 0.5,
                decay: 0.999,
                floor: 1e-3,
            },
        }
    }

    /// Declared default configuration for TI Haar thresholding.
    pub fn ti_haar_defaults() -> Self {
        Self {
            params: FilterParams::TiHaar(TiHaarParams {
                threshold: 0.5,
                levels: 4,
            }),
            schedule: AnnealSchedule {
                initial: 0.5,
                decay: 0.998,
                floor: 1e-5,
            },
        }
    }

    /// Declared default configuration for block-DCT thresholding.
    pub fn block_dct_defaults() -> Self {
        Self {
            params: FilterParams::BlockDct(BlockDctParams {
                threshold: 0.5,
                block: 8,
                step: 4,
            }),
            schedule: AnnealSchedule {
                initial: 0.5,
                decay: 0.998,
                floor: 1e-5,
            },
        }
    }
}

/// One prior projection: dispatches to the chosen filter with its annealed
/// strength parameter evaluated at iteration k.
pub fn apply_filter(img: &Image, spec: &FilterSpec, k: usize) -> Result<Image> {
    spec.validate_for(img.n())?;
    match spec.annealed(k) {
        FilterParams::PeronaMalik(p) => Ok(pm_step(img, &p)),
        FilterParams::RegularizedDiffusion(p) => Ok(regdiff_step(img, &p)),
        FilterParams::TiHaar(p) => ti_haar_filter(img, &p),
        FilterParams::BlockDct(p) => Ok(block_dct_filter(img, &p)),
    }
}
