//! The alternating-projection reconstruction loop.
//!
//! Starting from the back-projection initializer, each iteration applies the
//! chosen nonlinear filter (prior projection, with its annealed parameter)
//! and then overwrites the sampled Fourier coefficients with the
//! observation (data projection). The loop always ends on a data
//! projection, so the returned spectrum equals the observation bit-exactly
//! on the mask.

use crate::error::{Error, Result};
use crate::filters::{anneal_value, apply_filter, FilterSpec};
use crate::fourier::{back_projection_init, data_projection, dft2, idft2, Observation};
use crate::grid::{psnr, Image, Spectrum};

/// Loop configuration. `trace_reference` enables PSNR tracing (and the
/// optional `stop_psnr_db` early stop, which is off by default).
#[derive(Debug, Clone)]
pub struct ReconConfig {
    pub k_max: usize,
    pub filter: FilterSpec,
    pub trace_reference: Option<Image>,
    pub stop_psnr_db: Option<f64>,
}

impl ReconConfig {
    pub fn new(k_max: usize, filter: FilterSpec) -> Self {
        Self {
            k_max,
            filter,
            trace_reference: None,
            stop_psnr_db: None,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.k_max == 0 {
            return Err(Error::param("k_max", "must be at least 1"));
        }
        self.filter.validate_for(n)?;
        if let Some(reference) = &self.trace_reference {
            if reference.n() != n {
                return Err(Error::DimensionMismatch {
                    left: reference.n(),
                    right: n,
                });
            }
        }
        Ok(())
    }
}

/// Per-iteration record: PSNR of the post-projection iterate (when a
/// reference is available), the pre-projection data residual on the mask,
/// and the annealed parameter value used at k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub k: usize,
    pub psnr_db: Option<f64>,
    pub data_residual: f64,
    pub param_value: f64,
}

/// Final iterate plus its defining spectrum and the full trace.
#[derive(Debug, Clone)]
pub struct ReconResult {
    pub image: Image,
    /// Post-projection spectrum of the final iterate; equals the
    /// observation bit-exactly on the mask.
    pub spectrum: Spectrum,
    pub trace: Vec<TraceRow>,
    pub iterations_run: usize,
}

/// l2 distance between a spectrum and the observed values, on the mask.
fn masked_residual(spec: &Spectrum, obs: &Observation) -> f64 {
    let observed = obs.values().coeffs();
    let mut sum = 0.0;
    for (idx, &keep) in obs.mask().flags().iter().enumerate() {
        if keep {
            sum += (spec.coeffs()[idx] - observed[idx]).norm_sqr();
        }
    }
    sum.sqrt()
}

fn check_finite(img: &Image, iteration: usize) -> Result<()> {
    if img.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { iteration })
    }
}

/// Runs the loop, invoking `on_row` after each completed iteration.
pub fn reconstruct_observed(
    obs: &Observation,
    cfg: &ReconConfig,
    mut on_row: impl FnMut(&TraceRow),
) -> Result<ReconResult> {
    cfg.validate(obs.n())?;

    let mut iterate = back_projection_init(obs);
    check_finite(&iterate, 0)?;
    // The initializer is itself a data projection of the zero spectrum, so
    // it is a valid output if the loop body never runs (it always does:
    // k_max >= 1).
    let mut spectrum = obs.values().clone();
    let mut trace = Vec::new();

    for k in 0..cfg.k_max {
        let filtered = apply_filter(&iterate, &cfg.filter, k)?;
        check_finite(&filtered, k)?;

        let filtered_spectrum = dft2(&filtered);
        let data_residual = masked_residual(&filtered_spectrum, obs);

        spectrum = data_projection(&filtered_spectrum, obs)?;
        iterate = idft2(&spectrum);
        check_finite(&iterate, k)?;

        let psnr_db = match &cfg.trace_reference {
            Some(reference) => Some(psnr(reference, &iterate)?.psnr_db),
            None => None,
        };
        let row = TraceRow {
            k,
            psnr_db,
            data_residual,
            param_value: anneal_value(&cfg.filter.schedule, k),
        };
        on_row(&row);
        trace.push(row);

        if let (Some(target), Some(current)) = (cfg.stop_psnr_db, psnr_db) {
            if current >= target {
                break;
            }
        }
    }

    let iterations_run = trace.len();
    Ok(ReconResult {
        image: iterate,
        spectrum,
        trace,
        iterations_run,
    })
}

/// Alternating-projection reconstruction from a partial Fourier observation.
pub fn reconstruct(obs: &Observation, cfg: &ReconConfig) -> Result<ReconResult> {
    reconstruct_observed(obs, cfg, |_| {})
}

/// Serializes the trace: header plus one row per iteration, infinite PSNR
/// as "inf", missing PSNR as an empty field, shortest round-trip decimals.
pub fn trace_to_csv(result: &ReconResult) -> String {
    let mut out = String::from("k,psnr_db,data_residual,param_value\n");
    for row in &result.trace {
        let psnr_field = match row.psnr_db {
            None => String::new(),
            Some(v) if v.is_infinite() => "inf".to_string(),
            Some(v) => format!("{v}"),
        };
        out.push_str(&format!(
            "{},{},{},{}\n",
            row.k, psnr_field, row.data_residual, row.param_value
        ));
    }
    out
}
