//! Command implementations shared by the binary and the test suites.

use std::fmt;
use std::path::{Path, PathBuf};

use fpr_core::{
    io, measure, modified_shepp_logan_spec, radial_mask, rasterize, reconstruct_observed, psnr,
    trace_to_csv, Image, Observation, ReconConfig, ReconResult,
};

use crate::config::{ConfigError, RawConfig, ResolvedConfig, RunConfig, resolve};
use crate::plot::psnr_profile_svg;

pub const PHANTOM_PGM: &str = "phantom.pgm";
pub const PHANTOM_FPR: &str = "phantom.fpr";
pub const MASK_FPM: &str = "mask.fpm";
pub const MASK_PGM: &str = "mask.pgm";
pub const OBSERVATION_FPO: &str = "observation.fpo";
pub const RECON_FPR: &str = "recon.fpr";
pub const RECON_PGM: &str = "recon.pgm";
pub const TRACE_CSV: &str = "trace.csv";
pub const PROFILE_SVG: &str = "profile.svg";
pub const SWEEP_CSV: &str = "sweep.csv";

/// PSNR level counted as "perfect reconstruction" in summaries.
pub const PERFECT_RECON_DB: f64 = 48.0;

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Core(fpr_core::Error),
}

impl CliError {
    /// 2 for configuration/usage problems, 3 for runtime divergence,
    /// 1 for I/O and malformed inputs.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(fpr_core::Error::NonFinite { .. }) => 3,
            CliError::Core(fpr_core::Error::Io(_)) | CliError::Core(fpr_core::Error::Format(_)) => 1,
            CliError::Core(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => write!(f, "{e}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<fpr_core::Error> for CliError {
    fn from(e: fpr_core::Error) -> Self {
        CliError::Core(e)
    }
}

/// Writes the modified Shepp-Logan phantom as PGM plus exact container.
pub fn run_phantom(n: usize, out_dir: &Path) -> Result<(), CliError> {
    let img = rasterize(&modified_shepp_logan_spec(), n)?;
    io::write_pgm(&out_dir.join(PHANTOM_PGM), &img)?;
    io::write_image(&out_dir.join(PHANTOM_FPR), &img)?;
    println!(
        "wrote {} and {}",
        out_dir.join(PHANTOM_PGM).display(),
        out_dir.join(PHANTOM_FPR).display()
    );
    Ok(())
}

/// Writes the radial sampling mask as container plus PGM visualization.
pub fn run_mask(n: usize, lines: usize, out_dir: &Path) -> Result<(), CliError> {
    let mask = radial_mask(n, lines)?;
    io::write_mask(&out_dir.join(MASK_FPM), &mask)?;
    let visual = Image::new(
        n,
        mask.flags().iter().map(|&f| if f { 1.0 } else { 0.0 }).collect(),
    )?;
    io::write_pgm(&out_dir.join(MASK_PGM), &visual)?;
    println!(
        "wrote {} ({} of {} coefficients sampled, {:.2}%)",
        out_dir.join(MASK_FPM).display(),
        mask.count_sampled(),
        n * n,
        100.0 * mask.sampled_fraction()
    );
    Ok(())
}

/// Rasterizes, masks and measures; writes the observation plus the inputs
/// needed to reconstruct later (mask and exact phantom reference).
pub fn run_measure(run: &RunConfig, out_dir: &Path) -> Result<(), CliError> {
    let phantom = rasterize(&modified_shepp_logan_spec(), run.n)?;
    let mask = radial_mask(run.n, run.lines)?;
    let obs = measure(&phantom, &mask)?;
    io::write_observation(&out_dir.join(OBSERVATION_FPO), &obs)?;
    io::write_mask(&out_dir.join(MASK_FPM), &mask)?;
    io::write_image(&out_dir.join(PHANTOM_FPR), &phantom)?;
    println!(
        "wrote {} ({} coefficients, {:.2}% of the spectrum)",
        out_dir.join(OBSERVATION_FPO).display(),
        mask.count_sampled(),
        100.0 * mask.sampled_fraction()
    );
    Ok(())
}

/// What a reconstruction run produced, for callers that want to inspect it.
pub struct ReconOutcome {
    pub result: ReconResult,
    pub terminal_psnr_db: Option<f64>,
    pub crossed_48_at: Option<usize>,
}

fn load_inputs(run: &RunConfig) -> Result<(Observation, Option<Image>), CliError> {
    match &run.input_observation {
        Some(path) => {
            let obs = io::read_observation(path)?;
            if obs.n() != run.n {
                return Err(CliError::Config(ConfigError::single(format!(
                    "input.observation: grid side {} does not match run.n = {}",
                    obs.n(),
                    run.n
                ))));
            }
            let reference = match &run.input_reference {
                Some(p) => {
                    let img = io::read_image(p)?;
                    if img.n() != run.n {
                        return Err(CliError::Config(ConfigError::single(format!(
                            "input.reference: grid side {} does not match run.n = {}",
                            img.n(),
                            run.n
                        ))));
                    }
                    Some(img)
                }
                None => None,
            };
            Ok((obs, reference))
        }
        None => {
            let phantom = rasterize(&modified_shepp_logan_spec(), run.n)?;
            let mask = radial_mask(run.n, run.lines)?;
            let obs = measure(&phantom, &mask)?;
            Ok((obs, Some(phantom)))
        }
    }
}

/// Runs the alternating-projection loop and writes the configured exports.
pub fn run_reconstruct(run: &RunConfig, out_dir: &Path, quiet: bool) -> Result<ReconOutcome, CliError> {
    let (obs, reference) = load_inputs(run)?;

    let cfg = ReconConfig {
        k_max: run.k_max,
        filter: run.filter,
        trace_reference: reference,
        stop_psnr_db: run.stop_psnr_db,
    };

    let mut result = reconstruct_observed(&obs, &cfg, |row| {
        if !quiet && (row.k + 1) % 500 == 0 {
            match row.psnr_db {
                Some(v) => eprintln!(
                    "k={} psnr_db={v:.3} residual={:.3e} param={:.6}",
                    row.k, row.data_residual, row.param_value
                ),
                None => eprintln!(
                    "k={} residual={:.3e} param={:.6}",
                    row.k, row.data_residual, row.param_value
                ),
            }
        }
    })?;

    if run.export_image {
        io::write_image(&out_dir.join(RECON_FPR), &result.image)?;
        io::write_pgm(&out_dir.join(RECON_PGM), &result.image)?;
    }
    if run.export_trace {
        io::write_atomic(&out_dir.join(TRACE_CSV), trace_to_csv(&result).as_bytes())?;
    }
    if run.export_plot {
        io::write_atomic(
            &out_dir.join(PROFILE_SVG),
            psnr_profile_svg(&result.trace).as_bytes(),
        )?;
    }
    if run.export_mask {
        io::write_mask(&out_dir.join(MASK_FPM), obs.mask())?;
    }
    if run.export_observation {
        io::write_observation(&out_dir.join(OBSERVATION_FPO), &obs)?;
    }

    // Guard against any drift between the loop and its trace.
    if let Some(reference) = &cfg.trace_reference {
        let check = psnr(reference, &result.image)?;
        if let Some(last) = result.trace.last_mut() {
            debug_assert_eq!(last.psnr_db, Some(check.psnr_db));
        }
    }

    let terminal_psnr_db = result.trace.last().and_then(|r| r.psnr_db);
    let crossed_48_at = result
        .trace
        .iter()
        .find(|r| r.psnr_db.is_some_and(|v| v >= PERFECT_RECON_DB))
        .map(|r| r.k);

    if !quiet {
        match terminal_psnr_db {
            Some(v) => println!(
                "terminal psnr_db = {v:.3} after {} iterations{}",
                result.iterations_run,
                match crossed_48_at {
                    Some(k) => format!(" (first ≥ {PERFECT_RECON_DB} dB at k={k})"),
                    None => String::new(),
                }
            ),
            None => println!(
                "finished after {} iterations (no reference, PSNR not tracked)",
                result.iterations_run
            ),
        }
    }

    Ok(ReconOutcome {
        result,
        terminal_psnr_db,
        crossed_48_at,
    })
}

fn csv_safe(text: &str) -> String {
    text.replace(['\n', '\r'], " ").replace(',', ";")
}

/// Expands the sweep grid, reconstructs each cell sequentially (no per-cell
/// file exports) and writes one summary row per cell.
pub fn run_sweep(rc: &ResolvedConfig, out_dir: &Path) -> Result<(), CliError> {
    let cells = rc.sweep_cell_count();
    let axes = &rc.sweep_axes;

    let mut csv = String::from("cell,params,terminal_psnr_db,iters_to_48db\n");
    let mut indices = vec![0usize; axes.len()];

    for cell in 0..cells {
        let mut raw: RawConfig = rc.base.clone();
        let mut described = Vec::new();
        for (axis, &choice) in axes.iter().zip(&indices) {
            raw.set(&axis.0, &axis.1[choice]);
            described.push(format!("{}={}", axis.0, axis.1[choice]));
        }
        let params = described.join(";");

        let row = match resolve(&raw, false) {
            Err(e) => {
                let msg = csv_safe(&e.problems.join("; "));
                format!("{cell},{params},error: {msg},\n")
            }
            Ok(cell_rc) => {
                let mut cell_run = cell_rc.run.clone();
                cell_run.export_image = false;
                cell_run.export_trace = false;
                cell_run.export_plot = false;
                cell_run.export_mask = false;
                cell_run.export_observation = false;
                match run_reconstruct(&cell_run, out_dir, true) {
                    Err(e) => {
                        let msg = csv_safe(&e.to_string());
                        format!("{cell},{params},error: {msg},\n")
                    }
                    Ok(outcome) => {
                        let terminal = match outcome.terminal_psnr_db {
                            Some(v) if v.is_infinite() => "inf".to_string(),
                            Some(v) => format!("{v}"),
                            None => String::new(),
                        };
                        let crossing = outcome
                            .crossed_48_at
                            .map(|k| k.to_string())
                            .unwrap_or_default();
                        println!("cell {cell}/{cells}: [{params}] terminal={terminal} iters_to_48db={crossing}");
                        format!("{cell},{params},{terminal},{crossing}\n")
                    }
                }
            }
        };
        csv.push_str(&row);

        // Row-major increment: last axis fastest.
        for pos in (0..indices.len()).rev() {
            indices[pos] += 1;
            if indices[pos] < axes[pos].1.len() {
                break;
            }
            indices[pos] = 0;
        }
    }

    io::write_atomic(&out_dir.join(SWEEP_CSV), csv.as_bytes())?;
    println!("wrote {}", out_dir.join(SWEEP_CSV).display());
    Ok(())
}

/// Builds the effective output directory: the `--out` flag wins over the
/// config's `run.out_dir`.
pub fn effective_out_dir(run: &RunConfig, flag: &Option<PathBuf>) -> PathBuf {
    flag.clone().unwrap_or_else(|| run.out_dir.clone())
}
