//! Flat `key = value` run configuration.
//!
//! `#` starts a comment, keys are dot-namespaced, unknown keys are hard
//! errors. Every key has a default; schedule defaults depend on the chosen
//! filter kind (the annealed parameter starts at the kind's base value).
//! `sweep.<key> = v1, v2, ...` axes are only legal for the sweep command
//! and expand to a Cartesian grid in file order, capped at 1024 cells.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;

use fpr_core::{
    AnnealSchedule, BlockDctParams, ConductanceKind, FilterParams, FilterSpec, PmParams,
    RegDiffParams, TiHaarParams,
};

/// Every legal configuration key, in canonical print order.
pub const CANONICAL_KEYS: [&str; 29] = [
    "run.n",
    "run.k_max",
    "run.stop_psnr_db",
    "run.out_dir",
    "sampling.lines",
    "filter.kind",
    "filter.pm.edge_scale_k",
    "filter.pm.time_step",
    "filter.pm.conductance",
    "filter.pm.steps_per_projection",
    "filter.regdiff.edge_scale_k",
    "filter.regdiff.time_step",
    "filter.regdiff.presmooth_sigma",
    "filter.regdiff.steps_per_projection",
    "filter.ti_haar.threshold",
    "filter.ti_haar.levels",
    "filter.block_dct.threshold",
    "filter.block_dct.block",
    "filter.block_dct.step",
    "schedule.initial",
    "schedule.decay",
    "schedule.floor",
    "export.image",
    "export.trace",
    "export.plot",
    "export.mask",
    "export.observation",
    "input.observation",
    "input.reference",
];

/// Keys a sweep may vary (everything except paths and export toggles).
fn is_sweepable(key: &str) -> bool {
    CANONICAL_KEYS.contains(&key)
        && !key.starts_with("export.")
        && !key.starts_with("input.")
        && key != "run.out_dir"
}

pub const MAX_SWEEP_CELLS: usize = 1024;

#[derive(Debug)]
pub struct ConfigError {
    pub problems: Vec<String>,
}

impl ConfigError {
    fn new(problems: Vec<String>) -> Self {
        Self { problems }
    }

    pub fn single(problem: impl Into<String>) -> Self {
        Self {
            problems: vec![problem.into()],
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "invalid configuration:")?;
        for p in &self.problems {
            writeln!(f, "  - {p}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ConfigError {}

/// Parsed but unresolved `key = value` entries, in file order.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: Vec<(String, String)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut problems = Vec::new();
        let mut entries: Vec<(String, String)> = Vec::new();
        let mut seen = BTreeSet::new();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            match line.split_once('=') {
                None => problems.push(format!("line {}: expected `key = value`", idx + 1)),
                Some((k, v)) => {
                    let key = k.trim().to_string();
                    let value = v.trim().to_string();
                    if key.is_empty() {
                        problems.push(format!("line {}: empty key", idx + 1));
                        continue;
                    }
                    if !seen.insert(key.clone()) {
                        problems.push(format!("duplicate key `{key}`"));
                        continue;
                    }
                    entries.push((key, value));
                }
            }
        }
        if problems.is_empty() {
            Ok(Self { entries })
        } else {
            Err(ConfigError::new(problems))
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn set(&mut self, key: &str, value: &str) {
        if let Some(entry) = self.entries.iter_mut().find(|(k, _)| k == key) {
            entry.1 = value.to_string();
        } else {
            self.entries.push((key.to_string(), value.to_string()));
        }
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    Pm,
    Regdiff,
    TiHaar,
    BlockDct,
}

impl FilterKind {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "pm" => Some(Self::Pm),
            "regdiff" => Some(Self::Regdiff),
            "ti_haar" => Some(Self::TiHaar),
            "block_dct" => Some(Self::BlockDct),
            _ => None,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Self::Pm => "pm",
            Self::Regdiff => "regdiff",
            Self::TiHaar => "ti_haar",
            Self::BlockDct => "block_dct",
        }
    }

    /// The config key holding this kind's base (annealed) parameter.
    fn base_param_key(self) -> &'static str {
        match self {
            Self::Pm => "filter.pm.edge_scale_k",
            Self::Regdiff => "filter.regdiff.edge_scale_k",
            Self::TiHaar => "filter.ti_haar.threshold",
            Self::BlockDct => "filter.block_dct.threshold",
        }
    }

    fn default_decay(self) -> &'static str {
        match self {
            Self::Pm | Self::Regdiff => "0.999",
            Self::TiHaar | Self::BlockDct => "0.998",
        }
    }

    fn default_floor(self) -> &'static str {
        match self {
            Self::Pm | Self::Regdiff => "0.001",
            Self::TiHaar | Self::BlockDct => "0.00001",
        }
    }
}

/// A fully resolved run: every key has a value.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: usize,
    pub lines: usize,
    pub k_max: usize,
    pub stop_psnr_db: Option<f64>,
    pub out_dir: PathBuf,
    pub kind: FilterKind,
    pub filter: FilterSpec,
    pub export_image: bool,
    pub export_trace: bool,
    pub export_plot: bool,
    pub export_mask: bool,
    pub export_observation: bool,
    pub input_observation: Option<PathBuf>,
    pub input_reference: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct ResolvedConfig {
    /// Complete key map in canonical order; printing and re-parsing it
    /// reproduces this exact resolution.
    pub map: Vec<(String, String)>,
    pub run: RunConfig,
    /// Base entries without sweep axes (cell configs build on these).
    pub base: RawConfig,
    /// Sweep axes in file order.
    pub sweep_axes: Vec<(String, Vec<String>)>,
}

impl ResolvedConfig {
    pub fn print(&self) -> String {
        let mut out = String::from("# fpr resolved configuration\n");
        for (k, v) in &self.map {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }

    pub fn sweep_cell_count(&self) -> usize {
        self.sweep_axes
            .iter()
            .fold(1usize, |acc, (_, vs)| acc.saturating_mul(vs.len()))
    }
}

fn static_default(key: &str) -> &'static str {
    match key {
        "run.n" => "256",
        "run.k_max" => "3000",
        "run.stop_psnr_db" => "none",
        "run.out_dir" => "out",
        "sampling.lines" => "22",
        "filter.kind" => "ti_haar",
        "filter.pm.edge_scale_k" => "0.5",
        "filter.pm.time_step" => "0.25",
        "filter.pm.conductance" => "rational",
        "filter.pm.steps_per_projection" => "1",
        "filter.regdiff.edge_scale_k" => "0.5",
        "filter.regdiff.time_step" => "0.25",
        "filter.regdiff.presmooth_sigma" => "1",
        "filter.regdiff.steps_per_projection" => "1",
        "filter.ti_haar.threshold" => "0.5",
        "filter.ti_haar.levels" => "4",
        "filter.block_dct.threshold" => "0.5",
        "filter.block_dct.block" => "8",
        "filter.block_dct.step" => "4",
        "export.image" => "true",
        "export.trace" => "true",
        "export.plot" => "true",
        "export.mask" => "false",
        "export.observation" => "false",
        "input.observation" => "none",
        "input.reference" => "none",
        // schedule.* is kind-dependent, handled by the resolver
        _ => unreachable!("no static default for {key}"),
    }
}

struct Fields<'a> {
    map: &'a [(String, String)],
    problems: Vec<String>,
}

impl<'a> Fields<'a> {
    fn value(&self, key: &str) -> &'a str {
        self.map
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .expect("resolved map is complete")
    }

    fn usize(&mut self, key: &str) -> usize {
        match self.value(key).parse::<usize>() {
            Ok(v) => v,
            Err(_) => {
                self.problems
                    .push(format!("{key}: `{}` is not a nonnegative integer", self.value(key)));
                1
            }
        }
    }

    fn f64(&mut self, key: &str) -> f64 {
        match self.value(key).parse::<f64>() {
            Ok(v) => v,
            Err(_) => {
                self.problems
                    .push(format!("{key}: `{}` is not a number", self.value(key)));
                f64::NAN
            }
        }
    }

    fn bool(&mut self, key: &str) -> bool {
        match self.value(key) {
            "true" => true,
            "false" => false,
            other => {
                self.problems
                    .push(format!("{key}: `{other}` is not `true` or `false`"));
                false
            }
        }
    }

    fn optional_f64(&mut self, key: &str) -> Option<f64> {
        match self.value(key) {
            "none" => None,
            s => match s.parse::<f64>() {
                Ok(v) => Some(v),
                Err(_) => {
                    self.problems
                        .push(format!("{key}: `{s}` is not a number or `none`"));
                    None
                }
            },
        }
    }

    fn optional_path(&mut self, key: &str) -> Option<PathBuf> {
        match self.value(key) {
            "none" => None,
            s => Some(PathBuf::from(s)),
        }
    }
}

/// Resolves raw entries against defaults and validates everything.
pub fn resolve(raw: &RawConfig, allow_sweep: bool) -> Result<ResolvedConfig, ConfigError> {
    let mut problems = Vec::new();

    // Split off sweep axes.
    let mut base = RawConfig::default();
    let mut sweep_axes: Vec<(String, Vec<String>)> = Vec::new();
    for (key, value) in raw.entries() {
        if let Some(target) = key.strip_prefix("sweep.") {
            if !allow_sweep {
                problems.push(format!(
                    "unknown key `{key}` (sweep axes are only valid for the sweep command)"
                ));
                continue;
            }
            if !is_sweepable(target) {
                problems.push(format!("sweep target `{target}` is not a sweepable key"));
                continue;
            }
            let values: Vec<String> = value
                .split(',')
                .map(|v| v.trim().to_string())
                .filter(|v| !v.is_empty())
                .collect();
            if values.is_empty() {
                problems.push(format!("{key}: sweep axis needs at least one value"));
                continue;
            }
            sweep_axes.push((target.to_string(), values));
        } else if CANONICAL_KEYS.contains(&key.as_str()) {
            base.set(key, value);
        } else {
            problems.push(format!("unknown key `{key}`"));
        }
    }

    let cells = sweep_axes
        .iter()
        .fold(1usize, |acc, (_, vs)| acc.saturating_mul(vs.len()));
    if cells > MAX_SWEEP_CELLS {
        problems.push(format!(
            "sweep grid has {cells} cells, more than the {MAX_SWEEP_CELLS} allowed"
        ));
    }

    // The filter kind steers the schedule defaults.
    let kind_text = base.get("filter.kind").unwrap_or("ti_haar");
    let kind = match FilterKind::parse(kind_text) {
        Some(k) => k,
        None => {
            problems.push(format!(
                "filter.kind: `{kind_text}` is not one of pm, regdiff, ti_haar, block_dct"
            ));
            return Err(ConfigError::new(problems));
        }
    };

    // Complete map in canonical order.
    let mut map: Vec<(String, String)> = Vec::with_capacity(CANONICAL_KEYS.len());
    for &key in &CANONICAL_KEYS {
        let value = match base.get(key) {
            Some(v) => v.to_string(),
            None => match key {
                "schedule.initial" => base
                    .get(kind.base_param_key())
                    .unwrap_or(static_default(kind.base_param_key()))
                    .to_string(),
                "schedule.decay" => kind.default_decay().to_string(),
                "schedule.floor" => kind.default_floor().to_string(),
                _ => static_default(key).to_string(),
            },
        };
        map.push((key.to_string(), value));
    }

    if !problems.is_empty() {
        return Err(ConfigError::new(problems));
    }

    // Typed extraction.
    let mut fields = Fields {
        map: &map,
        problems: Vec::new(),
    };

    let n = fields.usize("run.n");
    let k_max = fields.usize("run.k_max");
    let stop_psnr_db = fields.optional_f64("run.stop_psnr_db");
    let out_dir = PathBuf::from(fields.value("run.out_dir"));
    let lines = fields.usize("sampling.lines");

    let pm = PmParams {
        edge_scale_k: fields.f64("filter.pm.edge_scale_k"),
        time_step: fields.f64("filter.pm.time_step"),
        conductance: match fields.value("filter.pm.conductance") {
            "rational" => ConductanceKind::Rational,
            "exponential" => ConductanceKind::Exponential,
            other => {
                fields.problems.push(format!(
                    "filter.pm.conductance: `{other}` is not `rational` or `exponential`"
                ));
                ConductanceKind::Rational
            }
        },
        steps_per_projection: fields.usize("filter.pm.steps_per_projection"),
    };
    let regdiff = RegDiffParams {
        edge_scale_k: fields.f64("filter.regdiff.edge_scale_k"),
        time_step: fields.f64("filter.regdiff.time_step"),
        presmooth_sigma: fields.f64("filter.regdiff.presmooth_sigma"),
        steps_per_projection: fields.usize("filter.regdiff.steps_per_projection"),
    };
    let ti_haar = TiHaarParams {
        threshold: fields.f64("filter.ti_haar.threshold"),
        levels: fields.usize("filter.ti_haar.levels"),
    };
    let block_dct = BlockDctParams {
        threshold: fields.f64("filter.block_dct.threshold"),
        block: fields.usize("filter.block_dct.block"),
        step: fields.usize("filter.block_dct.step"),
    };
    let schedule = AnnealSchedule {
        initial: fields.f64("schedule.initial"),
        decay: fields.f64("schedule.decay"),
        floor: fields.f64("schedule.floor"),
    };

    let export_image = fields.bool("export.image");
    let export_trace = fields.bool("export.trace");
    let export_plot = fields.bool("export.plot");
    let export_mask = fields.bool("export.mask");
    let export_observation = fields.bool("export.observation");
    let input_observation = fields.optional_path("input.observation");
    let input_reference = fields.optional_path("input.reference");

    let mut problems = fields.problems;

    if n < 2 {
        problems.push(format!("run.n: {n} is below the minimum grid side 2"));
    }
    if n % 2 != 0 {
        problems.push(format!("run.n: {n} must be even"));
    }
    if k_max == 0 {
        problems.push("run.k_max: must be at least 1".into());
    }
    if lines == 0 {
        problems.push("sampling.lines: must be at least 1".into());
    }

    // Every kind's parameters are validated, whichever kind runs.
    for (label, result) in [
        ("filter.pm", pm.validate()),
        ("filter.regdiff", regdiff.validate()),
        ("filter.ti_haar", ti_haar.validate()),
        ("filter.block_dct", block_dct.validate()),
        ("schedule", schedule.validate()),
    ] {
        if let Err(e) = result {
            problems.push(format!("{label}: {e}"));
        }
    }

    let params = match kind {
        FilterKind::Pm => FilterParams::PeronaMalik(pm),
        FilterKind::Regdiff => FilterParams::RegularizedDiffusion(regdiff),
        FilterKind::TiHaar => FilterParams::TiHaar(ti_haar),
        FilterKind::BlockDct => FilterParams::BlockDct(block_dct),
    };
    let filter = FilterSpec { params, schedule };
    if let Err(e) = filter.validate_for(n) {
        problems.push(format!("filter.{}: {e}", kind.name()));
    }

    if !problems.is_empty() {
        return Err(ConfigError::new(problems));
    }

    let run = RunConfig {
        n,
        lines,
        k_max,
        stop_psnr_db,
        out_dir,
        kind,
        filter,
        export_image,
        export_trace,
        export_plot,
        export_mask,
        export_observation,
        input_observation,
        input_reference,
    };

    Ok(ResolvedConfig {
        map,
        run,
        base,
        sweep_axes,
    })
}

/// Parses and resolves config text in one go.
pub fn resolve_text(text: &str, allow_sweep: bool) -> Result<ResolvedConfig, ConfigError> {
    resolve(&RawConfig::parse(text)?, allow_sweep)
}
