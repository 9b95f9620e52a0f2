//! End-to-end command behavior: files written, split workflows, exit codes.

use std::path::{Path, PathBuf};
use std::process::Command;

use fpr_cli::commands::{
    run_measure, run_phantom, run_reconstruct, run_sweep, CliError, MASK_FPM, OBSERVATION_FPO,
    PHANTOM_FPR, PHANTOM_PGM, PROFILE_SVG, RECON_FPR, RECON_PGM, SWEEP_CSV, TRACE_CSV,
};
use fpr_cli::config::resolve_text;
use fpr_core::{io, modified_shepp_logan_spec, rasterize};

fn tmp_dir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const SMALL_RUN: &str = "run.n = 32\nsampling.lines = 8\nrun.k_max = 4\n";

#[test]
fn phantom_writes_both_formats() {
    let dir = tmp_dir("phantom_cmd");
    run_phantom(256, &dir).unwrap();

    let pgm = std::fs::read(dir.join(PHANTOM_PGM)).unwrap();
    assert!(pgm.starts_with(b"P5\n256 256\n255\n"));
    let header_len = b"P5\n256 256\n255\n".len();
    assert_eq!(pgm.len(), header_len + 256 * 256);
    assert_eq!(pgm[header_len], 0, "corner pixel must be background");

    let exact = io::read_image(&dir.join(PHANTOM_FPR)).unwrap();
    assert_eq!(exact, rasterize(&modified_shepp_logan_spec(), 256).unwrap());
}

#[test]
fn phantom_rejects_tiny_grids_as_usage_error() {
    let dir = tmp_dir("phantom_tiny");
    let err = run_phantom(1, &dir).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    assert!(matches!(
        err,
        CliError::Core(fpr_core::Error::GridTooSmall { n: 1, min: 2 })
    ));
}

#[test]
fn reconstruct_writes_the_three_outputs() {
    let rc = resolve_text(SMALL_RUN, false).unwrap();
    let dir = tmp_dir("recon_outputs");
    let outcome = run_reconstruct(&rc.run, &dir, true).unwrap();
    assert!(dir.join(RECON_FPR).exists());
    assert!(dir.join(RECON_PGM).exists());
    assert!(dir.join(TRACE_CSV).exists());
    assert!(dir.join(PROFILE_SVG).exists());
    assert_eq!(outcome.result.iterations_run, 4);

    let csv = std::fs::read_to_string(dir.join(TRACE_CSV)).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,psnr_db,data_residual,param_value"));
    assert_eq!(lines.count(), 4);

    let svg = std::fs::read_to_string(dir.join(PROFILE_SVG)).unwrap();
    assert!(svg.contains("<svg"));
    assert!(svg.contains("PSNR (dB)"));
}

#[test]
fn measure_then_reconstruct_matches_the_direct_run() {
    let dir = tmp_dir("split_phases");
    let rc = resolve_text(SMALL_RUN, false).unwrap();
    run_measure(&rc.run, &dir).unwrap();
    assert!(dir.join(OBSERVATION_FPO).exists());
    assert!(dir.join(MASK_FPM).exists());
    assert!(dir.join(PHANTOM_FPR).exists());

    let split_config = format!(
        "{SMALL_RUN}input.observation = {}\ninput.reference = {}\n",
        dir.join(OBSERVATION_FPO).display(),
        dir.join(PHANTOM_FPR).display()
    );
    let rc_split = resolve_text(&split_config, false).unwrap();
    let dir_split = tmp_dir("split_phases_out");
    run_reconstruct(&rc_split.run, &dir_split, true).unwrap();

    let dir_direct = tmp_dir("direct_out");
    run_reconstruct(&rc.run, &dir_direct, true).unwrap();

    let a = std::fs::read(dir_split.join(TRACE_CSV)).unwrap();
    let b = std::fs::read(dir_direct.join(TRACE_CSV)).unwrap();
    assert_eq!(a, b, "split-phase run must match the direct run exactly");
}

#[test]
fn sweep_writes_one_row_per_cell() {
    let text = format!(
        "{SMALL_RUN}sweep.schedule.decay = 0.99, 0.995\nsweep.filter.ti_haar.threshold = 0.3, 0.5\n"
    );
    let rc = resolve_text(&text, true).unwrap();
    let dir = tmp_dir("sweep_grid");
    run_sweep(&rc, &dir).unwrap();
    let csv = std::fs::read_to_string(dir.join(SWEEP_CSV)).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "cell,params,terminal_psnr_db,iters_to_48db");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("0,schedule.decay=0.99;filter.ti_haar.threshold=0.3,"));
    assert!(lines[4].starts_with("3,schedule.decay=0.995;filter.ti_haar.threshold=0.5,"));
}

#[test]
fn one_cell_sweep_equals_a_single_reconstruction() {
    let rc = resolve_text(SMALL_RUN, true).unwrap();
    let dir = tmp_dir("sweep_single");
    run_sweep(&rc, &dir).unwrap();
    let csv = std::fs::read_to_string(dir.join(SWEEP_CSV)).unwrap();
    let row = csv.lines().nth(1).unwrap();

    let outcome = run_reconstruct(&rc.run, &tmp_dir("sweep_single_direct"), true).unwrap();
    let expected = format!("0,,{},", outcome.terminal_psnr_db.unwrap());
    assert_eq!(row, expected);
}

fn fpr_binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fpr"))
}

#[test]
fn exit_codes_through_the_binary() {
    // Usage error: n below the minimum.
    let dir = tmp_dir("exit_usage");
    let status = fpr_binary()
        .args(["phantom", "--n", "1", "--out"])
        .arg(&dir)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    // Config error: invalid time step, reported with the offending key.
    let cfg = dir.join("bad.conf");
    std::fs::write(&cfg, "filter.kind = pm\nfilter.pm.time_step = 0.5\n").unwrap();
    let output = fpr_binary()
        .args(["reconstruct", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("time_step"), "stderr: {stderr}");

    // Unknown key listed by name.
    std::fs::write(&cfg, "mystery.knob = 1\n").unwrap();
    let output = fpr_binary()
        .args(["reconstruct", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("mystery.knob"));
}

#[test]
fn print_config_round_trips_through_the_binary() {
    let dir = tmp_dir("print_config");
    let cfg = dir.join("run.conf");
    std::fs::write(&cfg, "filter.kind = pm\nrun.n = 64\n").unwrap();
    let output = fpr_binary()
        .args(["reconstruct", "--print-config", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let printed = String::from_utf8(output.stdout).unwrap();
    assert!(printed.contains("filter.kind = pm"));
    assert!(printed.contains("run.n = 64"));
    assert!(printed.contains("schedule.decay = 0.999"));

    // Re-parsing the printed text resolves to the identical map.
    let rc_orig = resolve_text("filter.kind = pm\nrun.n = 64\n", false).unwrap();
    let rc_back = resolve_text(&printed, false).unwrap();
    assert_eq!(rc_orig.map, rc_back.map);
}

#[test]
fn reconstruct_echoes_terminal_psnr_on_stdout() {
    let dir = tmp_dir("echo_psnr");
    let cfg = dir.join("run.conf");
    std::fs::write(&cfg, SMALL_RUN).unwrap();
    let output = fpr_binary()
        .args(["reconstruct", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("terminal psnr_db ="), "stdout: {stdout}");
}
