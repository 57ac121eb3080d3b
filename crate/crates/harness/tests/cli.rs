use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nnoma_harness::emit::{from_csv_str, from_json_str, to_csv_string};
use nnoma_harness::{load_config, Modes, SweepRecord, SweepSpec};

fn nnoma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nnoma")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn error_line(out: &Output) -> serde_json::Value {
    assert!(!out.status.success());
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.lines().last().unwrap()).unwrap()
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

/// Everything but the timing column.
fn without_timing(mut recs: Vec<SweepRecord>) -> Vec<SweepRecord> {
    for r in &mut recs {
        r.wall_time_s = 0.0;
    }
    recs
}

const FAST_MC: &str = "trials = 300\nwindow = 1000\nseed = 40\n";

#[test]
fn twenty_point_sweep_emits_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), FAST_MC);
    let csv_path = dir.path().join("out.csv");
    let out = nnoma(&[
        "simulate",
        "--config",
        &cfg,
        "--sweep",
        "lambda_c=1e-6:2e-5:20:log",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    stdout(&out);
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(text.lines().count(), 21);
    let recs = from_csv_str(&text).unwrap();
    assert_eq!(to_csv_string(&recs).unwrap(), text);
    assert_eq!(
        recs.iter().map(|r| r.index).collect::<Vec<_>>(),
        (0..20).collect::<Vec<_>>()
    );
    assert!(recs.iter().all(|r| r.p0.is_none() && r.mc_p0_hat.is_some()));

    let json = stdout(&nnoma(&[
        "simulate",
        "--config",
        &cfg,
        "--sweep",
        "lambda_c=1e-6:2e-5:20:log",
        "--format",
        "json",
    ]));
    assert_eq!(without_timing(from_json_str(&json).unwrap()), without_timing(recs));
}

#[test]
fn a_sweep_point_rerun_alone_reproduces_its_row() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), FAST_MC);
    let recs = from_csv_str(&stdout(&nnoma(&[
        "simulate",
        "--config",
        &cfg,
        "--sweep",
        "lambda_c=1e-6:1e-5:4",
    ])))
    .unwrap();
    let row = &recs[2];
    let single = write_config(dir.path(), &format!("{FAST_MC}lambda_c = {:?}\n", row.value));
    let seed = (40 + 2).to_string();
    let alone = from_csv_str(&stdout(&nnoma(&["simulate", "--config", &single, "--seed", &seed]))).unwrap();
    let mut alone = without_timing(alone).remove(0);
    alone.index = 2;
    assert_eq!(alone, without_timing(vec![row.clone()]).remove(0));
}

#[test]
fn analyze_reports_probabilities() {
    let recs = from_csv_str(&stdout(&nnoma(&["analyze", "--ka", "exact", "--n", "8"]))).unwrap();
    let r = &recs[0];
    assert_eq!(r.value, 1e-5);
    assert!(r.mc_p0_hat.is_none());
    for v in [r.p0, r.pi, r.p0_oma] {
        assert!((0.0..=1.0).contains(&v.unwrap()));
    }
    assert!(r.sum_rate_nnoma.unwrap() > r.sum_rate_oma.unwrap());
}

#[test]
fn failures_give_a_machine_readable_line() {
    let err = error_line(&nnoma(&["sweep", "--sweep", "lambda_c=1e-6:1e-6:2"]));
    assert_eq!(err["error"], "sweep");
    assert!(err["message"].as_str().unwrap().contains("degenerate"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "alpha = 3\nfading = rayleigh\n");
    let err = error_line(&nnoma(&["analyze", "--config", &cfg]));
    assert_eq!(err["error"], "unknown_key");
    assert!(err["message"].as_str().unwrap().contains("fading"));

    let cfg = write_config(dir.path(), "alpha = 1.5\n");
    let err = error_line(&nnoma(&["analyze", "--config", &cfg]));
    assert!(err["message"].as_str().unwrap().contains("alpha must exceed 2"));

    let err = error_line(&nnoma(&["sweep"]));
    assert_eq!(err["error"], "sweep");
    let err = error_line(&nnoma(&["analyze", "--ka", "0"]));
    assert!(err["message"].as_str().unwrap().contains("K_A"));
    assert!(!nnoma(&["analyze", "--format", "xml"]).status.success());
}

#[test]
fn short_window_is_reported_as_truncation_failure() {
    let out = nnoma(&["validate", "--trials", "20000", "--window", "600", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["window"]["pass"], false);
    assert_eq!(report["pass"], false);
    assert_eq!(error_line(&out)["error"], "validation_failed");
}

#[test]
fn figure_configs_load_and_describe_their_grids() {
    for (name, count) in [("fig2", 10), ("fig3", 10), ("fig4", 91), ("fig5", 14)] {
        let cfg = load_config(&configs().join(format!("{name}.cfg"))).unwrap();
        let arg = cfg.sweep.clone().expect("figure configs carry a grid");
        let spec = SweepSpec::parse(cfg, &arg, Modes::BOTH).unwrap();
        assert_eq!(spec.grid.count, count, "{name}");
    }
    let fig4 = load_config(&configs().join("fig4.cfg")).unwrap();
    assert_eq!(
        (fig4.params.r0_bpcu(), fig4.params.ri_bpcu(), fig4.params.k_users()),
        (0.5, 3.0, 2)
    );
}
