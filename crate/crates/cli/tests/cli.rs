use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn optowig(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optowig"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn bare(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_optowig")).args(args).output().expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SMALL_GRID: &[&str] = &["--x-min", "-5", "--x-max", "5", "--p-min", "-4", "--p-max", "14", "--nx", "41", "--np", "61"];

#[test]
fn fig1a_negative_volume() {
    let dir = TempDir::new().unwrap();
    let o = optowig(&["pulsed", "--alpha", "2", "--g0-over-kappa", "2", "--detuning", "0", "--preset", "paper-repro"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&dir.path().join("report.json"));
    let delta = r["metrics"]["delta"].as_f64().unwrap();
    assert!((delta - 0.016).abs() <= 0.002, "{delta}");
    assert_eq!(r["params"]["grid"], "paper-repro");
    assert!(dir.path().join("wigner.csv").exists());
    let side = json(&dir.path().join("wigner.csv.json"));
    assert_eq!(side["columns"], serde_json::json!(["X", "P", "W"]));
    assert_eq!(side["config"]["alpha"], 2.0);
    assert!(side["version"].is_string());
}

#[test]
fn vacuum_input_has_no_negativity() {
    let dir = TempDir::new().unwrap();
    let o = optowig(&["pulsed", "--alpha", "0"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let m = &json(&dir.path().join("report.json"))["metrics"];
    assert!(m["delta"].as_f64().unwrap() < 1e-12);
    assert!(m["witness"].is_null());
}

#[test]
fn unknown_flags_are_config_errors() {
    let o = bare(&["pulsed", "--alpah", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = bare(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_errors_name_the_line_and_field() {
    let dir = TempDir::new().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "alpha = 2\n# fine\nalhpa = 3\n").unwrap();
    let o = optowig(&["pulsed", "--config", conf.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("run.conf:3: unknown key `alhpa`"), "{}", stderr(&o));

    let o = optowig(&["pulsed", "--alpha", "two"], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`alpha`"), "{}", stderr(&o));

    let o = optowig(&["pulsed", "--k", "0.1"], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn flags_override_the_file() {
    let dir = TempDir::new().unwrap();
    let conf = dir.path().join("a.conf");
    std::fs::write(&conf, "alpha = 1\ng0_over_kappa = 0.5\n").unwrap();
    let mut args = vec!["pulsed", "--config", conf.to_str().unwrap(), "--alpha", "1.5"];
    args.extend(SMALL_GRID);
    let o = optowig(&args, dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let p = &json(&dir.path().join("report.json"))["params"];
    assert_eq!(p["alpha"], 1.5);
    assert_eq!(p["g0_over_kappa"], 0.5);
}

#[test]
fn figure_presets() {
    let dir = TempDir::new().unwrap();
    let o = optowig(&["pulsed", "--preset", "fig1b", "--grid", "default"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let p = &json(&dir.path().join("report.json"))["params"];
    assert_eq!((p["alpha"].as_f64(), p["r_m"].as_f64()), (Some(2.0), Some(0.691)));
    assert_eq!((p["g0_over_kappa"].as_f64(), p["detuning"].as_f64()), (Some(1.0), Some(0.0)));

    let o = optowig(&["pulsed", "--preset", "figS1c", "--grid", "default"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&dir.path().join("report.json"));
    assert_eq!((r["params"]["g0_over_kappa"].as_f64(), r["params"]["detuning"].as_f64()), (Some(0.8), Some(3.0)));
    assert_eq!(r["preset"]["expected_delta"].as_f64(), Some(0.02091));

    let o = optowig(&["steady", "--preset", "fig3a", "--steady-points", "101"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&dir.path().join("report.json"));
    let p = &r["params"];
    assert_eq!(p["g0_over_kappa"], 5.0);
    assert_eq!(p["k"], 0.05);
    assert_eq!(p["n_bath"], 0.0);
    assert_eq!(p["gamma"], 1e-3);
    assert_eq!(p["omega_m"], 1e5);
    assert!(r["metrics"]["min_w"].as_f64().unwrap() < 0.0);
    assert_eq!((r["metrics"]["min_x"].as_f64(), r["metrics"]["min_p"].as_f64()), (Some(0.0), Some(0.0)));
    assert!(dir.path().join("populations.csv.json").exists());

    let o = optowig(&["pulsed", "--preset", "fig7z"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("figS4b"), "{}", stderr(&o));
    let o = optowig(&["pulsed", "--preset", "fig3a"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn presets_are_listed() {
    let o = bare(&["presets"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 18);
    assert!(text.contains("fig2-inset"));
}

#[test]
fn steady_sweep_writes_witness_column() {
    let dir = TempDir::new().unwrap();
    let o = optowig(
        &[
            "sweep", "--command", "steady", "--axis", "g0_over_kappa", "1", "3", "3", "--k", "0.1", "--truncation", "80",
            "--witness-levels", "40", "--steady-points", "61",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("g0_over_kappa,delta,min_w,min_x,min_p,witness"));
    let g: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(g, vec![1.0, 2.0, 3.0]);
    let r = json(&dir.path().join("report.json"));
    assert_eq!(r["partial"], false);
    assert_eq!(json(&dir.path().join("sweep.csv.json"))["partial"], false);
}

#[test]
fn failed_points_leave_a_partial_sweep() {
    let dir = TempDir::new().unwrap();
    let mut args = vec!["sweep", "--command", "pulsed", "--axis", "n_bar", "-1", "0", "2", "--alpha", "1"];
    args.extend(SMALL_GRID);
    let o = optowig(&args, dir.path());
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let r = json(&dir.path().join("report.json"));
    assert_eq!(r["partial"], true);
    assert_eq!(r["failures"][0]["point"][0], -1.0);
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn numerical_failures_exit_3() {
    let dir = TempDir::new().unwrap();
    let o = optowig(&["steady", "--g0-over-kappa", "5", "--truncation", "10", "--tail-tolerance", "1e-300", "--witness-levels", "1"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("truncation"), "{}", stderr(&o));
}

#[test]
fn rwa_validation_writes_fidelity() {
    let dir = TempDir::new().unwrap();
    let o = optowig(&["validate-rwa", "--g0-over-kappa", "3", "--truncation", "20", "--periods", "2"], dir.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("fidelity.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let r = json(&dir.path().join("report.json"));
    assert!(r["metrics"]["min_fidelity"].as_f64().unwrap() > 0.999);
}

#[test]
fn output_is_independent_of_thread_count() {
    let run = |threads: &str| {
        let dir = TempDir::new().unwrap();
        let mut args = vec!["sweep", "--command", "pulsed", "--axis", "g0_over_kappa", "0.5", "2", "4", "--threads", threads];
        args.extend(SMALL_GRID);
        let o = optowig(&args, dir.path());
        assert!(o.status.success(), "{}", stderr(&o));
        let mut single = vec!["photon-count", "--g0-over-kappa", "1.5", "--threads", threads];
        single.extend(SMALL_GRID);
        let o = optowig(&single, &dir.path().join("w"));
        assert!(o.status.success(), "{}", stderr(&o));
        (
            std::fs::read(dir.path().join("sweep.csv")).unwrap(),
            std::fs::read(dir.path().join("w/wigner.csv")).unwrap(),
        )
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn provenance_reruns_the_computation() {
    let dir = TempDir::new().unwrap();
    let mut args = vec!["baseline", "--alpha", "1.2", "--g0-over-kappa", "0.7"];
    args.extend(SMALL_GRID);
    let o = optowig(&args, &dir.path().join("a"));
    assert!(o.status.success(), "{}", stderr(&o));
    let side = json(&dir.path().join("a/wigner.csv.json"));
    assert_eq!(side["rerun"], "optowig baseline --config run.conf");
    let conf = dir.path().join("a/run.conf");
    let o = optowig(&["baseline", "--config", conf.to_str().unwrap()], &dir.path().join("b"));
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        std::fs::read(dir.path().join("a/wigner.csv")).unwrap(),
        std::fs::read(dir.path().join("b/wigner.csv")).unwrap()
    );
}
