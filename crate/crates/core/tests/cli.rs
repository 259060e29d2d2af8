use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use reflectlab::config::ExperimentSpec;
use reflectlab::report::{run_plot_data, PLOT_HEADER, SAMPLE_HEADER};
use reflectlab::LimitLawSet;
use serde_json::Value;

fn manifest(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join(rel)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reflectlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn schema(name: &str) -> jsonschema::Validator {
    let text = std::fs::read_to_string(manifest(&format!("schemas/{name}.schema.json"))).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const SMALL: &str = r#"
[model]
drift = -2.0
[model.up]
rate = 1.0
alpha = 1.0
[sim]
n = 10
seed = 3
t = 20.0
x = 2.0
horizon = 200.0
[grid]
x_list = [2.0, 3.0]
y_offset = 1.0
[table]
x_max = 5.0
points = 11
[verify]
checks = ["cramer_root", "wh_identity", "exit"]
"#;

#[test]
fn limits_for_reference_models() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("cl1.json");
    let o = run(&["limits", "--config", s(&manifest("configs/cl1.toml")), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(schema("limits").is_valid(&v));
    let close = |k: &str, want: f64| (v[k].as_f64().unwrap() - want).abs() < 1e-12;
    assert!(close("gamma", 0.5) && close("c_gamma", 0.5) && close("atom", 0.0));
    assert!(close("ell_phihat_gamma", 0.5));
    let csv = std::fs::read_to_string(out.with_extension("csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 41);

    let out = dir.path().join("bm1.json");
    let o = run(&["limits", "--config", s(&manifest("configs/bm1.toml")), "--out", s(&out), "--json"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["atom"].as_f64().unwrap(), 1.0);
}

#[test]
fn invalid_model_reports_error_json() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", "[model]\ndrift = 1.0\nsigma = 1.0\n");
    let o = run(&["limits", "--config", s(&cfg), "--out", s(&dir.path().join("x.json")), "--json"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(schema("error").is_valid(&v));
    assert_eq!(v["error"], "no-cramer-root");
    assert!(!dir.path().join("x.json").exists());
}

#[test]
fn missing_config_is_an_io_error() {
    let o = run(&["verify", "--config", "/nonexistent/reflectlab.toml", "--json"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["error"], "io");
    assert!(v["message"].as_str().unwrap().contains("/nonexistent/reflectlab.toml"));
}

#[test]
fn simulate_rows_rerun_and_split() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let sim = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec!["simulate", "--config", s(&cfg), "--out", s(&out)];
        args.extend_from_slice(extra);
        let o = run(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        std::fs::read_to_string(out).unwrap()
    };
    let full = sim("a.csv", &[]);
    let lines: Vec<&str> = full.lines().collect();
    assert_eq!(lines[0], SAMPLE_HEADER);
    assert_eq!(lines.len(), 11);
    assert_eq!(full, sim("b.csv", &[]));
    assert_eq!(full, sim("c.csv", &["--workers", "3"]));

    let head = sim("d.csv", &["--start", "0", "--count", "4"]);
    let tail = sim("e.csv", &["--start", "4", "--count", "6"]);
    let joined: Vec<&str> = head.lines().chain(tail.lines().skip(1)).collect();
    assert_eq!(joined, lines);

    let other_seed = sim("f.csv", &["--seed", "4"]);
    assert_ne!(full, other_seed);
}

#[test]
fn verify_report_and_thresholds() {
    let dir = tempfile::tempdir().unwrap();
    let base = SMALL.replace("n = 10\n", "n = 20000\n");
    let cfg = write_config(dir.path(), "small.toml", &base);
    let out = dir.path().join("v.json");
    let o = run(&["verify", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(schema("verify").is_valid(&v));
    assert!(v.as_array().unwrap().iter().all(|r| r["pass"] == true));

    let tampered = base.replace("[verify]\n", "[verify]\ntol_exit = 0.0\n");
    let cfg = write_config(dir.path(), "tampered.toml", &tampered);
    let o = run(&["verify", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(1));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let exit = v.as_array().unwrap().iter().find(|r| r["name"] == "exit_relative_error").unwrap();
    assert_eq!(exit["pass"], false);

    let empty = base.replace("y_offset = 1.0\n", "y_offset = 1.0\na = []\n");
    let cfg = write_config(dir.path(), "empty.toml", &empty);
    let o = run(&["verify", "--config", s(&cfg), "--out", s(&out), "--json"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["error"], "config");
}

#[test]
fn verify_output_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = manifest("configs/determinism.toml");
    let outs: Vec<Vec<u8>> = ["1", "4", "16"]
        .iter()
        .map(|w| {
            let out = dir.path().join(format!("v{w}.json"));
            let o = run(&["verify", "--config", s(&cfg), "--out", s(&out), "--workers", w]);
            assert!(o.status.code() == Some(0) || o.status.code() == Some(1));
            std::fs::read(out).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    assert_eq!(outs[0], outs[2]);
}

#[test]
fn plot_data_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", &SMALL.replace("n = 10\n", "n = 400\n"));
    let out = dir.path().join("plot.csv");
    let o = run(&["plot-data", "--config", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), PLOT_HEADER);
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    // z_inf, y_inf and one maximum series per grid point, 11 rows each.
    assert_eq!(rows.len(), 4 * 11);
    let spec = ExperimentSpec::from_toml(SMALL).unwrap();
    let laws = LimitLawSet::from_model(&spec.model().unwrap(), Some(spec.grid.lambda)).unwrap();
    for r in rows.iter().filter(|r| r[0] == "z_inf") {
        let x: f64 = r[1].parse().unwrap();
        assert_eq!(r[2].parse::<f64>().unwrap(), laws.z_inf_cdf(x).unwrap());
    }
    for r in &rows {
        let band: f64 = r[4].parse().unwrap();
        assert!(band > 0.0);
    }

    // The library entry point writes the same bytes.
    let again = dir.path().join("again.csv");
    let spec = ExperimentSpec::load(&cfg).unwrap();
    assert_eq!(run_plot_data(&spec, &again).unwrap(), 44);
    assert_eq!(std::fs::read_to_string(again).unwrap(), text);
}

#[test]
fn unwritable_output_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let out = blocker.join("samples.csv");
    let o = run(&["simulate", "--config", s(&cfg), "--out", s(&out), "--json"]);
    assert_eq!(o.status.code(), Some(2));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["error"], "io");
    assert!(v["message"].as_str().unwrap().contains(s(&blocker)));
}
