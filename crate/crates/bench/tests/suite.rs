use std::fs;
use std::path::Path;
use std::process::Command;

use politician_bench::suite::{MANIFEST_FILE, PLOT_SCRIPT_FILE, PROFILE_FILE};
use politician_bench::{run_suite, BenchConfig, Manifest};

fn config(out: &Path, methods: &[&str]) -> BenchConfig {
    BenchConfig::from_json(&format!(
        r#"{{"problems": [{{"family": "quadratic", "n": 20, "seed": 3}}], "methods": {}, "budget": 50, "tol": 1e-12, "out": "{}"}}"#,
        serde_json::to_string(methods).unwrap(),
        out.display()
    ))
    .unwrap()
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    let mut rows = vec![header];
    rows.extend(r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()));
    rows
}

fn without_timing(rows: &[Vec<String>]) -> Vec<Vec<String>> {
    rows.iter().map(|r| r[..r.len() - 1].to_vec()).collect()
}

#[test]
fn two_methods_give_two_monotone_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_suite(&config(dir.path(), &["sd", "sd+"]), Path::new("")).unwrap();
    assert_eq!(report.manifest.runs.len(), 2);
    let csvs: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv") && p.file_name().unwrap() != PROFILE_FILE)
        .collect();
    assert_eq!(csvs.len(), 2);
    for path in csvs {
        let rows = read_csv(&path);
        assert_eq!(rows[0], ["iter", "f", "gradnorm", "alpha", "grad_evals", "value_evals", "cum_seconds"]);
        let f: Vec<f64> = rows[1..].iter().map(|r| r[1].parse().unwrap()).collect();
        assert!(f.windows(2).all(|w| w[1] <= w[0]), "{}", path.display());
    }
    assert!(dir.path().join(PLOT_SCRIPT_FILE).exists());
}

#[test]
fn reruns_are_identical_apart_from_timing() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let methods = ["gk+", "bfgs", "empty+"];
    run_suite(&config(a.path(), &methods), Path::new("")).unwrap();
    run_suite(&config(b.path(), &methods), Path::new("")).unwrap();
    let ma: Manifest = serde_json::from_str(&fs::read_to_string(a.path().join(MANIFEST_FILE)).unwrap()).unwrap();
    let mb: Manifest = serde_json::from_str(&fs::read_to_string(b.path().join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(ma.runs, mb.runs);
    for run in &ma.runs {
        let name = run.csv.as_ref().unwrap();
        assert_eq!(without_timing(&read_csv(&a.path().join(name))), without_timing(&read_csv(&b.path().join(name))));
    }
    assert_eq!(fs::read(a.path().join(PROFILE_FILE)).unwrap(), fs::read(b.path().join(PROFILE_FILE)).unwrap());
}

#[test]
fn manifest_records_politician_and_termination() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_suite(&config(dir.path(), &["bfgs+", "cg"]), Path::new("")).unwrap();
    let m = &report.manifest;
    assert_eq!(m.schema_version, 1);
    assert_eq!(m.config_hash.len(), 64);
    assert_eq!(m.runs[0].method, "bfgs+");
    assert_eq!(m.runs[0].politician, "geometric");
    assert_eq!(m.runs[1].politician, "oracle");
    assert!(m.runs.iter().all(|r| !r.termination.is_empty()));
}

fn bench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_politician-bench"))
}

#[test]
fn cli_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let ok = bench()
        .args(["run", "--problem", "nesterov", "--n", "10", "--method", "sd", "--method", "sd+", "--budget", "20", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(ok.code(), Some(0));
    assert!(dir.path().join(MANIFEST_FILE).exists());

    let bad_method = bench()
        .args(["run", "--problem", "nesterov", "--n", "10", "--method", "newton", "--out"])
        .arg(dir.path().join("never"))
        .status()
        .unwrap();
    assert_eq!(bad_method.code(), Some(2));
    assert!(!dir.path().join("never").exists());

    let cfg = dir.path().join("bad.json");
    fs::write(&cfg, "{ not json").unwrap();
    let bad_config = bench().args(["run", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(bad_config.code(), Some(2));

    let cfg = dir.path().join("good.json");
    fs::write(&cfg, serde_json::to_string(&config(&dir.path().join("from_config"), &["cg+"])).unwrap()).unwrap();
    let from_config = bench().args(["run", "--config"]).arg(&cfg).args(["--budget", "5"]).status().unwrap();
    assert_eq!(from_config.code(), Some(0));
    let m: Manifest = serde_json::from_str(&fs::read_to_string(dir.path().join("from_config").join(MANIFEST_FILE)).unwrap()).unwrap();
    assert_eq!(m.config.budget, 5);
}
