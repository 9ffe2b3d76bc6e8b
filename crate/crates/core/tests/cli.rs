use serde_json::Value;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_shadowqae"))
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

const SMALL: [&str; 8] = [
    "--set", "qubits=3", "--set", "snapshots=100", "--set", "iterations=64", "--set", "repeats=5",
];

fn header(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

fn without_timing(path: &Path) -> Value {
    let mut v: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("elapsed_seconds");
    v
}

#[test]
fn run_smoke_and_repeatability() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut args = vec!["run"];
    args.extend(SMALL);
    assert_eq!(run(&args, a.path()).status.code(), Some(0));
    assert_eq!(run(&args, b.path()).status.code(), Some(0));
    let ja = without_timing(&a.path().join("run.json"));
    assert_eq!(ja, without_timing(&b.path().join("run.json")));
    assert_eq!(ja["config"]["seed"], 42);
    assert!(ja["estimate"].as_f64().unwrap().is_finite());
    assert_eq!(ja["true_fidelity"], 1.0);
}

#[test]
fn echoed_configuration_reproduces_the_run() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut args = vec!["run", "--seed", "9", "--set", "noise.model=twirl", "--set", "noise.theta=pi/3"];
    args.extend(SMALL);
    assert!(run(&args, a.path()).status.success());
    let first = without_timing(&a.path().join("run.json"));
    let settings = first["config"]["settings"].as_object().unwrap();
    let mut replay: Vec<String> = vec!["run".into(), "--seed".into(), first["config"]["seed"].to_string()];
    for (k, v) in settings {
        replay.push("--set".into());
        replay.push(format!("{k}={}", v.as_str().unwrap()));
    }
    let replay: Vec<&str> = replay.iter().map(String::as_str).collect();
    assert!(run(&replay, b.path()).status.success());
    assert_eq!(first, without_timing(&b.path().join("run.json")));
}

#[test]
fn config_file_and_records() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.conf");
    fs::write(
        &cfg,
        "# small run\nqubits = 4\nsnapshots = 20\niterations = 32\nrepeats = 3\n\n[noise]\nmodel = pauli-z\np = 0.25\n\n[experiment]\nrecords = seeds\n",
    )
    .unwrap();
    let out = d.path().join("o");
    let o = run(&["run", "--config", cfg.to_str().unwrap()], &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let j = without_timing(&out.join("run.json"));
    assert_eq!(j["config"]["settings"]["noise.model"], "pauli-z");
    let records: Value = serde_json::from_str(&fs::read_to_string(out.join("records.json")).unwrap()).unwrap();
    let parts = records.as_array().unwrap();
    assert_eq!(parts.len(), 1);
    assert_eq!(parts[0].as_array().unwrap().len(), 20);
    assert!(parts[0][0]["clifford_seed"].is_u64());
}

#[test]
fn usage_errors_exit_with_two() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["run", "--set", "iterations=100"], d.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("power of two"));

    let o = run(&["sweep", "--set", "experiment.values="], d.path());
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["mscaling", "--set", "experiment.qubit_values=5"], d.path());
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["histogram", "--set", "experiment.repetitions=10"], d.path());
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["run", "--set", "seed=3"], d.path());
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["run", "--set", "bogus=1"], d.path());
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["bounds", "--epsilon", "0", "--delta", "0.05"], d.path());
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["frobnicate"], d.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bounds_examples() {
    let d = tempfile::tempdir().unwrap();
    let o = run(&["bounds", "--epsilon", "0.1", "--delta", "0.05", "--qubits", "9"], d.path());
    assert!(o.status.success());
    let j: Value = serde_json::from_str(&fs::read_to_string(d.path().join("bounds.json")).unwrap()).unwrap();
    let mom = &j["median_of_means"];
    assert_eq!(mom["partitions"], 54);
    assert_eq!(mom["snapshots"], 7200);
    assert_eq!(mom["repeats"], 59);
    assert_eq!(mom["iterations"], 115714);
    assert_eq!(j["proposition"]["feasible"], false);

    let o = run(&["bounds", "--epsilon", "0.1", "--delta", "0.5", "--qubits", "9"], d.path());
    assert!(o.status.success());
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("rejected"));
    let j: Value = serde_json::from_str(&fs::read_to_string(d.path().join("bounds.json")).unwrap()).unwrap();
    assert_eq!(j["proposition"]["feasible"], true);
    assert!(j["median_of_means"]["rejected"].is_string());
}

#[test]
fn output_headers() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    let small = ["--set", "snapshots=50", "--set", "iterations=16", "--set", "repeats=3"];

    let mut a = vec!["sweep", "--set", "qubits=3", "--set", "experiment.repetitions=4", "--svg"];
    a.extend(small);
    assert!(run(&a, p).status.success());
    assert_eq!(header(&p.join("sweep.csv")), "param,true_fidelity,est_mean,est_std,reps");
    assert!(p.join("sweep.svg").exists());

    let mut a = vec![
        "mscaling", "--set", "experiment.qubit_values=2,3,4", "--set", "experiment.repetitions=20",
        "--set", "experiment.accuracy=0.2", "--set", "experiment.m_grid=8,16,32,64,128",
    ];
    a.extend(small);
    let o = run(&a, p);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(header(&p.join("mscaling.csv")), "n,d,m_selected");
    assert_eq!(header(&p.join("mscaling_grid.csv")), "n,m,mean,std,sem,inside");

    let mut a = vec!["histogram", "--set", "qubits=3", "--set", "experiment.repetitions=100"];
    a.extend(small);
    assert!(run(&a, p).status.success());
    assert_eq!(header(&p.join("estimates.csv")), "rep,estimate");
    assert_eq!(header(&p.join("histogram.csv")), "bin_lo,bin_hi,count");
}

#[test]
fn worker_count_does_not_change_output() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "sweep", "--set", "qubits=4", "--set", "snapshots=100", "--set", "iterations=32",
        "--set", "repeats=3", "--set", "experiment.repetitions=6",
    ];
    let mut one = args.to_vec();
    one.extend(["--workers", "1"]);
    let mut three = args.to_vec();
    three.extend(["--workers", "3"]);
    assert!(run(&one, a.path()).status.success());
    assert!(run(&three, b.path()).status.success());
    assert_eq!(
        fs::read(a.path().join("sweep.csv")).unwrap(),
        fs::read(b.path().join("sweep.csv")).unwrap()
    );
}
