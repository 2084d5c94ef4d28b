use std::path::Path;
use std::process::{Command, Output};

use fk_coarse::records::read_result_file;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fk-coarse"))
}

fn run(args: &[&str], out: &Path) -> Output {
    bin()
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn values(path: &Path) -> Vec<(String, String, String, String)> {
    read_result_file(path)
        .unwrap()
        .records
        .iter()
        .map(|r| {
            (
                r["metric"].to_string(),
                r["value"].to_string(),
                r["std_err"].to_string(),
                r["replicas"].to_string(),
            )
        })
        .collect()
}

const SMALL_CROSSING: &[&str] = &[
    "crossing",
    "--seed",
    "5",
    "--set",
    "lattice.n=8",
    "--set",
    "crossing.l=2",
    "--set",
    "model.q=2",
    "--set",
    "model.interaction=linear",
    "--set",
    "model.slope=0.7",
    "--set",
    "schedule.replicas=4",
    "--set",
    "schedule.sweeps=20",
    "--set",
    "schedule.burn_in=10",
    "--set",
    "schedule.thin=5",
];

#[test]
fn dlr_failure_record() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["dlr-failure", "--seed", "1"], dir.path());
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let file = read_result_file(&dir.path().join("dlr-failure.jsonl")).unwrap();
    let margin = file
        .records
        .iter()
        .find(|r| r["metric"] == "margin")
        .unwrap();
    let v: f64 = margin["value"].as_str().unwrap().parse().unwrap();
    assert!((v - 1.0 / 44.0).abs() < 1e-12);
    let csv = std::fs::read_to_string(dir.path().join("dlr-failure.csv")).unwrap();
    assert!(csv.starts_with("experiment,config_hash,metric,value,std_err,replicas,timestamp\n"));
}

#[test]
fn config_file_sections_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "seed = 4\n[dlr]\nlambda = 0.3\np = 0.6\n[model]\nq = 3\n",
    )
    .unwrap();
    let o = bin()
        .args(["dlr-failure", "--config"])
        .arg(&cfg)
        .args(["--set", "dlr.p=0.5", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let header = read_result_file(&dir.path().join("dlr-failure.jsonl"))
        .unwrap()
        .header;
    assert_eq!(header["seed"], "4");
    assert_eq!(header["config"]["dlr.lambda"], "0.3");
    assert_eq!(header["config"]["dlr.p"], "0.5");
    assert_eq!(header["config"]["model.q"], "3.0");
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    for (set, field) in [
        ("lattice.side=3", "lattice.side"),
        ("dlr.lambda=1.5", "dlr.lambda"),
        ("model.q=0.5", "model.q"),
    ] {
        let o = run(&["dlr-failure", "--set", set], dir.path());
        assert_eq!(o.status.code(), Some(3));
        assert!(String::from_utf8_lossy(&o.stderr).contains(field), "{set}");
    }
    let o = run(
        &[
            "phase-labels",
            "--set",
            "lattice.n=12",
            "--set",
            "lattice.l=4",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("lattice.l"));
    let o = run(
        &[
            "crossing",
            "--set",
            "schedule.sweeps=10",
            "--set",
            "schedule.burn_in=10",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schedule.sweeps"));
}

#[test]
fn reproduce_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(SMALL_CROSSING, dir.path());
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let file = dir.path().join("crossing.jsonl");
    let r = bin().arg("reproduce").arg(&file).output().unwrap();
    assert_eq!(
        r.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&r.stdout)
    );
}

#[test]
fn altered_seed_is_detected() {
    let dir = tempfile::tempdir().unwrap();
    run(SMALL_CROSSING, dir.path());
    let file = dir.path().join("crossing.jsonl");
    let text =
        std::fs::read_to_string(&file)
            .unwrap()
            .replacen("\"seed\":\"5\"", "\"seed\":\"6\"", 1);
    std::fs::write(&file, text).unwrap();
    let r = bin().arg("reproduce").arg(&file).output().unwrap();
    assert_eq!(r.status.code(), Some(2));
    let report = String::from_utf8_lossy(&r.stdout);
    assert!(report.contains("config_hash"));
    assert!(report.contains("value"));
}

#[test]
fn altered_replica_count_is_attributed() {
    let dir = tempfile::tempdir().unwrap();
    run(SMALL_CROSSING, dir.path());
    let file = dir.path().join("crossing.jsonl");
    let text = std::fs::read_to_string(&file).unwrap().replacen(
        "\"schedule.replicas\":\"4\"",
        "\"schedule.replicas\":\"6\"",
        1,
    );
    std::fs::write(&file, text).unwrap();
    let r = bin().arg("reproduce").arg(&file).output().unwrap();
    assert_eq!(r.status.code(), Some(2));
    let report = String::from_utf8_lossy(&r.stdout);
    assert!(
        report.contains("(probability): replicas 4 -> 6"),
        "{report}"
    );
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let one = tempfile::tempdir().unwrap();
    let two = tempfile::tempdir().unwrap();
    for (dir, workers) in [(&one, "1"), (&two, "3")] {
        let o = bin()
            .env("FK_COARSE_WORKERS", workers)
            .args(SMALL_CROSSING)
            .arg("--out")
            .arg(dir.path())
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(
        values(&one.path().join("crossing.jsonl")),
        values(&two.path().join("crossing.jsonl"))
    );
}

#[test]
fn small_corpus_has_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &[
            "verify",
            "--set",
            "verify.max_edges=2",
            "--set",
            "verify.q_grid=1,2",
        ],
        dir.path(),
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let file = read_result_file(&dir.path().join("verify.jsonl")).unwrap();
    assert!(file.violations.is_empty());
    assert!(file
        .records
        .iter()
        .any(|r| r["metric"] == "violations" && r["value"] == "0.0000000000000000e0"));
}

#[test]
fn schema_lists_every_key() {
    let o = bin().arg("schema").output().unwrap();
    let text = String::from_utf8_lossy(&o.stdout);
    for d in fk_coarse::config::SCHEMA {
        assert!(text.contains(d.key));
    }
}
