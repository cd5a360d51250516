use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use kernsel::KnownDensity;
use serde_json::Value;
use tempfile::TempDir;

fn kernsel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kernsel"))
        .args(args)
        .env_remove("KERNSEL_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn header(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_string()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Writes a seeded sample with the tool itself and returns its path.
fn sample_file(dir: &TempDir, density: &str, n: usize, seed: u64) -> String {
    let out = dir.path().join(format!("sample-{density}-{n}-{seed}"));
    let o = kernsel(&[
        "sample",
        "--density",
        density,
        "--n",
        &n.to_string(),
        "--seed",
        &seed.to_string(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    out.join("sample.txt").to_str().unwrap().to_string()
}

#[test]
fn selection_csv_schema_is_stable() {
    let dir = TempDir::new().unwrap();
    let input = sample_file(&dir, "std-gaussian", 100, 1);
    let out = dir.path().join("sel");
    let o = kernsel(&[
        "select",
        "--family",
        "parzen",
        "--a",
        "0",
        "--h-grid",
        "paper",
        "--penalty",
        "optimal",
        "--input",
        &input,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = out.join("selection.csv");
    assert_eq!(
        header(&csv),
        "kernel_index,family_params,contrast,penalty,criterion,complexity,selected_flag"
    );
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 51);
    let flagged = text.lines().skip(1).filter(|l| l.ends_with(",1")).count();
    assert_eq!(flagged, 1);
    let m = json(&out.join("manifest.json"));
    for key in [
        "command",
        "config",
        "master_seed",
        "version",
        "timestamp",
        "files",
    ] {
        assert!(m.get(key).is_some(), "manifest lacks {key}");
    }
    assert_eq!(m["command"], "select");
    assert_eq!(m["files"], serde_json::json!(["selection.csv"]));
}

#[test]
fn sweep_csv_schemas_and_row_count() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("sw");
    let o = kernsel(&[
        "sweep",
        "--scenario",
        "parzen",
        "--a",
        "2",
        "--n",
        "100",
        "--reps",
        "50",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        header(&out.join("sweep.csv")),
        "kappa,replication,selected_param,complexity,risk,oracle_risk"
    );
    assert_eq!(
        header(&out.join("sweep_summary.csv")),
        "kappa,median_complexity,median_risk_ratio"
    );
    assert_eq!(
        fs::read_to_string(out.join("sweep.csv"))
            .unwrap()
            .lines()
            .count(),
        41 * 50 + 1
    );
    assert_eq!(
        fs::read_to_string(out.join("sweep_summary.csv"))
            .unwrap()
            .lines()
            .count(),
        42
    );
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["master_seed"], 7);
    assert_eq!(
        m["files"],
        serde_json::json!(["sweep.csv", "sweep_summary.csv"])
    );
}

#[test]
fn sweeps_are_bitwise_reproducible() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = kernsel(&[
            "sweep",
            "--scenario",
            "histogram",
            "--density",
            "triangular",
            "--reps",
            "10",
            "--seed",
            "3",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        (
            fs::read(out.join("sweep.csv")).unwrap(),
            fs::read(out.join("sweep_summary.csv")).unwrap(),
        )
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = TempDir::new().unwrap();
    let flag = dir.path().join("flag");
    let env = dir.path().join("env");
    let base = [
        "sweep",
        "--scenario",
        "bias-dominant",
        "--reps",
        "5",
        "--out",
    ];
    let o = kernsel(&[&base[..], &[flag.to_str().unwrap(), "--seed", "11"]].concat());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = Command::new(env!("CARGO_BIN_EXE_kernsel"))
        .args([&base[..], &[env.to_str().unwrap()]].concat())
        .env("KERNSEL_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        fs::read(flag.join("sweep.csv")).unwrap(),
        fs::read(env.join("sweep.csv")).unwrap()
    );
}

#[test]
fn flags_override_config_file() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"scenario": "bias-dominant", "n": 60, "reps": 2, "seed": 1}"#,
    )
    .unwrap();
    let out = dir.path().join("o");
    let o = kernsel(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--reps",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        fs::read_to_string(out.join("sweep.csv"))
            .unwrap()
            .lines()
            .count(),
        3 * 4 + 1
    );
    let m = json(&out.join("manifest.json"));
    assert_eq!(m["config"]["experiment"]["n"], 60);

    fs::write(&cfg, r#"{"scenario": "bias-dominant", "unknown_key": 1}"#).unwrap();
    assert_eq!(
        code(&kernsel(&["sweep", "--config", cfg.to_str().unwrap()])),
        2
    );
}

#[test]
fn sampler_output_round_trips() {
    let dir = TempDir::new().unwrap();
    let path = sample_file(&dir, "triangular", 257, 42);
    let read: Vec<f64> = fs::read_to_string(&path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.parse().unwrap())
        .collect();
    let expected = KnownDensity::Triangular2x.sample(257, 42);
    assert_eq!(read.len(), expected.len());
    assert!(read
        .iter()
        .zip(&expected)
        .all(|(a, b)| a.to_bits() == b.to_bits()));

    let stdout = kernsel(&[
        "sample",
        "--density",
        "triangular",
        "--n",
        "257",
        "--seed",
        "42",
    ]);
    assert_eq!(
        String::from_utf8(stdout.stdout).unwrap(),
        fs::read_to_string(&path).unwrap()
    );
}

#[test]
fn selection_reads_csv_columns() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("x.csv");
    fs::write(&csv, "id,value\n1,0.12\n2,0.55\n3,0.91\n4,0.34\n").unwrap();
    let out = dir.path().join("o");
    let o = kernsel(&[
        "select",
        "--family",
        "histogram",
        "--dims",
        "1-4",
        "--penalty",
        "minimal",
        "--input",
        csv.to_str().unwrap(),
        "--column",
        "value",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        fs::read_to_string(out.join("selection.csv"))
            .unwrap()
            .lines()
            .count(),
        5
    );
}

#[test]
fn unpenalized_selection_picks_smallest_bandwidth() {
    let dir = TempDir::new().unwrap();
    let input = sample_file(&dir, "std-gaussian", 100, 9);
    let out = dir.path().join("o");
    let o = kernsel(&[
        "select",
        "--family",
        "parzen",
        "--penalty",
        "none",
        "--input",
        &input,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(out.join("selection.csv")).unwrap();
    let selected = text.lines().find(|l| l.ends_with(",1")).unwrap();
    assert!(
        selected.starts_with("49,\"parzen(a=0,h=0.01)\""),
        "{selected}"
    );
}

#[test]
fn diagnostics_on_uniform_histograms() {
    let dir = TempDir::new().unwrap();
    let input = sample_file(&dir, "uniform", 40, 5);
    let out = dir.path().join("d");
    let o = kernsel(&[
        "diagnose",
        "--family",
        "histogram",
        "--dims",
        "1-6",
        "--density",
        "uniform",
        "--input",
        &input,
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let d = json(&out.join("diagnostics.json"));
    let kernels = d["kernels"].as_array().unwrap();
    assert_eq!(kernels.len(), 6);
    assert!(kernels[0]["true_risk"].as_f64().unwrap().abs() <= 1e-8);
    for k in kernels {
        assert!(k["ustat_residual"].as_f64().unwrap().abs() <= 1e-6);
        for key in [
            "bias",
            "variance_term",
            "ideal_penalty",
            "cross_term",
            "estimation_error",
        ] {
            assert!(k[key].is_number(), "missing {key}");
        }
    }
    assert!(d["gamma"]["gamma"].is_number());
    assert!(d["upsilon"]["upsilon_lower"].is_number());
    assert_eq!(d["tail_certificates"], "not certified");
}

#[test]
fn configuration_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let input = sample_file(&dir, "uniform", 10, 1);
    let cases: Vec<Vec<&str>> = vec![
        vec!["sweep", "--scenario", "bias-dominant", "--beta", "0.4"],
        vec![
            "diagnose",
            "--family",
            "histogram",
            "--density",
            "std-gaussian",
            "--input",
            &input,
        ],
        vec!["diagnose", "--family", "histogram", "--input", &input],
        vec![
            "select",
            "--family",
            "parzen",
            "--penalty",
            "kappa:x",
            "--input",
            &input,
        ],
        vec![
            "select", "--family", "fourier", "--dims", "2", "--input", &input,
        ],
        vec![
            "select",
            "--family",
            "parzen",
            "--input",
            &input,
            "--no-such-flag",
        ],
        vec!["select", "--input", &input],
        vec!["sample", "--n", "5"],
    ];
    for args in cases {
        let o = kernsel(&args);
        assert_eq!(code(&o), 2, "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn data_errors_exit_3() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "0.1\n# note\n0.2\n0.3x\n").unwrap();
    let o = kernsel(&[
        "select",
        "--family",
        "parzen",
        "--input",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("bad.txt:4"), "{}", stderr(&o));

    let gaussian = sample_file(&dir, "std-gaussian", 20, 2);
    let o = kernsel(&["select", "--family", "histogram", "--input", &gaussian]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));

    let empty = dir.path().join("empty.txt");
    fs::write(&empty, "# nothing\n").unwrap();
    assert_eq!(
        code(&kernsel(&[
            "select",
            "--family",
            "parzen",
            "--input",
            empty.to_str().unwrap()
        ])),
        3
    );

    let missing = dir.path().join("missing.txt");
    assert_eq!(
        code(&kernsel(&[
            "select",
            "--family",
            "parzen",
            "--input",
            missing.to_str().unwrap()
        ])),
        3
    );
}
