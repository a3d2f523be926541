mod common;

use std::fs;
use std::path::Path;

use common::*;

fn stderr(o: &std::process::Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn ingested(dir: &Path) -> std::path::PathBuf {
    let log = write_fixture(dir);
    let out = dir.join("out");
    ok(
        &out,
        &[
            "ingest",
            "--input",
            &log.display().to_string(),
            "--format",
            "tsv",
        ],
    );
    out
}

#[test]
fn unknown_subcommand_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(socdim(dir.path(), &["frobnicate"]).status.code(), Some(2));
}

#[test]
fn config_errors_are_listed_together() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(
        &cfg,
        "[train]\ndim = 0\n\n[cluster]\nk = 0\n\n[polarization]\ncoverage = 1.5\nlag = 0\n",
    )
    .unwrap();
    let o = socdim(
        &dir.path().join("out"),
        &["--config", cfg.to_str().unwrap(), "cluster"],
    );
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    for needle in [
        "train.dim",
        "cluster.k",
        "polarization.coverage",
        "polarization.lag",
    ] {
        assert!(err.contains(needle), "{needle} missing from:\n{err}");
    }
}

#[test]
fn unknown_config_key_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("typo.toml");
    fs::write(&cfg, "[train]\ndimension = 32\n").unwrap();
    let o = socdim(
        &dir.path().join("out"),
        &["--config", cfg.to_str().unwrap(), "cluster"],
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dimension"));
}

#[test]
fn missing_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = socdim(dir.path(), &["ingest", "--input", "/nonexistent/log.jsonl"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn strict_mode_requires_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let out = ingested(dir.path());
    let o = socdim(&out, &["--strict", "train", "--dim", "8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("seed"));
    let log = dir.path().join("log.tsv").display().to_string();
    let o = socdim(
        &out,
        &[
            "--strict", "null", "shuffle", "--input", &log, "--format", "tsv",
        ],
    );
    assert_eq!(o.status.code(), Some(2));

    let o = socdim(&out, &["train", "--dim", "8"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("note: no training seed"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = ingested(dir.path());
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "[train]\ndim = 8\nepochs = 2\nseed = 4\n").unwrap();
    ok(
        &out,
        &["--config", cfg.to_str().unwrap(), "train", "--dim", "12"],
    );
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifests/train.json")).unwrap())
            .unwrap();
    let train = &m["config"]["train"];
    assert_eq!(
        (
            train["dim"].as_u64(),
            train["epochs"].as_u64(),
            train["seed"].as_u64()
        ),
        (Some(12), Some(2), Some(4))
    );
    assert_eq!(train["negative"].as_u64(), Some(35));
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let log = write_fixture(dir.path());
    let env_out = dir.path().join("from-env");
    let o = bin()
        .env("SOCDIM_OUT_DIR", &env_out)
        .args([
            "ingest",
            "--input",
            log.to_str().unwrap(),
            "--format",
            "tsv",
        ])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(env_out.join("vocab.tsv").is_file());
    assert!(env_out.join("manifests/ingest.json").is_file());
}

#[test]
fn manifest_records_inputs_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = ingested(dir.path());
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("manifests/ingest.json")).unwrap())
            .unwrap();
    let log = dir.path().join("log.tsv");
    assert_eq!(
        m["inputs"][log.display().to_string()].as_str(),
        Some(socdim::sha256_hex(&fs::read(&log).unwrap()).as_str())
    );
    for rel in ["vocab.tsv", "pairs.tsv", "monthly.tsv"] {
        assert_eq!(
            m["outputs"][rel].as_str(),
            Some(socdim::sha256_hex(&fs::read(out.join(rel)).unwrap()).as_str()),
            "{rel}"
        );
    }
    assert!(m["wall_time_secs"].as_f64().unwrap() >= 0.0);
}

#[test]
fn pipeline_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_pipeline(dir.path());

    // Ten disjoint pairs from the democrats/Conservative seed.
    ok(
        &out,
        &[
            "dimension",
            "build",
            "--seed",
            "democrats:Conservative",
            "--name",
            "ten",
            "--k",
            "10",
        ],
    );
    let pairs = fs::read_to_string(out.join("dimensions/ten.pairs.tsv")).unwrap();
    assert_eq!(pairs.lines().count(), 11);
    assert!(pairs
        .lines()
        .nth(1)
        .unwrap()
        .contains("democrats\tConservative"));

    // Decomposition rows re-summed from the TSV.
    let text = fs::read_to_string(out.join("polarize/decompose.tsv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let mut rows = 0;
    for line in lines {
        let f: Vec<f64> = line
            .split('\t')
            .skip(1)
            .map(|v| v.parse().unwrap_or(f64::NAN))
            .collect();
        let get = |name: &str| f[col(name) - 1];
        let sum = get("delta_new") + get("delta_existing");
        assert!(
            (sum - (get("mean_current") - get("mean_previous"))).abs() < 1e-9,
            "{line}"
        );
        assert!((sum - get("observed_change")).abs() < 1e-9, "{line}");
        rows += 1;
    }
    assert!(rows > 0);

    // Every analysis wrote its manifest.
    for a in ANALYSES {
        let slug = if a == "wing" {
            "polarize-wing-left".to_string()
        } else {
            format!("polarize-{a}")
        };
        assert!(
            out.join("manifests").join(format!("{slug}.json")).is_file(),
            "{slug}"
        );
    }
}

#[test]
fn replay_matches_and_detects_changes() {
    let dir = tempfile::tempdir().unwrap();
    let out = ingested(dir.path());
    ok(&out, &["train", "--seed", "9", "--dim", "8"]);
    let manifest = out.join("manifests/train.json");

    // Default target is `replay/` inside the original output directory.
    let o = bin()
        .env_remove("SOCDIM_OUT_DIR")
        .args(["replay", "--manifest"])
        .arg(&manifest)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("match\tembedding.bin"));
    assert_eq!(
        fs::read(out.join("replay/embedding.bin")).unwrap(),
        fs::read(out.join("embedding.bin")).unwrap()
    );

    // A tampered output hash is reported and exits 4.
    let text = fs::read_to_string(&manifest).unwrap();
    let mut m: serde_json::Value = serde_json::from_str(&text).unwrap();
    m["outputs"]["embedding.bin"] = serde_json::Value::String("0".repeat(64));
    let tampered = dir.path().join("tampered.json");
    fs::write(&tampered, serde_json::to_string(&m).unwrap()).unwrap();
    let o = socdim(
        &dir.path().join("again"),
        &["replay", "--manifest", tampered.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&o.stdout).contains("DIFFERS\tembedding.bin"));

    // A changed input refuses to replay.
    let pairs = out.join("pairs.tsv");
    let mut bytes = fs::read(&pairs).unwrap();
    bytes.extend_from_slice(b"\n");
    fs::write(&pairs, bytes).unwrap();
    let o = socdim(
        &dir.path().join("again"),
        &["replay", "--manifest", manifest.to_str().unwrap()],
    );
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn polarize_from_assignment_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_pipeline(dir.path());
    let assignment = out.join("null/subset.tsv").display().to_string();
    let alt = dir.path().join("alt");
    ok(
        &alt,
        &[
            "polarize",
            "selection",
            "--assignment",
            &assignment,
            "--monthly",
            &out.join("monthly.tsv").display().to_string(),
            "--vocab",
            &out.join("vocab.tsv").display().to_string(),
        ],
    );
    assert!(alt.join("polarize/selection.tsv").is_file());
}
