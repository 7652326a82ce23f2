use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_ohmnet");

fn ohmnet(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("OHMNET_SEED")
        .env_remove("OHMNET_DIM")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = ohmnet(args);
    assert!(
        out.status.success(),
        "ohmnet {args:?} failed:\n{}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn synth(dir: &Path) {
    ok(&["synth", "--out", p(dir), "--nodes", "60", "--p-in", "0.2", "--p-out", "0.02", "--seed", "4"]);
}

const QUICK: &[&str] = &["--dim", "8", "--walks", "2", "--length", "20", "--window", "3", "--outer-iters", "2"];

fn train(data: &Path, out: &Path, extra: &[&str]) {
    let layers = data.join("layers.tsv");
    let hierarchy = data.join("hierarchy.txt");
    let mut args = vec!["train", "--layers", p(&layers), "--hierarchy", p(&hierarchy), "--out", p(out)];
    args.extend_from_slice(QUICK);
    args.extend_from_slice(extra);
    ok(&args);
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn pipeline_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth(&data);
    for file in ["layers.tsv", "hierarchy.txt", "labels.txt", "manifest.json"] {
        assert!(data.join(file).exists(), "{file}");
    }

    let walks = tmp.path().join("walks");
    let layers = data.join("layers.tsv");
    ok(&["walk", "--layers", p(&layers), "--out", p(&walks), "--walks", "2", "--length", "20"]);

    let emb = tmp.path().join("emb");
    train(&data, &emb, &["--walks-dir", p(&walks)]);
    let m = manifest(&emb);
    assert_eq!(m["command"], "train");
    assert_eq!(m["config"]["dim"], 8);
    assert!(m["inputs"].as_object().unwrap().keys().any(|k| k.ends_with("hierarchy.txt")));

    let eval = tmp.path().join("eval");
    let labels = data.join("labels.txt");
    ok(&[
        "eval", "--layers", p(&layers), "--embeddings", p(&emb), "--labels", p(&labels),
        "--out", p(&eval), "--folds", "3", "--min-annotated", "5",
    ]);
    let report = fs::read_to_string(eval.join("report.tsv")).unwrap();
    assert!(report.contains("layer\tfunction\tauroc\tauprc"), "{report}");
    assert!(report.lines().any(|l| l.starts_with("aggregate\tpairs")), "{report}");
    let rows = report.lines().filter(|l| l.starts_with("layer") && !l.starts_with("layer\t")).count();
    assert!(rows > 0, "{report}");

    let transfer = tmp.path().join("transfer");
    let hierarchy = data.join("hierarchy.txt");
    ok(&[
        "transfer", "--layers", p(&layers), "--hierarchy", p(&hierarchy), "--embeddings", p(&emb),
        "--labels", p(&labels), "--target", "layer0", "--min-annotated", "5", "--out", p(&transfer),
    ]);
    assert!(fs::read_to_string(transfer.join("transfer.tsv")).unwrap().contains("aggregate"));

    let proj = tmp.path().join("proj");
    ok(&["project", "--layers", p(&layers), "--embeddings", p(&emb), "--element", "root", "--out", p(&proj)]);
    let points = fs::read_to_string(proj.join("projection.tsv")).unwrap();
    assert_eq!(points.lines().next(), Some("node\tx\ty"));
    assert!(points.lines().count() > 10);
    assert!(proj.join("vectors.emb").exists());
}

#[test]
fn lambda_zero_matches_independent() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth(&data);
    let coupled = tmp.path().join("coupled");
    let independent = tmp.path().join("independent");
    train(&data, &coupled, &["--lambda", "0"]);
    train(&data, &independent, &["--independent"]);
    for layer in 0..4 {
        let file = format!("layer{layer}.emb");
        let a = fs::read(coupled.join(&file)).unwrap();
        let b = fs::read(independent.join(&file)).unwrap();
        assert!(a == b, "{file} differs");
    }
    assert!(coupled.join("root.emb").exists());
    assert!(!independent.join("root.emb").exists());
}

#[test]
fn sequential_reruns_are_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth(&data);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    train(&data, &a, &[]);
    train(&data, &b, &[]);
    for entry in fs::read_dir(&a).unwrap() {
        let name = entry.unwrap().file_name();
        if name == "manifest.json" {
            continue;
        }
        assert!(fs::read(a.join(&name)).unwrap() == fs::read(b.join(&name)).unwrap(), "{name:?}");
    }
    assert_eq!(manifest(&a)["inputs"], manifest(&b)["inputs"]);
}

#[test]
fn collapsed_baseline_feeds_eval() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    synth(&data);
    let emb = tmp.path().join("emb");
    train(&data, &emb, &["--collapsed"]);
    let tables: Vec<_> = fs::read_dir(&emb)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".emb"))
        .collect();
    assert_eq!(tables.len(), 1, "{tables:?}");

    let eval = tmp.path().join("eval");
    ok(&[
        "eval", "--layers", p(&data.join("layers.tsv")), "--embeddings", p(&emb),
        "--labels", p(&data.join("labels.txt")), "--out", p(&eval), "--folds", "3", "--min-annotated", "5",
    ]);
    assert!(eval.join("report.tsv").exists());
}

#[test]
fn every_subcommand_has_help() {
    for sub in ["synth", "walk", "train", "eval", "transfer", "project"] {
        let out = ok(&[sub, "--help"]);
        let text = String::from_utf8_lossy(&out.stdout);
        assert!(text.contains("--out"), "{sub}: {text}");
        if sub == "train" {
            for flag in ["--dim", "--lambda", "--walks", "--length", "--p", "--q", "--window", "--outer-iters", "--mode", "--seed", "--threads"] {
                assert!(text.contains(flag), "train help lacks {flag}");
            }
            assert!(text.contains("[default: 128]"), "{text}");
        }
    }
}

#[test]
fn failures_exit_nonzero_with_a_message() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = tmp.path().join("nope.tsv");
    let out = ohmnet(&["walk", "--layers", p(&missing), "--out", p(tmp.path())]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.tsv"));

    let out = ohmnet(&["train", "--bogus"]);
    assert!(!out.status.success());

    let data = tmp.path().join("data");
    synth(&data);
    let out = ohmnet(&["train", "--layers", p(&data.join("layers.tsv")), "--out", p(&tmp.path().join("e")), "--dim", "0"]);
    assert!(!out.status.success());
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());

    let out = ohmnet(&["synth", "--out", p(&tmp.path().join("s")), "--num-layers", "2", "--depth", "3"]);
    assert!(!out.status.success());
}

#[test]
fn flags_beat_config_beat_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let config = tmp.path().join("run.toml");
    fs::write(&config, "nodes = 40\n[synth]\ncommunities = 2\n").unwrap();

    let run = |name: &str, extra: &[&str]| {
        let out = tmp.path().join(name);
        let mut args = vec!["synth", "--out", p(&out)];
        args.extend_from_slice(extra);
        let status = Command::new(BIN)
            .args(&args)
            .env("OHMNET_NODES", "30")
            .env("OHMNET_SEED", "9")
            .output()
            .unwrap();
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        manifest(&out)
    };

    let env_only = run("env", &[]);
    assert_eq!(env_only["config"]["nodes"], 30);
    assert_eq!(env_only["seed"], 9);

    let from_file = run("file", &["--config", p(&config)]);
    assert_eq!(from_file["config"]["nodes"], 40);
    assert_eq!(from_file["config"]["communities"], 2);

    let flag = run("flag", &["--config", p(&config), "--nodes", "50"]);
    assert_eq!(flag["config"]["nodes"], 50);
    assert_eq!(flag["config"]["communities"], 2);
}
