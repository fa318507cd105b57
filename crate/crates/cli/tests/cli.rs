use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use medq::model::{forward, predict, ParameterSet};
use medq_cli::commands::TrainResult;
use medq_cli::output::Envelope;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn medq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_medq"))
        .args(args)
        .env_remove("MEDQ_THREADS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> Output {
    let out = medq(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Drops the fields that legitimately differ between reruns.
fn without_timing(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("timing");
    v["config"].as_object_mut().unwrap().remove("output");
    v
}

fn schema_check(v: &Value) {
    let schema: Value = serde_json::from_str(include_str!("../../../docs/result-schema.json")).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(v).map(|e| format!("{e} at {}", e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

fn out_path(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn generate_linear_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = out_path(&dir, "a.csv");
    let b = out_path(&dir, "b.csv");
    let base = ["generate", "--kind", "linear", "--dim", "10", "--n", "600", "--margin", "0.05", "--seed", "7"];
    ok(&[&base[..], &["--out", p(&a)]].concat());
    ok(&[&base[..], &["--out", p(&b)]].concat());
    let text = std::fs::read(&a).unwrap();
    assert_eq!(text, std::fs::read(&b).unwrap());
    let data = medq::data::load_csv(&a).unwrap();
    assert_eq!((data.len(), data.dim()), (600, 10));
    let prov = json(&dir.path().join("a.csv.provenance.json"));
    assert_eq!(prov["generator"], "linear-separable");
    assert_eq!(prov["seed"], 7);
}

#[test]
fn generate_validation_error_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = medq(&["generate", "--dim", "0", "--out", p(&out_path(&dir, "x.csv"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn generate_pca_and_digits() {
    let dir = tempfile::tempdir().unwrap();
    let raw = out_path(&dir, "raw.csv");
    ok(&["generate", "--kind", "digits", "--n", "40", "--seed", "1", "--out", p(&raw)]);
    let images = medq::data::load_raw_images(&raw).unwrap();
    assert_eq!(images.len(), 80);
    let reduced = out_path(&dir, "pca.csv");
    ok(&["generate", "--kind", "pca", "--images", p(&raw), "--dim", "5", "--n", "60", "--seed", "2", "--out", p(&reduced)]);
    let data = medq::data::load_csv(&reduced).unwrap();
    assert_eq!((data.len(), data.dim()), (60, 5));
    assert!(data.features().iter().flatten().all(|v| v.abs() <= std::f64::consts::PI + 1e-12));
}

#[test]
fn zero_epoch_training_reports_initial_accuracy() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_path(&dir, "r.json");
    ok(&["train", "--dim", "3", "--n-train", "40", "--n-test", "30", "--epochs", "0", "--seed", "5", "-o", p(&out)]);
    let v = json(&out);
    schema_check(&v);
    let env: Envelope<TrainResult> = serde_json::from_value(v).unwrap();
    let trial = &env.result.trial;
    assert_eq!(trial.best_epoch, 0);
    let init = ParameterSet::random(&env.result.circuit, &mut ChaCha8Rng::seed_from_u64(trial.seed));
    assert_eq!(trial.params, init);
    let cfg = &env.config;
    let (_, test) = medq_cli::commands::datasets(cfg).unwrap();
    let hits = test
        .examples()
        .iter()
        .filter(|ex| predict(&forward(&env.result.circuit, &init, ex.x).unwrap()) == ex.label)
        .count();
    assert_eq!(trial.test_accuracy, hits as f64 / test.len() as f64);
}

#[test]
fn train_is_deterministic_and_evaluate_agrees() {
    let dir = tempfile::tempdir().unwrap();
    let a = out_path(&dir, "a.json");
    let b = out_path(&dir, "b.json");
    let args = ["train", "--dim", "4", "--n-train", "60", "--n-test", "40", "--epochs", "10", "--seed", "3"];
    ok(&[&args[..], &["-o", p(&a)]].concat());
    ok(&[&args[..], &["-o", p(&b)]].concat());
    let (va, vb) = (json(&a), json(&b));
    assert_eq!(va["config_hash"], vb["config_hash"]);
    assert_eq!(without_timing(va.clone()), without_timing(vb));

    let e = out_path(&dir, "e.json");
    ok(&["evaluate", "--result", p(&a), "-o", p(&e)]);
    let ve = json(&e);
    schema_check(&ve);
    assert_eq!(ve["result"]["accuracy"], va["result"]["trial"]["test_accuracy"]);
    assert_eq!(ve["result"]["samples"], 40);
}

#[test]
fn small_medq_learns_two_dimensional_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_path(&dir, "r.json");
    ok(&[
        "train", "--model", "medq", "--layers", "1", "--n-qubits", "2", "--dim", "2", "--n-train", "20",
        "--n-test", "200", "--epochs", "300", "--validation-fraction", "0", "--data-seed", "4", "-o", p(&out),
    ]);
    let acc = json(&out)["result"]["trial"]["test_accuracy"].as_f64().unwrap();
    assert!(acc > 0.9, "test accuracy {acc}");
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = out_path(&dir, "exp.toml");
    std::fs::write(&cfg, "model = \"REUPLOADING\"\nlayers = 2\ndim = 3\nn_train = 30\nn_test = 20\nepochs = 4\nseed = 1\n").unwrap();
    let out = out_path(&dir, "r.json");
    ok(&["train", "--config", p(&cfg), "--seed", "9", "-o", p(&out)]);
    let v = json(&out);
    assert_eq!(v["config"]["model"], "REUPLOADING");
    assert_eq!(v["config"]["seed"], 9);
    assert_eq!(v["result"]["layers"], 2);

    std::fs::write(&cfg, "layerz = 2\n").unwrap();
    assert_eq!(medq(&["train", "--config", p(&cfg)]).status.code(), Some(2));
    assert_eq!(medq(&["train", "--model", "nope"]).status.code(), Some(2));
    assert_eq!(medq(&["train", "--model", "medq", "--n-qubits", "1", "--dim", "2"]).status.code(), Some(2));
}

#[test]
fn runtime_failure_exits_1() {
    let out = medq(&["evaluate", "--result", "/nonexistent/result.json"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_thread_count_exits_2() {
    let out = Command::new(env!("CARGO_BIN_EXE_medq"))
        .args(["show-config"])
        .env("MEDQ_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_dataset_source() {
    let dir = tempfile::tempdir().unwrap();
    let tr = out_path(&dir, "tr.csv");
    let te = out_path(&dir, "te.csv");
    ok(&["generate", "--dim", "3", "--n", "40", "--seed", "1", "--out", p(&tr)]);
    ok(&["generate", "--dim", "3", "--n", "20", "--seed", "2", "--out", p(&te)]);
    let out = out_path(&dir, "r.json");
    ok(&[
        "train", "--dataset", "csv", "--train-path", p(&tr), "--test-path", p(&te), "--epochs", "3", "-o", p(&out),
    ]);
    assert_eq!(json(&out)["result"]["feature_dim"], 3);
}

#[test]
fn benchmark_singleton_cell_equals_train_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_path(&dir, "bench.json");
    let common = [
        "--dim", "3", "--n-train", "40", "--n-test", "30", "--epochs", "6", "--repetitions", "1",
        "--learning-rates", "0.05", "--qubit-grid", "2",
    ];
    ok(&[&["benchmark"][..], &common, &["--layer-counts", "1,2", "-o", p(&out)]].concat());
    let v = json(&out);
    schema_check(&v);
    assert!(dir.path().join("bench.txt").exists());
    let csv = std::fs::read_to_string(dir.path().join("bench.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);

    for cell in v["result"]["cells"].as_array().unwrap() {
        let trial = &cell["grid"]["points"][0]["trials"][0];
        assert_eq!(cell["mean_test_accuracy"], trial["test_accuracy"]);
        let r = out_path(&dir, "cell.json");
        let seed = cell["seed"].as_u64().unwrap().to_string();
        let layers = cell["layers"].as_u64().unwrap().to_string();
        let model = cell["model"].as_str().unwrap();
        ok(&[
            &["train"][..],
            &common,
            &["--model", model, "--layers", &layers, "--n-qubits", "2", "--learning-rate", "0.05", "--seed", &seed, "-o", p(&r)],
        ]
        .concat());
        assert_eq!(&json(&r)["result"]["trial"], trial);
    }
}

#[test]
fn grid_search_report_matches_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = out_path(&dir, "grid.json");
    ok(&[
        "grid-search", "--dim", "3", "--n-train", "40", "--n-test", "20", "--epochs", "3", "--repetitions", "2",
        "--learning-rates", "0.05,0.1", "--qubit-grid", "2,3", "-o", p(&out),
    ]);
    let v = json(&out);
    schema_check(&v);
    let points = v["result"]["points"].as_array().unwrap();
    assert_eq!(points.len(), 4);
    for pt in points {
        let trials = pt["trials"].as_array().unwrap();
        let m: f64 = trials.iter().map(|t| t["test_accuracy"].as_f64().unwrap()).sum::<f64>() / trials.len() as f64;
        assert_eq!(pt["mean_test_accuracy"].as_f64().unwrap(), m);
    }
}
