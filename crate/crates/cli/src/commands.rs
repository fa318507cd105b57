use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use medq::benchmark::{build_model, run_benchmark, BenchmarkPlan, BenchmarkReport};
use medq::data::{
    gen_linear_separable, load_csv, load_raw_images, pca_binary_task, pca_reduce, save_csv, synthetic_digits,
    LabeledDataset, Provenance, RawImages,
};
use medq::model::{CircuitSpec, ModelKind, ParameterSet};
use medq::training::{derive_seed, evaluate, grid_search, run_trial, GridReport, LatticePoint, TrialResult};

use crate::config::{DatasetSource, ExperimentConfig};
use crate::error::CliError;
use crate::output::{read_json, sibling, write_atomic, Envelope, Seeds, Stopwatch};

pub fn seeds(cfg: &ExperimentConfig) -> Seeds {
    Seeds {
        seed: cfg.seed,
        data_seed: cfg.data_seed,
        train_data_seed: derive_seed(cfg.data_seed, 0),
        test_data_seed: derive_seed(cfg.data_seed, 1),
    }
}

/// Builds the train and test sets described by `cfg`.
pub fn datasets(cfg: &ExperimentConfig) -> Result<(LabeledDataset, LabeledDataset), CliError> {
    let s = seeds(cfg);
    match cfg.dataset {
        DatasetSource::Linear => Ok((
            gen_linear_separable(cfg.dim, cfg.n_train, cfg.margin, s.train_data_seed)?,
            gen_linear_separable(cfg.dim, cfg.n_test, cfg.margin, s.test_data_seed)?,
        )),
        DatasetSource::Csv => {
            let train = load_csv(cfg.train_path.as_ref().expect("validated"))?;
            let test_path = cfg
                .test_path
                .as_ref()
                .ok_or_else(|| CliError::Config("dataset = \"csv\" needs test_path".into()))?;
            let test = load_csv(test_path)?;
            if train.dim() != test.dim() {
                return Err(CliError::Config(format!(
                    "train has {} features but test has {}",
                    train.dim(),
                    test.dim()
                )));
            }
            Ok((train, test))
        }
        DatasetSource::Pca => {
            let images = image_source(cfg.images_path.as_deref(), cfg.digits, cfg.n_train + cfg.n_test, s.train_data_seed)?;
            let [neg, pos] = cfg.digits;
            let (train, test, _) =
                pca_binary_task(&images, neg, pos, cfg.dim, cfg.n_train, cfg.n_test, s.test_data_seed)?;
            Ok((train, test))
        }
    }
}

/// Raw images from `path`, or synthetic 0/1 digits with at least `rows`
/// rows in total.
fn image_source(path: Option<&Path>, digits: [u8; 2], rows: usize, seed: u64) -> Result<RawImages, CliError> {
    match path {
        Some(p) => Ok(load_raw_images(p)?),
        None => {
            if digits != [0, 1] && digits != [1, 0] {
                return Err(CliError::Config(
                    "synthetic images contain only digits 0 and 1; set images_path for other digits".into(),
                ));
            }
            Ok(synthetic_digits(rows.div_ceil(2), seed)?)
        }
    }
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => write_atomic(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

// ---- generate ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenerateKind {
    /// Linearly separable hypercube samples.
    Linear,
    /// Synthetic 28x28 raw digit images (`label,p0,…,p783`).
    Digits,
    /// A binary digit task reduced by PCA to `--dim` features.
    Pca,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum, default_value = "linear")]
    pub kind: GenerateKind,
    /// Feature dimension (PCA components for `pca`).
    #[arg(long, default_value_t = 10)]
    pub dim: usize,
    /// Number of rows (images per class for `digits`).
    #[arg(long, default_value_t = 600)]
    pub n: usize,
    #[arg(long, default_value_t = medq::data::DEFAULT_MARGIN)]
    pub margin: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Raw-image CSV for `pca`; synthetic digits when omitted.
    #[arg(long)]
    pub images: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', num_args = 2, default_value = "0,1")]
    pub digits: Vec<u8>,
    #[arg(long, short)]
    pub out: PathBuf,
}

/// Writes the dataset and a `<out>.provenance.json` sidecar.
pub fn generate(args: &GenerateArgs) -> Result<Provenance, CliError> {
    let provenance = match args.kind {
        GenerateKind::Linear => {
            let data = gen_linear_separable(args.dim, args.n, args.margin, args.seed)?;
            save_csv(&data, &args.out)?;
            data.provenance
        }
        GenerateKind::Digits => {
            let images = synthetic_digits(args.n, args.seed)?;
            images.save(&args.out)?;
            Provenance::new("synthetic_digits", Some(args.seed)).with("per_class", args.n)
        }
        GenerateKind::Pca => {
            let digits = [args.digits[0], args.digits[1]];
            let images = image_source(args.images.as_deref(), digits, args.n, args.seed)?;
            let (mut rows, mut labels) = images.binary(digits[0], digits[1])?;
            if rows.len() < args.n {
                return Err(CliError::Config(format!("only {} images available, {} requested", rows.len(), args.n)));
            }
            let mut order: Vec<usize> = (0..rows.len()).collect();
            order.shuffle(&mut ChaCha8Rng::seed_from_u64(derive_seed(args.seed, 1)));
            order.truncate(args.n);
            rows = order.iter().map(|&i| std::mem::take(&mut rows[i])).collect();
            labels = order.iter().map(|&i| labels[i]).collect();
            let (reduced, proj) = pca_reduce(&rows, args.dim)?;
            let provenance = Provenance::new("pca", Some(args.seed))
                .with("source", args.images.as_ref().map_or("synthetic_digits".to_owned(), |p| p.display().to_string()))
                .with("digits", digits)
                .with("k", args.dim)
                .with("explained_variance_ratio", proj.explained_variance_ratio())
                .with("scale_min", &proj.scale_min)
                .with("scale_max", &proj.scale_max);
            let data = LabeledDataset::new(reduced, labels, provenance)?;
            save_csv(&data, &args.out)?;
            data.provenance
        }
    };
    let mut json = serde_json::to_string_pretty(&provenance).expect("provenance serializes");
    json.push('\n');
    write_atomic(&sibling(&args.out, ".provenance.json"), &json)?;
    Ok(provenance)
}

// ---- train / evaluate ----

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainResult {
    pub model: ModelKind,
    pub layers: usize,
    pub n_qubits: usize,
    pub feature_dim: usize,
    pub param_count: usize,
    pub circuit: CircuitSpec,
    pub trial: TrialResult,
}

pub fn train(cfg: &ExperimentConfig) -> Result<Envelope<TrainResult>, CliError> {
    let clock = Stopwatch::start();
    let (train_data, test_data) = datasets(cfg)?;
    let d = train_data.dim();
    let n_qubits = cfg.qubits_for(d);
    let spec = build_model(cfg.model, cfg.layers, d, n_qubits, cfg.angle_axis)?;
    let point = LatticePoint {
        learning_rate: cfg.learning_rate,
        n_qubits,
    };
    let trial = run_trial(&spec, point, &cfg.grid_settings(), 0, &train_data, &test_data)?;
    let result = TrainResult {
        model: cfg.model,
        layers: cfg.layers,
        n_qubits,
        feature_dim: d,
        param_count: spec.param_count(),
        circuit: spec,
        trial,
    };
    Ok(Envelope::new("train", cfg, seeds(cfg), result, &clock))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluateResult {
    pub source: PathBuf,
    pub samples: usize,
    pub accuracy: f64,
    pub loss: f64,
}

/// Scores the parameters stored in a `train` result on `data`, or on the
/// test set its config describes.
pub fn evaluate_result(result_path: &Path, data: Option<&Path>) -> Result<Envelope<EvaluateResult>, CliError> {
    let clock = Stopwatch::start();
    let stored: Envelope<TrainResult> = read_json(result_path)?;
    let test = match data {
        Some(p) => load_csv(p)?,
        None => datasets(&stored.config)?.1,
    };
    let spec = &stored.result.circuit;
    let params: &ParameterSet = &stored.result.trial.params;
    let (accuracy, loss) = evaluate(spec, params, &test.examples())?;
    let result = EvaluateResult {
        source: result_path.to_owned(),
        samples: test.len(),
        accuracy,
        loss,
    };
    Ok(Envelope::new("evaluate", &stored.config, stored.seeds.clone(), result, &clock))
}

// ---- grid search / benchmark ----

pub fn grid(cfg: &ExperimentConfig) -> Result<Envelope<GridReport>, CliError> {
    let clock = Stopwatch::start();
    let (train_data, test_data) = datasets(cfg)?;
    let d = train_data.dim();
    let report = grid_search(
        |p: &LatticePoint| build_model(cfg.model, cfg.layers, d, p.n_qubits, cfg.angle_axis),
        &cfg.lattice(d),
        &cfg.grid_settings(),
        &train_data,
        &test_data,
    )?;
    Ok(Envelope::new("grid-search", cfg, seeds(cfg), report, &clock))
}

pub fn benchmark_plan(cfg: &ExperimentConfig, feature_dim: usize) -> BenchmarkPlan {
    BenchmarkPlan {
        models: cfg.models.clone(),
        layer_counts: cfg.layer_counts.clone(),
        angle_axis: cfg.angle_axis,
        lattice: Some(cfg.lattice(feature_dim)),
        settings: cfg.grid_settings(),
    }
}

pub fn benchmark(cfg: &ExperimentConfig) -> Result<Envelope<BenchmarkReport>, CliError> {
    let clock = Stopwatch::start();
    let (train_data, test_data) = datasets(cfg)?;
    let report = run_benchmark(&benchmark_plan(cfg, train_data.dim()), &train_data, &test_data)?;
    Ok(Envelope::new("benchmark", cfg, seeds(cfg), report, &clock))
}

/// Writes a result to `cfg.output` (or stdout).
pub fn write_result<T: Serialize>(envelope: &Envelope<T>, output: Option<&Path>) -> Result<(), CliError> {
    emit(output, &envelope.to_json())
}

/// Writes the benchmark JSON plus `.txt` and `.csv` tables next to it; the
/// text table always goes to stdout.
pub fn write_benchmark(envelope: &Envelope<BenchmarkReport>, output: Option<&Path>) -> Result<(), CliError> {
    let table = envelope.result.to_text_table();
    print!("{table}");
    if let Some(p) = output {
        write_atomic(p, &envelope.to_json())?;
        write_atomic(&p.with_extension("txt"), &table)?;
        write_atomic(&p.with_extension("csv"), &envelope.result.to_csv())?;
    }
    Ok(())
}
