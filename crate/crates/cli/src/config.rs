//! Experiment configuration: a flat TOML table whose keys can each be
//! overridden from the command line.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use medq::circuit::Axis;
use medq::data::DEFAULT_MARGIN;
use medq::model::ModelKind;
use medq::training::{EarlyStopping, GradientMethod, GridSettings, Lattice, TrainConfig};

use crate::error::CliError;

/// Where the train and test sets come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DatasetSource {
    /// Generated linearly separable hypercube data.
    Linear,
    /// `train_path` and `test_path` CSV files.
    Csv,
    /// Raw images (`images_path`, or synthetic digits when unset) reduced by PCA.
    Pca,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelKind,
    /// Layers per block for MEDQ, total layers for the baseline.
    pub layers: usize,
    /// `None` means `min(feature dimension, 6)`.
    pub n_qubits: Option<usize>,
    pub angle_axis: Axis,

    pub dataset: DatasetSource,
    pub train_path: Option<PathBuf>,
    pub test_path: Option<PathBuf>,
    pub images_path: Option<PathBuf>,
    pub dim: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub margin: f64,
    pub digits: [u8; 2],
    pub data_seed: u64,

    pub learning_rate: f64,
    pub epochs: usize,
    /// `0` trains full-batch.
    pub batch_size: usize,
    pub gradient: GradientMethod,
    /// `0` disables early stopping.
    pub patience: usize,
    pub min_delta: f64,
    pub validation_fraction: f64,
    pub seed: u64,

    pub learning_rates: Vec<f64>,
    /// Empty means `{2, 4, min(dim, 6)}`.
    pub qubit_grid: Vec<usize>,
    pub repetitions: usize,
    pub models: Vec<ModelKind>,
    pub layer_counts: Vec<usize>,

    pub output: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            model: ModelKind::Medq,
            layers: 1,
            n_qubits: None,
            angle_axis: Axis::Y,
            dataset: DatasetSource::Linear,
            train_path: None,
            test_path: None,
            images_path: None,
            dim: 10,
            n_train: 300,
            n_test: 300,
            margin: DEFAULT_MARGIN,
            digits: [0, 1],
            data_seed: 0,
            learning_rate: 0.05,
            epochs: 100,
            batch_size: 0,
            gradient: GradientMethod::Adjoint,
            patience: 0,
            min_delta: 0.0,
            validation_fraction: 0.2,
            seed: 0,
            learning_rates: vec![0.01, 0.05, 0.1],
            qubit_grid: Vec::new(),
            repetitions: 5,
            models: vec![ModelKind::Medq, ModelKind::Reuploading],
            layer_counts: vec![3, 4, 5, 6, 7],
            output: None,
        }
    }
}

/// Command-line overrides; every field mirrors a config key.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Flat TOML file with experiment keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub layers: Option<usize>,
    #[arg(long)]
    pub n_qubits: Option<usize>,
    #[arg(long, value_parser = parse_axis)]
    pub angle_axis: Option<Axis>,
    #[arg(long, value_enum)]
    pub dataset: Option<DatasetSource>,
    #[arg(long)]
    pub train_path: Option<PathBuf>,
    #[arg(long)]
    pub test_path: Option<PathBuf>,
    #[arg(long)]
    pub images_path: Option<PathBuf>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub n_train: Option<usize>,
    #[arg(long)]
    pub n_test: Option<usize>,
    #[arg(long)]
    pub margin: Option<f64>,
    /// Two digits, negative class first, e.g. `0,1`.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub digits: Option<Vec<u8>>,
    #[arg(long)]
    pub data_seed: Option<u64>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub gradient: Option<GradientMethod>,
    #[arg(long)]
    pub patience: Option<usize>,
    #[arg(long)]
    pub min_delta: Option<f64>,
    #[arg(long)]
    pub validation_fraction: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub learning_rates: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub qubit_grid: Option<Vec<usize>>,
    #[arg(long)]
    pub repetitions: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub models: Option<Vec<ModelKind>>,
    #[arg(long, value_delimiter = ',')]
    pub layer_counts: Option<Vec<usize>>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn parse_axis(s: &str) -> Result<Axis, String> {
    match s.to_ascii_uppercase().as_str() {
        "X" => Ok(Axis::X),
        "Y" => Ok(Axis::Y),
        "Z" => Ok(Axis::Z),
        _ => Err(format!("unknown axis `{s}` (expected X, Y or Z)")),
    }
}

macro_rules! apply {
    ($cfg:ident, $o:ident; $($field:ident),* $(,)?) => {
        $(if let Some(v) = $o.$field.clone() { $cfg.$field = v; })*
    };
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    /// Defaults, then the config file, then flags.
    pub fn resolve(o: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match &o.config {
            Some(path) => Self::from_file(path)?,
            None => Self::default(),
        };
        apply!(cfg, o; model, layers, angle_axis, dataset, dim, n_train, n_test, margin,
            data_seed, learning_rate, epochs, batch_size, gradient, patience, min_delta,
            validation_fraction, seed, learning_rates, qubit_grid, repetitions, models, layer_counts);
        if o.train_path.is_some() {
            cfg.train_path = o.train_path.clone();
        }
        if o.test_path.is_some() {
            cfg.test_path = o.test_path.clone();
        }
        if o.images_path.is_some() {
            cfg.images_path = o.images_path.clone();
        }
        if o.n_qubits.is_some() {
            cfg.n_qubits = o.n_qubits;
        }
        if o.output.is_some() {
            cfg.output = o.output.clone();
        }
        if let Some(d) = &o.digits {
            cfg.digits = [d[0], d[1]];
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.layers == 0 {
            return bad("layers must be at least 1".into());
        }
        if self.n_qubits == Some(0) {
            return bad("n_qubits must be at least 1".into());
        }
        if self.dim == 0 {
            return bad("dim must be at least 1".into());
        }
        if self.n_train < 2 || self.n_test < 1 {
            return bad("n_train must be at least 2 and n_test at least 1".into());
        }
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return bad(format!("margin must be a nonnegative number, got {}", self.margin));
        }
        if self.digits[0] > 9 || self.digits[1] > 9 || self.digits[0] == self.digits[1] {
            return bad(format!("digits must be two distinct values in 0..=9, got {:?}", self.digits));
        }
        if self.dataset == DatasetSource::Csv && self.train_path.is_none() {
            return bad("dataset = \"csv\" needs train_path".into());
        }
        if self.repetitions == 0 {
            return bad("repetitions must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return bad("validation_fraction must lie in [0, 1)".into());
        }
        if self.learning_rates.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
            return bad("learning_rates must all be positive".into());
        }
        if self.qubit_grid.contains(&0) || self.layer_counts.contains(&0) {
            return bad("qubit_grid and layer_counts entries must be positive".into());
        }
        self.train_config().validate().map_err(CliError::Core)?;
        Ok(())
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            learning_rate: self.learning_rate,
            max_epochs: self.epochs,
            batch_size: (self.batch_size > 0).then_some(self.batch_size),
            seed: self.seed,
            early_stopping: (self.patience > 0).then_some(EarlyStopping {
                patience: self.patience,
                min_delta: self.min_delta,
            }),
            gradient_method: self.gradient,
        }
    }

    /// Register width for a dataset of dimension `feature_dim`.
    pub fn qubits_for(&self, feature_dim: usize) -> usize {
        self.n_qubits.unwrap_or(feature_dim.min(6))
    }

    pub fn grid_settings(&self) -> GridSettings {
        GridSettings {
            train: self.train_config(),
            repetitions: self.repetitions,
            validation_fraction: self.validation_fraction,
            seed: self.seed,
        }
    }

    /// Lattice for a dataset of dimension `feature_dim`.
    pub fn lattice(&self, feature_dim: usize) -> Lattice {
        let mut l = Lattice::default_for(feature_dim);
        l.learning_rates = self.learning_rates.clone();
        if !self.qubit_grid.is_empty() {
            l.n_qubits = self.qubit_grid.clone();
        }
        l
    }

    /// SHA-256 of the canonical JSON form, ignoring `output`.
    pub fn hash(&self) -> String {
        let experiment = ExperimentConfig {
            output: None,
            ..self.clone()
        };
        let json = serde_json::to_string(&experiment).expect("config serializes");
        format!("{:x}", Sha256::digest(json.as_bytes()))
    }
}
