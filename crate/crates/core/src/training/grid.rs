//! Grid search with repeated trainings per lattice point.
//!
//! For each lattice point, `repetitions` trainings run with seeds derived from
//! the base seed and the repetition index. The point with the lowest mean
//! training error wins (ties: lower mean training loss, then lattice order)
//! and its mean test accuracy is reported.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::train::{evaluate, train, TrainConfig};
use crate::data::{split, LabeledDataset, SplitSpec};
use crate::error::{Error, Result};
use crate::model::{CircuitSpec, ParameterSet};

/// SplitMix64 finalizer; used to derive independent per-run seeds.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub learning_rates: Vec<f64>,
    pub n_qubits: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticePoint {
    pub learning_rate: f64,
    pub n_qubits: usize,
}

impl Lattice {
    pub fn points(&self) -> Vec<LatticePoint> {
        let mut out = Vec::new();
        for &n_qubits in &self.n_qubits {
            for &learning_rate in &self.learning_rates {
                out.push(LatticePoint {
                    learning_rate,
                    n_qubits,
                });
            }
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        self.learning_rates.is_empty() || self.n_qubits.is_empty()
    }

    /// `{0.01, 0.05, 0.1} × {2, 4, min(d, 6)}` with duplicates removed.
    pub fn default_for(feature_dim: usize) -> Self {
        Lattice {
            learning_rates: vec![0.01, 0.05, 0.1],
            n_qubits: dedup(vec![2, 4, feature_dim.min(6)]),
        }
    }
}

fn dedup(v: Vec<usize>) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::with_capacity(v.len());
    for x in v {
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// Shared settings for every training inside a grid search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSettings {
    /// Template; `learning_rate` and `seed` are overridden per trial.
    pub train: TrainConfig,
    pub repetitions: usize,
    /// Share of the training set held out for checkpoint selection; `0`
    /// disables the hold-out.
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for GridSettings {
    fn default() -> Self {
        GridSettings {
            train: TrainConfig::default(),
            repetitions: 5,
            validation_fraction: 0.2,
            seed: 0,
        }
    }
}

/// One training run and its scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub point: LatticePoint,
    pub repetition: usize,
    pub seed: u64,
    pub train_accuracy: f64,
    pub train_error: f64,
    pub train_loss: f64,
    pub test_accuracy: f64,
    pub loss_trace: Vec<f64>,
    pub accuracy_trace: Vec<f64>,
    pub best_epoch: usize,
    pub epochs_run: usize,
    pub params: ParameterSet,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub point: LatticePoint,
    pub mean_train_error: f64,
    pub mean_train_loss: f64,
    pub mean_test_accuracy: f64,
    pub trials: Vec<TrialResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub points: Vec<PointSummary>,
    pub selected: usize,
}

impl GridReport {
    pub fn best(&self) -> &PointSummary {
        &self.points[self.selected]
    }

    pub fn mean_test_accuracy(&self) -> f64 {
        self.best().mean_test_accuracy
    }
}

pub fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

/// Trains one repetition at one lattice point and scores it on `train`
/// (all of it, including any hold-out) and `test`.
pub fn run_trial(
    spec: &CircuitSpec,
    point: LatticePoint,
    settings: &GridSettings,
    repetition: usize,
    train_data: &LabeledDataset,
    test_data: &LabeledDataset,
) -> Result<TrialResult> {
    let seed = derive_seed(settings.seed, repetition as u64);
    let config = TrainConfig {
        learning_rate: point.learning_rate,
        seed,
        ..settings.train.clone()
    };
    let outcome = if settings.validation_fraction > 0.0 {
        let (fit, hold) = split(
            train_data,
            SplitSpec {
                train_fraction: 1.0 - settings.validation_fraction,
                seed,
            },
        )?;
        train(spec, &config, &fit.examples(), &hold.examples())?
    } else {
        train(spec, &config, &train_data.examples(), &[])?
    };
    let (train_accuracy, train_loss) = evaluate(spec, &outcome.params, &train_data.examples())?;
    let (test_accuracy, _) = evaluate(spec, &outcome.params, &test_data.examples())?;
    Ok(TrialResult {
        point,
        repetition,
        seed,
        train_accuracy,
        train_error: 1.0 - train_accuracy,
        train_loss,
        test_accuracy,
        loss_trace: outcome.loss_trace,
        accuracy_trace: outcome.accuracy_trace,
        best_epoch: outcome.best_epoch,
        epochs_run: outcome.epochs_run,
        params: outcome.params,
    })
}

/// Runs every lattice point `settings.repetitions` times. Trials execute on
/// the current rayon pool; results are gathered in lattice order.
pub fn grid_search<F>(
    factory: F,
    lattice: &Lattice,
    settings: &GridSettings,
    train_data: &LabeledDataset,
    test_data: &LabeledDataset,
) -> Result<GridReport>
where
    F: Fn(&LatticePoint) -> Result<CircuitSpec> + Sync,
{
    if lattice.is_empty() {
        return Err(Error::invalid("grid lattice is empty"));
    }
    if settings.repetitions == 0 {
        return Err(Error::invalid("repetitions must be at least 1"));
    }
    if !(0.0..1.0).contains(&settings.validation_fraction) {
        return Err(Error::invalid("validation_fraction must lie in [0, 1)"));
    }
    settings.train.validate()?;
    let points = lattice.points();
    for p in &points {
        if !(p.learning_rate > 0.0 && p.learning_rate.is_finite()) {
            return Err(Error::invalid(format!("learning rate {} is not positive", p.learning_rate)));
        }
    }
    let specs = points.iter().map(&factory).collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(usize, usize)> = (0..points.len())
        .flat_map(|i| (0..settings.repetitions).map(move |r| (i, r)))
        .collect();
    let trials = jobs
        .par_iter()
        .map(|&(i, r)| run_trial(&specs[i], points[i], settings, r, train_data, test_data))
        .collect::<Result<Vec<_>>>()?;

    let mut summaries = Vec::with_capacity(points.len());
    let mut trials = trials.into_iter();
    for &point in &points {
        let mine: Vec<TrialResult> = trials.by_ref().take(settings.repetitions).collect();
        summaries.push(PointSummary {
            point,
            mean_train_error: mean(mine.iter().map(|t| t.train_error)),
            mean_train_loss: mean(mine.iter().map(|t| t.train_loss)),
            mean_test_accuracy: mean(mine.iter().map(|t| t.test_accuracy)),
            trials: mine,
        });
    }

    let mut selected = 0;
    for (i, s) in summaries.iter().enumerate().skip(1) {
        let b = &summaries[selected];
        if s.mean_train_error < b.mean_train_error
            || (s.mean_train_error == b.mean_train_error && s.mean_train_loss < b.mean_train_loss)
        {
            selected = i;
        }
    }
    Ok(GridReport {
        points: summaries,
        selected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gen_linear_separable;
    use crate::model::build_reuploading_baseline;

    fn data() -> (LabeledDataset, LabeledDataset) {
        (
            gen_linear_separable(2, 24, 0.05, 1).unwrap(),
            gen_linear_separable(2, 20, 0.05, 2).unwrap(),
        )
    }

    fn settings(reps: usize) -> GridSettings {
        GridSettings {
            train: TrainConfig {
                max_epochs: 5,
                ..TrainConfig::default()
            },
            repetitions: reps,
            validation_fraction: 0.25,
            seed: 11,
        }
    }

    #[test]
    fn singleton_lattice_equals_single_run() {
        let (tr, te) = data();
        let lattice = Lattice {
            learning_rates: vec![0.05],
            n_qubits: vec![1],
        };
        let factory = |p: &LatticePoint| build_reuploading_baseline(2, 2, p.n_qubits);
        let report = grid_search(factory, &lattice, &settings(1), &tr, &te).unwrap();
        let spec = build_reuploading_baseline(2, 2, 1).unwrap();
        let single = run_trial(&spec, lattice.points()[0], &settings(1), 0, &tr, &te).unwrap();
        assert_eq!(report.points.len(), 1);
        assert_eq!(report.best().trials, vec![single.clone()]);
        assert_eq!(report.mean_test_accuracy(), single.test_accuracy);
    }

    #[test]
    fn means_are_arithmetic_over_repetitions() {
        let (tr, te) = data();
        let lattice = Lattice {
            learning_rates: vec![0.01, 0.1],
            n_qubits: vec![1, 2],
        };
        let factory = |p: &LatticePoint| build_reuploading_baseline(1, 2, p.n_qubits);
        let report = grid_search(factory, &lattice, &settings(5), &tr, &te).unwrap();
        assert_eq!(report.points.len(), 4);
        for s in &report.points {
            assert_eq!(s.trials.len(), 5);
            let m: f64 = s.trials.iter().map(|t| t.test_accuracy).sum::<f64>() / 5.0;
            assert!((s.mean_test_accuracy - m).abs() < 1e-15);
            let seeds: std::collections::HashSet<u64> = s.trials.iter().map(|t| t.seed).collect();
            assert_eq!(seeds.len(), 5);
        }
        let best = report.best().mean_train_error;
        assert!(report.points.iter().all(|s| s.mean_train_error >= best));
    }

    #[test]
    fn empty_lattice_rejected() {
        let (tr, te) = data();
        let lattice = Lattice {
            learning_rates: vec![],
            n_qubits: vec![1],
        };
        let factory = |p: &LatticePoint| build_reuploading_baseline(1, 2, p.n_qubits);
        assert!(grid_search(factory, &lattice, &settings(1), &tr, &te).is_err());
    }

    #[test]
    fn default_lattices() {
        assert_eq!(Lattice::default_for(10).n_qubits, vec![2, 4, 6]);
        assert_eq!(Lattice::default_for(3).n_qubits, vec![2, 4, 3]);
        assert_eq!(Lattice::default_for(2).n_qubits, vec![2, 4]);
        assert_eq!(Lattice::default_for(10).points().len(), 9);
    }

    #[test]
    fn derived_seeds_differ() {
        let s: std::collections::HashSet<u64> = (0..100).map(|r| derive_seed(7, r)).collect();
        assert_eq!(s.len(), 100);
        assert_eq!(derive_seed(7, 3), derive_seed(7, 3));
    }
}
