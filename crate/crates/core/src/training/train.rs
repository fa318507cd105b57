use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::adam::Adam;
use super::gradient::{loss_and_gradient, GradientMethod};
use super::loss::{check_batch, residuals, weighted_fidelity_loss};
use crate::data::Example;
use crate::error::{Error, Result};
use crate::model::{self, CircuitSpec, ParameterSet};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarlyStopping {
    /// Epochs without validation-loss improvement before stopping.
    pub patience: usize,
    /// Smallest decrease that counts as an improvement.
    pub min_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// `None` trains full-batch.
    pub batch_size: Option<usize>,
    pub seed: u64,
    pub early_stopping: Option<EarlyStopping>,
    pub gradient_method: GradientMethod,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.05,
            max_epochs: 100,
            batch_size: None,
            seed: 0,
            early_stopping: None,
            gradient_method: GradientMethod::Adjoint,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if self.batch_size == Some(0) {
            return Err(Error::invalid("batch_size must be positive"));
        }
        if let Some(es) = self.early_stopping {
            if es.patience == 0 {
                return Err(Error::invalid("early-stopping patience must be at least 1"));
            }
            if !(es.min_delta >= 0.0 && es.min_delta.is_finite()) {
                return Err(Error::invalid("early-stopping min_delta must be a nonnegative number"));
            }
        }
        Ok(())
    }
}

/// Result of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    /// Parameters from the epoch with the best validation accuracy (ties go
    /// to the lower validation loss, then the earlier epoch).
    pub params: ParameterSet,
    pub initial_params: ParameterSet,
    /// Full training loss after `k` epochs, `k = 0..=epochs_run`.
    pub loss_trace: Vec<f64>,
    /// Validation accuracy after `k` epochs.
    pub accuracy_trace: Vec<f64>,
    pub best_epoch: usize,
    pub epochs_run: usize,
    pub stopped_early: bool,
}

/// Fraction of `examples` whose predicted class equals the label.
pub fn accuracy(spec: &CircuitSpec, params: &ParameterSet, examples: &[Example<'_>]) -> Result<f64> {
    if examples.is_empty() {
        return Err(Error::invalid("cannot score an empty set"));
    }
    let mut hits = 0usize;
    for ex in examples {
        let scores = model::forward(spec, params, ex.x)?;
        hits += usize::from(model::predict(&scores) == ex.label);
    }
    Ok(hits as f64 / examples.len() as f64)
}

/// Accuracy and weighted fidelity loss from a single pass over `examples`.
pub fn evaluate(spec: &CircuitSpec, params: &ParameterSet, examples: &[Example<'_>]) -> Result<(f64, f64)> {
    check_batch(spec, params, examples)?;
    let mut hits = 0usize;
    let mut loss = 0.0;
    for ex in examples {
        let scores = model::forward_unchecked(spec, params, ex.x)?;
        hits += usize::from(model::predict(&scores) == ex.label);
        loss += residuals(&scores, ex.label).iter().map(|r| 0.5 * r * r).sum::<f64>();
    }
    Ok((hits as f64 / examples.len() as f64, loss))
}

/// Trains from the seeded initialization `θ ~ U[−π, π]`, `ω ~ U[0, 1]`, `α = 1`.
pub fn train(
    spec: &CircuitSpec,
    config: &TrainConfig,
    train_set: &[Example<'_>],
    validation_set: &[Example<'_>],
) -> Result<TrainOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let init = ParameterSet::random(spec, &mut rng);
    train_from(spec, config, train_set, validation_set, init, &mut rng)
}

/// Like [`train`] but starting from `init`. When `validation_set` is empty,
/// checkpoints are ranked by training accuracy and loss instead.
pub fn train_from(
    spec: &CircuitSpec,
    config: &TrainConfig,
    train_set: &[Example<'_>],
    validation_set: &[Example<'_>],
    init: ParameterSet,
    rng: &mut ChaCha8Rng,
) -> Result<TrainOutcome> {
    config.validate()?;
    if train_set.is_empty() {
        return Err(Error::invalid("training set is empty"));
    }
    spec.check_params(&init)?;
    let monitor = if validation_set.is_empty() { train_set } else { validation_set };

    let mut params = init.clone();
    let mut adam = Adam::new(params.len(), config.learning_rate);
    let full_batch = config.batch_size.is_none_or(|b| b >= train_set.len());
    let mut order: Vec<usize> = (0..train_set.len()).collect();

    let check_finite = |loss: f64, epoch: usize, params: &ParameterSet| {
        if loss.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFiniteLoss {
                epoch,
                loss,
                snapshot: Box::new(params.clone()),
            })
        }
    };

    let mut loss_trace = Vec::with_capacity(config.max_epochs + 1);
    let mut accuracy_trace = Vec::with_capacity(config.max_epochs + 1);

    let mut best = evaluate(spec, &params, monitor)?;
    let mut best_params = params.clone();
    let mut best_epoch = 0;
    accuracy_trace.push(best.0);
    let mut plateau_ref = best.1;
    let mut stale = 0usize;
    let mut stopped_early = false;
    let mut epochs_run = 0;
    for epoch in 1..=config.max_epochs {
        if full_batch {
            // the gradient pass also yields the loss before this epoch's update
            let (loss, grad) = loss_and_gradient(spec, &params, train_set, config.gradient_method)?;
            check_finite(loss.value, epoch - 1, &params)?;
            loss_trace.push(loss.value);
            if !grad.is_finite() {
                return Err(Error::NonFiniteLoss {
                    epoch,
                    loss: f64::NAN,
                    snapshot: Box::new(params.clone()),
                });
            }
            adam.update(&mut params, &grad);
        } else {
            if epoch == 1 {
                let l = weighted_fidelity_loss(spec, &params, train_set)?.value;
                check_finite(l, 0, &params)?;
                loss_trace.push(l);
            }
            let batch_size = config.batch_size.expect("mini-batch mode");
            order.shuffle(rng);
            for chunk in order.chunks(batch_size) {
                let batch: Vec<Example<'_>> = chunk.iter().map(|&i| train_set[i]).collect();
                let (loss, grad) = loss_and_gradient(spec, &params, &batch, config.gradient_method)?;
                check_finite(loss.value, epoch, &params)?;
                adam.update(&mut params, &grad);
            }
            let l = weighted_fidelity_loss(spec, &params, train_set)?.value;
            check_finite(l, epoch, &params)?;
            loss_trace.push(l);
        }
        epochs_run = epoch;

        let (acc, mloss) = evaluate(spec, &params, monitor)?;
        check_finite(mloss, epoch, &params)?;
        accuracy_trace.push(acc);
        if acc > best.0 || (acc == best.0 && mloss < best.1) {
            best = (acc, mloss);
            best_params = params.clone();
            best_epoch = epoch;
        }

        if let Some(es) = config.early_stopping {
            if mloss < plateau_ref - es.min_delta {
                plateau_ref = mloss;
                stale = 0;
            } else {
                stale += 1;
                if stale >= es.patience {
                    stopped_early = epoch < config.max_epochs;
                    break;
                }
            }
        }
    }

    if full_batch || config.max_epochs == 0 {
        let l = weighted_fidelity_loss(spec, &params, train_set)?.value;
        check_finite(l, epochs_run, &params)?;
        loss_trace.push(l);
    }

    Ok(TrainOutcome {
        params: best_params,
        initial_params: init,
        loss_trace,
        accuracy_trace,
        best_epoch,
        epochs_run,
        stopped_early,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::gen_linear_separable;
    use crate::model::{build_medq, build_reuploading_baseline};

    #[test]
    fn zero_epochs_returns_initial_parameters() {
        let spec = build_reuploading_baseline(2, 2, 1).unwrap();
        let x = [0.3, 0.4];
        let set = [Example { x: &x, label: 1 }];
        let cfg = TrainConfig {
            max_epochs: 0,
            seed: 5,
            ..TrainConfig::default()
        };
        let out = train(&spec, &cfg, &set, &[]).unwrap();
        assert_eq!(out.params, out.initial_params);
        assert_eq!(out.loss_trace.len(), 1);
        assert_eq!(out.accuracy_trace.len(), 1);
        assert_eq!(out.epochs_run, 0);
        let expected = ParameterSet::random(&spec, &mut ChaCha8Rng::seed_from_u64(5));
        assert_eq!(out.params, expected);
    }

    #[test]
    fn single_sample_descends() {
        let spec = build_reuploading_baseline(1, 3, 1).unwrap();
        let x = [0.5, -0.8, 0.3];
        let set = [Example { x: &x, label: 1 }];
        let cfg = TrainConfig {
            max_epochs: 200,
            learning_rate: 0.05,
            seed: 3,
            ..TrainConfig::default()
        };
        let out = train(&spec, &cfg, &set, &[]).unwrap();
        assert_eq!(out.loss_trace.len(), 201);
        assert!(out.loss_trace[200] < out.loss_trace[0]);
    }

    #[test]
    fn seeded_runs_are_bitwise_identical() {
        let ds = gen_linear_separable(2, 30, 0.05, 1).unwrap();
        let ex = ds.examples();
        let (tr, va) = ex.split_at(20);
        let spec = build_medq(1, 2, 2).unwrap();
        let cfg = TrainConfig {
            max_epochs: 15,
            batch_size: Some(7),
            seed: 77,
            ..TrainConfig::default()
        };
        let a = train(&spec, &cfg, tr, va).unwrap();
        let b = train(&spec, &cfg, tr, va).unwrap();
        assert_eq!(a, b);
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.loss_trace), bits(&b.loss_trace));
        assert_eq!(a.loss_trace.len(), 16);
    }

    #[test]
    fn early_stopping_halts() {
        let ds = gen_linear_separable(2, 30, 0.05, 2).unwrap();
        let ex = ds.examples();
        let (tr, va) = ex.split_at(20);
        let spec = build_reuploading_baseline(1, 2, 1).unwrap();
        let cfg = TrainConfig {
            max_epochs: 500,
            learning_rate: 0.01,
            early_stopping: Some(EarlyStopping {
                patience: 3,
                min_delta: 10.0,
            }),
            ..TrainConfig::default()
        };
        let out = train(&spec, &cfg, tr, va).unwrap();
        assert_eq!(out.epochs_run, 3);
        assert!(out.stopped_early);
        assert_eq!(out.loss_trace.len(), 4);
    }

    #[test]
    fn config_validation() {
        let bad = [
            TrainConfig {
                learning_rate: 0.0,
                ..TrainConfig::default()
            },
            TrainConfig {
                batch_size: Some(0),
                ..TrainConfig::default()
            },
            TrainConfig {
                early_stopping: Some(EarlyStopping {
                    patience: 0,
                    min_delta: 0.0,
                }),
                ..TrainConfig::default()
            },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err());
        }
        assert!(TrainConfig::default().validate().is_ok());
    }

    #[test]
    fn non_finite_loss_reports_epoch() {
        let spec = build_reuploading_baseline(1, 1, 1).unwrap();
        let x = [0.2];
        let set = [Example { x: &x, label: 0 }];
        let mut init = ParameterSet::zeros(&spec);
        init.alpha = vec![f64::INFINITY, 1.0];
        let cfg = TrainConfig::default();
        let err = train_from(&spec, &cfg, &set, &[], init, &mut ChaCha8Rng::seed_from_u64(0)).unwrap_err();
        assert!(matches!(err, Error::NonFiniteLoss { epoch: 0, .. }), "{err:?}");
    }
}
