use serde::{Deserialize, Serialize};

use crate::data::Example;
use crate::error::{Error, Result};
use crate::model::{self, CircuitSpec, ClassScores, ParameterSet};

/// Weighted fidelity loss over a batch.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossValue {
    pub value: f64,
    /// `½ Σ_μ (α_c F_c − Y_c)²` for each class `c`; sums to `value`.
    pub per_class_terms: Vec<f64>,
}

/// `Y_c(x_μ)`: one-hot on the label.
#[inline]
pub(crate) fn target(label: usize, class: usize) -> f64 {
    if label == class {
        1.0
    } else {
        0.0
    }
}

/// `α_c F_c − Y_c` for every class.
pub(crate) fn residuals(scores: &ClassScores, label: usize) -> Vec<f64> {
    scores
        .weighted
        .iter()
        .enumerate()
        .map(|(c, w)| w - target(label, c))
        .collect()
}

pub(crate) fn check_batch(spec: &CircuitSpec, params: &ParameterSet, batch: &[Example<'_>]) -> Result<()> {
    if batch.is_empty() {
        return Err(Error::invalid("batch must not be empty"));
    }
    spec.check_params(params)?;
    for (i, ex) in batch.iter().enumerate() {
        if ex.x.len() != spec.feature_dim() {
            return Err(Error::invalid(format!(
                "sample {i} has {} features, circuit expects {}",
                ex.x.len(),
                spec.feature_dim()
            )));
        }
        if ex.label >= spec.n_classes() {
            return Err(Error::invalid(format!(
                "sample {i} has label {} but the circuit has {} classes",
                ex.label,
                spec.n_classes()
            )));
        }
    }
    Ok(())
}

/// `½ Σ_μ Σ_c (α_c F_c(x_μ) − Y_c(x_μ))²` with one-hot `Y`.
pub fn weighted_fidelity_loss(spec: &CircuitSpec, params: &ParameterSet, batch: &[Example<'_>]) -> Result<LossValue> {
    check_batch(spec, params, batch)?;
    let mut per_class = vec![0.0; spec.n_classes()];
    for ex in batch {
        let scores = model::forward_unchecked(spec, params, ex.x)?;
        for (acc, r) in per_class.iter_mut().zip(residuals(&scores, ex.label)) {
            *acc += 0.5 * r * r;
        }
    }
    Ok(LossValue {
        value: per_class.iter().sum(),
        per_class_terms: per_class,
    })
}
