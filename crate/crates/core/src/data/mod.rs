//! Labeled datasets: generation, PCA reduction, CSV I/O and splitting.

mod csv_io;
mod images;
mod linear;
mod pca;
mod split;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use csv_io::{load_csv, load_raw_images, save_csv, RawImages};
pub use images::{planted_structure, synthetic_digits};
pub use linear::{gen_linear_separable, DEFAULT_MARGIN};
pub use pca::{pca_binary_task, pca_reduce, PcaProjection};
pub use split::{split, SplitSpec};

/// How a dataset came to be.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: String,
    pub seed: Option<u64>,
    pub parameters: BTreeMap<String, serde_json::Value>,
}

impl Provenance {
    pub fn new(generator: impl Into<String>, seed: Option<u64>) -> Self {
        Provenance {
            generator: generator.into(),
            seed,
            parameters: BTreeMap::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(
            key.to_owned(),
            serde_json::to_value(value).unwrap_or(serde_json::Value::Null),
        );
        self
    }
}

/// `M` rows of `d` real features with binary labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    dim: usize,
    features: Vec<Vec<f64>>,
    labels: Vec<u8>,
    pub provenance: Provenance,
}

/// One borrowed sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example<'a> {
    pub x: &'a [f64],
    pub label: usize,
}

impl LabeledDataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<u8>, provenance: Provenance) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::invalid("dataset must contain at least one row"));
        }
        if features.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        let dim = features[0].len();
        if dim == 0 {
            return Err(Error::invalid("feature dimension must be at least 1"));
        }
        for (i, row) in features.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::invalid(format!("row {i} has {} features, expected {dim}", row.len())));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::invalid(format!("row {i} contains a non-finite feature")));
            }
        }
        if let Some(i) = labels.iter().position(|&l| l > 1) {
            return Err(Error::invalid(format!("row {i} has label {}, expected 0 or 1", labels[i])));
        }
        Ok(LabeledDataset {
            dim,
            features,
            labels,
            provenance,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn features(&self) -> &[Vec<f64>] {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn examples(&self) -> Vec<Example<'_>> {
        self.features
            .iter()
            .zip(&self.labels)
            .map(|(x, &l)| Example { x, label: l as usize })
            .collect()
    }

    pub fn class_counts(&self) -> [usize; 2] {
        let ones = self.labels.iter().filter(|&&l| l == 1).count();
        [self.len() - ones, ones]
    }

    pub(crate) fn subset(&self, rows: &[usize], provenance: Provenance) -> Result<Self> {
        LabeledDataset::new(
            rows.iter().map(|&i| self.features[i].clone()).collect(),
            rows.iter().map(|&i| self.labels[i]).collect(),
            provenance,
        )
    }
}
