use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::LabeledDataset;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

/// Seeded shuffle, then the first `round(train_fraction·M)` rows become the
/// training part. Both parts must be nonempty and contain both classes.
pub fn split(dataset: &LabeledDataset, spec: SplitSpec) -> Result<(LabeledDataset, LabeledDataset)> {
    let f = spec.train_fraction;
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::invalid(format!("train_fraction must lie in (0, 1), got {f}")));
    }
    let m = dataset.len();
    let n_train = (f * m as f64).round() as usize;
    if n_train == 0 || n_train == m {
        return Err(Error::invalid(format!(
            "split of {m} rows at fraction {f} leaves an empty part"
        )));
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(spec.seed));
    let (train_rows, test_rows) = order.split_at(n_train);

    let tag = |part: &str| {
        let mut p = dataset.provenance.clone();
        p.parameters.insert(
            "split".into(),
            serde_json::json!({ "part": part, "train_fraction": f, "seed": spec.seed }),
        );
        p
    };
    let train = dataset.subset(train_rows, tag("train"))?;
    let test = dataset.subset(test_rows, tag("test"))?;
    for (name, part) in [("train", &train), ("test", &test)] {
        if part.class_counts().contains(&0) {
            return Err(Error::invalid(format!("{name} part is missing a class")));
        }
    }
    Ok((train, test))
}
