use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{LabeledDataset, Provenance};
use crate::error::{Error, Result};

/// Normalized distance kept free of samples on either side of the hyperplane.
pub const DEFAULT_MARGIN: f64 = 0.05;

/// Samples `m` points uniformly from `[-1, 1]^d`, labels them by the sign of
/// `Σ x_j` and rejects points whose normalized distance `|Σ x_j|/√d` to the
/// hyperplane is at most `margin`.
///
/// Both classes are guaranteed to be present: if the first `m` accepted
/// samples all share a label, the last one is redrawn until the other class
/// appears.
pub fn gen_linear_separable(d: usize, m: usize, margin: f64, seed: u64) -> Result<LabeledDataset> {
    if d == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    if m < 2 {
        return Err(Error::invalid("need at least 2 samples"));
    }
    let sqrt_d = (d as f64).sqrt();
    if !margin.is_finite() || margin < 0.0 {
        return Err(Error::invalid(format!("margin must be a nonnegative number, got {margin}")));
    }
    if margin >= sqrt_d {
        return Err(Error::invalid(format!(
            "margin {margin} leaves no room inside the cube (must be < sqrt(d) = {sqrt_d})"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |want: Option<u8>| loop {
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let s: f64 = x.iter().sum();
        if s.abs() / sqrt_d <= margin {
            continue;
        }
        let label = u8::from(s > 0.0);
        if want.is_none_or(|w| w == label) {
            return (x, label);
        }
    };

    let (mut features, mut labels): (Vec<_>, Vec<_>) = (0..m).map(|_| draw(None)).unzip();
    if labels.iter().all(|&l| l == labels[0]) {
        let (x, l) = draw(Some(1 - labels[0]));
        features[m - 1] = x;
        labels[m - 1] = l;
    }

    let provenance = Provenance::new("linear-separable", Some(seed))
        .with("dim", d)
        .with("samples", m)
        .with("margin", margin)
        .with("cube", [-1.0, 1.0]);
    LabeledDataset::new(features, labels, provenance)
}
