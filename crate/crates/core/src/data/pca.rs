//! Principal component analysis via the covariance eigendecomposition.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{LabeledDataset, Provenance, RawImages};
use crate::error::{Error, Result};

const EIGEN_EPS: f64 = 1e-12;
const EIGEN_MAX_ITER: usize = 10_000;

/// Everything needed to map a raw row to its reduced, angle-scaled features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaProjection {
    pub mean: Vec<f64>,
    /// `k` unit eigenvectors, largest eigenvalue first; each one's
    /// largest-magnitude entry is positive.
    pub components: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    pub total_variance: f64,
    /// Per-component range of the fitted projections, mapped onto `[-π, π]`.
    pub scale_min: Vec<f64>,
    pub scale_max: Vec<f64>,
}

impl PcaProjection {
    pub fn fit(features: &[Vec<f64>], k: usize) -> Result<Self> {
        let m = features.len();
        let d = features.first().map_or(0, Vec::len);
        if m == 0 || d == 0 {
            return Err(Error::invalid("PCA needs a nonempty matrix"));
        }
        if features.iter().any(|r| r.len() != d) {
            return Err(Error::invalid("PCA rows have differing lengths"));
        }
        if k == 0 || k > m.min(d) {
            return Err(Error::invalid(format!(
                "target dimension {k} must be in 1..={} for a {m}x{d} matrix",
                m.min(d)
            )));
        }

        let mut mean = vec![0.0; d];
        for row in features {
            for (acc, v) in mean.iter_mut().zip(row) {
                *acc += v;
            }
        }
        mean.iter_mut().for_each(|v| *v /= m as f64);

        let centered = DMatrix::from_fn(m, d, |i, j| features[i][j] - mean[j]);
        let denom = if m > 1 { (m - 1) as f64 } else { 1.0 };
        let cov = (centered.transpose() * &centered) / denom;
        let total_variance = cov.trace();

        let eig = SymmetricEigen::try_new(cov, EIGEN_EPS, EIGEN_MAX_ITER).ok_or_else(|| {
            Error::Convergence(format!(
                "symmetric eigensolver exceeded {EIGEN_MAX_ITER} iterations on a {d}x{d} covariance"
            ))
        })?;
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));

        let mut components = Vec::with_capacity(k);
        let mut eigenvalues = Vec::with_capacity(k);
        for &c in order.iter().take(k) {
            let mut v: Vec<f64> = eig.eigenvectors.column(c).iter().copied().collect();
            let pivot = v
                .iter()
                .copied()
                .fold(0.0_f64, |best, x| if x.abs() > best.abs() { x } else { best });
            if pivot < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            components.push(v);
            eigenvalues.push(eig.eigenvalues[c].max(0.0));
        }

        let mut proj = PcaProjection {
            mean,
            components,
            eigenvalues,
            total_variance,
            scale_min: vec![0.0; k],
            scale_max: vec![0.0; k],
        };
        let raw = proj.project_unscaled(features)?;
        for c in 0..k {
            let (lo, hi) = raw
                .iter()
                .map(|r| r[c])
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
            proj.scale_min[c] = lo;
            proj.scale_max[c] = hi;
        }
        Ok(proj)
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// Share of total variance carried by the kept components.
    pub fn explained_variance_ratio(&self) -> f64 {
        if self.total_variance <= 0.0 {
            return 0.0;
        }
        self.eigenvalues.iter().sum::<f64>() / self.total_variance
    }

    /// Centered coordinates along the kept components, before angle scaling.
    pub fn project_unscaled(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let d = self.mean.len();
        rows.iter()
            .map(|row| {
                if row.len() != d {
                    return Err(Error::invalid(format!("row has {} columns, expected {d}", row.len())));
                }
                Ok(self
                    .components
                    .iter()
                    .map(|v| row.iter().zip(&self.mean).zip(v).map(|((x, mu), w)| (x - mu) * w).sum())
                    .collect())
            })
            .collect()
    }

    /// Projects and maps each component's fitted range onto `[-π, π]`.
    pub fn transform(&self, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let mut out = self.project_unscaled(rows)?;
        for row in &mut out {
            for (c, v) in row.iter_mut().enumerate() {
                let span = self.scale_max[c] - self.scale_min[c];
                *v = if span > 0.0 {
                    -PI + 2.0 * PI * (*v - self.scale_min[c]) / span
                } else {
                    0.0
                };
            }
        }
        Ok(out)
    }
}

/// Fits a `k`-component projection on `features` and applies it to them.
pub fn pca_reduce(features: &[Vec<f64>], k: usize) -> Result<(Vec<Vec<f64>>, PcaProjection)> {
    let proj = PcaProjection::fit(features, k)?;
    let reduced = proj.transform(features)?;
    Ok((reduced, proj))
}

/// Binary image task reduced to `k` angle-scaled features.
///
/// Keeps digits `negative` (label 0) and `positive` (label 1), splits them
/// with a seeded shuffle into `n_train` and `n_test` rows, fits the
/// projection on the training rows only and applies it to both parts.
pub fn pca_binary_task(
    images: &RawImages,
    negative: u8,
    positive: u8,
    k: usize,
    n_train: usize,
    n_test: usize,
    seed: u64,
) -> Result<(LabeledDataset, LabeledDataset, PcaProjection)> {
    let (rows, labels) = images.binary(negative, positive)?;
    if n_train == 0 || n_test == 0 {
        return Err(Error::invalid("train and test sizes must be positive"));
    }
    if n_train + n_test > rows.len() {
        return Err(Error::invalid(format!(
            "{} rows available for digits {negative}/{positive}, {} requested",
            rows.len(),
            n_train + n_test
        )));
    }
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let pick = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<u8>) {
        idx.iter().map(|&i| (rows[i].clone(), labels[i])).unzip()
    };
    let (train_raw, train_labels) = pick(&order[..n_train]);
    let (test_raw, test_labels) = pick(&order[n_train..n_train + n_test]);
    let proj = PcaProjection::fit(&train_raw, k)?;
    let provenance = |part: &str| {
        Provenance::new("pca", Some(seed))
            .with("digits", [negative, positive])
            .with("k", k)
            .with("part", part)
            .with("explained_variance_ratio", proj.explained_variance_ratio())
            .with("scale_min", &proj.scale_min)
            .with("scale_max", &proj.scale_max)
    };
    let train = LabeledDataset::new(proj.transform(&train_raw)?, train_labels, provenance("train"))?;
    let test = LabeledDataset::new(proj.transform(&test_raw)?, test_labels, provenance("test"))?;
    for (name, part) in [("train", &train), ("test", &test)] {
        if part.class_counts().contains(&0) {
            return Err(Error::invalid(format!("{name} part is missing a class")));
        }
    }
    Ok((train, test, proj))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn variance(col: impl Iterator<Item = f64> + Clone) -> f64 {
        let n = col.clone().count() as f64;
        let mean = col.clone().sum::<f64>() / n;
        col.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    }

    #[test]
    fn exact_subspace_reconstructs() {
        // points in the x-y plane of R^3 with variances 4 and 1
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<Vec<f64>> = (0..200)
            .map(|_| {
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                vec![2.0 * a, b, 0.0]
            })
            .collect();
        let proj = PcaProjection::fit(&rows, 2).unwrap();
        assert!((proj.explained_variance_ratio() - 1.0).abs() < 1e-12);
        let z = proj.project_unscaled(&rows).unwrap();
        for (row, coords) in rows.iter().zip(&z) {
            for j in 0..3 {
                let rec: f64 = proj.mean[j] + (0..2).map(|c| coords[c] * proj.components[c][j]).sum::<f64>();
                assert!((rec - row[j]).abs() < 1e-10);
            }
        }
        // first component is the x axis
        assert!(proj.components[0][0] > 0.999);
    }

    #[test]
    fn isotropic_cloud_keeps_half() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rows: Vec<Vec<f64>> = (0..20_000)
            .map(|_| vec![StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)])
            .collect();
        let proj = PcaProjection::fit(&rows, 1).unwrap();
        let r = proj.explained_variance_ratio();
        assert!((r - 0.5).abs() < 0.02, "{r}");
    }

    #[test]
    fn duplicated_row_keeps_directions() {
        // covariance of (0,0), (2,1), (4,0) is [[4,0],[0,1/3]] -> top direction x
        let rows = vec![vec![0.0, 0.0], vec![2.0, 1.0], vec![4.0, 0.0]];
        let p1 = PcaProjection::fit(&rows, 2).unwrap();
        assert!((p1.eigenvalues[0] - 4.0).abs() < 1e-12);
        assert!((p1.eigenvalues[1] - 1.0 / 3.0).abs() < 1e-12);
        assert!((p1.components[0][0] - 1.0).abs() < 1e-12);
        let mut dup = rows.clone();
        dup.push(vec![2.0, 1.0]);
        let p2 = PcaProjection::fit(&dup, 2).unwrap();
        for c in 0..2 {
            let dot: f64 = p1.components[c].iter().zip(&p2.components[c]).map(|(a, b)| a * b).sum();
            assert!((dot.abs() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn components_ordered_and_scaled() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rows: Vec<Vec<f64>> = (0..300)
            .map(|_| (0..6).map(|j| (j as f64 + 1.0) * { let z: f64 = StandardNormal.sample(&mut rng); z }).collect())
            .collect();
        let (reduced, proj) = pca_reduce(&rows, 4).unwrap();
        let raw = proj.project_unscaled(&rows).unwrap();
        let vars: Vec<f64> = (0..4).map(|c| variance(raw.iter().map(|r| r[c]))).collect();
        for w in vars.windows(2) {
            assert!(w[0] >= w[1] - 1e-9);
        }
        for (v, e) in vars.iter().zip(&proj.eigenvalues) {
            assert!((v - e).abs() < 1e-8 * e.max(1.0));
        }
        for c in 0..4 {
            let col: Vec<f64> = reduced.iter().map(|r| r[c]).collect();
            let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!((lo + PI).abs() < 1e-12 && (hi - PI).abs() < 1e-12);
            let pivot = proj.components[c]
                .iter()
                .cloned()
                .fold(0.0_f64, |b, x| if x.abs() > b.abs() { x } else { b });
            assert!(pivot > 0.0);
        }
    }

    #[test]
    fn target_dimension_checked() {
        let rows = vec![vec![1.0, 2.0, 3.0], vec![0.0, 1.0, 0.0]];
        assert!(PcaProjection::fit(&rows, 3).is_err());
        assert!(PcaProjection::fit(&rows, 0).is_err());
        assert!(PcaProjection::fit(&rows, 2).is_ok());
    }
}
