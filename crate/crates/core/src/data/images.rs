//! Synthetic stand-ins for image data.
//!
//! The repository ships no image corpus. `synthetic_digits` draws 28x28
//! grayscale strokes resembling handwritten 0s (rings) and 1s (slanted bars)
//! so the raw-image → PCA → classifier pipeline runs end to end; a real
//! MNIST CSV export in the same `label,p0,…,p783` layout drops in unchanged.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::RawImages;
use crate::error::{Error, Result};

pub const IMAGE_SIDE: usize = 28;

fn ring(rng: &mut ChaCha8Rng) -> impl Fn(f64, f64) -> f64 {
    let cx = 13.5 + rng.random_range(-1.5..1.5);
    let cy = 13.5 + rng.random_range(-1.5..1.5);
    let rx = rng.random_range(5.0..8.0);
    let ry = rng.random_range(7.5..10.5);
    let width = rng.random_range(1.2..2.2);
    move |x, y| {
        let r = (((x - cx) / rx).powi(2) + ((y - cy) / ry).powi(2)).sqrt();
        // distance to the ellipse, measured roughly in pixels
        let dist = (r - 1.0).abs() * rx.min(ry);
        (-(dist / width).powi(2)).exp()
    }
}

fn bar(rng: &mut ChaCha8Rng) -> impl Fn(f64, f64) -> f64 {
    let cx = 13.5 + rng.random_range(-3.0..3.0);
    let cy = 13.5 + rng.random_range(-1.5..1.5);
    let slant: f64 = rng.random_range(-0.35..0.35);
    let half_len = rng.random_range(8.0..11.0);
    let width = rng.random_range(1.0..2.0);
    let (s, c) = slant.sin_cos();
    move |x, y| {
        let (dx, dy) = (x - cx, y - cy);
        let along = dx * s + dy * c;
        let across = dx * c - dy * s;
        let overshoot = (along.abs() - half_len).max(0.0);
        (-(across / width).powi(2) - overshoot.powi(2)).exp()
    }
}

/// `per_class` images each of digit 0 and digit 1, interleaved in random order,
/// with pixel values in `0..=255`.
pub fn synthetic_digits(per_class: usize, seed: u64) -> Result<RawImages> {
    if per_class == 0 {
        return Err(Error::invalid("need at least one image per class"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 12.0).expect("valid normal");
    let mut labels: Vec<u8> = (0..2 * per_class).map(|i| (i % 2) as u8).collect();
    for i in (1..labels.len()).rev() {
        labels.swap(i, rng.random_range(0..=i));
    }
    let mut pixels = Vec::with_capacity(labels.len());
    for &l in &labels {
        let ink = rng.random_range(180.0..255.0);
        let shape: Box<dyn Fn(f64, f64) -> f64> = if l == 0 {
            Box::new(ring(&mut rng))
        } else {
            Box::new(bar(&mut rng))
        };
        let mut img = Vec::with_capacity(IMAGE_SIDE * IMAGE_SIDE);
        for py in 0..IMAGE_SIDE {
            for px in 0..IMAGE_SIDE {
                let v = ink * shape(px as f64, py as f64) + noise.sample(&mut rng);
                img.push(v.clamp(0.0, 255.0).round());
            }
        }
        pixels.push(img);
    }
    Ok(RawImages { labels, pixels })
}

/// `m` rows in `ambient_dim` dimensions lying near a random
/// `latent_dim`-dimensional subspace. Latent coordinate `c` has standard
/// deviation `latent_dim - c`; isotropic Gaussian noise of width `noise` is
/// added in every ambient direction.
pub fn planted_structure(m: usize, ambient_dim: usize, latent_dim: usize, noise: f64, seed: u64) -> Result<Vec<Vec<f64>>> {
    if latent_dim == 0 || latent_dim > ambient_dim || m == 0 {
        return Err(Error::invalid("need 0 < latent_dim <= ambient_dim and m > 0"));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::invalid("noise must be a nonnegative number"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = || -> f64 { StandardNormal.sample(&mut rng) };

    // Gram-Schmidt on Gaussian vectors
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(latent_dim);
    while basis.len() < latent_dim {
        let mut v: Vec<f64> = (0..ambient_dim).map(|_| gauss()).collect();
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(a, c)| a * c).sum();
            v.iter_mut().zip(b).for_each(|(a, c)| *a -= dot * c);
        }
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|a| *a /= norm);
            basis.push(v);
        }
    }

    Ok((0..m)
        .map(|_| {
            let mut row: Vec<f64> = (0..ambient_dim).map(|_| noise * gauss()).collect();
            for (c, b) in basis.iter().enumerate() {
                let z = (latent_dim - c) as f64 * gauss();
                row.iter_mut().zip(b).for_each(|(r, w)| *r += z * w);
            }
            row
        })
        .collect())
}
