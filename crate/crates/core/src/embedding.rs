//! Feature embeddings and the packing rules that place a `d`-dimensional
//! feature vector on an `n`-qubit register inside one layer.
//!
//! Each layer is `R(θ) ∘ R(ω ∘ x)`: a data-encoding half whose angles are
//! `ω_j·x_j`, followed by a trainable half whose angles are `θ_k`.
//!
//! * `ROT`: features are zero-padded to a multiple of 3; each triple drives
//!   one `Rot(φ, θ, ω)` gate, gate `g` sits on qubit `g mod n`. The trainable
//!   half repeats the same placement with angles from `θ`.
//! * `ANGLE_*`: feature `j` is a single-axis rotation on qubit `j mod n`
//!   (chunks of at most `n` features are applied in sequence), followed by one
//!   trainable rotation of the same axis on every qubit.
//! * `QAOA`: per chunk of at most `n` features, `RX(ω_j·x_j)` on qubit
//!   `j mod n`, then trainable `ZZ` entanglers on the ring `(q, q+1 mod n)`
//!   (a single pair when `n = 2`), then trainable `RY` on every qubit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{AngleSource, Axis, Bindings, GateOp, Program};
use crate::error::{Error, Result};
use crate::sim::StateVector;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EmbeddingKind {
    Rot,
    AngleX,
    AngleY,
    AngleZ,
    Qaoa,
}

impl EmbeddingKind {
    pub const ALL: [EmbeddingKind; 5] = [
        EmbeddingKind::Rot,
        EmbeddingKind::AngleX,
        EmbeddingKind::AngleY,
        EmbeddingKind::AngleZ,
        EmbeddingKind::Qaoa,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EmbeddingKind::Rot => "ROT",
            EmbeddingKind::AngleX => "ANGLE_X",
            EmbeddingKind::AngleY => "ANGLE_Y",
            EmbeddingKind::AngleZ => "ANGLE_Z",
            EmbeddingKind::Qaoa => "QAOA",
        }
    }

    pub fn angle(axis: Axis) -> Self {
        match axis {
            Axis::X => EmbeddingKind::AngleX,
            Axis::Y => EmbeddingKind::AngleY,
            Axis::Z => EmbeddingKind::AngleZ,
        }
    }

    fn angle_axis(self) -> Option<Axis> {
        match self {
            EmbeddingKind::AngleX => Some(Axis::X),
            EmbeddingKind::AngleY => Some(Axis::Y),
            EmbeddingKind::AngleZ => Some(Axis::Z),
            _ => None,
        }
    }
}

impl fmt::Display for EmbeddingKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EmbeddingKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EmbeddingKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown embedding kind {s:?}")))
    }
}

fn ring_pairs(n_qubits: usize) -> Vec<(usize, usize)> {
    match n_qubits {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        n => (0..n).map(|q| (q, (q + 1) % n)).collect(),
    }
}

/// Returns `(data_params, var_params)` for one layer.
pub fn param_counts(kind: EmbeddingKind, feature_dim: usize, n_qubits: usize) -> Result<(usize, usize)> {
    if feature_dim == 0 {
        return Err(Error::invalid("feature dimension must be at least 1"));
    }
    if n_qubits == 0 {
        return Err(Error::invalid("register must have at least 1 qubit"));
    }
    let chunks = feature_dim.div_ceil(n_qubits);
    Ok(match kind {
        EmbeddingKind::Rot => {
            let padded = 3 * feature_dim.div_ceil(3);
            (padded, padded)
        }
        EmbeddingKind::AngleX | EmbeddingKind::AngleY | EmbeddingKind::AngleZ => (feature_dim, n_qubits),
        EmbeddingKind::Qaoa => {
            if n_qubits < 2 {
                return Err(Error::UnsupportedConfiguration(
                    "QAOA embedding needs at least 2 qubits".into(),
                ));
            }
            (feature_dim, chunks * (ring_pairs(n_qubits).len() + n_qubits))
        }
    })
}

/// One embedding layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LayerSpecRepr")]
pub struct LayerSpec {
    kind: EmbeddingKind,
    n_qubits: usize,
    feature_dim: usize,
    data_param_count: usize,
    var_param_count: usize,
}

#[derive(Deserialize)]
struct LayerSpecRepr {
    kind: EmbeddingKind,
    n_qubits: usize,
    feature_dim: usize,
    data_param_count: Option<usize>,
    var_param_count: Option<usize>,
}

impl TryFrom<LayerSpecRepr> for LayerSpec {
    type Error = Error;

    fn try_from(r: LayerSpecRepr) -> Result<Self> {
        let spec = LayerSpec::new(r.kind, r.n_qubits, r.feature_dim)?;
        let mismatch = |given: Option<usize>, want: usize| given.is_some_and(|g| g != want);
        if mismatch(r.data_param_count, spec.data_param_count)
            || mismatch(r.var_param_count, spec.var_param_count)
        {
            return Err(Error::invalid(format!(
                "parameter counts do not match a {} layer with d={} on {} qubits",
                r.kind, r.feature_dim, r.n_qubits
            )));
        }
        Ok(spec)
    }
}

impl LayerSpec {
    pub fn new(kind: EmbeddingKind, n_qubits: usize, feature_dim: usize) -> Result<Self> {
        let (data_param_count, var_param_count) = param_counts(kind, feature_dim, n_qubits)?;
        Ok(LayerSpec {
            kind,
            n_qubits,
            feature_dim,
            data_param_count,
            var_param_count,
        })
    }

    pub fn kind(&self) -> EmbeddingKind {
        self.kind
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn data_param_count(&self) -> usize {
        self.data_param_count
    }

    pub fn var_param_count(&self) -> usize {
        self.var_param_count
    }

    /// Lowers the layer to primitive gates with layer-local parameter indices.
    pub fn ops(&self) -> Vec<GateOp> {
        let n = self.n_qubits;
        let d = self.feature_dim;
        let scaled = |j: usize| AngleSource::Scaled {
            omega: j,
            feature: (j < d).then_some(j),
        };
        let mut ops = Vec::new();
        match self.kind {
            EmbeddingKind::Rot => {
                let gates = self.data_param_count / 3;
                for g in 0..gates {
                    push_rot(&mut ops, g % n, [0, 1, 2].map(|k| scaled(3 * g + k)));
                }
                for g in 0..gates {
                    push_rot(&mut ops, g % n, [0, 1, 2].map(|k| AngleSource::Theta(3 * g + k)));
                }
            }
            EmbeddingKind::AngleX | EmbeddingKind::AngleY | EmbeddingKind::AngleZ => {
                let axis = self.kind.angle_axis().expect("angle kind");
                for j in 0..d {
                    ops.push(GateOp::rotation(axis, j % n, scaled(j)));
                }
                for q in 0..n {
                    ops.push(GateOp::rotation(axis, q, AngleSource::Theta(q)));
                }
            }
            EmbeddingKind::Qaoa => {
                let pairs = ring_pairs(n);
                let mut t = 0;
                for start in (0..d).step_by(n) {
                    for j in start..(start + n).min(d) {
                        ops.push(GateOp::rotation(Axis::X, j % n, scaled(j)));
                    }
                    for &(a, b) in &pairs {
                        ops.push(GateOp::zz(a, b, AngleSource::Theta(t)));
                        t += 1;
                    }
                    for q in 0..n {
                        ops.push(GateOp::rotation(Axis::Y, q, AngleSource::Theta(t)));
                        t += 1;
                    }
                }
            }
        }
        ops
    }
}

/// `Rot(φ, θ, ω) = RZ(ω)·RY(θ)·RZ(φ)`: `RZ(φ)` acts first.
fn push_rot(ops: &mut Vec<GateOp>, qubit: usize, [phi, theta, omega]: [AngleSource; 3]) {
    ops.push(GateOp::rotation(Axis::Z, qubit, phi));
    ops.push(GateOp::rotation(Axis::Y, qubit, theta));
    ops.push(GateOp::rotation(Axis::Z, qubit, omega));
}

/// Applies one layer to `state` and returns the result.
pub fn apply_embedding_layer(
    state: &StateVector,
    spec: &LayerSpec,
    x: &[f64],
    omega: &[f64],
    theta: &[f64],
) -> Result<StateVector> {
    if state.n_qubits() != spec.n_qubits {
        return Err(Error::invalid(format!(
            "layer expects {} qubits, state has {}",
            spec.n_qubits,
            state.n_qubits()
        )));
    }
    if x.len() != spec.feature_dim {
        return Err(Error::invalid(format!(
            "expected {} features, got {}",
            spec.feature_dim,
            x.len()
        )));
    }
    if omega.len() != spec.data_param_count || theta.len() != spec.var_param_count {
        return Err(Error::invalid(format!(
            "{} layer expects {} data and {} variational parameters, got {} and {}",
            spec.kind,
            spec.data_param_count,
            spec.var_param_count,
            omega.len(),
            theta.len()
        )));
    }
    let program = Program {
        n_qubits: spec.n_qubits,
        ops: spec.ops(),
    };
    let mut out = state.clone();
    program.run(&mut out, &Bindings { theta, omega, x })?;
    Ok(out)
}
