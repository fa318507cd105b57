//! Circuit assembly and forward evaluation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Axis, Bindings, Program};
use crate::embedding::{EmbeddingKind, LayerSpec};
use crate::error::{Error, Result};
use crate::sim::{self, Complex, ReducedDensityMatrix, StateVector};

/// Which of the two architectures a circuit follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ModelKind {
    Medq,
    Reuploading,
}

impl ModelKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Medq => "MEDQ",
            ModelKind::Reuploading => "REUPLOADING",
        }
    }
}

impl std::str::FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "medq" => Ok(ModelKind::Medq),
            "reuploading" | "data-reuploading" | "baseline" => Ok(ModelKind::Reuploading),
            _ => Err(Error::invalid(format!("unknown model {s:?}"))),
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The full layer stack plus readout conventions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CircuitSpecRepr", into = "CircuitSpecRepr")]
pub struct CircuitSpec {
    layers: Vec<LayerSpec>,
    n_qubits: usize,
    feature_dim: usize,
    readout_qubit: usize,
    class_states: Vec<[Complex; 2]>,
    program: Program,
    theta_len: usize,
    omega_len: usize,
}

#[derive(Serialize, Deserialize)]
struct CircuitSpecRepr {
    layers: Vec<LayerSpec>,
    n_qubits: usize,
    readout_qubit: usize,
    class_states: Vec<[Complex; 2]>,
}

impl From<CircuitSpec> for CircuitSpecRepr {
    fn from(c: CircuitSpec) -> Self {
        CircuitSpecRepr {
            layers: c.layers,
            n_qubits: c.n_qubits,
            readout_qubit: c.readout_qubit,
            class_states: c.class_states,
        }
    }
}

impl TryFrom<CircuitSpecRepr> for CircuitSpec {
    type Error = Error;

    fn try_from(r: CircuitSpecRepr) -> Result<Self> {
        let spec = CircuitSpec::new(r.layers, r.readout_qubit, r.class_states)?;
        if spec.n_qubits != r.n_qubits {
            return Err(Error::invalid("n_qubits disagrees with the layers"));
        }
        Ok(spec)
    }
}

/// `|0⟩` and `|1⟩`.
pub fn binary_class_states() -> Vec<[Complex; 2]> {
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    vec![[one, zero], [zero, one]]
}

impl CircuitSpec {
    pub fn new(layers: Vec<LayerSpec>, readout_qubit: usize, class_states: Vec<[Complex; 2]>) -> Result<Self> {
        let first = layers
            .first()
            .ok_or_else(|| Error::invalid("circuit needs at least one layer"))?;
        let n_qubits = first.n_qubits();
        let feature_dim = first.feature_dim();
        if layers
            .iter()
            .any(|l| l.n_qubits() != n_qubits || l.feature_dim() != feature_dim)
        {
            return Err(Error::invalid("all layers must share n_qubits and feature_dim"));
        }
        if readout_qubit >= n_qubits {
            return Err(Error::Index {
                index: readout_qubit,
                n_qubits,
            });
        }
        if class_states.len() < 2 {
            return Err(Error::invalid("need at least two class states"));
        }
        for s in &class_states {
            let norm = s[0].norm_sqr() + s[1].norm_sqr();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(Error::invalid("class states must be normalized"));
            }
        }
        for (i, a) in class_states.iter().enumerate() {
            for b in &class_states[i + 1..] {
                let overlap = (a[0].conj() * b[0] + a[1].conj() * b[1]).norm_sqr();
                if (overlap - 1.0).abs() < 1e-10 {
                    return Err(Error::invalid("class states must be pairwise distinct"));
                }
            }
        }

        let mut ops = Vec::new();
        let (mut theta_len, mut omega_len) = (0, 0);
        for layer in &layers {
            ops.extend(layer.ops().into_iter().map(|op| op.offset(theta_len, omega_len)));
            theta_len += layer.var_param_count();
            omega_len += layer.data_param_count();
        }
        Ok(CircuitSpec {
            layers,
            n_qubits,
            feature_dim,
            readout_qubit,
            class_states,
            program: Program { n_qubits, ops },
            theta_len,
            omega_len,
        })
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn readout_qubit(&self) -> usize {
        self.readout_qubit
    }

    pub fn class_states(&self) -> &[[Complex; 2]] {
        &self.class_states
    }

    pub fn n_classes(&self) -> usize {
        self.class_states.len()
    }

    pub fn program(&self) -> &Program {
        &self.program
    }

    pub fn theta_len(&self) -> usize {
        self.theta_len
    }

    pub fn omega_len(&self) -> usize {
        self.omega_len
    }

    /// Trainable scalars including the class weights.
    pub fn param_count(&self) -> usize {
        self.theta_len + self.omega_len + self.n_classes()
    }

    pub(crate) fn check(&self, params: &ParameterSet, x: &[f64]) -> Result<()> {
        if x.len() != self.feature_dim {
            return Err(Error::invalid(format!(
                "expected {} features, got {}",
                self.feature_dim,
                x.len()
            )));
        }
        self.check_params(params)
    }

    pub(crate) fn check_params(&self, params: &ParameterSet) -> Result<()> {
        if params.theta.len() != self.theta_len
            || params.omega.len() != self.omega_len
            || params.alpha.len() != self.n_classes()
        {
            return Err(Error::invalid(format!(
                "parameter lengths (theta {}, omega {}, alpha {}) do not match circuit ({}, {}, {})",
                params.theta.len(),
                params.omega.len(),
                params.alpha.len(),
                self.theta_len,
                self.omega_len,
                self.n_classes()
            )));
        }
        Ok(())
    }

    /// `Π L(i)|0…0⟩` without dimension checks.
    pub(crate) fn final_state(&self, params: &ParameterSet, x: &[f64]) -> Result<StateVector> {
        let mut state = StateVector::zero(self.n_qubits)?;
        self.program.run(&mut state, &params.bindings(x))?;
        Ok(state)
    }

    pub(crate) fn fidelities(&self, rho: &ReducedDensityMatrix) -> Vec<f64> {
        self.class_states
            .iter()
            .map(|t| sim::fidelity_unchecked(rho, t))
            .collect()
    }
}

/// `[ROT ×n, QAOA ×n, ANGLE_Y ×n]`.
pub fn build_medq(layers_per_block: usize, feature_dim: usize, n_qubits: usize) -> Result<CircuitSpec> {
    build_medq_with_axis(layers_per_block, feature_dim, n_qubits, Axis::Y)
}

/// MEDQ with the angle block rotating about `axis`.
pub fn build_medq_with_axis(
    layers_per_block: usize,
    feature_dim: usize,
    n_qubits: usize,
    axis: Axis,
) -> Result<CircuitSpec> {
    if layers_per_block == 0 {
        return Err(Error::invalid("MEDQ needs at least one layer per block"));
    }
    if n_qubits < 2 {
        return Err(Error::UnsupportedConfiguration(format!(
            "MEDQ needs at least 2 qubits for its QAOA block, got {n_qubits}"
        )));
    }
    let mut layers = Vec::with_capacity(3 * layers_per_block);
    for kind in [EmbeddingKind::Rot, EmbeddingKind::Qaoa, EmbeddingKind::angle(axis)] {
        for _ in 0..layers_per_block {
            layers.push(LayerSpec::new(kind, n_qubits, feature_dim)?);
        }
    }
    CircuitSpec::new(layers, 0, binary_class_states())
}

/// `n_layers` ROT layers.
pub fn build_reuploading_baseline(n_layers: usize, feature_dim: usize, n_qubits: usize) -> Result<CircuitSpec> {
    if n_layers == 0 {
        return Err(Error::invalid("baseline needs at least one layer"));
    }
    let layer = LayerSpec::new(EmbeddingKind::Rot, n_qubits, feature_dim)?;
    CircuitSpec::new(vec![layer; n_layers], 0, binary_class_states())
}

/// Trainable tensors: variational angles, feature scalings, class weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSet {
    pub theta: Vec<f64>,
    pub omega: Vec<f64>,
    pub alpha: Vec<f64>,
}

impl ParameterSet {
    pub fn zeros(spec: &CircuitSpec) -> Self {
        ParameterSet {
            theta: vec![0.0; spec.theta_len()],
            omega: vec![0.0; spec.omega_len()],
            alpha: vec![0.0; spec.n_classes()],
        }
    }

    /// θ ~ U[−π, π], ω ~ U[0, 1], α = 1.
    pub fn random<R: Rng + ?Sized>(spec: &CircuitSpec, rng: &mut R) -> Self {
        use std::f64::consts::PI;
        let theta = (0..spec.theta_len()).map(|_| rng.random_range(-PI..PI)).collect();
        let omega = (0..spec.omega_len()).map(|_| rng.random_range(0.0..1.0)).collect();
        ParameterSet {
            theta,
            omega,
            alpha: vec![1.0; spec.n_classes()],
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len() + self.omega.len() + self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(f64::is_finite)
    }

    /// Flat view in `theta, omega, alpha` order.
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.theta.iter().chain(&self.omega).chain(&self.alpha).copied()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.iter().collect()
    }

    pub fn get(&self, k: usize) -> f64 {
        let (t, o) = (self.theta.len(), self.omega.len());
        if k < t {
            self.theta[k]
        } else if k < t + o {
            self.omega[k - t]
        } else {
            self.alpha[k - t - o]
        }
    }

    pub fn get_mut(&mut self, k: usize) -> &mut f64 {
        let (t, o) = (self.theta.len(), self.omega.len());
        if k < t {
            &mut self.theta[k]
        } else if k < t + o {
            &mut self.omega[k - t]
        } else {
            &mut self.alpha[k - t - o]
        }
    }

    pub(crate) fn bindings<'a>(&'a self, x: &'a [f64]) -> Bindings<'a> {
        Bindings {
            theta: &self.theta,
            omega: &self.omega,
            x,
        }
    }
}

/// Per-class fidelities `F_c` and weighted outputs `α_c·F_c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub fidelities: Vec<f64>,
    pub weighted: Vec<f64>,
}

/// Runs the circuit on `x` from `|0…0⟩` and reads out the class fidelities
/// on the readout qubit.
pub fn forward(spec: &CircuitSpec, params: &ParameterSet, x: &[f64]) -> Result<ClassScores> {
    spec.check(params, x)?;
    forward_unchecked(spec, params, x)
}

pub(crate) fn forward_unchecked(spec: &CircuitSpec, params: &ParameterSet, x: &[f64]) -> Result<ClassScores> {
    let state = spec.final_state(params, x)?;
    let rho = sim::reduced_density(&state, spec.readout_qubit)?;
    let fidelities = spec.fidelities(&rho);
    let weighted = fidelities
        .iter()
        .zip(&params.alpha)
        .map(|(f, a)| a * f)
        .collect();
    Ok(ClassScores { fidelities, weighted })
}

/// Argmax of `α_c·F_c`; ties go to the lower class index.
pub fn predict(scores: &ClassScores) -> usize {
    let mut best = 0;
    for (c, &w) in scores.weighted.iter().enumerate().skip(1) {
        if w > scores.weighted[best] {
            best = c;
        }
    }
    best
}
