//! Gradients of the weighted fidelity loss.
//!
//! Every trainable angle enters through a gate `exp(-i·a·G)` whose generator
//! has eigenvalues ±½, so `∂F/∂a = [F(a + π/2) − F(a − π/2)] / 2` exactly.
//! Feature scalings enter as `a = ω_j·x_j`, hence `∂L/∂ω_j = x_j·∂L/∂a`.
//! Class weights enter linearly: `∂L/∂α_c = Σ_μ (α_c F_c − Y_c)·F_c`.
//!
//! Three routes are provided: the two-point parameter shift, central finite
//! differences on the loss, and reverse-mode (adjoint) differentiation of the
//! statevector, which costs a constant number of circuit passes per sample
//! and is what training uses by default.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};

use super::loss::{check_batch, residuals, weighted_fidelity_loss, LossValue};
use crate::circuit::{apply_op, generator_inner, AngleSource, Bindings};
use crate::data::Example;
use crate::error::{Error, Result};
use crate::model::{CircuitSpec, ClassScores, ParameterSet};
use crate::sim::{self, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GradientMethod {
    ParameterShift,
    FiniteDifference,
    Adjoint,
}

impl std::str::FromStr for GradientMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "parameter_shift" | "shift" => Ok(GradientMethod::ParameterShift),
            "finite_difference" | "fd" => Ok(GradientMethod::FiniteDifference),
            "adjoint" => Ok(GradientMethod::Adjoint),
            _ => Err(Error::invalid(format!("unknown gradient method {s:?}"))),
        }
    }
}

/// Step used when training with finite differences.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Same layout as [`ParameterSet`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradientVector {
    pub d_theta: Vec<f64>,
    pub d_omega: Vec<f64>,
    pub d_alpha: Vec<f64>,
}

impl GradientVector {
    fn zeros_like(params: &ParameterSet) -> Self {
        GradientVector {
            d_theta: vec![0.0; params.theta.len()],
            d_omega: vec![0.0; params.omega.len()],
            d_alpha: vec![0.0; params.alpha.len()],
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.d_theta
            .iter()
            .chain(&self.d_omega)
            .chain(&self.d_alpha)
            .copied()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        self.iter().collect()
    }

    pub fn is_finite(&self) -> bool {
        self.iter().all(f64::is_finite)
    }

    /// Routes an angle derivative to the parameter that produced the angle.
    #[inline]
    fn add_angle(&mut self, source: AngleSource, x: &[f64], g: f64) {
        match source {
            AngleSource::Theta(i) => self.d_theta[i] += g,
            AngleSource::Scaled {
                omega,
                feature: Some(f),
            } => self.d_omega[omega] += x[f] * g,
            AngleSource::Scaled { feature: None, .. } => {}
        }
    }

    fn add_alpha(&mut self, scores: &ClassScores, r: &[f64]) {
        for ((d, f), r) in self.d_alpha.iter_mut().zip(&scores.fidelities).zip(r) {
            *d += r * f;
        }
    }
}

fn scores_of(spec: &CircuitSpec, alpha: &[f64], state: &StateVector) -> Result<ClassScores> {
    let rho = sim::reduced_density(state, spec.readout_qubit())?;
    let fidelities = spec.fidelities(&rho);
    let weighted = fidelities.iter().zip(alpha).map(|(f, a)| a * f).collect();
    Ok(ClassScores { fidelities, weighted })
}

/// Exact gradient from circuit evaluations at each angle shifted by ±π/2.
pub fn gradient_parameter_shift(spec: &CircuitSpec, params: &ParameterSet, batch: &[Example<'_>]) -> Result<GradientVector> {
    check_batch(spec, params, batch)?;
    let program = spec.program();
    let mut grad = GradientVector::zeros_like(params);
    for ex in batch {
        let bind = params.bindings(ex.x);
        // prefix[k] is the state entering op k
        let mut prefix = Vec::with_capacity(program.ops.len() + 1);
        let mut state = StateVector::zero(spec.n_qubits())?;
        for op in &program.ops {
            prefix.push(state.clone());
            apply_op(&mut state, op.kind, bind.angle(op.angle))?;
        }
        let scores = scores_of(spec, &params.alpha, &state)?;
        let r = residuals(&scores, ex.label);
        grad.add_alpha(&scores, &r);

        for (k, op) in program.ops.iter().enumerate() {
            if matches!(op.angle, AngleSource::Scaled { feature: None, .. }) {
                continue;
            }
            let a = bind.angle(op.angle);
            let mut shifted = [0.0; 2];
            for (slot, delta) in shifted.iter_mut().zip([FRAC_PI_2, -FRAC_PI_2]) {
                let mut s = prefix[k].clone();
                apply_op(&mut s, op.kind, a + delta)?;
                program.run_range(&mut s, &bind, k + 1..program.ops.len())?;
                let f = scores_of(spec, &params.alpha, &s)?;
                // Σ_c r_c α_c F_c at the shifted angle
                *slot = f.weighted.iter().zip(&r).map(|(w, r)| w * r).sum();
            }
            grad.add_angle(op.angle, ex.x, (shifted[0] - shifted[1]) / 2.0);
        }
    }
    Ok(grad)
}

/// Central differences `(L(p + h·e_k) − L(p − h·e_k)) / 2h` per coordinate.
pub fn gradient_finite_difference(
    spec: &CircuitSpec,
    params: &ParameterSet,
    batch: &[Example<'_>],
    h: f64,
) -> Result<GradientVector> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::invalid(format!("finite-difference step must be positive, got {h}")));
    }
    check_batch(spec, params, batch)?;
    let mut flat = Vec::with_capacity(params.len());
    let mut probe = params.clone();
    for k in 0..params.len() {
        let orig = params.get(k);
        *probe.get_mut(k) = orig + h;
        let up = weighted_fidelity_loss(spec, &probe, batch)?.value;
        *probe.get_mut(k) = orig - h;
        let down = weighted_fidelity_loss(spec, &probe, batch)?.value;
        *probe.get_mut(k) = orig;
        flat.push((up - down) / (2.0 * h));
    }
    let (t, o) = (params.theta.len(), params.omega.len());
    Ok(GradientVector {
        d_theta: flat[..t].to_vec(),
        d_omega: flat[t..t + o].to_vec(),
        d_alpha: flat[t + o..].to_vec(),
    })
}

/// Reverse-mode gradient: one forward pass, then the circuit is unwound
/// gate by gate while a co-state carries `O|ψ⟩` with
/// `O = Σ_c (α_c F_c − Y_c)·α_c·|ψ_c⟩⟨ψ_c|` on the readout qubit.
pub fn gradient_adjoint(spec: &CircuitSpec, params: &ParameterSet, batch: &[Example<'_>]) -> Result<(LossValue, GradientVector)> {
    check_batch(spec, params, batch)?;
    let program = spec.program();
    let readout = spec.readout_qubit();
    let mut grad = GradientVector::zeros_like(params);
    let mut per_class = vec![0.0; spec.n_classes()];
    for ex in batch {
        let bind: Bindings<'_> = params.bindings(ex.x);
        let mut psi = StateVector::zero(spec.n_qubits())?;
        program.run(&mut psi, &bind)?;
        let scores = scores_of(spec, &params.alpha, &psi)?;
        let r = residuals(&scores, ex.label);
        for (acc, v) in per_class.iter_mut().zip(&r) {
            *acc += 0.5 * v * v;
        }
        grad.add_alpha(&scores, &r);

        let mut observable = [[Complex::new(0.0, 0.0); 2]; 2];
        for ((t, rc), a) in spec.class_states().iter().zip(&r).zip(&params.alpha) {
            let w = rc * a;
            for (i, row) in observable.iter_mut().enumerate() {
                for (j, cell) in row.iter_mut().enumerate() {
                    *cell += t[i] * t[j].conj() * w;
                }
            }
        }
        let mut phi = psi.clone();
        phi.apply_matrix_1q(&observable, readout);

        for op in program.ops.iter().rev() {
            let a = bind.angle(op.angle);
            if !matches!(op.angle, AngleSource::Scaled { feature: None, .. }) {
                let g = 2.0 * generator_inner(&phi, &psi, op.kind).im;
                grad.add_angle(op.angle, ex.x, g);
            }
            apply_op(&mut psi, op.kind, -a)?;
            apply_op(&mut phi, op.kind, -a)?;
        }
    }
    let loss = LossValue {
        value: per_class.iter().sum(),
        per_class_terms: per_class,
    };
    Ok((loss, grad))
}

/// Loss and gradient at `params` with the chosen method.
pub fn loss_and_gradient(
    spec: &CircuitSpec,
    params: &ParameterSet,
    batch: &[Example<'_>],
    method: GradientMethod,
) -> Result<(LossValue, GradientVector)> {
    match method {
        GradientMethod::Adjoint => gradient_adjoint(spec, params, batch),
        GradientMethod::ParameterShift => Ok((
            weighted_fidelity_loss(spec, params, batch)?,
            gradient_parameter_shift(spec, params, batch)?,
        )),
        GradientMethod::FiniteDifference => Ok((
            weighted_fidelity_loss(spec, params, batch)?,
            gradient_finite_difference(spec, params, batch, DEFAULT_FD_STEP)?,
        )),
    }
}
