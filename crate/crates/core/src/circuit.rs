//! Flat gate programs.
//!
//! Every embedding layer lowers to a list of single-parameter gates
//! (`RX`, `RY`, `RZ`, `ZZ`), each generated by an operator with eigenvalues
//! ±½. A whole circuit is the concatenation of its layers' lists with the
//! parameter indices shifted into the flat `theta`/`omega` vectors.

use num_complex::Complex64 as Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sim::{self, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Where a gate's angle comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleSource {
    /// `theta[index]`.
    Theta(usize),
    /// `omega[index] * x[feature]`; `feature == None` marks zero padding.
    Scaled { omega: usize, feature: Option<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Rotation { axis: Axis, qubit: usize },
    Zz { a: usize, b: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateOp {
    pub kind: GateKind,
    pub angle: AngleSource,
}

impl GateOp {
    pub fn rotation(axis: Axis, qubit: usize, angle: AngleSource) -> Self {
        GateOp {
            kind: GateKind::Rotation { axis, qubit },
            angle,
        }
    }

    pub fn zz(a: usize, b: usize, angle: AngleSource) -> Self {
        GateOp {
            kind: GateKind::Zz { a, b },
            angle,
        }
    }

    pub(crate) fn offset(self, theta: usize, omega: usize) -> Self {
        let angle = match self.angle {
            AngleSource::Theta(i) => AngleSource::Theta(i + theta),
            AngleSource::Scaled { omega: j, feature } => AngleSource::Scaled {
                omega: j + omega,
                feature,
            },
        };
        GateOp { angle, ..self }
    }
}

/// Resolves angles against concrete parameter and feature slices.
#[derive(Debug, Clone, Copy)]
pub struct Bindings<'a> {
    pub theta: &'a [f64],
    pub omega: &'a [f64],
    pub x: &'a [f64],
}

impl Bindings<'_> {
    #[inline]
    pub fn angle(&self, source: AngleSource) -> f64 {
        match source {
            AngleSource::Theta(i) => self.theta[i],
            AngleSource::Scaled { omega, feature } => match feature {
                Some(f) => self.omega[omega] * self.x[f],
                None => 0.0,
            },
        }
    }
}

/// Applies `exp(-i·angle·G)` where `G` is the op's generator.
#[inline]
pub(crate) fn apply_op(state: &mut StateVector, kind: GateKind, angle: f64) -> Result<()> {
    if !angle.is_finite() {
        return Err(Error::invalid(format!("gate angle must be finite, got {angle}")));
    }
    let half = angle / 2.0;
    match kind {
        GateKind::Rotation { axis, qubit } => match axis {
            Axis::Z => state.apply_diag_1q(
                Complex::from_polar(1.0, -half),
                Complex::from_polar(1.0, half),
                qubit,
            ),
            Axis::Y => state.apply_matrix_1q(sim::ry(angle)?.matrix(), qubit),
            Axis::X => state.apply_matrix_1q(sim::rx(angle)?.matrix(), qubit),
        },
        GateKind::Zz { a, b } => state.apply_parity_phase(
            Complex::from_polar(1.0, -half),
            Complex::from_polar(1.0, half),
            a,
            b,
        ),
    }
    Ok(())
}

/// `⟨bra|G|ket⟩` for the op's generator `G` (Pauli/2).
pub(crate) fn generator_inner(bra: &StateVector, ket: &StateVector, kind: GateKind) -> Complex {
    match kind {
        GateKind::Rotation { axis, qubit } => {
            // s = [⟨0|0⟩, ⟨0|1⟩, ⟨1|0⟩, ⟨1|1⟩] blocks on the qubit
            let s = bra.pair_sums(ket, qubit);
            let i = Complex::i();
            let v = match axis {
                Axis::X => s[1] + s[2],
                Axis::Y => -i * s[1] + i * s[2],
                Axis::Z => s[0] - s[3],
            };
            v * 0.5
        }
        GateKind::Zz { a, b } => bra.parity_inner(ket, a, b) * 0.5,
    }
}

/// A compiled gate list acting on a fixed register width.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Program {
    pub n_qubits: usize,
    pub ops: Vec<GateOp>,
}

impl Program {
    pub fn run(&self, state: &mut StateVector, bind: &Bindings<'_>) -> Result<()> {
        self.run_range(state, bind, 0..self.ops.len())
    }

    pub(crate) fn run_range(
        &self,
        state: &mut StateVector,
        bind: &Bindings<'_>,
        range: std::ops::Range<usize>,
    ) -> Result<()> {
        for op in &self.ops[range] {
            apply_op(state, op.kind, bind.angle(op.angle))?;
        }
        Ok(())
    }
}
