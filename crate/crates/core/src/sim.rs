//! Dense statevector simulation.
//!
//! Basis ordering: qubit 0 is the most significant bit of the basis index, so
//! on a 3-qubit register the amplitude at index `0b100` belongs to `|1⟩⊗|0⟩⊗|0⟩`.
//! Global phases are kept as computed; compare states through fidelities or
//! moduli.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Largest register the dense simulator accepts (2^20 amplitudes).
pub const MAX_QUBITS: usize = 20;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

fn check_angle(angle: f64) -> Result<()> {
    if angle.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("rotation angle must be finite, got {angle}")))
    }
}

/// Single-qubit unitary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate1Q {
    m: [[Complex; 2]; 2],
}

impl Gate1Q {
    pub fn identity() -> Self {
        Gate1Q {
            m: [[ONE, ZERO], [ZERO, ONE]],
        }
    }

    /// Wraps a matrix after checking it is unitary within `1e-10`.
    pub fn from_matrix(m: [[Complex; 2]; 2]) -> Result<Self> {
        let g = Gate1Q { m };
        if !g.is_unitary(1e-10) {
            return Err(Error::invalid("2x2 matrix is not unitary"));
        }
        Ok(g)
    }

    pub fn matrix(&self) -> &[[Complex; 2]; 2] {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex {
        self.m[row][col]
    }

    /// Matrix product `self · rhs` (apply `rhs` first).
    pub fn mul(&self, rhs: &Gate1Q) -> Gate1Q {
        let mut out = [[ZERO; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = self.m[i][0] * rhs.m[0][j] + self.m[i][1] * rhs.m[1][j];
            }
        }
        Gate1Q { m: out }
    }

    pub fn dagger(&self) -> Gate1Q {
        let m = &self.m;
        Gate1Q {
            m: [[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]],
        }
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        let p = self.dagger().mul(self);
        (0..2).all(|i| (0..2).all(|j| (p.m[i][j] - if i == j { ONE } else { ZERO }).norm() <= tol))
    }

    /// Image of `|0⟩`, i.e. the first column.
    pub fn column(&self, col: usize) -> [Complex; 2] {
        [self.m[0][col], self.m[1][col]]
    }
}

/// Two-qubit unitary. Row/column index is `2·b0 + b1` where `b0` is the bit of
/// the first target and `b1` the bit of the second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate2Q {
    m: [[Complex; 4]; 4],
}

impl Gate2Q {
    pub fn identity() -> Self {
        let mut m = [[ZERO; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = ONE;
        }
        Gate2Q { m }
    }

    pub fn from_matrix(m: [[Complex; 4]; 4]) -> Result<Self> {
        let g = Gate2Q { m };
        if !g.is_unitary(1e-10) {
            return Err(Error::invalid("4x4 matrix is not unitary"));
        }
        Ok(g)
    }

    pub fn matrix(&self) -> &[[Complex; 4]; 4] {
        &self.m
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = ZERO;
                for k in 0..4 {
                    acc += self.m[k][i].conj() * self.m[k][j];
                }
                let expected = if i == j { ONE } else { ZERO };
                if (acc - expected).norm() > tol {
                    return false;
                }
            }
        }
        true
    }
}

pub fn rz(angle: f64) -> Result<Gate1Q> {
    check_angle(angle)?;
    let half = angle / 2.0;
    Ok(Gate1Q {
        m: [
            [Complex::from_polar(1.0, -half), ZERO],
            [ZERO, Complex::from_polar(1.0, half)],
        ],
    })
}

pub fn ry(angle: f64) -> Result<Gate1Q> {
    check_angle(angle)?;
    let (s, c) = (angle / 2.0).sin_cos();
    Ok(Gate1Q {
        m: [
            [Complex::new(c, 0.0), Complex::new(-s, 0.0)],
            [Complex::new(s, 0.0), Complex::new(c, 0.0)],
        ],
    })
}

pub fn rx(angle: f64) -> Result<Gate1Q> {
    check_angle(angle)?;
    let (s, c) = (angle / 2.0).sin_cos();
    Ok(Gate1Q {
        m: [
            [Complex::new(c, 0.0), Complex::new(0.0, -s)],
            [Complex::new(0.0, -s), Complex::new(c, 0.0)],
        ],
    })
}

/// General rotation `RZ(omega)·RY(theta)·RZ(phi)`, written out in closed form.
pub fn rot(phi: f64, theta: f64, omega: f64) -> Result<Gate1Q> {
    check_angle(phi)?;
    check_angle(theta)?;
    check_angle(omega)?;
    let (s, c) = (theta / 2.0).sin_cos();
    let sum = (phi + omega) / 2.0;
    let diff = (phi - omega) / 2.0;
    Ok(Gate1Q {
        m: [
            [Complex::from_polar(c, -sum), -Complex::from_polar(s, diff)],
            [Complex::from_polar(s, -diff), Complex::from_polar(c, sum)],
        ],
    })
}

/// `exp(-i·angle·(Z⊗Z)/2)`.
pub fn zz_interaction(angle: f64) -> Result<Gate2Q> {
    check_angle(angle)?;
    let minus = Complex::from_polar(1.0, -angle / 2.0);
    let plus = Complex::from_polar(1.0, angle / 2.0);
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = minus;
    m[1][1] = plus;
    m[2][2] = plus;
    m[3][3] = minus;
    Ok(Gate2Q { m })
}

/// Pure state of an `n_qubits` register.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_width(n_qubits)?;
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::invalid(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(StateVector { n_qubits, amps })
    }

    /// Takes ownership of raw amplitudes. The length must be a power of two and
    /// the vector must be normalized within `1e-10`.
    pub fn from_amplitudes(amps: Vec<Complex>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::invalid(format!(
                "amplitude count {dim} is not a power of two >= 2"
            )));
        }
        let n_qubits = dim.trailing_zeros() as usize;
        check_width(n_qubits)?;
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::invalid("amplitudes must be finite"));
        }
        let state = StateVector { n_qubits, amps };
        if (state.norm_sqr() - 1.0).abs() > 1e-10 {
            return Err(Error::invalid(format!(
                "state is not normalized: |psi|^2 = {}",
                state.norm_sqr()
            )));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q < self.n_qubits {
            Ok(())
        } else {
            Err(Error::Index {
                index: q,
                n_qubits: self.n_qubits,
            })
        }
    }

    #[inline]
    fn stride(&self, q: usize) -> usize {
        1 << (self.n_qubits - 1 - q)
    }

    /// In-place variant of [`apply_1q`].
    pub fn apply_1q_mut(&mut self, gate: &Gate1Q, target: usize) -> Result<()> {
        self.check_qubit(target)?;
        self.apply_matrix_1q(&gate.m, target);
        Ok(())
    }

    /// Applies an arbitrary (not necessarily unitary) 2x2 matrix. Callers must
    /// have validated `target`.
    pub(crate) fn apply_matrix_1q(&mut self, m: &[[Complex; 2]; 2], target: usize) {
        let stride = self.stride(target);
        let [[m00, m01], [m10, m11]] = *m;
        for block in self.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x0, x1) = (*a0, *a1);
                *a0 = m00 * x0 + m01 * x1;
                *a1 = m10 * x0 + m11 * x1;
            }
        }
    }

    /// Multiplies amplitudes whose `target` bit is 0 by `d0` and the rest by `d1`.
    pub(crate) fn apply_diag_1q(&mut self, d0: Complex, d1: Complex, target: usize) {
        let stride = self.stride(target);
        for block in self.amps.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            lo.iter_mut().for_each(|a| *a *= d0);
            hi.iter_mut().for_each(|a| *a *= d1);
        }
    }

    /// Multiplies by `even` where the two target bits agree and by `odd` otherwise.
    pub(crate) fn apply_parity_phase(&mut self, even: Complex, odd: Complex, a: usize, b: usize) {
        let (sa, sb) = (self.stride(a), self.stride(b));
        for (i, amp) in self.amps.iter_mut().enumerate() {
            let pa = i & sa != 0;
            let pb = i & sb != 0;
            *amp *= if pa == pb { even } else { odd };
        }
    }

    /// In-place variant of [`apply_2q`].
    pub fn apply_2q_mut(&mut self, gate: &Gate2Q, targets: (usize, usize)) -> Result<()> {
        let (a, b) = targets;
        self.check_qubit(a)?;
        self.check_qubit(b)?;
        if a == b {
            return Err(Error::Index {
                index: b,
                n_qubits: self.n_qubits,
            });
        }
        let (sa, sb) = (self.stride(a), self.stride(b));
        let m = &gate.m;
        for i in 0..self.amps.len() {
            if i & sa != 0 || i & sb != 0 {
                continue;
            }
            let idx = [i, i | sb, i | sa, i | sa | sb];
            let x = idx.map(|k| self.amps[k]);
            for (r, &k) in idx.iter().enumerate() {
                self.amps[k] = m[r][0] * x[0] + m[r][1] * x[1] + m[r][2] * x[2] + m[r][3] * x[3];
            }
        }
        Ok(())
    }

    /// `Σ_k conj(self_k)·other_k` restricted to pairs differing in `target`,
    /// i.e. `⟨self|X_target|other⟩`-style sums are built from these.
    pub(crate) fn pair_sums(&self, other: &StateVector, target: usize) -> [Complex; 4] {
        // [⟨0|0⟩, ⟨0|1⟩, ⟨1|0⟩, ⟨1|1⟩] contributions on the target qubit
        let stride = self.stride(target);
        let mut acc = [ZERO; 4];
        for (sb, ob) in self
            .amps
            .chunks_exact(2 * stride)
            .zip(other.amps.chunks_exact(2 * stride))
        {
            for k in 0..stride {
                let (s0, s1) = (sb[k].conj(), sb[k + stride].conj());
                let (o0, o1) = (ob[k], ob[k + stride]);
                acc[0] += s0 * o0;
                acc[1] += s0 * o1;
                acc[2] += s1 * o0;
                acc[3] += s1 * o1;
            }
        }
        acc
    }

    /// `Σ conj(self_k)·other_k·(±1)` with sign +1 when bits `a` and `b` agree.
    pub(crate) fn parity_inner(&self, other: &StateVector, a: usize, b: usize) -> Complex {
        let (sa, sb) = (self.stride(a), self.stride(b));
        let mut acc = ZERO;
        for (i, (s, o)) in self.amps.iter().zip(&other.amps).enumerate() {
            let t = s.conj() * o;
            if (i & sa != 0) == (i & sb != 0) {
                acc += t;
            } else {
                acc -= t;
            }
        }
        acc
    }
}

fn check_width(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > MAX_QUBITS {
        return Err(Error::UnsupportedConfiguration(format!(
            "register width must be in 1..={MAX_QUBITS}, got {n_qubits}"
        )));
    }
    Ok(())
}

/// Returns `(I⊗…⊗gate⊗…⊗I)·state`.
pub fn apply_1q(state: &StateVector, gate: &Gate1Q, target: usize) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply_1q_mut(gate, target)?;
    Ok(out)
}

/// Returns the state with `gate` embedded on the ordered pair `targets`.
pub fn apply_2q(state: &StateVector, gate: &Gate2Q, targets: (usize, usize)) -> Result<StateVector> {
    let mut out = state.clone();
    out.apply_2q_mut(gate, targets)?;
    Ok(out)
}

/// Single-qubit reduced state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedDensityMatrix {
    m: [[Complex; 2]; 2],
}

impl ReducedDensityMatrix {
    pub fn entries(&self) -> &[[Complex; 2]; 2] {
        &self.m
    }

    pub fn trace(&self) -> Complex {
        self.m[0][0] + self.m[1][1]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let b = self.m[0][1];
        let mid = (a + d) / 2.0;
        let rad = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
        [mid - rad, mid + rad]
    }

    pub fn purity(&self) -> f64 {
        let m = &self.m;
        m[0][0].norm_sqr() + m[1][1].norm_sqr() + 2.0 * m[0][1].norm_sqr()
    }
}

/// Traces out every qubit except `keep`.
pub fn reduced_density(state: &StateVector, keep: usize) -> Result<ReducedDensityMatrix> {
    state.check_qubit(keep)?;
    let s = state.pair_sums(state, keep);
    // pair_sums gives Σ conj(ψ_i)ψ_j; ρ_ij = Σ ψ_i conj(ψ_j)
    let rho01 = s[2];
    Ok(ReducedDensityMatrix {
        m: [
            [Complex::new(s[0].re, 0.0), rho01],
            [rho01.conj(), Complex::new(s[3].re, 0.0)],
        ],
    })
}

/// `⟨target|ρ|target⟩`, clamped to `[0, 1]`.
pub fn fidelity(rho: &ReducedDensityMatrix, target: &[Complex; 2]) -> Result<f64> {
    let norm = target[0].norm_sqr() + target[1].norm_sqr();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-10 {
        return Err(Error::invalid(format!(
            "target state must be normalized, |t|^2 = {norm}"
        )));
    }
    Ok(fidelity_unchecked(rho, target))
}

pub(crate) fn fidelity_unchecked(rho: &ReducedDensityMatrix, t: &[Complex; 2]) -> f64 {
    let m = &rho.m;
    let mut acc = ZERO;
    for a in 0..2 {
        for b in 0..2 {
            acc += t[a].conj() * m[a][b] * t[b];
        }
    }
    acc.re.clamp(0.0, 1.0)
}
