//! Dense reference implementations used as test oracles. Nothing here calls
//! into the simulator kernels: gates are built from Pauli exponentials,
//! placed on the register with explicit Kronecker products or index sums, and
//! layers are re-derived from their gate-placement rules.
#![allow(dead_code)]

use medq::embedding::EmbeddingKind;
use medq::sim::Complex;
use rand::Rng;

pub type Mat = Vec<Vec<Complex>>;

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

pub fn eye(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect())
        .collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|t| a[i][t] * b[t][j]).sum()).collect())
        .collect()
}

pub fn matvec(a: &Mat, v: &[Complex]) -> Vec<Complex> {
    a.iter().map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum()).collect()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ra, ca, rb, cb) = (a.len(), a[0].len(), b.len(), b[0].len());
    let mut out = vec![vec![c(0.0, 0.0); ca * cb]; ra * rb];
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn dagger(a: &Mat) -> Mat {
    (0..a[0].len())
        .map(|j| (0..a.len()).map(|i| a[i][j].conj()).collect())
        .collect()
}

pub fn pauli_x() -> Mat {
    vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]
}

pub fn pauli_y() -> Mat {
    vec![vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]
}

pub fn pauli_z() -> Mat {
    vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]]
}

/// `exp(−i·a·P/2) = cos(a/2)·I − i·sin(a/2)·P` for an involutory `P`.
pub fn pauli_exp(p: &Mat, angle: f64) -> Mat {
    let n = p.len();
    let (s, co) = (angle / 2.0).sin_cos();
    let id = eye(n);
    (0..n)
        .map(|i| (0..n).map(|j| id[i][j] * co + p[i][j] * c(0.0, -s)).collect())
        .collect()
}

pub fn rx_ref(a: f64) -> Mat {
    pauli_exp(&pauli_x(), a)
}
pub fn ry_ref(a: f64) -> Mat {
    pauli_exp(&pauli_y(), a)
}
pub fn rz_ref(a: f64) -> Mat {
    pauli_exp(&pauli_z(), a)
}
pub fn zz_ref(a: f64) -> Mat {
    pauli_exp(&kron(&pauli_z(), &pauli_z()), a)
}

/// `I ⊗ … ⊗ G ⊗ … ⊗ I` with `G` in slot `target` (qubit 0 leftmost).
pub fn embed_1q(g: &Mat, target: usize, n: usize) -> Mat {
    let mut out = vec![vec![c(1.0, 0.0)]];
    for q in 0..n {
        out = kron(&out, if q == target { g } else { &IDENTITY2 });
    }
    out
}

static IDENTITY2: std::sync::LazyLock<Mat> = std::sync::LazyLock::new(|| eye(2));

/// Full-register matrix of a two-qubit gate on ordered targets `(a, b)`,
/// written entry by entry: `M[i][j] = G[2·i_a + i_b][2·j_a + j_b]` when all
/// other bits of `i` and `j` agree, else 0.
pub fn embed_2q(g: &Mat, a: usize, b: usize, n: usize) -> Mat {
    let dim = 1 << n;
    let bit = |x: usize, q: usize| (x >> (n - 1 - q)) & 1;
    let mask = !((1 << (n - 1 - a)) | (1 << (n - 1 - b))) & (dim - 1);
    let mut out = vec![vec![c(0.0, 0.0); dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            if i & mask == j & mask {
                out[i][j] = g[2 * bit(i, a) + bit(i, b)][2 * bit(j, a) + bit(j, b)];
            }
        }
    }
    out
}

pub fn random_unitary_2(rng: &mut impl Rng) -> Mat {
    let a = rng.random_range(-3.2..3.2);
    let b = rng.random_range(-3.2..3.2);
    let d = rng.random_range(-3.2..3.2);
    let g = rng.random_range(-3.2..3.2);
    let phase = Complex::from_polar(1.0, g);
    let m = matmul(&matmul(&rz_ref(a), &ry_ref(b)), &rz_ref(d));
    m.iter().map(|r| r.iter().map(|x| x * phase).collect()).collect()
}

pub fn random_unitary_4(rng: &mut impl Rng) -> Mat {
    let mut u = matmul(
        &kron(&random_unitary_2(rng), &random_unitary_2(rng)),
        &zz_ref(rng.random_range(-3.2..3.2)),
    );
    let cx = {
        let mut m = eye(4);
        m.swap(2, 3);
        m
    };
    u = matmul(&matmul(&u, &cx), &kron(&random_unitary_2(rng), &random_unitary_2(rng)));
    matmul(&u, &pauli_exp(&kron(&pauli_x(), &pauli_y()), rng.random_range(-3.2..3.2)))
}

pub fn random_state(n: usize, rng: &mut impl Rng) -> Vec<Complex> {
    let v: Vec<Complex> = (0..1 << n)
        .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

pub fn max_diff(a: &[Complex], b: &[Complex]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `ρ[r][s] = Σ_rest ψ[r, rest]·conj(ψ[s, rest])` for the kept qubit.
pub fn partial_trace_ref(psi: &[Complex], keep: usize, n: usize) -> [[Complex; 2]; 2] {
    let mut rho = [[c(0.0, 0.0); 2]; 2];
    for i in 0..psi.len() {
        for j in 0..psi.len() {
            let bi = (i >> (n - 1 - keep)) & 1;
            let bj = (j >> (n - 1 - keep)) & 1;
            let rest = !(1 << (n - 1 - keep));
            if i & rest == j & rest {
                rho[bi][bj] += psi[i] * psi[j].conj();
            }
        }
    }
    rho
}

/// One reference gate with its resolved angle.
pub enum RefGate {
    One(Mat, usize),
    Two(Mat, usize, usize),
}

/// Gate list of one layer, re-derived from the placement rules:
/// ROT pads to triples, gate `g` on qubit `g mod n`, data half then θ half;
/// ANGLE puts feature `j` on qubit `j mod n` then one θ rotation per qubit;
/// QAOA per chunk of `n` features: RX(ω·x), ZZ on the ring, RY per qubit.
pub fn layer_gates(kind: EmbeddingKind, n: usize, x: &[f64], omega: &[f64], theta: &[f64]) -> Vec<RefGate> {
    let d = x.len();
    let mut out = Vec::new();
    let feature = |j: usize| if j < d { omega[j] * x[j] } else { 0.0 };
    let rot3 = |a: f64, b: f64, g: f64| matmul(&matmul(&rz_ref(g), &ry_ref(b)), &rz_ref(a));
    match kind {
        EmbeddingKind::Rot => {
            let gates = d.div_ceil(3);
            for g in 0..gates {
                out.push(RefGate::One(rot3(feature(3 * g), feature(3 * g + 1), feature(3 * g + 2)), g % n));
            }
            for g in 0..gates {
                out.push(RefGate::One(rot3(theta[3 * g], theta[3 * g + 1], theta[3 * g + 2]), g % n));
            }
        }
        EmbeddingKind::AngleX | EmbeddingKind::AngleY | EmbeddingKind::AngleZ => {
            let r: fn(f64) -> Mat = match kind {
                EmbeddingKind::AngleX => rx_ref,
                EmbeddingKind::AngleY => ry_ref,
                _ => rz_ref,
            };
            for j in 0..d {
                out.push(RefGate::One(r(feature(j)), j % n));
            }
            for q in 0..n {
                out.push(RefGate::One(r(theta[q]), q));
            }
        }
        EmbeddingKind::Qaoa => {
            let pairs: Vec<(usize, usize)> = if n == 2 {
                vec![(0, 1)]
            } else {
                (0..n).map(|q| (q, (q + 1) % n)).collect()
            };
            let mut t = 0;
            let mut start = 0;
            while start < d {
                for j in start..(start + n).min(d) {
                    out.push(RefGate::One(rx_ref(feature(j)), j % n));
                }
                for &(a, b) in &pairs {
                    out.push(RefGate::Two(zz_ref(theta[t]), a, b));
                    t += 1;
                }
                for q in 0..n {
                    out.push(RefGate::One(ry_ref(theta[t]), q));
                    t += 1;
                }
                start += n;
            }
        }
    }
    out
}

/// Dense product of a gate list applied to `psi`.
pub fn run_gates(gates: &[RefGate], n: usize, psi: &[Complex]) -> Vec<Complex> {
    let mut u = eye(1 << n);
    for g in gates {
        let full = match g {
            RefGate::One(m, q) => embed_1q(m, *q, n),
            RefGate::Two(m, a, b) => embed_2q(m, *a, *b, n),
        };
        u = matmul(&full, &u);
    }
    matvec(&u, psi)
}

pub fn zero_state(n: usize) -> Vec<Complex> {
    let mut v = vec![c(0.0, 0.0); 1 << n];
    v[0] = c(1.0, 0.0);
    v
}

/// Reference weighted scores `α_c·⟨c|ρ|c⟩` for a stack of layers, with
/// parameters consumed layer by layer in order, readout on qubit 0 and class
/// states `|0⟩`, `|1⟩`.
pub fn forward_ref(
    layers: &[(EmbeddingKind, usize, usize)],
    n: usize,
    x: &[f64],
    theta: &[f64],
    omega: &[f64],
    alpha: &[f64],
) -> [f64; 2] {
    let mut psi = zero_state(n);
    let (mut to, mut oo) = (0, 0);
    for &(kind, dp, vp) in layers {
        let gates = layer_gates(kind, n, x, &omega[oo..oo + dp], &theta[to..to + vp]);
        psi = run_gates(&gates, n, &psi);
        oo += dp;
        to += vp;
    }
    assert_eq!((to, oo), (theta.len(), omega.len()));
    let rho = partial_trace_ref(&psi, 0, n);
    [alpha[0] * rho[0][0].re, alpha[1] * rho[1][1].re]
}
