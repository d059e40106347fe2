//! Pauli correlations and maximal CHSH values of two-qubit states.
//!
//! The correlation matrix uses the unnormalized convention
//! `m_st = tr(ρ σ_s ⊗ σ_t)`, so a pure product state has entries of modulus
//! at most one and the Bell states have `|m_ss| = 1`. With that convention the
//! maximal CHSH mean over all settings is `2·√(τ1 + τ2)`, where `τ1 ≥ τ2` are
//! the two largest eigenvalues of `MᵀM`.

use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use crate::error::{validation, Error, Result};
use crate::linalg::{self, hermitian_eigs, kron, pauli, pauli_dot, ComplexMatrix, Mat3};
use crate::states::{DensityMatrix, SchmidtParams};

/// Largest imaginary part tolerated in a Pauli expectation value.
pub const IMAG_TOL: f64 = 1e-10;

/// Tolerance on the norm of a measurement direction.
pub const UNIT_TOL: f64 = 1e-10;

/// Below this `τ1` the correlation matrix counts as zero.
pub const DEGENERATE_TAU: f64 = 1e-24;

/// Tsirelson's bound `2√2`.
pub const TSIRELSON: f64 = 2.0 * SQRT_2;

/// Classical CHSH bound.
pub const CLASSICAL_BOUND: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationMatrix {
    /// `m[s][t] = tr(ρ σ_s ⊗ σ_t)` for `s, t ∈ {x, y, z}`.
    pub m: Mat3,
    /// `tr(ρ σ_i ⊗ I)`.
    pub bloch_a: [f64; 3],
    /// `tr(ρ I ⊗ σ_j)`.
    pub bloch_b: [f64; 3],
}

impl CorrelationMatrix {
    pub fn frobenius_sq(&self) -> f64 {
        linalg::frobenius_sq(&self.m)
    }

    /// Largest entrywise difference in `m` only.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.m
            .iter()
            .flatten()
            .zip(other.m.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Maximal CHSH mean value together with the spectrum of `MᵀM`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshResult {
    pub value: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub tau_min: f64,
}

impl ChshResult {
    pub fn from_correlations(corr: &CorrelationMatrix) -> Self {
        let eig = hermitian_eigs(&ComplexMatrix::from_real(&linalg::gram(&corr.m)))
            .expect("3x3 Gram matrices are symmetric and within the eigensolver's range");
        let [tau1, tau2, tau_min] = [eig.values[0], eig.values[1], eig.values[2]];
        Self {
            value: 2.0 * (tau1 + tau2).max(0.0).sqrt(),
            tau1,
            tau2,
            tau_min,
        }
    }

    pub fn squared(&self) -> f64 {
        self.value * self.value
    }

    pub fn violates(&self) -> bool {
        self.value > CLASSICAL_BOUND + 1e-9
    }
}

/// Directions of Alice's `A1, A2` and Bob's `B1, B2` observables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSettings {
    pub a1: [f64; 3],
    pub a2: [f64; 3],
    pub b1: [f64; 3],
    pub b2: [f64; 3],
}

impl MeasurementSettings {
    pub fn new(a1: [f64; 3], a2: [f64; 3], b1: [f64; 3], b2: [f64; 3]) -> Result<Self> {
        let settings = Self { a1, a2, b1, b2 };
        settings.validate()?;
        Ok(settings)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("a1", self.a1), ("a2", self.a2), ("b1", self.b1), ("b2", self.b2)] {
            let norm = norm3(&v);
            if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
                return Err(validation(format!("setting {name} has norm {norm}, expected 1")));
            }
        }
        Ok(())
    }

    /// `A1⊗B1 + A1⊗B2 + A2⊗B1 − A2⊗B2` as a 4×4 operator.
    pub fn bell_operator(&self) -> ComplexMatrix {
        let [a1, a2, b1, b2] = [self.a1, self.a2, self.b1, self.b2].map(|v| pauli_dot(&v));
        let terms = [
            kron(&a1, &b1),
            kron(&a1, &b2),
            kron(&a2, &b1),
            kron(&a2, &b2).scale(Complex64::new(-1.0, 0.0)),
        ];
        terms.iter().skip(1).fold(terms[0].clone(), |acc, t| &acc + t)
    }
}

fn norm3(v: &[f64; 3]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn normalize3(v: [f64; 3]) -> Option<[f64; 3]> {
    let n = norm3(&v);
    (n > 0.0).then(|| v.map(|x| x / n))
}

fn ensure_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.n() != 2 {
        return Err(validation(format!(
            "expected a two-qubit state, got {} qubits",
            rho.n()
        )));
    }
    Ok(())
}

fn real_expectation(rho: &DensityMatrix, op: &ComplexMatrix) -> Result<f64> {
    let z = rho.matrix().trace_product(op);
    if z.im.abs() > IMAG_TOL {
        return Err(Error::Numeric(format!(
            "Pauli expectation has imaginary part {:e}",
            z.im
        )));
    }
    Ok(z.re)
}

pub fn correlation_matrix(rho: &DensityMatrix) -> Result<CorrelationMatrix> {
    ensure_two_qubits(rho)?;
    let id = pauli(0);
    let mut corr = CorrelationMatrix {
        m: [[0.0; 3]; 3],
        bloch_a: [0.0; 3],
        bloch_b: [0.0; 3],
    };
    for s in 0..3 {
        let sigma_s = pauli(s + 1);
        corr.bloch_a[s] = real_expectation(rho, &kron(&sigma_s, &id))?;
        corr.bloch_b[s] = real_expectation(rho, &kron(&id, &sigma_s))?;
        for t in 0..3 {
            corr.m[s][t] = real_expectation(rho, &kron(&sigma_s, &pauli(t + 1)))?;
        }
    }
    Ok(corr)
}

pub fn chsh_max(rho: &DensityMatrix) -> Result<ChshResult> {
    Ok(ChshResult::from_correlations(&correlation_matrix(rho)?))
}

/// `tr(ρ B)` for the Bell operator built from `settings`.
pub fn evaluate_bell(rho: &DensityMatrix, settings: &MeasurementSettings) -> Result<f64> {
    ensure_two_qubits(rho)?;
    settings.validate()?;
    real_expectation(rho, &settings.bell_operator())
}

/// Settings attaining [`chsh_max`].
///
/// With `c, c'` the dominant right-singular directions of `M`, Bob measures
/// along `cos θ·c ± sin θ·c'` where `tan θ = σ2/σ1`, and Alice measures along
/// the normalized images `M c` and `M c'`.
pub fn optimal_settings(rho: &DensityMatrix) -> Result<MeasurementSettings> {
    let corr = correlation_matrix(rho)?;
    let eig = hermitian_eigs(&ComplexMatrix::from_real(&linalg::gram(&corr.m)))?;
    let (tau1, tau2) = (eig.values[0].max(0.0), eig.values[1].max(0.0));
    if tau1 <= DEGENERATE_TAU {
        return Err(Error::Degenerate("correlation matrix is zero".into()));
    }

    // The Gram matrix is real, so Jacobi keeps its eigenvectors real.
    let real_vec = |k: usize| -> [f64; 3] {
        let v = eig.vector(k);
        [v[0].re, v[1].re, v[2].re]
    };
    let c1 = normalize3(real_vec(0)).ok_or_else(|| Error::Numeric("null eigenvector".into()))?;
    let c2 = normalize3(real_vec(1)).ok_or_else(|| Error::Numeric("null eigenvector".into()))?;

    let apply = |v: &[f64; 3]| -> [f64; 3] { [0, 1, 2].map(|i| (0..3).map(|j| corr.m[i][j] * v[j]).sum()) };
    let (s1, s2) = (tau1.sqrt(), tau2.sqrt());
    let r = (s1 * s1 + s2 * s2).sqrt();
    let (cos, sin) = (s1 / r, s2 / r);

    let b1 = [0, 1, 2].map(|i| cos * c1[i] + sin * c2[i]);
    let b2 = [0, 1, 2].map(|i| cos * c1[i] - sin * c2[i]);
    let a1 = normalize3(apply(&c1)).ok_or_else(|| Error::Numeric("M maps c1 to zero".into()))?;
    // When σ2 vanishes the A2 terms carry zero weight; any unit vector will do.
    let a2 = normalize3(apply(&c2)).unwrap_or_else(|| orthogonal_unit(&a1));

    MeasurementSettings::new(a1, a2, b1, b2)
}

fn orthogonal_unit(v: &[f64; 3]) -> [f64; 3] {
    let helper = if v[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let cross = [
        v[1] * helper[2] - v[2] * helper[1],
        v[2] * helper[0] - v[0] * helper[2],
        v[0] * helper[1] - v[1] * helper[0],
    ];
    normalize3(cross).expect("helper is never parallel to v")
}

/// `ρ_AB = tr_C |Ψ⟩⟨Ψ|` for the Schmidt-form state, written out entry by entry.
///
/// Row/column order is `|00⟩, |01⟩, |10⟩, |11⟩`. The `|01⟩` row and column
/// vanish. The `(|11⟩, |10⟩)` entry is the conjugate of the `(|10⟩, |11⟩)`
/// entry, `λ1λ3 e^{-iψ} + λ2λ4`.
pub fn analytic_reduced_ab(params: &SchmidtParams) -> DensityMatrix {
    let [l0, l1, l2, l3, l4] = params.lambda();
    let psi = params.psi();
    let e = Complex64::from_polar(1.0, psi);
    let r = |x: f64| Complex64::new(x, 0.0);
    let zero = r(0.0);

    let rho_00_10 = e.conj() * (l0 * l1);
    let rho_10_11 = e * (l1 * l3) + l2 * l4;
    let entries = vec![
        r(l0 * l0),
        zero,
        rho_00_10,
        r(l0 * l3),
        zero,
        zero,
        zero,
        zero,
        rho_00_10.conj(),
        zero,
        r(l1 * l1 + l2 * l2),
        rho_10_11,
        r(l0 * l3),
        zero,
        rho_10_11.conj(),
        r(l3 * l3 + l4 * l4),
    ];
    let matrix = ComplexMatrix::from_vec(4, 4, entries).expect("16 entries");
    DensityMatrix::new(matrix).expect("reduction of a normalized pure state")
}

/// Closed-form correlation matrix of `ρ_AB` for the Schmidt-form state.
///
/// Local Bloch vectors are included for completeness:
/// `r = (2λ0λ1 cos ψ, 2λ0λ1 sin ψ, λ0² − λ1² − λ2² − λ3² − λ4²)` and
/// `s = (2(λ1λ3 cos ψ + λ2λ4), −2λ1λ3 sin ψ, λ0² + λ1² + λ2² − λ3² − λ4²)`.
pub fn analytic_m_ab(params: &SchmidtParams) -> CorrelationMatrix {
    let [l0, l1, l2, l3, l4] = params.lambda();
    let (sin, cos) = params.psi().sin_cos();
    let m = [
        [2.0 * l0 * l3, 0.0, 2.0 * l0 * l1 * cos],
        [0.0, -2.0 * l0 * l3, 2.0 * l0 * l1 * sin],
        [
            -2.0 * (l1 * l3 * cos + l2 * l4),
            2.0 * l1 * l3 * sin,
            l0 * l0 + l3 * l3 + l4 * l4 - l1 * l1 - l2 * l2,
        ],
    ];
    let bloch_a = [
        2.0 * l0 * l1 * cos,
        2.0 * l0 * l1 * sin,
        l0 * l0 - l1 * l1 - l2 * l2 - l3 * l3 - l4 * l4,
    ];
    let bloch_b = [
        2.0 * (l1 * l3 * cos + l2 * l4),
        -2.0 * l1 * l3 * sin,
        l0 * l0 + l1 * l1 + l2 * l2 - l3 * l3 - l4 * l4,
    ];
    CorrelationMatrix { m, bloch_a, bloch_b }
}

/// Squared maximal CHSH values `(AB, AC, BC)` in closed form, valid when `λ4 = 0`.
///
/// Each pair follows the pattern
/// `2[(1−2x)² + 4(p + 3q) + √(((1−2x)² + 4(p + q))² − 16 q (1−2x)²)]`
/// with squared amplitudes
/// AB: `x = λ2², p = λ1²λ2², q = λ0²λ3²`;
/// AC: `x = λ3², p = λ1²λ3², q = λ0²λ2²`;
/// BC: `x = λ0², p = λ0²λ1², q = λ2²λ3²`.
pub fn closed_form_chsh_sq(params: &SchmidtParams) -> Result<(f64, f64, f64)> {
    let lambda = params.lambda();
    if lambda[4].abs() > 1e-12 {
        return Err(validation(format!("closed form needs lambda4 = 0, got {}", lambda[4])));
    }
    let [s0, s1, s2, s3, _] = lambda.map(|x| x * x);
    let pattern = |x: f64, p: f64, q: f64| {
        let a = (1.0 - 2.0 * x).powi(2);
        let inner = (a + 4.0 * (p + q)).powi(2) - 16.0 * q * a;
        2.0 * (a + 4.0 * (p + 3.0 * q) + inner.max(0.0).sqrt())
    };
    Ok((
        pattern(s2, s1 * s2, s0 * s3),
        pattern(s3, s1 * s3, s0 * s2),
        pattern(s0, s0 * s1, s2 * s3),
    ))
}
