//! Pure and mixed multi-qubit states.
//!
//! Qubit 0 is the leftmost tensor factor: in a three-qubit state the basis
//! label `|ijk⟩` assigns `i` to A (qubit 0), `j` to B and `k` to C.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{validation, Result};
use crate::linalg::{self, ComplexMatrix};

/// Largest register handled by the toolkit.
pub const MAX_QUBITS: usize = 12;

/// Tolerance on state normalization and density-matrix trace.
pub const NORM_TOL: f64 = 1e-10;

/// Most negative eigenvalue tolerated in a density matrix.
pub const PSD_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(validation(format!("dimension {dim} is not 2^n with n >= 1")));
    }
    let n = dim.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(validation(format!("{n} qubits exceeds the limit of {MAX_QUBITS}")));
    }
    Ok(n)
}

/// Anything that can be reduced to a density matrix on a subset of its qubits.
pub trait QubitState {
    fn num_qubits(&self) -> usize;

    /// Reduced state on `keep`, ordered as listed.
    fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix>;
}

/// Normalized state vector on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = qubits_for_dim(amplitudes.len())?;
        if amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(validation("amplitudes must be finite"));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(validation(format!("state has squared norm {norm_sq}, expected 1")));
        }
        Ok(Self { n, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(validation("cannot normalize a zero or non-finite vector"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(amplitudes)
    }

    /// Computational basis state from a bit string such as `"010"`.
    pub fn basis(bits: &str) -> Result<Self> {
        if bits.is_empty() || bits.len() > MAX_QUBITS {
            return Err(validation(format!("bad basis label {bits:?}")));
        }
        let index = usize::from_str_radix(bits, 2)
            .map_err(|_| validation(format!("basis label {bits:?} is not a bit string")))?;
        if bits.starts_with('+') {
            return Err(validation(format!("basis label {bits:?} is not a bit string")));
        }
        let mut amplitudes = vec![ZERO; 1 << bits.len()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self::new(amplitudes)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            n: self.n,
            matrix: ComplexMatrix::outer(&self.amplitudes),
        }
    }
}

impl QubitState for PureState {
    fn num_qubits(&self) -> usize {
        self.n
    }

    /// Reduces straight from the amplitudes without forming `|ψ⟩⟨ψ|`.
    fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let traced = linalg::complement(self.n, keep)?;
        let kept = linalg::subsystem_offsets(self.n, keep);
        let env = linalg::subsystem_offsets(self.n, &traced);
        let psi = &self.amplitudes;
        let matrix = ComplexMatrix::from_fn(kept.len(), kept.len(), |r, c| {
            env.iter().map(|&e| psi[kept[r] + e] * psi[kept[c] + e].conj()).sum()
        });
        Ok(DensityMatrix {
            n: keep.len(),
            matrix: matrix.hermitian_part(),
        })
    }
}

/// Hermitian, positive semidefinite, unit-trace operator on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and wraps a matrix. The stored copy is symmetrized.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(validation("density matrix must be square"));
        }
        let n = qubits_for_dim(matrix.rows())?;
        if matrix.as_slice().iter().any(|z| !z.is_finite()) {
            return Err(validation("density matrix entries must be finite"));
        }
        let herm_err = matrix.hermiticity_error();
        if herm_err > NORM_TOL {
            return Err(validation(format!(
                "density matrix is not Hermitian (max deviation {herm_err:e})"
            )));
        }
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > NORM_TOL {
            return Err(validation(format!("density matrix has trace {trace}, expected 1")));
        }
        let matrix = matrix.hermitian_part();
        if !linalg::is_positive_semidefinite(&matrix, PSD_TOL) {
            return Err(validation("density matrix has an eigenvalue below -1e-9"));
        }
        Ok(Self { n, matrix })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        let dim = 1usize << n.min(MAX_QUBITS + 1);
        Self::new(ComplexMatrix::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        Ok(Self {
            n: keep.len(),
            matrix: linalg::partial_trace(&self.matrix, self.n, keep)?,
        })
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.matrix.trace_product(&self.matrix).re
    }

    /// `U ρ U†` for a unitary of matching dimension.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.rows() != self.matrix.rows() || !u.is_square() {
            return Err(validation("unitary dimension does not match the state"));
        }
        let m = &(u * &self.matrix) * &u.adjoint();
        Ok(Self {
            n: self.n,
            matrix: m.hermitian_part(),
        })
    }
}

impl QubitState for DensityMatrix {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        self.partial_trace(keep)
    }
}

/// Parameters of the generalized Schmidt form
/// `λ0|000⟩ + λ1 e^{iψ}|100⟩ + λ2|101⟩ + λ3|110⟩ + λ4|111⟩`.
///
/// Signed `λ` are accepted; a sign is a local phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchmidtParams {
    lambda: [f64; 5],
    psi: f64,
}

impl SchmidtParams {
    pub fn new(lambda: [f64; 5], psi: f64) -> Result<Self> {
        if lambda.iter().any(|x| !x.is_finite()) || !psi.is_finite() {
            return Err(validation("Schmidt parameters must be finite"));
        }
        let norm_sq: f64 = lambda.iter().map(|x| x * x).sum();
        if (norm_sq - 1.0).abs() > NORM_TOL {
            return Err(validation(format!("sum of squared lambdas is {norm_sq}, expected 1")));
        }
        if !(0.0..=PI).contains(&psi) {
            return Err(validation(format!("psi = {psi} lies outside [0, pi]")));
        }
        Ok(Self { lambda, psi })
    }

    /// Rescales `lambda` onto the unit sphere first; for rounded literature values.
    pub fn normalized(lambda: [f64; 5], psi: f64) -> Result<Self> {
        let norm = lambda.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(validation("lambda vector is zero or non-finite"));
        }
        Self::new(lambda.map(|x| x / norm), psi)
    }

    /// Maps an unconstrained point of R⁶ onto the parameter space: the first
    /// five coordinates are normalized, the sixth is folded into `[0, π]` by
    /// reflection (`ψ` and `2π − ψ` are complex conjugates of each other).
    pub fn from_unconstrained(x: &[f64]) -> Result<Self> {
        if x.len() != 6 {
            return Err(validation(format!("expected 6 coordinates, got {}", x.len())));
        }
        let mut psi = x[5].rem_euclid(2.0 * PI);
        if psi > PI {
            psi = 2.0 * PI - psi;
        }
        Self::normalized([x[0], x[1], x[2], x[3], x[4]], psi.clamp(0.0, PI))
    }

    pub fn lambda(&self) -> [f64; 5] {
        self.lambda
    }

    pub fn psi(&self) -> f64 {
        self.psi
    }
}

/// Basis indices of the five Schmidt amplitudes: 000, 100, 101, 110, 111.
pub const SCHMIDT_INDICES: [usize; 5] = [0b000, 0b100, 0b101, 0b110, 0b111];

pub fn schmidt_state(params: &SchmidtParams) -> PureState {
    let [l0, l1, l2, l3, l4] = params.lambda;
    let mut amplitudes = vec![ZERO; 8];
    amplitudes[SCHMIDT_INDICES[0]] = Complex64::new(l0, 0.0);
    amplitudes[SCHMIDT_INDICES[1]] = Complex64::from_polar(l1, params.psi);
    amplitudes[SCHMIDT_INDICES[2]] = Complex64::new(l2, 0.0);
    amplitudes[SCHMIDT_INDICES[3]] = Complex64::new(l3, 0.0);
    amplitudes[SCHMIDT_INDICES[4]] = Complex64::new(l4, 0.0);
    PureState { n: 3, amplitudes }
}

/// Textbook states addressable by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NamedState {
    /// `(|01⟩ − |10⟩)/√2`. Some authors write this as `|ψ₊⟩`.
    Singlet,
    /// `(|00⟩ + |11⟩)/√2`.
    BellPhiPlus,
    Ghz(usize),
    W3,
    Basis(String),
}

impl FromStr for NamedState {
    type Err = crate::Error;

    /// Accepts `singlet`, `bell_phi_plus`, `w3`, `ghz(n)` / `ghzN` and
    /// `basis(bits)` / `|bits>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let inner = |prefix: &str| {
            s.strip_prefix(prefix)
                .and_then(|r| r.strip_prefix('('))
                .and_then(|r| r.strip_suffix(')'))
        };
        match s {
            "singlet" => return Ok(Self::Singlet),
            "bell_phi_plus" => return Ok(Self::BellPhiPlus),
            "w3" => return Ok(Self::W3),
            _ => {}
        }
        if let Some(n) = inner("ghz").or_else(|| s.strip_prefix("ghz")) {
            let n = n.parse().map_err(|_| validation(format!("bad GHZ size in {s:?}")))?;
            return Ok(Self::Ghz(n));
        }
        if let Some(bits) = inner("basis").or_else(|| s.strip_prefix('|').and_then(|r| r.strip_suffix('>'))) {
            return Ok(Self::Basis(bits.to_string()));
        }
        Err(validation(format!("unknown state name {s:?}")))
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Singlet => f.write_str("singlet"),
            Self::BellPhiPlus => f.write_str("bell_phi_plus"),
            Self::Ghz(n) => write!(f, "ghz({n})"),
            Self::W3 => f.write_str("w3"),
            Self::Basis(bits) => write!(f, "basis({bits})"),
        }
    }
}

pub fn named_state(name: &NamedState) -> Result<PureState> {
    let r = |x: f64| Complex64::new(x, 0.0);
    match name {
        NamedState::Singlet => PureState::new(vec![r(0.0), r(FRAC_1_SQRT_2), r(-FRAC_1_SQRT_2), r(0.0)]),
        NamedState::BellPhiPlus => PureState::new(vec![r(FRAC_1_SQRT_2), r(0.0), r(0.0), r(FRAC_1_SQRT_2)]),
        NamedState::Ghz(n) => {
            if !(2..=MAX_QUBITS).contains(n) {
                return Err(validation(format!("GHZ needs 2..={MAX_QUBITS} qubits, got {n}")));
            }
            let mut amplitudes = vec![ZERO; 1 << n];
            amplitudes[0] = r(FRAC_1_SQRT_2);
            amplitudes[(1 << n) - 1] = r(FRAC_1_SQRT_2);
            PureState::new(amplitudes)
        }
        NamedState::W3 => {
            let w = r(1.0 / 3f64.sqrt());
            PureState::new(vec![ZERO, w, w, ZERO, w, ZERO, ZERO, ZERO])
        }
        NamedState::Basis(bits) => PureState::basis(bits),
    }
}

/// Generator for sample `index` of a batch seeded by `seed`.
///
/// ChaCha is counter based, so each index gets its own stream and batches can
/// be drawn in any order or in parallel with identical results.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Haar-random pure state: independent standard complex normals, normalized.
pub fn random_pure_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PureState> {
    if !(1..=MAX_QUBITS).contains(&n) {
        return Err(validation(format!(
            "random states need 1..={MAX_QUBITS} qubits, got {n}"
        )));
    }
    let amplitudes = (0..1usize << n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    PureState::normalized(amplitudes)
}

pub fn random_pure(n: usize, seed: u64) -> Result<PureState> {
    random_pure_with(n, &mut sample_rng(seed, 0))
}

/// Random mixed state: reduction of a Haar-random pure state on
/// `n + ancilla_qubits` qubits to its first `n` qubits.
pub fn random_mixed_with<R: Rng + ?Sized>(n: usize, ancilla_qubits: usize, rng: &mut R) -> Result<DensityMatrix> {
    if ancilla_qubits == 0 {
        return Err(validation("random mixed states need at least one ancilla qubit"));
    }
    let total = n + ancilla_qubits;
    if n == 0 || total > MAX_QUBITS {
        return Err(validation(format!(
            "need n >= 1 and n + ancillas <= {MAX_QUBITS}, got {n} + {ancilla_qubits}"
        )));
    }
    let keep: Vec<usize> = (0..n).collect();
    random_pure_with(total, rng)?.reduce(&keep)
}

pub fn random_mixed(n: usize, ancilla_qubits: usize, seed: u64) -> Result<DensityMatrix> {
    random_mixed_with(n, ancilla_qubits, &mut sample_rng(seed, 0))
}

/// Weighted collection of pure states on a common register.
#[derive(Debug, Clone)]
pub struct Ensemble {
    members: Vec<(f64, PureState)>,
}

impl Ensemble {
    pub fn new(members: Vec<(f64, PureState)>) -> Result<Self> {
        let Some((_, first)) = members.first() else {
            return Err(validation("ensemble is empty"));
        };
        let n = first.n();
        for (p, state) in &members {
            if !(*p > 0.0 && *p <= 1.0) {
                return Err(validation(format!("ensemble weight {p} outside (0, 1]")));
            }
            if state.n() != n {
                return Err(validation("ensemble members act on different qubit counts"));
            }
        }
        let total: f64 = members.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(validation(format!("ensemble weights sum to {total}, expected 1")));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }
}

/// `Σ pᵢ |φᵢ⟩⟨φᵢ|`.
pub fn mix(ensemble: &Ensemble) -> DensityMatrix {
    let first = &ensemble.members[0].1;
    let dim = first.amplitudes.len();
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for (p, state) in &ensemble.members {
        acc = &acc + &ComplexMatrix::outer(&state.amplitudes).scale(Complex64::new(*p, 0.0));
    }
    DensityMatrix {
        n: first.n,
        matrix: acc.hermitian_part(),
    }
}
