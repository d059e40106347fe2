//! Small dense complex linear algebra.
//!
//! Everything here is sized for few-qubit work: density matrices up to a
//! handful of qubits, 3×3 correlation matrices and eigenproblems of dimension
//! at most 16. Matrices are stored row-major.
//!
//! Qubit ordering follows the computational-basis labeling `|q0 q1 ... q(n-1)⟩`:
//! qubit 0 is the leftmost tensor factor and owns the most significant bit of
//! a basis index.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{validation, Error, Result};

/// Real 3×3 matrix, indexed `[row][col]`.
pub type Mat3 = [[f64; 3]; 3];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance used to accept a matrix as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Largest dimension accepted by [`hermitian_eigs`].
pub const MAX_EIG_DIM: usize = 16;

/// Relative off-diagonal norm at which the Jacobi iteration stops.
pub const JACOBI_THRESHOLD: f64 = 1e-13;

/// Sweep budget for the Jacobi iteration.
pub const JACOBI_MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(validation(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real(m: &Mat3) -> Self {
        Self::from_fn(3, 3, |i, j| Complex64::new(m[i][j], 0.0))
    }

    /// Rank-one projector `|v⟩⟨v|`.
    pub fn outer(v: &[Complex64]) -> Self {
        Self::from_fn(v.len(), v.len(), |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex64 {
        debug_assert_eq!(self.cols, other.rows);
        debug_assert_eq!(self.rows, other.cols);
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation `|a_ij - conj(a_ji)|`; infinite for non-square input.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// `(A + A†) / 2`, with an exactly real diagonal.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        let mut out = Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5);
        for i in 0..self.rows {
            out[(i, i)].im = 0.0;
        }
        out
    }

    pub fn kron(&self, other: &Self) -> Self {
        kron(self, other)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

/// Pauli matrix `σ^index`, with `σ^0` the 2×2 identity.
///
/// # Panics
/// If `index > 3`.
pub fn pauli(index: usize) -> ComplexMatrix {
    let i = Complex64::i();
    let data = match index {
        0 => [ONE, ZERO, ZERO, ONE],
        1 => [ZERO, ONE, ONE, ZERO],
        2 => [ZERO, -i, i, ZERO],
        3 => [ONE, ZERO, ZERO, -ONE],
        _ => panic!("Pauli index {index} out of range 0..=3"),
    };
    ComplexMatrix {
        rows: 2,
        cols: 2,
        data: data.to_vec(),
    }
}

/// `v · σ = v_x σ¹ + v_y σ² + v_z σ³`.
pub fn pauli_dot(v: &[f64; 3]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(2, 2);
    for (k, &c) in v.iter().enumerate() {
        out = &out + &pauli(k + 1).scale(Complex64::new(c, 0.0));
    }
    out
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    ComplexMatrix::from_fn(rows, cols, |i, j| {
        a[(i / b.rows, j / b.cols)] * b[(i % b.rows, j % b.cols)]
    })
}

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// Eigenvector paired with `values[k]`.
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        (0..self.vectors.rows()).map(|i| self.vectors[(i, k)]).collect()
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.values.len();
        let lambda = ComplexMatrix::from_fn(d, d, |i, j| {
            if i == j {
                Complex64::new(self.values[i], 0.0)
            } else {
                ZERO
            }
        });
        &(&self.vectors * &lambda) * &self.vectors.adjoint()
    }
}

/// Diagonalizes a Hermitian matrix with cyclic complex Jacobi rotations.
///
/// Each rotation first removes the phase of the pivot entry, then applies a
/// real Givens rotation that zeroes it. Sweeps stop once the off-diagonal
/// Frobenius norm falls below [`JACOBI_THRESHOLD`] relative to the full norm.
pub fn hermitian_eigs(h: &ComplexMatrix) -> Result<EigenDecomposition> {
    let d = h.rows();
    if !h.is_square() || d == 0 || d > MAX_EIG_DIM {
        return Err(validation(format!(
            "eigensolver needs a square matrix of dimension 1..={MAX_EIG_DIM}, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let herm_err = h.hermiticity_error();
    if herm_err > HERMITIAN_TOL {
        return Err(validation(format!(
            "matrix is not Hermitian (max deviation {herm_err:e})"
        )));
    }

    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(d);
    let scale = a.frobenius_norm();
    let mut converged = scale == 0.0 || d == 1;
    let mut sweeps = 0;

    while !converged {
        if off_diagonal_norm(&a) <= JACOBI_THRESHOLD * scale {
            converged = true;
            break;
        }
        if sweeps == JACOBI_MAX_SWEEPS {
            break;
        }
        sweeps += 1;
        for p in 0..d - 1 {
            for q in p + 1..d {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        return Err(Error::Numeric(format!(
            "Jacobi iteration did not converge within {JACOBI_MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(d, d, |i, j| v[(i, order[j])]);
    Ok(EigenDecomposition { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let mut acc = 0.0;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One Jacobi step annihilating `a[(p, q)]`, accumulating into `v`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let magnitude = apq.norm();
    if magnitude == 0.0 {
        return;
    }
    let phase = apq / magnitude;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let theta = (aqq - app) / (2.0 * magnitude);
    let t = if theta.is_infinite() {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // Unitary acting on columns p, q:
    //   [ c            s           ]
    //   [ -s·e^{-iφ}   c·e^{-iφ}   ]
    let u_pp = Complex64::new(c, 0.0);
    let u_pq = Complex64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    let d = a.rows();
    for k in 0..d {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..d {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;

    for k in 0..d {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Whether every eigenvalue of the Hermitian matrix `h` is at least `-tol`.
///
/// Decided by a Cholesky factorization of `h + tol·I`, so it works at any
/// dimension without running the eigensolver.
pub fn is_positive_semidefinite(h: &ComplexMatrix, tol: f64) -> bool {
    let d = h.rows();
    let mut l = ComplexMatrix::zeros(d, d);
    for j in 0..d {
        let mut diag = h[(j, j)].re + tol;
        for k in 0..j {
            diag -= l[(j, k)].norm_sqr();
        }
        if diag.is_nan() || diag <= 0.0 {
            return false;
        }
        let ljj = diag.sqrt();
        l[(j, j)] = Complex64::new(ljj, 0.0);
        for i in j + 1..d {
            let mut acc = h[(i, j)];
            for k in 0..j {
                acc -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = acc / ljj;
        }
    }
    true
}

/// Basis-index offsets contributed by every bit pattern of `qubits`.
///
/// Entry `r` is the full `n`-qubit index whose bits on `qubits` spell `r`
/// (with `qubits[0]` as the most significant bit of `r`) and whose other
/// bits are zero.
pub(crate) fn subsystem_offsets(n: usize, qubits: &[usize]) -> Vec<usize> {
    let m = qubits.len();
    (0..1usize << m)
        .map(|r| {
            qubits
                .iter()
                .enumerate()
                .filter(|&(b, _)| (r >> (m - 1 - b)) & 1 == 1)
                .map(|(_, &q)| 1usize << (n - 1 - q))
                .sum()
        })
        .collect()
}

/// Validates `keep` against `n` qubits and returns the traced-out complement.
pub(crate) fn complement(n: usize, keep: &[usize]) -> Result<Vec<usize>> {
    let mut seen = vec![false; n];
    for &q in keep {
        if q >= n {
            return Err(validation(format!("qubit index {q} out of range for {n} qubits")));
        }
        if seen[q] {
            return Err(validation(format!("qubit index {q} listed twice")));
        }
        seen[q] = true;
    }
    Ok((0..n).filter(|&q| !seen[q]).collect())
}

/// Traces out every qubit of an `n`-qubit operator except `keep`.
///
/// The result acts on `keep.len()` qubits ordered as listed in `keep`, and is
/// symmetrized to suppress Hermiticity drift.
pub fn partial_trace(rho: &ComplexMatrix, n: usize, keep: &[usize]) -> Result<ComplexMatrix> {
    let dim = 1usize
        .checked_shl(n as u32)
        .ok_or_else(|| validation(format!("{n} qubits is too many")))?;
    if rho.rows() != dim || rho.cols() != dim {
        return Err(validation(format!(
            "operator is {}x{}, expected {dim}x{dim} for {n} qubits",
            rho.rows(),
            rho.cols()
        )));
    }
    let traced = complement(n, keep)?;
    let kept = subsystem_offsets(n, keep);
    let env = subsystem_offsets(n, &traced);
    let out = ComplexMatrix::from_fn(kept.len(), kept.len(), |r, c| {
        env.iter().map(|&e| rho[(kept[r] + e, kept[c] + e)]).sum()
    });
    Ok(out.hermitian_part())
}

/// Singular values of a real 3×3 matrix, descending.
///
/// Computed as square roots of the eigenvalues of `MᵀM`.
pub fn singular_values_3x3(m: &Mat3) -> [f64; 3] {
    let eig =
        hermitian_eigs(&ComplexMatrix::from_real(&gram(m))).expect("Gram matrix of a real 3x3 matrix is symmetric");
    [0, 1, 2].map(|k| eig.values[k].max(0.0).sqrt())
}

/// `MᵀM`.
pub fn gram(m: &Mat3) -> Mat3 {
    let mut g = [[0.0; 3]; 3];
    for (i, row) in g.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            *entry = (0..3).map(|k| m[k][i] * m[k][j]).sum();
        }
    }
    g
}

pub fn transpose(m: &Mat3) -> Mat3 {
    let mut t = [[0.0; 3]; 3];
    for (i, row) in m.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            t[j][i] = x;
        }
    }
    t
}

pub fn frobenius_sq(m: &Mat3) -> f64 {
    m.iter().flatten().map(|x| x * x).sum()
}
