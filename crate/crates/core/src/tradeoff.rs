//! Pairwise CHSH maxima across a register and the bounds they obey.
//!
//! For three qubits the squared maxima of the three pairs sum to at most 12.
//! Summing that over every qubit triple gives `2n(n−1)` for `n` qubits.

use crate::chsh::{chsh_max, correlation_matrix, ChshResult, CLASSICAL_BOUND, TSIRELSON};
use crate::error::{validation, Result};
use crate::states::{PureState, QubitState, MAX_QUBITS};

/// Floating-point slack applied to every bound comparison.
pub const BOUND_SLACK: f64 = 1e-9;

/// Slack used when deciding whether a pair sits at Tsirelson's bound.
pub const MAXIMAL_SLACK: f64 = 1e-6;

/// Pairwise trade-off bound `2n(n−1)`.
pub fn tradeoff_bound(n: usize) -> f64 {
    2.0 * (n * n.saturating_sub(1)) as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairChsh {
    pub pair: (usize, usize),
    pub result: ChshResult,
}

impl PairChsh {
    pub fn value(&self) -> f64 {
        self.result.value
    }

    pub fn squared(&self) -> f64 {
        self.result.squared()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffReport {
    pub n: usize,
    pub pairs: Vec<PairChsh>,
    pub squared_sum: f64,
    pub bound: f64,
    pub satisfied: bool,
    pub violating_pairs: usize,
}

fn check_register(n: usize) -> Result<()> {
    if !(2..=MAX_QUBITS).contains(&n) {
        return Err(validation(format!("need 2..={MAX_QUBITS} qubits, got {n}")));
    }
    Ok(())
}

fn check_three(n: usize) -> Result<()> {
    if n != 3 {
        return Err(validation(format!("expected a three-qubit state, got {n} qubits")));
    }
    Ok(())
}

/// Maximal CHSH value of every reduction `(i, j)`, `i < j`, in lexicographic order.
pub fn pairwise_chsh<S: QubitState + ?Sized>(state: &S) -> Result<Vec<PairChsh>> {
    let n = state.num_qubits();
    check_register(n)?;
    let mut out = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let result = chsh_max(&state.reduce(&[i, j])?)?;
            out.push(PairChsh { pair: (i, j), result });
        }
    }
    Ok(out)
}

pub fn tradeoff_report<S: QubitState + ?Sized>(state: &S) -> Result<TradeoffReport> {
    let pairs = pairwise_chsh(state)?;
    let n = state.num_qubits();
    let squared_sum = pairs.iter().map(PairChsh::squared).sum();
    let bound = tradeoff_bound(n);
    Ok(TradeoffReport {
        n,
        squared_sum,
        bound,
        satisfied: squared_sum <= bound + BOUND_SLACK,
        violating_pairs: pairs
            .iter()
            .filter(|p| p.value() > CLASSICAL_BOUND + BOUND_SLACK)
            .count(),
        pairs,
    })
}

/// `Σ_pairs ‖M‖²_F` for a pure three-qubit state. Always 3.
pub fn frobenius_identity(psi: &PureState) -> Result<f64> {
    check_three(psi.n())?;
    let mut total = 0.0;
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        total += correlation_matrix(&psi.reduce(&[i, j])?)?.frobenius_sq();
    }
    Ok(total)
}

/// Sum of squared CHSH maxima over the two pairs containing `shared`, each
/// pair maximized over its own settings.
pub fn monogamy_pair_sum<S: QubitState + ?Sized>(state: &S, shared: usize) -> Result<f64> {
    check_three(state.num_qubits())?;
    if shared > 2 {
        return Err(validation(format!("shared qubit {shared} out of range 0..=2")));
    }
    let mut total = 0.0;
    for other in (0..3).filter(|&q| q != shared) {
        let pair = [shared.min(other), shared.max(other)];
        total += chsh_max(&state.reduce(&pair)?)?.squared();
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImplicationFlags {
    /// No more than two of the three pairs exceed the classical bound.
    pub at_most_two_violations: bool,
    /// A pair at Tsirelson's bound leaves the other two pairs classical.
    pub max_pair_forces_others_classical: bool,
}

impl ImplicationFlags {
    pub fn all(&self) -> bool {
        self.at_most_two_violations && self.max_pair_forces_others_classical
    }
}

/// Evaluates the two consequences of the three-qubit bound on a set of pair values.
pub fn implication_flags(values: [f64; 3]) -> ImplicationFlags {
    let violations = values.iter().filter(|&&v| v > CLASSICAL_BOUND + BOUND_SLACK).count();
    let forces = (0..3).all(|k| {
        values[k] < TSIRELSON - MAXIMAL_SLACK
            || (0..3)
                .filter(|&o| o != k)
                .all(|o| values[o] <= CLASSICAL_BOUND + MAXIMAL_SLACK)
    });
    ImplicationFlags {
        at_most_two_violations: violations <= 2,
        max_pair_forces_others_classical: forces,
    }
}

pub fn implication_checks<S: QubitState + ?Sized>(state: &S) -> Result<ImplicationFlags> {
    check_three(state.num_qubits())?;
    let pairs = pairwise_chsh(state)?;
    Ok(implication_flags([
        pairs[0].value(),
        pairs[1].value(),
        pairs[2].value(),
    ]))
}
