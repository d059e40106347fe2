//! Maximal CHSH violations of the two-qubit reductions of multi-qubit states.
//!
//! The crate evaluates `⟨CHSH⟩ = 2√(τ1 + τ2)` for every qubit pair of a
//! register, checks the pairwise trade-off bound `Σ⟨CHSH⟩² ≤ 2n(n−1)`
//! (12 for three qubits), and searches generalized Schmidt-form three-qubit
//! states for states that saturate it.
//!
//! ```
//! use bellscope::states::{named_state, NamedState};
//! use bellscope::tradeoff::tradeoff_report;
//!
//! let w = named_state(&NamedState::W3).unwrap();
//! let report = tradeoff_report(&w).unwrap();
//! assert!(report.satisfied);
//! assert!((report.squared_sum - 32.0 / 3.0).abs() < 1e-9);
//! ```

pub mod chsh;
pub mod error;
pub mod io;
pub mod linalg;
pub mod scan;
pub mod search;
pub mod states;
pub mod tradeoff;
pub mod verify;

pub use error::{Error, Result};
