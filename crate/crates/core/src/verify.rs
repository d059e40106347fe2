//! Seeded Monte Carlo checks of the trade-off bounds and supporting identities.
//!
//! Every sample draws from its own stream `(seed, suite tag, index)`, so a
//! failure can be replayed from the reported index alone and parallel runs
//! match sequential ones exactly.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::chsh::{chsh_max, closed_form_chsh_sq, evaluate_bell, optimal_settings};
use crate::error::Result;
use crate::states::{
    random_mixed_with, random_pure_with, sample_rng, schmidt_state, DensityMatrix, PureState, QubitState, SchmidtParams,
};
use crate::tradeoff::{frobenius_identity, implication_checks, tradeoff_report, BOUND_SLACK};

pub const FROBENIUS_TOL: f64 = 1e-9;
pub const CLOSED_FORM_TOL: f64 = 1e-9;
pub const SETTINGS_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Suite {
    FrobeniusIdentity = 1,
    TheoremPure = 2,
    TheoremMixed = 3,
    CorollaryFour = 4,
    CorollaryFive = 5,
    Implications = 6,
    ClosedForm = 7,
    OptimalSettings = 8,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Self::FrobeniusIdentity => "frobenius-identity",
            Self::TheoremPure => "theorem-pure",
            Self::TheoremMixed => "theorem-mixed",
            Self::CorollaryFour => "corollary-n4",
            Self::CorollaryFive => "corollary-n5",
            Self::Implications => "implications",
            Self::ClosedForm => "closed-form",
            Self::OptimalSettings => "optimal-settings",
        }
    }

    fn stream(&self, index: u64) -> u64 {
        ((*self as u64) << 40) | index
    }
}

fn rng_for(seed: u64, suite: Suite, index: u64) -> rand_chacha::ChaCha20Rng {
    sample_rng(seed, suite.stream(index))
}

/// The `k`-th pure three-qubit sample.
pub fn pure_sample(seed: u64, k: u64) -> Result<PureState> {
    random_pure_with(3, &mut rng_for(seed, Suite::TheoremPure, k))
}

/// The `k`-th mixed three-qubit sample, purified with 1 to 3 ancillas.
pub fn mixed_sample(seed: u64, k: u64) -> Result<DensityMatrix> {
    random_mixed_with(3, 1 + (k % 3) as usize, &mut rng_for(seed, Suite::TheoremMixed, k))
}

/// Uniform point of the `λ4 = 0` sphere with ψ uniform on `[0, π]`.
pub fn closed_form_sample(seed: u64, k: u64) -> Result<SchmidtParams> {
    let mut rng = rng_for(seed, Suite::ClosedForm, k);
    let mut lambda = [0.0; 5];
    for l in lambda.iter_mut().take(4) {
        *l = rng.sample(StandardNormal);
    }
    SchmidtParams::normalized(lambda, rng.random_range(0.0..=PI))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub checked: usize,
    /// Largest deviation observed (bound excess, or absolute error).
    pub worst: f64,
    /// Sample indices that failed, ascending.
    pub failures: Vec<u64>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<18} {:>6} samples  worst {:>10.3e}  {}",
            self.suite.name(),
            self.checked,
            self.worst,
            if self.passed() { "PASS" } else { "FAIL" }
        )?;
        if !self.passed() {
            let shown: Vec<String> = self.failures.iter().take(10).map(u64::to_string).collect();
            write!(f, "  failing indices: {}", shown.join(","))?;
            if self.failures.len() > 10 {
                write!(f, ",... ({} total)", self.failures.len())?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub suites: Vec<SuiteOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteOutcome::passed)
    }
}

/// `check` returns (deviation, ok) for one sample.
fn run_suite<F>(suite: Suite, count: usize, check: F) -> Result<SuiteOutcome>
where
    F: Fn(u64) -> Result<(f64, bool)> + Sync,
{
    let results: Vec<(f64, bool)> = (0..count as u64).into_par_iter().map(&check).collect::<Result<_>>()?;
    Ok(SuiteOutcome {
        suite,
        checked: count,
        worst: results.iter().map(|r| r.0).fold(f64::NEG_INFINITY, f64::max),
        failures: results
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.1)
            .map(|(k, _)| k as u64)
            .collect(),
    })
}

fn bound_check<S: QubitState>(state: &S) -> Result<(f64, bool)> {
    let report = tradeoff_report(state)?;
    Ok((
        report.squared_sum - report.bound,
        report.squared_sum <= report.bound + BOUND_SLACK,
    ))
}

/// Runs every suite. `samples` sets the three-qubit suite size; the
/// corollary, closed-form and settings suites use a tenth of it.
pub fn run_verify(samples: usize, seed: u64) -> Result<VerifyReport> {
    let minor = (samples / 10).max(1);
    let mut suites = Vec::new();

    suites.push(run_suite(Suite::FrobeniusIdentity, samples, |k| {
        let dev = (frobenius_identity(&pure_sample(seed, k)?)? - 3.0).abs();
        Ok((dev, dev <= FROBENIUS_TOL))
    })?);
    suites.push(run_suite(Suite::TheoremPure, samples, |k| {
        bound_check(&pure_sample(seed, k)?)
    })?);
    suites.push(run_suite(Suite::TheoremMixed, samples, |k| {
        bound_check(&mixed_sample(seed, k)?)
    })?);
    for (suite, n) in [(Suite::CorollaryFour, 4), (Suite::CorollaryFive, 5)] {
        suites.push(run_suite(suite, minor, |k| {
            let mut rng = rng_for(seed, suite, k);
            if k % 2 == 0 {
                bound_check(&random_pure_with(n, &mut rng)?)
            } else {
                bound_check(&random_mixed_with(n, 1, &mut rng)?)
            }
        })?);
    }
    suites.push(run_suite(Suite::Implications, 2 * samples, |k| {
        let flags = if k % 2 == 0 {
            implication_checks(&pure_sample(seed, k / 2)?)?
        } else {
            implication_checks(&mixed_sample(seed, k / 2)?)?
        };
        Ok((if flags.all() { 0.0 } else { 1.0 }, flags.all()))
    })?);
    suites.push(run_suite(Suite::ClosedForm, minor, |k| {
        let params = closed_form_sample(seed, k)?;
        let (ab, ac, bc) = closed_form_chsh_sq(&params)?;
        let report = tradeoff_report(&schmidt_state(&params))?;
        let dev = [ab, ac, bc]
            .iter()
            .zip(&report.pairs)
            .map(|(cf, p)| (cf - p.squared()).abs())
            .fold(0.0, f64::max);
        Ok((dev, dev <= CLOSED_FORM_TOL))
    })?);
    suites.push(run_suite(Suite::OptimalSettings, minor, |k| {
        let rho = random_mixed_with(2, 2, &mut rng_for(seed, Suite::OptimalSettings, k))?;
        let settings = optimal_settings(&rho)?;
        let dev = (evaluate_bell(&rho, &settings)?.abs() - chsh_max(&rho)?.value).abs();
        Ok((dev, dev <= SETTINGS_TOL))
    })?);

    Ok(VerifyReport { seed, samples, suites })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes() {
        let report = run_verify(200, 5).unwrap();
        assert_eq!(report.suites.len(), 8);
        for s in &report.suites {
            assert!(s.passed(), "{s}");
        }
    }

    #[test]
    fn samples_are_reproducible_by_index() {
        assert_eq!(pure_sample(3, 17).unwrap(), pure_sample(3, 17).unwrap());
        assert_ne!(pure_sample(3, 17).unwrap(), pure_sample(3, 18).unwrap());
        assert_eq!(mixed_sample(3, 4).unwrap(), mixed_sample(3, 4).unwrap());
        assert_eq!(closed_form_sample(1, 2).unwrap().lambda()[4], 0.0);
    }

    #[test]
    fn outcome_display_lists_failures() {
        let o = SuiteOutcome {
            suite: Suite::TheoremPure,
            checked: 3,
            worst: 0.5,
            failures: vec![1, 2],
        };
        let text = o.to_string();
        assert!(text.contains("FAIL") && text.contains("failing indices: 1,2"), "{text}");
    }
}
