//! Derivative-free search over Schmidt parameters.
//!
//! The search space is unconstrained R⁶, mapped onto [`SchmidtParams`] by
//! [`SchmidtParams::from_unconstrained`], so every evaluated point is a valid
//! normalized state.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{validation, Error, Result};
use crate::states::{sample_rng, schmidt_state, SchmidtParams};
use crate::tradeoff::{monogamy_pair_sum, tradeoff_report};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Edge length of the initial axis-aligned simplex.
    pub initial_step: f64,
    pub max_iterations: usize,
    /// Stop once `f_max − f_min` over the simplex is below this...
    pub f_tolerance: f64,
    /// ...and every vertex lies within this distance of the best one.
    pub x_tolerance: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.5,
            max_iterations: 5_000,
            f_tolerance: 1e-14,
            x_tolerance: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const REFLECTION: f64 = 1.0;
const EXPANSION: f64 = 2.0;
const CONTRACTION: f64 = 0.5;
const SHRINK: f64 = 0.5;

struct Vertex {
    x: Vec<f64>,
    f: f64,
}

fn evaluate<F>(objective: &mut F, x: Vec<f64>) -> Result<Vertex>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let f = objective(&x)?;
    if !f.is_finite() {
        return Err(Error::Numeric(format!("objective is {f} at {x:?}")));
    }
    Ok(Vertex { x, f })
}

fn affine(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
}

/// Minimizes `objective` with the Nelder–Mead simplex method.
///
/// Uses reflection 1, expansion 2, contraction 0.5 and shrink 0.5.
pub fn nelder_mead<F>(mut objective: F, start: &[f64], options: &NelderMeadOptions) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> Result<f64>,
{
    let d = start.len();
    if d == 0 {
        return Err(validation("Nelder-Mead needs at least one dimension"));
    }
    if options.initial_step.is_nan()
        || options.initial_step <= 0.0
        || options.f_tolerance.is_nan()
        || options.f_tolerance <= 0.0
        || options.x_tolerance < 0.0
    {
        return Err(validation("Nelder-Mead step and tolerances must be positive"));
    }

    let mut simplex = Vec::with_capacity(d + 1);
    simplex.push(evaluate(&mut objective, start.to_vec())?);
    for i in 0..d {
        let mut x = start.to_vec();
        x[i] += options.initial_step;
        simplex.push(evaluate(&mut objective, x)?);
    }

    let mut iterations = 0;
    let mut converged = false;
    loop {
        simplex.sort_by(|a, b| a.f.total_cmp(&b.f));
        let best = &simplex[0];
        let worst = &simplex[d];
        let x_spread = simplex[1..]
            .iter()
            .map(|v| v.x.iter().zip(&best.x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if worst.f - best.f <= options.f_tolerance && x_spread <= options.x_tolerance {
            converged = true;
            break;
        }
        if iterations == options.max_iterations {
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; d];
        for v in &simplex[..d] {
            for (c, x) in centroid.iter_mut().zip(&v.x) {
                *c += x / d as f64;
            }
        }

        let reflected = evaluate(&mut objective, affine(&centroid, &simplex[d].x, -REFLECTION))?;
        if reflected.f < simplex[0].f {
            let expanded = evaluate(&mut objective, affine(&centroid, &reflected.x, EXPANSION))?;
            simplex[d] = if expanded.f < reflected.f { expanded } else { reflected };
            continue;
        }
        if reflected.f < simplex[d - 1].f {
            simplex[d] = reflected;
            continue;
        }
        let contracted = if reflected.f < simplex[d].f {
            let c = evaluate(&mut objective, affine(&centroid, &reflected.x, CONTRACTION))?;
            (c.f <= reflected.f).then_some(c)
        } else {
            let c = evaluate(&mut objective, affine(&centroid, &simplex[d].x, CONTRACTION))?;
            (c.f < simplex[d].f).then_some(c)
        };
        match contracted {
            Some(c) => simplex[d] = c,
            None => {
                let anchor = simplex[0].x.clone();
                for v in simplex.iter_mut().skip(1) {
                    *v = evaluate(&mut objective, affine(&anchor, &v.x, SHRINK))?;
                }
            }
        }
    }

    let best = simplex.swap_remove(0);
    Ok(Minimum {
        point: best.x,
        value: best.f,
        iterations,
        converged,
    })
}

/// Quantity maximized over Schmidt-form states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    /// `Σ_pairs ⟨CHSH⟩²` over AB, AC, BC.
    Saturation,
    /// `⟨CHSH⟩²` summed over the two pairs containing `shared`.
    Monogamy { shared: usize },
}

impl Objective {
    pub fn evaluate(&self, params: &SchmidtParams) -> Result<f64> {
        let psi = schmidt_state(params);
        match *self {
            Self::Saturation => Ok(tradeoff_report(&psi)?.squared_sum),
            Self::Monogamy { shared } => monogamy_pair_sum(&psi, shared),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    pub objective: Objective,
    pub starts: usize,
    pub seed: u64,
    pub max_iterations: usize,
    /// Convergence tolerance on the spread of objective values in the simplex.
    pub tolerance: f64,
}

impl SearchConfig {
    pub fn new(objective: Objective, starts: usize, seed: u64) -> Self {
        Self {
            objective,
            starts,
            seed,
            max_iterations: 4_000,
            tolerance: 1e-13,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(validation("search needs at least one start"));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(validation("search tolerance must be positive"));
        }
        if let Objective::Monogamy { shared } = self.objective {
            if shared > 2 {
                return Err(validation(format!("shared qubit {shared} out of range 0..=2")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult {
    pub best_params: SchmidtParams,
    pub best_value: f64,
    /// Best objective value reached by each start, in start order.
    pub trace: Vec<f64>,
}

/// Random start: a uniformly distributed point of the λ sphere, ψ uniform on `[0, π]`.
fn random_start(seed: u64, index: u64) -> Vec<f64> {
    let mut rng = sample_rng(seed, index);
    let mut x: Vec<f64> = (0..5).map(|_| rng.sample(StandardNormal)).collect();
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
    x.push(rng.random_range(0.0..=PI));
    x
}

/// Multi-start maximization of `objective` over Schmidt parameters.
///
/// Each start runs Nelder–Mead from its own seeded point and is then
/// restarted once from its result with a smaller simplex. Starts run in
/// parallel; ties in the final comparison go to the lowest start index.
pub fn maximize<F>(objective: F, config: &SearchConfig) -> Result<SearchResult>
where
    F: Fn(&SchmidtParams) -> Result<f64> + Sync,
{
    config.validate()?;
    let negated = |x: &[f64]| -> Result<f64> { Ok(-objective(&SchmidtParams::from_unconstrained(x)?)?) };
    let options = NelderMeadOptions {
        initial_step: 0.5,
        max_iterations: config.max_iterations,
        f_tolerance: config.tolerance,
        x_tolerance: 1e-8,
    };
    let polish = NelderMeadOptions {
        initial_step: 0.05,
        ..options
    };

    let runs: Vec<Minimum> = (0..config.starts as u64)
        .into_par_iter()
        .map(|k| {
            let first = nelder_mead(negated, &random_start(config.seed, k), &options)?;
            nelder_mead(negated, &first.point, &polish)
        })
        .collect::<Result<_>>()?;

    let mut best = 0;
    for (k, run) in runs.iter().enumerate() {
        if run.value < runs[best].value {
            best = k;
        }
    }
    let best_params = SchmidtParams::from_unconstrained(&runs[best].point)?;
    Ok(SearchResult {
        best_value: objective(&best_params)?,
        best_params,
        trace: runs.iter().map(|r| -r.value).collect(),
    })
}

/// Runs [`maximize`] on the objective named in `config`.
pub fn run_search(config: &SearchConfig) -> Result<SearchResult> {
    let objective = config.objective;
    maximize(|p| objective.evaluate(p), config)
}

pub fn maximize_saturation(config: &SearchConfig) -> Result<SearchResult> {
    if config.objective != Objective::Saturation {
        return Err(validation("saturation search needs the saturation objective"));
    }
    run_search(config)
}

pub fn maximize_monogamy(config: &SearchConfig) -> Result<SearchResult> {
    if !matches!(config.objective, Objective::Monogamy { .. }) {
        return Err(validation("monogamy search needs the monogamy objective"));
    }
    run_search(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Mutex;

    #[test]
    fn one_dimensional_quadratic() {
        let m = nelder_mead(|x| Ok((x[0] - 3.0).powi(2)), &[0.0], &NelderMeadOptions::default()).unwrap();
        assert!((m.point[0] - 3.0).abs() < 1e-6, "{:?}", m.point);
        assert!(m.converged);
    }

    #[test]
    fn anisotropic_quadratic() {
        let m = nelder_mead(
            |x| Ok(x[0] * x[0] + 10.0 * x[1] * x[1]),
            &[1.0, 1.0],
            &NelderMeadOptions::default(),
        )
        .unwrap();
        assert!(m.point.iter().all(|v| v.abs() < 1e-6), "{:?}", m.point);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| Ok((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2));
        let m = nelder_mead(f, &[-1.2, 1.0], &NelderMeadOptions::default()).unwrap();
        assert!(
            (m.point[0] - 1.0).abs() < 1e-5 && (m.point[1] - 1.0).abs() < 1e-5,
            "{:?}",
            m.point
        );
    }

    #[test]
    fn never_worse_than_start() {
        let f = |x: &[f64]| Ok(x[0].sin() + x[1].cos());
        let start = [0.3, -0.2];
        let m = nelder_mead(
            f,
            &start,
            &NelderMeadOptions {
                max_iterations: 3,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(m.value <= f(&start).unwrap());
        assert!(!m.converged);
        assert_eq!(m.iterations, 3);
    }

    #[test]
    fn non_finite_objective_reports_point() {
        let err = nelder_mead(
            |x| Ok(if x[0] > 0.2 { f64::NAN } else { x[0] }),
            &[0.0],
            &NelderMeadOptions::default(),
        )
        .unwrap_err();
        match err {
            Error::Numeric(msg) => assert!(msg.contains("0.5"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(nelder_mead(|_| Ok(0.0), &[], &NelderMeadOptions::default()).is_err());
    }

    #[test]
    fn negated_saturation_from_near_product_start() {
        let f = |x: &[f64]| Ok(-Objective::Saturation.evaluate(&SchmidtParams::from_unconstrained(x)?)?);
        let start = [1.0, 0.05, 0.05, 0.05, 0.05, 0.3];
        let m = nelder_mead(
            f,
            &start,
            &NelderMeadOptions {
                initial_step: 0.05,
                ..Default::default()
            },
        )
        .unwrap();
        assert!((m.value + 12.0).abs() < 1e-6, "{}", m.value);
    }

    #[test]
    fn fixed_point_evaluations() {
        let paper = SchmidtParams::normalized([-0.423, 0.906, 0.0, 0.0, 0.0], 0.0).unwrap();
        assert!((Objective::Saturation.evaluate(&paper).unwrap() - 12.0).abs() < 1e-2);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let ghz = SchmidtParams::new([h, 0.0, 0.0, 0.0, h], 0.0).unwrap();
        assert!((Objective::Saturation.evaluate(&ghz).unwrap() - 12.0).abs() < 1e-9);
        let product = SchmidtParams::normalized([0.6, 0.8, 0.0, 0.0, 0.0], 1.0).unwrap();
        for shared in 0..3 {
            let v = Objective::Monogamy { shared }.evaluate(&product).unwrap();
            assert!((v - 8.0).abs() < 1e-9);
        }
    }

    #[test]
    fn saturation_search_reaches_bound_without_exceeding_it() {
        let worst = Mutex::new(f64::NEG_INFINITY);
        let config = SearchConfig::new(Objective::Saturation, 8, 3);
        let result = maximize(
            |p| {
                let v = Objective::Saturation.evaluate(p)?;
                let mut w = worst.lock().unwrap();
                *w = w.max(v);
                Ok(v)
            },
            &config,
        )
        .unwrap();
        assert!(*worst.lock().unwrap() <= 12.0 + 1e-9);
        assert!(result.best_value >= 12.0 - 1e-6, "{}", result.best_value);
        assert_eq!(result.trace.len(), 8);
        let again = Objective::Saturation.evaluate(&result.best_params).unwrap();
        assert!((again - result.best_value).abs() < 1e-9);
    }

    #[test]
    fn search_is_deterministic() {
        let config = SearchConfig::new(Objective::Monogamy { shared: 2 }, 4, 11);
        assert_eq!(maximize_monogamy(&config).unwrap(), maximize_monogamy(&config).unwrap());
    }

    #[test]
    fn config_validation() {
        let mut config = SearchConfig::new(Objective::Saturation, 0, 1);
        assert!(maximize_saturation(&config).is_err());
        config.starts = 1;
        config.tolerance = 0.0;
        assert!(maximize_saturation(&config).is_err());
        let config = SearchConfig::new(Objective::Monogamy { shared: 5 }, 1, 1);
        assert!(maximize_monogamy(&config).is_err());
        let config = SearchConfig::new(Objective::Saturation, 1, 1);
        assert!(maximize_monogamy(&config).is_err());
    }
}
