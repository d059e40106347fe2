//! Acceptance suite: one PASS/FAIL line per criterion, each followed by the
//! individual checks that decide it. Exits nonzero if any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use bellscope::chsh::{chsh_max, closed_form_chsh_sq, evaluate_bell, optimal_settings, MeasurementSettings, TSIRELSON};
use bellscope::scan::{scan_rows, Figure, ScanSpec};
use bellscope::search::{maximize_monogamy, maximize_saturation, Objective, SearchConfig};
use bellscope::states::{
    named_state, random_mixed_with, random_pure_with, sample_rng, schmidt_state, NamedState, SchmidtParams,
};
use bellscope::tradeoff::{frobenius_identity, implication_checks, implication_flags, pairwise_chsh, tradeoff_report};
use bellscope::verify::{closed_form_sample, mixed_sample, pure_sample};

const SAMPLES: u64 = 10_000;
const SEED: u64 = 1;

type Criterion = (&'static str, fn() -> Vec<Check>);

struct Check {
    ok: bool,
    detail: String,
}

fn check(ok: bool, detail: impl Into<String>) -> Check {
    Check {
        ok,
        detail: detail.into(),
    }
}

fn within(label: &str, got: f64, want: f64, tol: f64) -> Check {
    check(
        (got - want).abs() <= tol,
        format!("{label} = {got:.12} (want {want} ± {tol:e})"),
    )
}

fn at_most(label: &str, got: f64, limit: f64) -> Check {
    check(got <= limit, format!("{label} = {got:.6e} (want ≤ {limit:e})"))
}

fn singlet_violation() -> Vec<Check> {
    let rho = named_state(&NamedState::Singlet).unwrap().density();
    let h = FRAC_1_SQRT_2;
    let settings = MeasurementSettings::new([1.0, 0.0, 0.0], [0.0, 0.0, 1.0], [h, 0.0, h], [h, 0.0, -h]).unwrap();
    vec![
        within("chsh_max(singlet)", chsh_max(&rho).unwrap().value, TSIRELSON, 1e-10),
        within(
            "|<B>| with textbook settings",
            evaluate_bell(&rho, &settings).unwrap().abs(),
            TSIRELSON,
            1e-10,
        ),
    ]
}

fn theorem_bound() -> Vec<Check> {
    let start = Instant::now();
    let excess = |sum: f64, bound: f64| sum - bound;
    let mut pure_worst = f64::NEG_INFINITY;
    let mut mixed_worst = f64::NEG_INFINITY;
    let mut exceptions = 0usize;
    for k in 0..SAMPLES {
        let p = tradeoff_report(&pure_sample(SEED, k).unwrap()).unwrap();
        let m = tradeoff_report(&mixed_sample(SEED, k).unwrap()).unwrap();
        pure_worst = pure_worst.max(excess(p.squared_sum, 12.0));
        mixed_worst = mixed_worst.max(excess(m.squared_sum, 12.0));
        exceptions += usize::from(p.squared_sum > 12.0 + 1e-9) + usize::from(m.squared_sum > 12.0 + 1e-9);
    }
    let mut checks = vec![
        check(
            exceptions == 0,
            format!("{exceptions} exceptions over {} three-qubit states", 2 * SAMPLES),
        ),
        at_most("worst pure excess over 12", pure_worst, 1e-9),
        at_most("worst mixed excess over 12", mixed_worst, 1e-9),
    ];
    for n in [4usize, 5] {
        let bound = (2 * n * (n - 1)) as f64;
        let mut worst = f64::NEG_INFINITY;
        for k in 0..1000u64 {
            let mut rng = sample_rng(SEED ^ ((n as u64) << 32), k);
            let report = if k % 2 == 0 {
                tradeoff_report(&random_pure_with(n, &mut rng).unwrap()).unwrap()
            } else {
                tradeoff_report(&random_mixed_with(n, 1, &mut rng).unwrap()).unwrap()
            };
            worst = worst.max(report.squared_sum - bound);
        }
        checks.push(at_most(&format!("worst excess over {bound} at n = {n}"), worst, 1e-9));
    }
    let elapsed = start.elapsed();
    checks.push(check(
        elapsed < Duration::from_secs(60),
        format!("runtime {elapsed:.2?} (want < 60s)"),
    ));
    checks
}

fn frobenius_proof_identity() -> Vec<Check> {
    let worst = (0..SAMPLES)
        .map(|k| (frobenius_identity(&pure_sample(SEED, k).unwrap()).unwrap() - 3.0).abs())
        .fold(0.0, f64::max);
    vec![at_most("max |Σ‖M‖² − 3| over 10⁴ pure states", worst, 1e-9)]
}

fn saturation() -> Vec<Check> {
    let result = maximize_saturation(&SearchConfig::new(Objective::Saturation, 64, 0)).unwrap();
    let point = SchmidtParams::normalized([-0.423, 0.906, 0.0, 0.0, 0.0], 0.0).unwrap();
    vec![
        within("maximize_saturation (64 starts)", result.best_value, 12.0, 1e-6),
        within(
            "squared_sum at (λ0, λ1) = (−0.423, 0.906)",
            tradeoff_report(&schmidt_state(&point)).unwrap().squared_sum,
            12.0,
            1e-2,
        ),
    ]
}

fn monogamy_violation() -> Vec<Check> {
    let point = SchmidtParams::normalized([-0.71, 0.69, 0.12, -0.01, 0.0], 0.0).unwrap();
    let pairs = pairwise_chsh(&schmidt_state(&point)).unwrap();
    let sq = |pair: (usize, usize)| pairs.iter().find(|p| p.pair == pair).unwrap().squared();
    let (ac, bc) = (sq((0, 2)), sq((1, 2)));
    let best = maximize_monogamy(&SearchConfig::new(Objective::Monogamy { shared: 2 }, 64, 7)).unwrap();
    vec![
        within("CHSH²_AC", ac, 4.15, 0.02),
        within("CHSH²_BC", bc, 3.88, 0.02),
        within("CHSH²_AC + CHSH²_BC", ac + bc, 8.03, 0.03),
        check(
            ac + bc > 8.0,
            format!("CHSH²_AC + CHSH²_BC = {:.12} (want > 8)", ac + bc),
        ),
        check(
            best.best_value >= 8.01,
            format!("maximize_monogamy = {:.12} (want ≥ 8.01)", best.best_value),
        ),
    ]
}

fn closed_form_agreement() -> Vec<Check> {
    let worst = (0..1000)
        .map(|k| {
            let params = closed_form_sample(SEED, k).unwrap();
            let (ab, ac, bc) = closed_form_chsh_sq(&params).unwrap();
            let pairs = pairwise_chsh(&schmidt_state(&params)).unwrap();
            [ab, ac, bc]
                .iter()
                .zip(&pairs)
                .map(|(c, p)| (c - p.squared()).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    let fixed = |l: [f64; 5], want: [f64; 3]| {
        let (ab, ac, bc) = closed_form_chsh_sq(&SchmidtParams::new(l, 0.0).unwrap()).unwrap();
        let dev = [ab, ac, bc]
            .iter()
            .zip(want)
            .map(|(g, w)| (g - w).abs())
            .fold(0.0, f64::max);
        check(
            dev <= 1e-9,
            format!("{l:?} → ({ab:.12}, {ac:.12}, {bc:.12}) (want {want:?})"),
        )
    };
    vec![
        at_most("max closed-form deviation over 10³ draws", worst, 1e-9),
        fixed([1.0, 0.0, 0.0, 0.0, 0.0], [4.0, 4.0, 4.0]),
        fixed([FRAC_1_SQRT_2, 0.0, 0.5, 0.5, 0.0], [4.0, 4.0, 2.0]),
    ]
}

fn optimal_settings_consistency() -> Vec<Check> {
    let worst = (0..1000)
        .map(|k| {
            let rho = random_mixed_with(2, 1 + (k % 3) as usize, &mut sample_rng(SEED, (7 << 40) | k)).unwrap();
            let settings = optimal_settings(&rho).unwrap();
            (evaluate_bell(&rho, &settings).unwrap().abs() - chsh_max(&rho).unwrap().value).abs()
        })
        .fold(0.0, f64::max);
    vec![at_most("max ||<B>_opt| − chsh_max| over 10³ mixed states", worst, 1e-8)]
}

fn implications() -> Vec<Check> {
    let mut failures = 0usize;
    let mut total = 0usize;
    for k in 0..SAMPLES {
        total += 2;
        failures += usize::from(!implication_checks(&pure_sample(SEED, k).unwrap()).unwrap().all());
        failures += usize::from(!implication_checks(&mixed_sample(SEED, k).unwrap()).unwrap().all());
    }
    let rows = scan_rows(&ScanSpec::new(Figure::Fig2, None).unwrap()).unwrap();
    let grid_failures = rows.iter().filter(|r| !implication_flags(r.values).all()).count();
    let saturated = rows
        .iter()
        .filter(|r| r.values.iter().any(|v| *v >= TSIRELSON - 1e-6))
        .count();
    vec![
        check(
            failures == 0,
            format!("{failures} of {total} sampled states break an implication"),
        ),
        check(
            grid_failures == 0,
            format!("{grid_failures} of {} grid points break an implication", rows.len()),
        ),
        check(saturated > 0, format!("{saturated} grid points reach 2√2 − 1e-6")),
    ]
}

fn known_states() -> Vec<Check> {
    let sum = |name: NamedState| tradeoff_report(&named_state(&name).unwrap()).unwrap();
    let w = sum(NamedState::W3);
    let pair_dev = w
        .pairs
        .iter()
        .map(|p| (p.value() - 4.0 * SQRT_2 / 3.0).abs())
        .fold(0.0, f64::max);
    vec![
        within("GHZ3 squared_sum", sum(NamedState::Ghz(3)).squared_sum, 12.0, 1e-9),
        within("W3 squared_sum", w.squared_sum, 32.0 / 3.0, 1e-9),
        at_most("max |W3 pair value − 4√2/3|", pair_dev, 1e-9),
        within("GHZ4 squared_sum", sum(NamedState::Ghz(4)).squared_sum, 24.0, 1e-9),
    ]
}

fn verify_binary() -> Vec<Check> {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_bellscope"))
        .args(["verify", "--samples", "10000", "--seed", "1"])
        .env_remove("BELLSCOPE_SEED")
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    vec![
        check(
            out.status.code() == Some(0),
            format!("exit status {:?}", out.status.code()),
        ),
        check(
            elapsed < Duration::from_secs(60),
            format!("runtime {elapsed:.2?} (want < 60s)"),
        ),
    ]
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("singlet maximal violation", singlet_violation),
        ("trade-off bound on random states", theorem_bound),
        ("Frobenius identity", frobenius_proof_identity),
        ("saturation reproduction", saturation),
        ("monogamy-violation reproduction", monogamy_violation),
        ("closed-form agreement", closed_form_agreement),
        ("optimal-settings consistency", optimal_settings_consistency),
        ("implication properties", implications),
        ("known-state table", known_states),
        ("verify completes", verify_binary),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();

    let mut failed = 0;
    for (index, (name, run)) in criteria.iter().enumerate() {
        let label = format!("criterion {}: {name}", index + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let checks = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|_| vec![check(false, "panicked before completing its checks")]);
        let ok = checks.iter().all(|c| c.ok);
        failed += usize::from(!ok);
        println!(
            "[{}] {label} ({:.2?})",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed()
        );
        for c in &checks {
            println!("       {} {}", if c.ok { "ok  " } else { "FAIL" }, c.detail);
        }
    }
    println!("{} failed", failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
