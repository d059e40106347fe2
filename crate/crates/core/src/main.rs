use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bellscope::chsh::chsh_max;
use bellscope::io::{format_sig12, StateFile};
use bellscope::scan::{scan_rows, write_csv, Figure, ScanSpec};
use bellscope::search::{maximize_monogamy, maximize_saturation, Objective, SearchConfig};
use bellscope::states::{named_state, NamedState, QubitState};
use bellscope::tradeoff::tradeoff_report;
use bellscope::verify::run_verify;
use bellscope::Error;

const SEED_ENV: &str = "BELLSCOPE_SEED";

#[derive(Parser)]
#[command(
    name = "bellscope",
    version,
    about = "Pairwise CHSH maxima and their trade-off bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximal CHSH value of one qubit pair.
    Chsh {
        #[arg(long)]
        state: PathBuf,
        /// Qubit pair as `i,j`.
        #[arg(long, value_parser = parse_pair)]
        pair: (usize, usize),
    },
    /// Pairwise table and the 2n(n-1) trade-off bound.
    Tradeoff {
        #[arg(long)]
        state: PathBuf,
    },
    /// Grid scan of pairwise CHSH maxima written as CSV.
    Scan {
        #[arg(value_enum)]
        figure: FigureArg,
        /// Samples per axis (default 201 for fig1, 721 for fig2).
        #[arg(long)]
        res: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Multi-start search over Schmidt-form three-qubit states.
    Optimize {
        #[arg(value_enum)]
        objective: ObjectiveArg,
        /// Shared qubit for the monogamy objective.
        #[arg(long, default_value_t = 2)]
        shared: usize,
        #[arg(long, default_value_t = 64)]
        starts: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Monte Carlo check of the bounds and identities.
    Verify {
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Write a named state (singlet, bell_phi_plus, w3, ghz(n), basis(bits)) to a file.
    State {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FigureArg {
    Fig1,
    Fig2,
}

#[derive(Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    Saturation,
    Monogamy,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (i, j) = s.split_once(',').ok_or("expected a pair like 0,1")?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|e| format!("bad qubit index {t:?}: {e}"))
    };
    Ok((parse(i)?, parse(j)?))
}

enum Failure {
    Error(Error),
    /// A bound or verification suite did not hold.
    Check,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self::Error(e)
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Error> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| Error::Validation(format!("{SEED_ENV}={text:?} is not a 64-bit integer"))),
        Err(_) => Ok(0),
    }
}

fn load(path: &Path) -> Result<bellscope::io::LoadedState, Error> {
    StateFile::read(path)?.load()
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Chsh { state, pair: (i, j) } => {
            let state = load(&state)?;
            if i == j {
                return Err(Error::Validation(format!("pair ({i},{j}) repeats a qubit")).into());
            }
            let result = chsh_max(&state.reduce(&[i, j])?)?;
            println!("pair ({i},{j})");
            println!("value {}", format_sig12(result.value));
            println!("tau1 {}", format_sig12(result.tau1));
            println!("tau2 {}", format_sig12(result.tau2));
            println!("tau_min {}", format_sig12(result.tau_min));
        }
        Command::Tradeoff { state } => {
            let report = tradeoff_report(&load(&state)?)?;
            println!("{:<8} {:>16} {:>16}", "pair", "chsh", "chsh^2");
            for p in &report.pairs {
                let label = format!("({},{})", p.pair.0, p.pair.1);
                println!(
                    "{label:<8} {:>16} {:>16}",
                    format_sig12(p.value()),
                    format_sig12(p.squared())
                );
            }
            println!("squared_sum {}", format_sig12(report.squared_sum));
            println!("bound {}", format_sig12(report.bound));
            println!("violating_pairs {}", report.violating_pairs);
            println!("verdict {}", if report.satisfied { "satisfied" } else { "VIOLATED" });
            if !report.satisfied {
                return Err(Failure::Check);
            }
        }
        Command::Scan { figure, res, out } => {
            let figure = match figure {
                FigureArg::Fig1 => Figure::Fig1,
                FigureArg::Fig2 => Figure::Fig2,
            };
            let spec = ScanSpec::new(figure, res)?;
            let rows = scan_rows(&spec)?;
            let io_err = |source| Error::Io {
                path: out.clone(),
                source,
            };
            let file = File::create(&out).map_err(io_err)?;
            write_csv(figure, &rows, BufWriter::new(file)).map_err(|e| io_err(e.into()))?;
            eprintln!("wrote {} rows to {}", rows.len(), out.display());
        }
        Command::Optimize {
            objective,
            shared,
            starts,
            seed,
        } => {
            let seed = resolve_seed(seed)?;
            let result = match objective {
                ObjectiveArg::Saturation => {
                    maximize_saturation(&SearchConfig::new(Objective::Saturation, starts, seed))?
                }
                ObjectiveArg::Monogamy => {
                    maximize_monogamy(&SearchConfig::new(Objective::Monogamy { shared }, starts, seed))?
                }
            };
            let lambda: Vec<String> = result.best_params.lambda().iter().map(|&x| format_sig12(x)).collect();
            println!("seed {seed}");
            println!("starts {starts}");
            println!("best_value {}", format_sig12(result.best_value));
            println!("lambda {}", lambda.join(" "));
            println!("psi {}", format_sig12(result.best_params.psi()));
        }
        Command::Verify { samples, seed } => {
            let seed = resolve_seed(seed)?;
            let report = run_verify(samples, seed)?;
            println!("verify: samples {samples}, seed {seed}");
            for suite in &report.suites {
                println!("{suite}");
            }
            if !report.passed() {
                return Err(Failure::Check);
            }
        }
        Command::State { name, out } => {
            let state = named_state(&name.parse::<NamedState>()?)?;
            let file = StateFile::from_pure(&state);
            match out {
                Some(path) => file.write(&path)?,
                None => println!("{}", file.to_json()),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(3),
        Err(Failure::Error(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Numeric(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
