//! Command-line front end: rate inversion, limit-curve sweeps, finite-n
//! convergence studies, one-shot optima and the validation suites.

use clap::{Args, Parser, Subcommand};
use randconv::experiments::{
    attainment_rows, curve_rows, finite_n_rows, oneshot_report, rate_record, render_attainment,
    render_curve, render_finite_n, render_oneshot, render_rate, CopyRounding, ExperimentConfig,
    OutputFormat,
};
use randconv::validate::{run_validate, FaultInjection};
use randconv::{dist, second_order_rate, Error, FiniteDist};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "randconv",
    about = "Conversion fidelities between finite i.i.d. random sources",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct PairArgs {
    /// Source distribution: inline comma list or a file path
    #[arg(long, short)]
    source: String,
    /// Target distribution: inline comma list or a file path
    #[arg(long, short)]
    target: String,
    /// Output format
    #[arg(long, default_value = "csv", value_parser = ["csv", "json"])]
    format: String,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Second-order rate at a confidence level: {a, r2, regime, threshold, residual}
    Rate {
        #[command(flatten)]
        pair: PairArgs,
        /// Confidence coefficient in (0,1)
        #[arg(long)]
        nu: Option<f64>,
    },
    /// Limit fidelity curve over a grid of second-order rates
    Curve {
        #[command(flatten)]
        pair: PairArgs,
        /// Grid as lo:hi:step or a comma list
        #[arg(long = "b-grid", allow_hyphen_values = true)]
        b_grid: String,
        /// Emit attainment-curve samples on this x grid (uses the first b)
        #[arg(long, allow_hyphen_values = true)]
        attainment: Option<String>,
    },
    /// Finite-n optima F^M(P^n -> Q^L) against the limit value
    FiniteN {
        #[command(flatten)]
        pair: PairArgs,
        /// Grid of block lengths, lo:hi:step or comma list
        #[arg(long = "n-grid")]
        n_grid: String,
        /// Confidence level; its rate inversion sets b when --b is absent
        #[arg(long)]
        nu: Option<f64>,
        /// Fixed second-order rate
        #[arg(long, allow_hyphen_values = true)]
        b: Option<f64>,
        /// Copy-count rounding
        #[arg(long, default_value = "nearest", value_parser = ["nearest", "floor"])]
        round: String,
    },
    /// One-shot report: F^D, F^M, their gap, the optimal map and optimizer
    Oneshot {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Run the cross-module validation suites
    Validate {
        /// Test hook: bias the optimizer so the oracle suite must fail
        #[arg(long, hide = true)]
        fault_inject: bool,
    },
}

fn parse_dist_arg(s: &str) -> randconv::Result<FiniteDist> {
    let inline: Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    if let Ok(vals) = inline {
        return FiniteDist::new(vals);
    }
    let path = PathBuf::from(s);
    if path.exists() {
        return dist::parse_dist(&std::fs::read_to_string(path)?);
    }
    Err(Error::Parse(format!(
        "{s:?} is neither a comma list of probabilities nor a readable file"
    )))
}

fn parse_grid(s: &str) -> randconv::Result<Vec<f64>> {
    if let Some((lo, rest)) = s.split_once(':') {
        let (hi, step) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("grid {s:?} must be lo:hi:step")))?;
        let lo: f64 = lo.trim().parse().map_err(|_| Error::Parse(format!("bad grid start in {s:?}")))?;
        let hi: f64 = hi.trim().parse().map_err(|_| Error::Parse(format!("bad grid end in {s:?}")))?;
        let step: f64 = step.trim().parse().map_err(|_| Error::Parse(format!("bad grid step in {s:?}")))?;
        if !(step > 0.0) || hi < lo {
            return Err(Error::Parse(format!("grid {s:?} must satisfy lo <= hi, step > 0")));
        }
        let count = ((hi - lo) / step).round() as usize;
        let mut grid: Vec<f64> = (0..=count).map(|i| lo + i as f64 * step).collect();
        if let Some(last) = grid.last_mut() {
            if *last > hi + 1e-12 {
                grid.pop();
            }
        }
        return Ok(grid);
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("bad grid entry {t:?}")))
        })
        .collect()
}

fn parse_n_grid(s: &str) -> randconv::Result<Vec<u64>> {
    parse_grid(s)?
        .into_iter()
        .map(|x| {
            if x >= 1.0 && x.fract() == 0.0 {
                Ok(x as u64)
            } else {
                Err(Error::Parse(format!("n grid entries must be positive integers, got {x}")))
            }
        })
        .collect()
}

fn emit(text: &str, out: &Option<PathBuf>) -> randconv::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn build_config(pair: &PairArgs, nu: Option<f64>) -> randconv::Result<ExperimentConfig> {
    Ok(ExperimentConfig {
        source: parse_dist_arg(&pair.source)?,
        target: parse_dist_arg(&pair.target)?,
        nu,
        b_grid: vec![],
        n_grid: vec![],
        format: if pair.format == "json" {
            OutputFormat::Json
        } else {
            OutputFormat::Csv
        },
    })
}

fn run(cli: Cli) -> randconv::Result<()> {
    match cli.cmd {
        Cmd::Rate { pair, nu } => {
            let cfg = build_config(&pair, nu)?;
            let record = rate_record(&cfg)?;
            emit(&render_rate(&record, cfg.format), &pair.out)
        }
        Cmd::Curve {
            pair,
            b_grid,
            attainment,
        } => {
            let mut cfg = build_config(&pair, None)?;
            cfg.b_grid = parse_grid(&b_grid)?;
            if let Some(xgrid) = attainment {
                let xs = parse_grid(&xgrid)?;
                let b = *cfg.b_grid.first().ok_or_else(|| {
                    Error::InvalidArgument("attainment needs a nonempty b grid".into())
                })?;
                let rows = attainment_rows(&cfg, &xs, b)?;
                emit(&render_attainment(&rows, cfg.format), &pair.out)
            } else {
                let rows = curve_rows(&cfg)?;
                emit(&render_curve(&rows, cfg.format), &pair.out)
            }
        }
        Cmd::FiniteN {
            pair,
            n_grid,
            nu,
            b,
            round,
        } => {
            let mut cfg = build_config(&pair, nu)?;
            cfg.n_grid = parse_n_grid(&n_grid)?;
            let b = match (b, nu) {
                (Some(b), _) => b,
                (None, Some(nu)) => second_order_rate(&cfg.source, &cfg.target, nu)?.r2,
                (None, None) => {
                    return Err(Error::InvalidArgument(
                        "finite-n needs --b or --nu".into(),
                    ))
                }
            };
            let rounding = if round == "floor" {
                CopyRounding::Floor
            } else {
                CopyRounding::Nearest
            };
            let rows = finite_n_rows(&cfg, b, rounding)?;
            emit(&render_finite_n(&rows, cfg.format), &pair.out)
        }
        Cmd::Oneshot { pair } => {
            let cfg = build_config(&pair, None)?;
            let report = oneshot_report(&cfg)?;
            emit(&render_oneshot(&report, cfg.format), &pair.out)
        }
        Cmd::Validate { fault_inject } => {
            let report = run_validate(if fault_inject {
                FaultInjection::PerturbOptimizer
            } else {
                FaultInjection::None
            });
            print!("{}", report.render());
            if !report.passed() {
                // name the failing invariant through stderr as well
                for s in report.suites.iter().filter(|s| s.failures > 0) {
                    eprintln!("invariant failed: {}", s.name);
                }
                std::process::exit(1);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::BothUniform | Error::WrongRegime { .. } => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}
