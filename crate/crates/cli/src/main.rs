//! `nonlocal`: sweeps, thresholds, Bell-value optimization and the acceptance suite.
//!
//! Exit codes: 0 success, 1 failed verification, 2 configuration error, 3 numerical failure.

mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use nonlocal_core::bell::{load_inequalities, mk_threshold_z};
use nonlocal_core::channels::ChannelKind;
use nonlocal_core::chsh::noise_threshold;
use nonlocal_core::content::{content_curve_with, inequality_bound, linear_grid};
use nonlocal_core::optimize::{optimize_inequality, optimize_mk, OptimizerConfig};
use nonlocal_core::verify::{self, Constructors};
use nonlocal_core::Error;

use config::{RunConfig, RunOverrides};
use output::{Format, Table, Value};

#[derive(Parser, Debug)]
#[command(name = "nonlocal", version, about = "Conditioned-CHSH nonlocality of noisy multipartite states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Conditioned CHSH value, content bounds and closed form along a noise grid.
    Sweep(RunOverrides),
    /// Critical noise strength.
    Threshold {
        #[command(flatten)]
        run: RunOverrides,
        /// `chsh` (conditioned Horodecki test) or `mk` (closed-form MK threshold, GHZ dephasing-z, odd n).
        #[arg(long, default_value = "chsh")]
        method: String,
    },
    /// Optimized Bell value (MK by default, or each inequality of `--inequality`) along a noise grid.
    Optimize {
        #[command(flatten)]
        run: RunOverrides,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Run the acceptance suite.
    Verify {
        /// Comma-separated criterion numbers (default: all).
        #[arg(long, value_delimiter = ',')]
        only: Vec<u8>,
        /// Swap in a broken GHZ constructor; the suite must fail.
        #[arg(long, hide = true)]
        corrupt_ghz: bool,
    },
}

#[derive(Args, Debug, Clone)]
struct OptimizerArgs {
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    max_evals: Option<usize>,
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Numerical(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_) | Error::NonMonotone(_) => Failure::Numerical(e.to_string()),
            _ => Failure::Config(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Numerical(m)) => {
            eprintln!("numerical error: {m}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Sweep(o) => sweep(&RunConfig::resolve(&o)?),
        Command::Threshold { run, method } => threshold(&RunConfig::resolve(&run)?, &method),
        Command::Optimize { run, opt } => optimize(&RunConfig::resolve(&run)?, &opt),
        Command::Verify { only, corrupt_ghz } => {
            let ids = if only.is_empty() { verify::CRITERIA.to_vec() } else { only };
            let hooks = if corrupt_ghz {
                Constructors::corrupted()
            } else {
                Constructors::default()
            };
            let mut report = verify::Report { results: Vec::new() };
            let mut out = std::io::stdout().lock();
            for id in ids {
                let r = verify::run_criterion(id, &hooks);
                let _ = writeln!(out, "{r}");
                let _ = out.flush();
                report.results.push(r);
            }
            let passed = report.results.iter().filter(|r| r.passed).count();
            let _ = writeln!(out, "{passed}/{} criteria passed", report.results.len());
            if report.all_passed() {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
    }
}

fn sweep(cfg: &RunConfig) -> Result<(), Failure> {
    let grid = linear_grid(cfg.p_min, cfg.p_max, cfg.steps)?;
    let cond = match cfg.pair {
        Some(pair) => cfg.family.conditioning_for_pair(pair)?,
        None => cfg.family.conditioning(),
    };
    let points = content_curve_with(&cfg.family, &cfg.channel, &grid, &cond)?;
    let mut table = Table::new(&[
        "p",
        "m_chsh",
        "prob",
        "content_bound_paired",
        "content_bound_weighted",
        "closed_form",
        "abs_diff",
    ]);
    for pt in points {
        table.push(vec![
            Value::Num(pt.p),
            Value::Num(pt.m),
            Value::Num(pt.prob),
            Value::Num(pt.paired),
            Value::Num(pt.weighted),
            pt.closed_form.into(),
            pt.abs_diff.into(),
        ]);
    }
    cfg.write(&table)
}

fn threshold(cfg: &RunConfig, method: &str) -> Result<(), Failure> {
    let (label, p_c) = match method {
        "chsh" => {
            if cfg.pair.is_some() {
                return Err(Failure::Config("threshold uses the family's own conditioning; drop --pair".into()));
            }
            let th = noise_threshold(&cfg.family, &cfg.channel)?;
            ("conditioned-chsh", th.p_c)
        }
        "mk" => {
            if cfg.family.label() != "ghz" || cfg.channel.kind() != ChannelKind::DephasingZ {
                return Err(Failure::Config(
                    "the MK closed form covers the GHZ family under dephasing-z only".into(),
                ));
            }
            ("mk-closed-form", mk_threshold_z(cfg.family.n_qubits())?)
        }
        other => return Err(Failure::Config(format!("unknown threshold method '{other}'"))),
    };
    let mut table = Table::new(&["family", "n", "channel", "method", "p_c"]);
    table.push(vec![
        Value::Text(cfg.family.label().into()),
        Value::Int(cfg.family.n_qubits() as i64),
        Value::Text(cfg.channel.kind().label().into()),
        Value::Text(label.into()),
        Value::Num(p_c),
    ]);
    cfg.write(&table)
}

fn optimize(cfg: &RunConfig, args: &OptimizerArgs) -> Result<(), Failure> {
    let defaults = OptimizerConfig::default();
    let opt = OptimizerConfig {
        restarts: args.restarts.unwrap_or(defaults.restarts),
        max_evals: args.max_evals.unwrap_or(defaults.max_evals),
        seed: cfg.seed,
        ..defaults
    };
    opt.validate()?;
    let inequalities = match &cfg.inequality {
        Some(path) => {
            let v = load_inequalities(path).map_err(|e| match e {
                Error::Io(e) => Failure::Config(format!("cannot read {}: {e}", path.display())),
                other => Failure::Config(format!("{}: {other}", path.display())),
            })?;
            if v.is_empty() {
                return Err(Failure::Config(format!("{} contains no inequalities", path.display())));
            }
            if let Some(bad) = v.iter().find(|i| i.n_parties() != cfg.family.n_qubits()) {
                return Err(Failure::Config(format!(
                    "inequality has {} parties but the state has {} qubits",
                    bad.n_parties(),
                    cfg.family.n_qubits()
                )));
            }
            Some(v)
        }
        None => None,
    };
    let grid = linear_grid(cfg.p_min, cfg.p_max, cfg.steps)?;
    let rows: Vec<Vec<Vec<Value>>> = grid
        .par_iter()
        .map(|&p| -> Result<Vec<Vec<Value>>, Failure> {
            let rho = cfg.family.noisy_state(&cfg.channel.with_strength(p)?)?;
            match &inequalities {
                None => {
                    let (_, v) = optimize_mk(&rho, &opt)?;
                    Ok(vec![vec![Value::Num(p), Value::Text("mk".into()), Value::Num(v), Value::Num(1.0), Value::Missing]])
                }
                Some(ineqs) => ineqs
                    .iter()
                    .enumerate()
                    .map(|(k, ineq)| {
                        let (_, v) = optimize_inequality(&rho, ineq, &opt)?;
                        let bound = match ineq.ns_bound() {
                            Some(_) => Value::Num(inequality_bound(ineq, v)?),
                            None => Value::Missing,
                        };
                        Ok(vec![
                            Value::Num(p),
                            Value::Text(format!("{}", k + 1)),
                            Value::Num(v),
                            Value::Num(ineq.local_bound()),
                            bound,
                        ])
                    })
                    .collect(),
            }
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&["p", "inequality", "value", "local_bound", "content_bound"]);
    for row in rows.into_iter().flatten() {
        table.push(row);
    }
    cfg.write(&table)
}

impl RunConfig {
    fn write(&self, table: &Table) -> Result<(), Failure> {
        let text = match self.format {
            Format::Csv => table.to_csv(),
            Format::Json => table.to_json(),
        };
        match &self.output {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| Failure::Config(format!("cannot write {}: {e}", path.display()))),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| Failure::Config(format!("cannot write output: {e}")))
            }
        }
    }
}
