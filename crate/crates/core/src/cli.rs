//! Command-line front end: `run`, `sweep`, `oracle` and `trace`.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::config::{RunConfig, Settings};
use crate::engine::trial_rng;
use crate::error::SimError;
use crate::metrics::{self, SweepRecord};
use crate::oracle::{self, BellDiagonal};
use crate::strategies::{self, StrategyId};

pub const CSV_HEADER: &str =
    "strategy,hops,lambda_gate,p_meas,n_trials,fidelity,fid_ci_low,fid_ci_high,throughput_pairs_per_s,seed";

#[derive(Debug, Parser)]
#[command(name = "repsim", version, about = "Monte Carlo simulator for linear quantum repeater chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate strategies at a single parameter point and print CSV.
    Run(CommonArgs),
    /// Evaluate strategies over the hops × gate error × measurement error grid.
    Sweep(CommonArgs),
    /// Print closed-form purification and swapping tables.
    Oracle(OracleArgs),
    /// Print the event trace of one request.
    Trace(TraceArgs),
}

#[derive(Debug, Args, Clone, Default)]
pub struct CommonArgs {
    /// TOML file with any subset of the parameter keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Strategy name or `all`.
    #[arg(long)]
    pub strategy: Option<String>,
    #[arg(long)]
    pub hops: Option<usize>,
    #[arg(long)]
    pub lambda_gate: Option<f64>,
    #[arg(long)]
    pub p_meas: Option<f64>,
    #[arg(long)]
    pub p_depo: Option<f64>,
    #[arg(long)]
    pub tau_memory: Option<f64>,
    #[arg(long)]
    pub total_distance: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub hops_grid: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub lambda_gate_grid: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub p_meas_grid: Option<Vec<f64>>,
    /// Monte Carlo trials per fidelity estimate.
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Simulated seconds per throughput estimate.
    #[arg(long)]
    pub t_sim: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the event trace of the first trial to stderr.
    #[arg(long)]
    pub trace: bool,
    /// Turn every error source off.
    #[arg(long)]
    pub no_noise: bool,
}

impl CommonArgs {
    fn settings(&self) -> Settings {
        Settings {
            p_depo: self.p_depo,
            lambda_gate: self.lambda_gate,
            p_meas: self.p_meas,
            tau_memory: self.tau_memory,
            total_distance: self.total_distance,
            hops: self.hops,
            n_trials: self.trials,
            seed: self.seed,
            t_sim: self.t_sim,
            hops_grid: self.hops_grid.clone(),
            lambda_gate_grid: self.lambda_gate_grid.clone(),
            p_meas_grid: self.p_meas_grid.clone(),
            strategy: self.strategy.clone(),
            out: self.out.clone(),
            trace: self.trace.then_some(true),
            no_noise: self.no_noise,
            ..Settings::default()
        }
    }

    pub fn resolve(&self) -> Result<RunConfig, SimError> {
        let file = self.config.as_deref().map(Settings::from_file).transpose()?;
        RunConfig::resolve(self.settings(), file)
    }
}

#[derive(Debug, Args, Clone)]
pub struct OracleArgs {
    /// Werner fidelities of the input pairs.
    #[arg(long, value_delimiter = ',', default_values_t = [0.7, 0.86, 0.9508])]
    pub fidelity: Vec<f64>,
}

#[derive(Debug, Args, Clone)]
pub struct TraceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Index of the trial to trace.
    #[arg(long, default_value_t = 0)]
    pub trial: u64,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(SimError),
    #[error("{0}")]
    Runtime(SimError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) | CliError::Io(_) => 1,
        }
    }
}

/// `%.6g`: six significant digits, trailing zeros dropped.
pub fn fmt_g(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.5e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-4..6).contains(&exp) {
        let mant = trim_zeros(mant);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mant}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn csv_row(r: &SweepRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        r.strategy,
        r.hops,
        fmt_g(r.lambda_gate),
        fmt_g(r.p_meas),
        r.n_trials,
        fmt_g(r.fidelity.point),
        fmt_g(r.fidelity.ci_low),
        fmt_g(r.fidelity.ci_high),
        fmt_g(r.throughput),
        r.seed
    )
}

pub fn write_csv<W: Write>(mut w: W, records: &[SweepRecord]) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", csv_row(r))?;
    }
    w.flush()
}

fn output(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_trace(cfg: &RunConfig, strategy: StrategyId, index: u64, w: &mut dyn Write) -> Result<(), CliError> {
    let (trial, lines) =
        strategies::run_traced(strategy, &cfg.params, trial_rng(cfg.params.seed, index)).map_err(CliError::Runtime)?;
    writeln!(w, "# {strategy} hops={} trial={index}", cfg.params.hops)?;
    for l in &lines {
        writeln!(w, "{l}")?;
    }
    let d = &trial.delivery;
    let per_link: Vec<String> = d.pairs_consumed_per_link.iter().map(u32::to_string).collect();
    writeln!(
        w,
        "# delivered_at={} latency={} residual={:?} link_pairs={} e2e_pairs={} budget_exact={}",
        fmt_g(d.delivered_at),
        fmt_g(d.latency()),
        d.residual_class,
        per_link.join(","),
        d.e2e_pairs_consumed,
        trial.usage_matches_budget()
    )?;
    Ok(())
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.resolve().map_err(CliError::Usage)?;
            if cfg.trace {
                let mut err = io::stderr().lock();
                for &s in &cfg.strategies {
                    write_trace(&cfg, s, 0, &mut err)?;
                }
            }
            let records = cfg
                .strategies
                .iter()
                .map(|&s| metrics::evaluate(s, &cfg.params))
                .collect::<Result<Vec<_>, _>>()
                .map_err(CliError::Runtime)?;
            write_csv(output(&cfg.out)?, &records)?;
        }
        Command::Sweep(args) => {
            let cfg = args.resolve().map_err(CliError::Usage)?;
            let records = metrics::run_sweep(&cfg.grid, &cfg.strategies, &cfg.params, cfg.params.seed)
                .map_err(CliError::Runtime)?;
            write_csv(output(&cfg.out)?, &records)?;
        }
        Command::Oracle(args) => {
            let mut w = BufWriter::new(io::stdout().lock());
            writeln!(w, "f_in,ss_dp_success,ss_dp_fidelity,swap_fidelity")?;
            for &f in &args.fidelity {
                if !(0.0..=1.0).contains(&f) {
                    return Err(CliError::Usage(SimError::Config {
                        key: "fidelity".into(),
                        reason: format!("must lie in [0, 1], got {f}"),
                    }));
                }
                let w_in = BellDiagonal::werner(f);
                let t = oracle::ss_dp(&w_in, &w_in, &w_in);
                let s = w_in.swap(&w_in);
                writeln!(
                    w,
                    "{},{},{},{}",
                    fmt_g(f),
                    fmt_g(t.success),
                    fmt_g(t.output.fidelity()),
                    fmt_g(s.fidelity())
                )?;
            }
            w.flush()?;
        }
        Command::Trace(args) => {
            let cfg = args.common.resolve().map_err(CliError::Usage)?;
            let mut w = output(&cfg.out)?;
            for &s in &cfg.strategies {
                write_trace(&cfg, s, args.trial, &mut w)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g_format_matches_printf() {
        let cases = [
            (1.0, "1"),
            (0.5, "0.5"),
            (0.0005, "0.0005"),
            (0.00005, "5e-05"),
            (0.123456789, "0.123457"),
            (61.0, "61"),
            (1234567.0, "1.23457e+06"),
            (999999.5, "1e+06"),
            (0.0, "0"),
            (-0.25, "-0.25"),
            (0.9999996, "1"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g(x), want, "{x}");
        }
    }

    #[test]
    fn cli_parses_subcommands() {
        let cli = Cli::try_parse_from(["repsim", "run", "--strategy", "all", "--hops", "4", "--no-noise"]).unwrap();
        let Command::Run(a) = cli.command else { panic!() };
        let cfg = a.resolve().unwrap();
        assert_eq!(cfg.params.hops, 4);
        assert_eq!(cfg.strategies.len(), 6);
        let cli = Cli::try_parse_from(["repsim", "sweep", "--hops-grid", "2,4"]).unwrap();
        let Command::Sweep(a) = cli.command else { panic!() };
        assert_eq!(a.resolve().unwrap().grid.hops, vec![2, 4]);
        assert!(Cli::try_parse_from(["repsim", "fly"]).is_err());
    }
}
