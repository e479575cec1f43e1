//! Run configuration: defaults, a flat TOML file, and command-line flags.
//!
//! Precedence is flags over file over defaults. A scalar `hops`,
//! `lambda_gate` or `p_meas` pins that axis of a sweep to one value; the
//! `*_grid` keys list several values instead. Setting both forms of the same
//! axis at one level is an error.
//!
//! ```toml
//! p_depo = 0.025
//! tau_memory = 0.010
//! n_trials = 20000
//! seed = 7
//! strategy = "HG-PE"
//! hops_grid = [2, 4]
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::SimError;
use crate::metrics::Grid;
use crate::noise::SimParams;
use crate::strategies::StrategyId;

/// Every recognised key. All optional so a file can set any subset.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub p_depo: Option<f64>,
    pub lambda_gate: Option<f64>,
    pub p_meas: Option<f64>,
    pub tau_memory: Option<f64>,
    pub total_distance: Option<f64>,
    pub hops: Option<usize>,
    pub attenuation: Option<f64>,
    pub light_speed: Option<f64>,
    pub f_threshold: Option<f64>,
    pub n_trials: Option<u64>,
    pub seed: Option<u64>,
    pub t_sim: Option<f64>,
    pub hops_grid: Option<Vec<usize>>,
    pub lambda_gate_grid: Option<Vec<f64>>,
    pub p_meas_grid: Option<Vec<f64>>,
    /// A strategy name or `all`.
    pub strategy: Option<String>,
    pub out: Option<PathBuf>,
    pub trace: Option<bool>,
    /// Switches every error source off.
    #[serde(skip)]
    pub no_noise: bool,
}

macro_rules! overlay {
    ($hi:expr, $lo:expr; $($f:ident),*) => {
        Settings {
            $($f: $hi.$f.or($lo.$f),)*
            no_noise: $hi.no_noise || $lo.no_noise,
        }
    };
}

impl Settings {
    pub fn from_toml(text: &str) -> Result<Self, SimError> {
        toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let key = e
                .message()
                .strip_prefix("unknown field `")
                .and_then(|r| r.split('`').next())
                .map(str::to_string)
                .or_else(|| e.span().and_then(|sp| key_at(text, sp.start)))
                .unwrap_or_else(|| "config file".into());
            SimError::Config { key, reason: msg }
        })
    }

    pub fn from_file(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::Config {
            key: "config".into(),
            reason: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::from_toml(&text).map_err(|e| match e {
            SimError::Config { key, reason } => SimError::Config {
                key,
                reason: format!("{}: {reason}", path.display()),
            },
            other => other,
        })
    }

    /// `self` wins wherever both are set.
    pub fn over(self, lower: Settings) -> Settings {
        overlay!(self, lower;
            p_depo, lambda_gate, p_meas, tau_memory, total_distance, hops, attenuation,
            light_speed, f_threshold, n_trials, seed, t_sim, hops_grid, lambda_gate_grid,
            p_meas_grid, strategy, out, trace)
    }

    fn check_axes(&self) -> Result<(), SimError> {
        for (scalar, grid, set) in [
            ("hops", "hops_grid", self.hops.is_some() && self.hops_grid.is_some()),
            (
                "lambda_gate",
                "lambda_gate_grid",
                self.lambda_gate.is_some() && self.lambda_gate_grid.is_some(),
            ),
            ("p_meas", "p_meas_grid", self.p_meas.is_some() && self.p_meas_grid.is_some()),
        ] {
            if set {
                return Err(SimError::Config {
                    key: grid.into(),
                    reason: format!("cannot be combined with `{scalar}`"),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SimParams,
    pub grid: Grid,
    pub strategies: Vec<StrategyId>,
    pub out: Option<PathBuf>,
    pub trace: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: SimParams::default(),
            grid: Grid::default(),
            strategies: StrategyId::ALL.to_vec(),
            out: None,
            trace: false,
        }
    }
}

pub fn parse_strategies(s: &str) -> Result<Vec<StrategyId>, SimError> {
    if s.trim().eq_ignore_ascii_case("all") {
        Ok(StrategyId::ALL.to_vec())
    } else {
        s.parse().map(|id| vec![id])
    }
}

impl RunConfig {
    /// Merges flags over an optional file over defaults and validates the result.
    pub fn resolve(flags: Settings, file: Option<Settings>) -> Result<Self, SimError> {
        flags.check_axes()?;
        let file = file.unwrap_or_default();
        file.check_axes()?;
        // a scalar flag also overrides a grid from the file
        let mut file = file;
        if flags.hops.is_some() {
            file.hops_grid = None;
        }
        if flags.lambda_gate.is_some() {
            file.lambda_gate_grid = None;
        }
        if flags.p_meas.is_some() {
            file.p_meas_grid = None;
        }
        if flags.hops_grid.is_some() {
            file.hops = None;
        }
        if flags.lambda_gate_grid.is_some() {
            file.lambda_gate = None;
        }
        if flags.p_meas_grid.is_some() {
            file.p_meas = None;
        }
        let s = flags.over(file);

        let d = SimParams::default();
        let mut params = SimParams {
            p_depo: s.p_depo.unwrap_or(d.p_depo),
            lambda_gate: s.lambda_gate.unwrap_or(d.lambda_gate),
            p_meas: s.p_meas.unwrap_or(d.p_meas),
            tau_memory: s.tau_memory.unwrap_or(d.tau_memory),
            total_distance: s.total_distance.unwrap_or(d.total_distance),
            hops: s.hops.unwrap_or(d.hops),
            attenuation: s.attenuation.unwrap_or(d.attenuation),
            light_speed: s.light_speed.unwrap_or(d.light_speed),
            f_threshold: s.f_threshold.unwrap_or(d.f_threshold),
            n_trials: s.n_trials.unwrap_or(d.n_trials),
            seed: s.seed.unwrap_or(d.seed),
            t_sim: s.t_sim.unwrap_or(d.t_sim),
        };
        if s.no_noise {
            params.p_depo = 0.0;
            params.lambda_gate = 0.0;
            params.p_meas = 0.0;
            params.tau_memory = f64::INFINITY;
        }
        params.validate()?;

        let dg = Grid::default();
        let grid = Grid {
            hops: s.hops.map(|h| vec![h]).or(s.hops_grid).unwrap_or(dg.hops),
            lambda_gate: if s.no_noise {
                vec![0.0]
            } else {
                s.lambda_gate.map(|v| vec![v]).or(s.lambda_gate_grid).unwrap_or(dg.lambda_gate)
            },
            p_meas: if s.no_noise {
                vec![0.0]
            } else {
                s.p_meas.map(|v| vec![v]).or(s.p_meas_grid).unwrap_or(dg.p_meas)
            },
        };
        for &h in &grid.hops {
            SimParams { hops: h, ..params.clone() }
                .validate()
                .map_err(|e| grid_error("hops_grid", e))?;
        }
        for &l in &grid.lambda_gate {
            SimParams {
                lambda_gate: l,
                ..params.clone()
            }
            .validate()
            .map_err(|e| grid_error("lambda_gate_grid", e))?;
        }
        for &m in &grid.p_meas {
            SimParams { p_meas: m, ..params.clone() }
                .validate()
                .map_err(|e| grid_error("p_meas_grid", e))?;
        }

        let strategies = match &s.strategy {
            Some(name) => parse_strategies(name)?,
            None => StrategyId::ALL.to_vec(),
        };
        Ok(RunConfig {
            params,
            grid,
            strategies,
            out: s.out,
            trace: s.trace.unwrap_or(false),
        })
    }
}

/// Key on the line holding byte `pos`.
fn key_at(text: &str, pos: usize) -> Option<String> {
    let start = text[..pos.min(text.len())].rfind('\n').map_or(0, |i| i + 1);
    let line = text[start..].lines().next()?;
    let key = line.split_once('=')?.0.trim();
    (!key.is_empty()).then(|| key.to_string())
}

fn grid_error(key: &str, e: SimError) -> SimError {
    SimError::Config {
        key: key.into(),
        reason: e.to_string(),
    }
}
