//! Fidelity and throughput estimation, and grid sweeps.
//!
//! Trial `i` of every grid point draws from stream `i` of the run seed, so
//! grid points share random numbers and differences between them are not
//! swamped by sampling noise. Throughput runs use a stream of their own.

use rayon::prelude::*;

use crate::engine::trial_rng;
use crate::error::SimError;
use crate::noise::SimParams;
use crate::scalar::Real;
use crate::strategies::{self, StrategyId};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

const THROUGHPUT_STREAM: u64 = u64::MAX;

/// Wilson score interval for `successes` out of `n`.
pub fn wilson_interval<T: Real>(successes: u64, n: u64, z: T) -> (T, T) {
    if n == 0 {
        return (T::zero(), T::one());
    }
    let nf = T::from_u64(n).expect("trial count");
    let p = T::from_u64(successes).expect("success count") / nf;
    let z2 = z * z;
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let denom = T::one() + z2 / nf;
    let center = (p + z2 / (two * nf)) / denom;
    let half = z / denom * (p * (T::one() - p) / nf + z2 / (four * nf * nf)).sqrt();
    let low = (center - half).max(T::zero()).min(p);
    let high = (center + half).min(T::one()).max(p);
    (low, high)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityEstimate<T = f64> {
    pub point: T,
    pub ci_low: T,
    pub ci_high: T,
    pub n: u64,
}

impl<T: Real> FidelityEstimate<T> {
    pub fn from_counts(successes: u64, n: u64) -> Self {
        let point = if n == 0 {
            T::zero()
        } else {
            T::from_u64(successes).expect("count") / T::from_u64(n).expect("count")
        };
        let (ci_low, ci_high) = wilson_interval(successes, n, T::lit(Z95));
        FidelityEstimate {
            point,
            ci_low,
            ci_high,
            n,
        }
    }

    pub fn width(&self) -> T {
        self.ci_high - self.ci_low
    }

    /// True when the whole interval lies strictly above `threshold`.
    pub fn above(&self, threshold: T) -> bool {
        self.ci_low > threshold
    }

    /// True when the whole interval lies strictly below `threshold`.
    pub fn below(&self, threshold: T) -> bool {
        self.ci_high < threshold
    }
}

/// Counts gathered over a batch of independent trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrialSummary {
    pub n: u64,
    pub perfect: u64,
    /// Trials whose peak per-QNIC usage equalled the strategy's budget.
    pub budget_exact: u64,
}

impl TrialSummary {
    pub fn fidelity(&self) -> FidelityEstimate {
        FidelityEstimate::from_counts(self.perfect, self.n)
    }

    fn merge(self, other: Self) -> Self {
        TrialSummary {
            n: self.n + other.n,
            perfect: self.perfect + other.perfect,
            budget_exact: self.budget_exact + other.budget_exact,
        }
    }
}

/// Runs trials `0..n_trials` of `strategy` in parallel.
pub fn run_trials(strategy: StrategyId, params: &SimParams, n_trials: u64, seed: u64) -> Result<TrialSummary, SimError> {
    params.validate()?;
    (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let t = strategies::run_indexed(strategy, params, seed, i)?;
            Ok(TrialSummary {
                n: 1,
                perfect: t.delivery.is_perfect() as u64,
                budget_exact: t.usage_matches_budget() as u64,
            })
        })
        .try_reduce(TrialSummary::default, |a, b| Ok(a.merge(b)))
}

pub fn estimate_fidelity(
    strategy: StrategyId,
    params: &SimParams,
    n_trials: u64,
    seed: u64,
) -> Result<FidelityEstimate, SimError> {
    run_trials(strategy, params, n_trials, seed).map(|s| s.fidelity())
}

/// Fidelity change between two parameter sets, estimated from paired trials.
///
/// Trial `i` runs on the same random stream under both settings, so the
/// per-trial differences carry far less noise than two independent runs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairedDifference {
    /// Mean of `fidelity(from) - fidelity(to)`.
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n: u64,
}

impl PairedDifference {
    fn from_counts(lost: u64, gained: u64, n: u64) -> Self {
        let nf = n as f64;
        let mean = (lost as f64 - gained as f64) / nf;
        let var = ((lost + gained) as f64 / nf - mean * mean).max(0.0);
        let half = Z95 * (var / nf).sqrt();
        PairedDifference {
            mean,
            ci_low: mean - half,
            ci_high: mean + half,
            n,
        }
    }

    /// True when this interval lies entirely above `other`'s.
    pub fn exceeds(&self, other: &PairedDifference) -> bool {
        self.ci_low > other.ci_high
    }
}

/// Drop in fidelity when moving from `from` to `to`.
pub fn fidelity_drop(
    strategy: StrategyId,
    from: &SimParams,
    to: &SimParams,
    n_trials: u64,
    seed: u64,
) -> Result<PairedDifference, SimError> {
    from.validate()?;
    to.validate()?;
    if n_trials == 0 {
        return Err(SimError::param("n_trials", "must be at least 1"));
    }
    let (lost, gained) = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let a = strategies::run_indexed(strategy, from, seed, i)?.delivery.is_perfect();
            let b = strategies::run_indexed(strategy, to, seed, i)?.delivery.is_perfect();
            Ok(((a && !b) as u64, (b && !a) as u64))
        })
        .try_reduce(|| (0, 0), |x, y| Ok((x.0 + y.0, x.1 + y.1)))?;
    Ok(PairedDifference::from_counts(lost, gained, n_trials))
}

/// Back-to-back requests on one chain; deliveries completed within `t_sim`
/// seconds, per second.
pub fn estimate_throughput(strategy: StrategyId, params: &SimParams, t_sim: f64, seed: u64) -> Result<f64, SimError> {
    if !(t_sim > 0.0 && t_sim.is_finite()) {
        return Err(SimError::param("t_sim", format!("must be positive and finite, got {t_sim}")));
    }
    let mut eng = strategies::new_engine(strategy, params, trial_rng(seed, THROUGHPUT_STREAM))?;
    let mut delivered = 0u64;
    loop {
        let d = strategies::deliver(&mut eng, strategy)?;
        if d.delivered_at > t_sim {
            break;
        }
        delivered += 1;
    }
    Ok(delivered as f64 / t_sim)
}

/// Axes of a sweep. Points are visited hops-major, then gate error, then
/// measurement error.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub hops: Vec<usize>,
    pub lambda_gate: Vec<f64>,
    pub p_meas: Vec<f64>,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            hops: vec![2, 4, 8],
            lambda_gate: vec![0.0, 0.0005, 0.0010, 0.0015, 0.0020],
            p_meas: vec![0.0, 0.0025, 0.0050, 0.0075, 0.0100],
        }
    }
}

impl Grid {
    pub fn single(hops: usize, lambda_gate: f64, p_meas: f64) -> Self {
        Grid {
            hops: vec![hops],
            lambda_gate: vec![lambda_gate],
            p_meas: vec![p_meas],
        }
    }

    pub fn empty() -> Self {
        Grid {
            hops: Vec::new(),
            lambda_gate: Vec::new(),
            p_meas: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.hops.len() * self.lambda_gate.len() * self.p_meas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn points(&self) -> Vec<(usize, f64, f64)> {
        let mut pts = Vec::with_capacity(self.len());
        for &h in &self.hops {
            for &l in &self.lambda_gate {
                for &m in &self.p_meas {
                    pts.push((h, l, m));
                }
            }
        }
        pts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub strategy: StrategyId,
    pub hops: usize,
    pub lambda_gate: f64,
    pub p_meas: f64,
    pub fidelity: FidelityEstimate,
    pub throughput: f64,
    pub n_trials: u64,
    pub seed: u64,
}

/// Evaluates one strategy at one parameter set.
pub fn evaluate(strategy: StrategyId, params: &SimParams) -> Result<SweepRecord, SimError> {
    let fidelity = estimate_fidelity(strategy, params, params.n_trials, params.seed)?;
    let throughput = estimate_throughput(strategy, params, params.t_sim, params.seed)?;
    Ok(SweepRecord {
        strategy,
        hops: params.hops,
        lambda_gate: params.lambda_gate,
        p_meas: params.p_meas,
        fidelity,
        throughput,
        n_trials: params.n_trials,
        seed: params.seed,
    })
}

/// Every grid point crossed with every strategy, in grid order with
/// strategies innermost. `base` supplies everything the grid does not vary.
pub fn run_sweep(
    grid: &Grid,
    strategies: &[StrategyId],
    base: &SimParams,
    seed: u64,
) -> Result<Vec<SweepRecord>, SimError> {
    let jobs: Vec<(SimParams, StrategyId)> = grid
        .points()
        .into_iter()
        .flat_map(|(hops, lambda_gate, p_meas)| {
            let params = SimParams {
                hops,
                lambda_gate,
                p_meas,
                seed,
                ..base.clone()
            };
            strategies.iter().map(move |&s| (params.clone(), s))
        })
        .collect();
    for (p, _) in &jobs {
        p.validate()?;
    }
    jobs.par_iter().map(|(p, s)| evaluate(*s, p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_bounds() {
        let e = FidelityEstimate::<f64>::from_counts(1000, 1000);
        assert_eq!(e.point, 1.0);
        assert_eq!(e.ci_high, 1.0);
        assert!((e.ci_low - (1.0 - Z95 * Z95 / 1000.0)).abs() < 1e-4);
        let e = FidelityEstimate::<f64>::from_counts(0, 50);
        assert_eq!(e.ci_low, 0.0);
        let e = FidelityEstimate::<f32>::from_counts(430, 1000);
        assert!(e.ci_low < e.point && e.point < e.ci_high);
    }

    #[test]
    fn wilson_matches_reference_value() {
        // 81 of 263: reference interval (0.2553, 0.3662)
        let (lo, hi) = wilson_interval(81, 263, Z95);
        assert!((lo - 0.2553).abs() < 5e-4, "{lo}");
        assert!((hi - 0.3662).abs() < 5e-4, "{hi}");
    }

    #[test]
    fn wilson_width_shrinks_like_root_n() {
        for &(k, n) in &[(860u64, 1000u64), (9508, 10_000), (500, 1000)] {
            let a = FidelityEstimate::<f64>::from_counts(k, n);
            let b = FidelityEstimate::<f64>::from_counts(2 * k, 2 * n);
            let r = b.width() / a.width();
            assert!((0.65..=0.75).contains(&r), "{r}");
        }
    }

    #[test]
    fn paired_difference_interval() {
        let d = PairedDifference::from_counts(30, 10, 1000);
        assert!((d.mean - 0.02).abs() < 1e-12);
        let se = ((0.04f64 - 0.0004) / 1000.0).sqrt();
        assert!((d.ci_high - d.mean - Z95 * se).abs() < 1e-12);
        let none = PairedDifference::from_counts(0, 0, 10);
        assert_eq!((none.ci_low, none.ci_high), (0.0, 0.0));
        assert!(d.exceeds(&none));
    }

    #[test]
    fn gate_noise_only_lowers_fidelity_under_common_streams() {
        let from = SimParams {
            hops: 2,
            ..SimParams::default()
        };
        let to = SimParams {
            lambda_gate: 0.002,
            ..from.clone()
        };
        let d = fidelity_drop(StrategyId::HgPe, &from, &to, 4000, 1).unwrap();
        assert!(d.ci_low > 0.0, "{d:?}");
    }

    #[test]
    fn grid_cardinality() {
        assert_eq!(Grid::default().len(), 75);
        assert_eq!(Grid::default().len() * StrategyId::ALL.len(), 450);
        let params = SimParams::default();
        assert!(run_sweep(&Grid::empty(), &StrategyId::ALL, &params, 1).unwrap().is_empty());
    }

    #[test]
    fn single_point_sweep_is_deterministic() {
        let params = SimParams {
            n_trials: 200,
            t_sim: 0.2,
            ..SimParams::default()
        };
        let grid = Grid::single(2, 0.001, 0.005);
        let a = run_sweep(&grid, &[StrategyId::ZeroG], &params, 7).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a, run_sweep(&grid, &[StrategyId::ZeroG], &params, 7).unwrap());
    }

    #[test]
    fn link_calibration() {
        let params = SimParams {
            hops: 1,
            total_distance: 50.0,
            p_depo: 0.0736,
            ..SimParams::noiseless()
        };
        let e = estimate_fidelity(StrategyId::ZeroG, &params, 20_000, 3).unwrap();
        assert!((e.point - 0.86).abs() < 0.01, "{e:?}");
    }

    #[test]
    fn lossless_zero_g_throughput_matches_latency() {
        let params = SimParams {
            hops: 8,
            attenuation: 0.0,
            ..SimParams::noiseless()
        };
        let l = params.link_length();
        let c = params.light_speed;
        // one attempt, then swaps at nodes 1..7, each confirmed at the farther end
        let swaps: f64 = (1..8).map(|k| (k.max(8 - k) as f64) * l / c).sum();
        let latency = 2.0 * l / c + swaps;
        let got = estimate_throughput(StrategyId::ZeroG, &params, 1.0, 1).unwrap();
        assert!((got * latency - 1.0).abs() < 0.1, "{got} vs {}", 1.0 / latency);
    }
}
