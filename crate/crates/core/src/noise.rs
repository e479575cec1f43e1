//! Stochastic Pauli error channels and the fixed simulation parameters.
//!
//! All channels use the convention "with probability `p` apply a uniformly
//! random non-identity Pauli". Under that convention a Bell pair whose two
//! halves are depolarized independently keeps fidelity `(1 − p)² + p²/3`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::SimError;
use crate::pauli::{PairError, PauliFrame, PauliOp, SlotId};
use crate::scalar::Real;

/// Fixed and swept parameters of one simulation point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimParams {
    /// Depolarizing probability applied to each half of a fresh link pair.
    pub p_depo: f64,
    /// Per-qubit error probability after every gate.
    pub lambda_gate: f64,
    /// Classical bit-flip probability on every measurement outcome.
    pub p_meas: f64,
    /// Memory lifetime in seconds. `inf` disables memory errors.
    pub tau_memory: f64,
    /// End-to-end distance in km.
    pub total_distance: f64,
    /// Number of links in the chain.
    pub hops: usize,
    /// Fiber loss in dB/km.
    pub attenuation: f64,
    /// Signal speed in km/s.
    pub light_speed: f64,
    /// Target fidelity for the delivered pair.
    pub f_threshold: f64,
    pub n_trials: u64,
    pub seed: u64,
    /// Horizon in seconds for throughput runs.
    pub t_sim: f64,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams {
            p_depo: 0.025,
            lambda_gate: 0.0,
            p_meas: 0.0,
            tau_memory: 0.010,
            total_distance: 100.0,
            hops: 2,
            attenuation: 0.30,
            light_speed: 300_000.0,
            f_threshold: 0.83,
            n_trials: 10_000,
            seed: 1,
            t_sim: 1.0,
        }
    }
}

impl SimParams {
    /// Parameters with every error source switched off.
    pub fn noiseless() -> Self {
        SimParams {
            p_depo: 0.0,
            lambda_gate: 0.0,
            p_meas: 0.0,
            tau_memory: f64::INFINITY,
            ..SimParams::default()
        }
    }

    pub fn link_length(&self) -> f64 {
        self.total_distance / self.hops as f64
    }

    /// One heralded attempt: photon flight plus acknowledgment.
    pub fn attempt_period(&self) -> f64 {
        2.0 * self.link_length() / self.light_speed
    }

    pub fn link_success_prob(&self) -> f64 {
        link_success_prob(self.link_length(), self.attenuation)
    }

    /// Classical latency between two nodes of the chain.
    pub fn classical_delay(&self, from: usize, to: usize) -> f64 {
        let hops = from.abs_diff(to) as f64;
        hops * self.link_length() / self.light_speed
    }

    // negated comparisons so that NaN is rejected too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<(), SimError> {
        for (name, p) in [
            ("p_depo", self.p_depo),
            ("lambda_gate", self.lambda_gate),
            ("p_meas", self.p_meas),
            ("f_threshold", self.f_threshold),
        ] {
            check_probability(name, p)?;
        }
        if !(self.tau_memory > 0.0) {
            return Err(SimError::param("tau_memory", "must be > 0"));
        }
        if self.hops == 0 {
            return Err(SimError::param("hops", "must be at least 1"));
        }
        if !(self.total_distance > 0.0) || !self.total_distance.is_finite() {
            return Err(SimError::param("total_distance", "must be a positive finite length"));
        }
        if !(self.attenuation >= 0.0) || !self.attenuation.is_finite() {
            return Err(SimError::param("attenuation", "must be finite and >= 0"));
        }
        if !(self.light_speed > 0.0) || !self.light_speed.is_finite() {
            return Err(SimError::param("light_speed", "must be positive and finite"));
        }
        if self.n_trials == 0 {
            return Err(SimError::param("n_trials", "must be at least 1"));
        }
        if !(self.t_sim > 0.0) || !self.t_sim.is_finite() {
            return Err(SimError::param("t_sim", "must be positive and finite"));
        }
        Ok(())
    }
}

fn check_probability(name: &'static str, p: f64) -> Result<(), SimError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(SimError::param(name, format!("{p} is outside [0, 1]")))
    }
}

/// With probability `p` returns a uniformly random non-identity Pauli, else `I`.
pub fn sample_uniform_pauli<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Result<PauliOp, SimError> {
    check_probability("p", p)?;
    Ok(depolarize(p, rng))
}

/// Unchecked sampler for the hot path; `p` must already be validated.
///
/// Always consumes exactly one uniform draw, so runs that differ only in
/// error strengths stay on the same random stream.
pub(crate) fn depolarize<R: Rng + ?Sized>(p: f64, rng: &mut R) -> PauliOp {
    let u: f64 = rng.random();
    if u >= p {
        PauliOp::I
    } else {
        // u / p is uniform on [0, 1) given u < p
        let k = ((u / p) * 3.0) as usize;
        PauliOp::NON_IDENTITY[k.min(2)]
    }
}

/// Independently depolarizes both ends of a freshly created pair.
pub fn apply_link_depolarizing<R: Rng + ?Sized>(
    pair: PairError,
    p_depo: f64,
    rng: &mut R,
) -> PairError {
    let l = depolarize(p_depo, rng);
    let r = depolarize(p_depo, rng);
    PairError::new(pair.left * l, pair.right * r)
}

/// Memory error strength after `elapsed` seconds in a memory of lifetime `tau`.
pub fn memory_decay_prob<T: Real>(elapsed: T, tau: T) -> T {
    if elapsed <= T::zero() {
        return T::zero();
    }
    T::one() - (-elapsed / tau).exp()
}

/// Multiplies an independent depolarizing draw into every listed slot.
pub fn apply_gate_noise<R: Rng + ?Sized>(
    frame: &mut PauliFrame,
    slots: &[SlotId],
    lambda_gate: f64,
    rng: &mut R,
) {
    for &s in slots {
        let e = depolarize(lambda_gate, rng);
        if !e.is_identity() {
            frame.apply(s, e);
        }
    }
}

pub fn flip_measurement<R: Rng + ?Sized>(bit: bool, p_meas: f64, rng: &mut R) -> bool {
    bit ^ (rng.random::<f64>() < p_meas)
}

/// Heralding probability of one attempt over `link_length` km of fiber.
pub fn link_success_prob<T: Real>(link_length: T, attenuation: T) -> T {
    T::lit(10.0).powf(-attenuation * link_length / T::lit(10.0))
}

/// Fidelity of `|Φ+⟩` after both halves pass a depolarizing channel of strength `p`.
pub fn depolarized_pair_fidelity<T: Real>(p: T) -> T {
    let q = T::one() - p;
    q * q + p * p / T::lit(3.0)
}

/// Strength of two depolarizing channels applied in sequence.
pub fn compose_depolarizing<T: Real>(p1: T, p2: T) -> T {
    p1 + p2 - T::lit(4.0 / 3.0) * p1 * p2
}

/// Exact transition matrix of the single-qubit channel, indexed `[from][to]`
/// by [`PauliOp::index`].
pub fn depolarizing_transition<T: Real>(p: T) -> [[T; 4]; 4] {
    let stay = T::one() - p;
    let move_ = p / T::lit(3.0);
    let mut m = [[move_; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = stay;
    }
    m
}
