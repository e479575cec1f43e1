//! Noisy gate and measurement primitives over a Pauli frame.
//!
//! A [`Device`] holds the error frame of every qubit slot in a trial, the time
//! each slot was last initialized, the current simulation time and the
//! trial's random stream. Gates are instantaneous. Memory errors are applied to
//! a qubit immediately before it is measured, with a strength set by the time
//! elapsed since the qubit was initialized.

use rand::Rng;

use crate::error::SimError;
use crate::noise::{self, SimParams};
use crate::pauli::{PairError, PauliFrame, PauliOp, SlotId};

/// Measurement basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Z,
    X,
}

/// The error-relevant parameters of the hardware.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub p_depo: f64,
    pub lambda_gate: f64,
    pub p_meas: f64,
    pub tau_memory: f64,
}

impl NoiseModel {
    pub const NOISELESS: NoiseModel = NoiseModel {
        p_depo: 0.0,
        lambda_gate: 0.0,
        p_meas: 0.0,
        tau_memory: f64::INFINITY,
    };
}

impl From<&SimParams> for NoiseModel {
    fn from(p: &SimParams) -> Self {
        NoiseModel {
            p_depo: p.p_depo,
            lambda_gate: p.lambda_gate,
            p_meas: p.p_meas,
            tau_memory: p.tau_memory,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Device<R> {
    frame: PauliFrame,
    init_time: Vec<f64>,
    now: f64,
    noise: NoiseModel,
    rng: R,
}

impl<R: Rng> Device<R> {
    pub fn new(noise: NoiseModel, rng: R) -> Self {
        Device {
            frame: PauliFrame::new(),
            init_time: Vec::new(),
            now: 0.0,
            noise,
            rng,
        }
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn set_now(&mut self, t: f64) {
        self.now = t;
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn frame(&self) -> &PauliFrame {
        &self.frame
    }

    pub fn rng(&mut self) -> &mut R {
        &mut self.rng
    }

    pub fn error(&self, q: SlotId) -> PauliOp {
        self.frame.get(q)
    }

    pub fn init_time(&self, q: SlotId) -> f64 {
        self.init_time.get(q).copied().unwrap_or(0.0)
    }

    /// Multiplies an explicit Pauli into the frame (fault injection, tests).
    pub fn inject(&mut self, q: SlotId, p: PauliOp) {
        self.frame.apply(q, p);
    }

    /// Resets `q` to a fresh, error-free qubit born at the current time.
    pub fn init_qubit(&mut self, q: SlotId) {
        self.frame.clear(q);
        if q >= self.init_time.len() {
            self.init_time.resize(q + 1, 0.0);
        }
        self.init_time[q] = self.now;
    }

    /// Creates a link pair on `(left, right)` and depolarizes both halves.
    pub fn create_pair(&mut self, left: SlotId, right: SlotId) -> PairError {
        self.init_qubit(left);
        self.init_qubit(right);
        let e = noise::apply_link_depolarizing(PairError::default(), self.noise.p_depo, &mut self.rng);
        self.frame.set(left, e.left);
        self.frame.set(right, e.right);
        e
    }

    pub fn cnot(&mut self, control: SlotId, target: SlotId) -> Result<(), SimError> {
        self.frame.propagate_cnot(control, target)?;
        noise::apply_gate_noise(
            &mut self.frame,
            &[control, target],
            self.noise.lambda_gate,
            &mut self.rng,
        );
        Ok(())
    }

    pub fn h(&mut self, q: SlotId) {
        self.frame.propagate_h(q);
        noise::apply_gate_noise(&mut self.frame, &[q], self.noise.lambda_gate, &mut self.rng);
    }

    /// A physical Pauli gate. Pauli gates commute with the frame up to phase,
    /// so only the gate error is recorded.
    pub fn pauli_gate(&mut self, q: SlotId) {
        noise::apply_gate_noise(&mut self.frame, &[q], self.noise.lambda_gate, &mut self.rng);
    }

    /// Applies the conditional Pauli correction requested by a classical
    /// outcome.
    ///
    /// `error` marks whether the reported outcome differs from the ideal one.
    /// The ideal outcome itself is uniformly random, so a physical gate (and
    /// its gate error) is needed whenever the reported bit is 1.
    pub fn conditional_correction(&mut self, q: SlotId, correction: PauliOp, error: bool) {
        let ideal: bool = self.rng.random();
        if ideal ^ error {
            self.pauli_gate(q);
        }
        if error {
            self.frame.apply(q, correction);
        }
    }

    /// Applies the accumulated Pauli correction of a chain of swaps.
    ///
    /// The ideal correction is uniformly random; a physical gate is needed
    /// whenever the reported one is not the identity. `error` is the
    /// difference between reported and ideal corrections.
    pub fn pauli_correction(&mut self, q: SlotId, error: PauliOp) {
        let ideal = PauliOp::from_index(self.rng.random_range(0..4));
        if !(ideal * error).is_identity() {
            self.pauli_gate(q);
        }
        self.frame.apply(q, error);
    }

    /// Memory error accrued since the qubit was initialized.
    pub fn apply_memory_decay(&mut self, q: SlotId) {
        let elapsed = self.now - self.init_time(q);
        let p = noise::memory_decay_prob(elapsed, self.noise.tau_memory);
        let e = noise::depolarize(p, &mut self.rng);
        self.frame.apply(q, e);
    }

    /// Destructively measures `q`.
    ///
    /// Returns whether the reported outcome differs from the noiseless one:
    /// the frame component that anticommutes with the basis, XOR a classical
    /// readout flip. The slot's frame entry is cleared.
    pub fn measure(&mut self, q: SlotId, basis: Basis) -> bool {
        self.apply_memory_decay(q);
        let e = self.frame.get(q);
        let flipped = match basis {
            Basis::Z => e.has_x(),
            Basis::X => e.has_z(),
        };
        self.frame.clear(q);
        noise::flip_measurement(flipped, self.noise.p_meas, &mut self.rng)
    }

    /// Drops a qubit without measuring it.
    pub fn discard(&mut self, q: SlotId) {
        self.frame.clear(q);
    }
}
