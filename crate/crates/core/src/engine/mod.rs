//! Deterministic discrete-event core.
//!
//! One [`Engine`] runs one trial: it owns the virtual clock, the event queue,
//! the chain topology with its qubit slots and the [`Device`] holding the
//! trial's Pauli frame and random stream. Protocols drive it through the
//! [`Protocol`] trait and react to heralded link pairs and classical messages.

mod event;
mod swap;
mod topology;

pub use event::{Event, EventKind, EventQueue, Message};
pub use swap::bell_measurement;
pub use topology::{LinkEnd, Qnic, QubitSlot, SlotBudget, SlotKind, SlotState, Topology};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Geometric};

use crate::device::{Device, NoiseModel};
use crate::error::SimError;
use crate::noise::SimParams;
use crate::pair::{BellPair, PairId};
use crate::pauli::SlotId;

pub type TrialRng = ChaCha8Rng;

/// Random stream for one trial, derived from the run seed and a stream index.
pub fn trial_rng(seed: u64, stream: u64) -> TrialRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// What a protocol is told about.
#[derive(Debug, Clone, PartialEq)]
pub enum Incoming {
    PairReady { link: usize, pair: BellPair },
    Message { from: usize, to: usize, msg: Message },
    LocalOp { node: usize, label: &'static str },
}

pub trait Protocol {
    type Output;

    fn start(&mut self, eng: &mut Engine) -> Result<(), SimError>;

    /// Returns `Some` once the protocol has finished.
    fn on_event(&mut self, eng: &mut Engine, ev: Incoming) -> Result<Option<Self::Output>, SimError>;
}

/// A link pair whose generation attempts have been scheduled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PendingLink {
    pub link: usize,
    pub left: SlotId,
    pub right: SlotId,
    pub attempts: u64,
    pub ready_at: f64,
}

pub struct Engine {
    params: SimParams,
    topo: Topology,
    dev: Device<TrialRng>,
    queue: EventQueue,
    now: f64,
    trace: Option<Vec<String>>,
    next_pair: PairId,
    link_pairs: Vec<u32>,
}

impl Engine {
    pub fn new(
        params: &SimParams,
        end_budget: SlotBudget,
        intermediate_budget: SlotBudget,
        rng: TrialRng,
    ) -> Result<Self, SimError> {
        params.validate()?;
        let topo = Topology::new(params.hops, params.link_length(), end_budget, intermediate_budget)?;
        Ok(Engine {
            params: params.clone(),
            link_pairs: vec![0; params.hops],
            topo,
            dev: Device::new(NoiseModel::from(params), rng),
            queue: EventQueue::new(),
            now: 0.0,
            trace: None,
            next_pair: 0,
        })
    }

    pub fn enable_trace(&mut self) {
        self.trace.get_or_insert_with(Vec::new);
    }

    pub fn take_trace(&mut self) -> Vec<String> {
        self.trace.take().unwrap_or_default()
    }

    pub fn now(&self) -> f64 {
        self.now
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn hops(&self) -> usize {
        self.params.hops
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    pub fn topology_mut(&mut self) -> &mut Topology {
        &mut self.topo
    }

    /// Device view synchronized to the current clock.
    pub fn device(&mut self) -> &mut Device<TrialRng> {
        self.dev.set_now(self.now);
        &mut self.dev
    }

    pub fn device_ref(&self) -> &Device<TrialRng> {
        &self.dev
    }

    /// Link-level pairs heralded so far, per link.
    pub fn link_pairs_generated(&self) -> &[u32] {
        &self.link_pairs
    }

    pub fn pending_events(&self) -> usize {
        self.queue.len()
    }

    pub fn log(&mut self, kind: &str, node: usize, detail: impl FnOnce() -> String) {
        if let Some(t) = self.trace.as_mut() {
            t.push(format!("{:.9} {} {} {}", self.now, kind, node, detail()));
        }
    }

    pub fn schedule(&mut self, at: f64, kind: EventKind) -> Result<(), SimError> {
        if at < self.now {
            return Err(SimError::Protocol(format!(
                "event {} scheduled at {at} before current time {}",
                kind.name(),
                self.now
            )));
        }
        self.queue.push(at, kind);
        Ok(())
    }

    /// Sends a classical message along the chain; returns its arrival time.
    pub fn send_classical(&mut self, from: usize, to: usize, msg: Message) -> Result<f64, SimError> {
        let at = self.now + self.params.classical_delay(from, to);
        self.schedule(at, EventKind::ClassicalMsg { from, to, msg })?;
        Ok(at)
    }

    /// Claims one external slot at each end of `link` and schedules the
    /// heralding of a new pair after a geometric number of attempts.
    pub fn generate_link_pair(&mut self, link: usize) -> Result<PendingLink, SimError> {
        if link >= self.params.hops {
            return Err(SimError::Protocol(format!("no link {link}")));
        }
        let left = self
            .topo
            .allocate(self.topo.qnic(link, LinkEnd::Left), SlotKind::External)?;
        let right = self
            .topo
            .allocate(self.topo.qnic(link, LinkEnd::Right), SlotKind::External)?;
        let eta = self.params.link_success_prob();
        let attempts = if eta >= 1.0 {
            1
        } else {
            let g = Geometric::new(eta).map_err(|e| SimError::param("attenuation", e.to_string()))?;
            1 + g.sample(self.dev.rng())
        };
        let ready_at = self.now + attempts as f64 * self.params.attempt_period();
        self.schedule(self.now, EventKind::AttemptLink { link, left, right })?;
        self.schedule(
            ready_at,
            EventKind::Herald {
                link,
                left,
                right,
                attempts,
            },
        )?;
        Ok(PendingLink {
            link,
            left,
            right,
            attempts,
            ready_at,
        })
    }

    fn new_pair_id(&mut self) -> PairId {
        let id = self.next_pair;
        self.next_pair += 1;
        id
    }

    /// Runs a protocol from the current time until it produces its output.
    pub fn run<P: Protocol>(&mut self, proto: &mut P) -> Result<P::Output, SimError> {
        proto.start(self)?;
        while let Some(ev) = self.queue.pop() {
            if ev.time < self.now {
                return Err(SimError::Protocol(format!(
                    "event at {} processed after {}",
                    ev.time, self.now
                )));
            }
            self.now = ev.time;
            if let Some(t) = self.trace.as_mut() {
                t.push(ev.trace_line());
            }
            let incoming = match ev.kind {
                EventKind::AttemptLink { .. } | EventKind::Deliver { .. } => continue,
                EventKind::Herald { link, left, right, .. } => {
                    self.dev.set_now(self.now);
                    self.dev.create_pair(left, right);
                    self.link_pairs[link] += 1;
                    let pair = BellPair::physical(self.new_pair_id(), (link, link + 1), (left, right), self.now);
                    Incoming::PairReady { link, pair }
                }
                EventKind::ClassicalMsg { from, to, msg } => Incoming::Message { from, to, msg },
                EventKind::LocalOp { node, label } => Incoming::LocalOp { node, label },
            };
            if let Some(out) = proto.on_event(self, incoming)? {
                return Ok(out);
            }
        }
        Err(SimError::Protocol("event queue drained before delivery".into()))
    }

    /// Sends one classical message and advances the clock until it arrives.
    pub fn exchange(&mut self, from: usize, to: usize, msg: Message) -> Result<(), SimError> {
        self.run(&mut AwaitMessage { send: Some((from, to, msg)) })
    }

    /// Records a delivery in the trace.
    pub fn mark_delivery(&mut self, left: usize, right: usize) {
        if let Some(t) = self.trace.as_mut() {
            let ev = Event {
                time: self.now,
                seq: 0,
                kind: EventKind::Deliver { left, right },
            };
            t.push(ev.trace_line());
        }
    }

    /// Fresh pair id for pairs produced by swapping or encoding.
    pub fn allocate_pair_id(&mut self) -> PairId {
        self.new_pair_id()
    }
}

struct AwaitMessage {
    send: Option<(usize, usize, Message)>,
}

impl Protocol for AwaitMessage {
    type Output = ();

    fn start(&mut self, eng: &mut Engine) -> Result<(), SimError> {
        let (from, to, msg) = self
            .send
            .take()
            .ok_or_else(|| SimError::Protocol("message already sent".into()))?;
        eng.send_classical(from, to, msg)?;
        Ok(())
    }

    fn on_event(&mut self, _eng: &mut Engine, ev: Incoming) -> Result<Option<()>, SimError> {
        Ok(matches!(ev, Incoming::Message { .. }).then_some(()))
    }
}
