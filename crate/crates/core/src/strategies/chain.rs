//! Link-level preparation followed by ordered swapping along the chain.
//!
//! Every link starts generating its pairs when the request begins. Swaps run
//! strictly left to right: the swap at node `k` starts once the pair spanning
//! `0..k` is confirmed and link `k` is ready, and its outcome travels to both
//! end nodes before the next swap may start. Swap corrections accumulate at
//! the right end node and are applied once, at delivery.

use crate::device::Basis;
use crate::engine::{bell_measurement, Engine, Incoming, LinkEnd, Message, Protocol, SlotKind};
use crate::error::SimError;
use crate::pair::{BellPair, Half};
use crate::pauli::PauliOp;
use crate::purification::{self, PurifyOutcome};
use crate::steane::{self, LogicalQubit, BLOCK_LEN};

/// How each link turns raw heralded pairs into a swappable resource.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkMode {
    /// One physical pair per link.
    Raw,
    /// Ss-Dp on three physical pairs, retried until it succeeds.
    Purified,
    /// As `Purified`, each half then encoded into a Steane block just before
    /// it is swapped or delivered.
    PurifiedEncoded,
    /// A logical pair built from seven teleported CNOTs between a `|+⟩_L` block
    /// on the left and a `|0⟩_L` block on the right.
    Ncx,
}

impl LinkMode {
    pub fn pairs_per_round(self) -> usize {
        match self {
            LinkMode::Raw => 1,
            LinkMode::Purified | LinkMode::PurifiedEncoded => 3,
            LinkMode::Ncx => BLOCK_LEN,
        }
    }
}

#[derive(Debug)]
struct Teleport {
    control: LogicalQubit,
    target: LogicalQubit,
    pairs: Vec<BellPair>,
    forward: Vec<bool>,
    backward: Vec<bool>,
}

#[derive(Debug)]
enum Phase {
    Generating,
    Purifying(PurifyOutcome),
    Teleporting(Teleport),
    Ready(Half, Half),
    Used,
}

#[derive(Debug)]
struct Link {
    heralded: Vec<BellPair>,
    phase: Phase,
}

/// One end-to-end request over the whole chain.
#[derive(Debug)]
pub struct Chain {
    mode: LinkMode,
    hops: usize,
    links: Vec<Link>,
    acc: Option<(Half, Half)>,
    frontier: usize,
    awaiting: usize,
    correction: PauliOp,
}

impl Chain {
    pub fn new(mode: LinkMode, hops: usize) -> Self {
        Chain {
            mode,
            hops,
            links: (0..hops)
                .map(|_| Link {
                    heralded: Vec::new(),
                    phase: Phase::Generating,
                })
                .collect(),
            acc: None,
            frontier: 0,
            awaiting: 0,
            correction: PauliOp::I,
        }
    }

    fn request_round(&mut self, eng: &mut Engine, link: usize) -> Result<(), SimError> {
        self.links[link].heralded.clear();
        self.links[link].phase = Phase::Generating;
        for _ in 0..self.mode.pairs_per_round() {
            eng.generate_link_pair(link)?;
        }
        Ok(())
    }

    fn round_complete(&mut self, eng: &mut Engine, link: usize) -> Result<Option<BellPair>, SimError> {
        let pairs = std::mem::take(&mut self.links[link].heralded);
        match self.mode {
            LinkMode::Raw => {
                let (l, r) = pairs[0].halves();
                self.links[link].phase = Phase::Ready(l, r);
                self.advance(eng)
            }
            LinkMode::Purified | LinkMode::PurifiedEncoded => {
                let out = purification::ss_dp(eng.device(), &pairs)?;
                eng.log("local-op", link, || format!("ss-dp link={link} success={}", out.success));
                eng.send_classical(
                    link,
                    link + 1,
                    Message::PurifyResult {
                        link,
                        success: out.success,
                    },
                )?;
                self.links[link].heralded = pairs;
                self.links[link].phase = Phase::Purifying(out);
                Ok(None)
            }
            LinkMode::Ncx => {
                let left_q = eng.topology().qnic(link, LinkEnd::Left);
                let right_q = eng.topology().qnic(link, LinkEnd::Right);
                let cs = eng.topology_mut().allocate_many(left_q, SlotKind::Internal, BLOCK_LEN)?;
                let ts = eng.topology_mut().allocate_many(right_q, SlotKind::Internal, BLOCK_LEN)?;
                let control = steane::encode_plus(eng.device(), &cs)?;
                let target = steane::encode_zero(eng.device(), &ts)?;
                let mut forward = Vec::with_capacity(BLOCK_LEN);
                for (j, p) in pairs.iter().enumerate() {
                    let (a, _) = p.physical_slots()?;
                    let dev = eng.device();
                    dev.cnot(control.slots[j], a)?;
                    forward.push(dev.measure(a, Basis::Z));
                    eng.topology_mut().release(a)?;
                }
                eng.log("local-op", link, || format!("ncx-forward link={link}"));
                eng.send_classical(link, link + 1, Message::NcxForward { link })?;
                self.links[link].phase = Phase::Teleporting(Teleport {
                    control,
                    target,
                    pairs,
                    forward,
                    backward: Vec::new(),
                });
                Ok(None)
            }
        }
    }

    fn purify_result(&mut self, eng: &mut Engine, link: usize) -> Result<Option<BellPair>, SimError> {
        let Phase::Purifying(out) = std::mem::replace(&mut self.links[link].phase, Phase::Generating) else {
            return Err(SimError::Protocol(format!("link {link} is not purifying")));
        };
        let pairs = std::mem::take(&mut self.links[link].heralded);
        for p in pairs.iter().filter(|p| out.consumed.contains(&p.id)) {
            eng.topology_mut().release_all(&p.slots())?;
        }
        match out.kept {
            Some(kept) => {
                let (l, r) = kept.halves();
                self.links[link].phase = Phase::Ready(l, r);
                self.advance(eng)
            }
            None => {
                self.request_round(eng, link)?;
                Ok(None)
            }
        }
    }

    fn ncx_forward(&mut self, eng: &mut Engine, link: usize) -> Result<(), SimError> {
        let Phase::Teleporting(tp) = &mut self.links[link].phase else {
            return Err(SimError::Protocol(format!("link {link} is not teleporting")));
        };
        for (j, p) in tp.pairs.iter().enumerate() {
            let (_, b) = p.physical_slots()?;
            let dev = eng.device();
            dev.conditional_correction(b, PauliOp::X, tp.forward[j]);
            dev.cnot(b, tp.target.slots[j])?;
            tp.backward.push(dev.measure(b, Basis::X));
            eng.topology_mut().release(b)?;
        }
        eng.log("local-op", link + 1, || format!("ncx-backward link={link}"));
        eng.send_classical(link + 1, link, Message::NcxBackward { link })?;
        Ok(())
    }

    fn ncx_backward(&mut self, eng: &mut Engine, link: usize) -> Result<Option<BellPair>, SimError> {
        let Phase::Teleporting(tp) = std::mem::replace(&mut self.links[link].phase, Phase::Generating) else {
            return Err(SimError::Protocol(format!("link {link} is not teleporting")));
        };
        let dev = eng.device();
        for j in 0..BLOCK_LEN {
            dev.conditional_correction(tp.control.slots[j], PauliOp::Z, tp.backward[j]);
        }
        self.links[link].phase = Phase::Ready(Half::Logical(tp.control), Half::Logical(tp.target));
        self.advance(eng)
    }

    fn encode(&self, eng: &mut Engine, half: Half, qnic: usize) -> Result<Half, SimError> {
        match (self.mode, half) {
            (LinkMode::PurifiedEncoded, Half::Physical(data)) => {
                let anc = eng
                    .topology_mut()
                    .allocate_many(qnic, SlotKind::Internal, BLOCK_LEN - 1)?;
                Ok(Half::Logical(steane::encode_from_physical(eng.device(), data, &anc)?))
            }
            _ => Ok(half),
        }
    }

    fn take_ready(&mut self, link: usize) -> Option<(Half, Half)> {
        match self.links[link].phase {
            Phase::Ready(l, r) => {
                self.links[link].phase = Phase::Used;
                Some((l, r))
            }
            _ => None,
        }
    }

    fn advance(&mut self, eng: &mut Engine) -> Result<Option<BellPair>, SimError> {
        if self.awaiting > 0 {
            return Ok(None);
        }
        if self.acc.is_none() {
            match self.take_ready(0) {
                Some(pair) => {
                    self.acc = Some(pair);
                    self.frontier = 1;
                }
                None => return Ok(None),
            }
        }
        if self.frontier == self.hops {
            return self.deliver(eng).map(Some);
        }
        let node = self.frontier;
        let Some((next_l, next_r)) = self.take_ready(node) else {
            return Ok(None);
        };
        let (acc_l, acc_r) = self.acc.take().expect("accumulated pair");
        let topo = eng.topology();
        let (q_in, q_out) = (topo.qnic(node - 1, LinkEnd::Right), topo.qnic(node, LinkEnd::Left));
        let mid_l = self.encode(eng, acc_r, q_in)?;
        let mid_r = self.encode(eng, next_l, q_out)?;
        let err = bell_measurement(eng.device(), &mid_l, &mid_r)?;
        eng.log("local-op", node, || "swap".into());
        eng.topology_mut().release_all(&mid_l.slots())?;
        eng.topology_mut().release_all(&mid_r.slots())?;
        self.correction = self.correction * err;
        self.acc = Some((acc_l, next_r));
        self.frontier += 1;
        eng.send_classical(node, 0, Message::SwapOutcome { node })?;
        eng.send_classical(node, self.hops, Message::SwapOutcome { node })?;
        self.awaiting = 2;
        Ok(None)
    }

    fn deliver(&mut self, eng: &mut Engine) -> Result<BellPair, SimError> {
        let (l, r) = self.acc.take().expect("accumulated pair");
        let topo = eng.topology();
        let (q_l, q_r) = (topo.qnic(0, LinkEnd::Left), topo.qnic(self.hops - 1, LinkEnd::Right));
        let l = self.encode(eng, l, q_l)?;
        let r = self.encode(eng, r, q_r)?;
        if self.hops > 1 {
            match r {
                Half::Physical(q) => eng.device().pauli_correction(q, self.correction),
                Half::Logical(b) => steane::transversal_correction(eng.device(), &b, self.correction),
            }
        }
        eng.mark_delivery(0, self.hops);
        let id = eng.allocate_pair_id();
        BellPair::from_halves(id, (0, self.hops), l, r, eng.now())
    }
}

impl Protocol for Chain {
    type Output = BellPair;

    fn start(&mut self, eng: &mut Engine) -> Result<(), SimError> {
        if eng.hops() != self.hops {
            return Err(SimError::Protocol(format!(
                "chain built for {} hops run on {}",
                self.hops,
                eng.hops()
            )));
        }
        (0..self.hops).try_for_each(|link| self.request_round(eng, link))
    }

    fn on_event(&mut self, eng: &mut Engine, ev: Incoming) -> Result<Option<BellPair>, SimError> {
        match ev {
            Incoming::PairReady { link, pair } => {
                let l = &mut self.links[link];
                l.heralded.push(pair);
                if l.heralded.len() == self.mode.pairs_per_round() {
                    self.round_complete(eng, link)
                } else {
                    Ok(None)
                }
            }
            Incoming::Message { msg, .. } => match msg {
                Message::PurifyResult { link, .. } => self.purify_result(eng, link),
                Message::NcxForward { link } => self.ncx_forward(eng, link).map(|_| None),
                Message::NcxBackward { link } => self.ncx_backward(eng, link),
                Message::SwapOutcome { .. } => {
                    self.awaiting -= 1;
                    self.advance(eng)
                }
                Message::EndPurifyResult { .. } => Ok(None),
            },
            Incoming::LocalOp { .. } => Ok(None),
        }
    }
}
