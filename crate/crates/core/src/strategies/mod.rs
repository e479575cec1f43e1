//! The six end-to-end distribution strategies.
//!
//! | strategy    | link level                       | end nodes              | QNIC budget (end / intermediate) |
//! |-------------|----------------------------------|------------------------|----------------------------------|
//! | `0G`        | one raw pair                     | -                      | 1+0 / 1+0                        |
//! | `1G`        | Ss-Dp                            | -                      | 3+0 / 3+0                        |
//! | `E2E-1G`    | one raw pair                     | Ss-Dp on three 0G pairs| 3+0 / 1+0                        |
//! | `2G`        | 7 teleported CNOTs, Steane blocks| -                      | 7+7 / 7+7                        |
//! | `HG-PE`     | Ss-Dp, then local encoding       | -                      | 3+6 / 3+6                        |
//! | `E2E-HG-PE` | one raw pair                     | Ss-Dp, then encoding   | 3+6 / 1+0                        |
//!
//! Budgets are (external + internal) qubits per QNIC.

mod chain;

pub use chain::{Chain, LinkMode};

use std::fmt;
use std::str::FromStr;

use crate::engine::{trial_rng, Engine, LinkEnd, Message, SlotBudget, SlotKind, TrialRng};
use crate::error::SimError;
use crate::noise::SimParams;
use crate::pair::{BellPair, PairEnds};
use crate::pauli::{canonical_one_sided, PauliOp};
use crate::purification;
use crate::steane::{self, BLOCK_LEN};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyId {
    ZeroG,
    OneG,
    E2eOneG,
    TwoG,
    HgPe,
    E2eHgPe,
}

impl StrategyId {
    pub const ALL: [StrategyId; 6] = [
        StrategyId::ZeroG,
        StrategyId::OneG,
        StrategyId::E2eOneG,
        StrategyId::TwoG,
        StrategyId::HgPe,
        StrategyId::E2eHgPe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            StrategyId::ZeroG => "0G",
            StrategyId::OneG => "1G",
            StrategyId::E2eOneG => "E2E-1G",
            StrategyId::TwoG => "2G",
            StrategyId::HgPe => "HG-PE",
            StrategyId::E2eHgPe => "E2E-HG-PE",
        }
    }

    pub fn end_budget(self) -> SlotBudget {
        match self {
            StrategyId::ZeroG => SlotBudget::new(1, 0),
            StrategyId::OneG | StrategyId::E2eOneG => SlotBudget::new(3, 0),
            StrategyId::TwoG => SlotBudget::new(7, 7),
            StrategyId::HgPe | StrategyId::E2eHgPe => SlotBudget::new(3, 6),
        }
    }

    pub fn intermediate_budget(self) -> SlotBudget {
        match self {
            StrategyId::E2eOneG | StrategyId::E2eHgPe => SlotBudget::new(1, 0),
            s => s.end_budget(),
        }
    }

    /// Whether delivered pairs are Steane-encoded.
    pub fn is_logical(self) -> bool {
        matches!(self, StrategyId::TwoG | StrategyId::HgPe | StrategyId::E2eHgPe)
    }
}

impl fmt::Display for StrategyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyId {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        StrategyId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                SimError::Config {
                    key: "strategy".into(),
                    reason: format!("unknown strategy {s:?}; expected one of 0G, 1G, E2E-1G, 2G, HG-PE, E2E-HG-PE or all"),
                }
            })
    }
}

/// One end-to-end pair, evaluated at the moment it was handed over.
#[derive(Debug, Clone, PartialEq)]
pub struct DeliveryResult {
    pub strategy: StrategyId,
    pub residual_class: PauliOp,
    pub started_at: f64,
    pub delivered_at: f64,
    /// Link-level pairs heralded on each link for this delivery.
    pub pairs_consumed_per_link: Vec<u32>,
    /// End-to-end pairs fed into end-node purification.
    pub e2e_pairs_consumed: u32,
}

impl DeliveryResult {
    pub fn latency(&self) -> f64 {
        self.delivered_at - self.started_at
    }

    pub fn is_perfect(&self) -> bool {
        self.residual_class.is_identity()
    }
}

/// Peak slot usage of one QNIC during a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QnicUsage {
    pub node: usize,
    pub link: usize,
    pub end: LinkEnd,
    pub peak: SlotBudget,
    pub budget: SlotBudget,
}

#[derive(Debug, Clone)]
pub struct Trial {
    pub delivery: DeliveryResult,
    pub usage: Vec<QnicUsage>,
}

impl Trial {
    pub fn usage_matches_budget(&self) -> bool {
        self.usage.iter().all(|u| u.peak == u.budget)
    }
}

pub fn new_engine(strategy: StrategyId, params: &SimParams, rng: TrialRng) -> Result<Engine, SimError> {
    Engine::new(params, strategy.end_budget(), strategy.intermediate_budget(), rng)
}

/// Serves one end-to-end request starting at the engine's current time.
///
/// On return every slot is free again and no event is pending.
pub fn deliver(eng: &mut Engine, strategy: StrategyId) -> Result<DeliveryResult, SimError> {
    let started_at = eng.now();
    let before = eng.link_pairs_generated().to_vec();
    let hops = eng.hops();
    let (pair, e2e) = match strategy {
        StrategyId::ZeroG => (eng.run(&mut Chain::new(LinkMode::Raw, hops))?, 0),
        StrategyId::OneG => (eng.run(&mut Chain::new(LinkMode::Purified, hops))?, 0),
        StrategyId::TwoG => (eng.run(&mut Chain::new(LinkMode::Ncx, hops))?, 0),
        StrategyId::HgPe => (eng.run(&mut Chain::new(LinkMode::PurifiedEncoded, hops))?, 0),
        StrategyId::E2eOneG => end_to_end(eng, false)?,
        StrategyId::E2eHgPe => end_to_end(eng, true)?,
    };
    let residual_class = finalize(eng, &pair)?;
    eng.topology().audit_all_free()?;
    if eng.pending_events() != 0 {
        return Err(SimError::Protocol(format!(
            "{} events left after delivery",
            eng.pending_events()
        )));
    }
    let pairs_consumed_per_link = eng
        .link_pairs_generated()
        .iter()
        .zip(&before)
        .map(|(a, b)| a - b)
        .collect();
    Ok(DeliveryResult {
        strategy,
        residual_class,
        started_at,
        delivered_at: eng.now(),
        pairs_consumed_per_link,
        e2e_pairs_consumed: e2e,
    })
}

/// Three sequential 0G deliveries, Ss-Dp at the end nodes, optionally
/// followed by encoding both ends. Retries from scratch on failure.
fn end_to_end(eng: &mut Engine, encode: bool) -> Result<(BellPair, u32), SimError> {
    let hops = eng.hops();
    let mut used = 0;
    let kept = loop {
        let mut pairs = Vec::with_capacity(3);
        for _ in 0..3 {
            pairs.push(eng.run(&mut Chain::new(LinkMode::Raw, hops))?);
            used += 1;
        }
        let out = purification::ss_dp(eng.device(), &pairs)?;
        eng.log("local-op", 0, || format!("end ss-dp success={}", out.success));
        eng.exchange(0, hops, Message::EndPurifyResult { success: out.success })?;
        for p in pairs.iter().filter(|p| out.consumed.contains(&p.id)) {
            eng.topology_mut().release_all(&p.slots())?;
        }
        if let Some(k) = out.kept {
            break k;
        }
    };
    if !encode {
        return Ok((kept, used));
    }
    let (l, r) = kept.physical_slots()?;
    let topo = eng.topology();
    let (q_l, q_r) = (topo.qnic(0, LinkEnd::Left), topo.qnic(hops - 1, LinkEnd::Right));
    let anc_l = eng.topology_mut().allocate_many(q_l, SlotKind::Internal, BLOCK_LEN - 1)?;
    let anc_r = eng.topology_mut().allocate_many(q_r, SlotKind::Internal, BLOCK_LEN - 1)?;
    let left = steane::encode_from_physical(eng.device(), l, &anc_l)?;
    let right = steane::encode_from_physical(eng.device(), r, &anc_r)?;
    let id = eng.allocate_pair_id();
    let pair = BellPair {
        id,
        ends: PairEnds::Logical { left, right },
        created_at: eng.now(),
        ..kept
    };
    Ok((pair, used))
}

/// Hands the pair over: memory decay up to now, ideal evaluation, slots freed.
fn finalize(eng: &mut Engine, pair: &BellPair) -> Result<PauliOp, SimError> {
    let slots = pair.slots();
    let dev = eng.device();
    for &s in &slots {
        dev.apply_memory_decay(s);
    }
    let class = match pair.ends {
        PairEnds::Physical { .. } => canonical_one_sided(pair.error(dev.frame())?),
        PairEnds::Logical { left, right } => steane::residual_logical_class(dev.frame(), &left, &right),
    };
    for &s in &slots {
        dev.discard(s);
    }
    eng.topology_mut().release_all(&slots)?;
    Ok(class)
}

fn usage(eng: &Engine) -> Vec<QnicUsage> {
    eng.topology()
        .qnics()
        .iter()
        .map(|q| QnicUsage {
            node: q.node,
            link: q.link,
            end: q.end,
            peak: q.peak(),
            budget: q.budget,
        })
        .collect()
}

/// Runs one independent trial on a fresh chain.
pub fn run_trial(strategy: StrategyId, params: &SimParams, rng: TrialRng) -> Result<Trial, SimError> {
    let mut eng = new_engine(strategy, params, rng)?;
    let delivery = deliver(&mut eng, strategy)?;
    Ok(Trial {
        delivery,
        usage: usage(&eng),
    })
}

/// Trial `index` of a run seeded with `seed`.
pub fn run_indexed(strategy: StrategyId, params: &SimParams, seed: u64, index: u64) -> Result<Trial, SimError> {
    run_trial(strategy, params, trial_rng(seed, index))
}

/// Runs one trial and returns its event trace alongside the result.
pub fn run_traced(strategy: StrategyId, params: &SimParams, rng: TrialRng) -> Result<(Trial, Vec<String>), SimError> {
    let mut eng = new_engine(strategy, params, rng)?;
    eng.enable_trace();
    let delivery = deliver(&mut eng, strategy)?;
    let trial = Trial {
        delivery,
        usage: usage(&eng),
    };
    Ok((trial, eng.take_trace()))
}

pub fn run_0g(params: &SimParams, rng: TrialRng) -> Result<DeliveryResult, SimError> {
    run_trial(StrategyId::ZeroG, params, rng).map(|t| t.delivery)
}

pub fn run_1g(params: &SimParams, rng: TrialRng) -> Result<DeliveryResult, SimError> {
    run_trial(StrategyId::OneG, params, rng).map(|t| t.delivery)
}

pub fn run_e2e_1g(params: &SimParams, rng: TrialRng) -> Result<DeliveryResult, SimError> {
    run_trial(StrategyId::E2eOneG, params, rng).map(|t| t.delivery)
}

pub fn run_2g(params: &SimParams, rng: TrialRng) -> Result<DeliveryResult, SimError> {
    run_trial(StrategyId::TwoG, params, rng).map(|t| t.delivery)
}

pub fn run_hg_pe(params: &SimParams, rng: TrialRng) -> Result<DeliveryResult, SimError> {
    run_trial(StrategyId::HgPe, params, rng).map(|t| t.delivery)
}

pub fn run_e2e_hg_pe(params: &SimParams, rng: TrialRng) -> Result<DeliveryResult, SimError> {
    run_trial(StrategyId::E2eHgPe, params, rng).map(|t| t.delivery)
}
