//! Linear chain layout: nodes, QNICs and qubit slots with locking.

use crate::error::SimError;
use crate::pauli::SlotId;

/// Per-QNIC qubit budget as (external, internal).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SlotBudget {
    pub external: usize,
    pub internal: usize,
}

impl SlotBudget {
    pub const fn new(external: usize, internal: usize) -> Self {
        SlotBudget { external, internal }
    }

    pub const fn total(&self) -> usize {
        self.external + self.internal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotKind {
    External,
    Internal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SlotState {
    Free,
    Entangled,
    Locked,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QubitSlot {
    pub id: SlotId,
    pub node: usize,
    pub qnic: usize,
    pub kind: SlotKind,
    pub state: SlotState,
}

/// Which end of a link a QNIC serves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkEnd {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Qnic {
    pub id: usize,
    pub node: usize,
    pub link: usize,
    pub end: LinkEnd,
    pub budget: SlotBudget,
    slots: Vec<SlotId>,
    in_use: SlotBudget,
    peak: SlotBudget,
}

impl Qnic {
    pub fn peak(&self) -> SlotBudget {
        self.peak
    }

    pub fn in_use(&self) -> SlotBudget {
        self.in_use
    }

    pub fn is_end_node(&self, hops: usize) -> bool {
        self.node == 0 || self.node == hops
    }
}

/// A chain of `hops + 1` nodes. End nodes carry one QNIC, intermediate nodes two.
#[derive(Debug, Clone)]
pub struct Topology {
    hops: usize,
    link_length: f64,
    qnics: Vec<Qnic>,
    slots: Vec<QubitSlot>,
}

impl Topology {
    pub fn new(hops: usize, link_length: f64, end: SlotBudget, intermediate: SlotBudget) -> Result<Self, SimError> {
        if hops == 0 {
            return Err(SimError::param("hops", "must be at least 1"));
        }
        let mut topo = Topology {
            hops,
            link_length,
            qnics: Vec::with_capacity(2 * hops),
            slots: Vec::new(),
        };
        for link in 0..hops {
            for (end_side, node) in [(LinkEnd::Left, link), (LinkEnd::Right, link + 1)] {
                let budget = if node == 0 || node == hops { end } else { intermediate };
                let id = topo.qnics.len();
                let mut slots = Vec::with_capacity(budget.total());
                for (kind, n) in [(SlotKind::External, budget.external), (SlotKind::Internal, budget.internal)] {
                    for _ in 0..n {
                        let sid = topo.slots.len();
                        topo.slots.push(QubitSlot {
                            id: sid,
                            node,
                            qnic: id,
                            kind,
                            state: SlotState::Free,
                        });
                        slots.push(sid);
                    }
                }
                topo.qnics.push(Qnic {
                    id,
                    node,
                    link,
                    end: end_side,
                    budget,
                    slots,
                    in_use: SlotBudget::default(),
                    peak: SlotBudget::default(),
                });
            }
        }
        Ok(topo)
    }

    pub fn hops(&self) -> usize {
        self.hops
    }

    pub fn nodes(&self) -> usize {
        self.hops + 1
    }

    pub fn link_length(&self) -> f64 {
        self.link_length
    }

    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    pub fn qnics(&self) -> &[Qnic] {
        &self.qnics
    }

    pub fn slot(&self, id: SlotId) -> &QubitSlot {
        &self.slots[id]
    }

    /// QNIC id serving one end of `link`.
    pub fn qnic(&self, link: usize, end: LinkEnd) -> usize {
        2 * link + if end == LinkEnd::Left { 0 } else { 1 }
    }

    pub fn qnics_at(&self, node: usize) -> impl Iterator<Item = &Qnic> {
        self.qnics.iter().filter(move |q| q.node == node)
    }

    /// Claims a free slot of the given kind on a QNIC.
    pub fn allocate(&mut self, qnic: usize, kind: SlotKind) -> Result<SlotId, SimError> {
        let q = &self.qnics[qnic];
        let sid = q
            .slots
            .iter()
            .copied()
            .find(|&s| self.slots[s].kind == kind && self.slots[s].state == SlotState::Free)
            .ok_or_else(|| {
                SimError::Resource(format!(
                    "QNIC {qnic} (node {}) has no free {kind:?} slot; budget {:?}",
                    q.node, q.budget
                ))
            })?;
        self.slots[sid].state = SlotState::Entangled;
        let q = &mut self.qnics[qnic];
        match kind {
            SlotKind::External => q.in_use.external += 1,
            SlotKind::Internal => q.in_use.internal += 1,
        }
        q.peak.external = q.peak.external.max(q.in_use.external);
        q.peak.internal = q.peak.internal.max(q.in_use.internal);
        Ok(sid)
    }

    pub fn allocate_many(&mut self, qnic: usize, kind: SlotKind, n: usize) -> Result<Vec<SlotId>, SimError> {
        (0..n).map(|_| self.allocate(qnic, kind)).collect()
    }

    /// Marks a slot as busy in a pending operation.
    pub fn lock(&mut self, id: SlotId) -> Result<(), SimError> {
        match self.slots[id].state {
            SlotState::Free => Err(SimError::Resource(format!("cannot lock free slot {id}"))),
            _ => {
                self.slots[id].state = SlotState::Locked;
                Ok(())
            }
        }
    }

    pub fn release(&mut self, id: SlotId) -> Result<(), SimError> {
        let slot = &mut self.slots[id];
        if slot.state == SlotState::Free {
            return Err(SimError::Resource(format!("slot {id} released twice")));
        }
        slot.state = SlotState::Free;
        let q = &mut self.qnics[slot.qnic];
        match slot.kind {
            SlotKind::External => q.in_use.external -= 1,
            SlotKind::Internal => q.in_use.internal -= 1,
        }
        Ok(())
    }

    pub fn release_all(&mut self, ids: &[SlotId]) -> Result<(), SimError> {
        ids.iter().try_for_each(|&s| self.release(s))
    }

    pub fn busy_slots(&self) -> Vec<SlotId> {
        self.slots
            .iter()
            .filter(|s| s.state != SlotState::Free)
            .map(|s| s.id)
            .collect()
    }

    /// Fails if any slot is still claimed.
    pub fn audit_all_free(&self) -> Result<(), SimError> {
        let busy = self.busy_slots();
        if busy.is_empty() {
            Ok(())
        } else {
            Err(SimError::Resource(format!("slots still in use at trial end: {busy:?}")))
        }
    }

    pub fn reset_peaks(&mut self) {
        for q in &mut self.qnics {
            q.peak = q.in_use;
        }
    }
}
