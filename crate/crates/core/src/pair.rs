use crate::error::SimError;
use crate::pauli::{PairError, PauliFrame, SlotId};
use crate::steane::LogicalQubit;

pub type PairId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairKind {
    Physical,
    Logical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairEnds {
    Physical { left: SlotId, right: SlotId },
    Logical { left: LogicalQubit, right: LogicalQubit },
}

/// One end of a pair, as held at a single node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Half {
    Physical(SlotId),
    Logical(LogicalQubit),
}

impl Half {
    pub fn slots(&self) -> Vec<SlotId> {
        match self {
            Half::Physical(s) => vec![*s],
            Half::Logical(b) => b.slots.to_vec(),
        }
    }
}

/// A live entangled resource between two nodes of the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellPair {
    pub id: PairId,
    pub left_node: usize,
    pub right_node: usize,
    pub ends: PairEnds,
    pub created_at: f64,
}

impl BellPair {
    pub fn physical(id: PairId, nodes: (usize, usize), slots: (SlotId, SlotId), created_at: f64) -> Self {
        BellPair {
            id,
            left_node: nodes.0,
            right_node: nodes.1,
            ends: PairEnds::Physical {
                left: slots.0,
                right: slots.1,
            },
            created_at,
        }
    }

    pub fn from_halves(
        id: PairId,
        nodes: (usize, usize),
        left: Half,
        right: Half,
        created_at: f64,
    ) -> Result<Self, SimError> {
        let ends = match (left, right) {
            (Half::Physical(left), Half::Physical(right)) => PairEnds::Physical { left, right },
            (Half::Logical(left), Half::Logical(right)) => PairEnds::Logical { left, right },
            _ => {
                return Err(SimError::Protocol(format!(
                    "pair {id} would join a physical and a logical half"
                )))
            }
        };
        Ok(BellPair {
            id,
            left_node: nodes.0,
            right_node: nodes.1,
            ends,
            created_at,
        })
    }

    pub fn halves(&self) -> (Half, Half) {
        match self.ends {
            PairEnds::Physical { left, right } => (Half::Physical(left), Half::Physical(right)),
            PairEnds::Logical { left, right } => (Half::Logical(left), Half::Logical(right)),
        }
    }

    pub fn kind(&self) -> PairKind {
        match self.ends {
            PairEnds::Physical { .. } => PairKind::Physical,
            PairEnds::Logical { .. } => PairKind::Logical,
        }
    }

    pub fn span(&self) -> (usize, usize) {
        (self.left_node, self.right_node)
    }

    pub fn physical_slots(&self) -> Result<(SlotId, SlotId), SimError> {
        match self.ends {
            PairEnds::Physical { left, right } => Ok((left, right)),
            PairEnds::Logical { .. } => Err(SimError::Protocol(format!(
                "pair {} is logical where a physical pair is required",
                self.id
            ))),
        }
    }

    pub fn slots(&self) -> Vec<SlotId> {
        match self.ends {
            PairEnds::Physical { left, right } => vec![left, right],
            PairEnds::Logical { left, right } => left.slots.iter().chain(right.slots.iter()).copied().collect(),
        }
    }

    /// Two-sided error of a physical pair.
    pub fn error(&self, frame: &PauliFrame) -> Result<PairError, SimError> {
        let (l, r) = self.physical_slots()?;
        Ok(PairError::new(frame.get(l), frame.get(r)))
    }
}
