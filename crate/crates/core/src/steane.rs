//! The [[7,1,3]] Steane code.
//!
//! Qubit positions `0..7` inside a block follow the Hamming check matrix whose
//! column `j` is the binary expansion of `j + 1`. The same matrix gives the X-
//! and Z-type stabilizers, so a weight-1 error at position `j` always has
//! syndrome `j + 1` and classical Hamming decoding of transversal measurement
//! results corrects it.
//!
//! Encoding circuits (gates listed in execution order):
//!
//! | circuit        | gates                                                         | touches |
//! |----------------|---------------------------------------------------------------|---------|
//! | `|0⟩_L`        | H 0,1,3; CX 0→2,0→4,0→6; CX 1→2,1→5,1→6; CX 3→4,3→5,3→6       | 21      |
//! | arbitrary      | CX 2→4, 2→5; then the `|0⟩_L` circuit (data on position 2)    | 25      |
//! | `|+⟩_L`        | H 2; then the arbitrary-state circuit                         | 26      |
//!
//! Position 2 carries the data qubit because `{2,4,5}` is a weight-3 logical
//! X representative that avoids the pivot positions 0, 1 and 3.

use rand::Rng;

use crate::device::{Basis, Device};
use crate::error::SimError;
use crate::pauli::{canonical_one_sided, PairError, PauliFrame, PauliOp, SlotId};

pub const BLOCK_LEN: usize = 7;

/// Position of the data qubit in the arbitrary-state encoder.
pub const DATA_POSITION: usize = 2;

/// A 7-bit string, bit `j` holding position `j`.
pub type Bits7 = u8;

const MASK7: u8 = 0x7f;

/// The 3×7 parity-check matrix of the [7,4] Hamming code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HammingCheckMatrix {
    rows: [Bits7; 3],
}

impl Default for HammingCheckMatrix {
    fn default() -> Self {
        let mut rows = [0u8; 3];
        for (b, row) in rows.iter_mut().enumerate() {
            for j in 0..BLOCK_LEN {
                if ((j + 1) >> b) & 1 == 1 {
                    *row |= 1 << j;
                }
            }
        }
        HammingCheckMatrix { rows }
    }
}

impl HammingCheckMatrix {
    pub fn rows(&self) -> [Bits7; 3] {
        self.rows
    }

    /// Column `j` as a 3-bit integer.
    pub fn column(&self, j: usize) -> u8 {
        (0..3).fold(0, |acc, b| acc | (((self.rows[b] >> j) & 1) << b))
    }

    pub fn syndrome(&self, bits: Bits7) -> Syndrome {
        let mut s = 0u8;
        for (b, row) in self.rows.iter().enumerate() {
            s |= (((bits & row).count_ones() & 1) as u8) << b;
        }
        Syndrome(s)
    }
}

/// A 3-bit syndrome; `0` means no correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Syndrome(u8);

impl Syndrome {
    pub fn value(self) -> u8 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Hamming-corrects a 7-bit measurement string.
pub fn classical_correct(bits: Bits7, h: &HammingCheckMatrix) -> (Bits7, Syndrome) {
    let bits = bits & MASK7;
    let s = h.syndrome(bits);
    if s.is_zero() {
        (bits, s)
    } else {
        (bits ^ (1 << (s.value() - 1)), s)
    }
}

fn parity(bits: Bits7) -> bool {
    bits.count_ones() & 1 == 1
}

/// Decodes an error pattern and returns whether a logical flip remains.
fn decode_flip(bits: Bits7, h: &HammingCheckMatrix) -> bool {
    parity(classical_correct(bits, h).0)
}

/// One Steane-encoded qubit, stored on seven slots of one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LogicalQubit {
    pub slots: [SlotId; BLOCK_LEN],
}

impl LogicalQubit {
    pub fn new(slots: &[SlotId]) -> Result<Self, SimError> {
        let slots: [SlotId; BLOCK_LEN] = slots.try_into().map_err(|_| {
            SimError::Resource(format!("a Steane block needs 7 slots, got {}", slots.len()))
        })?;
        for i in 0..BLOCK_LEN {
            if slots[i + 1..].contains(&slots[i]) {
                return Err(SimError::Resource(format!(
                    "slot {} appears twice in a block",
                    slots[i]
                )));
            }
        }
        Ok(LogicalQubit { slots })
    }

    /// X and Z error patterns on the block.
    pub fn error_bits(&self, frame: &PauliFrame) -> (Bits7, Bits7) {
        let mut x = 0u8;
        let mut z = 0u8;
        for (j, &s) in self.slots.iter().enumerate() {
            let p = frame.get(s);
            x |= (p.has_x() as u8) << j;
            z |= (p.has_z() as u8) << j;
        }
        (x, z)
    }

    /// Logical class left after ideal syndrome extraction and correction.
    pub fn logical_class(&self, frame: &PauliFrame) -> PauliOp {
        let h = HammingCheckMatrix::default();
        let (x, z) = self.error_bits(frame);
        PauliOp::from_bits(decode_flip(x, &h), decode_flip(z, &h))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Gate {
    H(usize),
    Cx(usize, usize),
}

pub(crate) const ZERO_ENCODER: [Gate; 12] = [
    Gate::H(0),
    Gate::H(1),
    Gate::H(3),
    Gate::Cx(0, 2),
    Gate::Cx(0, 4),
    Gate::Cx(0, 6),
    Gate::Cx(1, 2),
    Gate::Cx(1, 5),
    Gate::Cx(1, 6),
    Gate::Cx(3, 4),
    Gate::Cx(3, 5),
    Gate::Cx(3, 6),
];

pub(crate) const DATA_SPREAD: [Gate; 2] = [Gate::Cx(2, 4), Gate::Cx(2, 5)];

/// Number of qubit-gate incidences in a gate list.
#[cfg(test)]
pub(crate) fn touches(gates: &[Gate]) -> usize {
    gates
        .iter()
        .map(|g| match g {
            Gate::H(_) => 1,
            Gate::Cx(..) => 2,
        })
        .sum()
}

fn run_gates<R: Rng>(dev: &mut Device<R>, block: &LogicalQubit, gates: &[Gate]) -> Result<(), SimError> {
    for g in gates {
        match *g {
            Gate::H(q) => dev.h(block.slots[q]),
            Gate::Cx(c, t) => dev.cnot(block.slots[c], block.slots[t])?,
        }
    }
    Ok(())
}

/// Prepares `|0⟩_L` on seven fresh slots.
pub fn encode_zero<R: Rng>(dev: &mut Device<R>, slots: &[SlotId]) -> Result<LogicalQubit, SimError> {
    let block = LogicalQubit::new(slots)?;
    for &s in &block.slots {
        dev.init_qubit(s);
    }
    run_gates(dev, &block, &ZERO_ENCODER)?;
    Ok(block)
}

/// Prepares `|+⟩_L` on seven fresh slots.
pub fn encode_plus<R: Rng>(dev: &mut Device<R>, slots: &[SlotId]) -> Result<LogicalQubit, SimError> {
    let block = LogicalQubit::new(slots)?;
    for &s in &block.slots {
        dev.init_qubit(s);
    }
    dev.h(block.slots[DATA_POSITION]);
    run_gates(dev, &block, &DATA_SPREAD)?;
    run_gates(dev, &block, &ZERO_ENCODER)?;
    Ok(block)
}

/// Encodes the state of `data` into a block together with six fresh ancillas.
///
/// Any error already present on `data` is carried into the block and becomes a
/// logical error.
pub fn encode_from_physical<R: Rng>(
    dev: &mut Device<R>,
    data: SlotId,
    ancillas: &[SlotId],
) -> Result<LogicalQubit, SimError> {
    if ancillas.len() != BLOCK_LEN - 1 {
        return Err(SimError::Resource(format!(
            "arbitrary-state encoding needs 6 ancillas, got {}",
            ancillas.len()
        )));
    }
    let mut slots = [0; BLOCK_LEN];
    let mut it = ancillas.iter();
    for (j, s) in slots.iter_mut().enumerate() {
        *s = if j == DATA_POSITION {
            data
        } else {
            *it.next().expect("six ancillas")
        };
    }
    let block = LogicalQubit::new(&slots)?;
    for &a in ancillas {
        dev.init_qubit(a);
    }
    run_gates(dev, &block, &DATA_SPREAD)?;
    run_gates(dev, &block, &ZERO_ENCODER)?;
    Ok(block)
}

/// Transversal CNOT between two blocks.
pub fn transversal_cnot<R: Rng>(
    dev: &mut Device<R>,
    control: &LogicalQubit,
    target: &LogicalQubit,
) -> Result<(), SimError> {
    for j in 0..BLOCK_LEN {
        dev.cnot(control.slots[j], target.slots[j])?;
    }
    Ok(())
}

/// Transversal logical Pauli correction: a physical gate on every qubit of the
/// block whenever the reported correction is not the identity. `error` is the
/// logical operator left behind by wrong outcome reports.
pub fn transversal_correction<R: Rng>(dev: &mut Device<R>, block: &LogicalQubit, error: PauliOp) {
    let ideal = PauliOp::from_index(dev.rng().random_range(0..4));
    if !(ideal * error).is_identity() {
        for &s in &block.slots {
            dev.pauli_gate(s);
        }
    }
    if !error.is_identity() {
        for &s in &block.slots {
            dev.inject(s, error);
        }
    }
}

/// Measures a block transversally and decodes the 7 outcomes.
///
/// Returns whether the decoded logical outcome differs from the noiseless one.
pub fn measure_logical<R: Rng>(dev: &mut Device<R>, block: &LogicalQubit, basis: Basis) -> bool {
    let mut bits = 0u8;
    for (j, &s) in block.slots.iter().enumerate() {
        bits |= (dev.measure(s, basis) as u8) << j;
    }
    decode_flip(bits, &HammingCheckMatrix::default())
}

/// Logical Bell class of a delivered logical pair under ideal decoding of
/// each block at its own node.
pub fn residual_logical_class(frame: &PauliFrame, left: &LogicalQubit, right: &LogicalQubit) -> PauliOp {
    canonical_one_sided(PairError::new(
        left.logical_class(frame),
        right.logical_class(frame),
    ))
}
