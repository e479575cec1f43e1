//! Phase-free Pauli algebra and Pauli-frame propagation through CNOT and H.
//!
//! Every error channel in the simulator is a stochastic Pauli channel, so the
//! state of any qubit register is described (up to sign) by a single Pauli
//! error relative to the ideal state. Phases are dropped everywhere and `Y` is
//! treated as the formal product `XZ`.

use std::fmt;
use std::ops::Mul;

use crate::error::SimError;

/// Index of a physical qubit slot in a trial.
pub type SlotId = usize;

/// A single-qubit Pauli operator with the phase discarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum PauliOp {
    #[default]
    I,
    X,
    Z,
    Y,
}

impl PauliOp {
    pub const ALL: [PauliOp; 4] = [PauliOp::I, PauliOp::X, PauliOp::Z, PauliOp::Y];
    pub const NON_IDENTITY: [PauliOp; 3] = [PauliOp::X, PauliOp::Y, PauliOp::Z];

    /// Builds the operator from its symplectic bits.
    pub const fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliOp::I,
            (true, false) => PauliOp::X,
            (false, true) => PauliOp::Z,
            (true, true) => PauliOp::Y,
        }
    }

    pub const fn has_x(self) -> bool {
        matches!(self, PauliOp::X | PauliOp::Y)
    }

    pub const fn has_z(self) -> bool {
        matches!(self, PauliOp::Z | PauliOp::Y)
    }

    pub const fn is_identity(self) -> bool {
        matches!(self, PauliOp::I)
    }

    /// Dense index `x + 2z`, used by distribution tables.
    pub const fn index(self) -> usize {
        (self.has_x() as usize) | ((self.has_z() as usize) << 1)
    }

    pub const fn from_index(i: usize) -> Self {
        Self::from_bits(i & 1 == 1, i & 2 == 2)
    }

    /// Conjugation by a Hadamard gate: swaps the X and Z components.
    pub const fn hadamard(self) -> Self {
        Self::from_bits(self.has_z(), self.has_x())
    }
}

impl fmt::Display for PauliOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PauliOp::I => "I",
            PauliOp::X => "X",
            PauliOp::Z => "Z",
            PauliOp::Y => "Y",
        };
        f.write_str(s)
    }
}

/// Group product ignoring phase.
pub const fn pauli_mul(a: PauliOp, b: PauliOp) -> PauliOp {
    PauliOp::from_bits(a.has_x() ^ b.has_x(), a.has_z() ^ b.has_z())
}

impl Mul for PauliOp {
    type Output = PauliOp;

    fn mul(self, rhs: PauliOp) -> PauliOp {
        pauli_mul(self, rhs)
    }
}

/// Label of the four Bell states reached from `|Φ+⟩` by a one-sided Pauli.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellBasisLabel {
    PhiPlus,
    PsiPlus,
    PhiMinus,
    PsiMinus,
}

/// `I→Φ+`, `X→Ψ+`, `Z→Φ−`, `Y→Ψ−`.
pub const fn bell_class(p: PauliOp) -> BellBasisLabel {
    match p {
        PauliOp::I => BellBasisLabel::PhiPlus,
        PauliOp::X => BellBasisLabel::PsiPlus,
        PauliOp::Z => BellBasisLabel::PhiMinus,
        PauliOp::Y => BellBasisLabel::PsiMinus,
    }
}

/// Residual error on the two ends of a Bell pair, relative to `|Φ+⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PairError {
    pub left: PauliOp,
    pub right: PauliOp,
}

impl PairError {
    pub const fn new(left: PauliOp, right: PauliOp) -> Self {
        PairError { left, right }
    }

    /// The equivalent one-sided error `(left · right, I)`.
    pub const fn canonical(self) -> PairError {
        PairError::new(canonical_one_sided(self), PauliOp::I)
    }
}

/// Reduces a two-sided pair error to its Bell class.
///
/// `P ⊗ P` stabilizes `|Φ+⟩` for every Pauli `P` (phases dropped), so the pair
/// error only matters through the product of its two ends.
pub const fn canonical_one_sided(e: PairError) -> PauliOp {
    pauli_mul(e.left, e.right)
}

/// Accumulated Pauli error per qubit slot. Slots without an entry carry `I`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PauliFrame {
    errors: Vec<PauliOp>,
}

impl PauliFrame {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(slots: usize) -> Self {
        PauliFrame {
            errors: vec![PauliOp::I; slots],
        }
    }

    pub fn get(&self, slot: SlotId) -> PauliOp {
        self.errors.get(slot).copied().unwrap_or(PauliOp::I)
    }

    pub fn set(&mut self, slot: SlotId, p: PauliOp) {
        if slot >= self.errors.len() {
            if p.is_identity() {
                return;
            }
            self.errors.resize(slot + 1, PauliOp::I);
        }
        self.errors[slot] = p;
    }

    /// Multiplies `p` into the error on `slot`.
    pub fn apply(&mut self, slot: SlotId, p: PauliOp) {
        let cur = self.get(slot);
        self.set(slot, cur * p);
    }

    pub fn clear(&mut self, slot: SlotId) {
        self.set(slot, PauliOp::I);
    }

    /// Slot-wise product of two frames.
    pub fn compose(&self, other: &PauliFrame) -> PauliFrame {
        let n = self.errors.len().max(other.errors.len());
        let mut out = PauliFrame::with_capacity(n);
        for slot in 0..n {
            out.errors[slot] = self.get(slot) * other.get(slot);
        }
        out
    }

    /// True when every slot carries `I`.
    pub fn is_trivial(&self) -> bool {
        self.errors.iter().all(|p| p.is_identity())
    }

    /// Non-identity entries in slot order.
    pub fn support(&self) -> impl Iterator<Item = (SlotId, PauliOp)> + '_ {
        self.errors
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_identity())
            .map(|(s, p)| (s, *p))
    }

    /// Conjugates the frame through `CNOT(control → target)`.
    ///
    /// X on the control spreads to the target and Z on the target spreads to
    /// the control.
    pub fn propagate_cnot(&mut self, control: SlotId, target: SlotId) -> Result<(), SimError> {
        if control == target {
            return Err(SimError::InvalidCircuit(format!(
                "CNOT control and target are both slot {control}"
            )));
        }
        let c = self.get(control);
        let t = self.get(target);
        let new_c = PauliOp::from_bits(c.has_x(), c.has_z() ^ t.has_z());
        let new_t = PauliOp::from_bits(t.has_x() ^ c.has_x(), t.has_z());
        self.set(control, new_c);
        self.set(target, new_t);
        Ok(())
    }

    /// Conjugates the frame through a Hadamard on `slot`.
    pub fn propagate_h(&mut self, slot: SlotId) {
        let p = self.get(slot);
        self.set(slot, p.hadamard());
    }
}

impl FromIterator<(SlotId, PauliOp)> for PauliFrame {
    fn from_iter<I: IntoIterator<Item = (SlotId, PauliOp)>>(iter: I) -> Self {
        let mut frame = PauliFrame::new();
        for (s, p) in iter {
            frame.apply(s, p);
        }
        frame
    }
}

/// Value-semantics form of [`PauliFrame::propagate_cnot`].
pub fn propagate_cnot(
    frame: &PauliFrame,
    control: SlotId,
    target: SlotId,
) -> Result<PauliFrame, SimError> {
    let mut out = frame.clone();
    out.propagate_cnot(control, target)?;
    Ok(out)
}

/// Value-semantics form of [`PauliFrame::propagate_h`].
pub fn propagate_h(frame: &PauliFrame, slot: SlotId) -> PauliFrame {
    let mut out = frame.clone();
    out.propagate_h(slot);
    out
}

#[cfg(test)]
mod tests {
    use super::PauliOp::*;
    use super::*;

    #[test]
    fn multiplication_table() {
        assert_eq!(pauli_mul(X, X), I);
        assert_eq!(pauli_mul(X, Z), Y);
        assert_eq!(pauli_mul(I, Y), Y);
        assert_eq!(pauli_mul(Y, Z), X);
        for p in PauliOp::ALL {
            assert_eq!(p * p, I);
            assert_eq!(p * I, p);
        }
    }

    #[test]
    fn cnot_rules() {
        let f: PauliFrame = [(0, X)].into_iter().collect();
        let out = propagate_cnot(&f, 0, 1).unwrap();
        assert_eq!((out.get(0), out.get(1)), (X, X));

        let f: PauliFrame = [(1, Z)].into_iter().collect();
        let out = propagate_cnot(&f, 0, 1).unwrap();
        assert_eq!((out.get(0), out.get(1)), (Z, Z));

        let f: PauliFrame = [(0, Y)].into_iter().collect();
        let out = propagate_cnot(&f, 0, 1).unwrap();
        assert_eq!((out.get(0), out.get(1)), (Y, X));

        // Z on control and X on target stay put
        let f: PauliFrame = [(0, Z), (1, X)].into_iter().collect();
        assert_eq!(propagate_cnot(&f, 0, 1).unwrap(), f);
    }

    #[test]
    fn cnot_same_slot_is_rejected() {
        let f = PauliFrame::new();
        assert!(matches!(
            propagate_cnot(&f, 3, 3),
            Err(SimError::InvalidCircuit(_))
        ));
    }

    #[test]
    fn hadamard_swaps_x_and_z() {
        for (p, q) in [(X, Z), (Z, X), (Y, Y), (I, I)] {
            let f: PauliFrame = [(2, p)].into_iter().collect();
            assert_eq!(propagate_h(&f, 2).get(2), q);
        }
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical_one_sided(PairError::new(X, X)), I);
        assert_eq!(canonical_one_sided(PairError::new(X, I)), X);
        assert_eq!(canonical_one_sided(PairError::new(X, Z)), Y);
        assert_eq!(bell_class(I), BellBasisLabel::PhiPlus);
        assert_eq!(bell_class(X), BellBasisLabel::PsiPlus);
        assert_eq!(bell_class(Y), BellBasisLabel::PsiMinus);
        assert_eq!(bell_class(Z), BellBasisLabel::PhiMinus);
    }

    #[test]
    fn bell_classes_partition_pair_errors() {
        let mut counts = std::collections::HashMap::new();
        for l in PauliOp::ALL {
            for r in PauliOp::ALL {
                let e = PairError::new(l, r);
                *counts
                    .entry(bell_class(canonical_one_sided(e)))
                    .or_insert(0) += 1;
                // canonicalization is idempotent
                assert_eq!(e.canonical().canonical(), e.canonical());
            }
        }
        assert_eq!(counts.len(), 4);
        assert!(counts.values().all(|&c| c == 4));
    }

    #[test]
    fn canonical_invariant_under_common_factor() {
        for l in PauliOp::ALL {
            for r in PauliOp::ALL {
                for p in PauliOp::ALL {
                    let e = PairError::new(l, r);
                    let e2 = PairError::new(l * p, r * p);
                    assert_eq!(canonical_one_sided(e), canonical_one_sided(e2));
                }
            }
        }
    }

    #[test]
    fn frame_self_composition_is_empty() {
        let f: PauliFrame = [(0, X), (3, Y), (5, Z)].into_iter().collect();
        assert!(f.compose(&f).is_trivial());
    }

    #[derive(Clone, Copy)]
    enum Gate {
        Cnot(usize, usize),
        H(usize),
    }

    fn run(frame: &PauliFrame, circuit: &[Gate]) -> PauliFrame {
        let mut f = frame.clone();
        for g in circuit {
            match *g {
                Gate::Cnot(c, t) => f.propagate_cnot(c, t).unwrap(),
                Gate::H(q) => f.propagate_h(q),
            }
        }
        f
    }

    fn all_frames(n: usize) -> Vec<PauliFrame> {
        (0..4usize.pow(n as u32))
            .map(|mut code| {
                (0..n)
                    .map(|s| {
                        let p = PauliOp::from_index(code % 4);
                        code /= 4;
                        (s, p)
                    })
                    .collect()
            })
            .collect()
    }

    /// Conjugation is linear: exhaustive over all pairs of frames on 3 slots.
    #[test]
    fn propagation_is_linear_on_three_slots() {
        let circuit = [
            Gate::H(0),
            Gate::Cnot(0, 1),
            Gate::Cnot(1, 2),
            Gate::H(2),
            Gate::Cnot(2, 0),
            Gate::H(1),
        ];
        let frames = all_frames(3);
        for f1 in &frames {
            for f2 in &frames {
                let lhs = run(&f1.compose(f2), &circuit);
                let rhs = run(f1, &circuit).compose(&run(f2, &circuit));
                for s in 0..3 {
                    assert_eq!(lhs.get(s), rhs.get(s));
                }
            }
        }
    }
}
