//! Exhaustive Bell-class enumeration.
//!
//! Independent of the frame simulator: every input is a Bell-diagonal
//! distribution over the four one-sided Pauli classes, and every protocol
//! is evaluated by enumerating all input class combinations with noiseless
//! operations. Works over any [`Field`], so tables can be computed exactly with
//! rationals or in floating point.

use crate::pauli::PauliOp;
use crate::scalar::Field;

/// Probabilities of the classes `I, X, Z, Y`, indexed by [`PauliOp::index`].
#[derive(Debug, Clone, PartialEq)]
pub struct BellDiagonal<T> {
    probs: [T; 4],
}

fn three<T: Field>() -> T {
    T::one() + T::one() + T::one()
}

impl<T: Field> BellDiagonal<T> {
    pub fn new(probs: [T; 4]) -> Self {
        BellDiagonal { probs }
    }

    /// Werner state of fidelity `f`: the three error classes share `1 − f`.
    pub fn werner(f: T) -> Self {
        let q = (T::one() - f.clone()) / three::<T>();
        BellDiagonal {
            probs: [f, q.clone(), q.clone(), q],
        }
    }

    pub fn perfect() -> Self {
        BellDiagonal {
            probs: [T::one(), T::zero(), T::zero(), T::zero()],
        }
    }

    pub fn prob(&self, p: PauliOp) -> T {
        self.probs[p.index()].clone()
    }

    pub fn probs(&self) -> &[T; 4] {
        &self.probs
    }

    pub fn fidelity(&self) -> T {
        self.prob(PauliOp::I)
    }

    pub fn total(&self) -> T {
        self.probs.iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    /// Class distribution after a noiseless entanglement swap.
    pub fn swap(&self, other: &Self) -> Self {
        let mut out = [T::zero(), T::zero(), T::zero(), T::zero()];
        for a in PauliOp::ALL {
            for b in PauliOp::ALL {
                let k = (a * b).index();
                out[k] = out[k].clone() + self.prob(a) * other.prob(b);
            }
        }
        BellDiagonal { probs: out }
    }

    /// Independent depolarizing of both halves with strength `p`.
    pub fn depolarize_both_ends(&self, p: T) -> Self {
        let one_end = BellDiagonal::werner(T::one() - p);
        self.swap(&one_end).swap(&one_end)
    }

    pub fn total_variation(&self, other: &Self) -> T {
        let two = T::one() + T::one();
        let sum = PauliOp::ALL.iter().fold(T::zero(), |acc, &p| {
            let (a, b) = (self.prob(p), other.prob(p));
            acc + if a > b { a - b } else { b - a }
        });
        sum / two
    }
}

/// Outcome table of a purification round.
#[derive(Debug, Clone, PartialEq)]
pub struct PurifyTable<T> {
    pub success: T,
    /// Kept-pair distribution conditioned on success.
    pub output: BellDiagonal<T>,
}

impl<T: Field> PurifyTable<T> {
    fn from_joint(joint: [T; 4]) -> Self {
        let success = joint.iter().cloned().fold(T::zero(), |a, b| a + b);
        let output = if success == T::zero() {
            BellDiagonal::new(joint)
        } else {
            BellDiagonal::new(joint.map(|p| p / success.clone()))
        };
        PurifyTable { success, output }
    }
}

/// Kept pair controls a bilateral CNOT onto the sacrifice, which is measured
/// in Z: the X components of the two pairs are compared and the sacrifice's Z
/// component is copied onto the kept pair.
pub fn x_purify<T: Field>(kept: &BellDiagonal<T>, sacrifice: &BellDiagonal<T>) -> PurifyTable<T> {
    let mut joint = [T::zero(), T::zero(), T::zero(), T::zero()];
    for k in PauliOp::ALL {
        for s in PauliOp::ALL {
            if k.has_x() != s.has_x() {
                continue;
            }
            let out = PauliOp::from_bits(k.has_x(), k.has_z() ^ s.has_z()).index();
            joint[out] = joint[out].clone() + kept.prob(k) * sacrifice.prob(s);
        }
    }
    PurifyTable::from_joint(joint)
}

/// Sacrifice controls a bilateral CNOT onto the kept pair and is measured in
/// X: Z components are compared and the sacrifice's X component is copied.
pub fn z_purify<T: Field>(kept: &BellDiagonal<T>, sacrifice: &BellDiagonal<T>) -> PurifyTable<T> {
    let mut joint = [T::zero(), T::zero(), T::zero(), T::zero()];
    for k in PauliOp::ALL {
        for s in PauliOp::ALL {
            if k.has_z() != s.has_z() {
                continue;
            }
            let out = PauliOp::from_bits(k.has_x() ^ s.has_x(), k.has_z()).index();
            joint[out] = joint[out].clone() + kept.prob(k) * sacrifice.prob(s);
        }
    }
    PurifyTable::from_joint(joint)
}

/// Single-selection double purification: X check against `x_sacrifice` and Z
/// check against `z_sacrifice`, accepted only if both pass in the same round.
pub fn ss_dp<T: Field>(
    kept: &BellDiagonal<T>,
    x_sacrifice: &BellDiagonal<T>,
    z_sacrifice: &BellDiagonal<T>,
) -> PurifyTable<T> {
    let mut joint = [T::zero(), T::zero(), T::zero(), T::zero()];
    for k in PauliOp::ALL {
        for s2 in PauliOp::ALL {
            if k.has_x() != s2.has_x() {
                continue;
            }
            let z_after = k.has_z() ^ s2.has_z();
            for s3 in PauliOp::ALL {
                if z_after != s3.has_z() {
                    continue;
                }
                let out = PauliOp::from_bits(k.has_x() ^ s3.has_x(), z_after).index();
                joint[out] =
                    joint[out].clone() + kept.prob(k) * x_sacrifice.prob(s2) * z_sacrifice.prob(s3);
            }
        }
    }
    PurifyTable::from_joint(joint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    type Q = Ratio<i64>;

    fn q(n: i64, d: i64) -> Q {
        Ratio::new(n, d)
    }

    #[test]
    fn werner_is_normalized() {
        let w = BellDiagonal::werner(q(9, 10));
        assert_eq!(w.total(), q(1, 1));
        assert_eq!(w.prob(PauliOp::Y), q(1, 30));
    }

    #[test]
    fn swap_of_werner_pairs_exact() {
        // F' = F1 F2 + (1 − F1)(1 − F2)/3
        let a = BellDiagonal::werner(q(9, 10));
        let b = BellDiagonal::werner(q(4, 5));
        let s = a.swap(&b);
        assert_eq!(s.fidelity(), q(9, 10) * q(4, 5) + q(1, 10) * q(1, 5) / q(3, 1));
        assert_eq!(s.total(), q(1, 1));
    }

    #[test]
    fn single_error_purification_cases() {
        let perfect = BellDiagonal::<Q>::perfect();
        let only = |p: PauliOp| {
            let mut v = [q(0, 1); 4];
            v[p.index()] = q(1, 1);
            BellDiagonal::new(v)
        };
        assert_eq!(x_purify(&perfect, &perfect).success, q(1, 1));
        assert_eq!(x_purify(&only(PauliOp::X), &perfect).success, q(0, 1));
        let t = x_purify(&only(PauliOp::Z), &perfect);
        assert_eq!(t.success, q(1, 1));
        assert_eq!(t.output.prob(PauliOp::Z), q(1, 1));
        assert_eq!(z_purify(&only(PauliOp::Z), &perfect).success, q(0, 1));
        assert_eq!(z_purify(&only(PauliOp::X), &perfect).output.prob(PauliOp::X), q(1, 1));
        assert_eq!(ss_dp(&only(PauliOp::Y), &perfect, &perfect).success, q(0, 1));
        assert_eq!(ss_dp(&perfect, &perfect, &perfect).success, q(1, 1));
    }

    #[test]
    fn ss_dp_improves_werner_inputs() {
        for f in [0.6, 0.7, 0.8, 0.9, 0.95] {
            let w = BellDiagonal::werner(f);
            let t = ss_dp(&w, &w, &w);
            assert!(t.output.fidelity() > f, "F = {f}");
            assert!((t.output.total() - 1.0f64).abs() < 1e-12);
        }
    }

    #[test]
    fn float_and_exact_agree() {
        let fe = BellDiagonal::werner(q(19, 20));
        let te = ss_dp(&fe, &fe, &fe);
        let ff = BellDiagonal::werner(0.95f64);
        let tf = ss_dp(&ff, &ff, &ff);
        let to_f = |r: &Q| *r.numer() as f64 / *r.denom() as f64;
        assert!((to_f(&te.success) - tf.success).abs() < 1e-12);
        for p in PauliOp::ALL {
            assert!((to_f(&te.output.prob(p)) - tf.output.prob(p)).abs() < 1e-12);
        }
    }

    #[test]
    fn depolarized_pair_matches_closed_form() {
        let d = BellDiagonal::<f64>::perfect().depolarize_both_ends(0.0736);
        assert!((d.fidelity() - ((1.0 - 0.0736f64).powi(2) + 0.0736f64.powi(2) / 3.0)).abs() < 1e-12);
    }
}
