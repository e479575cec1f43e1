use rand::Rng;

use crate::device::{Basis, Device};
use crate::error::SimError;
use crate::pair::Half;
use crate::pauli::PauliOp;
use crate::steane;

/// Bell-state measurement on two halves held at the same node.
///
/// Returns the error carried by the Pauli correction that the far end must
/// apply: the Z part comes from the first readout, the X part from the second.
pub fn bell_measurement<R: Rng>(dev: &mut Device<R>, left: &Half, right: &Half) -> Result<PauliOp, SimError> {
    match (left, right) {
        (Half::Physical(l), Half::Physical(r)) => {
            dev.cnot(*l, *r)?;
            dev.h(*l);
            let z = dev.measure(*l, Basis::Z);
            let x = dev.measure(*r, Basis::Z);
            Ok(PauliOp::from_bits(x, z))
        }
        (Half::Logical(l), Half::Logical(r)) => {
            steane::transversal_cnot(dev, l, r)?;
            let z = steane::measure_logical(dev, l, Basis::X);
            let x = steane::measure_logical(dev, r, Basis::Z);
            Ok(PauliOp::from_bits(x, z))
        }
        _ => Err(SimError::Protocol(
            "Bell measurement across a physical and a logical half".into(),
        )),
    }
}
