//! Entanglement purification circuits on physical pairs.
//!
//! X-purification: at each node the kept half controls a CNOT onto the
//! sacrifice half, and the sacrifice halves are measured in Z. Z-purification
//! reverses the CNOT and measures in X. Ss-Dp runs both against two separate
//! sacrifices and accepts only if both parity checks pass in the same round.
//!
//! These functions only perform the local operations and measurements. The
//! classical exchange of outcomes and slot release are scheduled by the engine.

use rand::Rng;

use crate::device::{Basis, Device};
use crate::error::SimError;
use crate::pair::{BellPair, PairId};

#[derive(Debug, Clone, PartialEq)]
pub struct PurifyOutcome {
    pub success: bool,
    pub kept: Option<BellPair>,
    pub consumed: Vec<PairId>,
}

fn check_span(pairs: &[&BellPair]) -> Result<(), SimError> {
    let span = pairs[0].span();
    if let Some(p) = pairs.iter().find(|p| p.span() != span) {
        return Err(SimError::Protocol(format!(
            "pair {} spans {:?}, expected {:?}",
            p.id,
            p.span(),
            span
        )));
    }
    for p in pairs {
        p.physical_slots()?;
    }
    Ok(())
}

fn finish<R: Rng>(dev: &mut Device<R>, kept: &BellPair, success: bool, mut consumed: Vec<PairId>) -> PurifyOutcome {
    if success {
        PurifyOutcome {
            success,
            kept: Some(*kept),
            consumed,
        }
    } else {
        for s in kept.slots() {
            dev.discard(s);
        }
        consumed.insert(0, kept.id);
        PurifyOutcome {
            success,
            kept: None,
            consumed,
        }
    }
}

/// Bilateral CNOT kept → sacrifice.
fn x_check<R: Rng>(dev: &mut Device<R>, kept: &BellPair, sac: &BellPair) -> Result<(), SimError> {
    let (kl, kr) = kept.physical_slots()?;
    let (sl, sr) = sac.physical_slots()?;
    dev.cnot(kl, sl)?;
    dev.cnot(kr, sr)
}

fn z_check<R: Rng>(dev: &mut Device<R>, kept: &BellPair, sac: &BellPair) -> Result<(), SimError> {
    let (kl, kr) = kept.physical_slots()?;
    let (sl, sr) = sac.physical_slots()?;
    dev.cnot(sl, kl)?;
    dev.cnot(sr, kr)
}

fn read_parity<R: Rng>(dev: &mut Device<R>, sac: &BellPair, basis: Basis) -> Result<bool, SimError> {
    let (sl, sr) = sac.physical_slots()?;
    let a = dev.measure(sl, basis);
    let b = dev.measure(sr, basis);
    Ok(a == b)
}

pub fn x_purify<R: Rng>(dev: &mut Device<R>, kept: &BellPair, sacrifice: &BellPair) -> Result<PurifyOutcome, SimError> {
    check_span(&[kept, sacrifice])?;
    x_check(dev, kept, sacrifice)?;
    let ok = read_parity(dev, sacrifice, Basis::Z)?;
    Ok(finish(dev, kept, ok, vec![sacrifice.id]))
}

pub fn z_purify<R: Rng>(dev: &mut Device<R>, kept: &BellPair, sacrifice: &BellPair) -> Result<PurifyOutcome, SimError> {
    check_span(&[kept, sacrifice])?;
    z_check(dev, kept, sacrifice)?;
    let ok = read_parity(dev, sacrifice, Basis::X)?;
    Ok(finish(dev, kept, ok, vec![sacrifice.id]))
}

/// Ss-Dp on `[kept, x_sacrifice, z_sacrifice]`.
pub fn ss_dp<R: Rng>(dev: &mut Device<R>, pairs: &[BellPair]) -> Result<PurifyOutcome, SimError> {
    let [kept, x_sac, z_sac] = pairs else {
        return Err(SimError::Protocol(format!(
            "Ss-Dp needs exactly 3 pairs, got {}",
            pairs.len()
        )));
    };
    check_span(&[kept, x_sac, z_sac])?;
    x_check(dev, kept, x_sac)?;
    z_check(dev, kept, z_sac)?;
    let x_ok = read_parity(dev, x_sac, Basis::Z)?;
    let z_ok = read_parity(dev, z_sac, Basis::X)?;
    Ok(finish(dev, kept, x_ok && z_ok, vec![x_sac.id, z_sac.id]))
}
