//! Decoders for logical-ancilla extraction, direct preparation and the
//! two-block Bell state.

use serde::{Deserialize, Serialize};

use crate::circuit::Block;
use crate::code::{
    correction_tables, decode_x_readout, decode_z_readout, x_readout_syndrome,
    z_readout_syndrome, PauliMask,
};
use crate::decode::DecodeOutcome;
use crate::engine::ShotRecord;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AncillaKind {
    Plus,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteaneMode {
    /// Correct the data with the ancilla syndrome.
    Feedback,
    /// Ignore the ancilla.
    Disturbance,
    /// Keep shots with a trivial ancilla syndrome.
    PsAncilla,
    /// Keep shots with a trivial data syndrome.
    PsData,
    /// Keep shots with both syndromes trivial.
    PsJoint,
}

impl SteaneMode {
    pub const ALL: [SteaneMode; 5] = [
        SteaneMode::Feedback,
        SteaneMode::Disturbance,
        SteaneMode::PsAncilla,
        SteaneMode::PsData,
        SteaneMode::PsJoint,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SteaneMode::Feedback => "feedback",
            SteaneMode::Disturbance => "disturbance",
            SteaneMode::PsAncilla => "ps_ancilla",
            SteaneMode::PsData => "ps_data",
            SteaneMode::PsJoint => "ps_joint",
        }
    }

    pub fn is_postselected(self) -> bool {
        matches!(self, SteaneMode::PsAncilla | SteaneMode::PsData | SteaneMode::PsJoint)
    }
}

/// Decodes data block `|0_L>` read out in Z next to a 9-ion ancilla block.
/// For a `|0_L>` ancilla, ancilla post-selection also requires the
/// ancilla's own logical readout to be 0.
pub fn decode_steane(record: &ShotRecord, ancilla: AncillaKind, mode: SteaneMode) -> Result<DecodeOutcome> {
    let data = record.code_bits(Block::Data)?;
    let anc = record.code_bits(Block::Ancilla)?;
    let s_anc = z_readout_syndrome(anc);
    let s_data = z_readout_syndrome(data);
    let path = vec![s_anc, s_data];
    let ancilla_ok = s_anc.is_trivial() && (ancilla == AncillaKind::Plus || !decode_z_readout(anc));
    let keep = match mode {
        SteaneMode::Feedback | SteaneMode::Disturbance => true,
        SteaneMode::PsAncilla => ancilla_ok,
        SteaneMode::PsData => s_data.is_trivial(),
        SteaneMode::PsJoint => ancilla_ok && s_data.is_trivial(),
    };
    if !keep {
        return Ok(DecodeOutcome::rejected(path));
    }
    let correction = if mode == SteaneMode::Feedback {
        correction_tables().single_shot_round1.correction(s_anc)
    } else {
        PauliMask::IDENTITY
    };
    Ok(DecodeOutcome::kept(decode_z_readout(data ^ correction.x_bits), path, correction))
}

/// Direct `|0_L>` preparation: majority vote, optionally keeping only
/// trivial data syndromes.
pub fn decode_direct(record: &ShotRecord, postselect: bool) -> Result<DecodeOutcome> {
    let data = record.code_bits(Block::Data)?;
    let s = z_readout_syndrome(data);
    if postselect && !s.is_trivial() {
        return Ok(DecodeOutcome::rejected(vec![s]));
    }
    Ok(DecodeOutcome::kept(decode_z_readout(data), vec![s], PauliMask::IDENTITY))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BellBasis {
    #[serde(rename = "zz")]
    ZZ,
    #[serde(rename = "xx")]
    XX,
}

/// Decodes both blocks independently; an error is odd joint parity. With
/// `postselect`, both block syndromes must be trivial.
pub fn decode_bell(record: &ShotRecord, basis: BellBasis, postselect: bool) -> Result<DecodeOutcome> {
    let a = record.code_bits(Block::Data)?;
    let b = record.code_bits(Block::Ancilla)?;
    let (decode, syndrome): (fn(u16) -> bool, fn(u16) -> _) = match basis {
        BellBasis::ZZ => (decode_z_readout, z_readout_syndrome),
        BellBasis::XX => (decode_x_readout, x_readout_syndrome),
    };
    let path = vec![syndrome(a), syndrome(b)];
    if postselect && !(path[0].is_trivial() && path[1].is_trivial()) {
        return Ok(DecodeOutcome::rejected(path));
    }
    Ok(DecodeOutcome::kept(decode(a) ^ decode(b), path, PauliMask::IDENTITY))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::bit;
    use std::collections::BTreeMap;

    fn record(data: u16, anc: u16) -> ShotRecord {
        ShotRecord {
            shot: 0,
            blocks: BTreeMap::from([(Block::Data, data), (Block::Ancilla, anc)]),
            block_sizes: BTreeMap::from([(Block::Data, 9), (Block::Ancilla, 9)]),
            fault_log: None,
            phonon_trace: None,
        }
    }

    #[test]
    fn clean_pair_accepted_everywhere() {
        let r = record(0, bit(1) | bit(2));
        for kind in [AncillaKind::Plus, AncillaKind::Zero] {
            for mode in SteaneMode::ALL {
                let o = decode_steane(&r, kind, mode).unwrap();
                assert!(o.accepted && !o.logical_error, "{mode:?}");
            }
        }
    }

    #[test]
    fn copied_error_is_corrected_or_rejected() {
        // X3 on data before the CNOT shows up on both blocks.
        let r = record(bit(3), bit(3));
        let fb = decode_steane(&r, AncillaKind::Plus, SteaneMode::Feedback).unwrap();
        assert!(fb.accepted && !fb.logical_error);
        assert_eq!(fb.correction.x_bits.count_ones(), 1);
        assert!(!decode_steane(&r, AncillaKind::Plus, SteaneMode::PsAncilla).unwrap().accepted);
        assert!(!decode_steane(&r, AncillaKind::Plus, SteaneMode::PsData).unwrap().accepted);
    }

    #[test]
    fn zero_ancilla_logical_check() {
        // Ancilla with all rows odd: trivial syndrome but Z_L = 1.
        let r = record(0, bit(1) | bit(4) | bit(7));
        assert!(decode_steane(&r, AncillaKind::Plus, SteaneMode::PsAncilla).unwrap().accepted);
        assert!(!decode_steane(&r, AncillaKind::Zero, SteaneMode::PsAncilla).unwrap().accepted);
    }

    #[test]
    fn bell_parity() {
        assert!(!decode_bell(&record(0, 0), BellBasis::ZZ, false).unwrap().logical_error);
        let one = bit(1) | bit(4) | bit(7);
        assert!(!decode_bell(&record(one, one), BellBasis::ZZ, true).unwrap().logical_error);
        let r = record(bit(2), 0);
        let ec = decode_bell(&r, BellBasis::ZZ, false).unwrap();
        assert!(ec.accepted && !ec.logical_error);
        assert!(!decode_bell(&r, BellBasis::ZZ, true).unwrap().accepted);
        // Column 1 all ones is a logical X readout of 1 on one block only.
        let col = bit(1) | bit(4) | bit(7);
        assert!(!decode_bell(&record(col, 0), BellBasis::XX, false).unwrap().logical_error);
        assert!(decode_bell(&record(bit(1), 0), BellBasis::XX, false).unwrap().accepted);
    }

    #[test]
    fn direct_modes() {
        let r = record(bit(5), 0);
        assert!(!decode_direct(&r, false).unwrap().logical_error);
        assert!(!decode_direct(&r, true).unwrap().accepted);
    }
}
