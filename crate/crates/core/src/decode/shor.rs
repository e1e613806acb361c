//! Decoders for bare-ancilla syndrome extraction on `|0_L>`.

use serde::{Deserialize, Serialize};

use crate::circuit::Block;
use crate::code::{correction_tables, decode_z_readout, PauliMask, Syndrome};
use crate::decode::DecodeOutcome;
use crate::engine::ShotRecord;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdaptiveVariant {
    /// Second round whenever the first syndrome is nontrivial.
    I,
    /// Second round only for first syndrome 01.
    II,
    /// As `II`, but only the S1 outcome of the second round is used.
    S1Only,
}

/// `(s1, s2)` read from the ancillas of round 1 or 2.
pub fn shor_round_syndrome(record: &ShotRecord, round: u8) -> Result<Syndrome> {
    let (b1, b2) = match round {
        1 => (Block::S1Round1, Block::S2Round1),
        2 => (Block::S1Round2, Block::S2Round2),
        _ => return Err(Error::InvalidArgument(format!("no extraction round {round}"))),
    };
    Ok(Syndrome::z(record.bit(b1)?, record.bit(b2)?))
}

fn corrected_error(record: &ShotRecord, correction: PauliMask) -> Result<bool> {
    let data = record.code_bits(Block::Data)?;
    Ok(decode_z_readout(data ^ correction.x_bits))
}

/// Corrects with the first-round syndrome straight away.
pub fn decode_shor_single_shot(record: &ShotRecord) -> Result<DecodeOutcome> {
    let s = shor_round_syndrome(record, 1)?;
    let correction = correction_tables().single_shot_round1.correction(s);
    Ok(DecodeOutcome::kept(corrected_error(record, correction)?, vec![s], correction))
}

/// Majority vote on the data alone, ignoring the ancillas.
pub fn decode_shor_disturbance(record: &ShotRecord) -> Result<DecodeOutcome> {
    let s = shor_round_syndrome(record, 1)?;
    Ok(DecodeOutcome::kept(corrected_error(record, PauliMask::IDENTITY)?, vec![s], PauliMask::IDENTITY))
}

/// Keeps only shots whose first syndrome is trivial.
pub fn decode_shor_detection(record: &ShotRecord) -> Result<DecodeOutcome> {
    let s = shor_round_syndrome(record, 1)?;
    if !s.is_trivial() {
        return Ok(DecodeOutcome::rejected(vec![s]));
    }
    Ok(DecodeOutcome::kept(corrected_error(record, PauliMask::IDENTITY)?, vec![s], PauliMask::IDENTITY))
}

pub fn needs_second_round(first: Syndrome, variant: AdaptiveVariant) -> bool {
    match variant {
        AdaptiveVariant::I => !first.is_trivial(),
        AdaptiveVariant::II | AdaptiveVariant::S1Only => first == Syndrome::z(false, true),
    }
}

/// Adaptive decoding from a one-round record `e1` and, when the first
/// syndrome calls for it, a two-round record `e2` with the same first-round
/// syndrome. Branches resolved in round one decode `e1`; the others decode
/// `e2` with its second-round syndrome.
pub fn decode_shor_adaptive(
    e1: &ShotRecord,
    e2: Option<&ShotRecord>,
    variant: AdaptiveVariant,
) -> Result<DecodeOutcome> {
    let tables = correction_tables();
    let first = shor_round_syndrome(e1, 1)?;
    if !needs_second_round(first, variant) {
        let correction = match variant {
            AdaptiveVariant::I => PauliMask::IDENTITY,
            _ => tables.adaptive2_round1.correction(first),
        };
        return Ok(DecodeOutcome::kept(corrected_error(e1, correction)?, vec![first], correction));
    }
    let e2 = e2.ok_or_else(|| {
        Error::MalformedRecord(format!("syndrome {first} needs a second-round record"))
    })?;
    let paired_first = shor_round_syndrome(e2, 1)?;
    if paired_first != first {
        return Err(Error::MalformedRecord(format!(
            "paired record has first syndrome {paired_first}, expected {first}"
        )));
    }
    let second = shor_round_syndrome(e2, 2)?;
    let lookup = match variant {
        // Only S1 is repeated; S2 is known to have fired.
        AdaptiveVariant::S1Only => Syndrome::z(second.s1, true),
        _ => second,
    };
    let correction = tables.adaptive_round2.correction(lookup);
    Ok(DecodeOutcome::kept(
        corrected_error(e2, correction)?,
        vec![first, second],
        correction,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{bit, PauliMask};
    use std::collections::BTreeMap;

    fn record(data: u16, r1: (bool, bool), r2: Option<(bool, bool)>) -> ShotRecord {
        let mut blocks = BTreeMap::from([
            (Block::Data, data),
            (Block::S1Round1, (r1.0 as u16) << 1),
            (Block::S2Round1, (r1.1 as u16) << 1),
        ]);
        let mut sizes = BTreeMap::from([(Block::Data, 9), (Block::S1Round1, 1), (Block::S2Round1, 1)]);
        if let Some((a, b)) = r2 {
            blocks.insert(Block::S1Round2, (a as u16) << 1);
            blocks.insert(Block::S2Round2, (b as u16) << 1);
            sizes.insert(Block::S1Round2, 1);
            sizes.insert(Block::S2Round2, 1);
        }
        ShotRecord {
            shot: 0,
            blocks,
            block_sizes: sizes,
            fault_log: None,
            phonon_trace: None,
        }
    }

    #[test]
    fn trivial_shot() {
        let r = record(0, (false, false), None);
        let o = decode_shor_single_shot(&r).unwrap();
        assert!(o.accepted && !o.logical_error);
        assert_eq!(o.correction, PauliMask::IDENTITY);
    }

    #[test]
    fn single_shot_corrects_row_three_error() {
        // X7 before extraction: readout has qubit 7 flipped, syndrome 01.
        let r = record(bit(7), (false, true), None);
        let o = decode_shor_single_shot(&r).unwrap();
        assert!(!o.logical_error);
        assert_eq!(o.syndrome_path, vec![Syndrome::z(false, true)]);
    }

    #[test]
    fn internal_error_defeats_single_shot_only() {
        // X5 after S1 but before S2 is measured: data shows X5, syndrome 01.
        let e1 = record(bit(5), (false, true), None);
        assert!(decode_shor_single_shot(&e1).unwrap().logical_error);
        // A second round sees the settled syndrome 11.
        let e2 = record(bit(5), (false, true), Some((true, true)));
        let o = decode_shor_adaptive(&e2, Some(&e2), AdaptiveVariant::II).unwrap();
        assert!(!o.logical_error);
        let o = decode_shor_adaptive(&e2, Some(&e2), AdaptiveVariant::S1Only).unwrap();
        assert!(!o.logical_error);
    }

    #[test]
    fn adaptive_branches() {
        let e1 = record(0, (false, false), None);
        assert!(!decode_shor_adaptive(&e1, None, AdaptiveVariant::I).unwrap().logical_error);
        let flagged = record(0, (false, true), None);
        assert!(decode_shor_adaptive(&flagged, None, AdaptiveVariant::II).is_err());
        let other = record(0, (true, false), Some((false, false)));
        assert!(decode_shor_adaptive(&flagged, Some(&other), AdaptiveVariant::II).is_err());
        // Measurement error on s1 in round one: variant II applies X1, harmless.
        let m = record(0, (true, false), None);
        assert!(!decode_shor_adaptive(&m, None, AdaptiveVariant::II).unwrap().logical_error);
        assert!(needs_second_round(Syndrome::z(true, false), AdaptiveVariant::I));
        assert!(!needs_second_round(Syndrome::z(true, false), AdaptiveVariant::II));
    }

    #[test]
    fn detection_rejects_nontrivial() {
        assert!(!decode_shor_detection(&record(0, (true, false), None)).unwrap().accepted);
        assert!(decode_shor_detection(&record(0, (false, false), None)).unwrap().accepted);
        assert!(decode_shor_disturbance(&record(bit(1) | bit(4), (true, true), None)).unwrap().logical_error);
    }

    #[test]
    fn malformed_record() {
        let mut r = record(0, (false, false), None);
        r.blocks.remove(&Block::S2Round1);
        assert!(decode_shor_single_shot(&r).is_err());
    }
}
