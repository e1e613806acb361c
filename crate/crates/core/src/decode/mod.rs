//! Classical post-processing of shot records.

pub mod conditional;
pub mod shor;
pub mod steane;

use serde::{Deserialize, Serialize};

use crate::code::{PauliMask, Syndrome};
use crate::stats::{estimate_ci, EstimateCI};
use crate::error::Result;

pub use conditional::{
    build_conditional_table, combine_adaptive_ler, combine_rates, Combination, ConditionalTable, RoundCounts,
    StratumRates,
};
pub use shor::{
    decode_shor_adaptive, decode_shor_detection, decode_shor_disturbance,
    decode_shor_single_shot, needs_second_round, shor_round_syndrome, AdaptiveVariant,
};
pub use steane::{decode_bell, decode_direct, decode_steane, AncillaKind, BellBasis, SteaneMode};

/// Result of decoding one shot. A rejected shot makes no claim about
/// logical error, so `logical_error` is `false` whenever `accepted` is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub accepted: bool,
    pub logical_error: bool,
    pub syndrome_path: Vec<Syndrome>,
    pub correction: PauliMask,
}

impl DecodeOutcome {
    pub fn kept(logical_error: bool, syndrome_path: Vec<Syndrome>, correction: PauliMask) -> Self {
        DecodeOutcome {
            accepted: true,
            logical_error,
            syndrome_path,
            correction,
        }
    }

    pub fn rejected(syndrome_path: Vec<Syndrome>) -> Self {
        DecodeOutcome {
            accepted: false,
            logical_error: false,
            syndrome_path,
            correction: PauliMask::IDENTITY,
        }
    }

    /// `Some(error)` for accepted shots, `None` for rejected ones.
    pub fn verdict(&self) -> Option<bool> {
        self.accepted.then_some(self.logical_error)
    }
}

/// Counts over a population of decoded shots. Merging is plain addition.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub shots: u64,
    pub accepted: u64,
    pub errors: u64,
}

impl Tally {
    pub fn add(&mut self, outcome: &DecodeOutcome) {
        self.shots += 1;
        if outcome.accepted {
            self.accepted += 1;
            self.errors += outcome.logical_error as u64;
        }
    }

    pub fn merge(self, other: Tally) -> Tally {
        Tally {
            shots: self.shots + other.shots,
            accepted: self.accepted + other.accepted,
            errors: self.errors + other.errors,
        }
    }

    pub fn from_outcomes<'a>(outcomes: impl IntoIterator<Item = &'a DecodeOutcome>) -> Tally {
        let mut t = Tally::default();
        for o in outcomes {
            t.add(o);
        }
        t
    }

    /// Logical error rate among accepted shots.
    pub fn ler(&self) -> Result<EstimateCI> {
        estimate_ci(self.errors, self.accepted, 0.95)
    }

    /// Fraction of shots rejected.
    pub fn rejection_rate(&self) -> Result<EstimateCI> {
        estimate_ci(self.shots - self.accepted, self.shots, 0.95)
    }
}
