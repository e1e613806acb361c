//! Syndrome-conditioned statistics for bare-ancilla extraction and the
//! adaptive logical error rate formulas built from them.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::circuit::Block;
use crate::code::{correction_tables, decode_z_readout, Syndrome};
use crate::decode::shor::shor_round_syndrome;
use crate::engine::ShotRecord;
use crate::error::{Error, Result};
use crate::stats::{estimate_ci, EstimateCI, Interval};

pub const BOOTSTRAP_RESAMPLES: usize = 10_000;
pub const BOOTSTRAP_SEED: u64 = 0x5eed_b007;

/// Which combination of conditional rates to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Combination {
    /// Single-shot: every stratum corrected from round one.
    Ss,
    /// Adaptive I: every nontrivial stratum uses round two.
    A1,
    /// Adaptive II: only stratum 01 uses round two.
    A2,
}

impl Combination {
    pub const ALL: [Combination; 3] = [Combination::Ss, Combination::A1, Combination::A2];

    pub fn name(self) -> &'static str {
        match self {
            Combination::Ss => "single_shot",
            Combination::A1 => "adaptive1",
            Combination::A2 => "adaptive2",
        }
    }

    /// Whether stratum `s` (index into [`Syndrome::STRATA`]) draws its
    /// rate from round two.
    pub fn uses_round_two(self, s: usize) -> bool {
        match self {
            Combination::Ss => false,
            Combination::A1 => s != 0,
            Combination::A2 => s == 3,
        }
    }
}

/// Counts from one experiment, grouped by the first-round syndrome.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundCounts {
    pub shots: u64,
    pub occurrences: [u64; 4],
    /// Logical errors after correcting with the last round's syndrome.
    pub corrected_errors: [u64; 4],
    /// Logical errors from the majority vote alone.
    pub raw_errors: [u64; 4],
}

impl RoundCounts {
    pub fn merge(&mut self, other: &RoundCounts) {
        self.shots += other.shots;
        for s in 0..4 {
            self.occurrences[s] += other.occurrences[s];
            self.corrected_errors[s] += other.corrected_errors[s];
            self.raw_errors[s] += other.raw_errors[s];
        }
    }

    pub fn mu(&self, s: usize) -> Result<EstimateCI> {
        estimate_ci(self.occurrences[s], self.shots, 0.95)
    }

    /// `None` when no shot fell into stratum `s`.
    pub fn lambda(&self, s: usize) -> Result<Option<EstimateCI>> {
        self.conditional(self.corrected_errors[s], s)
    }

    pub fn delta(&self, s: usize) -> Result<Option<EstimateCI>> {
        self.conditional(self.raw_errors[s], s)
    }

    fn conditional(&self, k: u64, s: usize) -> Result<Option<EstimateCI>> {
        match self.occurrences[s] {
            0 => Ok(None),
            n => estimate_ci(k, n, 0.95).map(Some),
        }
    }

    fn rates(&self, counts: &[u64; 4]) -> [f64; 4] {
        std::array::from_fn(|s| match self.occurrences[s] {
            0 => 0.0,
            n => counts[s] as f64 / n as f64,
        })
    }
}

/// Per-stratum `mu`, `lambda`, `delta` for one- and two-round extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionalTable {
    pub round1: RoundCounts,
    pub round2: RoundCounts,
}

/// Plain per-stratum rates, ordered as [`Syndrome::STRATA`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StratumRates {
    pub mu1: [f64; 4],
    pub lambda1: [f64; 4],
    pub lambda2: [f64; 4],
}

impl StratumRates {
    pub fn combine(&self, variant: Combination) -> f64 {
        combine_rates(&self.mu1, &self.lambda1, &self.lambda2, variant)
    }
}

/// `sum_s mu1(s) * lambda_r(s)`, with `r` chosen per stratum by `variant`.
pub fn combine_rates(mu1: &[f64; 4], lambda1: &[f64; 4], lambda2: &[f64; 4], variant: Combination) -> f64 {
    (0..4)
        .map(|s| mu1[s] * if variant.uses_round_two(s) { lambda2[s] } else { lambda1[s] })
        .sum()
}

/// Counts for one experiment. Round 1 corrects with the first syndrome,
/// round 2 with the second.
pub fn tally_round(records: &[ShotRecord], round: u8) -> Result<RoundCounts> {
    let tables = correction_tables();
    let mut c = RoundCounts::default();
    for r in records {
        let first = shor_round_syndrome(r, 1)?;
        let correction = if round == 1 {
            tables.single_shot_round1.correction(first)
        } else {
            tables.adaptive_round2.correction(shor_round_syndrome(r, 2)?)
        };
        let data = r.code_bits(Block::Data)?;
        let s = first.stratum();
        c.shots += 1;
        c.occurrences[s] += 1;
        c.corrected_errors[s] += decode_z_readout(data ^ correction.x_bits) as u64;
        c.raw_errors[s] += decode_z_readout(data) as u64;
    }
    Ok(c)
}

/// Tallies one-round records `e1` and two-round records `e2`.
pub fn build_conditional_table(e1: &[ShotRecord], e2: &[ShotRecord]) -> Result<ConditionalTable> {
    Ok(ConditionalTable {
        round1: tally_round(e1, 1)?,
        round2: tally_round(e2, 2)?,
    })
}

impl ConditionalTable {
    pub fn rates(&self) -> StratumRates {
        let mu1 = std::array::from_fn(|s| match self.round1.shots {
            0 => 0.0,
            n => self.round1.occurrences[s] as f64 / n as f64,
        });
        StratumRates {
            mu1,
            lambda1: self.round1.rates(&self.round1.corrected_errors),
            lambda2: self.round2.rates(&self.round2.corrected_errors),
        }
    }

    /// Disturbance: `sum_s mu_r(s) delta_r(s)`, which is the raw error
    /// fraction of round `r`.
    pub fn disturbance(&self, round: u8) -> Result<EstimateCI> {
        let c = if round == 1 { &self.round1 } else { &self.round2 };
        estimate_ci(c.raw_errors.iter().sum(), c.shots, 0.95)
    }

    fn check_complete(&self, variant: Combination) -> Result<()> {
        if self.round1.shots == 0 {
            return Err(Error::InvalidArgument("no one-round shots".into()));
        }
        for s in 0..4 {
            if variant.uses_round_two(s) && self.round1.occurrences[s] > 0 && self.round2.occurrences[s] == 0 {
                return Err(Error::InvalidArgument(format!(
                    "stratum {} has no two-round shots",
                    Syndrome::STRATA[s]
                )));
            }
        }
        Ok(())
    }
}

fn resample_rate(rng: &mut ChaCha8Rng, n: u64, p: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    Binomial::new(n, p).expect("probability in range").sample(rng) as f64 / n as f64
}

/// Multinomial draw by sequential conditional binomials.
fn resample_occurrences(rng: &mut ChaCha8Rng, n: u64, mu: &[f64; 4]) -> [u64; 4] {
    let mut out = [0; 4];
    let (mut left, mut mass) = (n, 1.0);
    for s in 0..3 {
        let p = if mass > 0.0 { (mu[s] / mass).clamp(0.0, 1.0) } else { 0.0 };
        out[s] = Binomial::new(left, p).expect("probability in range").sample(rng);
        left -= out[s];
        mass -= mu[s];
    }
    out[3] = left;
    out
}

/// Evaluates a combination and a 95% percentile bootstrap interval. Each
/// resample redraws the stratum populations of round one and every
/// stratum's error count from its own binomial.
pub fn combine_adaptive_ler(table: &ConditionalTable, variant: Combination) -> Result<Interval> {
    table.check_complete(variant)?;
    let rates = table.rates();
    let point = rates.combine(variant);
    let mut rng = ChaCha8Rng::seed_from_u64(BOOTSTRAP_SEED);
    let mut samples: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| {
            let occ = resample_occurrences(&mut rng, table.round1.shots, &rates.mu1);
            let n1 = table.round1.shots as f64;
            let mu1 = occ.map(|k| k as f64 / n1);
            let lambda1 = std::array::from_fn(|s| resample_rate(&mut rng, occ[s], rates.lambda1[s]));
            let lambda2 = std::array::from_fn(|s| {
                resample_rate(&mut rng, table.round2.occurrences[s], rates.lambda2[s])
            });
            combine_rates(&mu1, &lambda1, &lambda2, variant)
        })
        .collect();
    samples.sort_by(f64::total_cmp);
    let at = |q: f64| samples[((q * (samples.len() - 1) as f64).round() as usize).min(samples.len() - 1)];
    Ok(Interval {
        point,
        lo: at(0.025).min(point),
        hi: at(0.975).max(point),
    })
}
