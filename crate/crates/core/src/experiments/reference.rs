//! Published reference values (measured and simulated), for side-by-side
//! comparison with this simulator's output. The measured (`EXP`) values
//! come from hardware runs and cannot be reproduced by any configuration.

use std::sync::OnceLock;

use serde::Deserialize;

use crate::decode::StratumRates;
use crate::experiments::table::Metric;

const CSV: &str = include_str!("../../../../docs/reference_values.csv");

#[derive(Clone, Debug, PartialEq, Deserialize)]
pub struct ReferenceValue {
    pub protocol: String,
    pub mode: String,
    pub metric: Metric,
    pub stratum: Option<String>,
    /// `EXP`, `SIM` or `IMP`.
    pub source: String,
    /// `main` for the headline summary, `detail` for the per-circuit
    /// breakdown, which in a few places disagrees with the summary.
    pub set: String,
    pub percent: f64,
    /// `point`, or `upper` for values only bounded from above.
    pub bound: String,
}

impl ReferenceValue {
    pub fn fraction(&self) -> f64 {
        self.percent / 100.0
    }
}

pub fn reference_values() -> &'static [ReferenceValue] {
    static VALUES: OnceLock<Vec<ReferenceValue>> = OnceLock::new();
    VALUES.get_or_init(|| {
        csv::Reader::from_reader(CSV.as_bytes())
            .deserialize()
            .collect::<Result<_, _>>()
            .expect("bundled reference table parses")
    })
}

/// Headline value of a row, as a fraction.
pub fn lookup(protocol: &str, mode: &str, metric: Metric, stratum: Option<&str>, source: &str) -> Option<f64> {
    reference_values()
        .iter()
        .find(|v| {
            v.set == "main"
                && v.protocol == protocol
                && v.mode == mode
                && v.metric == metric
                && v.stratum.as_deref() == stratum
                && v.source == source
        })
        .map(ReferenceValue::fraction)
}

/// Per-stratum round-one occurrence and conditional error rates, and the
/// round-two conditional error rates, for `source`.
pub fn conditional_rates(source: &str) -> Option<StratumRates> {
    let get = |mode: &str, metric: Metric| -> Option<[f64; 4]> {
        let mut out = [0.0; 4];
        for (k, s) in ["00", "10", "11", "01"].into_iter().enumerate() {
            out[k] = lookup("shor", mode, metric, Some(s), source)?;
        }
        Some(out)
    };
    Some(StratumRates {
        mu1: get("round1", Metric::Mu)?,
        lambda1: get("round1", Metric::Lambda)?,
        lambda2: get("round2", Metric::Lambda)?,
    })
}
