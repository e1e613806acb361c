//! Calibrated noise parameters and their JSON configuration format.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuit::{GateDurations, Ion};
use crate::error::{check_probability, Error, Result};

/// Highest ion label any experiment uses.
pub const MAX_ION: Ion = 18;

/// Per-pair probability: either one value for every pair or a symmetric
/// matrix indexed by ion label (row and column 0 unused).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PairTable {
    Uniform(f64),
    Matrix(Vec<Vec<f64>>),
}

impl PairTable {
    pub fn get(&self, i: Ion, j: Ion) -> f64 {
        match self {
            PairTable::Uniform(p) => *p,
            PairTable::Matrix(m) => m
                .get(i)
                .and_then(|row| row.get(j))
                .copied()
                .unwrap_or(0.0),
        }
    }

    pub fn scaled(&self, factor: f64) -> PairTable {
        match self {
            PairTable::Uniform(p) => PairTable::Uniform(p * factor),
            PairTable::Matrix(m) => PairTable::Matrix(
                m.iter()
                    .map(|row| row.iter().map(|p| p * factor).collect())
                    .collect(),
            ),
        }
    }

    fn validate(&self, field: &str) -> Result<()> {
        match self {
            PairTable::Uniform(p) => check_probability(field, *p),
            PairTable::Matrix(m) => {
                for (i, row) in m.iter().enumerate() {
                    if row.len() != m.len() {
                        return Err(Error::config(field, "matrix must be square"));
                    }
                    for (j, &p) in row.iter().enumerate() {
                        check_probability(&format!("{field}[{i}][{j}]"), p)?;
                        if p != m[j][i] {
                            return Err(Error::config(
                                field,
                                format!("matrix is not symmetric at ({i}, {j})"),
                            ));
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

/// Spectator coupling: `chi[i][k]` and `a[i][j][k]`, indexed by ion label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crosstalk {
    #[serde(default)]
    pub enabled: bool,
    #[serde(default)]
    pub chi: Option<Vec<Vec<f64>>>,
    #[serde(default, rename = "A")]
    pub a: Option<Vec<Vec<Vec<f64>>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Motional coupling `u_i`; `u[k]` belongs to ion `k + 1`.
    pub u: Vec<f64>,
    pub n_bar0: f64,
    pub n_dot_per_ms: f64,
    pub p_z: PairTable,
    pub p_x: PairTable,
    pub gamma_deph_per_us: f64,
    pub p_1to0: f64,
    pub p_0to1: f64,
    pub durations: GateDurations,
    pub crosstalk: Option<Crosstalk>,
    pub cooling_reset: bool,
}

pub const DEFAULT_U: f64 = 3.5e-5;
pub const DEFAULT_N_BAR0: f64 = 660.0;
pub const DEFAULT_N_DOT_PER_MS: f64 = 180.0;
pub const DEFAULT_P_Z: f64 = 0.007;
pub const DEFAULT_P_X: f64 = 0.001;
pub const DEFAULT_GAMMA_DEPH_PER_US: f64 = 1e-6;
pub const DEFAULT_P_1TO0: f64 = 4e-3;
pub const DEFAULT_P_0TO1: f64 = 1.5e-3;

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams {
            u: vec![DEFAULT_U; MAX_ION],
            n_bar0: DEFAULT_N_BAR0,
            n_dot_per_ms: DEFAULT_N_DOT_PER_MS,
            p_z: PairTable::Uniform(DEFAULT_P_Z),
            p_x: PairTable::Uniform(DEFAULT_P_X),
            gamma_deph_per_us: DEFAULT_GAMMA_DEPH_PER_US,
            p_1to0: DEFAULT_P_1TO0,
            p_0to1: DEFAULT_P_0TO1,
            durations: GateDurations::default(),
            crosstalk: None,
            cooling_reset: false,
        }
    }
}

impl NoiseParams {
    /// Every channel switched off; circuits run exactly.
    pub fn noiseless() -> Self {
        NoiseParams {
            u: vec![0.0; MAX_ION],
            n_dot_per_ms: 0.0,
            p_z: PairTable::Uniform(0.0),
            p_x: PairTable::Uniform(0.0),
            gamma_deph_per_us: 0.0,
            p_1to0: 0.0,
            p_0to1: 0.0,
            ..NoiseParams::default()
        }
    }

    /// Only readout flips, at the default rates.
    pub fn spam_only() -> Self {
        NoiseParams {
            p_1to0: DEFAULT_P_1TO0,
            p_0to1: DEFAULT_P_0TO1,
            ..NoiseParams::noiseless()
        }
    }

    pub fn u_of(&self, ion: Ion) -> f64 {
        ion.checked_sub(1)
            .and_then(|k| self.u.get(k))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn n_dot_per_us(&self) -> f64 {
        self.n_dot_per_ms * 1e-3
    }

    pub fn crosstalk_enabled(&self) -> bool {
        self.crosstalk.as_ref().is_some_and(|c| c.enabled)
    }

    pub fn validate(&self) -> Result<()> {
        for (i, &u) in self.u.iter().enumerate() {
            if !(u >= 0.0) || !u.is_finite() {
                return Err(Error::config(format!("u[{i}]"), "must be finite and >= 0"));
            }
        }
        if self.u.len() < MAX_ION {
            return Err(Error::config(
                "u",
                format!("needs a value for every ion 1..={MAX_ION}"),
            ));
        }
        for (name, v) in [
            ("n_bar0", self.n_bar0),
            ("n_dot_per_ms", self.n_dot_per_ms),
            ("gamma_deph_per_us", self.gamma_deph_per_us),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::config(name, "must be finite and >= 0"));
            }
        }
        self.p_z.validate("p_z")?;
        self.p_x.validate("p_x")?;
        check_probability("p_1to0", self.p_1to0)?;
        check_probability("p_0to1", self.p_0to1)?;
        self.durations
            .validate()
            .map_err(|e| Error::config("durations", e.to_string()))?;
        if let Some(c) = &self.crosstalk {
            if c.enabled {
                let chi = c
                    .chi
                    .as_ref()
                    .ok_or_else(|| Error::config("crosstalk.chi", "required when enabled"))?;
                let a = c
                    .a
                    .as_ref()
                    .ok_or_else(|| Error::config("crosstalk.A", "required when enabled"))?;
                let n = MAX_ION + 1;
                if chi.len() < n || chi.iter().any(|r| r.len() < n) {
                    return Err(Error::config("crosstalk.chi", format!("must be at least {n}x{n}")));
                }
                if a.len() < n || a.iter().any(|m| m.len() < n || m.iter().any(|r| r.len() < n)) {
                    return Err(Error::config("crosstalk.A", format!("must be at least {n}x{n}x{n}")));
                }
            }
        }
        Ok(())
    }

    /// Parses a JSON config, filling unspecified fields with defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| {
            Error::config(
                format!("line {} column {}", e.line(), e.column()),
                e.to_string(),
            )
        })?;
        let params = raw.into_params()?;
        params.validate()?;
        Ok(params)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        NoiseParams::from_json(&text)
    }

    /// Names of fields that were absent from `text` and took defaults.
    pub fn defaulted_fields(text: &str) -> Result<Vec<&'static str>> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        Ok(CONFIG_FIELDS
            .iter()
            .copied()
            .filter(|f| value.get(f).is_none())
            .collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("params serialize")
    }
}

const CONFIG_FIELDS: [&str; 11] = [
    "u",
    "n_bar0",
    "n_dot_per_ms",
    "p_z",
    "p_x",
    "gamma_deph_per_us",
    "p_1to0",
    "p_0to1",
    "durations",
    "crosstalk",
    "cooling_reset",
];

#[derive(Deserialize)]
#[serde(untagged)]
enum RawU {
    Scalar(f64),
    List(Vec<f64>),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    u: Option<RawU>,
    n_bar0: Option<f64>,
    n_dot_per_ms: Option<f64>,
    p_z: Option<PairTable>,
    p_x: Option<PairTable>,
    gamma_deph_per_us: Option<f64>,
    p_1to0: Option<f64>,
    p_0to1: Option<f64>,
    durations: Option<GateDurations>,
    crosstalk: Option<Crosstalk>,
    cooling_reset: Option<bool>,
}

impl RawConfig {
    fn into_params(self) -> Result<NoiseParams> {
        let d = NoiseParams::default();
        let u = match self.u {
            None => d.u,
            Some(RawU::Scalar(x)) => vec![x; MAX_ION],
            Some(RawU::List(list)) => {
                // A list gives u for ions 1, 2, ...; ions past its end reuse
                // the last value.
                let last = *list
                    .last()
                    .ok_or_else(|| Error::config("u", "list must not be empty"))?;
                let mut u = list;
                while u.len() < MAX_ION {
                    u.push(last);
                }
                u
            }
        };
        Ok(NoiseParams {
            u,
            n_bar0: self.n_bar0.unwrap_or(d.n_bar0),
            n_dot_per_ms: self.n_dot_per_ms.unwrap_or(d.n_dot_per_ms),
            p_z: self.p_z.unwrap_or(d.p_z),
            p_x: self.p_x.unwrap_or(d.p_x),
            gamma_deph_per_us: self.gamma_deph_per_us.unwrap_or(d.gamma_deph_per_us),
            p_1to0: self.p_1to0.unwrap_or(d.p_1to0),
            p_0to1: self.p_0to1.unwrap_or(d.p_0to1),
            durations: self.durations.unwrap_or(d.durations),
            crosstalk: self.crosstalk,
            cooling_reset: self.cooling_reset.unwrap_or(d.cooling_reset),
        })
    }
}
