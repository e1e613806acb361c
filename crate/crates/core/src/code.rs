//! Algebra of the [[9,1,3]] Bacon-Shor code.
//!
//! Qubits are numbered 1..=9 row-major: row `r` holds `{3r+1, 3r+2, 3r+3}`.
//! Every 9-bit quantity (Pauli supports, readout bitstrings) stores qubit `q`
//! in bit `q` of a `u16`; bit 0 is always clear.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bits 1..=9 set.
pub const QUBIT_MASK: u16 = 0b11_1111_1110;

pub const ROWS: [[usize; 3]; 3] = [[1, 2, 3], [4, 5, 6], [7, 8, 9]];
pub const COLUMNS: [[usize; 3]; 3] = [[1, 4, 7], [2, 5, 8], [3, 6, 9]];

/// Support of the first Z-type stabilizer, Z1..Z6.
pub const S1_SUPPORT: u16 = 0b00_0111_1110;
/// Support of the second Z-type stabilizer, Z4..Z9.
pub const S2_SUPPORT: u16 = 0b11_1111_0000;
/// X1 X2 X4 X5 X7 X8.
pub const SX1_SUPPORT: u16 = bit(1) | bit(2) | bit(4) | bit(5) | bit(7) | bit(8);
/// X2 X3 X5 X6 X8 X9.
pub const SX2_SUPPORT: u16 = bit(2) | bit(3) | bit(5) | bit(6) | bit(8) | bit(9);

pub const fn bit(q: usize) -> u16 {
    1 << q
}

fn support_of(qubits: &[usize]) -> u16 {
    qubits.iter().fold(0, |m, &q| m | bit(q))
}

fn parity(x: u16) -> bool {
    x.count_ones() % 2 == 1
}

/// Pauli operator on the nine code qubits with phases dropped.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PauliMask {
    pub x_bits: u16,
    pub z_bits: u16,
}

impl PauliMask {
    pub const IDENTITY: PauliMask = PauliMask { x_bits: 0, z_bits: 0 };

    pub fn new(x_bits: u16, z_bits: u16) -> Self {
        PauliMask {
            x_bits: x_bits & QUBIT_MASK,
            z_bits: z_bits & QUBIT_MASK,
        }
    }

    pub fn x(qubits: &[usize]) -> Self {
        Self::new(support_of(qubits), 0)
    }

    pub fn z(qubits: &[usize]) -> Self {
        Self::new(0, support_of(qubits))
    }

    pub fn y(qubits: &[usize]) -> Self {
        let s = support_of(qubits);
        Self::new(s, s)
    }

    /// Product of two Paulis up to phase.
    pub fn compose(self, other: PauliMask) -> PauliMask {
        PauliMask {
            x_bits: self.x_bits ^ other.x_bits,
            z_bits: self.z_bits ^ other.z_bits,
        }
    }

    pub fn weight(self) -> u32 {
        (self.x_bits | self.z_bits).count_ones()
    }

    pub fn is_identity(self) -> bool {
        self.x_bits == 0 && self.z_bits == 0
    }

    /// X-type part only.
    pub fn x_part(self) -> PauliMask {
        PauliMask::new(self.x_bits, 0)
    }
}

impl std::ops::Mul for PauliMask {
    type Output = PauliMask;
    fn mul(self, rhs: PauliMask) -> PauliMask {
        self.compose(rhs)
    }
}

impl fmt::Display for PauliMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        for q in 1..=9 {
            let x = self.x_bits & bit(q) != 0;
            let z = self.z_bits & bit(q) != 0;
            match (x, z) {
                (true, false) => write!(f, "X{q}")?,
                (false, true) => write!(f, "Z{q}")?,
                (true, true) => write!(f, "Y{q}")?,
                _ => {}
            }
        }
        Ok(())
    }
}

/// Eigenvalue flips of the measured generators. `s1`/`s2` belong to the
/// Z-type generators; `x` optionally carries the two X-type generators.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Syndrome {
    pub s1: bool,
    pub s2: bool,
    pub x: Option<[bool; 2]>,
}

impl Syndrome {
    pub const TRIVIAL: Syndrome = Syndrome { s1: false, s2: false, x: None };

    /// Strata in the order used by the conditional tables: 00, 10, 11, 01.
    pub const STRATA: [Syndrome; 4] = [
        Syndrome::z(false, false),
        Syndrome::z(true, false),
        Syndrome::z(true, true),
        Syndrome::z(false, true),
    ];

    pub const fn z(s1: bool, s2: bool) -> Syndrome {
        Syndrome { s1, s2, x: None }
    }

    pub fn is_trivial(&self) -> bool {
        !self.s1 && !self.s2 && self.x.is_none_or(|x| !x[0] && !x[1])
    }

    /// Dense index of the Z-type bits, `2*s1 + s2`.
    pub fn index(&self) -> usize {
        (self.s1 as usize) << 1 | self.s2 as usize
    }

    /// Position within [`Syndrome::STRATA`].
    pub fn stratum(&self) -> usize {
        match (self.s1, self.s2) {
            (false, false) => 0,
            (true, false) => 1,
            (true, true) => 2,
            (false, true) => 3,
        }
    }

    /// Two-character label `s1 s2`, e.g. `"10"`.
    pub fn label(&self) -> String {
        format!("{}{}", self.s1 as u8, self.s2 as u8)
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())?;
        if let Some([a, b]) = self.x {
            write!(f, "/{}{}", a as u8, b as u8)?;
        }
        Ok(())
    }
}

/// Anticommutation parities of `error` with S1 and S2.
pub fn syndrome_of(error: PauliMask) -> Syndrome {
    Syndrome::z(
        parity(error.x_bits & S1_SUPPORT),
        parity(error.x_bits & S2_SUPPORT),
    )
}

/// As [`syndrome_of`], also reporting the two X-type generators.
pub fn full_syndrome_of(error: PauliMask) -> Syndrome {
    Syndrome {
        x: Some([
            parity(error.z_bits & SX1_SUPPORT),
            parity(error.z_bits & SX2_SUPPORT),
        ]),
        ..syndrome_of(error)
    }
}

pub fn row_parities(bits: u16) -> [bool; 3] {
    ROWS.map(|row| parity(bits & support_of(&row)))
}

pub fn column_parities(bits: u16) -> [bool; 3] {
    COLUMNS.map(|col| parity(bits & support_of(&col)))
}

fn majority(p: [bool; 3]) -> bool {
    (p[0] as u8 + p[1] as u8 + p[2] as u8) >= 2
}

/// Logical Z readout: majority of the three row parities.
pub fn decode_z_readout(bits: u16) -> bool {
    majority(row_parities(bits))
}

/// Logical X readout (bits already in the X basis): majority of the column
/// parities.
pub fn decode_x_readout(bits: u16) -> bool {
    majority(column_parities(bits))
}

/// Z-generator syndrome read off a transversal Z-basis readout.
pub fn z_readout_syndrome(bits: u16) -> Syndrome {
    let r = row_parities(bits);
    Syndrome::z(r[0] ^ r[1], r[1] ^ r[2])
}

/// X-generator syndrome read off a transversal X-basis readout.
pub fn x_readout_syndrome(bits: u16) -> Syndrome {
    let c = column_parities(bits);
    Syndrome::z(c[0] ^ c[1], c[1] ^ c[2])
}

/// Parse a 9-character bitstring; character `k` (0-based) is qubit `k+1`.
pub fn parse_bits(s: &str) -> Result<u16> {
    if s.len() != 9 {
        return Err(Error::InvalidArgument(format!("expected 9 bits, got `{s}`")));
    }
    s.chars().enumerate().try_fold(0u16, |acc, (k, c)| match c {
        '0' => Ok(acc),
        '1' => Ok(acc | bit(k + 1)),
        _ => Err(Error::InvalidArgument(format!("bad bit `{c}` in `{s}`"))),
    })
}

pub fn format_bits(bits: u16) -> String {
    (1..=9)
        .map(|q| if bits & bit(q) != 0 { '1' } else { '0' })
        .collect()
}

fn gauge_generators() -> Vec<PauliMask> {
    let mut gens = Vec::with_capacity(12);
    for i in 1..=6 {
        gens.push(PauliMask::z(&[i, i + 3]));
    }
    for i in [1, 2, 4, 5, 7, 8] {
        gens.push(PauliMask::x(&[i, i + 1]));
    }
    gens
}

/// Every element of the gauge group (which contains the stabilizer group),
/// phases dropped. 4096 elements.
pub fn gauge_group() -> &'static [PauliMask] {
    static GROUP: OnceLock<Vec<PauliMask>> = OnceLock::new();
    GROUP.get_or_init(|| {
        let gens = gauge_generators();
        (0u32..1 << gens.len())
            .map(|sel| {
                gens.iter()
                    .enumerate()
                    .filter(|(k, _)| sel >> k & 1 == 1)
                    .fold(PauliMask::IDENTITY, |acc, (_, g)| acc * *g)
            })
            .collect()
    })
}

/// Canonical representative of `error` modulo the gauge group: minimum weight,
/// ties broken by the smallest `(x_bits, z_bits)`.
pub fn gauge_reduce(error: PauliMask) -> PauliMask {
    gauge_group()
        .iter()
        .map(|g| error * *g)
        .min_by_key(|e| (e.weight(), e.x_bits, e.z_bits))
        .expect("group is non-empty")
}

/// Which decoding stage a table serves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TableVariant {
    SingleShotRound1,
    AdaptiveRound2,
    Adaptive2Round1,
}

/// Z-syndrome to X-correction lookup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionTable {
    pub variant: TableVariant,
    map: [PauliMask; 4],
}

impl CorrectionTable {
    pub fn correction(&self, syndrome: Syndrome) -> PauliMask {
        self.map[syndrome.index()]
    }

    pub fn entries(&self) -> impl Iterator<Item = (Syndrome, PauliMask)> + '_ {
        Syndrome::STRATA.iter().map(|s| (*s, self.correction(*s)))
    }

    /// Lowest-index single-qubit X error per syndrome.
    fn derive(variant: TableVariant) -> Result<Self> {
        let mut map = [PauliMask::IDENTITY; 4];
        for s in Syndrome::STRATA {
            if s.is_trivial() {
                continue;
            }
            map[s.index()] = (1..=9)
                .map(|q| PauliMask::x(&[q]))
                .find(|e| syndrome_of(*e) == s)
                .ok_or_else(|| Error::NoPreimage(s.label()))?;
        }
        Ok(CorrectionTable { variant, map })
    }
}

/// The three tables used by the Shor decoders (and the Steane feedback path,
/// which shares the round-1 table).
#[derive(Clone, Debug)]
pub struct CorrectionTables {
    pub single_shot_round1: CorrectionTable,
    pub adaptive_round2: CorrectionTable,
    pub adaptive2_round1: CorrectionTable,
}

pub fn build_correction_tables() -> Result<CorrectionTables> {
    Ok(CorrectionTables {
        single_shot_round1: CorrectionTable::derive(TableVariant::SingleShotRound1)?,
        adaptive_round2: CorrectionTable::derive(TableVariant::AdaptiveRound2)?,
        adaptive2_round1: CorrectionTable::derive(TableVariant::Adaptive2Round1)?,
    })
}

/// Shared, lazily derived tables.
pub fn correction_tables() -> &'static CorrectionTables {
    static TABLES: OnceLock<CorrectionTables> = OnceLock::new();
    TABLES.get_or_init(|| build_correction_tables().expect("every Z syndrome has a weight-1 preimage"))
}
