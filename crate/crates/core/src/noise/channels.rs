//! Gate-angle modification and stochastic Pauli channels.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{GateKind, Ion};
use crate::error::{check_probability, Error, Result};
use crate::noise::bessel::rabi_decay_f;
use crate::noise::params::NoiseParams;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// Product up to phase; `None` is the identity.
    pub fn times(self, other: Pauli) -> Option<Pauli> {
        use Pauli::*;
        match (self, other) {
            (a, b) if a == b => None,
            (X, Y) | (Y, X) => Some(Z),
            (Y, Z) | (Z, Y) => Some(X),
            _ => Some(Y),
        }
    }

    pub fn flips_z_basis(self) -> bool {
        self != Pauli::Z
    }
}

/// `θ (1 + u n̄₀) f(u n)`.
pub fn effective_angle_1q<T: Real>(theta: T, u: T, n: u64, n_bar0: T) -> Result<T> {
    let n = T::of(n as f64);
    Ok(theta * (T::one() + u * n_bar0) * rabi_decay_f(u * n)?)
}

/// `θ (1 + u_i n̄₀)(1 + u_j n̄₀) f(u_i n) f(u_j n)`, both factors driven by
/// the same phonon number.
pub fn effective_angle_2q<T: Real>(theta: T, u_i: T, u_j: T, n: u64, n_bar0: T) -> Result<T> {
    let nf = T::of(n as f64);
    let one = T::one();
    Ok(theta
        * (one + u_i * n_bar0)
        * (one + u_j * n_bar0)
        * rabi_decay_f(u_i * nf)?
        * rabi_decay_f(u_j * nf)?)
}

fn bernoulli<R: Rng + ?Sized>(name: &str, p: f64, rng: &mut R) -> Result<bool> {
    check_probability(name, p)?;
    // Always consume one draw so the stream layout does not depend on p.
    let r: f64 = rng.random();
    Ok(r < p)
}

/// Pauli faults following `gate`. For an XX gate on `(i, j)` the channels
/// are independent Z on each ion with `p_Z(i,j)` and X on each ion with
/// `p_X(i,j)`; an ion hit by both gets Y. Rotations draw nothing here.
pub fn sample_gate_faults<R: Rng + ?Sized>(
    gate: &GateKind,
    params: &NoiseParams,
    rng: &mut R,
) -> Result<Vec<(Ion, Pauli)>> {
    let mut faults = Vec::new();
    match *gate {
        GateKind::Xx { i, j, .. } => {
            let pz = params.p_z.get(i, j);
            let px = params.p_x.get(i, j);
            let zi = bernoulli("p_z", pz, rng)?;
            let zj = bernoulli("p_z", pz, rng)?;
            let xi = bernoulli("p_x", px, rng)?;
            let xj = bernoulli("p_x", px, rng)?;
            for (ion, z, x) in [(i, zi, xi), (j, zj, xj)] {
                match (z, x) {
                    (true, true) => faults.push((ion, Pauli::Y)),
                    (true, false) => faults.push((ion, Pauli::Z)),
                    (false, true) => faults.push((ion, Pauli::X)),
                    (false, false) => {}
                }
            }
        }
        GateKind::Idle { ion, duration_us } => {
            if sample_idle_fault(duration_us, params.gamma_deph_per_us, rng)? {
                faults.push((ion, Pauli::Z));
            }
        }
        _ => {}
    }
    Ok(faults)
}

/// Dephasing over an idle stretch: Z with probability `Γ t`.
pub fn sample_idle_fault<R: Rng + ?Sized>(
    duration_us: f64,
    gamma_per_us: f64,
    rng: &mut R,
) -> Result<bool> {
    bernoulli("gamma_deph * t", gamma_per_us * duration_us, rng)
}

/// Readout error: `1 -> 0` with `p_1to0`, `0 -> 1` with `p_0to1`.
pub fn sample_readout_flip<R: Rng + ?Sized>(
    bit: bool,
    params: &NoiseParams,
    rng: &mut R,
) -> Result<bool> {
    let p = if bit { params.p_1to0 } else { params.p_0to1 };
    Ok(bit ^ bernoulli("readout flip", p, rng)?)
}

/// Spurious XX rotations accompanying an XX gate on `(i, j)`: for every
/// other ion `k`, `XX(i,k)` by `(χ_ik + χ_jk) A_ijk` and `XX(j,k)` by
/// `(χ_ik + χ_jk) A_jik`. Zero angles are omitted. Only ions in `ions`
/// are considered.
pub fn crosstalk_rotations(
    i: Ion,
    j: Ion,
    params: &NoiseParams,
    ions: &[Ion],
) -> Result<Vec<(Ion, Ion, f64)>> {
    let Some(c) = params.crosstalk.as_ref().filter(|c| c.enabled) else {
        return Ok(Vec::new());
    };
    let chi = c
        .chi
        .as_ref()
        .ok_or_else(|| Error::config("crosstalk.chi", "required when enabled"))?;
    let a = c
        .a
        .as_ref()
        .ok_or_else(|| Error::config("crosstalk.A", "required when enabled"))?;
    let at2 = |m: &Vec<Vec<f64>>, x: Ion, y: Ion| m.get(x).and_then(|r| r.get(y)).copied();
    let missing = |what: &str| Error::config(what.to_string(), format!("no entry for ions ({i}, {j})"));
    let mut out = Vec::new();
    for &k in ions {
        if k == i || k == j {
            continue;
        }
        let weight = at2(chi, i, k).ok_or_else(|| missing("crosstalk.chi"))?
            + at2(chi, j, k).ok_or_else(|| missing("crosstalk.chi"))?;
        let a_ijk = a.get(i).and_then(|m| at2(m, j, k)).ok_or_else(|| missing("crosstalk.A"))?;
        let a_jik = a.get(j).and_then(|m| at2(m, i, k)).ok_or_else(|| missing("crosstalk.A"))?;
        let (t1, t2) = (weight * a_ijk, weight * a_jik);
        if t1 != 0.0 {
            out.push((i, k, t1));
        }
        if t2 != 0.0 {
            out.push((j, k, t2));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::params::{Crosstalk, PairTable, MAX_ION};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_4, PI};

    #[test]
    fn angles_reduce_without_coupling() {
        assert_eq!(effective_angle_1q(1.3, 0.0, 5000, 660.0).unwrap(), 1.3);
        assert_eq!(effective_angle_2q(0.7, 0.0, 0.0, 5000, 660.0).unwrap(), 0.7);
        let t: f64 = effective_angle_1q(1.0, 1e-4, 0, 660.0).unwrap();
        assert!((t - 1.066).abs() < 1e-15);
    }

    #[test]
    fn angle_example() {
        // f(0.066) from its power series sum_k (x/2)^{2k}/(k!)^2 times e^{-x}.
        let x: f64 = 0.066;
        let mut i0 = 0.0;
        let mut term = 1.0;
        for k in 0..30 {
            if k > 0 {
                term *= (x / 2.0).powi(2) / (k * k) as f64;
            }
            i0 += term;
        }
        let expect = PI * 1.066 * (-x).exp() * i0;
        let got = effective_angle_1q(PI, 1e-4, 660, 660.0).unwrap();
        assert!((got - expect).abs() < 1e-13);
    }

    #[test]
    fn two_qubit_angle_is_product_of_single() {
        let (th, ui, uj, n, nb) = (FRAC_PI_4, 2e-5, 7e-5, 1234, 660.0);
        let a = effective_angle_2q(th, ui, uj, n, nb).unwrap();
        let b = effective_angle_1q(th, ui, n, nb).unwrap() * effective_angle_1q(th, uj, n, nb).unwrap() / th;
        assert!((a - b).abs() < 1e-15);
        assert!((a - effective_angle_2q(th, uj, ui, n, nb).unwrap()).abs() < 1e-15);
    }

    fn xx_gate() -> GateKind {
        GateKind::Xx { i: 1, j: 2, theta: FRAC_PI_4 }
    }

    #[test]
    fn no_faults_when_rates_vanish() {
        let params = NoiseParams::noiseless();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..1000 {
            assert!(sample_gate_faults(&xx_gate(), &params, &mut rng).unwrap().is_empty());
        }
    }

    #[test]
    fn z_frequency() {
        let params = NoiseParams {
            p_z: PairTable::Uniform(0.5),
            ..NoiseParams::noiseless()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let shots = 100_000;
        let mut hits = [0usize; 2];
        for _ in 0..shots {
            for (ion, p) in sample_gate_faults(&xx_gate(), &params, &mut rng).unwrap() {
                assert_eq!(p, Pauli::Z);
                hits[ion - 1] += 1;
            }
        }
        for h in hits {
            assert!((h as f64 / shots as f64 - 0.5).abs() < 0.01);
        }
    }

    #[test]
    fn bit_flip_calibration_inversion() {
        // K gates with p_X = p / K / 2 per ion per gate give a single flip on
        // a given pair with probability close to p.
        let (p, k) = (0.02, 8usize);
        let params = NoiseParams {
            p_x: PairTable::Uniform(p / k as f64 / 2.0),
            ..NoiseParams::noiseless()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let shots = 200_000;
        let mut single = 0;
        for _ in 0..shots {
            let mut bits = [false; 2];
            for _ in 0..k {
                for (ion, pauli) in sample_gate_faults(&xx_gate(), &params, &mut rng).unwrap() {
                    bits[ion - 1] ^= pauli.flips_z_basis();
                }
            }
            single += (bits[0] ^ bits[1]) as usize;
        }
        let rate = single as f64 / shots as f64;
        assert!((rate - p).abs() < 0.1 * p, "{rate}");
    }

    #[test]
    fn rejects_out_of_range_rate() {
        let params = NoiseParams {
            p_x: PairTable::Uniform(1.2),
            ..NoiseParams::noiseless()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!(sample_gate_faults(&xx_gate(), &params, &mut rng).is_err());
        assert!(sample_idle_fault(1e6, 1e-5, &mut rng).is_err());
    }

    #[test]
    fn readout_flip_rates() {
        let params = NoiseParams::spam_only();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let shots = 1_000_000;
        let ones = (0..shots)
            .filter(|_| !sample_readout_flip(true, &params, &mut rng).unwrap())
            .count();
        let zeros = (0..shots)
            .filter(|_| sample_readout_flip(false, &params, &mut rng).unwrap())
            .count();
        assert!((ones as f64 / shots as f64 / 4e-3 - 1.0).abs() < 0.05);
        assert!((zeros as f64 / shots as f64 / 1.5e-3 - 1.0).abs() < 0.05);

        let clean = NoiseParams::noiseless();
        for b in [false, true] {
            assert_eq!(sample_readout_flip(b, &clean, &mut rng).unwrap(), b);
        }
    }

    fn with_crosstalk(chi: Vec<Vec<f64>>, a: f64) -> NoiseParams {
        let n = MAX_ION + 1;
        NoiseParams {
            crosstalk: Some(Crosstalk {
                enabled: true,
                chi: Some(chi),
                a: Some(vec![vec![vec![a; n]; n]; n]),
            }),
            ..NoiseParams::noiseless()
        }
    }

    #[test]
    fn crosstalk_cases() {
        let n = MAX_ION + 1;
        let ions: Vec<Ion> = (1..=9).collect();
        let zero = with_crosstalk(vec![vec![0.0; n]; n], 1.0);
        assert!(crosstalk_rotations(1, 2, &zero, &ions).unwrap().is_empty());

        let mut chi = vec![vec![0.0; n]; n];
        chi[1][5] = 0.03;
        let one = with_crosstalk(chi.clone(), 1.0);
        assert_eq!(
            crosstalk_rotations(1, 2, &one, &ions).unwrap(),
            vec![(1, 5, 0.03), (2, 5, 0.03)]
        );

        for scale in [0.5, 2.0, 4.0] {
            let mut c = chi.clone();
            c[1][5] *= scale;
            c[2][5] = 0.01 * scale;
            let r = crosstalk_rotations(1, 2, &with_crosstalk(c, 1.0), &ions).unwrap();
            assert!((r[0].2 - 0.04 * scale).abs() < 1e-15);
        }

        assert!(crosstalk_rotations(1, 2, &NoiseParams::noiseless(), &ions)
            .unwrap()
            .is_empty());
        let mut broken = one.clone();
        broken.crosstalk.as_mut().unwrap().a = None;
        assert!(crosstalk_rotations(1, 2, &broken, &ions).is_err());
    }

    #[test]
    fn pauli_products() {
        assert_eq!(Pauli::X.times(Pauli::Z), Some(Pauli::Y));
        assert_eq!(Pauli::Y.times(Pauli::Y), None);
        assert_eq!(Pauli::Z.times(Pauli::Y), Some(Pauli::X));
    }
}
