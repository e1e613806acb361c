//! Classical occupation of the lowest axial mode: thermal initial state and
//! heating as a biased random walk in the phonon number.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Gamma, Geometric, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest per-substep jump probability allowed by the literal walk.
pub const MAX_STEP_PROBABILITY: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionalState {
    pub n: u64,
    pub t_us: f64,
}

impl MotionalState {
    pub fn new(n: u64) -> Self {
        MotionalState { n, t_us: 0.0 }
    }
}


/// Draws `n` from the thermal law `P(n) = (1/(n̄+1)) (n̄/(n̄+1))^n`.
pub fn sample_initial_phonons<R: Rng + ?Sized>(n_bar0: f64, rng: &mut R) -> Result<u64> {
    if !(n_bar0 >= 0.0) || !n_bar0.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "mean phonon number must be finite and non-negative, got {n_bar0}"
        )));
    }
    if n_bar0 == 0.0 {
        return Ok(0);
    }
    let p = 1.0 / (n_bar0 + 1.0);
    let geometric = Geometric::new(p).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(geometric.sample(rng))
}

fn check_walk_args(dt_us: f64, n_dot_per_us: f64) -> Result<()> {
    if !(dt_us >= 0.0) || !dt_us.is_finite() {
        return Err(Error::InvalidArgument(format!("time step must be >= 0, got {dt_us}")));
    }
    if !(n_dot_per_us >= 0.0) || !n_dot_per_us.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "heating rate must be >= 0, got {n_dot_per_us}"
        )));
    }
    Ok(())
}

/// Literal walk: in each substep `Δt` the count moves up with probability
/// `(n+1) ṅ Δt` and down with probability `n ṅ Δt`, with `Δt` small enough
/// that `(n+1) ṅ Δt <= 0.1`.
///
/// Cost grows like `n ṅ dt`, so this is used as a reference for
/// [`advance_phonons`] rather than inside the shot loop.
pub fn advance_phonons_stepwise<R: Rng + ?Sized>(
    state: MotionalState,
    dt_us: f64,
    n_dot_per_us: f64,
    rng: &mut R,
) -> Result<MotionalState> {
    check_walk_args(dt_us, n_dot_per_us)?;
    let mut n = state.n;
    if n_dot_per_us > 0.0 {
        let mut remaining = dt_us;
        while remaining > 0.0 {
            let max_step = MAX_STEP_PROBABILITY / ((n + 1) as f64 * n_dot_per_us);
            let step = remaining.min(max_step);
            let up = (n + 1) as f64 * n_dot_per_us * step;
            let down = n as f64 * n_dot_per_us * step;
            let r: f64 = rng.random();
            if r < up {
                n += 1;
            } else if r < up + down {
                n -= 1;
            }
            remaining -= step;
        }
    }
    Ok(MotionalState {
        n,
        t_us: state.t_us + dt_us,
    })
}

/// Advances the walk by `dt_us` by sampling its exact transition law.
///
/// The walk is a linear birth-death process with per-phonon birth and death
/// rates `ṅ` and immigration rate `ṅ`. With `β = ṅ dt / (1 + ṅ dt)` each
/// existing phonon survives with probability `1 - β`, and the total is
/// `M + NegBin(M + 1, 1 - β)` where `M ~ Binomial(n, 1 - β)` counts
/// survivors. The mean grows as `n + ṅ dt` and a thermal state stays thermal.
pub fn advance_phonons<R: Rng + ?Sized>(
    state: MotionalState,
    dt_us: f64,
    n_dot_per_us: f64,
    rng: &mut R,
) -> Result<MotionalState> {
    check_walk_args(dt_us, n_dot_per_us)?;
    let t_us = state.t_us + dt_us;
    let g = n_dot_per_us * dt_us;
    if g == 0.0 {
        return Ok(MotionalState { n: state.n, t_us });
    }
    let beta = g / (1.0 + g);
    let invalid = |e: &dyn std::fmt::Display| Error::InvalidArgument(e.to_string());
    let survivors = if state.n == 0 {
        0
    } else {
        Binomial::new(state.n, 1.0 - beta)
            .map_err(|e| invalid(&e))?
            .sample(rng)
    };
    // NegBin(r, 1 - β) as a Poisson mixture over Gamma(r, β / (1 - β)) = Gamma(r, g).
    let shape = (survivors + 1) as f64;
    let lambda = Gamma::new(shape, g).map_err(|e| invalid(&e))?.sample(rng);
    let births = if lambda > 0.0 {
        Poisson::new(lambda).map_err(|e| invalid(&e))?.sample(rng) as u64
    } else {
        0
    };
    Ok(MotionalState {
        n: survivors + births,
        t_us,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn moments(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn thermal_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let xs: Vec<f64> = (0..200_000)
            .map(|_| sample_initial_phonons(660.0, &mut rng).unwrap() as f64)
            .collect();
        let (mean, var) = moments(&xs);
        assert!((mean - 660.0).abs() < 6.0, "{mean}");
        assert!((var / (660.0 * 661.0) - 1.0).abs() < 0.03, "{var}");
    }

    #[test]
    fn zero_temperature_is_ground_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            assert_eq!(sample_initial_phonons(0.0, &mut rng).unwrap(), 0);
            assert_eq!(sample_initial_phonons(1e-12, &mut rng).unwrap(), 0);
        }
        assert!(sample_initial_phonons(-1.0, &mut rng).is_err());
    }

    #[test]
    fn no_heating_keeps_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = MotionalState::new(42);
        for advance in [advance_phonons::<ChaCha8Rng>, advance_phonons_stepwise] {
            let next = advance(s, 1000.0, 0.0, &mut rng).unwrap();
            assert_eq!(next.n, 42);
            assert_eq!(next.t_us, 1000.0);
        }
    }

    #[test]
    fn stepwise_never_negative_from_ground() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut s = MotionalState::new(0);
        for _ in 0..1000 {
            s = advance_phonons_stepwise(s, 0.5, 0.18, &mut rng).unwrap();
        }
        assert!(s.t_us > 499.0);
    }

    #[test]
    fn drift_matches_heating_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let xs: Vec<f64> = (0..20_000)
            .map(|_| {
                let s0 = MotionalState::new(sample_initial_phonons(660.0, &mut rng).unwrap());
                advance_phonons(s0, 2000.0, 0.18, &mut rng).unwrap().n as f64
            })
            .collect();
        let (mean, _) = moments(&xs);
        assert!((mean / 1020.0 - 1.0).abs() < 0.02, "{mean}");
    }

    #[test]
    fn stepwise_drift_small_occupation() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let xs: Vec<f64> = (0..20_000)
            .map(|_| {
                let s0 = MotionalState::new(sample_initial_phonons(5.0, &mut rng).unwrap());
                advance_phonons_stepwise(s0, 200.0, 0.01, &mut rng).unwrap().n as f64
            })
            .collect();
        let (mean, var) = moments(&xs);
        assert!((mean - 7.0).abs() < 0.15, "{mean}");
        assert!((var / 56.0 - 1.0).abs() < 0.06, "{var}");
    }

    #[test]
    fn exact_transition_matches_stepwise_law() {
        // Compare first two moments from a fixed start against the walk.
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let s0 = MotionalState::new(20);
        let (dt, rate) = (50.0, 0.02);
        let a: Vec<f64> = (0..40_000)
            .map(|_| advance_phonons(s0, dt, rate, &mut rng).unwrap().n as f64)
            .collect();
        let b: Vec<f64> = (0..40_000)
            .map(|_| advance_phonons_stepwise(s0, dt, rate, &mut rng).unwrap().n as f64)
            .collect();
        let (ma, va) = moments(&a);
        let (mb, vb) = moments(&b);
        // Birth-death moments: mean n + g, variance g(1 + g)(2n + 1) + ... at
        // this size both agree to a few percent.
        assert!((ma - 21.0).abs() < 0.15, "{ma}");
        assert!((mb - 21.0).abs() < 0.15, "{mb}");
        assert!((va / vb - 1.0).abs() < 0.05, "{va} {vb}");
    }

    #[test]
    fn thermal_law_is_stationary_shape() {
        // Starting thermal with mean m, the exact transition gives thermal
        // with mean m + g: check mean and variance m'(m'+1).
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let xs: Vec<f64> = (0..100_000)
            .map(|_| {
                let s = MotionalState::new(sample_initial_phonons(30.0, &mut rng).unwrap());
                advance_phonons(s, 100.0, 0.1, &mut rng).unwrap().n as f64
            })
            .collect();
        let (mean, var) = moments(&xs);
        assert!((mean - 40.0).abs() < 0.4, "{mean}");
        assert!((var / (40.0 * 41.0) - 1.0).abs() < 0.03, "{var}");
    }
}
