//! Product of independent state-vector factors, merged only when an
//! entangling gate couples them. Measured qubits are dropped immediately,
//! so factors stay small for circuits whose ions finish at different times.
//! Single-qubit gates are collected per ion and applied as one matrix when
//! the ion next takes part in an entangling gate or a measurement.

use rand::Rng;

use crate::circuit::Ion;
use crate::engine::state::{matmul, pauli_matrix, rotation_matrix, rz_matrix, Matrix2, StateVector};
use crate::error::{Error, Result};
use crate::noise::Pauli;
use crate::scalar::Real;

const NONE: usize = usize::MAX;

#[derive(Clone, Debug)]
pub struct FactoredState<T: Real> {
    factors: Vec<StateVector<T>>,
    owner: Vec<usize>,
    pending: Vec<Option<Matrix2<T>>>,
}

impl<T: Real> FactoredState<T> {
    /// Every ion in `|0>`, each in its own factor.
    pub fn new(ions: &[Ion]) -> Self {
        let size = ions.iter().max().map_or(0, |m| m + 1);
        let mut owner = vec![NONE; size];
        let mut factors = Vec::with_capacity(ions.len());
        for &ion in ions {
            owner[ion] = factors.len();
            factors.push(StateVector::zero(&[ion]));
        }
        FactoredState {
            factors,
            owner,
            pending: vec![None; size],
        }
    }

    pub fn factor_count(&self) -> usize {
        self.factors.len()
    }

    pub fn largest_factor(&self) -> usize {
        self.factors.iter().map(|f| f.num_qubits()).max().unwrap_or(0)
    }

    fn factor_of(&self, ion: Ion) -> Result<usize> {
        match self.owner.get(ion) {
            Some(&f) if f != NONE => Ok(f),
            _ => Err(Error::InvalidArgument(format!("ion {ion} is not live"))),
        }
    }

    fn reindex(&mut self, f: usize) {
        for &ion in self.factors[f].ions() {
            self.owner[ion] = f;
        }
    }

    fn remove_factor(&mut self, f: usize) -> StateVector<T> {
        let removed = self.factors.swap_remove(f);
        if f < self.factors.len() {
            self.reindex(f);
        }
        removed
    }

    fn merge(&mut self, a: usize, b: usize) -> usize {
        if a == b {
            return a;
        }
        let (hi, lo) = if a > b { (a, b) } else { (b, a) };
        let fh = self.remove_factor(hi);
        // `lo` is still valid: swap_remove only moved the last factor to `hi`.
        let merged = self.factors[lo].tensor(&fh);
        self.factors[lo] = merged;
        self.reindex(lo);
        lo
    }

    fn defer(&mut self, ion: Ion, m: Matrix2<T>) -> Result<()> {
        self.factor_of(ion)?;
        let slot = &mut self.pending[ion];
        *slot = Some(match slot {
            Some(prev) => matmul(&m, prev),
            None => m,
        });
        Ok(())
    }

    fn flush(&mut self, ion: Ion) -> Result<()> {
        if let Some(m) = self.pending[ion].take() {
            let f = self.factor_of(ion)?;
            self.factors[f].apply_unitary(ion, m)?;
        }
        Ok(())
    }

    pub fn apply_rotation(&mut self, ion: Ion, phi: T, theta: T) -> Result<()> {
        self.defer(ion, rotation_matrix(phi, theta))
    }

    pub fn apply_rz(&mut self, ion: Ion, theta: T) -> Result<()> {
        self.defer(ion, rz_matrix(theta))
    }

    pub fn apply_pauli(&mut self, ion: Ion, pauli: Pauli) -> Result<()> {
        self.defer(ion, pauli_matrix(pauli))
    }

    pub fn apply_xx(&mut self, i: Ion, j: Ion, theta: T) -> Result<()> {
        let (fi, fj) = (self.factor_of(i)?, self.factor_of(j)?);
        self.flush(i)?;
        self.flush(j)?;
        let f = self.merge(fi, fj);
        self.factors[f].apply_xx(i, j, theta)
    }

    /// Z measurement of one ion, which then leaves the state.
    pub fn measure<R: Rng + ?Sized>(&mut self, ion: Ion, rng: &mut R) -> Result<bool> {
        self.flush(ion)?;
        let f = self.factor_of(ion)?;
        let bit = self.factors[f].measure_qubit(ion, rng)?;
        self.owner[ion] = NONE;
        if self.factors[f].num_qubits() == 0 {
            self.remove_factor(f);
        }
        Ok(bit)
    }

    /// Joint state of all live ions, in ascending ion order.
    pub fn into_state(mut self) -> Result<StateVector<T>> {
        for ion in 0..self.pending.len() {
            self.flush(ion)?;
        }
        let mut ions: Vec<Ion> = self.factors.iter().flat_map(|f| f.ions().to_vec()).collect();
        ions.sort_unstable();
        let mut iter = self.factors.into_iter();
        let Some(first) = iter.next() else {
            return StateVector::from_amplitudes(&[], vec![num_complex::Complex::new(T::one(), T::zero())]);
        };
        let joint = iter.fold(first, |acc, f| acc.tensor(&f));
        joint.permuted(&ions)
    }

    pub fn check_norm(&self, tolerance: f64) -> Result<()> {
        self.factors.iter().try_for_each(|f| f.check_norm(tolerance))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn matches_dense_simulation() {
        let ions = [1, 2, 3, 4, 5];
        let mut dense = StateVector::<f64>::zero(&ions);
        let mut factored = FactoredState::<f64>::new(&ions);
        let ops: [(Ion, Ion, f64); 6] = [
            (1, 3, 0.4),
            (5, 4, FRAC_PI_4),
            (2, 2, 1.1),
            (3, 5, -0.3),
            (1, 1, 0.7),
            (2, 4, FRAC_PI_4),
        ];
        for (k, &(i, j, th)) in ops.iter().enumerate() {
            let phi = 0.2 * k as f64;
            if i == j {
                dense.apply_rotation(i, phi, th).unwrap();
                factored.apply_rotation(i, phi, th).unwrap();
            } else {
                dense.apply_xx(i, j, th).unwrap();
                factored.apply_xx(i, j, th).unwrap();
                dense.apply_rotation(j, FRAC_PI_2, th).unwrap();
                factored.apply_rotation(j, FRAC_PI_2, th).unwrap();
            }
        }
        factored.apply_pauli(3, Pauli::Y).unwrap();
        dense.apply_pauli(3, Pauli::Y).unwrap();
        assert_eq!(factored.factor_count(), 1);
        let joint = factored.into_state().unwrap();
        assert_eq!(joint.ions(), &ions);
        assert!((joint.fidelity(&dense).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn measured_ions_leave() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut s = FactoredState::<f64>::new(&[1, 2, 3]);
        s.apply_xx(1, 2, FRAC_PI_4).unwrap();
        assert_eq!(s.factor_count(), 2);
        let b1 = s.measure(1, &mut rng).unwrap();
        assert_eq!(s.measure(2, &mut rng).unwrap(), b1);
        assert!(!s.measure(3, &mut rng).unwrap());
        assert_eq!(s.factor_count(), 0);
        assert!(s.apply_pauli(1, Pauli::X).is_err());
    }
}
