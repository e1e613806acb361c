//! Dense state vector over a small set of ions.

use num_complex::Complex;
use rand::Rng;

use crate::circuit::Ion;
use crate::error::{Error, Result};
use crate::noise::Pauli;
use crate::scalar::Real;

/// Largest norm deviation tolerated before sampling a measurement.
pub const MEASURE_NORM_TOLERANCE: f64 = 1e-6;

/// Row-major 2x2 complex matrix.
pub type Matrix2<T> = [[Complex<T>; 2]; 2];

pub fn identity_matrix<T: Real>() -> Matrix2<T> {
    let (o, l) = (Complex::new(T::zero(), T::zero()), Complex::new(T::one(), T::zero()));
    [[l, o], [o, l]]
}

/// `a * b`, so `b` acts first.
pub fn matmul<T: Real>(a: &Matrix2<T>, b: &Matrix2<T>) -> Matrix2<T> {
    let e = |r: usize, c: usize| a[r][0] * b[0][c] + a[r][1] * b[1][c];
    [[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]]
}

pub fn rotation_matrix<T: Real>(phi: T, theta: T) -> Matrix2<T> {
    let (s, c) = (theta * T::of(0.5)).sin_cos();
    let zero = T::zero();
    // Off-diagonal entries are -i s e^{∓iφ}.
    let (sp, cp) = phi.sin_cos();
    [
        [Complex::new(c, zero), Complex::new(-s * sp, -s * cp)],
        [Complex::new(s * sp, -s * cp), Complex::new(c, zero)],
    ]
}

pub fn rz_matrix<T: Real>(theta: T) -> Matrix2<T> {
    let (s, c) = (theta * T::of(0.5)).sin_cos();
    let zero = Complex::new(T::zero(), T::zero());
    [[Complex::new(c, -s), zero], [zero, Complex::new(c, s)]]
}

pub fn pauli_matrix<T: Real>(pauli: Pauli) -> Matrix2<T> {
    let (o, l) = (T::zero(), T::one());
    let c = Complex::new;
    match pauli {
        Pauli::X => [[c(o, o), c(l, o)], [c(l, o), c(o, o)]],
        Pauli::Y => [[c(o, o), c(o, -l)], [c(o, l), c(o, o)]],
        Pauli::Z => [[c(l, o), c(o, o)], [c(o, o), c(-l, o)]],
    }
}

/// Amplitudes over `ions`, where ion `ions[k]` is bit `k` of the index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T: Real> {
    ions: Vec<Ion>,
    amps: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    /// `|0...0>` on the given ions.
    pub fn zero(ions: &[Ion]) -> Self {
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << ions.len()];
        amps[0] = Complex::new(T::one(), T::zero());
        StateVector {
            ions: ions.to_vec(),
            amps,
        }
    }

    pub fn from_amplitudes(ions: &[Ion], amps: Vec<Complex<T>>) -> Result<Self> {
        if amps.len() != 1 << ions.len() {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes for {} qubits",
                amps.len(),
                ions.len()
            )));
        }
        Ok(StateVector {
            ions: ions.to_vec(),
            amps,
        })
    }

    pub fn ions(&self) -> &[Ion] {
        &self.ions
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn num_qubits(&self) -> usize {
        self.ions.len()
    }

    pub fn position(&self, ion: Ion) -> Option<usize> {
        self.ions.iter().position(|&i| i == ion)
    }

    fn require(&self, ion: Ion) -> Result<usize> {
        self.position(ion)
            .ok_or_else(|| Error::InvalidArgument(format!("ion {ion} is not in this state")))
    }

    /// Applies `[[m00, m01], [m10, m11]]` to the qubit at bit `pos`.
    pub fn apply_matrix(&mut self, pos: usize, m: Matrix2<T>) {
        let mask = 1usize << pos;
        for chunk in self.amps.chunks_exact_mut(2 * mask) {
            let (lo, hi) = chunk.split_at_mut(mask);
            for (x, y) in lo.iter_mut().zip(hi.iter_mut()) {
                let (a, b) = (*x, *y);
                *x = m[0][0] * a + m[0][1] * b;
                *y = m[1][0] * a + m[1][1] * b;
            }
        }
    }

    /// Applies a 2x2 unitary to `ion`.
    pub fn apply_unitary(&mut self, ion: Ion, m: Matrix2<T>) -> Result<()> {
        let pos = self.require(ion)?;
        self.apply_matrix(pos, m);
        Ok(())
    }

    /// `exp(-i θ/2 (cos φ X + sin φ Y))`.
    pub fn apply_rotation(&mut self, ion: Ion, phi: T, theta: T) -> Result<()> {
        self.apply_unitary(ion, rotation_matrix(phi, theta))
    }

    /// `exp(-i θ/2 Z)`.
    pub fn apply_rz(&mut self, ion: Ion, theta: T) -> Result<()> {
        self.apply_unitary(ion, rz_matrix(theta))
    }

    /// `exp(-i θ X_i X_j)`.
    pub fn apply_xx(&mut self, i: Ion, j: Ion, theta: T) -> Result<()> {
        if i == j {
            return Err(Error::InvalidArgument(format!("XX on a single ion {i}")));
        }
        let (pi, pj) = (self.require(i)?, self.require(j)?);
        let (lo, hi) = (1usize << pi.min(pj), 1usize << pi.max(pj));
        let (s, c) = theta.sin_cos();
        // c x - i s y on each pair that differs in both bits
        let mix = |x: Complex<T>, y: Complex<T>| Complex::new(c * x.re + s * y.im, c * x.im - s * y.re);
        let n = self.amps.len();
        for base in (0..n).step_by(2 * hi) {
            for mid in (base..base + hi).step_by(2 * lo) {
                for a in mid..mid + lo {
                    for (p, q) in [(a, a | lo | hi), (a | lo, a | hi)] {
                        let (x, y) = (self.amps[p], self.amps[q]);
                        self.amps[p] = mix(x, y);
                        self.amps[q] = mix(y, x);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, ion: Ion, pauli: Pauli) -> Result<()> {
        self.apply_unitary(ion, pauli_matrix(pauli))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr().to_f64_lossy()).sum()
    }

    pub fn check_norm(&self, tolerance: f64) -> Result<()> {
        let deviation = (self.norm_sqr() - 1.0).abs();
        if deviation > tolerance {
            return Err(Error::Norm(deviation));
        }
        Ok(())
    }

    /// Product state with `self`'s qubits in the low bits.
    pub fn tensor(&self, other: &StateVector<T>) -> StateVector<T> {
        let mut ions = self.ions.clone();
        ions.extend_from_slice(&other.ions);
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for b in &other.amps {
            for a in &self.amps {
                amps.push(*a * *b);
            }
        }
        StateVector { ions, amps }
    }

    /// Same state with qubits relabelled into the order given by `ions`.
    pub fn permuted(&self, ions: &[Ion]) -> Result<StateVector<T>> {
        if ions.len() != self.ions.len() {
            return Err(Error::InvalidArgument("permutation has the wrong length".into()));
        }
        let src: Vec<usize> = ions.iter().map(|&i| self.require(i)).collect::<Result<_>>()?;
        let mut amps = vec![Complex::new(T::zero(), T::zero()); self.amps.len()];
        for (idx, amp) in amps.iter_mut().enumerate() {
            let mut old = 0;
            for (k, &p) in src.iter().enumerate() {
                old |= ((idx >> k) & 1) << p;
            }
            *amp = self.amps[old];
        }
        Ok(StateVector {
            ions: ions.to_vec(),
            amps,
        })
    }

    /// `|<self|other>|²` after aligning qubit order.
    pub fn fidelity(&self, other: &StateVector<T>) -> Result<f64> {
        let other = other.permuted(&self.ions)?;
        let mut overlap = Complex::new(0.0, 0.0);
        for (a, b) in self.amps.iter().zip(&other.amps) {
            let p = a.conj() * *b;
            overlap += Complex::new(p.re.to_f64_lossy(), p.im.to_f64_lossy());
        }
        Ok(overlap.norm_sqr())
    }

    /// Born probability of each basis index.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr().to_f64_lossy()).collect()
    }

    /// Measures one qubit in Z, collapses and removes it.
    pub fn measure_qubit<R: Rng + ?Sized>(&mut self, ion: Ion, rng: &mut R) -> Result<bool> {
        let pos = self.require(ion)?;
        let mask = 1usize << pos;
        let mut p = [0.0f64; 2];
        for (a, amp) in self.amps.iter().enumerate() {
            p[(a & mask != 0) as usize] += amp.norm_sqr().to_f64_lossy();
        }
        let total = p[0] + p[1];
        if (total - 1.0).abs() > MEASURE_NORM_TOLERANCE {
            return Err(Error::Norm((total - 1.0).abs()));
        }
        let r: f64 = rng.random();
        let outcome = r * total >= p[0];
        let scale = T::of(1.0 / p[outcome as usize].sqrt());
        let low = mask - 1;
        let keep = if outcome { mask } else { 0 };
        let mut amps = Vec::with_capacity(self.amps.len() / 2);
        for k in 0..self.amps.len() / 2 {
            let a = (k & low) | ((k & !low) << 1) | keep;
            amps.push(self.amps[a] * scale);
        }
        self.amps = amps;
        self.ions.remove(pos);
        Ok(outcome)
    }

    /// Samples every qubit at once; returns `(ion, bit)` in qubit order.
    pub fn measure_all<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<(Ion, bool)>> {
        self.check_norm(MEASURE_NORM_TOLERANCE)?;
        let total = self.norm_sqr();
        let mut r = rng.random::<f64>() * total;
        let mut index = self.amps.len() - 1;
        for (a, amp) in self.amps.iter().enumerate() {
            r -= amp.norm_sqr().to_f64_lossy();
            if r < 0.0 {
                index = a;
                break;
            }
        }
        Ok(self
            .ions
            .iter()
            .enumerate()
            .map(|(k, &ion)| (ion, (index >> k) & 1 == 1))
            .collect())
    }
}
