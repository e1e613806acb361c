//! Trapped-ion error model: motional Rabi decay, heating, Pauli channels,
//! readout flips and crosstalk.

pub mod bessel;
pub mod channels;
pub mod fit;
pub mod motion;
pub mod params;

pub use bessel::rabi_decay_f;
pub use channels::{
    crosstalk_rotations, effective_angle_1q, effective_angle_2q, sample_gate_faults,
    sample_idle_fault, sample_readout_flip, Pauli,
};
pub use fit::{fit_heating_rate, fit_mean_phonon, OriginFit};
pub use motion::{advance_phonons, advance_phonons_stepwise, sample_initial_phonons, MotionalState};
pub use params::{Crosstalk, NoiseParams, PairTable};

/// Projected hardware upgrade: sympathetic cooling back to the initial
/// thermal state before every gate, 5x fewer Z faults and 4x fewer X faults.
/// `n̄₀` is unchanged. Applying it twice divides the rates twice.
pub fn apply_improved(params: &NoiseParams) -> NoiseParams {
    NoiseParams {
        cooling_reset: true,
        p_z: params.p_z.scaled(1.0 / 5.0),
        p_x: params.p_x.scaled(1.0 / 4.0),
        ..params.clone()
    }
}
