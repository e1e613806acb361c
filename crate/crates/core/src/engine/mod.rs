//! Noisy circuit execution on factored state vectors.

pub mod factored;
pub mod inject;
pub mod monte_carlo;
pub mod record;
pub mod seed;
pub mod shot;
pub mod state;

pub use factored::FactoredState;
pub use inject::{enumerate_faults, exact_outcomes, inject_fault_run};
pub use monte_carlo::{default_workers, run_monte_carlo, WORKERS_ENV};
pub use record::{read_records, write_records};
pub use seed::SeedPolicy;
pub use shot::{
    final_state, run_shot, FaultEvent, FaultSource, InjectedFault, PreparedCircuit, ShotOptions,
    ShotRecord,
};
pub use state::StateVector;
