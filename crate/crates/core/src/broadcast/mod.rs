//! ρ_{S:fE}(t): the system together with an observed fraction f of the
//! scattered photons.
//!
//! The factored path keeps one representative encoding state per pointer
//! value and carries every powered overlap as an exponent, so it works at
//! any photon count. The explicit path builds dense states for a handful
//! of photons and serves as the reference the factored path is tested
//! against.

mod explicit;
mod partition;
mod report;
mod state;

pub use explicit::{
    explicit_functionals, explicit_macro_register_state, explicit_micro_fraction_state, explicit_small_state,
    factored_functionals, register_branches, simulate_controlled, Functionals, MAX_EXPLICIT_DIM,
};
pub use partition::Partition;
pub use report::{bound_at_fraction, redundancy, verify_broadcast, BroadcastReport, DEFAULT_TOLERANCE, REDUNDANCY_DELTA};
pub use state::{build_sfe_state, build_sfe_state_for_count, coherent_norm, FactoredMacroState, SfEState};
