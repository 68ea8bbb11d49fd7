//! Information phases of S : fE and the Perron–Frobenius fixed point that
//! survives broadcasting in a non-pointer basis.

mod diagram;
mod pf;

pub use diagram::{phase_diagram, state_for_fraction, Phase, PhasePoint};
pub use pf::{pf_broadcast_check, pf_matrix, pf_stationary, PfReport, StochasticMatrixP};
