//! Photon scattering off the sphere: box-normalized overlaps, decoherence
//! times, and the mixed-environment receptivity.
//!
//! The separation Δx points along ẑ. Powered overlaps are carried as
//! logarithms: at laboratory parameters 1 − |⟨k|S₂†S₁|k⟩| is ~1e-27 and
//! only survives in `ln_1p` form.

mod branches;
mod measure;
mod mixed;
mod model;

pub use branches::{k0_amplitude, pure_branch_vectors, PhotonBranches, PhotonExponents, PhotonSource};
pub use measure::{fibonacci_directions, Mode, SpectralMeasure};
pub use mixed::{
    bhattacharyya_micro_mixed, decoherence_factor_mixed, dipole_kernel, eta_bar, eta_bar_prime,
    ln_decoherence_factor_mixed, ln_macro_overlap_mixed, m_matrix, macro_overlap_mixed, macro_overlap_mixed_exact,
    modified_decoherence_rate, modified_decoherence_time, perturbative_eigenvalues, receptivity, ShellCoupling,
    Transfer,
};
pub use model::{
    decoherence_factor, decoherence_rate, decoherence_time, ln_decoherence_factor, ln_macro_overlap_pure,
    macro_overlap_pure, micro_amplitude, micro_overlap, BoxMode, MicroAmplitude, SphereModel, SPEED_OF_LIGHT,
};

/// Logarithms below this are reported as an exact zero.
pub const UNDERFLOW_LN: f64 = -700.0;

pub fn exp_or_zero(ln: f64) -> f64 {
    if ln < UNDERFLOW_LN {
        0.0
    } else {
        ln.exp()
    }
}

pub fn underflows(ln: f64) -> bool {
    ln < UNDERFLOW_LN
}
