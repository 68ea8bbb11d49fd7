use super::state::{coherent_norm, spectrum_of, SfEState};
use crate::error::Result;
use crate::qinfo::appendix_bound_ln;
use crate::scatter::{exp_or_zero, underflows};

pub const DEFAULT_TOLERANCE: f64 = 1e-4;
/// δ used for the redundancy field of [`BroadcastReport`].
pub const REDUNDANCY_DELTA: f64 = 1e-2;

/// Distance of ρ_{S:fE} from the spectrum-broadcast form.
#[derive(Debug, Clone, PartialEq)]
pub struct BroadcastReport {
    pub coherent_trace_norm: f64,
    /// B between the two encoding states of one macro-fraction.
    pub pairwise_overlap: f64,
    pub spectrum: [f64; 2],
    pub is_broadcast: bool,
    pub tolerance: f64,
    /// Set when either quantity fell below e^{−700} and is reported as 0.
    pub underflow: bool,
    pub multiplicity: usize,
    /// R_δ at δ = [`REDUNDANCY_DELTA`].
    pub redundancy: Option<f64>,
}

pub fn verify_broadcast(state: &SfEState, tol: f64) -> Result<BroadcastReport> {
    let ln_coh = state.ln_offdiag_abs();
    let ln_ov = state.ln_pairwise_overlap();
    let coherent_trace_norm = coherent_norm(state);
    let pairwise_overlap = exp_or_zero(ln_ov);
    Ok(BroadcastReport {
        coherent_trace_norm,
        pairwise_overlap,
        spectrum: spectrum_of(state)?,
        is_broadcast: coherent_trace_norm < tol && pairwise_overlap < tol,
        tolerance: tol,
        underflow: underflows(ln_ov) || (state.coherence.norm() > 0.0 && underflows(ln_coh)),
        multiplicity: state.multiplicity(),
        redundancy: redundancy(state, REDUNDANCY_DELTA)?,
    })
}

/// Upper bound on |H_S − I(S:fE)| as a function of the observed fraction,
/// with the exponents of `state`.
pub fn bound_at_fraction(state: &SfEState, f: f64) -> Result<f64> {
    let c = state.coherence.norm();
    let k = state.exponents.decoherence;
    let eps_e = 2.0 * c * exp_or_zero(-k);
    let eps_fe = 2.0 * c * exp_or_zero(-(1.0 - f) * k);
    let [p1, p2] = state.pointer_probs;
    Ok(appendix_bound_ln(eps_e, eps_fe, -f * state.exponents.orthogonalization, p1, p2)?.value)
}

/// R_δ = 1/f_δ for the smallest f whose bound is at most δ·H_S, or None if
/// no fraction qualifies or H_S = 0.
pub fn redundancy(state: &SfEState, delta: f64) -> Result<Option<f64>> {
    let target = delta * state.pointer_entropy();
    if target <= 0.0 {
        return Ok(None);
    }
    const GRID: usize = 1000;
    let mut prev = 0.0;
    for i in 1..GRID {
        let f = i as f64 / GRID as f64;
        if bound_at_fraction(state, f)? <= target {
            let (mut lo, mut hi) = (prev, f);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if bound_at_fraction(state, mid)? <= target {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Ok(Some(1.0 / hi));
        }
        prev = f;
    }
    Ok(None)
}
