use log::warn;

use crate::broadcast::{
    build_sfe_state, explicit_macro_register_state, explicit_micro_fraction_state, Partition, SfEState,
};
use crate::error::{Error, Result};
use crate::qinfo::mutual_information;
use crate::qmat::DensityOperator;
use crate::scatter::{decoherence_time, modified_decoherence_time, BoxMode, PhotonSource, SphereModel};

/// Information phase of S : fE, assigned from the configuration alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    /// f = 0 or a fixed number of photons that does not grow with N_t.
    Product,
    /// 0 < f < 1: the classical plateau.
    Broadcasting,
    /// f = 1.
    FullInformation,
}

impl Phase {
    pub fn label(self) -> &'static str {
        match self {
            Phase::Product => "product",
            Phase::Broadcasting => "broadcasting",
            Phase::FullInformation => "full_information",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    /// Observed fraction; μ/N_t for a microscopic fraction in a finite box
    /// and 0 in the thermodynamic limit.
    pub f: f64,
    pub phase: Phase,
    pub i_bits: f64,
    pub t_over_tau_d: f64,
    /// Observed photon count for microscopic fractions.
    pub micro_photons: Option<usize>,
}

/// Below this many decoherence times the plateau has not formed.
const SETTLED: f64 = 5.0;
const MAX_FRACTIONS: usize = 1_000_000;

/// I(S : fE) at time `t` over a grid of macroscopic fractions and a list of
/// microscopic photon counts.
pub fn phase_diagram(
    model: &SphereModel,
    source: &PhotonSource,
    rho0_s: &DensityOperator,
    t: f64,
    f_grid: &[f64],
    micro_counts: &[usize],
    mode: BoxMode,
) -> Result<Vec<PhasePoint>> {
    if f_grid.is_empty() && micro_counts.is_empty() {
        return Err(Error::InvalidParameter("empty phase-diagram grid".into()));
    }
    let tau = match source {
        PhotonSource::Spectral(m) if !source.is_pure() => modified_decoherence_time(model, m),
        _ => decoherence_time(model),
    };
    let x = t / tau;
    if x < SETTLED {
        warn!("t = {x:.3} decoherence times; the broadcast structure has not settled");
    }
    let mut out = Vec::with_capacity(f_grid.len() + micro_counts.len());
    for &mu in micro_counts {
        let rho = explicit_micro_fraction_state(model, source, rho0_s, mu, t, mode)?;
        let f = match mode {
            BoxMode::FiniteBox => {
                let n = model.photon_count_rounded(t);
                if n > 0.0 {
                    mu as f64 / n
                } else {
                    0.0
                }
            }
            BoxMode::Thermodynamic => 0.0,
        };
        out.push(PhasePoint {
            f,
            phase: Phase::Product,
            i_bits: mutual_information(&rho, &[0])?,
            t_over_tau_d: x,
            micro_photons: Some(mu),
        });
    }
    for &f in f_grid {
        let state = state_for_fraction(model, source, rho0_s, f, t, mode)?;
        let (phase, i_bits) = if f == 0.0 {
            (Phase::Product, 0.0)
        } else if f == 1.0 {
            let rho = explicit_macro_register_state(&state)?;
            (Phase::FullInformation, mutual_information(&rho, &[0])?)
        } else {
            (Phase::Broadcasting, state.mutual_information()?)
        };
        out.push(PhasePoint {
            f,
            phase,
            i_bits,
            t_over_tau_d: x,
            micro_photons: None,
        });
    }
    Ok(out)
}

/// SfE state at fraction f with the coarsest partition that contains it.
pub fn state_for_fraction(
    model: &SphereModel,
    source: &PhotonSource,
    rho0_s: &DensityOperator,
    f: f64,
    t: f64,
    mode: BoxMode,
) -> Result<SfEState> {
    let p = coarsest_partition(f)?;
    build_sfe_state(model, source, rho0_s, p.f, p.m, t, mode)
}

fn coarsest_partition(f: f64) -> Result<Partition> {
    if f == 0.0 || f == 1.0 {
        return Partition::new(f, 1.0);
    }
    for k in 2..=MAX_FRACTIONS {
        let m = 1.0 / k as f64;
        if let Ok(p) = Partition::new(f, m) {
            return Ok(p);
        }
    }
    Err(Error::Partition(format!("f = {f} is not a fraction with denominator up to {MAX_FRACTIONS}")))
}
