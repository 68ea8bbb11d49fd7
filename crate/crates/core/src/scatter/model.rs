use std::f64::consts::PI;

use num_complex::Complex64;

use super::exp_or_zero;
use super::mixed::ShellCoupling;
use crate::error::{Error, Result};

/// Finite quantization box or its thermodynamic limit (V → ∞ at fixed N/V).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoxMode {
    FiniteBox,
    Thermodynamic,
}

/// Dielectric sphere at two positions separated by `separation` along ẑ,
/// illuminated by photons in a box of edge `box_edge`. SI units.
///
/// The monochromatic photon direction is k̂₀ = (sin Θ, 0, cos Θ).
#[derive(Debug, Clone, PartialEq)]
pub struct SphereModel {
    pub radius: f64,
    pub permittivity: f64,
    pub separation: f64,
    pub theta: f64,
    pub k0: f64,
    pub box_edge: f64,
    pub photon_density: f64,
    pub light_speed: f64,
    /// Upper bound on k·Δx (soft photons cannot resolve the two positions).
    pub soft_threshold: f64,
    /// Upper bound on k·a (dipole scattering).
    pub dipole_threshold: f64,
    pub shell_coupling: ShellCoupling,
}

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

impl Default for SphereModel {
    fn default() -> Self {
        Self {
            radius: 1e-6,
            permittivity: 2.0,
            separation: 1e-7,
            theta: 0.0,
            k0: 1e4,
            box_edge: 1.0,
            photon_density: 1e12,
            light_speed: SPEED_OF_LIGHT,
            soft_threshold: 0.1,
            dipole_threshold: 0.1,
            shell_coupling: ShellCoupling::default(),
        }
    }
}

impl SphereModel {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("radius", self.radius),
            ("permittivity", self.permittivity),
            ("k0", self.k0),
            ("box_edge", self.box_edge),
            ("photon_density", self.photon_density),
            ("light_speed", self.light_speed),
            ("soft_threshold", self.soft_threshold),
            ("dipole_threshold", self.dipole_threshold),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if !(self.separation >= 0.0 && self.separation.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "separation must be non-negative, got {}",
                self.separation
            )));
        }
        if !self.theta.is_finite() {
            return Err(Error::InvalidParameter("theta must be finite".into()));
        }
        self.shell_coupling.validate()?;
        self.check_mode(self.k0)
    }

    pub(crate) fn check_mode(&self, k: f64) -> Result<()> {
        let kdx = k * self.separation;
        if kdx >= self.soft_threshold {
            return Err(Error::SoftSector {
                kdx,
                threshold: self.soft_threshold,
            });
        }
        let ka = k * self.radius;
        if ka >= self.dipole_threshold {
            return Err(Error::DipoleRegime {
                ka,
                threshold: self.dipole_threshold,
            });
        }
        Ok(())
    }

    /// ã = a [(ε−1)/(ε+2)]^{1/3}
    pub fn effective_radius(&self) -> f64 {
        self.radius * ((self.permittivity - 1.0) / (self.permittivity + 2.0)).cbrt()
    }

    pub fn k0_vector(&self) -> [f64; 3] {
        [self.k0 * self.theta.sin(), 0.0, self.k0 * self.theta.cos()]
    }

    /// L²(N/V)c t, unrounded.
    pub fn photon_count(&self, t: f64) -> f64 {
        self.box_edge * self.box_edge * self.photon_density * self.light_speed * t
    }

    /// Photon count in a finite box, rounded to the nearest integer.
    pub fn photon_count_rounded(&self, t: f64) -> f64 {
        self.photon_count(t).round()
    }

    /// Box edge at which `n` photons have scattered by time `t`.
    pub fn box_edge_for_count(&self, n: f64, t: f64) -> f64 {
        (n / (self.photon_density * self.light_speed * t)).sqrt()
    }
}

/// Second-order expansion of ⟨k|S₂†S₁|k⟩ = 1 + iA − B for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicroAmplitude {
    /// A = 8πΔx k⁵ã⁶ cosΘ_k / (3L²)
    pub phase: f64,
    /// B = 2πΔx²k⁶ã⁶ (3 + 11cos²Θ_k) / (15L²)
    pub loss: f64,
}

impl MicroAmplitude {
    pub fn overlap(&self) -> Complex64 {
        Complex64::new(1.0 - self.loss, self.phase)
    }

    /// 1 − |o|², evaluated without cancellation.
    pub fn budget(&self) -> f64 {
        2.0 * self.loss - self.loss * self.loss - self.phase * self.phase
    }

    /// ln |o|
    pub fn ln_abs(&self) -> f64 {
        0.5 * (-self.budget()).ln_1p()
    }
}

/// Expansion coefficients for the mode with wave vector `k` (1/m).
pub fn micro_amplitude(model: &SphereModel, k: [f64; 3]) -> Result<MicroAmplitude> {
    let kn = norm3(k);
    if !(kn > 0.0 && kn.is_finite()) {
        return Err(Error::InvalidParameter(format!("wave vector {k:?} must be nonzero")));
    }
    model.check_mode(kn)?;
    let cos = k[2] / kn;
    let at6 = model.effective_radius().powi(6);
    let l2 = model.box_edge * model.box_edge;
    let dx = model.separation;
    let amp = MicroAmplitude {
        phase: 8.0 * PI * dx * kn.powi(5) * at6 * cos / (3.0 * l2),
        loss: 2.0 * PI * dx * dx * kn.powi(6) * at6 * (3.0 + 11.0 * cos * cos) / (15.0 * l2),
    };
    if amp.budget() < 0.0 {
        return Err(Error::Truncation(format!(
            "|overlap| > 1 for k = {k:?}: A² + B² = {:e} exceeds 2B = {:e}; enlarge the box",
            amp.phase * amp.phase + amp.loss * amp.loss,
            2.0 * amp.loss
        )));
    }
    Ok(amp)
}

/// ⟨k|S₂†S₁|k⟩ to second order in kΔx, first order in 1/L².
pub fn micro_overlap(model: &SphereModel, k: [f64; 3]) -> Result<Complex64> {
    Ok(micro_amplitude(model, k)?.overlap())
}

/// 1/τ_D = (2π/15)(N/V)Δx² c k₀⁶ ã⁶ (3 + 11cos²Θ)
pub fn decoherence_rate(model: &SphereModel) -> f64 {
    let cos = model.theta.cos();
    angular_rate(model, model.k0.powi(6) * (3.0 + 11.0 * cos * cos))
}

pub(crate) fn angular_rate(model: &SphereModel, k6_angular: f64) -> f64 {
    2.0 * PI / 15.0
        * model.photon_density
        * model.separation.powi(2)
        * model.light_speed
        * model.effective_radius().powi(6)
        * k6_angular
}

/// τ_D in seconds; infinite when the sphere does not decohere.
pub fn decoherence_time(model: &SphereModel) -> f64 {
    1.0 / decoherence_rate(model)
}

pub(crate) fn check_fraction(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidParameter(format!("{name} = {x} outside [0, 1]")));
    }
    Ok(())
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
    }
    Ok(())
}

/// ln of the pure-case decoherence factor |Tr S₁ρS₂†|^{(1−f)N_t}.
pub fn ln_decoherence_factor(model: &SphereModel, f: f64, t: f64, mode: BoxMode) -> Result<f64> {
    model.validate()?;
    check_fraction("f", f)?;
    check_time(t)?;
    let weight = 1.0 - f;
    if weight == 0.0 || t == 0.0 {
        return Ok(0.0);
    }
    Ok(match mode {
        BoxMode::FiniteBox => {
            weight * model.photon_count_rounded(t) * micro_amplitude(model, model.k0_vector())?.ln_abs()
        }
        BoxMode::Thermodynamic => -weight * t * decoherence_rate(model),
    })
}

pub fn decoherence_factor(model: &SphereModel, f: f64, t: f64, mode: BoxMode) -> Result<f64> {
    ln_decoherence_factor(model, f, t, mode).map(exp_or_zero)
}

/// ln |⟨Ψ₂^mac|Ψ₁^mac⟩| for a macro-fraction holding m·N_t photons.
pub fn ln_macro_overlap_pure(model: &SphereModel, m: f64, t: f64, mode: BoxMode) -> Result<f64> {
    if !(m > 0.0 && m <= 1.0) {
        return Err(Error::InvalidParameter(format!("m = {m} outside (0, 1]")));
    }
    ln_decoherence_factor(model, 1.0 - m, t, mode)
}

pub fn macro_overlap_pure(model: &SphereModel, m: f64, t: f64, mode: BoxMode) -> Result<f64> {
    ln_macro_overlap_pure(model, m, t, mode).map(exp_or_zero)
}

pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}
