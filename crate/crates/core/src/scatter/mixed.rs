use std::f64::consts::PI;

use num_complex::Complex64;

use super::exp_or_zero;
use super::measure::SpectralMeasure;
use super::model::{angular_rate, check_fraction, check_time, micro_amplitude, norm3, BoxMode, MicroAmplitude, SphereModel};
use crate::error::{Error, Result};
use crate::qmat::{clamp_nonnegative, eigvalsh, ComplexMatrix};

/// How ⟨k|S₁†S₂|k′⟩ is modelled for k ≠ k′ on the same elastic shell.
/// Different shells never couple.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShellCoupling {
    /// Dipole angular kernel ((k̂−k̂′)·Δx̂)²(1 + (k̂·k̂′)²) weighted by the
    /// modes' solid angles. Its integral over k̂′ reproduces the loss term
    /// 1 − |⟨k|S₁†S₂|k⟩|², so a full sphere of directions saturates the
    /// unitarity budget. When a row would exceed its budget the whole
    /// kernel is scaled down to `fill` times the tightest row.
    Dipole { fill: f64 },
    /// |⟨k|S₁†S₂|k′⟩| = coupling / L for every same-shell pair.
    Uniform { coupling: f64 },
    Disabled,
}

impl Default for ShellCoupling {
    fn default() -> Self {
        ShellCoupling::Dipole { fill: 0.999 }
    }
}

impl ShellCoupling {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ShellCoupling::Dipole { fill } if !(fill > 0.0 && fill <= 1.0) => {
                Err(Error::InvalidParameter(format!("dipole fill {fill} outside (0, 1]")))
            }
            ShellCoupling::Uniform { coupling } if !(coupling >= 0.0 && coupling.is_finite()) => {
                Err(Error::InvalidParameter(format!("shell coupling {coupling} must be non-negative")))
            }
            _ => Ok(()),
        }
    }
}

/// Single-photon transfer amplitudes W = S₁†S₂ restricted to the measure's
/// modes: W_kk = conj(⟨k|S₂†S₁|k⟩), W_kk′ = iβ_kk′ − ½(β²)_kk′ on a shell.
///
/// The second-order off-diagonal term keeps W†W = I − diag(budget − row sum)
/// up to O(L⁻³), so W is a contraction whenever each row stays inside its
/// budget by more than the A·β cross terms.
#[derive(Debug, Clone)]
pub struct Transfer {
    pub amplitudes: Vec<MicroAmplitude>,
    /// β: symmetric, real, zero diagonal.
    pub couplings: Vec<Vec<f64>>,
    pub probabilities: Vec<f64>,
    box_edge: f64,
    /// Off-diagonal part of β².
    rescatter: Vec<Vec<f64>>,
}

impl Transfer {
    pub fn new(model: &SphereModel, measure: &SpectralMeasure) -> Result<Self> {
        model.validate()?;
        let modes = measure.modes();
        let n = modes.len();
        let amplitudes = modes
            .iter()
            .map(|m| micro_amplitude(model, m.k))
            .collect::<Result<Vec<_>>>()?;
        let shells = measure.shells();
        let mut couplings = vec![vec![0.0; n]; n];
        match model.shell_coupling {
            ShellCoupling::Disabled => {}
            ShellCoupling::Uniform { coupling } => {
                let beta = coupling / model.box_edge;
                for k in 0..n {
                    for j in 0..n {
                        if j != k && shells[j] == shells[k] {
                            couplings[k][j] = beta;
                        }
                    }
                }
            }
            ShellCoupling::Dipole { fill } => {
                let at6 = model.effective_radius().powi(6);
                let l2 = model.box_edge * model.box_edge;
                let dx2 = model.separation * model.separation;
                let mut sq = vec![vec![0.0; n]; n];
                for k in 0..n {
                    for j in 0..n {
                        if j == k || shells[j] != shells[k] {
                            continue;
                        }
                        let kn = norm3(modes[k].k);
                        let u = unit(modes[k].k);
                        let v = unit(modes[j].k);
                        let g = dipole_kernel(u, v);
                        sq[k][j] = dx2 * kn.powi(6) * at6 / (2.0 * l2)
                            * g
                            * 4.0
                            * PI
                            * (modes[k].solid_angle * modes[j].solid_angle).sqrt();
                    }
                }
                let mut scale = 1.0f64;
                for k in 0..n {
                    let row: f64 = sq[k].iter().sum();
                    if row > 0.0 {
                        scale = scale.min(fill * amplitudes[k].budget() / row);
                    }
                }
                for k in 0..n {
                    for j in 0..n {
                        couplings[k][j] = (scale * sq[k][j]).sqrt();
                    }
                }
            }
        }
        let rescatter = square_offdiag(&couplings);
        let t = Self {
            amplitudes,
            couplings,
            probabilities: measure.probabilities(),
            box_edge: model.box_edge,
            rescatter,
        };
        for k in 0..n {
            if t.row_sum(k) > t.amplitudes[k].budget() {
                return Err(Error::Truncation(format!(
                    "off-diagonal weight {:e} of mode {k} exceeds its unitarity budget {:e}",
                    t.row_sum(k),
                    t.amplitudes[k].budget()
                )));
            }
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    /// Σ_{k′≠k} |W_kk′|²
    pub fn row_sum(&self, k: usize) -> f64 {
        self.couplings[k].iter().map(|b| b * b).sum()
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let n = self.len();
        ComplexMatrix::from_fn(n, n, |k, j| {
            if k == j {
                self.amplitudes[k].overlap().conj()
            } else {
                self.offdiag(k, j)
            }
        })
    }

    fn offdiag(&self, k: usize, j: usize) -> Complex64 {
        Complex64::new(-0.5 * self.rescatter[k][j], self.couplings[k][j])
    }

    /// W − I, formed without cancellation.
    pub(crate) fn deviation(&self) -> ComplexMatrix {
        let n = self.len();
        ComplexMatrix::from_fn(n, n, |k, j| {
            if k == j {
                let a = self.amplitudes[k];
                Complex64::new(-a.loss, -a.phase)
            } else {
                self.offdiag(k, j)
            }
        })
    }

    /// η̄ = (L²/2)(1 − Σ p |W_kk|²)
    pub fn eta_bar(&self) -> f64 {
        let s: f64 = self
            .probabilities
            .iter()
            .zip(&self.amplitudes)
            .map(|(p, a)| p * a.budget())
            .sum();
        0.5 * self.box_edge * self.box_edge * s
    }

    /// η̄′ = (L²/2) Σ_k p Σ_{k′≠k} |W_kk′|²
    pub fn eta_bar_prime(&self) -> f64 {
        let s: f64 = (0..self.len()).map(|k| self.probabilities[k] * self.row_sum(k)).sum();
        0.5 * self.box_edge * self.box_edge * s
    }

    /// α = (η̄ − η̄′)/η̄
    pub fn receptivity(&self) -> Result<f64> {
        let eta = self.eta_bar();
        if eta <= 0.0 {
            return Err(Error::NoDecoherence);
        }
        let etap = self.eta_bar_prime();
        if etap > eta * (1.0 + 1e-12) {
            return Err(Error::Truncation(format!("eta_bar' = {etap:e} exceeds eta_bar = {eta:e}")));
        }
        Ok(((eta - etap) / eta).clamp(0.0, 1.0))
    }

    /// M = √P W P W† √P
    pub fn m_matrix(&self) -> ComplexMatrix {
        let n = self.len();
        let w = self.matrix();
        let sp: Vec<f64> = self.probabilities.iter().map(|p| p.sqrt()).collect();
        let left = ComplexMatrix::from_fn(n, n, |k, j| sp[k] * w[(k, j)] * sp[j]);
        left.matmul(&left.adjoint()).expect("square")
    }

    /// Σ_{j<k} (p_k − p_j)² β_kj² / (2(p_k + p_j)): the second-order
    /// shortfall of Tr√M below 1 − (η̄−η̄′)/L² for non-uniform weights.
    pub fn nondegenerate_correction(&self) -> f64 {
        let p = &self.probabilities;
        let mut s = 0.0;
        for k in 0..self.len() {
            for j in 0..k {
                let b = self.couplings[k][j];
                if b != 0.0 {
                    s += (p[k] - p[j]).powi(2) * b * b / (2.0 * (p[k] + p[j]));
                }
            }
        }
        s
    }

    /// Tr√M from the eigenvalues of M.
    pub fn overlap_exact(&self) -> Result<f64> {
        let mut vals = eigvalsh(&self.m_matrix())?;
        clamp_nonnegative(&mut vals)?;
        Ok(vals.iter().map(|v| v.sqrt()).sum::<f64>().min(1.0))
    }

    /// ln Tr√M. Where 1 − Tr√M is below double resolution the second-order
    /// expansion is used instead of the eigenvalues.
    pub fn ln_overlap_exact(&self) -> Result<f64> {
        let l2 = self.box_edge * self.box_edge;
        let gap = (self.eta_bar() - self.eta_bar_prime()) / l2 + self.nondegenerate_correction();
        if gap < 1e-10 {
            Ok((-gap).ln_1p())
        } else {
            Ok(self.overlap_exact()?.ln())
        }
    }

    /// Σ p ⟨k|S₂†S₁|k⟩ as (1 − loss) + i phase.
    pub fn averaged_amplitude(&self) -> MicroAmplitude {
        let (mut phase, mut loss) = (0.0, 0.0);
        for (p, a) in self.probabilities.iter().zip(&self.amplitudes) {
            phase += p * a.phase;
            loss += p * a.loss;
        }
        MicroAmplitude { phase, loss }
    }
}

fn square_offdiag(b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = b.len();
    let mut out = vec![vec![0.0; n]; n];
    if b.iter().all(|row| row.iter().all(|&x| x == 0.0)) {
        return out;
    }
    for k in 0..n {
        for j in 0..k {
            let s: f64 = (0..n).map(|l| b[k][l] * b[l][j]).sum();
            out[k][j] = s;
            out[j][k] = s;
        }
    }
    out
}

fn unit(v: [f64; 3]) -> [f64; 3] {
    let n = norm3(v);
    [v[0] / n, v[1] / n, v[2] / n]
}

/// ((u−v)·ẑ)² (1 + (u·v)²); its integral over v is (8π/15)(3 + 11u_z²).
pub fn dipole_kernel(u: [f64; 3], v: [f64; 3]) -> f64 {
    let dz = u[2] - v[2];
    let dot = u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
    dz * dz * (1.0 + dot * dot)
}

pub fn m_matrix(model: &SphereModel, measure: &SpectralMeasure) -> Result<ComplexMatrix> {
    Ok(Transfer::new(model, measure)?.m_matrix())
}

pub fn eta_bar(model: &SphereModel, measure: &SpectralMeasure) -> Result<f64> {
    Ok(Transfer::new(model, measure)?.eta_bar())
}

pub fn eta_bar_prime(model: &SphereModel, measure: &SpectralMeasure) -> Result<f64> {
    Ok(Transfer::new(model, measure)?.eta_bar_prime())
}

pub fn receptivity(model: &SphereModel, measure: &SpectralMeasure) -> Result<f64> {
    Transfer::new(model, measure)?.receptivity()
}

/// First-order eigenvalues p(k)²(1 − 2 Re b_kk) of M; needs distinct weights.
pub fn perturbative_eigenvalues(model: &SphereModel, measure: &SpectralMeasure) -> Result<Vec<f64>> {
    if !measure.injective() {
        return Err(Error::DegenerateMeasure);
    }
    let t = Transfer::new(model, measure)?;
    let mut v: Vec<f64> = t
        .probabilities
        .iter()
        .zip(&t.amplitudes)
        .map(|(p, a)| p * p * (1.0 - 2.0 * a.loss))
        .collect();
    v.sort_by(|a, b| b.total_cmp(a));
    Ok(v)
}

/// B(ρ₁^mic, ρ₂^mic) ≈ 1 − (η̄ − η̄′)/L²
pub fn bhattacharyya_micro_mixed(model: &SphereModel, measure: &SpectralMeasure) -> Result<f64> {
    let t = Transfer::new(model, measure)?;
    let l2 = model.box_edge * model.box_edge;
    Ok(1.0 - (t.eta_bar() - t.eta_bar_prime()) / l2)
}

/// 1/τ̄_D: the decoherence rate averaged over the measure.
pub fn modified_decoherence_rate(model: &SphereModel, measure: &SpectralMeasure) -> f64 {
    let avg: f64 = measure
        .modes()
        .iter()
        .map(|m| {
            let kn = norm3(m.k);
            let cos = m.k[2] / kn;
            m.probability * kn.powi(6) * (3.0 + 11.0 * cos * cos)
        })
        .sum();
    angular_rate(model, avg)
}

pub fn modified_decoherence_time(model: &SphereModel, measure: &SpectralMeasure) -> f64 {
    1.0 / modified_decoherence_rate(model, measure)
}

/// ln |Tr S₁ρS₂†|^{(1−f)N_t} for a mixed photon state.
pub fn ln_decoherence_factor_mixed(
    model: &SphereModel,
    measure: &SpectralMeasure,
    f: f64,
    t: f64,
    mode: BoxMode,
) -> Result<f64> {
    check_fraction("f", f)?;
    check_time(t)?;
    let tr = Transfer::new(model, measure)?;
    let weight = 1.0 - f;
    if weight == 0.0 || t == 0.0 {
        return Ok(0.0);
    }
    Ok(match mode {
        BoxMode::FiniteBox => weight * model.photon_count_rounded(t) * tr.averaged_amplitude().ln_abs(),
        BoxMode::Thermodynamic => -weight * t * modified_decoherence_rate(model, measure),
    })
}

pub fn decoherence_factor_mixed(
    model: &SphereModel,
    measure: &SpectralMeasure,
    f: f64,
    t: f64,
    mode: BoxMode,
) -> Result<f64> {
    ln_decoherence_factor_mixed(model, measure, f, t, mode).map(exp_or_zero)
}

/// ln of (1 − αη̄/L²)^{mN_t}, or −αmt/τ̄_D in the thermodynamic limit.
pub fn ln_macro_overlap_mixed(
    model: &SphereModel,
    measure: &SpectralMeasure,
    m: f64,
    t: f64,
    mode: BoxMode,
) -> Result<f64> {
    if !(m > 0.0 && m <= 1.0) {
        return Err(Error::InvalidParameter(format!("m = {m} outside (0, 1]")));
    }
    check_time(t)?;
    let tr = Transfer::new(model, measure)?;
    let alpha = tr.receptivity()?;
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(match mode {
        BoxMode::FiniteBox => {
            let l2 = model.box_edge * model.box_edge;
            m * model.photon_count_rounded(t) * (-alpha * tr.eta_bar() / l2).ln_1p()
        }
        BoxMode::Thermodynamic => -alpha * m * t * modified_decoherence_rate(model, measure),
    })
}

pub fn macro_overlap_mixed(
    model: &SphereModel,
    measure: &SpectralMeasure,
    m: f64,
    t: f64,
    mode: BoxMode,
) -> Result<f64> {
    ln_macro_overlap_mixed(model, measure, m, t, mode).map(exp_or_zero)
}

/// Finite-box macro overlap from the exact single-photon overlap Tr√M.
pub fn macro_overlap_mixed_exact(model: &SphereModel, measure: &SpectralMeasure, m: f64, t: f64) -> Result<f64> {
    if !(m > 0.0 && m <= 1.0) {
        return Err(Error::InvalidParameter(format!("m = {m} outside (0, 1]")));
    }
    check_time(t)?;
    let tr = Transfer::new(model, measure)?;
    Ok(exp_or_zero(m * model.photon_count_rounded(t) * tr.ln_overlap_exact()?))
}
