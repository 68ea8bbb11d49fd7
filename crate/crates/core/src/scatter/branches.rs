use num_complex::Complex64;

use super::measure::SpectralMeasure;
use super::mixed::{modified_decoherence_rate, Transfer};
use super::model::{decoherence_rate, micro_amplitude, BoxMode, MicroAmplitude, SphereModel};
use crate::error::{Error, Result};
use crate::qmat::{hermitian_function, ComplexMatrix};

/// Initial photon state: the monochromatic mode k₀ of the model, or a
/// diagonal spectral measure.
#[derive(Debug, Clone, PartialEq)]
pub enum PhotonSource {
    Monochromatic,
    Spectral(SpectralMeasure),
}

impl PhotonSource {
    pub fn measure(&self, model: &SphereModel) -> Result<SpectralMeasure> {
        match self {
            PhotonSource::Monochromatic => SpectralMeasure::single(model.k0_vector()),
            PhotonSource::Spectral(m) => Ok(m.clone()),
        }
    }

    pub fn is_pure(&self) -> bool {
        match self {
            PhotonSource::Monochromatic => true,
            PhotonSource::Spectral(m) => m.len() == 1,
        }
    }
}

/// Per-photon functionals that every factored quantity is built from.
///
/// With g photons in a group the pure-case decoherence factor is
/// exp(−g·decoherence_exponent/N_t) and so on; in the thermodynamic limit
/// the exponents are the rates times t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonExponents {
    /// −ln |Tr S₁ρS₂†| summed over all N_t photons.
    pub decoherence: f64,
    /// arg Tr S₁ρS₂† summed over all N_t photons.
    pub phase: f64,
    /// −ln B(S₁ρS₁†, S₂ρS₂†) summed over all N_t photons.
    pub orthogonalization: f64,
}

impl PhotonExponents {
    pub fn new(model: &SphereModel, source: &PhotonSource, t: f64, mode: BoxMode) -> Result<Self> {
        match mode {
            BoxMode::FiniteBox => Self::for_count(model, source, model.photon_count_rounded(t)),
            BoxMode::Thermodynamic => {
                model.validate()?;
                let measure = source.measure(model)?;
                let transfer = Transfer::new(model, &measure)?;
                let (rate, ort) = if source.is_pure() {
                    let r = decoherence_rate(model);
                    (r, r)
                } else {
                    let r = modified_decoherence_rate(model, &measure);
                    (r, transfer.receptivity()? * r)
                };
                // The O(1/L²) phase per photon times N_t ∝ L² has a finite limit.
                let phase_rate = model.photon_count(1.0) * transfer.averaged_amplitude().phase;
                Ok(Self {
                    decoherence: rate * t,
                    phase: phase_rate * t,
                    orthogonalization: ort * t,
                })
            }
        }
    }

    /// Finite-box exponents for exactly `n` scattered photons.
    pub fn for_count(model: &SphereModel, source: &PhotonSource, n: f64) -> Result<Self> {
        model.validate()?;
        if !(n >= 0.0 && n.is_finite()) {
            return Err(Error::InvalidParameter(format!("photon count {n}")));
        }
        let measure = source.measure(model)?;
        let transfer = Transfer::new(model, &measure)?;
        let avg = transfer.averaged_amplitude();
        let ln_b = if source.is_pure() {
            avg.ln_abs()
        } else {
            transfer.ln_overlap_exact()?
        };
        Ok(Self {
            decoherence: -n * avg.ln_abs(),
            phase: n * avg.overlap().arg(),
            orthogonalization: -n * ln_b,
        })
    }
}

/// Single-photon unitaries S₁, S₂ and the initial photon state on the
/// smallest space that holds both scattered branches.
///
/// For n modes the space has dimension 2n: S₁ = I and S₂ is the unitary
/// dilation [[W, (I−WW†)^½], [(I−W†W)^½, −W†]] of the transfer matrix W,
/// with ρ = diag(p) ⊕ 0. For one mode this is the span of S₁|k₀⟩, S₂|k₀⟩.
#[derive(Debug, Clone)]
pub struct PhotonBranches {
    pub s1: ComplexMatrix,
    pub s2: ComplexMatrix,
    pub rho: ComplexMatrix,
}

impl PhotonBranches {
    pub fn new(model: &SphereModel, source: &PhotonSource) -> Result<Self> {
        model.validate()?;
        let measure = source.measure(model)?;
        let transfer = Transfer::new(model, &measure)?;
        let n = transfer.len();
        let w = transfer.matrix();
        let e = transfer.deviation();
        let ea = e.adjoint();
        let sym = &e + &ea;
        // I − W†W = −(E + E† + E†E) with W = I + E keeps the O(1/L²) entries exact.
        let left = (&sym + &ea.matmul(&e)?).scale_real(-1.0);
        let right = (&sym + &e.matmul(&ea)?).scale_real(-1.0);
        let not_contraction = |e: Error| match e {
            Error::NotPositive { eigenvalue } => Error::Truncation(format!(
                "transfer matrix is not a contraction (I - W†W has eigenvalue {eigenvalue:e})"
            )),
            other => other,
        };
        let d_left = hermitian_function(&left, f64::sqrt).map_err(not_contraction)?;
        let d_right = hermitian_function(&right, f64::sqrt).map_err(not_contraction)?;
        let wa = w.adjoint();
        let s2 = ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, true) => w[(i, j)],
            (true, false) => d_right[(i, j - n)],
            (false, true) => d_left[(i - n, j)],
            (false, false) => -wa[(i - n, j - n)],
        });
        let defect = s2
            .adjoint()
            .matmul(&s2)?
            .max_abs_diff(&ComplexMatrix::identity(2 * n));
        if defect > 1e-10 {
            return Err(Error::Truncation(format!("dilated scattering matrix not unitary ({defect:e})")));
        }
        let mut diag = transfer.probabilities.clone();
        diag.resize(2 * n, 0.0);
        Ok(Self {
            s1: ComplexMatrix::identity(2 * n),
            s2,
            rho: ComplexMatrix::from_diag(&diag),
        })
    }

    /// Generic controlled-unitary environment.
    pub fn from_unitaries(s1: ComplexMatrix, s2: ComplexMatrix, rho: ComplexMatrix) -> Result<Self> {
        let d = rho.require_square()?;
        for s in [&s1, &s2] {
            if s.rows() != d || !s.is_square() {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: s.rows(),
                });
            }
            let defect = s.adjoint().matmul(s)?.max_abs_diff(&ComplexMatrix::identity(d));
            if defect > 1e-10 {
                return Err(Error::InvalidParameter(format!("environment operator not unitary ({defect:e})")));
            }
        }
        Ok(Self { s1, s2, rho })
    }

    pub fn dim(&self) -> usize {
        self.rho.rows()
    }

    /// S_i ρ S_j† for pointer indices i, j ∈ {0, 1}.
    pub fn block(&self, i: usize, j: usize) -> ComplexMatrix {
        let s = [&self.s1, &self.s2];
        s[i].matmul(&self.rho)
            .and_then(|m| m.matmul(&s[j].adjoint()))
            .expect("square operators of equal size")
    }

    /// Tr S₁ρS₂†
    pub fn cross_trace(&self) -> Complex64 {
        self.block(0, 1).trace()
    }
}

/// Effective two-dimensional branch vectors (1, 0) and (conj o, √(1−|o|²))
/// of a pure photon, so that ⟨ψ₂|ψ₁⟩ = o.
pub fn pure_branch_vectors(amp: &MicroAmplitude) -> [[Complex64; 2]; 2] {
    [
        [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
        [amp.overlap().conj(), Complex64::new(amp.budget().sqrt(), 0.0)],
    ]
}

/// Micro amplitude of the monochromatic mode.
pub fn k0_amplitude(model: &SphereModel) -> Result<MicroAmplitude> {
    micro_amplitude(model, model.k0_vector())
}
