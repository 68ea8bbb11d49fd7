use num_complex::Complex64;

use super::partition::Partition;
use crate::error::{Error, Result};
use crate::qinfo::mutual_information;
use crate::qmat::{entropy_of_spectrum, ComplexMatrix, DensityOperator};
use crate::scatter::{exp_or_zero, BoxMode, PhotonBranches, PhotonExponents, PhotonSource, SphereModel};

/// A single-photon operator raised to a tensor power `count`.
///
/// `base` is S_iρS_i† for encoding states and S₁ρS₂† for the cross block.
#[derive(Debug, Clone)]
pub struct FactoredMacroState {
    pub base: ComplexMatrix,
    pub count: f64,
    pub is_state: bool,
}

impl FactoredMacroState {
    pub fn state(base: ComplexMatrix, count: f64) -> Result<Self> {
        DensityOperator::from_matrix(base.clone())?;
        Self::check_count(count)?;
        Ok(Self {
            base,
            count,
            is_state: true,
        })
    }

    pub fn block(base: ComplexMatrix, count: f64) -> Result<Self> {
        base.require_square()?;
        Self::check_count(count)?;
        Ok(Self {
            base,
            count,
            is_state: false,
        })
    }

    fn check_count(count: f64) -> Result<()> {
        if !(count >= 0.0 && count.is_finite()) {
            return Err(Error::InvalidParameter(format!("tensor power {count}")));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.base.rows()
    }
}

/// ρ_{S:fE}(t) in factored form: pointer populations, the coherence of
/// ρ₀^S, one representative encoding state per pointer value, and the
/// per-photon exponents that carry every powered overlap.
#[derive(Debug, Clone)]
pub struct SfEState {
    pub pointer_probs: [f64; 2],
    /// ⟨x₁|ρ₀^S|x₂⟩
    pub coherence: Complex64,
    pub partition: Partition,
    /// N_t; unrounded in the thermodynamic mode.
    pub photon_count: f64,
    pub mode: BoxMode,
    pub exponents: PhotonExponents,
    /// ρ_i^mac = (S_iρS_i†)^{⊗mN_t}, repeated fM times.
    pub diag_blocks: [FactoredMacroState; 2],
    /// (S₁ρS₂†)^{⊗fN_t}
    pub offdiag_block: FactoredMacroState,
    pub branches: PhotonBranches,
    pub pure_photons: bool,
}

impl SfEState {
    /// ln |γ| with γ = ⟨x₁|ρ₀^S|x₂⟩(Tr S₁ρS₂†)^{(1−f)N_t}.
    pub fn ln_offdiag_abs(&self) -> f64 {
        self.coherence.norm().ln() - (1.0 - self.partition.f) * self.exponents.decoherence
    }

    pub fn offdiag_coeff(&self) -> Complex64 {
        let f = self.partition.f;
        let phase = self.coherence.arg() + (1.0 - f) * self.exponents.phase;
        Complex64::from_polar(exp_or_zero(self.ln_offdiag_abs()), phase)
    }

    /// ln B(ρ₁^mac, ρ₂^mac) for one macro-fraction.
    pub fn ln_pairwise_overlap(&self) -> f64 {
        -self.partition.m * self.exponents.orthogonalization
    }

    /// Number of observed macro-fractions, fM.
    pub fn multiplicity(&self) -> usize {
        self.partition.observed
    }

    /// H({p₁, p₂})
    pub fn pointer_entropy(&self) -> f64 {
        entropy_of_spectrum(&self.pointer_probs).expect("validated probabilities")
    }

    fn require_pure(&self, what: &str) -> Result<()> {
        if self.pure_photons {
            Ok(())
        } else {
            Err(Error::Unsupported(format!(
                "{what} has no factored form for a mixed photon source; use the explicit state"
            )))
        }
    }

    /// ⟨Ψ₁|Ψ₂⟩ for the fN_t observed photons in branch states Ψ_i; pure
    /// photons only. Returned as (ln modulus, argument).
    fn observed_overlap(&self) -> (f64, f64) {
        let f = self.partition.f;
        (-f * self.exponents.decoherence, -f * self.exponents.phase)
    }

    /// S and the observed photons restricted to span{|x_i⟩} ⊗ span{Ψ₁, Ψ₂}.
    ///
    /// With Ψ₁ = (1, 0) and Ψ₂ = (g, √(1−|g|²)) the state is 4×4 however
    /// many photons are observed.
    pub fn gram_state(&self) -> Result<DensityOperator> {
        self.require_pure("the mutual information")?;
        let (ln_g, arg_g) = self.observed_overlap();
        let g = Complex64::from_polar(exp_or_zero(ln_g), arg_g);
        let s = (-(2.0 * ln_g).exp_m1()).max(0.0).sqrt();
        let zero = Complex64::new(0.0, 0.0);
        let psi = [[Complex64::new(1.0, 0.0), zero], [g, Complex64::new(s, 0.0)]];
        let gamma = self.offdiag_coeff();
        let coef = [
            [Complex64::new(self.pointer_probs[0], 0.0), gamma],
            [gamma.conj(), Complex64::new(self.pointer_probs[1], 0.0)],
        ];
        let m = ComplexMatrix::from_fn(4, 4, |r, c| {
            let (i, a) = (r / 2, r % 2);
            let (j, b) = (c / 2, c % 2);
            coef[i][j] * psi[i][a] * psi[j][b].conj()
        });
        Ok(DensityOperator::new_unchecked(m.hermitian_part(), vec![2, 2]))
    }

    /// I(S : fE) in bits from the 4×4 reduction; pure photons only.
    pub fn mutual_information(&self) -> Result<f64> {
        let rho = self.gram_state()?;
        mutual_information(&rho, &[0])
    }

    /// χ of {p_i, Ψ_i} over all observed photons; pure photons only.
    pub fn holevo_chi(&self) -> Result<f64> {
        self.require_pure("the Holevo quantity")?;
        let (ln_g, _) = self.observed_overlap();
        let [p1, p2] = self.pointer_probs;
        // Eigenvalues of p₁|Ψ₁⟩⟨Ψ₁| + p₂|Ψ₂⟩⟨Ψ₂|: (1 ± √(1 − 4p₁p₂(1−|g|²)))/2.
        let q = 4.0 * p1 * p2 * -(2.0 * ln_g).exp_m1();
        let root = (1.0 - q).max(0.0).sqrt();
        let small = q / (2.0 * (1.0 + root));
        entropy_of_spectrum(&[1.0 - small, small])
    }
}

/// ρ_{S:fE}(t) for a qubit pointer state and a photon source.
pub fn build_sfe_state(
    model: &SphereModel,
    source: &PhotonSource,
    rho0_s: &DensityOperator,
    f: f64,
    m: f64,
    t: f64,
    mode: BoxMode,
) -> Result<SfEState> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter(format!("time {t}")));
    }
    let partition = Partition::new(f, m)?;
    let n_t = match mode {
        BoxMode::FiniteBox => model.photon_count_rounded(t),
        BoxMode::Thermodynamic => model.photon_count(t),
    };
    if mode == BoxMode::FiniteBox {
        partition.check_count(n_t)?;
    }
    let exponents = PhotonExponents::new(model, source, t, mode)?;
    assemble(model, source, rho0_s, partition, n_t, mode, exponents)
}

/// Finite-box ρ_{S:fE} after exactly `n_t` photons.
pub fn build_sfe_state_for_count(
    model: &SphereModel,
    source: &PhotonSource,
    rho0_s: &DensityOperator,
    f: f64,
    m: f64,
    n_t: usize,
) -> Result<SfEState> {
    let partition = Partition::new(f, m)?;
    let n = n_t as f64;
    partition.check_count(n)?;
    let exponents = PhotonExponents::for_count(model, source, n)?;
    assemble(model, source, rho0_s, partition, n, BoxMode::FiniteBox, exponents)
}

fn assemble(
    model: &SphereModel,
    source: &PhotonSource,
    rho0_s: &DensityOperator,
    partition: Partition,
    n_t: f64,
    mode: BoxMode,
    exponents: PhotonExponents,
) -> Result<SfEState> {
    if rho0_s.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: rho0_s.dim(),
        });
    }
    let r = rho0_s.matrix();
    let (d0, d1) = (r[(0, 0)].re.max(0.0), r[(1, 1)].re.max(0.0));
    let pointer_probs = [d0 / (d0 + d1), d1 / (d0 + d1)];
    let branches = PhotonBranches::new(model, source)?;
    let macro_count = partition.m * n_t;
    let diag_blocks = [
        FactoredMacroState::state(branches.block(0, 0), macro_count)?,
        FactoredMacroState::state(branches.block(1, 1), macro_count)?,
    ];
    let offdiag_block = FactoredMacroState::block(branches.block(0, 1), partition.f * n_t)?;
    Ok(SfEState {
        pointer_probs,
        coherence: r[(0, 1)],
        partition,
        photon_count: n_t,
        mode,
        exponents,
        diag_blocks,
        offdiag_block,
        branches,
        pure_photons: source.is_pure(),
    })
}

/// ‖ρ^{i≠j}_{S:fE}‖_tr = 2|γ|: the cross block is a tensor power of a
/// trace-norm-one operator.
pub fn coherent_norm(state: &SfEState) -> f64 {
    2.0 * state.offdiag_coeff().norm()
}

/// Pointer populations recovered from the traces of the encoding blocks.
pub(crate) fn spectrum_of(state: &SfEState) -> Result<[f64; 2]> {
    let mut out = [0.0; 2];
    for (i, block) in state.diag_blocks.iter().enumerate() {
        let tr = block.base.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::InvalidTrace { trace: tr.re });
        }
        out[i] = state.pointer_probs[i] * tr.re;
    }
    Ok(out)
}
