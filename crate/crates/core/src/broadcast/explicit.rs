use num_complex::Complex64;

use super::partition::Partition;
use super::state::SfEState;
use crate::error::{Error, Result};
use crate::qinfo::{holevo_chi, mutual_information, EnsembleCQ};
use crate::qmat::{
    gen_overlap, low_rank_factor, partial_trace, partial_trace_matrix, pivoted_cholesky, singular_values, trace_norm_of_product,
    ComplexMatrix, DensityOperator, LOW_RANK_MIN_DIM,
};
use crate::scatter::{exp_or_zero, BoxMode, PhotonBranches, PhotonExponents, PhotonSource, SphereModel};

/// Largest total dimension (system and every photon) built densely.
pub const MAX_EXPLICIT_DIM: usize = 1 << 12;

/// Applies U = Σ_i |i⟩⟨i| ⊗ S_i^{(1)} ⊗ … ⊗ S_i^{(n)} to ρ_S ⊗ ρ₁ ⊗ … ⊗ ρ_n
/// as a dense matrix, then traces out every environment factor k with
/// `keep[k] == false`.
pub fn simulate_controlled(rho_s: &DensityOperator, envs: &[PhotonBranches], keep: &[bool]) -> Result<DensityOperator> {
    if rho_s.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: rho_s.dim(),
        });
    }
    if keep.len() != envs.len() {
        return Err(Error::DimensionMismatch {
            expected: envs.len(),
            got: keep.len(),
        });
    }
    let mut dims = vec![2usize];
    dims.extend(envs.iter().map(PhotonBranches::dim));
    let total = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .filter(|&d| d <= MAX_EXPLICIT_DIM)
        .ok_or(Error::DimensionOverflow {
            dim: dims.iter().map(|&d| d as f64).product::<f64>() as usize,
            cap: MAX_EXPLICIT_DIM,
        })?;

    let kept: Vec<usize> = std::iter::once(0)
        .chain(keep.iter().enumerate().filter(|(_, &k)| k).map(|(i, _)| i + 1))
        .collect();

    if let Some(mut l) = product_factor(rho_s, envs)?.filter(|l| 4 * l.cols() <= total) {
        // UρU† = (UL)(UL)† with ρ = LL†.
        for (k, e) in envs.iter().enumerate() {
            apply_controlled_left(&mut l, &dims, k + 1, [&e.s1, &e.s2]);
        }
        return partial_trace(&DensityOperator::from_factor(l, dims)?, &kept);
    }
    let mut rho = rho_s.matrix().clone();
    for e in envs {
        rho = rho.kron(&e.rho);
    }
    // UρU† = U(Uρ)† for Hermitian ρ.
    for (k, e) in envs.iter().enumerate() {
        apply_controlled_left(&mut rho, &dims, k + 1, [&e.s1, &e.s2]);
    }
    rho = rho.adjoint();
    for (k, e) in envs.iter().enumerate() {
        apply_controlled_left(&mut rho, &dims, k + 1, [&e.s1, &e.s2]);
    }
    let reduced = partial_trace_matrix(&rho, &dims, &kept)?;
    let kept_dims = kept.iter().map(|&i| dims[i]).collect();
    DensityOperator::new(reduced.hermitian_part(), kept_dims)
}

/// L_S ⊗ L₁ ⊗ … ⊗ L_n from per-factor Cholesky factors, or None if any
/// factor is not certified.
fn product_factor(rho_s: &DensityOperator, envs: &[PhotonBranches]) -> Result<Option<ComplexMatrix>> {
    let factor = |m: &ComplexMatrix| pivoted_cholesky(m, m.rows());
    let Some(mut l) = factor(rho_s.matrix())? else {
        return Ok(None);
    };
    for e in envs {
        let Some(f) = factor(&e.rho)? else {
            return Ok(None);
        };
        l = l.kron(&f);
    }
    Ok(Some(l))
}

/// Left-multiplies by the operator acting on factor `site`, picking
/// `ops[i]` on rows whose system index is i.
fn apply_controlled_left(m: &mut ComplexMatrix, dims: &[usize], site: usize, ops: [&ComplexMatrix; 2]) {
    let n = m.rows();
    let cols = m.cols();
    let d = dims[site];
    let stride: usize = dims[site + 1..].iter().product();
    let half = n / 2;
    let data = m.as_mut_slice();
    let mut col = vec![Complex64::new(0.0, 0.0); d];
    for base in 0..n {
        if (base / stride) % d != 0 {
            continue;
        }
        let op = ops[base / half];
        for c in 0..cols {
            for (a, slot) in col.iter_mut().enumerate() {
                *slot = data[(base + a * stride) * cols + c];
            }
            for a in 0..d {
                let mut acc = Complex64::new(0.0, 0.0);
                for (b, v) in col.iter().enumerate() {
                    acc += op[(a, b)] * v;
                }
                data[(base + a * stride) * cols + c] = acc;
            }
        }
    }
}

/// ρ_{S:fE} after `n_t` photons built by brute force, each photon on its
/// effective branch space. The fN_t observed photons come first.
pub fn explicit_small_state(
    model: &SphereModel,
    source: &PhotonSource,
    rho0_s: &DensityOperator,
    f: f64,
    m: f64,
    n_t: usize,
) -> Result<DensityOperator> {
    let partition = Partition::new(f, m)?;
    partition.check_count(n_t as f64)?;
    let photon = PhotonBranches::new(model, source)?;
    let observed = partition.observed_photons(n_t);
    let envs = vec![photon; n_t];
    let keep: Vec<bool> = (0..n_t).map(|k| k < observed).collect();
    simulate_controlled(rho0_s, &envs, &keep)
}

/// Two-level register whose branch states have ⟨Ψ₂|Ψ₁⟩ = z, with z given
/// as (ln |z|, arg z).
pub fn register_branches(ln_abs: f64, arg: f64) -> PhotonBranches {
    let z = Complex64::from_polar(exp_or_zero(ln_abs), arg);
    let s = Complex64::new((-(2.0 * ln_abs).exp_m1()).max(0.0).sqrt(), 0.0);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    PhotonBranches {
        s1: ComplexMatrix::identity(2),
        s2: ComplexMatrix::from_row_major(2, 2, vec![z.conj(), -s, s, z]).expect("finite entries"),
        rho: ComplexMatrix::from_row_major(2, 2, vec![one, zero, zero, zero]).expect("finite entries"),
    }
}

/// ρ_{S:fE} with each observed macro-fraction of pure photons collapsed
/// onto the span of its two branch states, and the unobserved photons
/// held in one traced register. Exact for any photon count.
pub fn explicit_macro_register_state(state: &SfEState) -> Result<DensityOperator> {
    if !state.pure_photons {
        return Err(Error::Unsupported(
            "macro-fraction registers need a pure photon state".into(),
        ));
    }
    let p = state.partition;
    let e = state.exponents;
    let mut envs = vec![register_branches(-p.m * e.decoherence, p.m * e.phase); p.observed];
    let mut keep = vec![true; p.observed];
    if p.observed < p.fractions {
        envs.push(register_branches(-(1.0 - p.f) * e.decoherence, (1.0 - p.f) * e.phase));
        keep.push(false);
    }
    let rho_s = pointer_state(state)?;
    simulate_controlled(&rho_s, &envs, &keep)
}

fn pointer_state(state: &SfEState) -> Result<DensityOperator> {
    let [p1, p2] = state.pointer_probs;
    let c = state.coherence;
    let m = ComplexMatrix::from_row_major(
        2,
        2,
        vec![Complex64::new(p1, 0.0), c, c.conj(), Complex64::new(p2, 0.0)],
    )?;
    DensityOperator::new(m, vec![2])
}

/// ρ_{S:μE}(t): `micro` individual photons observed, the other N_t − μ
/// traced out through a single register. In the thermodynamic mode the
/// traced register carries the full decoherence exponent.
pub fn explicit_micro_fraction_state(
    model: &SphereModel,
    source: &PhotonSource,
    rho0_s: &DensityOperator,
    micro: usize,
    t: f64,
    mode: BoxMode,
) -> Result<DensityOperator> {
    let e = PhotonExponents::new(model, source, t, mode)?;
    let rest = match mode {
        BoxMode::FiniteBox => {
            let n = model.photon_count_rounded(t);
            if (micro as f64) > n {
                return Err(Error::Partition(format!("{micro} observed photons exceed N_t = {n}")));
            }
            if n == 0.0 {
                0.0
            } else {
                (n - micro as f64) / n
            }
        }
        BoxMode::Thermodynamic => 1.0,
    };
    let photon = PhotonBranches::new(model, source)?;
    let mut envs = vec![photon; micro];
    envs.push(register_branches(-rest * e.decoherence, rest * e.phase));
    let mut keep = vec![true; micro];
    keep.push(false);
    simulate_controlled(rho0_s, &envs, &keep)
}

/// Scalar functionals shared by the factored and explicit paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Functionals {
    pub mutual_information: f64,
    pub coherent_norm: f64,
    /// B between the encoding states of the first macro-fraction; absent
    /// when nothing is observed.
    pub pairwise_overlap: Option<f64>,
    pub holevo_chi: f64,
    pub spectrum: [f64; 2],
}

/// Functionals of a dense ρ_{S:fE} whose first factor is the system; the
/// first `group` environment factors form one macro-fraction.
pub fn explicit_functionals(rho: &DensityOperator, group: usize) -> Result<Functionals> {
    let dims = rho.dims().to_vec();
    if dims.first() != Some(&2) {
        return Err(Error::InvalidSubsystems("first factor must be the qubit system".into()));
    }
    let env_dims = &dims[1..];
    if group > env_dims.len() {
        return Err(Error::InvalidSubsystems(format!(
            "macro-fraction of {group} factors exceeds the {} observed",
            env_dims.len()
        )));
    }
    let de: usize = env_dims.iter().product();
    // With ρ = LL† and L split by system row into L₀, L₁, block (i, j) of
    // ρ is L_iL_j†.
    let factor = match rho.factor() {
        Some(l) => Some(l.clone()),
        None if rho.dim() >= LOW_RANK_MIN_DIM => low_rank_factor(rho.matrix())?,
        None => None,
    };
    let halves = factor.map(|l| {
        let r = l.cols();
        let data = l.into_vec();
        [0, 1].map(|i| {
            ComplexMatrix::from_row_major(de, r, data[i * de * r..(i + 1) * de * r].to_vec()).expect("row split")
        })
    });
    let block = |i: usize, j: usize| {
        let m = rho.matrix();
        ComplexMatrix::from_fn(de, de, |r, c| m[(i * de + r, j * de + c)])
    };

    let spectrum = match &halves {
        Some(h) => h.each_ref().map(|l| l.as_slice().iter().map(|z| z.norm_sqr()).sum()),
        None => [block(0, 0).trace().re, block(1, 1).trace().re],
    };
    let coherent_norm = 2.0 * match &halves {
        Some([l0, l1]) => trace_norm_of_product(l0, l1)?,
        None => singular_values(&block(0, 1))?.iter().sum::<f64>(),
    };

    if env_dims.is_empty() {
        return Ok(Functionals {
            mutual_information: 0.0,
            coherent_norm,
            pairwise_overlap: None,
            holevo_chi: 0.0,
            spectrum,
        });
    }

    let mutual_information = mutual_information(rho, &[0])?;
    let mut probs = Vec::new();
    let mut states = Vec::new();
    for (i, &p) in spectrum.iter().enumerate() {
        if p > 0.0 {
            probs.push(p);
            states.push(match &halves {
                Some(h) => DensityOperator::from_factor_unchecked(h[i].scale_real(p.sqrt().recip()), env_dims.to_vec()),
                None => DensityOperator::new_unchecked(block(i, i).scale_real(1.0 / p), env_dims.to_vec()),
            });
        }
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    let holevo_chi = holevo_chi(&EnsembleCQ::new(probs, states.clone())?)?;

    let pairwise_overlap = if group == 0 {
        None
    } else if states.len() < 2 {
        Some(1.0)
    } else {
        let first: Vec<usize> = (0..group).collect();
        let a = partial_trace(&states[0], &first)?;
        let b = partial_trace(&states[1], &first)?;
        Some(gen_overlap(&a, &b)?)
    };

    Ok(Functionals {
        mutual_information,
        coherent_norm,
        pairwise_overlap,
        holevo_chi,
        spectrum,
    })
}

/// The same functionals from the factored state; pure photons only for
/// the two information measures.
pub fn factored_functionals(state: &SfEState) -> Result<Functionals> {
    Ok(Functionals {
        mutual_information: state.mutual_information()?,
        coherent_norm: super::state::coherent_norm(state),
        pairwise_overlap: (state.multiplicity() > 0).then(|| exp_or_zero(state.ln_pairwise_overlap())),
        holevo_chi: state.holevo_chi()?,
        spectrum: state.pointer_probs,
    })
}
