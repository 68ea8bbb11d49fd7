use num_complex::Complex64;

use super::density::DensityOperator;
use super::eigen::{
    clamp_nonnegative, eigh, eigvalsh, large_factor, psd_spectrum, reassemble, singular_values, trace_norm_of_product,
};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Sum of singular values.
pub fn trace_norm(a: &ComplexMatrix) -> Result<f64> {
    a.require_square()?;
    Ok(singular_values(a)?.iter().sum())
}

/// Generalized overlap (fidelity) Tr√(√ρ₁ ρ₂ √ρ₁), in [0, 1].
pub fn gen_overlap(rho1: &DensityOperator, rho2: &DensityOperator) -> Result<f64> {
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho1.dim(),
            got: rho2.dim(),
        });
    }
    if let (Some(a), Some(b)) = (rho1.factor(), rho2.factor()) {
        return Ok(trace_norm_of_product(&a.adjoint(), &b.adjoint())?.min(1.0));
    }
    Ok(gen_overlap_psd(rho1.matrix(), rho2.matrix())?.min(1.0))
}

/// Tr√(√A B √A) for positive semidefinite `A`, `B` of any trace.
///
/// Evaluated as ‖√A √B‖_tr. The square roots come from Hermitian
/// eigendecompositions whose round-off eigenvalues (below `n·ε·λ_max`
/// scale) are set to zero; otherwise their square roots, of order 1e-8,
/// would swamp overlaps between nearly orthogonal states.
pub fn gen_overlap_psd(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let n = a.require_square()?;
    if b.rows() != n || !b.is_square() {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.rows(),
        });
    }
    if let (Some(la), Some(lb)) = (large_factor(a)?, large_factor(b)?) {
        // √A = L_A V for a partial isometry V, so the trace norm is ‖L_A†L_B‖.
        if la.cols() == 0 || lb.cols() == 0 {
            return Ok(0.0);
        }
        return Ok(singular_values(&la.adjoint().matmul(&lb)?)?.iter().sum());
    }
    let ra = psd_sqrt(a)?;
    let rb = psd_sqrt(b)?;
    Ok(singular_values(&ra.matmul(&rb)?)?.iter().sum())
}

fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eigh(a)?;
    let mut vals = eig.values.clone();
    clamp_nonnegative(&mut vals)?;
    let floor = roundoff_floor(&vals);
    let roots: Vec<f64> = vals
        .iter()
        .map(|&v| if v <= floor { 0.0 } else { v.sqrt() })
        .collect();
    Ok(reassemble(&eig.vectors, &roots))
}

fn roundoff_floor(vals: &[f64]) -> f64 {
    let max = vals.iter().copied().fold(0.0, f64::max);
    64.0 * f64::EPSILON * vals.len() as f64 * max
}

/// −Σ λ log₂ λ over a clamped spectrum.
pub fn entropy_of_spectrum(values: &[f64]) -> Result<f64> {
    let mut v = values.to_vec();
    clamp_nonnegative(&mut v)?;
    Ok(v.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum::<f64>().max(0.0))
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityOperator) -> Result<f64> {
    match rho.thin_factor() {
        // FF† and F†F share their nonzero spectrum.
        Some(f) => entropy_of_spectrum(&eigvalsh(&f.adjoint().matmul(f)?)?),
        None => entropy_of_spectrum(&psd_spectrum(rho.matrix())?),
    }
}

/// Entropy of a Hermitian PSD matrix of arbitrary size, without wrapping it
/// in a `DensityOperator`.
pub fn matrix_entropy(m: &ComplexMatrix) -> Result<f64> {
    entropy_of_spectrum(&psd_spectrum(m)?)
}

/// Smallest eigenvalue of ρ^{T_k} for a bipartite state, transposing factor
/// `subsystem` (0 or 1).
pub fn partial_transpose_min_eig(rho: &DensityOperator, subsystem: usize) -> Result<f64> {
    let dims = rho.dims();
    if dims.len() != 2 {
        return Err(Error::NotBipartite(dims.len()));
    }
    if subsystem > 1 {
        return Err(Error::InvalidSubsystems(format!("subsystem {subsystem} of a bipartite state")));
    }
    let (da, db) = (dims[0], dims[1]);
    let m = rho.matrix();
    let pt = ComplexMatrix::from_fn(da * db, da * db, |r, c| {
        let (i, k) = (r / db, r % db);
        let (j, l) = (c / db, c % db);
        if subsystem == 0 {
            m[(j * db + k, i * db + l)]
        } else {
            m[(i * db + l, j * db + k)]
        }
    });
    Ok(*eigvalsh(&pt)?.last().expect("nonempty"))
}

/// h(p) = −p log₂ p − (1−p) log₂(1−p)
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    Ok(h2(p))
}

pub(crate) fn h2(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    term(p) + term(1.0 - p)
}

/// ⟨u|v⟩
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn trace_norm_examples() {
        assert_eq!(trace_norm(&ComplexMatrix::zeros(3, 3)).unwrap(), 0.0);
        let sx = ComplexMatrix::from_real(2, 2, &[0.0, 0.3, 0.3, 0.0]).unwrap();
        assert!((trace_norm(&sx).unwrap() - 0.6).abs() < 1e-15);
        let rho = DensityOperator::diagonal(&[0.25, 0.75]).unwrap();
        assert!((trace_norm(rho.matrix()).unwrap() - 1.0).abs() < 1e-15);
        assert!(trace_norm(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn overlap_examples() {
        let zero = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
        let one = DensityOperator::diagonal(&[0.0, 1.0]).unwrap();
        assert_eq!(gen_overlap(&zero, &one).unwrap(), 0.0);
        let mixed = DensityOperator::diagonal(&[0.3, 0.7]).unwrap();
        assert!((gen_overlap(&mixed, &mixed).unwrap() - 1.0).abs() < 1e-14);
        let three = DensityOperator::maximally_mixed(3);
        assert!(gen_overlap(&zero, &three).is_err());
    }

    #[test]
    fn overlap_of_nearly_orthogonal_pure_states() {
        let eps = 1e-12;
        let a = DensityOperator::pure(&[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let b = DensityOperator::pure(&[c(eps, 0.0), c(0.0, 1.0)]).unwrap();
        let got = gen_overlap(&a, &b).unwrap();
        assert!((got - eps).abs() < 1e-15, "{got}");
    }

    #[test]
    fn entropy_examples() {
        let pure = DensityOperator::pure(&[c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-12);
        let half = DensityOperator::maximally_mixed(2);
        assert!((von_neumann_entropy(&half).unwrap() - 1.0).abs() < 1e-15);
        let d = DensityOperator::diagonal(&[0.58, 0.42]).unwrap();
        let want = -0.58 * 0.58f64.log2() - 0.42 * 0.42f64.log2();
        assert!((von_neumann_entropy(&d).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert!((binary_entropy(0.58).unwrap() - 0.981_453_895_033_653_7).abs() < 1e-15);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.5).is_err());
        for i in 0..=1000 {
            let p = i as f64 / 1000.0;
            assert!(binary_entropy(p).unwrap() <= 2.0 * (p * (1.0 - p)).sqrt() + 1e-15);
        }
    }

    #[test]
    fn ppt_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        let bell = DensityOperator::pure(&[c(s, 0.0), z, z, c(s, 0.0)])
            .unwrap()
            .with_dims(vec![2, 2])
            .unwrap();
        for k in 0..2 {
            assert!((partial_transpose_min_eig(&bell, k).unwrap() + 0.5).abs() < 1e-14);
        }
        let prod = DensityOperator::diagonal(&[0.2, 0.8])
            .unwrap()
            .tensor(&DensityOperator::qubit_from_bloch([0.3, 0.1, 0.5]).unwrap());
        assert!(partial_transpose_min_eig(&prod, 1).unwrap() >= -1e-15);
        assert!(partial_transpose_min_eig(&DensityOperator::maximally_mixed(2), 0).is_err());
    }
}
