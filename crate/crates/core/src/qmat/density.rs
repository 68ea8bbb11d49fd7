use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use super::eigen::{eigvalsh, large_factor, NEG_CLAMP};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

pub const TOL_HERM: f64 = 1e-10;
pub const TOL_TRACE: f64 = 1e-10;

/// Hermitian, positive semidefinite, unit-trace matrix with its tensor
/// factorization.
///
/// A state may instead be held as a factor F with ρ = FF†. The matrix is
/// then formed only on first access, and partial traces, entropies and
/// overlaps work on F directly.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    matrix: OnceLock<ComplexMatrix>,
    factor: Option<Arc<ComplexMatrix>>,
    dims: Vec<usize>,
}

impl PartialEq for DensityOperator {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims && self.matrix() == other.matrix()
    }
}

impl DensityOperator {
    /// Validates hermiticity, trace and positivity. Positivity costs a full
    /// eigenvalue solve unless a large state is certified through its
    /// low-rank factor.
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let defect = matrix.hermiticity_defect();
        if defect > TOL_HERM {
            return Err(Error::NotHermitian { deviation: defect });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TOL_TRACE || tr.im.abs() > TOL_TRACE {
            return Err(Error::InvalidTrace { trace: tr.re });
        }
        let rho = Self::checked_shape(matrix, dims)?;
        if large_factor(rho.matrix())?.is_some() {
            return Ok(rho);
        }
        let min = eigvalsh(rho.matrix())?.last().copied().unwrap_or(0.0);
        if min < -NEG_CLAMP {
            return Err(Error::NotPositive { eigenvalue: min });
        }
        Ok(rho)
    }

    /// Single-factor state.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        let n = matrix.rows();
        Self::new(matrix, vec![n])
    }

    /// Skips the spectral checks; for states that are valid by construction.
    pub(crate) fn new_unchecked(matrix: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(matrix.rows(), dims.iter().product::<usize>());
        Self {
            matrix: OnceLock::from(matrix),
            factor: None,
            dims,
        }
    }

    /// ρ = FF† for any F with unit Frobenius norm; positive by construction.
    pub fn from_factor(factor: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        check_dims(factor.rows(), &dims)?;
        let tr: f64 = factor.as_slice().iter().map(|z| z.norm_sqr()).sum();
        if !((tr - 1.0).abs() <= TOL_TRACE) {
            return Err(Error::InvalidTrace { trace: tr });
        }
        Ok(Self::from_factor_unchecked(factor, dims))
    }

    pub(crate) fn from_factor_unchecked(factor: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(factor.rows(), dims.iter().product::<usize>());
        Self {
            matrix: OnceLock::new(),
            factor: Some(Arc::new(factor)),
            dims,
        }
    }

    fn checked_shape(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let n = matrix.require_square()?;
        check_dims(n, &dims)?;
        Ok(Self::new_unchecked(matrix, dims))
    }

    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidParameter("zero or non-finite state vector".into()));
        }
        let v: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Ok(Self::new_unchecked(ComplexMatrix::outer(&v, &v), vec![v.len()]))
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self::new_unchecked(
            ComplexMatrix::identity(n).scale_real(1.0 / n as f64),
            vec![n],
        )
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        Self::from_matrix(ComplexMatrix::from_diag(probs))
    }

    /// Qubit state (I + r·σ)/2; |r| ≤ 1.
    pub fn qubit_from_bloch(r: [f64; 3]) -> Result<Self> {
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        if !len.is_finite() || len > 1.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!("Bloch vector length {len} > 1")));
        }
        let m = ComplexMatrix::from_row_major(
            2,
            2,
            vec![
                Complex64::new(0.5 * (1.0 + r[2]), 0.0),
                Complex64::new(0.5 * r[0], -0.5 * r[1]),
                Complex64::new(0.5 * r[0], 0.5 * r[1]),
                Complex64::new(0.5 * (1.0 - r[2]), 0.0),
            ],
        )?;
        Ok(Self::new_unchecked(m, vec![2]))
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        self.matrix.get_or_init(|| {
            let f = self.factor.as_ref().expect("state holds a matrix or a factor");
            if f.cols() <= 16 {
                f.gram()
            } else {
                f.matmul(&f.adjoint()).expect("conformable").hermitian_part()
            }
        })
    }

    /// F with ρ = FF†, when the state was built from one.
    pub fn factor(&self) -> Option<&ComplexMatrix> {
        self.factor.as_deref()
    }

    /// The factor when it is thinner than the state, so that working on
    /// it is cheaper than on ρ.
    pub(crate) fn thin_factor(&self) -> Option<&ComplexMatrix> {
        self.factor().filter(|f| f.cols() < f.rows())
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix();
        self.matrix.into_inner().expect("initialized above")
    }

    pub fn with_dims(self, dims: Vec<usize>) -> Result<Self> {
        check_dims(self.dim(), &dims)?;
        Ok(Self { dims, ..self })
    }

    /// U ρ U†
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        if let Some(f) = self.factor() {
            return Ok(Self::from_factor_unchecked(u.matmul(f)?, self.dims.clone()));
        }
        let m = u.matmul(self.matrix())?.matmul(&u.adjoint())?;
        Ok(Self::new_unchecked(m.hermitian_part(), self.dims.clone()))
    }

    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        if let (Some(a), Some(b)) = (self.factor(), other.factor()) {
            return Self::from_factor_unchecked(a.kron(b), dims);
        }
        Self::new_unchecked(self.matrix().kron(other.matrix()), dims)
    }
}

fn check_dims(n: usize, dims: &[usize]) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidSubsystems(format!("bad factor dims {dims:?}")));
    }
    let prod: usize = dims.iter().product();
    if prod != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: prod,
        });
    }
    Ok(())
}

/// Kronecker product for both raw matrices and states.
pub trait Tensor: Sized {
    fn tensor_with(&self, other: &Self) -> Self;
}

impl Tensor for ComplexMatrix {
    fn tensor_with(&self, other: &Self) -> Self {
        self.kron(other)
    }
}

impl Tensor for DensityOperator {
    fn tensor_with(&self, other: &Self) -> Self {
        self.tensor(other)
    }
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor_with(b)
}

/// Partial trace of a square matrix with factor dims `dims`, keeping the
/// factors in `keep` (in their original order).
pub fn partial_trace_matrix(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    let n = m.require_square()?;
    if dims.iter().product::<usize>() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: dims.iter().product(),
        });
    }
    let keep = validate_keep(keep, dims.len())?;
    let strides = strides(dims);
    let traced: Vec<usize> = (0..dims.len()).filter(|i| !keep.contains(i)).collect();
    let kept_offsets = offsets(&keep, dims, &strides);
    let traced_offsets = offsets(&traced, dims, &strides);
    let dk = kept_offsets.len();
    let data = m.as_slice();
    let mut out = ComplexMatrix::zeros(dk, dk);
    for (a, &ra) in kept_offsets.iter().enumerate() {
        for (b, &rb) in kept_offsets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &t in &traced_offsets {
                acc += data[(ra + t) * n + rb + t];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// Reduced state on the factors in `keep`. A factored state stays
/// factored: Tr_T FF† = KK† with K[a, (t, j)] = F[(a, t), j].
pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    let keep_sorted = validate_keep(keep, rho.dims.len())?;
    let dims: Vec<usize> = keep_sorted.iter().map(|&i| rho.dims[i]).collect();
    if let Some(f) = rho.factor() {
        let strides = strides(&rho.dims);
        let traced: Vec<usize> = (0..rho.dims.len()).filter(|i| !keep_sorted.contains(i)).collect();
        let kept_offsets = offsets(&keep_sorted, &rho.dims, &strides);
        let traced_offsets = offsets(&traced, &rho.dims, &strides);
        let r = f.cols();
        let cols = traced_offsets.len() * r;
        let src = f.as_slice();
        let mut k = Vec::with_capacity(kept_offsets.len() * cols);
        for &a in &kept_offsets {
            for &t in &traced_offsets {
                k.extend_from_slice(&src[(a + t) * r..(a + t + 1) * r]);
            }
        }
        let k = ComplexMatrix::from_row_major(kept_offsets.len(), cols, k)?;
        if cols >= k.rows() {
            return Ok(DensityOperator::new_unchecked(k.matmul(&k.adjoint())?.hermitian_part(), dims));
        }
        return Ok(DensityOperator::from_factor_unchecked(k, dims));
    }
    let m = partial_trace_matrix(rho.matrix(), &rho.dims, &keep_sorted)?;
    Ok(DensityOperator::new_unchecked(m, dims))
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1usize; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    strides
}

fn validate_keep(keep: &[usize], nsub: usize) -> Result<Vec<usize>> {
    if keep.is_empty() {
        return Err(Error::InvalidSubsystems("keep set is empty".into()));
    }
    let mut sorted = keep.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != keep.len() {
        return Err(Error::InvalidSubsystems(format!("duplicate indices in {keep:?}")));
    }
    if let Some(&bad) = sorted.iter().find(|&&i| i >= nsub) {
        return Err(Error::InvalidSubsystems(format!(
            "index {bad} out of range for {nsub} subsystems"
        )));
    }
    Ok(sorted)
}

/// Flat-index offsets of every multi-index over the listed factors.
fn offsets(factors: &[usize], dims: &[usize], strides: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &f in factors {
        let mut next = Vec::with_capacity(out.len() * dims[f]);
        for &o in &out {
            for x in 0..dims[f] {
                next.push(o + x * strides[f]);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_invalid_states() {
        let not_herm = ComplexMatrix::from_real(2, 2, &[0.5, 0.1, 0.0, 0.5]).unwrap();
        assert!(matches!(
            DensityOperator::from_matrix(not_herm),
            Err(Error::NotHermitian { .. })
        ));
        let bad_trace = ComplexMatrix::from_diag(&[0.5, 0.6]);
        assert!(matches!(
            DensityOperator::from_matrix(bad_trace),
            Err(Error::InvalidTrace { .. })
        ));
        let negative = ComplexMatrix::from_diag(&[1.1, -0.1]);
        assert!(matches!(
            DensityOperator::from_matrix(negative),
            Err(Error::NotPositive { .. })
        ));
        let wrong_dims = DensityOperator::new(ComplexMatrix::from_diag(&[1.0, 0.0, 0.0]), vec![2, 2]);
        assert!(wrong_dims.is_err());
    }

    #[test]
    fn tensor_identity_and_diagonal() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4));
        let p = 0.3;
        let a = DensityOperator::diagonal(&[1.0, 0.0]).unwrap();
        let b = DensityOperator::diagonal(&[p, 1.0 - p]).unwrap();
        let ab = tensor(&a, &b);
        assert_eq!(ab.dims(), &[2, 2]);
        assert_eq!(*ab.matrix(), ComplexMatrix::from_diag(&[p, 1.0 - p, 0.0, 0.0]));
    }

    #[test]
    fn partial_trace_bell_marginal() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let z = Complex64::new(0.0, 0.0);
        let phi = DensityOperator::pure(&[Complex64::new(s, 0.0), z, z, Complex64::new(s, 0.0)])
            .unwrap()
            .with_dims(vec![2, 2])
            .unwrap();
        for keep in [[0usize], [1]] {
            let r = partial_trace(&phi, &keep).unwrap();
            assert!(r.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_rejects_bad_sets() {
        let rho = DensityOperator::maximally_mixed(4).with_dims(vec![2, 2]).unwrap();
        assert!(partial_trace(&rho, &[]).is_err());
        assert!(partial_trace(&rho, &[2]).is_err());
        assert!(partial_trace(&rho, &[0, 0]).is_err());
    }

    #[test]
    fn bloch_constructor() {
        let rho = DensityOperator::qubit_from_bloch([1.0, 0.0, 0.0]).unwrap();
        assert!((rho.matrix()[(0, 1)].re - 0.5).abs() < 1e-16);
        assert!(DensityOperator::qubit_from_bloch([1.0, 1.0, 0.0]).is_err());
    }
}
