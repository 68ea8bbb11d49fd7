use faer::Side;
use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Eigenvalues in `[-NEG_CLAMP, 0)` are round-off and become 0; anything more
/// negative means the input was not positive semidefinite.
pub const NEG_CLAMP: f64 = 1e-10;

/// Hermitian eigendecomposition: eigenvalues descending, columns of `vectors`
/// the matching eigenvectors with their first non-negligible component real
/// and positive.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        let n = self.vectors.rows();
        (0..n).map(|i| self.vectors[(i, k)]).collect()
    }
}

/// Eigendecomposition of the Hermitian part of `a`.
pub fn eigh(a: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = a.require_square()?;
    let h = a.hermitian_part().to_faer();
    let evd = h.self_adjoint_eigen(Side::Lower).map_err(|_| Error::EigenFailure)?;
    let u = evd.U();
    let s = evd.S().column_vector();
    let mut values = Vec::with_capacity(n);
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (out, k) in (0..n).rev().enumerate() {
        values.push(s[k].re);
        let pivot = (0..n)
            .map(|i| u[(i, k)])
            .find(|z| z.norm() > 1e-12)
            .unwrap_or(Complex64::new(1.0, 0.0));
        let phase = pivot.conj() / pivot.norm();
        for i in 0..n {
            vectors[(i, out)] = u[(i, k)] * phase;
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues of the Hermitian part of `a`, descending.
pub fn eigvalsh(a: &ComplexMatrix) -> Result<Vec<f64>> {
    a.require_square()?;
    let h = a.hermitian_part().to_faer();
    let mut vals = h
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenFailure)?;
    vals.reverse();
    Ok(vals)
}

/// Clamps round-off negatives to zero; errors on genuinely negative values.
pub fn clamp_nonnegative(values: &mut [f64]) -> Result<()> {
    for v in values.iter_mut() {
        if *v < 0.0 {
            if *v < -NEG_CLAMP {
                return Err(Error::NotPositive { eigenvalue: *v });
            }
            *v = 0.0;
        }
    }
    Ok(())
}

/// Singular values, descending.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    a.to_faer().singular_values().map_err(|_| Error::EigenFailure)
}

/// Singular values (descending) and the right singular vectors as columns.
pub fn singular_values_and_vectors(a: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let svd = a.to_faer().svd().map_err(|_| Error::EigenFailure)?;
    let s = svd.S().column_vector();
    let values = (0..s.nrows()).map(|k| s[k].re).collect();
    Ok((values, ComplexMatrix::from_faer(svd.V())))
}

/// Matrices at least this large try the low-rank path first.
pub const LOW_RANK_MIN_DIM: usize = 128;

/// Factor L (n×r) with A = LL† for a positive semidefinite `a` of numerical
/// rank r ≤ n/8, by diagonally pivoted Cholesky.
///
/// Pivoting stops once every residual diagonal entry is at round-off level
/// (64·ε·n times the largest diagonal entry). The factor is returned only if
/// Gershgorin's bound on the residual certifies λ_min(A) ≥ −[`NEG_CLAMP`];
/// otherwise, or when the rank is too high to pay off, the result is `None`.
pub fn low_rank_factor(a: &ComplexMatrix) -> Result<Option<ComplexMatrix>> {
    let n = a.require_square()?;
    pivoted_cholesky(a, n / 8)
}

/// [`low_rank_factor`] with an explicit rank cap.
pub fn pivoted_cholesky(a: &ComplexMatrix, max_rank: usize) -> Result<Option<ComplexMatrix>> {
    let n = a.require_square()?;
    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let scale = d.iter().copied().fold(0.0, f64::max);
    let floor = 64.0 * f64::EPSILON * n as f64 * scale;
    let mut cols: Vec<Vec<Complex64>> = Vec::new();
    loop {
        let (p, dp) = d
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, x)| if x > best.1 { (i, x) } else { best });
        if !(dp > floor) {
            break;
        }
        if cols.len() == max_rank {
            return Ok(None);
        }
        let s = dp.sqrt();
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for (i, slot) in col.iter_mut().enumerate() {
            // A_ip = conj(A_pi) keeps the row access contiguous.
            let mut v = a[(p, i)].conj();
            for c in &cols {
                v -= c[i] * c[p].conj();
            }
            *slot = v / s;
        }
        col[p] = Complex64::new(s, 0.0);
        for (x, c) in d.iter_mut().zip(&col) {
            *x -= c.norm_sqr();
        }
        d[p] = 0.0;
        cols.push(col);
    }
    let r = cols.len();
    let l = ComplexMatrix::from_fn(n, r, |i, k| cols[k][i]);
    // λ_min(A) ≥ λ_min(A − LL†) ≥ min_i (R_ii − Σ_{j≠i} |R_ij|)
    for i in 0..n {
        let mut off = 0.0;
        let mut diag = 0.0;
        for j in 0..n {
            let mut v = a[(i, j)];
            for c in &cols {
                v -= c[i] * c[j].conj();
            }
            if i == j {
                diag = v.re;
            } else {
                off += v.norm();
            }
        }
        if diag - off < -NEG_CLAMP {
            return Ok(None);
        }
    }
    Ok(Some(l))
}

/// Eigenvalues of a positive semidefinite matrix, descending and clamped.
/// Large low-rank inputs go through [`low_rank_factor`]; the discarded
/// spectrum is at round-off level and reported as zeros.
pub fn psd_spectrum(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = a.require_square()?;
    let mut vals = match large_factor(a)? {
        Some(l) if l.cols() == 0 => vec![0.0; n],
        Some(l) => {
            let mut v = eigvalsh(&l.adjoint().matmul(&l)?)?;
            v.resize(n, 0.0);
            v
        }
        None => eigvalsh(a)?,
    };
    clamp_nonnegative(&mut vals)?;
    Ok(vals)
}

pub(crate) fn large_factor(a: &ComplexMatrix) -> Result<Option<ComplexMatrix>> {
    if a.rows() < LOW_RANK_MIN_DIM {
        return Ok(None);
    }
    low_rank_factor(a)
}

/// ‖AB†‖_tr for A, B with equal column counts, from the triangular QR
/// factors so that nothing is squared.
pub fn trace_norm_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.cols() != b.cols() {
        return Err(Error::DimensionMismatch {
            expected: a.cols(),
            got: b.cols(),
        });
    }
    if a.cols() == 0 {
        return Ok(0.0);
    }
    let ra = thin_r(a);
    let rb = thin_r(b);
    Ok(singular_values(&ra.matmul(&rb.adjoint())?)?.iter().sum())
}

/// R of A = QR with Q having orthonormal columns; A itself when it is not
/// tall.
fn thin_r(a: &ComplexMatrix) -> ComplexMatrix {
    if a.rows() <= a.cols() {
        return a.clone();
    }
    let qr = a.to_faer().qr();
    ComplexMatrix::from_faer(qr.thin_R())
}

/// `f(A)` for Hermitian `A` by spectral calculus on the clamped spectrum.
pub fn hermitian_function(a: &ComplexMatrix, f: impl Fn(f64) -> f64) -> Result<ComplexMatrix> {
    let eig = eigh(a)?;
    let mut vals = eig.values.clone();
    clamp_nonnegative(&mut vals)?;
    Ok(reassemble(&eig.vectors, &vals.iter().map(|&v| f(v)).collect::<Vec<_>>()))
}

/// `V diag(d) V†`
pub(crate) fn reassemble(v: &ComplexMatrix, d: &[f64]) -> ComplexMatrix {
    let n = v.rows();
    let scaled = ComplexMatrix::from_fn(n, d.len(), |i, k| v[(i, k)] * d[k]);
    let keep: Vec<usize> = (0..d.len()).filter(|&k| d[k] != 0.0).collect();
    if keep.is_empty() {
        return ComplexMatrix::zeros(n, n);
    }
    let vs = ComplexMatrix::from_fn(n, keep.len(), |i, k| scaled[(i, keep[k])]);
    let vk = ComplexMatrix::from_fn(n, keep.len(), |i, k| v[(i, keep[k])]);
    vs.matmul(&vk.adjoint()).expect("shapes agree")
}
