use num_complex::Complex64;

use crate::broadcast::{build_sfe_state, verify_broadcast};
use crate::error::{Error, Result};
use crate::qmat::{singular_values_and_vectors, ComplexMatrix, DensityOperator};
use crate::scatter::{BoxMode, PhotonSource, SphereModel};

const STOCHASTIC_TOL: f64 = 1e-12;

/// P_ij = |⟨φ_i|x_j⟩|²: how a spectrum λ in the basis {φ_i} lands on the
/// pointer populations, p_j = Σ_i λ_i P_ij.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrixP {
    entries: Vec<Vec<f64>>,
}

impl StochasticMatrixP {
    /// Bistochastic matrix from explicit entries.
    pub fn from_entries(entries: Vec<Vec<f64>>) -> Result<Self> {
        let n = entries.len();
        if n == 0 {
            return Err(Error::InvalidParameter("empty stochastic matrix".into()));
        }
        if let Some(r) = entries.iter().find(|r| r.len() != n) {
            return Err(Error::NotSquare { rows: n, cols: r.len() });
        }
        for i in 0..n {
            let row: f64 = entries[i].iter().sum();
            let col: f64 = entries.iter().map(|r| r[i]).sum();
            if (row - 1.0).abs() > STOCHASTIC_TOL || (col - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::InvalidParameter(format!(
                    "row/column {i} sums to {row}/{col}; matrix is not bistochastic"
                )));
            }
            if let Some(&x) = entries[i].iter().find(|&&x| !(x >= 0.0)) {
                return Err(Error::InvalidParameter(format!("negative entry {x}")));
            }
        }
        Ok(Self { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Vec<f64>] {
        &self.entries
    }

    /// λ ↦ (Σ_i λ_i P_ij)_j
    pub fn apply(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        if lambda.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: lambda.len(),
            });
        }
        Ok((0..n)
            .map(|j| (0..n).map(|i| lambda[i] * self.entries[i][j]).sum())
            .collect())
    }
}

/// Squared overlaps of an orthonormal qubit basis {φ₁, φ₂} with the
/// pointer basis.
pub fn pf_matrix(phi: &[[Complex64; 2]; 2]) -> Result<StochasticMatrixP> {
    for i in 0..2 {
        for j in 0..2 {
            let ip: Complex64 = (0..2).map(|a| phi[i][a].conj() * phi[j][a]).sum();
            let want = if i == j { 1.0 } else { 0.0 };
            if (ip - want).norm() > STOCHASTIC_TOL {
                return Err(Error::InvalidParameter(format!(
                    "basis not orthonormal: ⟨φ{i}|φ{j}⟩ = {ip}"
                )));
            }
        }
    }
    let entries = (0..2)
        .map(|i| (0..2).map(|j| phi[i][j].norm_sqr()).collect::<Vec<_>>())
        .collect::<Vec<_>>();
    // Orthonormality makes the rows and columns sum to one up to round-off.
    let entries = entries
        .iter()
        .map(|r| {
            let s: f64 = r.iter().sum();
            r.iter().map(|x| x / s).collect()
        })
        .collect();
    StochasticMatrixP::from_entries(entries)
}

/// A stationary distribution λ* = λ*P. When the fixed space has more than
/// one dimension the uniform distribution projected onto it is returned.
pub fn pf_stationary(p: &StochasticMatrixP) -> Result<Vec<f64>> {
    let n = p.dim();
    // λP = λ ⇔ (Pᵀ − I)λ = 0
    let a = ComplexMatrix::from_fn(n, n, |i, j| {
        let d = if i == j { 1.0 } else { 0.0 };
        Complex64::new(p.entries[j][i] - d, 0.0)
    });
    let (sv, v) = singular_values_and_vectors(&a)?;
    let scale = sv.first().copied().unwrap_or(0.0).max(1.0);
    let null: Vec<usize> = (0..n).filter(|&k| sv[k] <= 1e-10 * scale).collect();
    if null.is_empty() {
        return Err(Error::EigenFailure);
    }
    let uniform = 1.0 / n as f64;
    let mut lambda = vec![0.0; n];
    for &k in &null {
        let c: f64 = (0..n).map(|i| v[(i, k)].re * uniform).sum();
        for i in 0..n {
            lambda[i] += c * v[(i, k)].re;
        }
    }
    let total: f64 = lambda.iter().sum();
    if total.abs() < 1e-14 {
        // The uniform vector is orthogonal to the fixed space; use the
        // first null vector instead.
        lambda = (0..n).map(|i| v[(i, null[0])].re).collect();
    }
    let total: f64 = lambda.iter().sum();
    let mut lambda: Vec<f64> = lambda.iter().map(|x| x / total).collect();
    for x in lambda.iter_mut() {
        if *x < 0.0 && *x > -1e-12 {
            *x = 0.0;
        }
    }
    if lambda.iter().any(|&x| x < 0.0) {
        return Err(Error::NotPositive {
            eigenvalue: lambda.iter().cloned().fold(f64::INFINITY, f64::min),
        });
    }
    Ok(lambda)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PfReport {
    /// Spectrum of ρ₀^S in the basis {φ_i}.
    pub input: Vec<f64>,
    /// Pointer populations recovered from the broadcast state.
    pub output: Vec<f64>,
    pub stationary: Vec<f64>,
    /// max_i |output_i − input_i|
    pub deviation: f64,
}

/// Prepares ρ₀^S = Σ λ_i|φ_i⟩⟨φ_i|, broadcasts it, and compares the
/// spectrum the environment carries with λ.
#[allow(clippy::too_many_arguments)]
pub fn pf_broadcast_check(
    model: &SphereModel,
    source: &PhotonSource,
    phi: &[[Complex64; 2]; 2],
    lambda: [f64; 2],
    f: f64,
    m: f64,
    t: f64,
    mode: BoxMode,
) -> Result<PfReport> {
    let p = pf_matrix(phi)?;
    let stationary = pf_stationary(&p)?;
    let mut rho = ComplexMatrix::zeros(2, 2);
    for (l, v) in lambda.iter().zip(phi) {
        rho = &rho + &ComplexMatrix::outer(v, v).scale_real(*l);
    }
    let rho = DensityOperator::new(rho.hermitian_part(), vec![2])?;
    let state = build_sfe_state(model, source, &rho, f, m, t, mode)?;
    let report = verify_broadcast(&state, crate::broadcast::DEFAULT_TOLERANCE)?;
    let output = report.spectrum.to_vec();
    let deviation = output
        .iter()
        .zip(&lambda)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(PfReport {
        input: lambda.to_vec(),
        output,
        stationary,
        deviation,
    })
}
