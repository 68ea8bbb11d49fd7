use crate::error::{Error, Result};
use crate::qmat::{binary_entropy, partial_trace, von_neumann_entropy, ComplexMatrix, DensityOperator};

/// I(A:B) = S(A) + S(B) − S(AB) in bits, with A the listed factors and B
/// the rest.
pub fn mutual_information(rho: &DensityOperator, part_a: &[usize]) -> Result<f64> {
    let n = rho.dims().len();
    let mut a = part_a.to_vec();
    a.sort_unstable();
    a.dedup();
    if a.is_empty() || a.len() != part_a.len() || a.len() >= n || a.iter().any(|&i| i >= n) {
        return Err(Error::InvalidSubsystems(format!(
            "cut {part_a:?} is not a proper bipartition of {n} factors"
        )));
    }
    let b: Vec<usize> = (0..n).filter(|i| !a.contains(i)).collect();
    let sa = von_neumann_entropy(&partial_trace(rho, &a)?)?;
    let sb = von_neumann_entropy(&partial_trace(rho, &b)?)?;
    let sab = von_neumann_entropy(rho)?;
    Ok((sa + sb - sab).max(0.0))
}

/// Classical labels with quantum encodings {p_i, ρ_i}.
#[derive(Debug, Clone)]
pub struct EnsembleCQ {
    probs: Vec<f64>,
    states: Vec<DensityOperator>,
}

impl EnsembleCQ {
    pub fn new(probs: Vec<f64>, states: Vec<DensityOperator>) -> Result<Self> {
        if probs.is_empty() || probs.len() != states.len() {
            return Err(Error::DimensionMismatch {
                expected: probs.len(),
                got: states.len(),
            });
        }
        if let Some(&p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("probabilities sum to {total}")));
        }
        let d = states[0].dim();
        if let Some(s) = states.iter().find(|s| s.dim() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: s.dim(),
            });
        }
        Ok(Self { probs, states })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityOperator] {
        &self.states
    }

    /// Σ p_i ρ_i
    pub fn average(&self) -> DensityOperator {
        let d = self.states[0].dim();
        let dims = self.states[0].dims().to_vec();
        if let Some(factors) = self.states.iter().map(DensityOperator::factor).collect::<Option<Vec<_>>>() {
            // Σ p_i F_iF_i† = [√p_1 F_1 | √p_2 F_2 | …][…]†
            let cols: usize = factors.iter().map(|f| f.cols()).sum();
            let mut g = ComplexMatrix::zeros(d, cols);
            let mut at = 0;
            for (p, f) in self.probs.iter().zip(factors) {
                let w = p.sqrt();
                for i in 0..d {
                    for j in 0..f.cols() {
                        g[(i, at + j)] = f[(i, j)] * w;
                    }
                }
                at += f.cols();
            }
            return DensityOperator::from_factor_unchecked(g, dims);
        }
        let mut m = ComplexMatrix::zeros(d, d);
        for (p, s) in self.probs.iter().zip(&self.states) {
            m = &m + &s.matrix().scale_real(*p);
        }
        DensityOperator::new_unchecked(m, dims)
    }

    /// Shannon entropy of the labels.
    pub fn label_entropy(&self) -> f64 {
        shannon(&self.probs)
    }
}

/// χ = S(Σ p_i ρ_i) − Σ p_i S(ρ_i)
pub fn holevo_chi(e: &EnsembleCQ) -> Result<f64> {
    let mut chi = von_neumann_entropy(&e.average())?;
    for (p, s) in e.probs.iter().zip(&e.states) {
        if *p > 0.0 {
            chi -= p * von_neumann_entropy(s)?;
        }
    }
    Ok(chi.max(0.0))
}

/// Shannon entropy in bits.
pub fn shannon(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.log2()).sum()
}

/// H({p₁, p₂}) for a qubit pointer distribution.
pub fn pointer_entropy(p1: f64) -> Result<f64> {
    binary_entropy(p1)
}
