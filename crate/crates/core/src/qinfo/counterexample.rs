use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qmat::{ComplexMatrix, DensityOperator};

/// Two-qubit state that satisfies I(A:B) = S(B) yet is entangled:
/// p·P[√p|00⟩ + √(1−p)|11⟩] + (1−p)·P[√p|01⟩ + √(1−p)|10⟩].
pub fn counterexample_state(p: f64) -> Result<DensityOperator> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    if p == 0.5 {
        return Err(Error::InvalidParameter("p = 1/2 is excluded".into()));
    }
    Ok(counterexample_state_unchecked(p))
}

/// The same family without the p ≠ 1/2 restriction; p must lie in [0, 1].
pub fn counterexample_state_unchecked(p: f64) -> DensityOperator {
    let (a, b) = (p.sqrt(), (1.0 - p).sqrt());
    let c = |x: f64| Complex64::new(x, 0.0);
    let z = c(0.0);
    let psi = [c(a), z, z, c(b)];
    let phi = [z, c(a), c(b), z];
    let m = &ComplexMatrix::outer(&psi, &psi).scale_real(p) + &ComplexMatrix::outer(&phi, &phi).scale_real(1.0 - p);
    DensityOperator::new_unchecked(m, vec![2, 2])
}
