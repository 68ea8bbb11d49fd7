use crate::error::{Error, Result};
use crate::qmat::{gen_overlap, h2, ComplexMatrix, DensityOperator};

/// A bound value together with whether both trace-norm gaps were inside
/// [0, 1/2]. Outside that range the entropy arguments are clamped to 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundValue {
    pub value: f64,
    pub in_regime: bool,
}

fn check_pair(p1: f64, p2: f64) -> Result<()> {
    for p in [p1, p2] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
    }
    if (p1 + p2 - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("p1 + p2 = {}", p1 + p2)));
    }
    Ok(())
}

/// H({p₁,p₂}) − 2√(p₁p₂)·B^{fM}, floored at zero. A lower bound on the
/// accessible information of the macrofraction ensemble.
pub fn fuchs_lower_bound(p1: f64, p2: f64, b_macro: f64, fm: f64) -> Result<f64> {
    check_pair(p1, p2)?;
    if !(0.0..=1.0).contains(&b_macro) {
        return Err(Error::InvalidParameter(format!("overlap {b_macro} outside [0, 1]")));
    }
    if !(fm >= 0.0) {
        return Err(Error::InvalidParameter(format!("exponent {fm}")));
    }
    Ok((h2(p1) - 2.0 * (p1 * p2).sqrt() * b_macro.powf(fm)).max(0.0))
}

/// h(ε_E/2) + 2h(ε_fE) + 4ε_fE + 2√(p₁p₂)·B^m, bits.
///
/// Fails with [`Error::BoundRegime`] unless both gaps lie in [0, 1/2].
pub fn appendix_bound(eps_e: f64, eps_fe: f64, b_micro: f64, m_exponent: f64, p1: f64, p2: f64) -> Result<f64> {
    for (name, e) in [("eps_E", eps_e), ("eps_fE", eps_fe)] {
        if !(0.0..=0.5).contains(&e) {
            return Err(Error::BoundRegime(format!("{name} = {e} outside [0, 1/2]")));
        }
    }
    Ok(appendix_bound_clamped(eps_e, eps_fe, b_micro, m_exponent, p1, p2)?.value)
}

/// [`appendix_bound`] with the entropy arguments clamped to 1/2.
pub fn appendix_bound_clamped(
    eps_e: f64,
    eps_fe: f64,
    b_micro: f64,
    m_exponent: f64,
    p1: f64,
    p2: f64,
) -> Result<BoundValue> {
    if !(0.0..=1.0).contains(&b_micro) {
        return Err(Error::InvalidParameter(format!("overlap {b_micro} outside [0, 1]")));
    }
    if !(m_exponent >= 0.0) {
        return Err(Error::InvalidParameter(format!("exponent {m_exponent}")));
    }
    let ln_b = if b_micro == 0.0 {
        if m_exponent == 0.0 {
            0.0
        } else {
            f64::NEG_INFINITY
        }
    } else {
        m_exponent * b_micro.ln()
    };
    appendix_bound_ln(eps_e, eps_fe, ln_b, p1, p2)
}

/// Same bound with the overlap term supplied as ln(B^m), for exponents too
/// large to raise directly.
pub fn appendix_bound_ln(eps_e: f64, eps_fe: f64, ln_overlap: f64, p1: f64, p2: f64) -> Result<BoundValue> {
    check_pair(p1, p2)?;
    for e in [eps_e, eps_fe] {
        if !(e >= 0.0 && e.is_finite()) {
            return Err(Error::InvalidParameter(format!("trace-norm gap {e}")));
        }
    }
    if ln_overlap > 1e-12 || ln_overlap.is_nan() {
        return Err(Error::InvalidParameter(format!("ln overlap {ln_overlap} > 0")));
    }
    let in_regime = eps_e <= 0.5 && eps_fe <= 0.5;
    let value = h2((eps_e / 2.0).min(0.5))
        + 2.0 * h2(eps_fe.min(0.5))
        + 4.0 * eps_fe
        + 2.0 * (p1 * p2).sqrt() * ln_overlap.min(0.0).exp();
    Ok(BoundValue { value, in_regime })
}

/// The convergence bound evaluated on a general instance: qubit S with pointer
/// basis |0⟩,|1⟩, N copies of environment state ρ_E, controlled unitaries
/// U₁, U₂ on each copy, and an observed fraction f with fN an integer.
pub fn theorem_bound(
    rho0_s: &DensityOperator,
    u1: &ComplexMatrix,
    u2: &ComplexMatrix,
    rho_e: &DensityOperator,
    n: usize,
    f: f64,
) -> Result<BoundValue> {
    if rho0_s.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: rho0_s.dim(),
        });
    }
    if !(f > 0.0 && f < 1.0) {
        return Err(Error::InvalidParameter(format!("fraction {f} must lie strictly in (0, 1)")));
    }
    let fn_ = f * n as f64;
    if (fn_ - fn_.round()).abs() > 1e-9 || fn_.round() < 1.0 {
        return Err(Error::Partition(format!("fN = {fn_} is not a positive integer")));
    }
    let fn_ = fn_.round();
    let d = rho_e.dim();
    for u in [u1, u2] {
        if u.rows() != d || u.cols() != d {
            return Err(Error::DimensionMismatch { expected: d, got: u.rows() });
        }
        let defect = (&u.adjoint() * u).max_abs_diff(&ComplexMatrix::identity(d));
        if defect > 1e-10 {
            return Err(Error::InvalidParameter(format!("operator not unitary (defect {defect:e})")));
        }
    }
    let p1 = rho0_s.matrix()[(0, 0)].re;
    let p2 = rho0_s.matrix()[(1, 1)].re;
    let c12 = rho0_s.matrix()[(0, 1)].norm();
    let rho1 = rho_e.conjugate(u1)?;
    let rho2 = rho_e.conjugate(u2)?;
    let overlap = (&(u1 * rho_e.matrix()) * &u2.adjoint()).trace().norm().min(1.0);
    let nf = n as f64;
    let eps_e = 2.0 * c12 * overlap.powf(nf);
    let eps_fe = 2.0 * c12 * overlap.powf(nf - fn_);
    let b = gen_overlap(&rho1, &rho2)?;
    appendix_bound_clamped(eps_e, eps_fe, b, fn_, p1, p2)
}
