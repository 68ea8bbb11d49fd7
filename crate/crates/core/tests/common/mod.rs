#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use objectivity::qmat::DensityOperator;
use objectivity::scatter::{micro_amplitude, PhotonSource, ShellCoupling, SphereModel, SpectralMeasure};

/// Dimensionless sphere with per-photon loss B ≈ `loss` at Θ = π/2, so a
/// handful of photons already carries visible information.
pub fn toy_model(loss: f64) -> SphereModel {
    let mut m = SphereModel {
        radius: 0.05,
        permittivity: 3.0,
        separation: 0.05,
        theta: PI / 2.0,
        k0: 1.5,
        box_edge: 1.0,
        photon_density: 1.0,
        light_speed: 1.0,
        soft_threshold: 0.1,
        dipole_threshold: 0.1,
        shell_coupling: ShellCoupling::default(),
    };
    let b1 = micro_amplitude(&m, m.k0_vector()).unwrap().loss;
    m.box_edge = (b1 / loss).sqrt();
    m
}

/// Same sphere tilted so the single-photon phase A is nonzero.
pub fn tilted_toy_model(loss: f64, theta: f64) -> SphereModel {
    let mut m = toy_model(loss);
    m.theta = theta;
    let b1 = micro_amplitude(&SphereModel { box_edge: 1.0, ..m.clone() }, m.k0_vector())
        .unwrap()
        .loss;
    m.box_edge = (b1 / loss).sqrt();
    m
}

/// Toy sphere for spectral sources: small enough per-photon loss that the
/// phase/coupling cross terms stay below the unitarity margin left by
/// `fill`.
pub fn mixed_toy_model() -> SphereModel {
    SphereModel {
        shell_coupling: ShellCoupling::Dipole { fill: 0.9 },
        ..toy_model(1e-6)
    }
}

/// Anisotropic five-mode measure on the |k| = 1.5 shell.
pub fn five_mode_measure() -> SpectralMeasure {
    let dirs: [[f64; 3]; 5] = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.6, 0.0, 0.8],
        [0.0, 0.6, 0.8],
        [0.48, 0.6, 0.64],
    ];
    let probs = [0.35, 0.25, 0.2, 0.12, 0.08];
    SpectralMeasure::new(
        dirs.iter()
            .zip(probs)
            .map(|(d, p)| ([1.5 * d[0], 1.5 * d[1], 1.5 * d[2]], p))
            .collect(),
    )
    .unwrap()
}

pub fn mixed_source() -> PhotonSource {
    PhotonSource::Spectral(five_mode_measure())
}

/// (|x₁⟩ + |x₂⟩)/√2
pub fn plus_state() -> DensityOperator {
    let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    DensityOperator::pure(&[a, a]).unwrap()
}

pub fn qubit(p1: f64, c12: Complex64) -> DensityOperator {
    let m = objectivity::qmat::ComplexMatrix::from_row_major(
        2,
        2,
        vec![Complex64::new(p1, 0.0), c12, c12.conj(), Complex64::new(1.0 - p1, 0.0)],
    )
    .unwrap();
    DensityOperator::new(m, vec![2]).unwrap()
}
