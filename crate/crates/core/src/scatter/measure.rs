use super::model::norm3;
use crate::error::{Error, Result};

/// One plane-wave mode of a diagonal photon state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mode {
    /// Wave vector (1/m).
    pub k: [f64; 3],
    pub probability: f64,
    /// Fraction of the full sphere of directions this mode stands for.
    pub solid_angle: f64,
}

/// Diagonal photon state Σ p(k)|k⟩⟨k| on a finite mode set.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralMeasure {
    modes: Vec<Mode>,
}

/// Relative tolerance for grouping modes into elastic shells of equal |k|.
const SHELL_TOL: f64 = 1e-9;

impl SpectralMeasure {
    /// Modes with the given probabilities; each mode covers an equal share
    /// of the directions in its |k| shell.
    pub fn new(modes: Vec<([f64; 3], f64)>) -> Result<Self> {
        let ks: Vec<[f64; 3]> = modes.iter().map(|m| m.0).collect();
        let shells = shell_labels(&ks);
        let mut counts = vec![0usize; shells.iter().max().map_or(0, |&s| s + 1)];
        for &s in &shells {
            counts[s] += 1;
        }
        let modes = modes
            .into_iter()
            .zip(&shells)
            .map(|((k, p), &s)| Mode {
                k,
                probability: p,
                solid_angle: 1.0 / counts[s] as f64,
            })
            .collect();
        Self::from_modes(modes)
    }

    pub fn from_modes(modes: Vec<Mode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidParameter("measure has no modes".into()));
        }
        let mut total = 0.0;
        for m in &modes {
            if !(m.probability > 0.0 && m.probability.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "mode probability {} must be positive",
                    m.probability
                )));
            }
            if !(norm3(m.k) > 0.0 && norm3(m.k).is_finite()) {
                return Err(Error::InvalidParameter(format!("wave vector {:?} must be nonzero", m.k)));
            }
            if !(m.solid_angle > 0.0 && m.solid_angle <= 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "solid-angle fraction {} outside (0, 1]",
                    m.solid_angle
                )));
            }
            total += m.probability;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("probabilities sum to {total}, expected 1")));
        }
        let measure = Self { modes };
        let shells = measure.shells();
        let mut cover = vec![0.0; shells.iter().max().map_or(0, |&s| s + 1)];
        for (m, &s) in measure.modes.iter().zip(&shells) {
            cover[s] += m.solid_angle;
        }
        if let Some(c) = cover.iter().find(|&&c| c > 1.0 + 1e-9) {
            return Err(Error::InvalidParameter(format!("shell solid angles sum to {c} > 1")));
        }
        Ok(measure)
    }

    /// Single mode: the monochromatic pure case.
    pub fn single(k: [f64; 3]) -> Result<Self> {
        Self::new(vec![(k, 1.0)])
    }

    /// Uniform directions on a Fibonacci sphere at fixed |k|.
    pub fn isotropic(n: usize, k: f64) -> Result<Self> {
        let p = 1.0 / n as f64;
        Self::new(fibonacci_directions(n).into_iter().map(|d| (scale(d, k), p)).collect())
    }

    /// Fibonacci directions at fixed |k| with probabilities ∝ `weight(k̂)`.
    pub fn fibonacci_weighted(n: usize, k: f64, weight: impl Fn([f64; 3]) -> f64) -> Result<Self> {
        let dirs = fibonacci_directions(n);
        let w: Vec<f64> = dirs.iter().map(|&d| weight(d)).collect();
        let total: f64 = w.iter().sum();
        Self::new(dirs.into_iter().zip(w).map(|(d, wi)| (scale(d, k), wi / total)).collect())
    }

    /// Replace the default solid-angle fractions.
    pub fn with_solid_angles(self, fractions: &[f64]) -> Result<Self> {
        if fractions.len() != self.modes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.modes.len(),
                got: fractions.len(),
            });
        }
        let modes = self
            .modes
            .iter()
            .zip(fractions)
            .map(|(m, &w)| Mode { solid_angle: w, ..*m })
            .collect();
        Self::from_modes(modes)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.modes.iter().map(|m| m.probability).collect()
    }

    /// Pairwise-distinct probabilities (non-degenerate perturbation theory).
    pub fn injective(&self) -> bool {
        let p = self.probabilities();
        let scale = p.iter().copied().fold(0.0, f64::max);
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                if (p[i] - p[j]).abs() <= 1e-12 * scale {
                    return false;
                }
            }
        }
        true
    }

    /// Elastic-shell label of every mode.
    pub fn shells(&self) -> Vec<usize> {
        shell_labels(&self.modes.iter().map(|m| m.k).collect::<Vec<_>>())
    }
}

fn shell_labels(ks: &[[f64; 3]]) -> Vec<usize> {
    let mut reps: Vec<f64> = Vec::new();
    ks.iter()
        .map(|&k| {
            let kn = norm3(k);
            match reps.iter().position(|&r| (r - kn).abs() <= SHELL_TOL * r.max(kn)) {
                Some(i) => i,
                None => {
                    reps.push(kn);
                    reps.len() - 1
                }
            }
        })
        .collect()
}

fn scale(d: [f64; 3], k: f64) -> [f64; 3] {
    [d[0] * k, d[1] * k, d[2] * k]
}

/// `n` nearly uniform unit vectors on the golden-angle spiral.
pub fn fibonacci_directions(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(SpectralMeasure::new(vec![]).is_err());
        assert!(SpectralMeasure::new(vec![([0.0, 0.0, 1.0], 0.5)]).is_err());
        assert!(SpectralMeasure::new(vec![([0.0, 0.0, 1.0], 1.2), ([1.0, 0.0, 0.0], -0.2)]).is_err());
        assert!(SpectralMeasure::new(vec![([0.0, 0.0, 0.0], 1.0)]).is_err());
        let m = SpectralMeasure::new(vec![([0.0, 0.0, 1.0], 0.4), ([1.0, 0.0, 0.0], 0.6)]).unwrap();
        assert!(m.with_solid_angles(&[0.7, 0.7]).is_err());
    }

    #[test]
    fn shells_and_injectivity() {
        let m = SpectralMeasure::new(vec![
            ([0.0, 0.0, 1.0], 0.2),
            ([1.0, 0.0, 0.0], 0.3),
            ([0.0, 2.0, 0.0], 0.5),
        ])
        .unwrap();
        assert_eq!(m.shells(), vec![0, 0, 1]);
        assert_eq!(m.modes()[0].solid_angle, 0.5);
        assert_eq!(m.modes()[2].solid_angle, 1.0);
        assert!(m.injective());
        assert!(!SpectralMeasure::isotropic(8, 1.0).unwrap().injective());
    }

    #[test]
    fn fibonacci_points_are_unit_and_balanced() {
        let d = fibonacci_directions(200);
        let mut mean = [0.0; 3];
        for v in &d {
            assert!((norm3(*v) - 1.0).abs() < 1e-14);
            for i in 0..3 {
                mean[i] += v[i] / 200.0;
            }
        }
        assert!(norm3(mean) < 1e-2);
    }
}
