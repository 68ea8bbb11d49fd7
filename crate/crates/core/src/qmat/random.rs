//! Seeded random states and unitaries for sweeps and tests.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::density::DensityOperator;
use super::matrix::ComplexMatrix;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector.
pub fn random_pure_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n).map(|_| gaussian(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Haar-random unitary: Gram–Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex64> = (0..n).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for c in &cols {
                let proj: Complex64 = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ci) in v.iter_mut().zip(c) {
                    *vi -= proj * ci;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-8 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Random full-rank state G G† / Tr with Ginibre `G`.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, n: usize) -> DensityOperator {
    let g = ComplexMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let m = g.matmul(&g.adjoint()).expect("square");
    let tr = m.trace().re;
    DensityOperator::new_unchecked(m.scale_real(1.0 / tr).hermitian_part(), vec![n])
}

/// Qubit state with a uniformly random Bloch vector of length ≤ 1.
pub fn random_qubit<R: Rng + ?Sized>(rng: &mut R) -> DensityOperator {
    let dir = random_pure_vector(rng, 2);
    let r: f64 = rng.random::<f64>().cbrt();
    let pure = ComplexMatrix::outer(&dir, &dir);
    let m = &pure.scale_real(r) + &ComplexMatrix::identity(2).scale_real(0.5 * (1.0 - r));
    DensityOperator::new_unchecked(m, vec![2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let u = random_unitary(&mut rng, 5);
        let uu = u.adjoint().matmul(&u).unwrap();
        assert!(uu.max_abs_diff(&ComplexMatrix::identity(5)) < 1e-13);
    }

    #[test]
    fn density_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random_density(&mut rng, 4);
        DensityOperator::new(rho.matrix().clone(), vec![4]).unwrap();
        let q = random_qubit(&mut rng);
        DensityOperator::new(q.matrix().clone(), vec![2]).unwrap();
    }
}
