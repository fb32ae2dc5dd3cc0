//! Complex vectors and matrices plus the few dense-linear-algebra helpers
//! the rest of the crate needs.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Cpx = Complex64;
pub type CVector = DVector<Cpx>;
pub type CMatrix = DMatrix<Cpx>;

/// Build a vector from components, rejecting NaN/Inf entries.
pub fn cvector(components: &[Cpx]) -> Result<CVector> {
    if components.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    Ok(CVector::from_column_slice(components))
}

/// Shorthand for one-dimensional points.
pub fn cvec1(z: Cpx) -> CVector {
    CVector::from_element(1, z)
}

pub fn c(re: f64, im: f64) -> Cpx {
    Cpx::new(re, im)
}

/// Hermitian inner product, linear in the first argument.
pub fn herm(u: &CVector, v: &CVector) -> Cpx {
    u.iter().zip(v.iter()).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm(z: &CVector) -> f64 {
    herm(z, z).re.max(0.0).sqrt()
}

pub fn norm_sq(z: &CVector) -> f64 {
    herm(z, z).re.max(0.0)
}

/// Smallest eigenvalue of the Hermitian part (A + A*)/2.
pub fn min_hermitian_eigenvalue(a: &CMatrix) -> f64 {
    let h = (a + a.adjoint()).map(|e| e * 0.5);
    let eig = h.symmetric_eigen();
    eig.eigenvalues.iter().fold(f64::INFINITY, |m, &x| m.min(x))
}

/// Matrix exponential by scaling-and-squaring with a Taylor series.
pub fn matrix_exp(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm1: f64 = a.iter().map(|e| e.norm()).sum();
    let scale = norm1.log2().ceil().max(0.0) as u32 + 1;
    let b = a.map(|e| e / Cpx::new(2f64.powi(scale as i32), 0.0));
    let mut term = CMatrix::identity(n, n);
    let mut sum = CMatrix::identity(n, n);
    for k in 1..=20 {
        term = (&term * &b).map(|e| e / Cpx::new(k as f64, 0.0));
        sum += &term;
    }
    let mut result = sum;
    for _ in 0..scale {
        result = &result * &result;
    }
    result
}

/// Solve A x = b for a small dense complex system.
pub fn solve(a: &CMatrix, b: &CVector) -> Result<CVector> {
    a.clone().lu().solve(b).ok_or(Error::SingularJacobian)
}

pub fn det(a: &CMatrix) -> Cpx {
    a.clone().lu().determinant()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rejects_non_finite() {
        assert!(cvector(&[c(f64::NAN, 0.0)]).is_err());
        assert!(cvector(&[c(0.0, f64::INFINITY)]).is_err());
        assert!(cvector(&[c(0.3, -0.4)]).is_ok());
    }

    #[test]
    fn hermitian_min_eigenvalue_matches_sphere_sampling() {
        use rand::{Rng, SeedableRng};
        let a = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let exact = min_hermitian_eigenvalue(&a);
        assert_relative_eq!(exact, -0.5, epsilon = 1e-12);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut min_sampled = f64::INFINITY;
        for _ in 0..10_000 {
            let v = cvector(&[
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ])
            .unwrap();
            let n = norm(&v);
            if n < 1e-6 {
                continue;
            }
            let v = v.map(|e| e / Cpx::new(n, 0.0));
            let av = &a * &v;
            min_sampled = min_sampled.min(herm(&av, &v).re);
        }
        assert!((min_sampled - exact).abs() < 1e-3);
    }

    #[test]
    fn matrix_exp_diagonal() {
        let a = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.0, 1.0), c(-1.0, 0.0)]));
        let e = matrix_exp(&a);
        assert_relative_eq!(e[(0, 0)].re, 1f64.cos(), epsilon = 1e-12);
        assert_relative_eq!(e[(0, 0)].im, 1f64.sin(), epsilon = 1e-12);
        assert_relative_eq!(e[(1, 1)].re, (-1f64).exp(), epsilon = 1e-12);
        assert_relative_eq!(e[(0, 1)].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn matrix_exp_nilpotent() {
        // exp([[0,1],[0,0]]) = [[1,1],[0,1]]
        let a = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let e = matrix_exp(&a);
        assert_relative_eq!(e[(0, 1)].re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(e[(0, 0)].re, 1.0, epsilon = 1e-12);
    }
}
