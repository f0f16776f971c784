//! Dense symmetric eigendecomposition and phase evolution in the eigenbasis.

use ndarray::{Array1, Array2, ArrayView1};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

use crate::error::{Error, Result};

extern "C" {
    fn openblas_set_num_threads(n: i32);
}

/// Pin the BLAS thread count.
///
/// Ensemble and scan drivers parallelize over realizations/grid points with
/// rayon and pin BLAS to one thread so the two pools do not fight over cores.
pub fn set_blas_threads(n: usize) {
    unsafe { openblas_set_num_threads(n.max(1) as i32) };
}

/// Eigendecomposition of a real symmetric matrix: `H = V diag(E) V^T`.
///
/// Energies are ascending; `modes` holds the eigenvectors as columns.
#[derive(Debug, Clone)]
pub struct Decomposition {
    energies: Array1<f64>,
    modes: Array2<f64>,
}

impl Decomposition {
    pub fn new(matrix: &Array2<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "matrix is {}x{}, expected square",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if matrix.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric("matrix has non-finite entries".into()));
        }
        let (energies, modes) = matrix
            .eigh(UPLO::Lower)
            .map_err(|e| Error::Numeric(format!("eigendecomposition failed: {e}")))?;
        Ok(Self { energies, modes })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &Array1<f64> {
        &self.energies
    }

    pub fn modes(&self) -> &Array2<f64> {
        &self.modes
    }

    /// Apply `exp(sign * i * H * t)` to a complex vector.
    ///
    /// Forward Schrodinger evolution is `sign = -1.0` (c(t) = e^{-iHt} c0).
    pub fn evolve(&self, c: ArrayView1<Complex64>, t: f64, sign: f64) -> Array1<Complex64> {
        let re: Array1<f64> = c.iter().map(|z| z.re).collect();
        let im: Array1<f64> = c.iter().map(|z| z.im).collect();
        // coefficients in the eigenbasis
        let wr = self.modes.t().dot(&re);
        let wi = self.modes.t().dot(&im);
        let mut pr = Array1::<f64>::zeros(self.dim());
        let mut pi = Array1::<f64>::zeros(self.dim());
        for k in 0..self.dim() {
            let theta = sign * self.energies[k] * t;
            let (s, co) = theta.sin_cos();
            pr[k] = wr[k] * co - wi[k] * s;
            pi[k] = wr[k] * s + wi[k] * co;
        }
        let rr = self.modes.dot(&pr);
        let ri = self.modes.dot(&pi);
        Array1::from_iter(rr.iter().zip(ri.iter()).map(|(&a, &b)| Complex64::new(a, b)))
    }
}

/// Hermitian eigenvalues of a complex matrix, ascending.
pub fn hermitian_eigenvalues(matrix: &Array2<Complex64>) -> Result<Array1<f64>> {
    let (vals, _) = matrix
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Numeric(format!("hermitian eigendecomposition failed: {e}")))?;
    Ok(vals)
}

/// Hermitian square root via eigendecomposition, clamping small negative
/// eigenvalues to zero.
pub fn hermitian_sqrt(matrix: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let (vals, vecs) = matrix
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Numeric(format!("hermitian eigendecomposition failed: {e}")))?;
    let dim = vals.len();
    let mut out = Array2::<Complex64>::zeros((dim, dim));
    for k in 0..dim {
        let root = vals[k].max(0.0).sqrt();
        for i in 0..dim {
            for j in 0..dim {
                out[[i, j]] += vecs[[i, k]] * root * vecs[[j, k]].conj();
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_site_eigensystem() {
        let h = ndarray::array![[0.0, 2.0], [2.0, 0.0]];
        let d = Decomposition::new(&h).unwrap();
        assert_abs_diff_eq!(d.energies()[0], -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(d.energies()[1], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn evolve_round_trip() {
        let h = ndarray::array![[0.1, 2.0, 0.0], [2.0, -0.3, 1.0], [0.0, 1.0, 0.2]];
        let d = Decomposition::new(&h).unwrap();
        let c0 = ndarray::array![
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
            Complex64::new(0.0, 0.0)
        ];
        let ct = d.evolve(c0.view(), 1.3, -1.0);
        let back = d.evolve(ct.view(), 1.3, 1.0);
        for (a, b) in back.iter().zip(c0.iter()) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-12);
        }
    }

    #[test]
    fn rejects_non_square() {
        let h = Array2::<f64>::zeros((2, 3));
        assert!(Decomposition::new(&h).is_err());
    }

    #[test]
    fn rejects_non_finite() {
        let mut h = Array2::<f64>::zeros((2, 2));
        h[[0, 1]] = f64::NAN;
        assert!(Decomposition::new(&h).is_err());
    }
}
