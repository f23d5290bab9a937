//! Small dense linear-algebra helpers shared by the Gaussian and polarimetry code.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Direct sum of `n` blocks `[[0, 1], [-1, 0]]`.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Quadrature indices `(2k, 2k+1)` for every listed mode, in order.
pub fn quadrature_indices(modes: &[usize]) -> Vec<usize> {
    modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect()
}

pub fn submatrix(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Eigenvalues of a complex Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Smallest eigenvalue of the Hermitian matrix `cov + i*Omega`.
pub fn uncertainty_min_eigenvalue(cov: &DMatrix<f64>) -> f64 {
    let n = cov.nrows() / 2;
    let omega = symplectic_form(n);
    let h = DMatrix::from_fn(cov.nrows(), cov.ncols(), |i, j| Complex64::new(cov[(i, j)], omega[(i, j)]));
    hermitian_eigenvalues(&h)[0]
}

/// Principal square root of a symmetric positive definite matrix.
pub fn sqrt_spd(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(m.clone());
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(Error::Numerical(format!("matrix is not positive definite (min eigenvalue {min:e})")));
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

/// Symplectic spectrum of a symmetric positive definite `2n x 2n` matrix, ascending.
///
/// The values are the positive eigenvalues of the Hermitian matrix
/// `M^{1/2} (i Omega) M^{1/2}`, which shares its spectrum with `i Omega M`.
/// Works for partially transposed covariance matrices too.
pub fn symplectic_spectrum(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = m.nrows();
    if !dim.is_multiple_of(2) || m.ncols() != dim {
        return Err(Error::Dimension(format!("expected 2n x 2n matrix, got {dim}x{}", m.ncols())));
    }
    let n = dim / 2;
    let root = sqrt_spd(m)?;
    let omega = symplectic_form(n);
    let prod = &root * &omega * &root;
    // i * (real antisymmetric) is Hermitian
    let h = DMatrix::from_fn(dim, dim, |i, j| Complex64::new(0.0, prod[(i, j)]));
    let ev = hermitian_eigenvalues(&h);
    Ok(ev[n..].to_vec())
}

pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Numerical rank by singular values relative to the largest one.
pub fn rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = m.clone().svd(false, false).singular_values;
    let largest = sv.iter().copied().fold(0.0_f64, f64::max);
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * largest).count()
}
