//! Hermitian eigendecomposition with a fixed (descending) eigenvalue order.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Eigenpairs of a Hermitian matrix, eigenvalues sorted descending and
/// eigenvector columns permuted to match.
pub struct HermitianEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<Complex64>,
}

/// Decompose a Hermitian matrix. The caller is responsible for the input
/// actually being Hermitian (symmetrize first if it was accumulated).
pub fn hermitian_eigen_desc(matrix: DMatrix<Complex64>) -> HermitianEig {
    let n = matrix.nrows();
    let eig = matrix.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues are finite")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    HermitianEig {
        eigenvalues,
        eigenvectors,
    }
}

/// Largest absolute deviation from Hermitian symmetry, `max |A - A^H|`.
pub fn hermitian_deviation(matrix: &DMatrix<Complex64>) -> f64 {
    let n = matrix.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            let dev = (matrix[(i, j)] - matrix[(j, i)].conj()).norm();
            worst = worst.max(dev);
        }
    }
    worst
}
