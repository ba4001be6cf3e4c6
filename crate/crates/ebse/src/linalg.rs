//! Small dense linear-algebra helpers shared by the observer and analysis
//! modules: spectral radius, induced 2-norm, symmetric eigenvalue checks.
//!
//! Matrices are dense `f64`; the systems of interest are small (n <= 50).

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Spectral radius: largest eigenvalue magnitude, via the real Schur form.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.complex_eigenvalues()
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
}

/// Induced 2-norm (largest singular value).
pub fn norm2(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.singular_values().max()
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> DVector<f64> {
    let mut ev = m.clone().symmetric_eigen().eigenvalues;
    ev.as_mut_slice().sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Check that `m` is symmetric to within `tol` (max absolute asymmetry).
pub fn is_symmetric(m: &DMatrix<f64>, tol: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let n = m.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            if (m[(i, j)] - m[(j, i)]).abs() > tol {
                return false;
            }
        }
    }
    true
}

/// Minimum eigenvalue of a symmetric matrix.
pub fn min_symmetric_eigenvalue(m: &DMatrix<f64>) -> f64 {
    symmetric_eigenvalues(m)[0]
}

/// Maximum eigenvalue of a symmetric matrix.
pub fn max_symmetric_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let ev = symmetric_eigenvalues(m);
    ev[ev.len() - 1]
}

/// Symmetric square root `P^(1/2)` and inverse square root `P^(-1/2)` of a
/// positive definite matrix.
pub fn symmetric_sqrt_pair(p: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let eig = p.clone().symmetric_eigen();
    if eig.eigenvalues.iter().any(|&v| v <= 0.0) {
        return Err(Error::InvalidScenario(
            "matrix is not positive definite".to_string(),
        ));
    }
    let sqrt_d = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let inv_sqrt_d = DMatrix::from_diagonal(&eig.eigenvalues.map(|v| 1.0 / v.sqrt()));
    let v = &eig.eigenvectors;
    Ok((v * sqrt_d * v.transpose(), v * inv_sqrt_d * v.transpose()))
}

/// Rank of a real matrix from its singular values, relative threshold.
fn rank(m: &DMatrix<f64>) -> usize {
    let sv = m.singular_values();
    let max = sv.max();
    if max == 0.0 {
        return 0;
    }
    let tol = max * 1e-10 * (m.nrows().max(m.ncols()) as f64);
    sv.iter().filter(|&&s| s > tol).count()
}

/// PBH-style rank test used by detectability/stabilizability checks.
///
/// For each eigenvalue lambda of `a` with |lambda| >= 1, checks
/// rank [a - lambda I, b] == n (stabilizability form). Complex eigenvalues
/// are handled by realification: rank_C(M) = rank_R([[X, -Y], [Y, X]]) / 2
/// for M = X + iY.
pub fn pbh_full_rank(a: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
    let n = a.nrows();
    for lambda in a.complex_eigenvalues().iter() {
        if lambda.norm() < 1.0 {
            continue;
        }
        // X + iY = [a - lambda I, b]
        let mut x = DMatrix::zeros(n, n + b.ncols());
        let mut y = DMatrix::zeros(n, n + b.ncols());
        x.view_mut((0, 0), (n, n)).copy_from(a);
        for i in 0..n {
            x[(i, i)] -= lambda.re;
            y[(i, i)] = -lambda.im;
        }
        x.view_mut((0, n), (n, b.ncols())).copy_from(b);

        let mut real = DMatrix::zeros(2 * n, 2 * (n + b.ncols()));
        real.view_mut((0, 0), (n, n + b.ncols())).copy_from(&x);
        real.view_mut((n, n + b.ncols()), (n, n + b.ncols()))
            .copy_from(&x);
        real.view_mut((0, n + b.ncols()), (n, n + b.ncols()))
            .copy_from(&(-&y));
        real.view_mut((n, 0), (n, n + b.ncols())).copy_from(&y);

        if rank(&real) < 2 * n {
            return false;
        }
    }
    true
}
