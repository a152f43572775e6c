//! Eigensolver wrappers; matrices are nalgebra types, the decompositions
//! come from faer.

use faer::{Mat, Side};
use nalgebra::DMatrix;
#[cfg(test)]
use nalgebra::DVector;
use num_complex::Complex64;

use crate::{Error, Result};

/// Eigenpairs of a Hermitian matrix, eigenvalues in ascending order.
pub(crate) struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

pub(crate) fn hermitian_eigen(m: &DMatrix<Complex64>) -> Result<HermitianEigen> {
    let n = m.nrows();
    let fm = Mat::<Complex64>::from_fn(n, n, |r, c| m[(r, c)]);
    let eig = fm.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigensolver)?;
    let s = eig.S().column_vector();
    let values: Vec<f64> = (0..n).map(|i| s[i].re).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolver);
    }
    let u = eig.U();
    let vectors = DMatrix::from_fn(n, n, |r, c| u[(r, c)]);
    Ok(HermitianEigen { values, vectors })
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(m)?.values)
}

/// Real symmetric eigendecomposition, eigenvalues ascending.
pub(crate) fn symmetric_eigen(m: DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.nrows();
    let fm = Mat::<f64>::from_fn(n, n, |r, c| m[(r, c)]);
    let eig = fm.self_adjoint_eigen(Side::Lower).map_err(|_| Error::Eigensolver)?;
    let s = eig.S().column_vector();
    let values: Vec<f64> = (0..n).map(|i| s[i]).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigensolver);
    }
    let u = eig.U();
    Ok((values, DMatrix::from_fn(n, n, |r, c| u[(r, c)])))
}

pub(crate) fn max_hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// max |U^dagger U - I| entry.
#[cfg(test)]
pub(crate) fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let prod = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..prod.nrows() {
        for j in 0..prod.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - target).norm());
        }
    }
    worst
}

/// Eigenpairs of a Hermitian matrix in nalgebra's (unsorted) order.
pub(crate) fn symmetric_eigen_hermitian(m: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let eig = hermitian_eigen(m)?;
    Ok((eig.values, eig.vectors))
}
