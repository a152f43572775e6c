//! Ergotropy, passive states and entropies of single-mode states.
//!
//! Energies are in quanta of the mode (`hbar * omega = 1`), entropies in nats.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::linalg::{hermitian_eigenvalues, max_hermiticity_defect};
use crate::{Error, Result};

const HERMITICITY_TOLERANCE: f64 = 1e-10;
const TRACE_TOLERANCE: f64 = 1e-8;
const NEGATIVITY_TOLERANCE: f64 = 1e-10;
/// Default threshold of [`is_passive`].
pub const DEFAULT_PASSIVITY_TOLERANCE: f64 = 1e-9;

/// Thermodynamic summary of a single-mode state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErgotropyReport {
    pub ergotropy: f64,
    pub passive_energy: f64,
    pub mean_energy: f64,
    pub entropy: f64,
    pub photon_pmf: Vec<f64>,
    pub passive_pmf: Vec<f64>,
}

/// Spectrum of `rho` checked for being a density matrix, plus its diagonal.
struct Spectrum {
    eigenvalues: Vec<f64>,
    diagonal: Vec<f64>,
}

fn spectrum(rho: &DMatrix<Complex64>) -> Result<Spectrum> {
    if rho.nrows() != rho.ncols() || rho.nrows() == 0 {
        return Err(Error::InvalidState(format!(
            "density matrix must be square and non-empty, got {}x{}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let defect = max_hermiticity_defect(rho);
    if defect > HERMITICITY_TOLERANCE {
        return Err(Error::NotHermitian { deviation: defect });
    }
    let diagonal: Vec<f64> = rho.diagonal().iter().map(|c| c.re).collect();
    let trace: f64 = diagonal.iter().sum();
    if (trace - 1.0).abs() > TRACE_TOLERANCE {
        return Err(Error::NotNormalized { trace });
    }
    let n = rho.nrows();
    let is_diagonal = (0..n).all(|i| (0..n).all(|j| i == j || rho[(i, j)] == Complex64::new(0.0, 0.0)));
    let eigenvalues = if is_diagonal {
        diagonal.clone()
    } else {
        hermitian_eigenvalues(rho)?
    };
    let min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -NEGATIVITY_TOLERANCE {
        return Err(Error::NotPositive { min_eigenvalue: min });
    }
    Ok(Spectrum { eigenvalues, diagonal })
}

fn descending(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

fn ladder_energy(pmf: &[f64]) -> f64 {
    pmf.iter().enumerate().map(|(n, p)| n as f64 * p).sum()
}

fn entropy_of(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum()
}

/// Eigenvalues of `rho` in non-increasing order, i.e. the occupation of
/// levels `0, 1, 2, ...` in the passive state with the same spectrum.
pub fn passive_counterpart(rho: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    Ok(descending(spectrum(rho)?.eigenvalues))
}

/// Ergotropy `sum_n n (p_n - p_n^pas)` with the passive distribution built
/// from the eigenvalues of `rho`.
pub fn ergotropy(rho: &DMatrix<Complex64>) -> Result<ErgotropyReport> {
    let spec = spectrum(rho)?;
    let mean_energy = ladder_energy(&spec.diagonal);
    let entropy = entropy_of(&spec.eigenvalues);
    let passive_pmf = descending(spec.eigenvalues);
    let passive_energy = ladder_energy(&passive_pmf);
    Ok(ErgotropyReport {
        ergotropy: mean_energy - passive_energy,
        passive_energy,
        mean_energy,
        entropy,
        photon_pmf: spec.diagonal,
        passive_pmf,
    })
}

/// Ergotropy of a state diagonal in the number basis with the given pmf.
pub fn ergotropy_of_pmf(pmf: &[f64]) -> Result<ErgotropyReport> {
    ergotropy(&DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        pmf.len(),
        pmf.iter().map(|&p| Complex64::new(p, 0.0)),
    )))
}

/// `-tr(rho ln rho)` in nats.
pub fn von_neumann_entropy(rho: &DMatrix<Complex64>) -> Result<f64> {
    Ok(entropy_of(&spectrum(rho)?.eigenvalues))
}

/// Whether the ergotropy of `rho` is below `tol`.
pub fn is_passive(rho: &DMatrix<Complex64>, tol: f64) -> Result<bool> {
    Ok(ergotropy(rho)?.ergotropy < tol)
}
