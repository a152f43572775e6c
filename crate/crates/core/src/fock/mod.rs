//! Truncated Fock-space states of up to four bosonic modes and the unitary
//! elements acting on them.
//!
//! Layout: amplitudes are stored row-major over the mode occupations, mode 0
//! most significant. Mixed states are kept as weighted pure branches
//! `rho = sum_j w_j |psi_j><psi_j|`; a density matrix is only assembled on
//! request.

mod circuit;
mod sector;
mod state;

pub use circuit::{Circuit, CircuitElement, ModeIndex};
pub use sector::{pair_sectors, PairSector, SectorPropagator};
pub use state::{Branch, MultiModeState};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tail mass tolerance used when none is given explicitly.
pub const DEFAULT_TAIL_EPSILON: f64 = 1e-10;
/// Largest number of simultaneously simulated modes.
pub const MAX_MODES: usize = 4;
/// Largest per-mode Fock dimension accepted by the cutoff chooser.
pub const MAX_CUTOFF: usize = 1 << 14;
/// Largest total Hilbert-space dimension of a state.
pub const MAX_STATE_DIM: usize = 1 << 22;

/// Per-mode Fock dimension `d`: levels `0..d` are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct FockCutoff(usize);

impl FockCutoff {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::param("cutoff", "Fock dimension must be at least 1"));
        }
        if dim > MAX_CUTOFF {
            return Err(Error::DimensionOverflow { dim, limit: MAX_CUTOFF });
        }
        Ok(FockCutoff(dim))
    }

    pub fn dim(self) -> usize {
        self.0
    }
}

impl TryFrom<usize> for FockCutoff {
    type Error = Error;
    fn try_from(dim: usize) -> Result<Self> {
        FockCutoff::new(dim)
    }
}

impl From<FockCutoff> for usize {
    fn from(c: FockCutoff) -> usize {
        c.0
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::param("epsilon", format!("tail tolerance must lie in (0, 1), got {epsilon}")));
    }
    Ok(())
}

fn check_nbar(nbar: f64) -> Result<()> {
    if !(nbar >= 0.0 && nbar.is_finite()) {
        return Err(Error::param("nbar", format!("mean photon number must be finite and >= 0, got {nbar}")));
    }
    Ok(())
}

/// Bose-Einstein probability of `n` quanta at mean occupation `nbar`.
pub fn thermal_probability(nbar: f64, n: usize) -> f64 {
    if nbar == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (n as f64 * nbar.ln() - (n as f64 + 1.0) * nbar.ln_1p()).exp()
}

/// Thermal mass above level `d - 1`, i.e. `(nbar / (1 + nbar))^d`.
pub fn thermal_tail(nbar: f64, d: usize) -> f64 {
    if nbar == 0.0 {
        return if d == 0 { 1.0 } else { 0.0 };
    }
    (d as f64 * (nbar.ln() - nbar.ln_1p())).exp()
}

/// Smallest Fock dimension whose thermal tail mass is below `epsilon`.
pub fn choose_cutoff(nbar: f64, epsilon: f64) -> Result<FockCutoff> {
    check_nbar(nbar)?;
    check_epsilon(epsilon)?;
    let mut d = 1;
    while thermal_tail(nbar, d) >= epsilon {
        d += 1;
        if d > MAX_CUTOFF {
            return Err(Error::DimensionOverflow { dim: d, limit: MAX_CUTOFF });
        }
    }
    FockCutoff::new(d)
}

/// Poisson probabilities `e^{-mean} mean^n / n!` for `n < len`.
fn poisson_pmf(mean: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    let mut log_p = -mean;
    for n in 0..len {
        if n > 0 {
            log_p += mean.ln() - (n as f64).ln();
        }
        out.push(if mean == 0.0 { if n == 0 { 1.0 } else { 0.0 } } else { log_p.exp() });
    }
    out
}

/// Poisson mass at or above level `d`.
pub fn poisson_tail(mean: f64, d: usize) -> f64 {
    if mean == 0.0 {
        return if d == 0 { 1.0 } else { 0.0 };
    }
    // Sum the upper tail directly from far out, so small tails keep full
    // relative precision.
    let horizon = (mean + 40.0 * mean.sqrt() + 60.0).ceil() as usize;
    let upper = horizon.max(d + 1);
    let pmf = poisson_pmf(mean, upper);
    pmf[d.min(upper)..].iter().rev().sum()
}

/// Smallest Fock dimension whose Poisson tail (coherent state of mean
/// photon number `mean`) is below `epsilon`.
pub fn choose_cutoff_coherent(mean: f64, epsilon: f64) -> Result<FockCutoff> {
    check_nbar(mean)?;
    check_epsilon(epsilon)?;
    let horizon = (mean + 40.0 * mean.sqrt() + 60.0).ceil() as usize;
    if horizon > 4 * MAX_CUTOFF {
        return Err(Error::DimensionOverflow { dim: horizon, limit: MAX_CUTOFF });
    }
    let pmf = poisson_pmf(mean, horizon);
    // suffix[d] = sum_{n >= d} p_n
    let mut suffix = vec![0.0; horizon + 1];
    for n in (0..horizon).rev() {
        suffix[n] = suffix[n + 1] + pmf[n];
    }
    let d = (1..=horizon).find(|&d| suffix[d] < epsilon).unwrap_or(horizon);
    FockCutoff::new(d)
}

/// Coherent-state amplitudes `e^{-|alpha|^2/2} alpha^n / sqrt(n!)` for
/// `n < d`, without renormalization.
pub fn coherent_amplitudes(alpha: Complex64, d: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(d);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for n in 0..d {
        if n > 0 {
            c = c * alpha / (n as f64).sqrt();
        }
        out.push(c);
    }
    out
}
