//! Fixed-total-photon-number blocks of a mode pair.
//!
//! Every two-mode element here conserves `n_a + n_b`, so its truncated
//! unitary is block diagonal over these sectors.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::linalg::symmetric_eigen;
use crate::Result;

/// Occupations `(m, total - m)` of a mode pair with per-mode dimensions
/// `(d_a, d_b)`, for `m` in `first..first + len`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairSector {
    pub total: usize,
    pub first: usize,
    pub len: usize,
}

impl PairSector {
    pub fn new(total: usize, d_a: usize, d_b: usize) -> Option<Self> {
        let first = total.saturating_sub(d_b - 1);
        let last = total.min(d_a - 1);
        (first <= last).then(|| PairSector {
            total,
            first,
            len: last - first + 1,
        })
    }

    /// Occupations of the `local`-th basis state.
    pub fn occupations(&self, local: usize) -> (usize, usize) {
        let m = self.first + local;
        (m, self.total - m)
    }

    /// Local index of the state with `m` quanta in the first mode.
    pub fn local_index(&self, m: usize) -> Option<usize> {
        (m >= self.first && m < self.first + self.len).then(|| m - self.first)
    }

    /// `a^{dag k} b^k + a^k b^{dag k}` restricted to this sector.
    pub fn exchange_generator(&self, k: usize) -> DMatrix<f64> {
        let mut g = DMatrix::zeros(self.len, self.len);
        if k == 0 {
            return g;
        }
        for l in 0..self.len.saturating_sub(k) {
            let (m, n) = self.occupations(l);
            // <m+k, n-k| a^{dag k} b^k |m, n>
            let mut coef = 1.0f64;
            for r in 0..k {
                coef *= ((m + r + 1) as f64).sqrt() * ((n - r) as f64).sqrt();
            }
            g[(l + k, l)] = coef;
            g[(l, l + k)] = coef;
        }
        g
    }
}

/// All non-empty sectors of a pair with dimensions `(d_a, d_b)`, by
/// increasing total.
pub fn pair_sectors(d_a: usize, d_b: usize) -> impl Iterator<Item = PairSector> {
    (0..d_a + d_b - 1).filter_map(move |total| PairSector::new(total, d_a, d_b))
}

/// Spectral form of a real symmetric sector generator `G`, giving
/// `exp(i angle G)` without series expansion.
#[derive(Debug, Clone)]
pub struct SectorPropagator {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl SectorPropagator {
    pub fn from_generator(g: DMatrix<f64>) -> Result<Self> {
        let (values, vectors) = symmetric_eigen(g)?;
        Ok(SectorPropagator { values, vectors })
    }

    /// Propagator of the k-quanta exchange generator on `sector`.
    pub fn exchange(sector: &PairSector, k: usize) -> Result<Self> {
        Self::from_generator(sector.exchange_generator(k))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// Dense `exp(i angle G)`.
    pub fn unitary(&self, angle: f64) -> DMatrix<Complex64> {
        let n = self.len();
        let phases: Vec<Complex64> = self.values.iter().map(|&v| Complex64::from_polar(1.0, angle * v)).collect();
        DMatrix::from_fn(n, n, |r, c| {
            (0..n).map(|j| phases[j] * (self.vectors[(r, j)] * self.vectors[(c, j)])).sum()
        })
    }

    /// Coefficients of `x` in the eigenbasis, `V^T x`.
    pub fn to_eigenbasis(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        (0..n)
            .map(|j| (0..n).map(|r| x[r] * self.vectors[(r, j)]).sum())
            .collect()
    }

    /// `V (e^{i angle lambda} * y)` for eigenbasis coefficients `y`.
    pub fn from_eigenbasis(&self, angle: f64, y: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        let scaled: Vec<Complex64> = y
            .iter()
            .zip(&self.values)
            .map(|(c, &v)| c * Complex64::from_polar(1.0, angle * v))
            .collect();
        (0..n)
            .map(|r| (0..n).map(|j| scaled[j] * self.vectors[(r, j)]).sum())
            .collect()
    }

    /// `exp(i angle G) x`.
    pub fn evolve(&self, angle: f64, x: &[Complex64]) -> Vec<Complex64> {
        self.from_eigenbasis(angle, &self.to_eigenbasis(x))
    }
}
