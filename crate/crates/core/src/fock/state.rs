use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::circuit::{decode, strides};
use super::{
    check_epsilon, check_nbar, coherent_amplitudes, poisson_tail, thermal_probability, Circuit, CircuitElement,
    FockCutoff, ModeIndex, DEFAULT_TAIL_EPSILON, MAX_MODES, MAX_STATE_DIM,
};
use crate::{Error, Result};

const WEIGHT_TOLERANCE: f64 = 1e-12;
const NORM_TOLERANCE: f64 = 1e-10;
/// Largest dimension for which a full density matrix is assembled.
pub const MAX_DENSITY_DIM: usize = 4096;

/// One weighted pure component of a mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    weight: f64,
    amplitudes: Vec<Complex64>,
}

impl Branch {
    pub fn new(weight: f64, amplitudes: Vec<Complex64>) -> Self {
        Branch { weight, amplitudes }
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

/// State of 1 to 4 modes in truncated Fock space, stored as
/// `rho = sum_j w_j |psi_j><psi_j|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "StateWire", try_from = "StateWire")]
pub struct MultiModeState {
    dims: Vec<FockCutoff>,
    branches: Vec<Branch>,
}

impl MultiModeState {
    /// Builds a state after checking every representation invariant.
    pub fn from_branches(dims: Vec<FockCutoff>, branches: Vec<Branch>) -> Result<Self> {
        if dims.is_empty() || dims.len() > MAX_MODES {
            return Err(Error::InvalidState(format!(
                "mode count must be in 1..={MAX_MODES}, got {}",
                dims.len()
            )));
        }
        let total = total_dim(&dims)?;
        if branches.is_empty() {
            return Err(Error::InvalidState("state has no branches".into()));
        }
        let mut weight_sum = 0.0;
        for (j, b) in branches.iter().enumerate() {
            if !(b.weight >= 0.0) {
                return Err(Error::InvalidState(format!("branch {j} has weight {}", b.weight)));
            }
            if b.amplitudes.len() != total {
                return Err(Error::InvalidState(format!(
                    "branch {j} has {} amplitudes, expected {total}",
                    b.amplitudes.len()
                )));
            }
            let norm: f64 = b.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > NORM_TOLERANCE {
                return Err(Error::InvalidState(format!("branch {j} has norm {norm}")));
            }
            weight_sum += b.weight;
        }
        if (weight_sum - 1.0).abs() > WEIGHT_TOLERANCE {
            return Err(Error::InvalidState(format!("branch weights sum to {weight_sum}")));
        }
        Ok(MultiModeState { dims, branches })
    }

    /// Multimode vacuum.
    pub fn vacuum(dims: Vec<FockCutoff>) -> Result<Self> {
        let total = total_dim(&dims)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); total];
        amps[0] = Complex64::new(1.0, 0.0);
        Self::from_branches(dims, vec![Branch::new(1.0, amps)])
    }

    /// Single-mode thermal state as a mixture of Fock states, with the
    /// geometric law renormalized over the kept levels.
    pub fn thermal(nbar: f64, cutoff: FockCutoff) -> Result<Self> {
        check_nbar(nbar)?;
        let d = cutoff.dim();
        let probs: Vec<f64> = (0..d).map(|n| thermal_probability(nbar, n)).collect();
        let kept: f64 = probs.iter().sum();
        let branches = probs
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(n, &p)| Branch::new(p / kept, basis_vector(d, n)))
            .collect();
        Self::from_branches(vec![cutoff], branches)
    }

    /// Coherent state `|alpha>`, rejected if more than
    /// [`DEFAULT_TAIL_EPSILON`] of its Poisson mass lies above the cutoff.
    pub fn coherent(alpha: Complex64, cutoff: FockCutoff) -> Result<Self> {
        Self::coherent_with_tolerance(alpha, cutoff, DEFAULT_TAIL_EPSILON)
    }

    pub fn coherent_with_tolerance(alpha: Complex64, cutoff: FockCutoff, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(Error::param("alpha", "amplitude must be finite"));
        }
        let d = cutoff.dim();
        let tail = poisson_tail(alpha.norm_sqr(), d);
        if tail >= epsilon {
            return Err(Error::CutoffTooSmall { dim: d, tail, epsilon });
        }
        let mut amps = coherent_amplitudes(alpha, d);
        normalize(&mut amps);
        Self::from_branches(vec![cutoff], vec![Branch::new(1.0, amps)])
    }

    /// Fock state `|n>`.
    pub fn number(n: usize, cutoff: FockCutoff) -> Result<Self> {
        let d = cutoff.dim();
        if n >= d {
            return Err(Error::param("n", format!("Fock level {n} does not fit below cutoff {d}")));
        }
        Self::from_branches(vec![cutoff], vec![Branch::new(1.0, basis_vector(d, n))])
    }

    /// Tensor product in argument order; branches form the Cartesian product.
    pub fn tensor(states: &[MultiModeState]) -> Result<Self> {
        let (first, rest) = states
            .split_first()
            .ok_or_else(|| Error::InvalidState("tensor product of no states".into()))?;
        let mut dims = first.dims.clone();
        let mut branches = first.branches.clone();
        for s in rest {
            dims.extend_from_slice(&s.dims);
            if dims.len() > MAX_MODES {
                return Err(Error::DimensionOverflow {
                    dim: dims.len(),
                    limit: MAX_MODES,
                });
            }
            let total = total_dim(&dims)?;
            let storage = total.saturating_mul(branches.len() * s.branches.len());
            if storage > 8 * MAX_STATE_DIM {
                return Err(Error::DimensionOverflow {
                    dim: storage,
                    limit: 8 * MAX_STATE_DIM,
                });
            }
            let mut next = Vec::with_capacity(branches.len() * s.branches.len());
            for left in &branches {
                for right in &s.branches {
                    let amps = left
                        .amplitudes
                        .iter()
                        .flat_map(|l| right.amplitudes.iter().map(move |r| l * r))
                        .collect();
                    next.push(Branch::new(left.weight * right.weight, amps));
                }
            }
            branches = next;
        }
        Self::from_branches(dims, branches)
    }

    pub fn dims(&self) -> &[FockCutoff] {
        &self.dims
    }

    pub fn n_modes(&self) -> usize {
        self.dims.len()
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.dims.iter().map(|d| d.dim()).product()
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn apply(&self, element: &CircuitElement) -> Result<Self> {
        let mut vectors: Vec<Vec<Complex64>> = self.branches.iter().map(|b| b.amplitudes.clone()).collect();
        element.apply_pure(&self.dims, &mut vectors)?;
        Ok(self.with_amplitudes(vectors))
    }

    pub fn apply_circuit(&self, circuit: &Circuit) -> Result<Self> {
        circuit.validate(self.n_modes())?;
        let mut vectors: Vec<Vec<Complex64>> = self.branches.iter().map(|b| b.amplitudes.clone()).collect();
        for e in circuit.elements() {
            e.apply_pure(&self.dims, &mut vectors)?;
        }
        Ok(self.with_amplitudes(vectors))
    }

    fn with_amplitudes(&self, vectors: Vec<Vec<Complex64>>) -> Self {
        MultiModeState {
            dims: self.dims.clone(),
            branches: self
                .branches
                .iter()
                .zip(vectors)
                .map(|(b, amplitudes)| Branch::new(b.weight, amplitudes))
                .collect(),
        }
    }

    fn check_mode(&self, mode: ModeIndex) -> Result<()> {
        if mode.0 >= self.n_modes() {
            return Err(Error::InvalidMode {
                mode: mode.0,
                n_modes: self.n_modes(),
            });
        }
        Ok(())
    }

    /// Partial trace over every mode except `mode`.
    pub fn reduced_density(&self, mode: ModeIndex) -> Result<DMatrix<Complex64>> {
        self.check_mode(mode)?;
        let dims: Vec<usize> = self.dims.iter().map(|d| d.dim()).collect();
        let d = dims[mode.0];
        let stride = strides(&dims)[mode.0];
        let rest = self.dim() / d;
        let mut rho = DMatrix::<Complex64>::zeros(d, d);
        // view each branch as a d x rest matrix M, then rho += w M M^dag
        let mut m = DMatrix::<Complex64>::zeros(d, rest);
        for b in &self.branches {
            if b.weight == 0.0 {
                continue;
            }
            for (x, amp) in b.amplitudes.iter().enumerate() {
                let level = (x / stride) % d;
                let outer = x / (stride * d);
                let inner = x % stride;
                m[(level, outer * stride + inner)] = *amp;
            }
            rho.gemm(Complex64::new(b.weight, 0.0), &m, &m.adjoint(), Complex64::new(1.0, 0.0));
        }
        // symmetrize away rounding
        let herm = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
        Ok(herm)
    }

    /// Photon-number distribution of one mode.
    pub fn photon_pmf(&self, mode: ModeIndex) -> Result<Vec<f64>> {
        self.check_mode(mode)?;
        let dims: Vec<usize> = self.dims.iter().map(|d| d.dim()).collect();
        let d = dims[mode.0];
        let stride = strides(&dims)[mode.0];
        let mut pmf = vec![0.0; d];
        for b in &self.branches {
            for (x, amp) in b.amplitudes.iter().enumerate() {
                pmf[(x / stride) % d] += b.weight * amp.norm_sqr();
            }
        }
        Ok(pmf)
    }

    /// `sum_j w_j <psi_j| n_mode |psi_j>`.
    pub fn mean_photon(&self, mode: ModeIndex) -> Result<f64> {
        Ok(self
            .photon_pmf(mode)?
            .iter()
            .enumerate()
            .map(|(n, p)| n as f64 * p)
            .sum())
    }

    /// Mean of the total photon number over all modes.
    pub fn total_mean_photon(&self) -> f64 {
        (0..self.n_modes())
            .map(|m| self.mean_photon(ModeIndex(m)).expect("mode in range"))
            .sum()
    }

    /// Explicit density matrix; only for dimensions up to [`MAX_DENSITY_DIM`].
    pub fn density_matrix(&self) -> Result<DMatrix<Complex64>> {
        let total = self.dim();
        if total > MAX_DENSITY_DIM {
            return Err(Error::DimensionOverflow {
                dim: total,
                limit: MAX_DENSITY_DIM,
            });
        }
        let mut rho = DMatrix::<Complex64>::zeros(total, total);
        for b in &self.branches {
            let v = nalgebra::DVector::from_column_slice(&b.amplitudes);
            rho.gerc(Complex64::new(b.weight, 0.0), &v, &v, Complex64::new(1.0, 0.0));
        }
        Ok(rho)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let wire: StateWire = serde_json::from_str(text).map_err(|e| Error::InvalidState(e.to_string()))?;
        MultiModeState::try_from(wire)
    }

    /// Occupation numbers of basis index `x`.
    pub fn occupations(&self, x: usize) -> Vec<usize> {
        let dims: Vec<usize> = self.dims.iter().map(|d| d.dim()).collect();
        let mut occ = vec![0; dims.len()];
        decode(x, &dims, &strides(&dims), &mut occ);
        occ
    }
}

fn total_dim(dims: &[FockCutoff]) -> Result<usize> {
    let mut total: usize = 1;
    for d in dims {
        total = total.saturating_mul(d.dim());
    }
    if total > MAX_STATE_DIM {
        return Err(Error::DimensionOverflow {
            dim: total,
            limit: MAX_STATE_DIM,
        });
    }
    Ok(total)
}

fn basis_vector(d: usize, n: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); d];
    v[n] = Complex64::new(1.0, 0.0);
    v
}

fn normalize(v: &mut [Complex64]) {
    let norm: f64 = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in v.iter_mut() {
        *c /= norm;
    }
}

/// JSON wire form: amplitudes interleaved as `[re0, im0, re1, im1, ...]`.
#[derive(Serialize, Deserialize)]
struct StateWire {
    mode_dims: Vec<usize>,
    branches: Vec<BranchWire>,
}

#[derive(Serialize, Deserialize)]
struct BranchWire {
    weight: f64,
    amplitudes: Vec<f64>,
}

impl From<MultiModeState> for StateWire {
    fn from(s: MultiModeState) -> Self {
        StateWire {
            mode_dims: s.dims.iter().map(|d| d.dim()).collect(),
            branches: s
                .branches
                .into_iter()
                .map(|b| BranchWire {
                    weight: b.weight,
                    amplitudes: b.amplitudes.iter().flat_map(|c| [c.re, c.im]).collect(),
                })
                .collect(),
        }
    }
}

impl TryFrom<StateWire> for MultiModeState {
    type Error = Error;
    fn try_from(w: StateWire) -> Result<Self> {
        let dims = w
            .mode_dims
            .into_iter()
            .map(FockCutoff::new)
            .collect::<Result<Vec<_>>>()?;
        let branches = w
            .branches
            .into_iter()
            .map(|b| {
                if b.amplitudes.len() % 2 != 0 {
                    return Err(Error::InvalidState("odd-length interleaved amplitude array".into()));
                }
                let amps = b
                    .amplitudes
                    .chunks_exact(2)
                    .map(|p| Complex64::new(p[0], p[1]))
                    .collect();
                Ok(Branch::new(b.weight, amps))
            })
            .collect::<Result<Vec<_>>>()?;
        MultiModeState::from_branches(dims, branches)
    }
}
