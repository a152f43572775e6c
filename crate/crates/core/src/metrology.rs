//! Phase estimation with a Kerr-coupled Mach-Zehnder interferometer.
//!
//! The interferometer is `BS, PS(pi/2) on a, Kerr, BS, PS(phi) on a` with
//! mode `b` fed by vacuum. Sensitivity is judged by the quantum Fisher
//! information for the generator `n_a`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fock::{
    choose_cutoff, choose_cutoff_coherent, Circuit, CircuitElement, FockCutoff, ModeIndex, MultiModeState,
};
use crate::linalg::{hermitian_eigen, symmetric_eigen_hermitian};
use crate::{Error, Result};

/// Tail tolerance for interferometer cutoffs unless configured otherwise.
pub const DEFAULT_QFI_EPSILON: f64 = 1e-12;
/// Relative eigenvalue floor: eigenpairs below `EIG_FLOOR * lambda_max`
/// are treated as outside the support.
pub const EIG_FLOOR: f64 = 1e-12;
/// Largest dimension accepted by [`qfi_dense`].
pub const MAX_DENSE_QFI_DIM: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "nbar", rename_all = "snake_case")]
pub enum InputKind {
    Thermal(f64),
    Coherent(f64),
    /// Fock state with this many photons.
    Number(usize),
}

impl InputKind {
    /// Builds the input of the given family with mean photon number `nbar`;
    /// number states need an integer `nbar`.
    pub fn with_nbar(family: InputFamily, nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::param("nbar", format!("must be finite and >= 0, got {nbar}")));
        }
        Ok(match family {
            InputFamily::Thermal => InputKind::Thermal(nbar),
            InputFamily::Coherent => InputKind::Coherent(nbar),
            InputFamily::Number => {
                if nbar.fract() != 0.0 {
                    return Err(Error::param("nbar", format!("number states need an integer photon number, got {nbar}")));
                }
                InputKind::Number(nbar as usize)
            }
        })
    }

    pub fn family(&self) -> InputFamily {
        match self {
            InputKind::Thermal(_) => InputFamily::Thermal,
            InputKind::Coherent(_) => InputFamily::Coherent,
            InputKind::Number(_) => InputFamily::Number,
        }
    }

    pub fn nbar(&self) -> f64 {
        match *self {
            InputKind::Thermal(n) | InputKind::Coherent(n) => n,
            InputKind::Number(n) => n as f64,
        }
    }
}

/// Input family without its intensity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputFamily {
    Thermal,
    Coherent,
    Number,
}

impl fmt::Display for InputFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InputFamily::Thermal => "thermal",
            InputFamily::Coherent => "coherent",
            InputFamily::Number => "number",
        })
    }
}

impl FromStr for InputFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "thermal" => Ok(InputFamily::Thermal),
            "coherent" => Ok(InputFamily::Coherent),
            "number" => Ok(InputFamily::Number),
            other => Err(Error::param("kind", format!("unknown input kind '{other}' (thermal, coherent, number)"))),
        }
    }
}

/// Kerr element inside the interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Nonlinearity {
    /// `exp(i chi n_a n_b)`.
    CrossKerr,
    /// `exp(i chi n_a^2 / 2)` on mode `a`.
    SelfKerr,
}

impl fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Nonlinearity::CrossKerr => "cross_kerr",
            Nonlinearity::SelfKerr => "self_kerr",
        })
    }
}

impl FromStr for Nonlinearity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cross_kerr" | "ck" => Ok(Nonlinearity::CrossKerr),
            "self_kerr" | "sk" => Ok(Nonlinearity::SelfKerr),
            other => Err(Error::param(
                "nonlinearity",
                format!("unknown nonlinearity '{other}' (cross_kerr, self_kerr)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MziSpec {
    pub input: InputKind,
    pub nonlinearity: Nonlinearity,
    pub chi: f64,
    pub phi: f64,
    /// Tail mass allowed above the cutoff of thermal and coherent inputs.
    pub tail_epsilon: f64,
}

impl MziSpec {
    /// Cross-Kerr interferometer at `phi = 0` with the default tail tolerance.
    pub fn cross_kerr(input: InputKind, chi: f64) -> Self {
        MziSpec {
            input,
            nonlinearity: Nonlinearity::CrossKerr,
            chi,
            phi: 0.0,
            tail_epsilon: DEFAULT_QFI_EPSILON,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.chi.is_finite() {
            return Err(Error::param("chi", "must be finite"));
        }
        if !self.phi.is_finite() {
            return Err(Error::param("phi", "must be finite"));
        }
        let nbar = self.input.nbar();
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::param("nbar", format!("must be finite and >= 0, got {nbar}")));
        }
        Ok(())
    }

    /// Per-mode cutoff used for both interferometer modes.
    pub fn cutoff(&self) -> Result<FockCutoff> {
        match self.input {
            InputKind::Thermal(nbar) => choose_cutoff(nbar, self.tail_epsilon),
            InputKind::Coherent(nbar) => choose_cutoff_coherent(nbar, self.tail_epsilon),
            InputKind::Number(n) => FockCutoff::new(n + 1),
        }
    }

    pub fn circuit(&self) -> Circuit {
        let (a, b) = (ModeIndex(0), ModeIndex(1));
        let kerr = match self.nonlinearity {
            Nonlinearity::CrossKerr => CircuitElement::cross_kerr_coupler(self.chi, a, b),
            Nonlinearity::SelfKerr => CircuitElement::self_kerr(self.chi, a),
        };
        Circuit::new(vec![
            CircuitElement::balanced_beam_splitter(a, b),
            CircuitElement::phase_shift(FRAC_PI_2, a),
            kerr,
            CircuitElement::balanced_beam_splitter(a, b),
            CircuitElement::phase_shift(self.phi, a),
        ])
    }
}

/// Input state of mode `a` with vacuum in mode `b`.
pub fn input_state(spec: &MziSpec) -> Result<MultiModeState> {
    spec.validate()?;
    let d = spec.cutoff()?;
    let a = match spec.input {
        InputKind::Thermal(nbar) => MultiModeState::thermal(nbar, d)?,
        InputKind::Coherent(nbar) => {
            MultiModeState::coherent_with_tolerance(Complex64::new(nbar.sqrt(), 0.0), d, spec.tail_epsilon)?
        }
        InputKind::Number(n) => MultiModeState::number(n, d)?,
    };
    MultiModeState::tensor(&[a, MultiModeState::vacuum(vec![d])?])
}

/// State after the final phase shifter.
pub fn evolve_to_phase_shifter(spec: &MziSpec) -> Result<MultiModeState> {
    input_state(spec)?.apply_circuit(&spec.circuit())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QfiReport {
    pub fisher_information: f64,
    /// `F^{-1/2}`; infinite when `F = 0`.
    pub min_phase_error: f64,
    /// Mean photon number of the probe state.
    pub nbar_effective: f64,
    /// Eigenpairs of the state kept in the sum.
    pub eigen_spectrum_used: usize,
}

impl QfiReport {
    fn new(fisher_information: f64, nbar_effective: f64, eigen_spectrum_used: usize) -> Self {
        let f = fisher_information.max(0.0);
        QfiReport {
            fisher_information: f,
            min_phase_error: 1.0 / f.sqrt(),
            nbar_effective,
            eigen_spectrum_used,
        }
    }
}

/// Nonzero amplitudes of a branch, scaled by `sqrt(weight)`, with their
/// generator eigenvalue.
struct SparseColumn {
    index: Vec<usize>,
    amp: Vec<Complex64>,
    n: Vec<f64>,
}

/// Quantum Fisher information of `state` for the generator `n_mode`.
///
/// Works on the support of `rho` through the Gram matrix of the weighted
/// branches, so its cost scales with the branch count rather than the
/// Hilbert-space dimension. Equal to [`qfi_dense`] wherever both apply.
pub fn qfi(state: &MultiModeState, generator_mode: ModeIndex) -> Result<QfiReport> {
    qfi_with_floor(state, generator_mode, EIG_FLOOR)
}

/// [`qfi`] with a custom relative eigenvalue floor.
pub fn qfi_with_floor(state: &MultiModeState, generator_mode: ModeIndex, eig_floor: f64) -> Result<QfiReport> {
    if !(eig_floor >= 0.0 && eig_floor < 1.0) {
        return Err(Error::param("eig_floor", format!("must lie in [0, 1), got {eig_floor}")));
    }
    if generator_mode.0 >= state.n_modes() {
        return Err(Error::InvalidMode {
            mode: generator_mode.0,
            n_modes: state.n_modes(),
        });
    }
    let dims: Vec<usize> = state.dims().iter().map(|d| d.dim()).collect();
    let stride: usize = dims[generator_mode.0 + 1..].iter().product();
    let dg = dims[generator_mode.0];
    let columns: Vec<SparseColumn> = state
        .branches()
        .par_iter()
        .filter(|b| b.weight() > 0.0)
        .map(|b| {
            let scale = b.weight().sqrt();
            let mut col = SparseColumn {
                index: Vec::new(),
                amp: Vec::new(),
                n: Vec::new(),
            };
            for (x, a) in b.amplitudes().iter().enumerate() {
                if a.norm_sqr() > 0.0 {
                    col.index.push(x);
                    col.amp.push(a * scale);
                    col.n.push(((x / stride) % dg) as f64);
                }
            }
            col
        })
        .collect();
    let nb = columns.len();

    // Gram matrix and first/second generator moments between branches.
    let rows: Vec<Vec<(usize, [Complex64; 3])>> = (0..nb)
        .into_par_iter()
        .map(|j| {
            let mut out = Vec::new();
            for k in j..nb {
                if let Some(m) = sparse_moments(&columns[j], &columns[k]) {
                    out.push((k, m));
                }
            }
            out
        })
        .collect();
    let mut g = DMatrix::<Complex64>::zeros(nb, nb);
    let mut a1 = DMatrix::<Complex64>::zeros(nb, nb);
    let mut a2 = DMatrix::<Complex64>::zeros(nb, nb);
    for (j, row) in rows.into_iter().enumerate() {
        for (k, [m0, m1, m2]) in row {
            g[(j, k)] = m0;
            g[(k, j)] = m0.conj();
            a1[(j, k)] = m1;
            a1[(k, j)] = m1.conj();
            a2[(j, k)] = m2;
            a2[(k, j)] = m2.conj();
        }
    }

    let (values, vectors) = symmetric_eigen_hermitian(&g)?;
    let lambda_max = values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> = (0..nb).filter(|&i| values[i] > eig_floor * lambda_max).collect();
    let u = DMatrix::from_fn(nb, keep.len(), |r, c| vectors[(r, keep[c])]);
    let at = u.adjoint() * &a1 * &u;
    let a2t = u.adjoint() * &a2 * &u;
    let lambda: Vec<f64> = keep.iter().map(|&i| values[i]).collect();
    let mut f = 0.0;
    for k in 0..keep.len() {
        f += 4.0 * a2t[(k, k)].re;
        for l in 0..keep.len() {
            f -= 8.0 * at[(k, l)].norm_sqr() / (lambda[k] + lambda[l]);
        }
    }
    Ok(QfiReport::new(f, state.total_mean_photon(), keep.len()))
}

/// `(<a|b>, <a|n|b>, <a|n^2|b>)` over the common support, `None` if disjoint.
fn sparse_moments(a: &SparseColumn, b: &SparseColumn) -> Option<[Complex64; 3]> {
    let (a_lo, a_hi) = (*a.index.first()?, *a.index.last()?);
    let (b_lo, b_hi) = (*b.index.first()?, *b.index.last()?);
    if a_hi < b_lo || b_hi < a_lo {
        return None;
    }
    let mut m = [Complex64::new(0.0, 0.0); 3];
    let mut hit = false;
    let (mut i, mut j) = (0, 0);
    while i < a.index.len() && j < b.index.len() {
        match a.index[i].cmp(&b.index[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                let p = a.amp[i].conj() * b.amp[j];
                let n = a.n[i];
                m[0] += p;
                m[1] += p * n;
                m[2] += p * n * n;
                hit = true;
                i += 1;
                j += 1;
            }
        }
    }
    hit.then_some(m)
}

/// Quantum Fisher information from the explicit density matrix:
/// `F = 2 sum_{k,l} (l_k - l_l)^2 / (l_k + l_l) |<k|n|l>|^2` over pairs with
/// `l_k + l_l` above the eigenvalue floor.
pub fn qfi_dense(state: &MultiModeState, generator_mode: ModeIndex) -> Result<QfiReport> {
    if generator_mode.0 >= state.n_modes() {
        return Err(Error::InvalidMode {
            mode: generator_mode.0,
            n_modes: state.n_modes(),
        });
    }
    let dim = state.dim();
    if dim > MAX_DENSE_QFI_DIM {
        return Err(Error::DimensionOverflow {
            dim,
            limit: MAX_DENSE_QFI_DIM,
        });
    }
    let rho = state.density_matrix()?;
    let eig = hermitian_eigen(&rho)?;
    let n: Vec<f64> = (0..dim)
        .map(|x| state.occupations(x)[generator_mode.0] as f64)
        .collect();
    // <k|n|l> = sum_x conj(v_xk) n_x v_xl
    let nv = DMatrix::from_fn(dim, dim, |x, l| eig.vectors[(x, l)] * n[x]);
    let gen = eig.vectors.adjoint() * nv;
    let lambda_max = eig.values.iter().copied().fold(0.0, f64::max);
    let floor = EIG_FLOOR * lambda_max;
    let mut f = 0.0;
    for k in 0..dim {
        for l in 0..dim {
            let (lk, ll) = (eig.values[k], eig.values[l]);
            if lk + ll > floor {
                f += 2.0 * (lk - ll).powi(2) / (lk + ll) * gen[(k, l)].norm_sqr();
            }
        }
    }
    let used = eig.values.iter().filter(|&&v| v > floor).count();
    Ok(QfiReport::new(f, state.total_mean_photon(), used))
}

/// Fisher information of the interferometer output for `spec`.
pub fn mzi_qfi(spec: &MziSpec) -> Result<QfiReport> {
    qfi(&evolve_to_phase_shifter(spec)?, ModeIndex(0))
}

/// Closed-form Fisher information of the cross-Kerr interferometer at
/// `chi = pi/2`: `nbar^2 + nbar` (thermal), `nbar^2` (number),
/// `nbar^2 / 2 + 2 nbar` (coherent).
pub fn qfi_closed_form(family: InputFamily, nbar: f64) -> f64 {
    match family {
        InputFamily::Thermal => nbar * nbar + nbar,
        InputFamily::Number => nbar * nbar,
        InputFamily::Coherent => nbar * nbar / 2.0 + 2.0 * nbar,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseErrorPoint {
    pub nbar: f64,
    pub dphi_min: f64,
    /// Standard quantum limit `nbar^{-1/2}`.
    pub dphi_sql: f64,
    /// Heisenberg limit `nbar^{-1}`.
    pub dphi_hl: f64,
    pub fisher_information: f64,
}

/// Minimal phase error across a grid of input intensities, in grid order.
pub fn phase_error_curve(
    family: InputFamily,
    nonlinearity: Nonlinearity,
    nbar_grid: &[f64],
    chi: f64,
    tail_epsilon: f64,
) -> Result<Vec<PhaseErrorPoint>> {
    nbar_grid
        .par_iter()
        .map(|&nbar| {
            let spec = MziSpec {
                input: InputKind::with_nbar(family, nbar)?,
                nonlinearity,
                chi,
                phi: 0.0,
                tail_epsilon,
            };
            let report = mzi_qfi(&spec)?;
            Ok(PhaseErrorPoint {
                nbar,
                dphi_min: report.min_phase_error,
                dphi_sql: 1.0 / nbar.sqrt(),
                dphi_hl: 1.0 / nbar,
                fisher_information: report.fisher_information,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn number_variance(state: &MultiModeState, mode: usize) -> f64 {
        let v = state.branches()[0].amplitudes();
        let (mut m1, mut m2) = (0.0, 0.0);
        for (x, a) in v.iter().enumerate() {
            let n = state.occupations(x)[mode] as f64;
            m1 += a.norm_sqr() * n;
            m2 += a.norm_sqr() * n * n;
        }
        m2 - m1 * m1
    }

    #[test]
    fn vacuum_passes_untouched() {
        let spec = MziSpec::cross_kerr(InputKind::Thermal(0.0), 0.0);
        let out = evolve_to_phase_shifter(&spec).unwrap();
        assert_eq!(out.branches().len(), 1);
        assert!((out.branches()[0].amplitudes()[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn thermal_photons_conserved() {
        let mut spec = MziSpec::cross_kerr(InputKind::Thermal(1.0), PI / 2.0);
        spec.tail_epsilon = 1e-10;
        let input = input_state(&spec).unwrap();
        let out = evolve_to_phase_shifter(&spec).unwrap();
        assert!((out.total_mean_photon() - input.total_mean_photon()).abs() < 1e-10);
        assert!((input.total_mean_photon() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn pure_state_matches_variance() {
        let spec = MziSpec::cross_kerr(InputKind::Coherent(1.5), 0.7);
        let out = evolve_to_phase_shifter(&spec).unwrap();
        let r = qfi(&out, ModeIndex(0)).unwrap();
        assert!((r.fisher_information - 4.0 * number_variance(&out, 0)).abs() < 1e-8);
        assert_eq!(r.eigen_spectrum_used, 1);
    }

    #[test]
    fn fock_input_before_circuit_has_no_information() {
        let s = MultiModeState::tensor(&[
            MultiModeState::number(3, FockCutoff::new(4).unwrap()).unwrap(),
            MultiModeState::vacuum(vec![FockCutoff::new(4).unwrap()]).unwrap(),
        ])
        .unwrap();
        let r = qfi(&s, ModeIndex(0)).unwrap();
        assert!(r.fisher_information.abs() < 1e-12);
        assert!(r.min_phase_error.is_infinite());
    }

    #[test]
    fn low_rank_route_matches_dense() {
        for spec in [
            MziSpec {
                tail_epsilon: 1e-6,
                ..MziSpec::cross_kerr(InputKind::Thermal(1.0), PI / 2.0)
            },
            MziSpec {
                tail_epsilon: 1e-6,
                ..MziSpec::cross_kerr(InputKind::Thermal(0.8), 1.1)
            },
            MziSpec {
                nonlinearity: Nonlinearity::SelfKerr,
                tail_epsilon: 1e-6,
                ..MziSpec::cross_kerr(InputKind::Thermal(1.0), 0.9)
            },
        ] {
            let out = evolve_to_phase_shifter(&spec).unwrap();
            let fast = qfi(&out, ModeIndex(0)).unwrap().fisher_information;
            let dense = qfi_dense(&out, ModeIndex(0)).unwrap().fisher_information;
            assert!((fast - dense).abs() < 1e-8 * dense.max(1.0), "{fast} vs {dense}");
        }
    }

    #[test]
    fn phase_does_not_change_information() {
        let base = MziSpec {
            tail_epsilon: 1e-10,
            ..MziSpec::cross_kerr(InputKind::Thermal(1.0), PI / 2.0)
        };
        let f0 = mzi_qfi(&base).unwrap().fisher_information;
        let f1 = mzi_qfi(&MziSpec { phi: 1.234, ..base }).unwrap().fisher_information;
        assert!((f0 - f1).abs() < 1e-8);
    }

    #[test]
    fn closed_forms() {
        assert_eq!(qfi_closed_form(InputFamily::Thermal, 5.0), 30.0);
        assert_eq!(qfi_closed_form(InputFamily::Number, 5.0), 25.0);
        assert_eq!(qfi_closed_form(InputFamily::Coherent, 5.0), 22.5);
    }

    #[test]
    fn number_kind_requires_integer() {
        assert!(InputKind::with_nbar(InputFamily::Number, 2.5).is_err());
        assert_eq!(InputKind::with_nbar(InputFamily::Number, 2.0).unwrap(), InputKind::Number(2));
        assert_eq!("thermal".parse::<InputFamily>().unwrap(), InputFamily::Thermal);
        assert!("squeezed".parse::<InputFamily>().is_err());
    }
}
