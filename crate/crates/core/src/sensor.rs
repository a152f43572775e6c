//! Black-box process sensor: a balanced Mach-Zehnder interferometer with an
//! unknown two-mode nonlinearity between its beam splitters, fed by thermal
//! light in mode `a` and vacuum in mode `b`. The work capacity of output
//! mode `a` is the signature of the hidden process.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fock::{
    choose_cutoff, thermal_probability, Circuit, CircuitElement, FockCutoff, ModeIndex, MultiModeState, PairSector,
    SectorPropagator, DEFAULT_TAIL_EPSILON,
};
use crate::thermo;
use crate::{Error, Result};

/// Fewest trace points accepted by [`identify_process`].
pub const MIN_TRACE_POINTS: usize = 8;
/// Residual gap at or below which two candidates are indistinguishable.
pub const AMBIGUITY_TOLERANCE: f64 = 1e-6;
/// Golden-section stopping width, relative to the largest grid time.
pub const REFINE_RELATIVE_TOLERANCE: f64 = 1e-4;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProcessKind {
    /// `exp(-i chi t n_a^s n_b^s)`; order 1 is the cross-Kerr coupling.
    CrossKerr { order: u32 },
    /// `exp(-i g t (a^{dag k} b^k + a^k b^{dag k}))`.
    KPhotonExchange { k: u32 },
}

impl ProcessKind {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ProcessKind::CrossKerr { order: 0 } => Err(Error::param("order", "cross-phase order must be >= 1")),
            ProcessKind::KPhotonExchange { k: 0 } => Err(Error::param("k", "exchanged quanta must be >= 1")),
            _ => Ok(()),
        }
    }

    /// Nonlinear element for the dimensionless interaction `tau = coupling * t`.
    pub fn element(&self, tau: f64) -> Result<CircuitElement> {
        let (a, b) = (ModeIndex(0), ModeIndex(1));
        match *self {
            ProcessKind::CrossKerr { order } => CircuitElement::cross_kerr(tau, order, a, b),
            ProcessKind::KPhotonExchange { k } => CircuitElement::k_photon_exchange(tau, k, a, b),
        }
    }
}

impl fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProcessKind::CrossKerr { order } => write!(f, "cross_kerr_s{order}"),
            ProcessKind::KPhotonExchange { k } => write!(f, "exchange_k{k}"),
        }
    }
}

impl FromStr for ProcessKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::param(
                "process",
                format!("unknown process '{s}' (ck, cross_kerr_s<order>, k<k>, exchange_k<k>)"),
            )
        };
        let parse = |digits: &str| digits.parse::<u32>().map_err(|_| bad());
        let kind = match s {
            "ck" | "cross_kerr" => ProcessKind::CrossKerr { order: 1 },
            _ => {
                if let Some(rest) = s.strip_prefix("cross_kerr_s") {
                    ProcessKind::CrossKerr { order: parse(rest)? }
                } else if let Some(rest) = s.strip_prefix("exchange_k").or_else(|| s.strip_prefix('k')) {
                    ProcessKind::KPhotonExchange { k: parse(rest)? }
                } else {
                    return Err(bad());
                }
            }
        };
        kind.validate()?;
        Ok(kind)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlackBoxProcess {
    pub kind: ProcessKind,
    /// `chi` or `g`, in radians per unit time.
    pub coupling: f64,
}

impl BlackBoxProcess {
    pub fn new(kind: ProcessKind, coupling: f64) -> Result<Self> {
        kind.validate()?;
        if !(coupling >= 0.0 && coupling.is_finite()) {
            return Err(Error::param("coupling", format!("must be finite and >= 0, got {coupling}")));
        }
        Ok(BlackBoxProcess { kind, coupling })
    }

    pub fn circuit(&self, t: f64) -> Result<Circuit> {
        let (a, b) = (ModeIndex(0), ModeIndex(1));
        Ok(Circuit::new(vec![
            CircuitElement::balanced_beam_splitter(a, b),
            self.kind.element(self.coupling * t)?,
            CircuitElement::balanced_beam_splitter(a, b),
        ]))
    }
}

/// Work capacity of output mode `a` over interaction times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyTrace {
    /// Generating process, when known.
    pub process: Option<BlackBoxProcess>,
    pub nbar_a: f64,
    pub times: Vec<f64>,
    /// `wc / nbar_a`.
    pub eta: Vec<f64>,
    pub wc: Vec<f64>,
    pub mean_na_out: Vec<f64>,
}

impl EfficiencyTrace {
    /// Largest `|wc - mean_na_out / 2|` relative to `nbar_a`.
    pub fn half_photon_deviation(&self) -> f64 {
        self.wc
            .iter()
            .zip(&self.mean_na_out)
            .map(|(w, n)| (w - n / 2.0).abs() / self.nbar_a)
            .fold(0.0, f64::max)
    }
}

fn check_nbar_a(nbar_a: f64) -> Result<()> {
    if !(nbar_a > 0.0 && nbar_a.is_finite()) {
        return Err(Error::param("nbar_a", format!("efficiency needs a finite input energy > 0, got {nbar_a}")));
    }
    Ok(())
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::param("times", "interaction times must be finite and >= 0"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::param("times", "time grid must be sorted"));
    }
    Ok(())
}

/// Cutoff for thermal light of mean `nbar_a` at the default tail tolerance.
pub fn default_cutoff(nbar_a: f64) -> Result<FockCutoff> {
    choose_cutoff(nbar_a, DEFAULT_TAIL_EPSILON)
}

/// Output state of the interferometer after interaction time `t`, from
/// branch-by-branch evolution of `thermal(nbar_a) (x) vacuum`.
pub fn evolve_blackbox(process: &BlackBoxProcess, t: f64, nbar_a: f64, cutoff: FockCutoff) -> Result<MultiModeState> {
    let input = MultiModeState::tensor(&[
        MultiModeState::thermal(nbar_a, cutoff)?,
        MultiModeState::vacuum(vec![cutoff])?,
    ])?;
    input.apply_circuit(&process.circuit(t)?)
}

/// Nonlinear step restricted to one photon-number sector.
enum SectorNonlinearity {
    /// Phase exponents `-m^s (N - m)^s`, multiplied by `tau`.
    Diagonal(Vec<f64>),
    /// Exchange propagator and the input in its eigenbasis; `None` when
    /// the sector is too small for the exchange to act.
    Exchange(Option<(SectorPropagator, Vec<Complex64>)>),
}

struct SectorModel {
    weight: f64,
    /// State entering the nonlinearity: `BS |N, 0>`.
    inner: Vec<Complex64>,
    /// Output beam splitter on this sector.
    bs: DMatrix<Complex64>,
    nl: SectorNonlinearity,
}

/// Sector-resolved model of the interferometer for thermal input.
///
/// The input `|N,0>` of weight `p_N` stays in the sector of total `N`, and
/// the reduced output of mode `a` is diagonal, so each time point only
/// needs one small vector per sector.
pub struct SensorModel {
    kind: ProcessKind,
    nbar_a: f64,
    sectors: Vec<SectorModel>,
    dim: usize,
}

impl SensorModel {
    pub fn new(kind: ProcessKind, nbar_a: f64, cutoff: FockCutoff) -> Result<Self> {
        kind.validate()?;
        if !(nbar_a >= 0.0 && nbar_a.is_finite()) {
            return Err(Error::param("nbar_a", format!("must be finite and >= 0, got {nbar_a}")));
        }
        let d = cutoff.dim();
        let probs: Vec<f64> = (0..d).map(|n| thermal_probability(nbar_a, n)).collect();
        let kept: f64 = probs.iter().sum();
        let sectors = (0..d)
            .into_par_iter()
            .filter(|&n| probs[n] > 0.0)
            .map(|n| {
                let sector = PairSector::new(n, d, d).expect("sector fits the cutoff");
                let bs_prop = SectorPropagator::exchange(&sector, 1)?;
                let bs = bs_prop.unitary(FRAC_PI_4);
                let inner: Vec<Complex64> = (0..sector.len).map(|l| bs[(l, sector.len - 1)]).collect();
                let nl = match kind {
                    ProcessKind::CrossKerr { order } => SectorNonlinearity::Diagonal(
                        (0..sector.len)
                            .map(|l| {
                                let (m, rest) = sector.occupations(l);
                                -((m as f64).powi(order as i32) * (rest as f64).powi(order as i32))
                            })
                            .collect(),
                    ),
                    ProcessKind::KPhotonExchange { k } => {
                        if sector.len > k as usize {
                            let prop = SectorPropagator::exchange(&sector, k as usize)?;
                            let coeffs = prop.to_eigenbasis(&inner);
                            SectorNonlinearity::Exchange(Some((prop, coeffs)))
                        } else {
                            SectorNonlinearity::Exchange(None)
                        }
                    }
                };
                Ok(SectorModel {
                    weight: probs[n] / kept,
                    inner,
                    bs,
                    nl,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SensorModel {
            kind,
            nbar_a,
            sectors,
            dim: d,
        })
    }

    pub fn kind(&self) -> ProcessKind {
        self.kind
    }

    pub fn nbar_a(&self) -> f64 {
        self.nbar_a
    }

    /// Photon-number distribution of output mode `a` at `tau = coupling * t`.
    pub fn output_pmf(&self, tau: f64) -> Vec<f64> {
        let mut pmf = vec![0.0; self.dim];
        for s in &self.sectors {
            let mid: Vec<Complex64> = match &s.nl {
                SectorNonlinearity::Diagonal(exps) => s
                    .inner
                    .iter()
                    .zip(exps)
                    .map(|(c, e)| c * Complex64::from_polar(1.0, tau * e))
                    .collect(),
                // exp(-i tau G)
                SectorNonlinearity::Exchange(Some((prop, coeffs))) => prop.from_eigenbasis(-tau, coeffs),
                SectorNonlinearity::Exchange(None) => s.inner.clone(),
            };
            let out = &s.bs * DVector::from_vec(mid);
            for (p, amp) in pmf.iter_mut().zip(out.iter()) {
                *p += s.weight * amp.norm_sqr();
            }
        }
        pmf
    }

    /// `(work capacity, mean photon number)` of output mode `a`.
    pub fn work_capacity(&self, tau: f64) -> Result<(f64, f64)> {
        let pmf = self.output_pmf(tau);
        let report = thermo::ergotropy_of_pmf(&pmf)?;
        Ok((report.ergotropy, report.mean_energy))
    }
}

/// Efficiency trace over `times` from the sector-resolved model.
pub fn wc_trace(process: &BlackBoxProcess, nbar_a: f64, times: &[f64], cutoff: FockCutoff) -> Result<EfficiencyTrace> {
    check_nbar_a(nbar_a)?;
    check_times(times)?;
    let model = SensorModel::new(process.kind, nbar_a, cutoff)?;
    let points: Vec<(f64, f64)> = times
        .par_iter()
        .map(|&t| model.work_capacity(process.coupling * t))
        .collect::<Result<_>>()?;
    Ok(EfficiencyTrace {
        process: Some(*process),
        nbar_a,
        times: times.to_vec(),
        eta: points.iter().map(|(w, _)| w / nbar_a).collect(),
        wc: points.iter().map(|(w, _)| *w).collect(),
        mean_na_out: points.iter().map(|(_, n)| *n).collect(),
    })
}

/// Maximizes `f` over a sorted grid, then refines the best grid point by
/// golden-section search on its bracketing interval.
fn maximize_on_grid<F>(grid: &[f64], f: F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let values: Vec<f64> = grid.par_iter().map(|&t| f(t)).collect::<Result<_>>()?;
    let best = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .ok_or_else(|| Error::param("times", "time grid is empty"))?;
    let span = grid.last().unwrap() - grid[0];
    let tol = REFINE_RELATIVE_TOLERANCE * grid.last().unwrap().abs().max(span);
    let mut lo = grid[best.saturating_sub(1)];
    let mut hi = grid[(best + 1).min(grid.len() - 1)];
    let (mut best_t, mut best_v) = (grid[best], values[best]);
    if hi - lo <= tol {
        return Ok((best_v, best_t));
    }
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    for (t, v) in [(x1, f1), (x2, f2)] {
        if v > best_v {
            best_t = t;
            best_v = v;
        }
    }
    Ok((best_v, best_t))
}

/// Largest efficiency over the time grid, refined by golden section.
/// Returns `(eta_max, t_at_max)`.
pub fn max_efficiency(
    process: &BlackBoxProcess,
    nbar_a: f64,
    times: &[f64],
    cutoff: FockCutoff,
) -> Result<(f64, f64)> {
    check_nbar_a(nbar_a)?;
    check_times(times)?;
    let model = SensorModel::new(process.kind, nbar_a, cutoff)?;
    maximize_on_grid(times, |t| Ok(model.work_capacity(process.coupling * t)?.0 / nbar_a))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateFit {
    pub kind: ProcessKind,
    pub coupling: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Identification {
    /// Best candidate, or `None` when the two best fits are within
    /// [`AMBIGUITY_TOLERANCE`] of each other.
    pub kind: Option<ProcessKind>,
    pub coupling: Option<f64>,
    pub residual: f64,
    /// Residual gap between the best and second-best candidate.
    pub confidence: f64,
    pub ambiguous: bool,
    pub residuals: Vec<CandidateFit>,
}

/// Couplings scanned before refinement, as multiples of `1 / t_max`.
const COARSE_LOW: f64 = 0.05;
const COARSE_HIGH: f64 = 50.0;
const COARSE_POINTS: usize = 400;
const REFINED_MINIMA: usize = 3;
/// Per-point floor of the residual normalization, so that an all-zero
/// trace is compared on an absolute scale.
const RESIDUAL_FLOOR: f64 = 1e-12;

fn fit_candidate(trace: &EfficiencyTrace, kind: ProcessKind, cutoff: FockCutoff) -> Result<CandidateFit> {
    let model = SensorModel::new(kind, trace.nbar_a, cutoff)?;
    let floor = RESIDUAL_FLOOR * trace.eta.len() as f64;
    let norm = trace.eta.iter().map(|e| e * e).sum::<f64>().max(floor);
    let residual = |c: f64| -> Result<f64> {
        let mut sum = 0.0;
        for (&t, &obs) in trace.times.iter().zip(&trace.eta) {
            let (wc, _) = model.work_capacity(c * t)?;
            sum += (wc / trace.nbar_a - obs).powi(2);
        }
        Ok(sum / norm)
    };
    let t_max = trace.times.last().copied().unwrap_or(0.0);
    if t_max <= 0.0 {
        return Ok(CandidateFit {
            kind,
            coupling: 0.0,
            residual: residual(0.0)?,
        });
    }
    let ratio = (COARSE_HIGH / COARSE_LOW).powf(1.0 / (COARSE_POINTS - 1) as f64);
    let mut grid: Vec<f64> = vec![0.0];
    grid.extend((0..COARSE_POINTS).map(|i| COARSE_LOW * ratio.powi(i as i32) / t_max));
    let values: Vec<f64> = grid.par_iter().map(|&c| residual(c)).collect::<Result<_>>()?;

    // local minima of the coarse scan, best first
    let mut minima: Vec<usize> = (0..grid.len())
        .filter(|&i| (i == 0 || values[i] <= values[i - 1]) && (i + 1 == grid.len() || values[i] <= values[i + 1]))
        .collect();
    minima.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    minima.truncate(REFINED_MINIMA);

    let refined: Vec<(f64, f64)> = minima
        .par_iter()
        .map(|&i| {
            let lo = grid[i.saturating_sub(1)];
            let hi = grid[(i + 1).min(grid.len() - 1)];
            let (c, r) = golden_minimize(lo, hi, 1e-10 / t_max, &residual)?;
            Ok(if r < values[i] { (c, r) } else { (grid[i], values[i]) })
        })
        .collect::<Result<_>>()?;
    let (coupling, residual) = refined
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one coarse minimum");
    Ok(CandidateFit {
        kind,
        coupling,
        residual,
    })
}

fn golden_minimize<F>(mut lo: f64, mut hi: f64, tol: f64, f: &F) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Fits each candidate's coupling to the observed efficiencies and picks
/// the smallest normalized residual
/// `sum_i (eta_fit(t_i) - eta_i)^2 / sum_i eta_i^2`.
pub fn identify_process(
    trace: &EfficiencyTrace,
    candidates: &[ProcessKind],
    cutoff: FockCutoff,
) -> Result<Identification> {
    if trace.times.len() < MIN_TRACE_POINTS {
        return Err(Error::param(
            "trace",
            format!("need at least {MIN_TRACE_POINTS} points, got {}", trace.times.len()),
        ));
    }
    if trace.eta.len() != trace.times.len() {
        return Err(Error::param("trace", "times and eta differ in length"));
    }
    if candidates.is_empty() {
        return Err(Error::param("candidates", "no candidate processes"));
    }
    check_nbar_a(trace.nbar_a)?;
    check_times(&trace.times)?;
    let mut fits: Vec<CandidateFit> = candidates
        .iter()
        .map(|&kind| fit_candidate(trace, kind, cutoff))
        .collect::<Result<_>>()?;
    fits.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    let best = fits[0].clone();
    let confidence = fits.get(1).map_or(f64::INFINITY, |second| second.residual - best.residual);
    let ambiguous = confidence <= AMBIGUITY_TOLERANCE;
    Ok(Identification {
        kind: (!ambiguous).then_some(best.kind),
        coupling: (!ambiguous).then_some(best.coupling),
        residual: best.residual,
        confidence,
        ambiguous,
        residuals: fits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ck() -> ProcessKind {
        ProcessKind::CrossKerr { order: 1 }
    }

    #[test]
    fn labels_round_trip() {
        for kind in [ck(), ProcessKind::CrossKerr { order: 2 }, ProcessKind::KPhotonExchange { k: 3 }] {
            assert_eq!(kind.to_string().parse::<ProcessKind>().unwrap(), kind);
        }
        assert_eq!("ck".parse::<ProcessKind>().unwrap(), ck());
        assert_eq!("k2".parse::<ProcessKind>().unwrap(), ProcessKind::KPhotonExchange { k: 2 });
        assert!("k0".parse::<ProcessKind>().is_err());
        assert!("laser".parse::<ProcessKind>().is_err());
    }

    #[test]
    fn sector_model_matches_branch_evolution() {
        let d = FockCutoff::new(14).unwrap();
        for kind in [
            ck(),
            ProcessKind::CrossKerr { order: 2 },
            ProcessKind::KPhotonExchange { k: 1 },
            ProcessKind::KPhotonExchange { k: 2 },
            ProcessKind::KPhotonExchange { k: 3 },
        ] {
            let process = BlackBoxProcess::new(kind, 0.8).unwrap();
            let model = SensorModel::new(kind, 0.9, d).unwrap();
            for t in [0.0, 0.37, 1.9] {
                let state = evolve_blackbox(&process, t, 0.9, d).unwrap();
                let direct = state.photon_pmf(ModeIndex(0)).unwrap();
                let fast = model.output_pmf(0.8 * t);
                for (a, b) in direct.iter().zip(&fast) {
                    assert!((a - b).abs() < 1e-12, "{kind} t={t}: {a} vs {b}");
                }
                let rho = state.reduced_density(ModeIndex(0)).unwrap();
                let off: f64 = (0..14)
                    .flat_map(|i| (0..14).map(move |j| (i, j)))
                    .filter(|(i, j)| i != j)
                    .map(|(i, j)| rho[(i, j)].norm())
                    .fold(0.0, f64::max);
                assert!(off < 1e-12);
            }
        }
    }

    #[test]
    fn no_interaction_leaves_mode_a_empty() {
        let d = default_cutoff(1.0).unwrap();
        let trace = wc_trace(&BlackBoxProcess::new(ck(), 1.0).unwrap(), 1.0, &[0.0], d).unwrap();
        assert!(trace.wc[0].abs() < 1e-8);
        assert!(trace.mean_na_out[0].abs() < 1e-12);
        assert_eq!(trace.eta[0], trace.wc[0]);
    }

    #[test]
    fn single_photon_exchange_undoes_the_swap() {
        let d = default_cutoff(1.0).unwrap();
        let process = BlackBoxProcess::new(ProcessKind::KPhotonExchange { k: 1 }, 1.0).unwrap();
        let start = evolve_blackbox(&process, 0.0, 1.0, d).unwrap();
        let end = evolve_blackbox(&process, PI / 2.0, 1.0, d).unwrap();
        let (a0, b0) = (start.mean_photon(ModeIndex(0)).unwrap(), start.mean_photon(ModeIndex(1)).unwrap());
        let (a1, b1) = (end.mean_photon(ModeIndex(0)).unwrap(), end.mean_photon(ModeIndex(1)).unwrap());
        assert!((a0 - b1).abs() < 1e-9 && (b0 - a1).abs() < 1e-9);
    }

    #[test]
    fn guards() {
        let d = default_cutoff(1.0).unwrap();
        let p = BlackBoxProcess::new(ck(), 1.0).unwrap();
        assert!(max_efficiency(&p, 0.0, &[0.0, 1.0], d).is_err());
        assert!(wc_trace(&p, 1.0, &[1.0, 0.5], d).is_err());
        assert!(BlackBoxProcess::new(ck(), -1.0).is_err());
        let short = wc_trace(&p, 1.0, &[0.0, 1.0, 2.0], d).unwrap();
        assert!(identify_process(&short, &[ck()], d).is_err());
    }

    #[test]
    fn golden_refinement_beats_grid() {
        let grid: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let (v, t) = maximize_on_grid(&grid, |x| Ok(-(x - 0.537).powi(2))).unwrap();
        assert!((t - 0.537).abs() < 2e-4 && v <= 0.0);
    }
}
