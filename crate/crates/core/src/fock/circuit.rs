use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sector::{pair_sectors, PairSector, SectorPropagator};
use super::FockCutoff;
use crate::{Error, Result};

/// Position of a mode within a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModeIndex(pub usize);

/// Largest dimension for which [`CircuitElement::unitary`] builds a dense matrix.
const MAX_DENSE_UNITARY_DIM: usize = 4096;
/// Allowed drift of a branch norm under one element.
const UNITARITY_TOLERANCE: f64 = 1e-8;

/// One unitary element.
///
/// Conventions (n = a^dag a):
/// - `BeamSplitter`: `exp(i theta (a^dag b + a b^dag))` with
///   `transmission = cos theta`, `reflection = sin theta`; 50:50 is
///   `theta = pi/4`.
/// - `PhaseShift`: `exp(i phi n)`.
/// - `CrossKerr`: `exp(-i chi_t n_a^s n_b^s)` of order `s`.
/// - `KPhotonExchange`: `exp(-i g_t (a^dag^k b^k + a^k b^dag^k))`.
/// - `SelfKerr`: `exp(i chi n^2 / 2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CircuitElement {
    BeamSplitter {
        transmission: f64,
        reflection: f64,
        a: ModeIndex,
        b: ModeIndex,
    },
    PhaseShift {
        phi: f64,
        mode: ModeIndex,
    },
    CrossKerr {
        chi_t: f64,
        order: u32,
        a: ModeIndex,
        b: ModeIndex,
    },
    KPhotonExchange {
        g_t: f64,
        k: u32,
        a: ModeIndex,
        b: ModeIndex,
    },
    SelfKerr {
        chi: f64,
        mode: ModeIndex,
    },
}

fn check_pair(a: ModeIndex, b: ModeIndex) -> Result<()> {
    if a == b {
        return Err(Error::param("modes", format!("two-mode element needs distinct modes, got {} twice", a.0)));
    }
    Ok(())
}

fn check_finite(name: &'static str, v: f64) -> Result<()> {
    if !v.is_finite() {
        return Err(Error::param(name, format!("must be finite, got {v}")));
    }
    Ok(())
}

impl CircuitElement {
    pub fn beam_splitter(transmission: f64, reflection: f64, a: ModeIndex, b: ModeIndex) -> Result<Self> {
        let e = CircuitElement::BeamSplitter {
            transmission,
            reflection,
            a,
            b,
        };
        e.check_parameters()?;
        Ok(e)
    }

    pub fn balanced_beam_splitter(a: ModeIndex, b: ModeIndex) -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        CircuitElement::BeamSplitter {
            transmission: h,
            reflection: h,
            a,
            b,
        }
    }

    pub fn phase_shift(phi: f64, mode: ModeIndex) -> Self {
        CircuitElement::PhaseShift { phi, mode }
    }

    /// `exp(-i chi_t n_a^s n_b^s)`.
    pub fn cross_kerr(chi_t: f64, order: u32, a: ModeIndex, b: ModeIndex) -> Result<Self> {
        let e = CircuitElement::CrossKerr { chi_t, order, a, b };
        e.check_parameters()?;
        Ok(e)
    }

    /// Interferometer coupler `exp(+i chi n_a n_b)`, i.e. first-order
    /// cross-Kerr with `chi_t = -chi`.
    pub fn cross_kerr_coupler(chi: f64, a: ModeIndex, b: ModeIndex) -> Self {
        CircuitElement::CrossKerr {
            chi_t: -chi,
            order: 1,
            a,
            b,
        }
    }

    pub fn k_photon_exchange(g_t: f64, k: u32, a: ModeIndex, b: ModeIndex) -> Result<Self> {
        let e = CircuitElement::KPhotonExchange { g_t, k, a, b };
        e.check_parameters()?;
        Ok(e)
    }

    pub fn self_kerr(chi: f64, mode: ModeIndex) -> Self {
        CircuitElement::SelfKerr { chi, mode }
    }

    pub fn modes(&self) -> Vec<ModeIndex> {
        match *self {
            CircuitElement::BeamSplitter { a, b, .. }
            | CircuitElement::CrossKerr { a, b, .. }
            | CircuitElement::KPhotonExchange { a, b, .. } => vec![a, b],
            CircuitElement::PhaseShift { mode, .. } | CircuitElement::SelfKerr { mode, .. } => vec![mode],
        }
    }

    fn check_parameters(&self) -> Result<()> {
        match *self {
            CircuitElement::BeamSplitter {
                transmission,
                reflection,
                a,
                b,
            } => {
                check_finite("transmission", transmission)?;
                check_finite("reflection", reflection)?;
                let norm = transmission * transmission + reflection * reflection;
                if (norm - 1.0).abs() > 1e-12 {
                    return Err(Error::param(
                        "transmission",
                        format!("s^2 + c^2 must equal 1, got {norm}"),
                    ));
                }
                check_pair(a, b)
            }
            CircuitElement::PhaseShift { phi, .. } => check_finite("phi", phi),
            CircuitElement::CrossKerr { chi_t, order, a, b } => {
                check_finite("chi_t", chi_t)?;
                if order < 1 {
                    return Err(Error::param("order", "dispersive order must be >= 1"));
                }
                check_pair(a, b)
            }
            CircuitElement::KPhotonExchange { g_t, k, a, b } => {
                check_finite("g_t", g_t)?;
                if k < 1 {
                    return Err(Error::param("k", "exchanged quanta must be >= 1"));
                }
                check_pair(a, b)
            }
            CircuitElement::SelfKerr { chi, .. } => check_finite("chi", chi),
        }
    }

    /// Checks parameters and that every referenced mode exists.
    pub fn validate(&self, n_modes: usize) -> Result<()> {
        self.check_parameters()?;
        for ModeIndex(m) in self.modes() {
            if m >= n_modes {
                return Err(Error::InvalidMode { mode: m, n_modes });
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Self {
        match *self {
            CircuitElement::BeamSplitter {
                transmission,
                reflection,
                a,
                b,
            } => CircuitElement::BeamSplitter {
                transmission,
                reflection: -reflection,
                a,
                b,
            },
            CircuitElement::PhaseShift { phi, mode } => CircuitElement::PhaseShift { phi: -phi, mode },
            CircuitElement::CrossKerr { chi_t, order, a, b } => CircuitElement::CrossKerr {
                chi_t: -chi_t,
                order,
                a,
                b,
            },
            CircuitElement::KPhotonExchange { g_t, k, a, b } => CircuitElement::KPhotonExchange { g_t: -g_t, k, a, b },
            CircuitElement::SelfKerr { chi, mode } => CircuitElement::SelfKerr { chi: -chi, mode },
        }
    }

    /// Exchanged quanta and the angle multiplying the exchange generator,
    /// for the non-diagonal elements.
    fn exchange_form(&self) -> Option<(usize, f64, ModeIndex, ModeIndex)> {
        match *self {
            CircuitElement::BeamSplitter {
                transmission,
                reflection,
                a,
                b,
            } => Some((1, reflection.atan2(transmission), a, b)),
            CircuitElement::KPhotonExchange { g_t, k, a, b } => Some((k as usize, -g_t, a, b)),
            _ => None,
        }
    }

    /// Phase acquired by the occupation pattern `occ` under a diagonal element.
    fn diagonal_phase(&self, occ: &[usize]) -> f64 {
        match *self {
            CircuitElement::PhaseShift { phi, mode } => phi * occ[mode.0] as f64,
            CircuitElement::CrossKerr { chi_t, order, a, b } => {
                let s = order as i32;
                -chi_t * (occ[a.0] as f64).powi(s) * (occ[b.0] as f64).powi(s)
            }
            CircuitElement::SelfKerr { chi, mode } => {
                let n = occ[mode.0] as f64;
                0.5 * chi * n * n
            }
            _ => 0.0,
        }
    }

    /// Applies the element in place to each pure vector over `dims`.
    pub(crate) fn apply_pure(&self, dims: &[FockCutoff], vectors: &mut [Vec<Complex64>]) -> Result<()> {
        self.validate(dims.len())?;
        let dims: Vec<usize> = dims.iter().map(|d| d.dim()).collect();
        let total: usize = dims.iter().product();
        let strides = strides(&dims);

        let norms_before: Vec<f64> = vectors.iter().map(|v| norm_sqr(v)).collect();

        match self.exchange_form() {
            None => {
                let mut occ = vec![0; dims.len()];
                let phases: Vec<Complex64> = (0..total)
                    .map(|x| {
                        decode(x, &dims, &strides, &mut occ);
                        Complex64::from_polar(1.0, self.diagonal_phase(&occ))
                    })
                    .collect();
                vectors.par_iter_mut().for_each(|v| {
                    for (amp, ph) in v.iter_mut().zip(&phases) {
                        *amp *= ph;
                    }
                });
            }
            Some((k, angle, ModeIndex(ma), ModeIndex(mb))) => {
                let (da, db) = (dims[ma], dims[mb]);
                let (sa, sb) = (strides[ma], strides[mb]);
                let sectors: Vec<PairSector> = pair_sectors(da, db).filter(|s| s.len > k).collect();
                let bases: Vec<usize> = (0..total)
                    .filter(|&x| (x / sa) % da == 0 && (x / sb) % db == 0)
                    .collect();
                let gather = |v: &[Complex64], base: usize, s: &PairSector, buf: &mut Vec<Complex64>| {
                    buf.clear();
                    buf.extend((0..s.len).map(|l| {
                        let (m, n) = s.occupations(l);
                        v[base + m * sa + n * sb]
                    }));
                };
                let zero = Complex64::new(0.0, 0.0);
                let occupied: Vec<bool> = sectors
                    .par_iter()
                    .map(|s| {
                        let mut buf = Vec::new();
                        vectors.iter().any(|v| {
                            bases.iter().any(|&base| {
                                gather(v, base, s, &mut buf);
                                buf.iter().any(|c| *c != zero)
                            })
                        })
                    })
                    .collect();
                let props: Vec<Option<SectorPropagator>> = sectors
                    .par_iter()
                    .zip(&occupied)
                    .map(|(s, &used)| used.then(|| SectorPropagator::exchange(s, k)).transpose())
                    .collect::<Result<_>>()?;
                vectors.par_iter_mut().for_each(|v| {
                    let mut buf = Vec::new();
                    for &base in &bases {
                        for (s, prop) in sectors.iter().zip(&props) {
                            let Some(prop) = prop else { continue };
                            gather(v, base, s, &mut buf);
                            if buf.iter().all(|c| *c == zero) {
                                continue;
                            }
                            let out = prop.evolve(angle, &buf);
                            for (l, amp) in out.into_iter().enumerate() {
                                let (m, n) = s.occupations(l);
                                v[base + m * sa + n * sb] = amp;
                            }
                        }
                    }
                });
            }
        }

        for (v, before) in vectors.iter().zip(norms_before) {
            let deviation = (norm_sqr(v) - before).abs();
            if !(deviation <= UNITARITY_TOLERANCE) {
                return Err(Error::NonUnitary { deviation });
            }
        }
        Ok(())
    }

    /// Dense matrix of the element on the truncated space `dims`.
    pub fn unitary(&self, dims: &[FockCutoff]) -> Result<DMatrix<Complex64>> {
        let total: usize = dims.iter().map(|d| d.dim()).product();
        if total > MAX_DENSE_UNITARY_DIM {
            return Err(Error::DimensionOverflow {
                dim: total,
                limit: MAX_DENSE_UNITARY_DIM,
            });
        }
        let mut columns: Vec<Vec<Complex64>> = (0..total)
            .map(|c| {
                let mut e = vec![Complex64::new(0.0, 0.0); total];
                e[c] = Complex64::new(1.0, 0.0);
                e
            })
            .collect();
        self.apply_pure(dims, &mut columns)?;
        Ok(DMatrix::from_fn(total, total, |r, c| columns[c][r]))
    }
}

/// Ordered sequence of elements, applied first to last.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    elements: Vec<CircuitElement>,
}

impl Circuit {
    pub fn new(elements: Vec<CircuitElement>) -> Self {
        Circuit { elements }
    }

    pub fn push(&mut self, element: CircuitElement) -> &mut Self {
        self.elements.push(element);
        self
    }

    pub fn elements(&self) -> &[CircuitElement] {
        &self.elements
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn validate(&self, n_modes: usize) -> Result<()> {
        self.elements.iter().try_for_each(|e| e.validate(n_modes))
    }

    /// Undoes `self`: inverted elements in reverse order.
    pub fn inverse(&self) -> Self {
        Circuit {
            elements: self.elements.iter().rev().map(CircuitElement::inverse).collect(),
        }
    }
}

impl FromIterator<CircuitElement> for Circuit {
    fn from_iter<I: IntoIterator<Item = CircuitElement>>(iter: I) -> Self {
        Circuit::new(iter.into_iter().collect())
    }
}

pub(crate) fn strides(dims: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    strides
}

pub(crate) fn decode(x: usize, dims: &[usize], strides: &[usize], occ: &mut [usize]) {
    for i in 0..dims.len() {
        occ[i] = (x / strides[i]) % dims[i];
    }
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum()
}
