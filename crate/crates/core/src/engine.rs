//! Semiclassical model of the four-mode nonlinear coherent heat engine.
//!
//! Modes 1 and 4 are hot, 2 and 3 cold. Thermal light is treated as a
//! mixture of coherent states, so a block acts on four complex amplitudes.
//! Array slot `i` holds mode `i + 1`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fock::{choose_cutoff_coherent, coherent_amplitudes};
use crate::thermo::{self, ErgotropyReport};
use crate::{Error, Result};

/// Samples per RNG stream; each chunk owns the stream numbered by its index.
pub const CHUNK_SAMPLES: usize = 4096;
/// Tail tolerance of the cutoff used for ensemble reconstructions.
pub const RECONSTRUCTION_EPSILON: f64 = 1e-8;
const MAX_RECONSTRUCTION_DIM: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    /// Mean photon number of each hot input.
    pub nbar: f64,
    /// Sampling beam-splitter amplitude towards the copies.
    pub s: f64,
    /// Sampling beam-splitter amplitude kept in the main modes.
    pub c: f64,
    /// Kerr phase per unit intensity.
    pub chi: f64,
    pub n_blocks: usize,
}

impl EngineParams {
    pub fn new(nbar: f64, s: f64, c: f64, chi: f64, n_blocks: usize) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::param("nbar", format!("must be finite and >= 0, got {nbar}")));
        }
        if !(s.is_finite() && c.is_finite()) || (s * s + c * c - 1.0).abs() > 1e-12 {
            return Err(Error::param("s", format!("s^2 + c^2 must equal 1, got {}", s * s + c * c)));
        }
        if !chi.is_finite() {
            return Err(Error::param("chi", "must be finite"));
        }
        if n_blocks == 0 {
            return Err(Error::param("n_blocks", "need at least one block"));
        }
        Ok(EngineParams {
            nbar,
            s,
            c,
            chi,
            n_blocks,
        })
    }

    /// Parameters from the sampling transmissivity `s2 = s^2`.
    pub fn from_transmissivity(nbar: f64, s2: f64, chi: f64, n_blocks: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&s2) {
            return Err(Error::param("s2", format!("transmissivity must lie in [0, 1], got {s2}")));
        }
        Self::new(nbar, s2.sqrt(), (1.0 - s2).sqrt(), chi, n_blocks)
    }

    /// `x = s^2 chi nbar`, the dimensionless Kerr strength.
    pub fn kerr_strength(&self) -> f64 {
        self.s * self.s * self.chi * self.nbar
    }

    /// Kerr phase that maximizes the mode-1 output.
    pub fn optimal_chi(&self) -> f64 {
        1.0 / (3f64.sqrt() * self.s * self.s * self.nbar)
    }

    fn with_chi(&self, chi: f64) -> Self {
        EngineParams { chi, ..*self }
    }
}

/// Complex amplitudes of modes 1 to 4 at one cut through the circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeFrame(pub [Complex64; 4]);

impl AmplitudeFrame {
    /// Hot inputs in modes 1 and 4, cold modes empty.
    pub fn hot(alpha1: Complex64, alpha4: Complex64) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        AmplitudeFrame([alpha1, zero, zero, alpha4])
    }

    pub fn intensities(&self) -> [f64; 4] {
        self.0.map(|a| a.norm_sqr())
    }

    pub fn total_intensity(&self) -> f64 {
        self.intensities().iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EngineOutput {
    pub mean_intensity_1f: f64,
    pub mean_intensity_2f: f64,
    pub mean_intensity_3f: f64,
    pub mean_intensity_4f: f64,
    pub stderr_1f: f64,
    pub stderr_4f: f64,
    pub n_samples: usize,
    pub ergotropy_1f: Option<f64>,
}

fn i_unit() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

/// `(a, b) -> (t a + i r b, i r a + t b)`.
fn coupler(a: Complex64, b: Complex64, t: f64, r: f64) -> (Complex64, Complex64) {
    let i = i_unit();
    (a * t + i * r * b, i * r * a + b * t)
}

/// One engine block acting on classical amplitudes.
///
/// BS1 and BS2 tap weak copies of the hot modes into modes 2 and 3, the copy
/// in mode 3 gets a fixed `-pi/2` plate, a balanced sampler mixes the copies,
/// each mixed copy couples to its hot mode through a cross-Kerr phase, and a
/// balanced steering splitter recombines modes 1 and 4.
pub fn propagate_block(frame: AmplitudeFrame, params: &EngineParams) -> AmplitudeFrame {
    let [a1, a2, a3, a4] = frame.0;
    let (s, c) = (params.s, params.c);
    let h = std::f64::consts::FRAC_1_SQRT_2;

    let (m1, copy2) = coupler(a1, a2, c, s);
    let (m4, copy3) = coupler(a4, a3, c, s);
    let copy3 = copy3 * -i_unit();
    let (u, v) = coupler(copy2, copy3, h, h);

    let chi = params.chi;
    let kerr = |x: f64| Complex64::from_polar(1.0, chi * x);
    let (k1, ku, k4, kv) = (m1.norm_sqr(), u.norm_sqr(), m4.norm_sqr(), v.norm_sqr());
    let m1 = m1 * kerr(ku);
    let u = u * kerr(k1);
    let m4 = m4 * kerr(kv);
    let v = v * kerr(k4);

    let (f1, f4) = coupler(m1, m4, h, h);
    AmplitudeFrame([f1, u, v, f4])
}

/// Coherent amplitude drawn from a thermal state: `|alpha|^2` exponential
/// with mean `nbar`, phase uniform.
pub fn sample_thermal_amplitude<R: Rng + ?Sized>(nbar: f64, rng: &mut R) -> Complex64 {
    if nbar == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let draw: f64 = Exp1.sample(rng);
    let intensity = nbar * draw;
    let phase = rng.random::<f64>() * std::f64::consts::TAU;
    Complex64::from_polar(intensity.sqrt(), phase)
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

fn chunk_count(n_samples: usize) -> usize {
    n_samples.div_ceil(CHUNK_SAMPLES)
}

fn chunk_len(n_samples: usize, chunk: usize) -> usize {
    CHUNK_SAMPLES.min(n_samples - chunk * CHUNK_SAMPLES)
}

/// Hot-mode input pairs of one chunk.
fn chunk_inputs(nbar: f64, seed: u64, chunk: usize, len: usize) -> Vec<AmplitudeFrame> {
    let mut rng = chunk_rng(seed, chunk);
    (0..len)
        .map(|_| {
            let a1 = sample_thermal_amplitude(nbar, &mut rng);
            let a4 = sample_thermal_amplitude(nbar, &mut rng);
            AmplitudeFrame::hot(a1, a4)
        })
        .collect()
}

#[derive(Clone, Copy, Default)]
struct Moments {
    sum: [f64; 4],
    sum_sq: [f64; 4],
}

impl Moments {
    fn add(&mut self, frame: &AmplitudeFrame) {
        for (k, x) in frame.intensities().into_iter().enumerate() {
            self.sum[k] += x;
            self.sum_sq[k] += x * x;
        }
    }

    fn merge(mut self, other: &Moments) -> Self {
        for k in 0..4 {
            self.sum[k] += other.sum[k];
            self.sum_sq[k] += other.sum_sq[k];
        }
        self
    }

    fn output(&self, n: usize, ergotropy_1f: Option<f64>) -> EngineOutput {
        let nf = n as f64;
        let mean = self.sum.map(|s| s / nf);
        let stderr = |k: usize| {
            if n < 2 {
                return 0.0;
            }
            let var = (self.sum_sq[k] - nf * mean[k] * mean[k]) / (nf - 1.0);
            (var.max(0.0) / nf).sqrt()
        };
        EngineOutput {
            mean_intensity_1f: mean[0],
            mean_intensity_2f: mean[1],
            mean_intensity_3f: mean[2],
            mean_intensity_4f: mean[3],
            stderr_1f: stderr(0),
            stderr_4f: stderr(3),
            n_samples: n,
            ergotropy_1f,
        }
    }
}

fn check_samples(n_samples: usize) -> Result<()> {
    if n_samples == 0 {
        return Err(Error::param("n_samples", "need at least one sample"));
    }
    Ok(())
}

/// Monte-Carlo average of one block's output intensities over thermal hot
/// inputs. Deterministic in `seed` regardless of thread count.
pub fn mc_engine_output(params: &EngineParams, n_samples: usize, seed: u64) -> Result<EngineOutput> {
    check_samples(n_samples)?;
    let moments: Vec<Moments> = (0..chunk_count(n_samples))
        .into_par_iter()
        .map(|chunk| {
            let mut m = Moments::default();
            for frame in chunk_inputs(params.nbar, seed, chunk, chunk_len(n_samples, chunk)) {
                m.add(&propagate_block(frame, params));
            }
            m
        })
        .collect();
    let total = moments.iter().fold(Moments::default(), |acc, m| acc.merge(m));
    Ok(total.output(n_samples, None))
}

/// Thermal averages of the hot outputs,
/// `c^2 nbar (1 +- x / (1 + x^2)^2)` with `x = s^2 chi nbar`.
pub fn analytic_engine_output(params: &EngineParams) -> (f64, f64) {
    let x = params.kerr_strength();
    let base = params.c * params.c * params.nbar;
    let gain = x / (1.0 + x * x).powi(2);
    (base * (1.0 + gain), base * (1.0 - gain))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplificationPoint {
    pub chi: f64,
    pub ratio_1f: f64,
    pub ratio_4f: f64,
    pub stderr_1f: f64,
    pub stderr_4f: f64,
}

fn check_ratio_base(params: &EngineParams) -> Result<()> {
    if params.nbar <= 0.0 {
        return Err(Error::param("nbar", "ratio to the input intensity needs nbar > 0"));
    }
    Ok(())
}

/// Output-to-input intensity ratios from the closed form.
pub fn amplification_curve(params: &EngineParams, chi_grid: &[f64]) -> Result<Vec<AmplificationPoint>> {
    check_ratio_base(params)?;
    Ok(chi_grid
        .iter()
        .map(|&chi| {
            let (n1, n4) = analytic_engine_output(&params.with_chi(chi));
            AmplificationPoint {
                chi,
                ratio_1f: n1 / params.nbar,
                ratio_4f: n4 / params.nbar,
                stderr_1f: 0.0,
                stderr_4f: 0.0,
            }
        })
        .collect())
}

/// Monte-Carlo ratios; every grid point reuses the same input samples.
pub fn amplification_curve_mc(
    params: &EngineParams,
    chi_grid: &[f64],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<AmplificationPoint>> {
    check_ratio_base(params)?;
    chi_grid
        .iter()
        .map(|&chi| {
            let out = mc_engine_output(&params.with_chi(chi), n_samples, seed)?;
            Ok(AmplificationPoint {
                chi,
                ratio_1f: out.mean_intensity_1f / params.nbar,
                ratio_4f: out.mean_intensity_4f / params.nbar,
                stderr_1f: out.stderr_1f / params.nbar,
                stderr_4f: out.stderr_4f / params.nbar,
            })
        })
        .collect()
}

/// Chain of `n_blocks` blocks. The hot outputs `1f` and `4f` of a block feed
/// modes 1 and 4 of the next one; modes 2 and 3 are refreshed to vacuum.
/// Each stage reports intensities and the ergotropy of the reconstructed
/// mode-`1f` ensemble state.
pub fn cascade(params: &EngineParams, n_samples: usize, seed: u64) -> Result<Vec<EngineOutput>> {
    check_samples(n_samples)?;
    let stages = params.n_blocks;
    let per_chunk: Vec<(Vec<Moments>, Vec<Vec<Complex64>>)> = (0..chunk_count(n_samples))
        .into_par_iter()
        .map(|chunk| {
            let mut moments = vec![Moments::default(); stages];
            let mut mode1 = vec![Vec::with_capacity(CHUNK_SAMPLES); stages];
            for input in chunk_inputs(params.nbar, seed, chunk, chunk_len(n_samples, chunk)) {
                let mut frame = input;
                for stage in 0..stages {
                    frame = propagate_block(frame, params);
                    moments[stage].add(&frame);
                    mode1[stage].push(frame.0[0]);
                    frame = AmplitudeFrame::hot(frame.0[0], frame.0[3]);
                }
            }
            (moments, mode1)
        })
        .collect();

    (0..stages)
        .map(|stage| {
            let moments = per_chunk
                .iter()
                .fold(Moments::default(), |acc, (m, _)| acc.merge(&m[stage]));
            let amplitudes: Vec<Complex64> = per_chunk.iter().flat_map(|(_, a)| a[stage].iter().copied()).collect();
            let report = ensemble_ergotropy(&amplitudes)?;
            Ok(moments.output(n_samples, Some(report.ergotropy)))
        })
        .collect()
}

/// Equal-weight mixture `(1/N) sum_i |alpha_i><alpha_i|` in a Fock basis
/// large enough for the brightest member.
pub fn ensemble_density(amplitudes: &[Complex64]) -> Result<DMatrix<Complex64>> {
    if amplitudes.is_empty() {
        return Err(Error::param("amplitudes", "ensemble is empty"));
    }
    let max_intensity = amplitudes.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
    if !max_intensity.is_finite() {
        return Err(Error::param("amplitudes", "non-finite amplitude"));
    }
    let d = choose_cutoff_coherent(max_intensity, RECONSTRUCTION_EPSILON)?.dim();
    if d > MAX_RECONSTRUCTION_DIM {
        return Err(Error::DimensionOverflow {
            dim: d,
            limit: MAX_RECONSTRUCTION_DIM,
        });
    }
    let partials: Vec<DMatrix<Complex64>> = amplitudes
        .par_chunks(CHUNK_SAMPLES)
        .map(|chunk| {
            let mut v = DMatrix::<Complex64>::zeros(d, chunk.len());
            for (col, &alpha) in chunk.iter().enumerate() {
                let mut amps = coherent_amplitudes(alpha, d);
                let norm = amps.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
                for (row, a) in amps.iter_mut().enumerate() {
                    v[(row, col)] = *a / norm;
                }
            }
            &v * v.adjoint()
        })
        .collect();
    let mut rho = partials
        .into_iter()
        .fold(DMatrix::<Complex64>::zeros(d, d), |acc, p| acc + p);
    rho /= Complex64::new(amplitudes.len() as f64, 0.0);
    let herm = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(herm)
}

/// Ergotropy of the equal-weight coherent-state ensemble.
pub fn ensemble_ergotropy(amplitudes: &[Complex64]) -> Result<ErgotropyReport> {
    thermo::ergotropy(&ensemble_density(amplitudes)?)
}
