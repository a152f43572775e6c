//! Subcommand drivers.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde_json::{json, Value};

use nlheat::engine::{self, EngineParams};
use nlheat::fock::{choose_cutoff, choose_cutoff_coherent, FockCutoff, ModeIndex, MultiModeState};
use nlheat::metrology::{self, InputFamily, Nonlinearity};
use nlheat::sensor::{self, BlackBoxProcess, EfficiencyTrace, ProcessKind};
use nlheat::{thermo, Complex64};

use crate::config::*;
use crate::error::CliError;
use crate::output::{render_dataset, render_json, write_atomic, Dataset};
use crate::Common;

/// Resolved common options of a run.
struct Run {
    settings: Settings,
    format: Format,
    output: PathBuf,
}

impl Run {
    fn start(command: &'static str, common: Common, keys: &[&'static str], default_format: &str) -> Result<Self, CliError> {
        let mut settings = Settings::new(command, common.config.as_deref(), keys)?;
        let format = settings.get("format", common.format, default_format, parse_format)?;
        if let Some(n) = settings.optional("threads", common.threads, parse_count)? {
            // The global pool can only be built once per process; a second
            // call just keeps the first configuration.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
        let output = settings
            .optional("output", common.output, |s| Ok(PathBuf::from(s)))?
            .unwrap_or_else(|| PathBuf::from(format!("{command}.{}", format.extension())));
        Ok(Run {
            settings,
            format,
            output,
        })
    }

    fn finish_dataset(&self, data: &Dataset) -> Result<(), CliError> {
        write_atomic(&self.output, &render_dataset(data, &self.settings, self.format)?)
    }
}

fn linspace(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (points - 1) as f64;
    (0..points).map(|i| if i + 1 == points { hi } else { lo + step * i as f64 }).collect()
}

fn check_range(lo_key: &str, lo: f64, hi_key: &str, hi: f64) -> Result<(), CliError> {
    if hi < lo {
        return Err(CliError::Config(format!("key '{hi_key}' ({hi}) is below '{lo_key}' ({lo})")));
    }
    Ok(())
}

fn parse_process(s: &str) -> Result<ProcessKind, String> {
    s.trim().parse::<ProcessKind>().map_err(|e| e.to_string())
}

fn parse_processes(s: &str) -> Result<Vec<ProcessKind>, String> {
    s.split(',').map(parse_process).collect()
}

fn parse_family(s: &str) -> Result<InputFamily, String> {
    s.trim().parse::<InputFamily>().map_err(|e| e.to_string())
}

fn parse_nonlinearity(s: &str) -> Result<Nonlinearity, String> {
    s.trim().parse::<Nonlinearity>().map_err(|e| e.to_string())
}

fn num(x: f64) -> Value {
    json!(x)
}

#[derive(Args)]
pub struct Fig3Args {
    #[command(flatten)]
    common: Common,
    /// Mean photon number of each hot input mode [1]
    #[arg(long)]
    nbar: Option<String>,
    /// Tap fraction s^2 of the sampling beam splitters [0.1]
    #[arg(long)]
    s2: Option<String>,
    #[arg(long)]
    chi_min: Option<String>,
    #[arg(long)]
    chi_max: Option<String>,
    /// Grid points [201]
    #[arg(long)]
    points: Option<String>,
    /// Monte-Carlo samples per point; closed form when absent
    #[arg(long)]
    samples: Option<String>,
    /// Required with --samples
    #[arg(long)]
    seed: Option<String>,
}

pub fn fig3(a: Fig3Args) -> Result<String, CliError> {
    let mut run = Run::start(
        "fig3",
        a.common,
        &["nbar", "s2", "chi-min", "chi-max", "points", "samples", "seed"],
        "csv",
    )?;
    let cfg = &mut run.settings;
    let nbar = cfg.get("nbar", a.nbar, "1", parse_positive)?;
    let s2 = cfg.get("s2", a.s2, "0.1", parse_f64)?;
    let chi_min = cfg.get("chi-min", a.chi_min, "0", parse_angle)?;
    let chi_max = cfg.get("chi-max", a.chi_max, "20", parse_angle)?;
    let points = cfg.get("points", a.points, "201", parse_count)?;
    let samples = cfg.optional("samples", a.samples, parse_count)?;
    let seed = match samples {
        Some(_) => Some(cfg.required("seed", a.seed, "Monte-Carlo runs are seeded", parse_seed)?),
        None => cfg.optional("seed", a.seed, parse_seed)?,
    };
    check_range("chi-min", chi_min, "chi-max", chi_max)?;

    let params = EngineParams::from_transmissivity(nbar, s2, chi_min, 1)?;
    let grid = linspace(chi_min, chi_max, points);
    let curve = match (samples, seed) {
        (Some(n), Some(seed)) => engine::amplification_curve_mc(&params, &grid, n, seed)?,
        _ => engine::amplification_curve(&params, &grid)?,
    };

    let mut data = Dataset::new(vec!["chi", "ratio_1f", "ratio_4f", "stderr_1f", "stderr_4f"]);
    for p in &curve {
        data.push(vec![num(p.chi), num(p.ratio_1f), num(p.ratio_4f), num(p.stderr_1f), num(p.stderr_4f)]);
    }
    run.finish_dataset(&data)?;
    let peak = curve.iter().max_by(|x, y| x.ratio_1f.total_cmp(&y.ratio_1f)).expect("non-empty grid");
    Ok(format!(
        "fig3: peak ratio_1f {:.6} at chi {:.6} ({} points) -> {}",
        peak.ratio_1f,
        peak.chi,
        curve.len(),
        run.output.display()
    ))
}

#[derive(Args)]
pub struct CascadeArgs {
    #[command(flatten)]
    common: Common,
    /// Mean photon number of each hot input mode [1]
    #[arg(long)]
    nbar: Option<String>,
    /// Tap fraction s^2 of the sampling beam splitters [0.1]
    #[arg(long)]
    s2: Option<String>,
    /// Kerr coupling, or `optimal` [optimal]
    #[arg(long)]
    chi: Option<String>,
    /// Number of chained blocks [5]
    #[arg(long)]
    blocks: Option<String>,
    /// Monte-Carlo samples [100000]
    #[arg(long)]
    samples: Option<String>,
    /// Required
    #[arg(long)]
    seed: Option<String>,
}

fn parse_chi_or_optimal(s: &str) -> Result<Option<f64>, String> {
    match s.trim() {
        "optimal" => Ok(None),
        other => parse_angle(other).map(Some),
    }
}

pub fn cascade(a: CascadeArgs) -> Result<String, CliError> {
    let mut run = Run::start("cascade", a.common, &["nbar", "s2", "chi", "blocks", "samples", "seed"], "csv")?;
    let cfg = &mut run.settings;
    let nbar = cfg.get("nbar", a.nbar, "1", parse_positive)?;
    let s2 = cfg.get("s2", a.s2, "0.1", parse_f64)?;
    let chi = cfg.get("chi", a.chi, "optimal", parse_chi_or_optimal)?;
    let blocks = cfg.get("blocks", a.blocks, "5", parse_count)?;
    let samples = cfg.get("samples", a.samples, "100000", parse_count)?;
    let seed = cfg.required("seed", a.seed, "Monte-Carlo runs are seeded", parse_seed)?;

    let probe = EngineParams::from_transmissivity(nbar, s2, 0.0, blocks)?;
    let chi = match chi {
        Some(chi) => chi,
        None => probe.optimal_chi(),
    };
    let params = EngineParams::from_transmissivity(nbar, s2, chi, blocks)?;
    let stages = engine::cascade(&params, samples, seed)?;

    let mut data = Dataset::new(vec!["stage", "intensity_1f", "intensity_4f", "stderr_1f", "ergotropy_1f"]);
    for (i, s) in stages.iter().enumerate() {
        data.push(vec![
            json!(i + 1),
            num(s.mean_intensity_1f),
            num(s.mean_intensity_4f),
            num(s.stderr_1f),
            s.ergotropy_1f.map_or(Value::Null, num),
        ]);
    }
    run.finish_dataset(&data)?;
    let last = stages.last().expect("at least one block");
    Ok(format!(
        "cascade: {} blocks at chi {:.6}, final intensity_1f {:.6}, ergotropy_1f {} -> {}",
        stages.len(),
        chi,
        last.mean_intensity_1f,
        last.ergotropy_1f.map_or("n/a".to_string(), |w| format!("{w:.3e}")),
        run.output.display()
    ))
}

#[derive(Args)]
pub struct Fig6Args {
    #[command(flatten)]
    common: Common,
    /// thermal, coherent or number [thermal]
    #[arg(long)]
    kind: Option<String>,
    /// cross_kerr or self_kerr [cross_kerr]
    #[arg(long)]
    nonlinearity: Option<String>,
    /// Kerr phase [pi/2]
    #[arg(long)]
    chi: Option<String>,
    #[arg(long)]
    nbar_min: Option<String>,
    #[arg(long)]
    nbar_max: Option<String>,
    #[arg(long)]
    nbar_step: Option<String>,
    /// Fock-space tail tolerance [1e-10]
    #[arg(long)]
    epsilon: Option<String>,
}

pub fn fig6(a: Fig6Args) -> Result<String, CliError> {
    let mut run = Run::start(
        "fig6",
        a.common,
        &["kind", "nonlinearity", "chi", "nbar-min", "nbar-max", "nbar-step", "epsilon"],
        "csv",
    )?;
    let cfg = &mut run.settings;
    let family = cfg.get("kind", a.kind, "thermal", parse_family)?;
    let nonlinearity = cfg.get("nonlinearity", a.nonlinearity, "cross_kerr", parse_nonlinearity)?;
    let chi = cfg.get("chi", a.chi, "pi/2", parse_angle)?;
    let lo = cfg.get("nbar-min", a.nbar_min, "1", parse_positive)?;
    let hi = cfg.get("nbar-max", a.nbar_max, "8", parse_positive)?;
    let step = cfg.get("nbar-step", a.nbar_step, "1", parse_positive)?;
    let epsilon = cfg.get("epsilon", a.epsilon, "1e-10", parse_tail_epsilon)?;
    check_range("nbar-min", lo, "nbar-max", hi)?;

    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..count).map(|i| lo + step * i as f64).collect();
    let curve = metrology::phase_error_curve(family, nonlinearity, &grid, chi, epsilon)?;

    let mut data = Dataset::new(vec!["nbar", "dphi_min", "dphi_sql", "dphi_hl", "fisher_information", "kind", "chi"]);
    for p in &curve {
        data.push(vec![
            num(p.nbar),
            num(p.dphi_min),
            num(p.dphi_sql),
            num(p.dphi_hl),
            num(p.fisher_information),
            json!(family.to_string()),
            num(chi),
        ]);
    }
    run.finish_dataset(&data)?;
    let below_hl = curve.iter().filter(|p| p.dphi_min < p.dphi_hl).count();
    let last = curve.last().expect("non-empty grid");
    Ok(format!(
        "fig6: {family} {nonlinearity}, dphi_min {:.6} at nbar {}, {below_hl}/{} points below the Heisenberg limit -> {}",
        last.dphi_min,
        last.nbar,
        curve.len(),
        run.output.display()
    ))
}

#[derive(Args)]
pub struct Fig8aArgs {
    #[command(flatten)]
    common: Common,
    /// ck, cross_kerr_s<order>, k<k> or exchange_k<k> [ck]
    #[arg(long)]
    process: Option<String>,
    /// Mean photon number of the thermal input [1]
    #[arg(long)]
    nbar_a: Option<String>,
    /// chi or g per unit time [1]
    #[arg(long)]
    coupling: Option<String>,
    /// End of the time grid [2pi]
    #[arg(long)]
    t_max: Option<String>,
    /// Grid points [201]
    #[arg(long)]
    points: Option<String>,
    /// Fock-space tail tolerance [1e-10]
    #[arg(long)]
    epsilon: Option<String>,
}

fn parse_time(s: &str) -> Result<f64, String> {
    match s.trim() {
        "2pi" => Ok(2.0 * PI),
        other => parse_angle(other),
    }
}

pub fn fig8a(a: Fig8aArgs) -> Result<String, CliError> {
    let mut run = Run::start(
        "fig8a",
        a.common,
        &["process", "nbar-a", "coupling", "t-max", "points", "epsilon"],
        "csv",
    )?;
    let cfg = &mut run.settings;
    let kind = cfg.get("process", a.process, "ck", parse_process)?;
    let nbar_a = cfg.get("nbar-a", a.nbar_a, "1", parse_positive)?;
    let coupling = cfg.get("coupling", a.coupling, "1", parse_nonneg)?;
    let t_max = cfg.get("t-max", a.t_max, "2pi", parse_time)?;
    let points = cfg.get("points", a.points, "201", parse_count)?;
    let epsilon = cfg.get("epsilon", a.epsilon, "1e-10", parse_tail_epsilon)?;
    check_range("t-min", 0.0, "t-max", t_max)?;

    let process = BlackBoxProcess::new(kind, coupling)?;
    let cutoff = choose_cutoff(nbar_a, epsilon)?;
    let trace = sensor::wc_trace(&process, nbar_a, &linspace(0.0, t_max, points), cutoff)?;

    let mut data = Dataset::new(vec!["t", "eta", "wc", "mean_na_out"]);
    for i in 0..trace.times.len() {
        data.push(vec![num(trace.times[i]), num(trace.eta[i]), num(trace.wc[i]), num(trace.mean_na_out[i])]);
    }
    run.finish_dataset(&data)?;
    let (i_max, eta_max) = trace
        .eta
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty grid");
    Ok(format!(
        "fig8a: {kind} nbar_a {nbar_a}, grid eta_max {eta_max:.6} at t {:.6} -> {}",
        trace.times[i_max],
        run.output.display()
    ))
}

#[derive(Args)]
pub struct Fig8bArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated processes [ck,k2,k3]
    #[arg(long)]
    processes: Option<String>,
    /// Comma-separated input intensities [1,2,4,8]
    #[arg(long)]
    nbar: Option<String>,
    /// chi or g per unit time [1]
    #[arg(long)]
    coupling: Option<String>,
    /// End of the time window searched [2pi]
    #[arg(long)]
    t_max: Option<String>,
    /// Coarse grid points before refinement [401]
    #[arg(long)]
    points: Option<String>,
    /// Fock-space tail tolerance [1e-10]
    #[arg(long)]
    epsilon: Option<String>,
}

pub fn fig8b(a: Fig8bArgs) -> Result<String, CliError> {
    let mut run = Run::start(
        "fig8b",
        a.common,
        &["processes", "nbar", "coupling", "t-max", "points", "epsilon"],
        "csv",
    )?;
    let cfg = &mut run.settings;
    let kinds = cfg.get("processes", a.processes, "ck,k2,k3", parse_processes)?;
    let mut nbars = cfg.get("nbar", a.nbar, "1,2,4,8", |s| {
        let v: Vec<f64> = parse_list(s)?;
        match v.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            Some(bad) => Err(format!("{bad} is not > 0")),
            None => Ok(v),
        }
    })?;
    let coupling = cfg.get("coupling", a.coupling, "1", parse_positive)?;
    let t_max = cfg.get("t-max", a.t_max, "2pi", parse_time)?;
    let points = cfg.get("points", a.points, "401", parse_count)?;
    let epsilon = cfg.get("epsilon", a.epsilon, "1e-10", parse_tail_epsilon)?;
    check_range("t-min", 0.0, "t-max", t_max)?;
    nbars.sort_by(f64::total_cmp);
    nbars.dedup();

    let grid = linspace(0.0, t_max, points);
    let mut data = Dataset::new(vec!["nbar_a", "eta_max", "process", "t_at_max"]);
    let mut best = (f64::NEG_INFINITY, String::new(), 0.0);
    for kind in &kinds {
        let process = BlackBoxProcess::new(*kind, coupling)?;
        for &nbar_a in &nbars {
            let cutoff = choose_cutoff(nbar_a, epsilon)?;
            let (eta_max, t) = sensor::max_efficiency(&process, nbar_a, &grid, cutoff)?;
            if eta_max > best.0 {
                best = (eta_max, kind.to_string(), nbar_a);
            }
            data.push(vec![num(nbar_a), num(eta_max), json!(kind.to_string()), num(t)]);
        }
    }
    run.finish_dataset(&data)?;
    Ok(format!(
        "fig8b: {} processes x {} intensities, largest eta_max {:.6} ({} at nbar_a {}) -> {}",
        kinds.len(),
        nbars.len(),
        best.0,
        best.1,
        best.2,
        run.output.display()
    ))
}

#[derive(Args)]
pub struct IdentifyArgs {
    #[command(flatten)]
    common: Common,
    /// CSV with columns t and eta, as written by fig8a
    #[arg(long)]
    trace: Option<String>,
    /// Thermal input intensity; read from the trace's config line when absent
    #[arg(long)]
    nbar_a: Option<String>,
    /// Comma-separated candidate processes [ck,k2,k3]
    #[arg(long)]
    candidates: Option<String>,
    /// Fock-space tail tolerance [1e-10]
    #[arg(long)]
    epsilon: Option<String>,
}

struct TraceFile {
    times: Vec<f64>,
    eta: Vec<f64>,
    nbar_a: Option<f64>,
}

fn read_trace(path: &Path) -> Result<TraceFile, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read trace {}: {e}", path.display())))?;
    let bad = |msg: String| CliError::Config(format!("trace {}: {msg}", path.display()));
    let nbar_a = text
        .lines()
        .filter_map(|l| l.strip_prefix("# config:"))
        .flat_map(|l| l.split_whitespace())
        .find_map(|kv| kv.strip_prefix("nbar-a="))
        .map(|v| parse_positive(v).map_err(|e| bad(format!("nbar-a in config line: {e}"))))
        .transpose()?;

    let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| bad(format!("missing column '{name}'")))
    };
    let (ti, ei) = (column("t")?, column("eta")?);
    let mut times = Vec::new();
    let mut eta = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| {
            record
                .get(i)
                .ok_or_else(|| bad(format!("row {}: too few fields", row + 1)))
                .and_then(|s| parse_f64(s).map_err(|e| bad(format!("row {}: {e}", row + 1))))
        };
        times.push(field(ti)?);
        eta.push(field(ei)?);
    }
    Ok(TraceFile { times, eta, nbar_a })
}

pub fn identify(a: IdentifyArgs) -> Result<String, CliError> {
    let mut run = Run::start("identify", a.common, &["trace", "nbar-a", "candidates", "epsilon"], "json")?;
    let cfg = &mut run.settings;
    let trace_path = cfg.required("trace", a.trace, "path of the efficiency trace", |s| Ok(PathBuf::from(s)))?;
    let flagged_nbar = cfg.optional("nbar-a", a.nbar_a, parse_positive)?;
    let candidates = cfg.get("candidates", a.candidates, "ck,k2,k3", parse_processes)?;
    let epsilon = cfg.get("epsilon", a.epsilon, "1e-10", parse_tail_epsilon)?;

    let file = read_trace(&trace_path)?;
    let nbar_a = flagged_nbar.or(file.nbar_a).ok_or_else(|| {
        CliError::Config("missing required key 'nbar-a' (not given and not found in the trace's config line)".into())
    })?;
    let cutoff = choose_cutoff(nbar_a, epsilon)?;
    let trace = EfficiencyTrace {
        process: None,
        nbar_a,
        wc: file.eta.iter().map(|e| e * nbar_a).collect(),
        mean_na_out: Vec::new(),
        times: file.times,
        eta: file.eta,
    };
    let id = sensor::identify_process(&trace, &candidates, cutoff)?;

    let bytes = match run.format {
        Format::Json => {
            let label = |k: Option<ProcessKind>| k.map_or(Value::Null, |k| json!(k.to_string()));
            let residuals: Vec<Value> = id
                .residuals
                .iter()
                .map(|f| json!({"kind": f.kind.to_string(), "coupling": f.coupling, "residual": f.residual}))
                .collect();
            let body = json!({
                "kind": label(id.kind),
                "coupling": id.coupling,
                "residual": id.residual,
                "confidence": id.confidence,
                "ambiguous": id.ambiguous,
                "nbar_a": nbar_a,
                "residuals": residuals,
            });
            render_json(body, &run.settings)
        }
        Format::Csv => {
            let mut data = Dataset::new(vec!["kind", "coupling", "residual"]);
            for fit in &id.residuals {
                data.push(vec![json!(fit.kind.to_string()), num(fit.coupling), num(fit.residual)]);
            }
            render_dataset(&data, &run.settings, Format::Csv)?
        }
    };
    write_atomic(&run.output, &bytes)?;
    let verdict = match (id.kind, id.coupling) {
        (Some(kind), Some(c)) => format!("{kind} with coupling {c:.6}"),
        _ => "ambiguous".to_string(),
    };
    Ok(format!(
        "identify: {verdict} (residual {:.3e}, confidence {:.3e}) -> {}",
        id.residual,
        id.confidence,
        run.output.display()
    ))
}

#[derive(Args)]
pub struct ErgotropyArgs {
    #[command(flatten)]
    common: Common,
    /// State file in the library's JSON format; overrides --kind/--nbar
    #[arg(long)]
    state: Option<String>,
    /// Mode of the state file to analyse [0]
    #[arg(long)]
    mode: Option<String>,
    /// thermal, coherent or number [thermal]
    #[arg(long)]
    kind: Option<String>,
    /// Mean photon number [1]
    #[arg(long)]
    nbar: Option<String>,
    /// Fock-space tail tolerance [1e-10]
    #[arg(long)]
    epsilon: Option<String>,
}

fn reference_state(family: InputFamily, nbar: f64, epsilon: f64) -> Result<MultiModeState, CliError> {
    Ok(match family {
        InputFamily::Thermal => MultiModeState::thermal(nbar, choose_cutoff(nbar, epsilon)?)?,
        InputFamily::Coherent => MultiModeState::coherent_with_tolerance(
            Complex64::new(nbar.sqrt(), 0.0),
            choose_cutoff_coherent(nbar, epsilon)?,
            epsilon,
        )?,
        InputFamily::Number => {
            if nbar.fract() != 0.0 {
                return Err(CliError::Config(format!("key 'nbar' must be an integer for number states, got {nbar}")));
            }
            let n = nbar as usize;
            MultiModeState::number(n, FockCutoff::new(n + 1)?)?
        }
    })
}

pub fn ergotropy(a: ErgotropyArgs) -> Result<String, CliError> {
    let mut run = Run::start("ergotropy", a.common, &["state", "mode", "kind", "nbar", "epsilon"], "json")?;
    let cfg = &mut run.settings;
    let state_path = cfg.optional("state", a.state, |s| Ok(PathBuf::from(s)))?;
    let (state, mode) = match state_path {
        Some(path) => {
            let mode = cfg.get("mode", a.mode, "0", |s| s.trim().parse::<usize>().map_err(|e| e.to_string()))?;
            let text = fs::read_to_string(&path)
                .map_err(|e| CliError::Config(format!("cannot read state {}: {e}", path.display())))?;
            (MultiModeState::from_json(&text)?, mode)
        }
        None => {
            let family = cfg.get("kind", a.kind, "thermal", parse_family)?;
            let nbar = cfg.get("nbar", a.nbar, "1", parse_nonneg)?;
            let epsilon = cfg.get("epsilon", a.epsilon, "1e-10", parse_tail_epsilon)?;
            (reference_state(family, nbar, epsilon)?, 0)
        }
    };
    if mode >= state.n_modes() {
        return Err(CliError::Config(format!("key 'mode' ({mode}) exceeds the state's {} modes", state.n_modes())));
    }
    let rho = state.reduced_density(ModeIndex(mode))?;
    let report = thermo::ergotropy(&rho)?;

    let bytes = match run.format {
        Format::Json => render_json(serde_json::to_value(&report).expect("report serializes"), &run.settings),
        Format::Csv => {
            let mut data = Dataset::new(vec!["n", "photon_pmf", "passive_pmf"]);
            for (n, (p, q)) in report.photon_pmf.iter().zip(&report.passive_pmf).enumerate() {
                data.push(vec![json!(n), num(*p), num(*q)]);
            }
            render_dataset(&data, &run.settings, Format::Csv)?
        }
    };
    write_atomic(&run.output, &bytes)?;
    Ok(format!(
        "ergotropy: W {:.6e}, mean energy {:.6}, entropy {:.6} -> {}",
        report.ergotropy,
        report.mean_energy,
        report.entropy,
        run.output.display()
    ))
}
