use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use brusselator::amplitude::{
    equilibria, hysteresis_sweep, integrate_amplitude, quintic_diagram, OdeOptions,
};
use brusselator::analysis::{core_match, cosine_spectrum, envelope_1d, front_position, Envelope};
use brusselator::config::{DomainSpec, GeometryKind, IcKind, IcSpec, RunConfig, SimulationSpec, SweepSpec};
use brusselator::linstab::{
    boundary_sweep, epsilon, hopf_threshold, turing_threshold, unstable_band, Criticality, PiLength, Region,
};
use brusselator::pde::io::{field_csv, profile_csv, read_series, write_series};
use brusselator::pde::{simulate, simulate_radial, Geometry, Integrator, Scheme, Snapshot, SnapshotSeries};
use brusselator::validation::{self, CriterionReport, Suite};
use brusselator::wnl::{amplitude_model, landau_coefficient, quintic_saddle_node, stuart_landau_coeffs, AmplitudeModel, Coefficients, ModelKind};

use crate::args::*;
use crate::png;

/// Exit status 2 for usage problems, 1 for everything that fails while running.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Run(String),
}

impl From<brusselator::Error> for Failure {
    fn from(e: brusselator::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

pub struct Ctx {
    pub json: bool,
    pub quiet: bool,
    pub argv: Vec<String>,
    pub started: Instant,
}

impl Ctx {
    /// Prints `text`, or `value` as one JSON line in `--json` mode.
    fn emit(&self, text: impl FnOnce() -> String, value: impl Serialize) {
        if self.json {
            println!("{}", serde_json::to_string(&value).unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}")));
        } else if !self.quiet {
            println!("{}", text());
        }
    }

    fn warn(&self, msg: &str) {
        if !self.quiet {
            eprintln!("warning: {msg}");
        }
    }
}

/// Provenance written next to every artifact.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub config: Value,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub outputs: Vec<String>,
    pub wall_time_s: f64,
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))
}

fn manifest(ctx: &Ctx, config: Value, seed: Option<u64>, outputs: Vec<String>) -> Result<String, Failure> {
    let m = RunManifest {
        command: ctx.argv.clone(),
        config,
        seed,
        version: env!("CARGO_PKG_VERSION"),
        outputs,
        wall_time_s: ctx.started.elapsed().as_secs_f64(),
    };
    serde_json::to_string_pretty(&m).map(|t| t + "\n").map_err(|e| Failure::Run(e.to_string()))
}

/// `manifest.json` inside an output directory owned by the command.
fn write_dir_manifest(ctx: &Ctx, dir: &Path, config: Value, seed: Option<u64>, outputs: &[PathBuf]) -> Result<(), Failure> {
    let mut names: Vec<String> = outputs
        .iter()
        .map(|p| p.strip_prefix(dir).unwrap_or(p).to_string_lossy().into_owned())
        .collect();
    names.sort();
    write_file(&dir.join("manifest.json"), &manifest(ctx, config, seed, names)?)
}

/// `<file>.manifest.json` beside a single output file, so runs sharing a directory keep their own.
fn write_file_manifest(ctx: &Ctx, file: &Path, config: Value, seed: Option<u64>, extra: &[PathBuf]) -> Result<(), Failure> {
    let name = |p: &Path| p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let mut names = vec![name(file)];
    names.extend(extra.iter().map(|p| name(p)));
    let mut target = file.as_os_str().to_owned();
    target.push(".manifest.json");
    write_file(Path::new(&target), &manifest(ctx, config, seed, names)?)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn load(spec: &str) -> Result<RunConfig, Failure> {
    Ok(RunConfig::load(spec)?)
}

#[derive(Debug, Serialize)]
struct ThresholdSummary {
    b: f64,
    b_hopf: f64,
    b_turing: Option<f64>,
    kc2: Option<f64>,
    kc: Option<f64>,
    epsilon: Option<f64>,
    unstable_band: Option<(f64, f64)>,
    region: &'static str,
    landau_l: Option<f64>,
    criticality: Option<&'static str>,
}

pub fn analyze(a: &AnalyzeArgs, ctx: &Ctx) -> Outcome {
    let cfg = load(&a.params)?;
    let axes = a.sweep.clone().or_else(|| cfg.sweep.as_ref().map(|s| s.axes.clone()));
    let Some(axes) = axes else {
        let np = cfg.params;
        let th = turing_threshold(&np).ok();
        let b_hopf = hopf_threshold(&np);
        let landau = th.and_then(|_| landau_coefficient(&np).ok());
        let s = ThresholdSummary {
            b: np.b,
            b_hopf,
            b_turing: th.map(|t| t.b_turing),
            kc2: th.map(|t| t.kc2),
            kc: th.map(|t| t.kc()),
            epsilon: epsilon(&np).ok(),
            unstable_band: unstable_band(&np),
            region: Region::classify(np.b, b_hopf, th.map(|t| t.b_turing)).label(),
            landau_l: landau,
            criticality: landau.map(|l| Criticality::from_landau(l).label()),
        };
        if let Some(out) = &a.out {
            write_file(out, &(serde_json::to_string_pretty(&s).unwrap_or_default() + "\n"))?;
            write_file_manifest(ctx, out, to_value(&cfg), None, &[])?;
        }
        let opt = |v: Option<f64>| v.map_or("none".to_string(), |v| format!("{v:.6}"));
        ctx.emit(
            || {
                format!(
                    "b = {:.6}  b_hopf = {:.6}  b_turing = {}  kc2 = {}  eps = {}  region = {}  criticality = {}",
                    s.b,
                    s.b_hopf,
                    opt(s.b_turing),
                    opt(s.kc2),
                    opt(s.epsilon),
                    s.region,
                    s.criticality.unwrap_or("n/a")
                )
            },
            &s,
        );
        return Ok(0);
    };
    let kind = cfg.sweep_kind(&axes)?;
    let from_config = cfg.sweep.as_ref().filter(|s| s.axes.replace(' ', "") == axes.replace(' ', ""));
    let range = |flag: Option<(f64, f64, usize)>, pick: fn(&SweepSpec) -> (f64, f64, usize), name: &str| {
        flag.or_else(|| from_config.map(pick))
            .ok_or_else(|| Failure::Usage(format!("--{name} lo,hi,count is required for this sweep")))
    };
    let x = range(a.x, |s| s.x, "x")?;
    let y = range(a.y, |s| s.y, "y")?;
    let crit = a.criticality || from_config.is_some_and(|s| s.criticality);
    let sweep = boundary_sweep(&cfg.params, kind, &SweepSpec::axis(x), &SweepSpec::axis(y), crit)?;
    let csv = sweep.to_csv();
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for r in &sweep.rows {
        *counts.entry(r.region.label()).or_default() += 1;
    }
    match &a.out {
        Some(out) => {
            write_file(out, &csv)?;
            let mut cfg_v = to_value(&cfg);
            cfg_v["sweep_run"] = json!({ "axes": axes, "x": x, "y": y, "criticality": crit });
            write_file_manifest(ctx, out, cfg_v, None, &[])?;
            ctx.emit(
                || format!("{} points written to {}; regions {counts:?}", sweep.rows.len(), out.display()),
                json!({ "points": sweep.rows.len(), "out": out, "regions": counts }),
            );
        }
        None if !ctx.json => print!("{csv}"),
        None => ctx.emit(String::new, &sweep),
    }
    Ok(0)
}

pub fn coeffs(a: &CoeffsArgs, ctx: &Ctx) -> Outcome {
    let mut cfg = load(&a.params)?;
    if let Some(e) = a.epsilon {
        cfg = cfg.with_epsilon(e)?;
    }
    let domain = match &a.domain {
        Some(s) => DomainSpec::parse_lengths(s)?.domain(),
        None => cfg.domain.domain(),
    };
    let kind: ModelKind = a.kind.parse()?;
    let model = amplitude_model(&cfg.params, kind, domain)?;
    if let Some(out) = &a.out {
        let text = serde_json::to_string_pretty(&model).map_err(|e| Failure::Run(e.to_string()))?;
        write_file(out, &(text + "\n"))?;
        write_file_manifest(ctx, out, to_value(&cfg), None, &[])?;
    }
    ctx.emit(
        || {
            format!(
                "{:?}\nb_c = {:.6}  eps = {:.6}  modes = {:?}  amplitude scale = {:.6}",
                model.coefficients, model.b_c, model.eps, model.modes, model.amplitude_scale
            )
        },
        &model,
    );
    Ok(0)
}

fn read_model(path: &Path) -> Result<AmplitudeModel, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::Run(format!("{}: not an amplitude model: {e}", path.display())))
}

fn finish_csv(ctx: &Ctx, out: Option<&PathBuf>, csv: &str, config: Value, summary: Value) -> Outcome {
    match out {
        Some(out) => {
            write_file(out, csv)?;
            write_file_manifest(ctx, out, config, None, &[])?;
            ctx.emit(|| format!("wrote {}", out.display()), summary);
        }
        None if !ctx.json => print!("{csv}"),
        None => ctx.emit(String::new, summary),
    }
    Ok(0)
}

pub fn amplitude(a: &AmplitudeArgs, ctx: &Ctx) -> Outcome {
    let model = read_model(&a.model)?;
    let coeffs = &model.coefficients;
    let config = json!({ "model": a.model, "coefficients": coeffs, "task": format!("{:?}", a.task).to_lowercase() });
    match a.task {
        AmplitudeTask::Integrate => {
            let init = a.init.clone().unwrap_or_else(|| vec![0.01; coeffs.dimension()]);
            let tr = integrate_amplitude(coeffs, &init, a.t_end, a.record, &OdeOptions::default())?;
            let summary = json!({ "end": tr.end, "final": tr.last() });
            if tr.diverged() {
                ctx.warn("amplitude diverged; the equation has no stable finite equilibrium here");
            }
            finish_csv(ctx, a.out.as_ref(), &tr.to_csv(), config, summary)
        }
        AmplitudeTask::Equilibria => {
            let eqs = equilibria(coeffs)?;
            let mut csv = String::from("label,values,stability,residual\n");
            for e in &eqs {
                let vals: Vec<String> = e.values.iter().map(|v| format!("{v:.12e}")).collect();
                csv.push_str(&format!("{},{},{:?},{:.3e}\n", e.label, vals.join(";"), e.stability, e.residual));
            }
            finish_csv(ctx, a.out.as_ref(), &csv.to_lowercase(), config, to_value(&eqs))
        }
        AmplitudeTask::Diagram => {
            let (lo, hi, n) = match a.b_range {
                Some(r) => r,
                None => {
                    let b_s = quintic_saddle_node(&model).unwrap_or(model.b_c * 0.99);
                    (b_s - 0.5 * (model.b_c - b_s).abs(), model.b_c + 0.5 * (model.b_c - b_s).abs(), 201)
                }
            };
            let d = quintic_diagram(&model, &SweepSpec::axis((lo, hi, n)))?;
            finish_csv(ctx, a.out.as_ref(), &d.to_csv(), config, json!({ "b_c": d.b_c, "b_s": d.b_s }))
        }
        AmplitudeTask::Hysteresis => {
            let path = match &a.path {
                Some(p) => p.clone(),
                None => {
                    let b_s = quintic_saddle_node(&model)?;
                    let b_c = model.b_c;
                    vec![b_c + 0.001, 0.5 * (b_s + b_c), b_s - 0.002, b_c + 0.001]
                }
            };
            let pts = hysteresis_sweep(&model, &path, a.dwell, a.noise, a.samples)?;
            let mut csv = String::from("t,b,amplitude\n");
            for p in &pts {
                csv.push_str(&format!("{:.12e},{:.12e},{:.12e}\n", p.t, p.b, p.amplitude));
            }
            finish_csv(ctx, a.out.as_ref(), &csv, config, json!({ "path": path, "samples": pts.len() }))
        }
    }
}

fn geometry_kind(g: GeometryArg) -> GeometryKind {
    match g {
        GeometryArg::Line => GeometryKind::Line,
        GeometryArg::Rectangle => GeometryKind::Rectangle,
        GeometryArg::Radial => GeometryKind::Radial,
    }
}

/// Config and simulation settings after applying the command-line overrides.
pub fn resolve_simulation(a: &SimulateArgs) -> Result<(RunConfig, SimulationSpec), Failure> {
    let mut cfg = load(&a.params)?;
    if let Some(e) = a.epsilon {
        cfg = cfg.with_epsilon(e)?;
    }
    let base = cfg.simulation.clone();
    let mut spec = match (a.geometry.map(geometry_kind), base) {
        (Some(g), Some(b)) if g != b.geometry => SimulationSpec {
            t_end: b.t_end,
            snap_every: b.snap_every,
            seed: b.seed,
            scheme: b.scheme,
            integrator: b.integrator,
            steady_tol: b.steady_tol,
            ..SimulationSpec::defaults(g)
        },
        (_, Some(b)) => b,
        (g, None) => SimulationSpec::defaults(g.unwrap_or(GeometryKind::Line)),
    };
    if let Some(d) = &a.domain {
        cfg.domain = if spec.geometry == GeometryKind::Radial {
            let r: PiLength = d.parse()?;
            DomainSpec { r_max: Some(r), ..cfg.domain }
        } else {
            DomainSpec::parse_lengths(d)?
        };
    }
    if let Some(n) = &a.n {
        spec.n = n.clone();
    }
    if let Some(ic) = a.ic {
        spec.ic = IcSpec::new(match ic {
            IcArg::Steady => IcKind::Steady,
            IcArg::Random => IcKind::Random,
            IcArg::Pulse => IcKind::Pulse,
            IcArg::Bump => IcKind::Bump,
        });
    }
    spec.ic.amp = a.amp.or(spec.ic.amp);
    spec.ic.width = a.width.or(spec.ic.width);
    spec.seed = a.seed.unwrap_or(spec.seed);
    spec.t_end = a.tend.unwrap_or(spec.t_end);
    spec.snap_every = a.snap_every.unwrap_or(spec.snap_every);
    if let Some(s) = a.scheme {
        spec.scheme = match s {
            SchemeArg::Spectral => Scheme::Spectral,
            SchemeArg::Fd => Scheme::FiniteDifference,
        };
    }
    if let Some(i) = a.integrator {
        spec.integrator = match i {
            IntegratorArg::Rkc => Integrator::Rkc,
            IntegratorArg::Bs23 => Integrator::Bs23,
        };
    }
    spec.dealias |= a.dealias;
    spec.steady_tol = a.steady_tol.or(spec.steady_tol);
    cfg.simulation = Some(spec.clone());
    Ok((cfg, spec))
}

fn pngs_for(dir: &Path, series: &SnapshotSeries, snap: &Snapshot) -> Result<Vec<PathBuf>, Failure> {
    let g = &series.grid;
    let mut out = Vec::new();
    if g.geometry == Geometry::Rectangle {
        let p = dir.join("u.png");
        png::heatmap(&p, g.n[0], g.n[1], &snap.field.u).map_err(Failure::Run)?;
        out.push(p);
    } else {
        let p = dir.join("u.png");
        png::lines(&p, &[(&g.xs(), &snap.field.u)]).map_err(Failure::Run)?;
        out.push(p);
    }
    Ok(out)
}

pub fn run_simulation(a: &SimulateArgs, ctx: &Ctx) -> Outcome {
    let (cfg, spec) = resolve_simulation(a)?;
    let grid = cfg.grid(spec.geometry, &spec.n)?;
    let sim = cfg.sim_config(&spec)?;
    let series = match spec.geometry {
        GeometryKind::Radial => simulate_radial(&cfg.params, &grid, &sim)?,
        _ => simulate(&cfg.params, &grid, &sim)?,
    };
    let mut outputs = write_series(&a.out, &series)?;
    let last = series.last();
    let csv = match grid.geometry {
        Geometry::Rectangle => field_csv(&grid, &last.field),
        _ => profile_csv(&grid, &last.field),
    };
    let final_csv = a.out.join("final.csv");
    write_file(&final_csv, &csv)?;
    outputs.push(final_csv);
    if a.png {
        outputs.extend(pngs_for(&a.out, &series, last)?);
    }
    let mut config = to_value(&cfg);
    config["resolved_initial_condition"] = to_value(&sim.initial);
    write_dir_manifest(ctx, &a.out, config, Some(spec.seed), &outputs)?;
    let ss = cfg.params.steady_state();
    let dev = last.field.u.iter().map(|u| (u - ss.u_bar).abs()).fold(0.0, f64::max);
    let summary = json!({
        "out": a.out,
        "t_final": last.t,
        "snapshots": series.snapshots.len(),
        "settled": series.settled,
        "rate": last.rate,
        "max_deviation_u": dev,
        "stats": series.stats,
        "scheme": series.scheme,
    });
    ctx.emit(
        || {
            format!(
                "t = {:.3}  snapshots = {}  settled = {}  max|u-ū| = {:.4e}  steps = {}  -> {}",
                last.t,
                series.snapshots.len(),
                series.settled,
                dev,
                series.stats.accepted,
                a.out.display()
            )
        },
        summary,
    );
    Ok(0)
}

fn pick<'a>(series: &'a SnapshotSeries, index: i64) -> Result<&'a Snapshot, Failure> {
    let n = series.snapshots.len() as i64;
    let i = if index < 0 { n + index } else { index };
    if !(0..n).contains(&i) {
        return Err(Failure::Usage(format!("snapshot {index} out of range (series has {n})")));
    }
    Ok(&series.snapshots[i as usize])
}

pub fn spectrum(a: &SpectrumArgs, ctx: &Ctx) -> Outcome {
    let series = read_series(&a.sel.input)?;
    let snap = pick(&series, a.sel.snapshot)?;
    let report = cosine_spectrum(&series.grid, &snap.field.u, a.threshold)?;
    if let Some(out) = &a.out {
        write_file(out, &report.to_csv())?;
        let mut outputs = vec![out.clone()];
        if a.png {
            let p = out.with_extension("png");
            let [nx, ny] = report.n;
            let mut mag: Vec<f64> = report.coefficients.iter().map(|c| c.abs()).collect();
            mag[0] = 0.0;
            if ny > 1 {
                png::heatmap(&p, nx, ny, &mag).map_err(Failure::Run)?;
            } else {
                let ps: Vec<f64> = (0..nx).map(|p| p as f64).collect();
                png::lines(&p, &[(&ps, &mag)]).map_err(Failure::Run)?;
            }
            outputs.push(p);
        }
        let config = json!({ "input": a.sel.input, "snapshot": a.sel.snapshot, "t": snap.t, "threshold": a.threshold });
        write_file_manifest(ctx, out, config, Some(series.seed), &outputs[1..])?;
    }
    let summary = json!({ "t": snap.t, "dominant": report.dominant, "mean": report.mean, "threshold": report.threshold });
    ctx.emit(
        || {
            let mut s = format!("t = {:.3}  mean = {:.6}  dominant modes (>= {:.0}% of max):", snap.t, report.mean, 100.0 * report.threshold);
            for m in &report.dominant {
                s.push_str(&format!("\n  ({:>3},{:>3})  {:+.6e}", m.p, m.q, m.coefficient));
            }
            s
        },
        summary,
    );
    Ok(0)
}

pub fn envelope(a: &EnvelopeArgs, ctx: &Ctx) -> Outcome {
    let series = read_series(&a.input)?;
    if series.grid.geometry != Geometry::Line {
        return Err(Failure::Run("envelopes need a 1D run".into()));
    }
    let np = series.params;
    let kc = turing_threshold(&np)?.kc();
    let u_bar = np.steady_state().u_bar;
    let xs = series.grid.xs();
    let envs: Vec<(f64, Envelope)> = series
        .snapshots
        .iter()
        .filter_map(|s| {
            let dev: Vec<f64> = s.field.u.iter().map(|u| u - u_bar).collect();
            envelope_1d(&xs, &dev, kc).ok().map(|e| (s.t, e))
        })
        .collect();
    if envs.is_empty() {
        return Err(Failure::Run("no snapshot has enough extrema for an envelope".into()));
    }
    let predicted = stuart_landau_coeffs(&np, None).ok().and_then(|m| match m.coefficients {
        Coefficients::CubicSl { sigma, l } if l > 0.0 && m.eps > 0.0 => Some(m.amplitude_scale * (sigma / l).sqrt()),
        _ => None,
    });
    let level = a.level.or(predicted.map(|p| 0.5 * p)).unwrap_or_else(|| {
        let last = &envs[envs.len() - 1].1;
        0.5 * last.amplitude.iter().copied().fold(0.0, f64::max)
    });
    let fronts = match front_position(&envs, level) {
        Ok(f) => Some(f),
        Err(e) => {
            ctx.warn(&format!("no fronts: {e}"));
            None
        }
    };
    if let Some(dir) = &a.out {
        let mut csv = String::from("t,x,amplitude\n");
        for (t, e) in &envs {
            for (x, amp) in e.x.iter().zip(&e.amplitude) {
                csv.push_str(&format!("{t:.12e},{x:.12e},{amp:.12e}\n"));
            }
        }
        let mut outputs = vec![dir.join("envelopes.csv")];
        write_file(&outputs[0], &csv)?;
        if let Some(f) = &fronts {
            let mut fc = String::from("t,crossings\n");
            for (t, c) in f.times.iter().zip(&f.crossings) {
                let c: Vec<String> = c.iter().map(|x| format!("{x:.12e}")).collect();
                fc.push_str(&format!("{t:.12e},{}\n", c.join(";")));
            }
            let p = dir.join("fronts.csv");
            write_file(&p, &fc)?;
            outputs.push(p);
            let p = dir.join("fronts.json");
            write_file(&p, &(serde_json::to_string_pretty(f).unwrap_or_default() + "\n"))?;
            outputs.push(p);
        }
        if a.png {
            let step = (envs.len() / 8).max(1);
            let curves: Vec<(&[f64], &[f64])> = envs
                .iter()
                .step_by(step)
                .map(|(_, e)| (e.x.as_slice(), e.amplitude.as_slice()))
                .collect();
            let p = dir.join("envelopes.png");
            png::lines(&p, &curves).map_err(Failure::Run)?;
            outputs.push(p);
        }
        let config = json!({ "input": a.input, "level": level, "kc": kc, "method": envs[0].1.method });
        write_dir_manifest(ctx, dir, config, Some(series.seed), &outputs)?;
    }
    let summary = json!({
        "snapshots": envs.len(),
        "level": level,
        "predicted_saturation": predicted,
        "right_speed": fronts.as_ref().and_then(|f| f.right_speed),
        "left_speed": fronts.as_ref().and_then(|f| f.left_speed),
    });
    ctx.emit(
        || {
            let sp = |v: Option<f64>| v.map_or("n/a".into(), |v| format!("{v:.4}"));
            format!(
                "{} envelopes, level {:.4e}; front speeds: left {}, right {}",
                envs.len(),
                level,
                sp(fronts.as_ref().and_then(|f| f.left_speed)),
                sp(fronts.as_ref().and_then(|f| f.right_speed))
            )
        },
        summary,
    );
    Ok(0)
}

pub fn corematch(a: &CorematchArgs, ctx: &Ctx) -> Outcome {
    let series = read_series(&a.sel.input)?;
    if series.grid.geometry != Geometry::Radial {
        return Err(Failure::Run("core matching needs a radial run".into()));
    }
    let snap = pick(&series, a.sel.snapshot)?;
    let np = series.params;
    let eps = epsilon(&np)?;
    let kc = turing_threshold(&np)?.kc();
    let m = core_match(&series.grid, &snap.field.u, np.steady_state().u_bar, kc, eps)?;
    if m.low_confidence {
        ctx.warn(&format!("J0 fit residual {:.3} is large; C is low-confidence", m.residual));
    }
    if let Some(out) = &a.out {
        write_file(out, &(serde_json::to_string_pretty(&m).unwrap_or_default() + "\n"))?;
        let config = json!({ "input": a.sel.input, "snapshot": a.sel.snapshot, "t": snap.t });
        write_file_manifest(ctx, out, config, Some(series.seed), &[])?;
    }
    ctx.emit(
        || {
            format!(
                "C = {:.6}  residual = {:.3}  centre = {:.4e}  outer rings = {:.4e}  (eps = {:.4}, t = {:.2})",
                m.c, m.residual, m.center_amplitude, m.outer_amplitude, m.eps, snap.t
            )
        },
        &m,
    );
    Ok(0)
}

pub fn validate(a: &ValidateArgs, ctx: &Ctx) -> Outcome {
    let ids = match &a.criteria {
        Some(c) => {
            if let Some(bad) = c.iter().find(|&&id| !(1..=13).contains(&id)) {
                return Err(Failure::Usage(format!("no criterion {bad} (1 to 13)")));
            }
            c.clone()
        }
        None => a.suite.parse::<Suite>()?.criteria(),
    };
    let reports: Vec<CriterionReport> = if a.serial {
        ids.iter().map(|&id| validation::run(id)).collect()
    } else {
        ids.par_iter().map(|&id| validation::run(id)).collect()
    };
    for r in &reports {
        if ctx.json {
            println!("{}", serde_json::to_string(r).unwrap_or_default());
        } else if !ctx.quiet {
            println!("{}", r.line());
            if !r.passed {
                print!("{}", r.details());
            }
        }
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    if !ctx.json && !ctx.quiet {
        println!("{} passed, {failed} failed", reports.len() - failed);
    }
    if let Some(out) = &a.out {
        write_file(out, &(serde_json::to_string_pretty(&reports).unwrap_or_default() + "\n"))?;
        write_file_manifest(ctx, out, json!({ "criteria": ids, "suite": a.suite }), None, &[])?;
    }
    Ok(if a.strict && failed > 0 { 1 } else { 0 })
}

