use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Turing patterns in the Brusselator with density-dependent diffusion.
///
/// `--params` accepts a JSON file or the name of a bundled preset
/// (fig2_1, fig2_2, fig2_3, fig3_1, fig3_2, fig3_3, fig4_1 … fig4_4, fig11).
#[derive(Debug, Parser)]
#[command(name = "brusselator", version, propagate_version = true)]
pub struct Cli {
    /// Machine-readable JSON on stdout instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Suppress informational output.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    /// Worker threads for parallel sweeps and validation.
    #[arg(long, global = true, env = "BRUSSELATOR_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Thresholds at a parameter point, or a stability-region sweep.
    Analyze(AnalyzeArgs),
    /// Amplitude-equation coefficients.
    Coeffs(CoeffsArgs),
    /// Integrate or analyse an amplitude equation saved by `coeffs`.
    Amplitude(AmplitudeArgs),
    /// Run the reaction-diffusion system and save snapshots.
    Simulate(SimulateArgs),
    /// Cosine spectrum of a saved snapshot.
    Spectrum(SpectrumArgs),
    /// Envelopes and fronts of a saved 1D run.
    Envelope(EnvelopeArgs),
    /// Bessel-core fit of a saved radial run.
    Corematch(CorematchArgs),
    /// Run the acceptance criteria.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub params: String,
    /// Sweep axes; without it (and no sweep in the config) only thresholds are reported.
    #[arg(long, value_parser = ["eta2,Q2", "Q2,b"])]
    pub sweep: Option<String>,
    /// First axis as `lo,hi,count`.
    #[arg(long, value_parser = parse_range)]
    pub x: Option<(f64, f64, usize)>,
    /// Second axis as `lo,hi,count`.
    #[arg(long, value_parser = parse_range)]
    pub y: Option<(f64, f64, usize)>,
    /// Attach the sign of the Landau coefficient to Turing-unstable points.
    #[arg(long)]
    pub criticality: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoeffsArgs {
    #[arg(long)]
    pub params: String,
    #[arg(long, default_value = "sl", value_parser = ["sl", "gl", "quintic", "coupled", "resonant"])]
    pub kind: String,
    /// Domain `Lx[,Ly]` in multiples of π, e.g. `2` or `2,2*sqrt(3)`.
    #[arg(long)]
    pub domain: Option<String>,
    /// Evaluate at `b = b^c (1 + ε²)` instead of the configured `b`.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AmplitudeTask {
    Integrate,
    Equilibria,
    Diagram,
    Hysteresis,
}

#[derive(Debug, Args)]
pub struct AmplitudeArgs {
    /// JSON written by `coeffs --out`.
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, value_enum)]
    pub task: AmplitudeTask,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Initial amplitudes, comma separated (integrate).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub init: Option<Vec<f64>>,
    /// Final slow time (integrate).
    #[arg(long, default_value_t = 10.0)]
    pub t_end: f64,
    /// Output interval (integrate); 0 keeps only the end points.
    #[arg(long, default_value_t = 0.1)]
    pub record: f64,
    /// `lo,hi,count` of b values (diagram).
    #[arg(long, value_parser = parse_range)]
    pub b_range: Option<(f64, f64, usize)>,
    /// Sequence of b values held in turn (hysteresis).
    #[arg(long, value_delimiter = ',')]
    pub path: Option<Vec<f64>>,
    /// Time spent at each b (hysteresis).
    #[arg(long, default_value_t = 400.0)]
    pub dwell: f64,
    /// Amplitude floor re-imposed before each segment (hysteresis).
    #[arg(long, default_value_t = 1e-6)]
    pub noise: f64,
    /// Samples per segment (hysteresis).
    #[arg(long, default_value_t = 20)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeometryArg {
    #[value(name = "1d")]
    Line,
    #[value(name = "2d")]
    Rectangle,
    Radial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IcArg {
    Steady,
    Random,
    Pulse,
    Bump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Spectral,
    Fd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IntegratorArg {
    Rkc,
    Bs23,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub params: String,
    #[arg(long, value_enum)]
    pub geometry: Option<GeometryArg>,
    /// `Lx[,Ly]` (or the disk radius for radial runs) in multiples of π.
    #[arg(long)]
    pub domain: Option<String>,
    /// Nodes per axis, e.g. `128` or `64,96`.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    pub ic: Option<IcArg>,
    /// Perturbation amplitude (defaults scale with ε and ū).
    #[arg(long)]
    pub amp: Option<f64>,
    /// Seed width for pulse and bump (defaults to one critical wavelength).
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tend: Option<f64>,
    #[arg(long)]
    pub snap_every: Option<f64>,
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,
    #[arg(long, value_enum)]
    pub integrator: Option<IntegratorArg>,
    /// 2/3 truncation of the transformed diffusion potentials.
    #[arg(long)]
    pub dealias: bool,
    /// Stop once the snapshot rate `max|∂t u|` falls below this.
    #[arg(long)]
    pub steady_tol: Option<f64>,
    /// Run at `b = b^c (1 + ε²)`.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write PNG images of the final state.
    #[arg(long)]
    pub png: bool,
}

#[derive(Debug, Args)]
pub struct SnapshotSel {
    /// Directory written by `simulate`.
    #[arg(long)]
    pub input: PathBuf,
    /// Snapshot index; negative values count from the end.
    #[arg(long, default_value_t = -1, allow_hyphen_values = true)]
    pub snapshot: i64,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub sel: SnapshotSel,
    /// Dominance threshold relative to the largest non-mean coefficient.
    #[arg(long, default_value_t = brusselator::analysis::DOMINANT_FRACTION)]
    pub threshold: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub png: bool,
}

#[derive(Debug, Args)]
pub struct EnvelopeArgs {
    /// Directory written by `simulate` (1D).
    #[arg(long)]
    pub input: PathBuf,
    /// Front level; defaults to half the predicted saturated amplitude.
    #[arg(long)]
    pub level: Option<f64>,
    /// Directory for `envelopes.csv`, `fronts.csv` and `fronts.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub png: bool,
}

#[derive(Debug, Args)]
pub struct CorematchArgs {
    #[command(flatten)]
    pub sel: SnapshotSel,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value = "fast", value_parser = ["thresholds", "fast", "full"])]
    pub suite: String,
    /// Explicit criterion numbers; overrides `--suite`.
    #[arg(long, value_delimiter = ',')]
    pub criteria: Option<Vec<u32>>,
    /// Run criteria one after another instead of in parallel.
    #[arg(long)]
    pub serial: bool,
    /// Exit with status 1 if any criterion fails.
    #[arg(long)]
    pub strict: bool,
    /// Write the full report as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [lo, hi, n] = parts[..] else {
        return Err(format!("expected `lo,hi,count`, got {s:?}"));
    };
    let lo: f64 = lo.parse().map_err(|e| format!("{lo:?}: {e}"))?;
    let hi: f64 = hi.parse().map_err(|e| format!("{hi:?}: {e}"))?;
    let n: usize = n.parse().map_err(|e| format!("{n:?}: {e}"))?;
    if n == 0 || !(lo <= hi) {
        return Err(format!("range {s:?} needs lo <= hi and count >= 1"));
    }
    Ok((lo, hi, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0.1, 2,5"), Ok((0.1, 2.0, 5)));
        assert!(parse_range("1,0,5").is_err());
        assert!(parse_range("1,2").is_err());
    }
}
