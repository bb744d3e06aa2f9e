use thiserror::Error;

/// Errors raised by the analysis and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("no Turing branch found for the given (Q, m, n)")]
    NoTuringBranch,
    #[error("no admissible unstable mode in the domain")]
    NoAdmissibleMode,
    #[error("matrix Gamma*K - k2*D is not rank deficient (det = {det:e}); thresholds are inconsistent")]
    NotRankDeficient { det: f64 },
    #[error("solvability violated: projection onto the adjoint kernel is {residual:e}")]
    Solvability { residual: f64 },
    #[error("mode set is resonant; use the resonant amplitude system")]
    Resonant,
    #[error("mode set is not resonant")]
    NotResonant,
    #[error("unsupported mode configuration: {0}")]
    ModeConfiguration(String),
    #[error("expected a subcritical bifurcation (L < 0), found L = {l}")]
    NotSubcritical { l: f64 },
    #[error("b = {b} does not exceed the Turing threshold {b_c}")]
    BelowThreshold { b: f64, b_c: f64 },
    #[error("no nontrivial equilibrium: sigma/L = {ratio} < 0")]
    NoEquilibrium { ratio: f64 },
    #[error("degenerate coefficient: {0}")]
    DegenerateCoefficient(&'static str),
    #[error("positivity violated at t = {t}: min(u, v) = {min}")]
    Positivity { t: f64, min: f64 },
    #[error("non-finite value encountered at t = {t}")]
    NonFinite { t: f64 },
    #[error("step size underflow at t = {t} (dt = {dt:e})")]
    StepSizeUnderflow { t: f64, dt: f64 },
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("grid mismatch between fields")]
    GridMismatch,
    #[error("envelope extraction failed: {0}")]
    Envelope(String),
    #[error("no level crossing found")]
    NoCrossing,
    #[error("no saddle-node in the requested range")]
    NoSaddleNode,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            reason,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
