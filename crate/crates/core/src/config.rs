//! JSON run configuration and the bundled presets.
//!
//! A config names the rescaled parameters by their squares (`Q2`, `eta2`),
//! or gives the dimensional set under `"physical"`:
//!
//! ```json
//! { "Q2": 3, "eta2": 0.36, "Gamma": 80, "m": 1, "n": 1, "epsilon": 0.1,
//!   "domain": { "lx": "2" } }
//! ```
//!
//! `b` may be given directly or through `epsilon`, with `b = b^c (1 + ε²)`.
//! Domain lengths are rational multiples of π such as `"2"` or `"2*sqrt(3)"`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linstab::{turing_threshold, Domain, PiLength, SweepKind};
use crate::model::{nondimensionalize, NondimParams, PhysicalParams};
use crate::pde::{Grid, InitialCondition, Integrator, Scheme, SimConfig, StepControl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeometryKind {
    #[serde(rename = "1d")]
    Line,
    #[serde(rename = "2d")]
    Rectangle,
    #[serde(rename = "radial")]
    Radial,
}

impl std::str::FromStr for GeometryKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1d" | "line" => Ok(GeometryKind::Line),
            "2d" | "rectangle" => Ok(GeometryKind::Rectangle),
            "radial" => Ok(GeometryKind::Radial),
            _ => Err(Error::Config(format!("unknown geometry {s:?} (expected 1d, 2d or radial)"))),
        }
    }
}

/// Domain lengths in units of π; `r_max` only for radial runs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lx: Option<PiLength>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ly: Option<PiLength>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<PiLength>,
}

impl DomainSpec {
    /// Parses `"Lx"` or `"Lx,Ly"` (each a multiple of π).
    pub fn parse_lengths(s: &str) -> Result<Self> {
        let mut parts = s.split(',');
        let lx = parts.next().filter(|p| !p.trim().is_empty()).map(str::parse).transpose()?;
        let ly = parts.next().map(str::parse).transpose()?;
        if parts.next().is_some() || lx.is_none() {
            return Err(Error::Config(format!("expected `Lx` or `Lx,Ly`, got {s:?}")));
        }
        Ok(DomainSpec { lx, ly, r_max: None })
    }

    /// The Neumann box used for mode enumeration, if any.
    pub fn domain(&self) -> Option<Domain> {
        match (self.lx, self.ly) {
            (Some(lx), Some(ly)) => Some(Domain::Rect { lx, ly }),
            (Some(lx), None) => Some(Domain::Line { lx }),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IcKind {
    Steady,
    Random,
    Pulse,
    Bump,
}

impl std::str::FromStr for IcKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "steady" => Ok(IcKind::Steady),
            "random" => Ok(IcKind::Random),
            "pulse" => Ok(IcKind::Pulse),
            "bump" => Ok(IcKind::Bump),
            _ => Err(Error::Config(format!("unknown initial condition {s:?}"))),
        }
    }
}

/// Initial data; missing sizes fall back to defaults tied to `ε` and `k_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IcSpec {
    pub kind: IcKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
}

impl IcSpec {
    pub fn new(kind: IcKind) -> Self {
        IcSpec { kind, amp: None, width: None }
    }

    /// Random data defaults to `1e-2·ε·ū` per node; localized seeds to `0.1·ε·ū`
    /// over one critical wavelength.
    pub fn resolve(&self, np: &NondimParams, eps: f64, kc: f64) -> InitialCondition {
        let u_bar = np.steady_state().u_bar;
        let width = self.width.unwrap_or(2.0 * std::f64::consts::PI / kc);
        match self.kind {
            IcKind::Steady => InitialCondition::Steady,
            IcKind::Random => InitialCondition::Random {
                amp: self.amp.unwrap_or(1e-2 * eps * u_bar),
            },
            IcKind::Pulse => InitialCondition::Pulse {
                amp: self.amp.unwrap_or(0.1 * eps * u_bar),
                width,
            },
            IcKind::Bump => InitialCondition::Bump {
                amp: self.amp.unwrap_or(0.1 * eps * u_bar),
                width,
            },
        }
    }
}

fn default_seed() -> u64 {
    1
}

/// Everything a PDE run needs beyond the parameters and the domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    pub geometry: GeometryKind,
    /// Nodes per axis: `[N]` or `[Nx, Ny]`.
    pub n: Vec<usize>,
    pub t_end: f64,
    pub snap_every: f64,
    pub ic: IcSpec,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub integrator: Integrator,
    #[serde(default)]
    pub dealias: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steady_tol: Option<f64>,
}

impl SimulationSpec {
    /// Resolution defaults: 256 on a line, 128² on a rectangle, 512 radially.
    pub fn defaults(geometry: GeometryKind) -> Self {
        let n = match geometry {
            GeometryKind::Line => vec![256],
            GeometryKind::Rectangle => vec![128, 128],
            GeometryKind::Radial => vec![512],
        };
        let ic = match geometry {
            GeometryKind::Radial => IcSpec::new(IcKind::Bump),
            _ => IcSpec::new(IcKind::Random),
        };
        SimulationSpec {
            geometry,
            n,
            t_end: 100.0,
            snap_every: 1.0,
            ic,
            seed: 1,
            scheme: Scheme::Spectral,
            integrator: Integrator::Rkc,
            dealias: false,
            steady_tol: None,
        }
    }
}

/// Parameter grid for `analyze`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    /// `"eta2,Q2"` (at the config's `b`) or `"Q2,b"` (at its `η²`).
    pub axes: String,
    /// `[start, stop, count]` along the first sweep axis.
    pub x: (f64, f64, usize),
    pub y: (f64, f64, usize),
    #[serde(default)]
    pub criticality: bool,
}

impl SweepSpec {
    pub fn axis(range: (f64, f64, usize)) -> Vec<f64> {
        let (a, b, n) = range;
        if n < 2 {
            return vec![a];
        }
        (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    name: Option<String>,
    #[serde(default)]
    description: Option<String>,
    #[serde(rename = "Q2", default)]
    q2: Option<f64>,
    #[serde(default)]
    eta2: Option<f64>,
    #[serde(default)]
    b: Option<f64>,
    #[serde(default)]
    epsilon: Option<f64>,
    #[serde(rename = "Gamma", default)]
    gamma: Option<f64>,
    #[serde(default)]
    m: Option<f64>,
    #[serde(default)]
    n: Option<f64>,
    #[serde(default)]
    physical: Option<PhysicalParams>,
    #[serde(default)]
    domain: Option<DomainSpec>,
    #[serde(default)]
    simulation: Option<SimulationSpec>,
    #[serde(default)]
    sweep: Option<SweepSpec>,
}

/// A fully resolved configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub params: NondimParams,
    #[serde(rename = "Q2")]
    pub q2: f64,
    pub eta2: f64,
    /// Turing threshold of the parameters, when a branch exists.
    pub b_c: Option<f64>,
    /// `ε = sqrt((b − b^c)/b^c)` when `b > b^c`.
    pub epsilon: Option<f64>,
    pub domain: DomainSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub simulation: Option<SimulationSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
}

fn need(name: &'static str, v: Option<f64>) -> Result<f64> {
    v.ok_or_else(|| Error::Config(format!("missing parameter `{name}`")))
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawConfig = serde_json::from_str(text)?;
        let params = if let Some(p) = raw.physical {
            if raw.q2.is_some() || raw.eta2.is_some() || raw.b.is_some() || raw.epsilon.is_some() {
                return Err(Error::Config("give either `physical` or the rescaled parameters, not both".into()));
            }
            nondimensionalize(&p)?.0
        } else {
            let (q2, eta2) = (need("Q2", raw.q2)?, need("eta2", raw.eta2)?);
            let (gamma, m, n) = (need("Gamma", raw.gamma)?, need("m", raw.m)?, need("n", raw.n)?);
            let b = match (raw.b, raw.epsilon) {
                (Some(b), None) => b,
                (None, Some(eps)) => {
                    if !(eps.is_finite() && eps > 0.0) {
                        return Err(Error::domain("epsilon", eps, "must be positive and finite"));
                    }
                    let probe = NondimParams::from_squares(q2, eta2, 1.0, gamma, m, n)?;
                    turing_threshold(&probe)?.b_turing * (1.0 + eps * eps)
                }
                (Some(_), Some(_)) => return Err(Error::Config("give either `b` or `epsilon`, not both".into())),
                (None, None) => return Err(Error::Config("missing parameter `b` (or `epsilon`)".into())),
            };
            NondimParams::from_squares(q2, eta2, b, gamma, m, n)?
        };
        let b_c = turing_threshold(&params).ok().map(|t| t.b_turing);
        let epsilon = b_c.filter(|bc| params.b > *bc).map(|bc| ((params.b - bc) / bc).sqrt());
        if let Some(sim) = &raw.simulation {
            validate_sim(sim)?;
        }
        Ok(RunConfig {
            name: raw.name,
            description: raw.description,
            q2: params.q2(),
            eta2: params.eta2(),
            params,
            b_c,
            epsilon,
            domain: raw.domain.unwrap_or_default(),
            simulation: raw.simulation,
            sweep: raw.sweep,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// A path that does not exist is looked up among the presets by file stem.
    pub fn load(spec: &str) -> Result<Self> {
        let path = Path::new(spec);
        if path.exists() {
            return Self::from_file(path);
        }
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or(spec);
        match preset(stem) {
            Some(text) => Self::from_json(text),
            None => Err(Error::Config(format!(
                "no config file or preset named {spec:?} (presets: {})",
                PRESETS.iter().map(|p| p.0).collect::<Vec<_>>().join(", ")
            ))),
        }
    }

    /// Same configuration at `b = b^c (1 + ε²)`.
    pub fn with_epsilon(&self, eps: f64) -> Result<Self> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::domain("epsilon", eps, "must be positive and finite"));
        }
        let b_c = self.b_c.ok_or(Error::NoTuringBranch)?;
        let mut out = self.clone();
        out.params = self.params.with_b(b_c * (1.0 + eps * eps));
        out.epsilon = Some(eps);
        Ok(out)
    }

    pub fn eps_or_err(&self) -> Result<f64> {
        match (self.epsilon, self.b_c) {
            (Some(e), _) => Ok(e),
            (None, Some(b_c)) => Err(Error::BelowThreshold { b: self.params.b, b_c }),
            (None, None) => Err(Error::NoTuringBranch),
        }
    }

    /// Critical wavenumber `k_c` at the threshold.
    pub fn kc(&self) -> Result<f64> {
        Ok(turing_threshold(&self.params)?.kc())
    }

    /// Grid for `geometry` on the configured domain with `n` nodes per axis.
    pub fn grid(&self, geometry: GeometryKind, n: &[usize]) -> Result<Grid> {
        let len = |l: Option<PiLength>, name: &str| {
            l.map(|l| l.value())
                .ok_or_else(|| Error::Config(format!("domain length `{name}` is required for this geometry")))
        };
        let count = |k: usize| {
            n.get(k)
                .or_else(|| n.first())
                .copied()
                .ok_or_else(|| Error::Config("resolution is empty".into()))
        };
        match geometry {
            GeometryKind::Line => Grid::line(len(self.domain.lx, "lx")?, count(0)?),
            GeometryKind::Rectangle => Grid::rectangle(
                len(self.domain.lx, "lx")?,
                len(self.domain.ly, "ly")?,
                count(0)?,
                count(1)?,
            ),
            GeometryKind::Radial => Grid::radial(len(self.domain.r_max, "r_max")?, count(0)?),
        }
    }

    /// Simulation settings translated for [`crate::pde::simulate`].
    pub fn sim_config(&self, spec: &SimulationSpec) -> Result<SimConfig> {
        validate_sim(spec)?;
        let eps = self.epsilon.unwrap_or(0.0);
        let kc = self.kc().unwrap_or(1.0);
        let cfg = SimConfig {
            t_end: spec.t_end,
            snap_every: spec.snap_every,
            scheme: spec.scheme,
            control: StepControl {
                integrator: spec.integrator,
                ..StepControl::default()
            },
            initial: spec.ic.resolve(&self.params, eps, kc),
            seed: spec.seed,
            dealias: spec.dealias,
            reaction: true,
            steady_tol: spec.steady_tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn sweep_kind(&self, axes: &str) -> Result<SweepKind> {
        match axes.replace(' ', "").as_str() {
            "eta2,Q2" => Ok(SweepKind::EtaQ { b: self.params.b }),
            "Q2,b" => Ok(SweepKind::QB { eta2: self.eta2 }),
            other => Err(Error::Config(format!("unknown sweep {other:?} (expected eta2,Q2 or Q2,b)"))),
        }
    }
}

fn validate_sim(s: &SimulationSpec) -> Result<()> {
    let want = if s.geometry == GeometryKind::Rectangle { 2 } else { 1 };
    if s.n.is_empty() || s.n.len() > want {
        return Err(Error::Config(format!("`n` needs {want} entr{} for this geometry", if want == 1 { "y" } else { "ies" })));
    }
    if !(s.t_end > 0.0 && s.snap_every > 0.0) {
        return Err(Error::Config("`t_end` and `snap_every` must be positive".into()));
    }
    Ok(())
}

/// Bundled presets, one per reference scenario.
pub const PRESETS: &[(&str, &str)] = &[
    ("fig2_1", include_str!("../presets/fig2_1.json")),
    ("fig2_2", include_str!("../presets/fig2_2.json")),
    ("fig2_3", include_str!("../presets/fig2_3.json")),
    ("fig3_1", include_str!("../presets/fig3_1.json")),
    ("fig3_2", include_str!("../presets/fig3_2.json")),
    ("fig3_3", include_str!("../presets/fig3_3.json")),
    ("fig4_1", include_str!("../presets/fig4_1.json")),
    ("fig4_2", include_str!("../presets/fig4_2.json")),
    ("fig4_3", include_str!("../presets/fig4_3.json")),
    ("fig4_4", include_str!("../presets/fig4_4.json")),
    ("fig11", include_str!("../presets/fig11.json")),
];

/// Preset text by name (`"fig3_1"`; `"fig31"` and `"fig3.1"` are accepted too).
pub fn preset(name: &str) -> Option<&'static str> {
    let key: String = name.chars().filter(|c| c.is_ascii_alphanumeric()).collect();
    PRESETS
        .iter()
        .find(|(n, _)| n.replace('_', "") == key || *n == name)
        .map(|(_, text)| *text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn every_preset_parses() {
        for (name, text) in PRESETS {
            let cfg = RunConfig::from_json(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(cfg.name.as_deref(), Some(*name));
            if let Some(sim) = &cfg.simulation {
                cfg.grid(sim.geometry, &sim.n).unwrap();
                cfg.sim_config(sim).unwrap();
            }
        }
    }

    #[test]
    fn epsilon_sets_b_from_threshold() {
        let cfg = RunConfig::load("fig3_1").unwrap();
        assert_relative_eq!(cfg.epsilon.unwrap(), 0.1, max_relative = 1e-12);
        assert_relative_eq!(cfg.b_c.unwrap(), 5.3028, max_relative = 1e-3);
        assert_relative_eq!(cfg.q2, 3.0, max_relative = 1e-14);
        assert!(RunConfig::load("fig31").is_ok());
    }

    #[test]
    fn physical_entry_path() {
        let text = r#"{"physical": {"d_u": 1, "d_v": 1, "u0": 1, "v0": 1, "a": 2, "b": 3, "Gamma": 10, "m": 1, "n": 1}}"#;
        let cfg = RunConfig::from_json(text).unwrap();
        assert_relative_eq!(cfg.params.q, 2.0, epsilon = 1e-14);
        assert_relative_eq!(cfg.params.eta, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn bad_configs_are_rejected() {
        for text in [
            r#"{"Q2": 3, "eta2": 0.36, "Gamma": 80, "m": 1, "n": 1}"#,
            r#"{"Q2": 3, "eta2": 0.36, "Gamma": 80, "m": 1, "n": 1, "b": 6, "epsilon": 0.1}"#,
            r#"{"Q2": -3, "eta2": 0.36, "Gamma": 80, "m": 1, "n": 1, "b": 6}"#,
            r#"{"Q2": 3, "eta2": 0.36, "Gamma": 80, "m": 1, "n": 1, "b": 6, "colour": 1}"#,
        ] {
            assert!(RunConfig::from_json(text).is_err(), "{text}");
        }
        assert!(RunConfig::load("no_such_preset").is_err());
    }

    #[test]
    fn domain_lengths_parse() {
        let d = DomainSpec::parse_lengths("2,2*sqrt(3)").unwrap();
        assert_eq!(d.domain().unwrap().ly().unwrap().to_string(), "2*sqrt(3)");
        assert!(DomainSpec::parse_lengths("").is_err());
        assert!(DomainSpec::parse_lengths("1,2,3").is_err());
    }
}
