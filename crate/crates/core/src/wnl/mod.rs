//! Weakly nonlinear analysis: kernels, harmonic solves and amplitude-equation
//! coefficients.
//!
//! Coefficients come from a numerical center-manifold reduction (see the
//! private `series` module) carried out around `b0`, the value of `b` at
//! which the critical modes are exactly neutral. Without a domain the
//! critical mode is `cos(k_c x)` and `b0 = b^c`. With a finite domain the
//! critical modes are the admissible [`ModeSet`](crate::linstab::ModeSet)
//! and `b0` is their neutral value, which differs from `b^c` only by the
//! detuning `k̄² − k_c²`.
//!
//! The amplitude gauge is `w₁ = a ρ cos(..)` with `ρ = (1, ρ₂)` and
//! `⟨ρ, ψ⟩ = 1`; the scaled amplitude `A` is `a/ε` (or `a/ε²` in the
//! resonant case) and the slow time is `T = ε² t`.

mod series;

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linstab::{
    admissible_modes, linearize, neutral_b, solve2, turing_threshold, Domain, Mat2, ModeSet,
    Resonance,
};
use crate::model::NondimParams;
use series::{binom, Expansion, Metric, Mono, Problem, MAX_R};

/// Right and left null vectors of the critical operator `ΓK − k²D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelPair {
    pub rho: [f64; 2],
    pub psi_adj: [f64; 2],
}

impl KernelPair {
    /// Relative residuals `|M ρ|` and `|Mᵀ ψ|`.
    pub fn residuals(&self, m: &Mat2) -> (f64, f64) {
        let norm = m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt();
        let r = self.rho;
        let p = self.psi_adj;
        let mr = (m[0][0] * r[0] + m[0][1] * r[1]).hypot(m[1][0] * r[0] + m[1][1] * r[1]);
        let mp = (m[0][0] * p[0] + m[1][0] * p[1]).hypot(m[0][1] * p[0] + m[1][1] * p[1]);
        (mr / (norm * r[0].hypot(r[1])), mp / (norm * p[0].hypot(p[1])))
    }

    pub fn pairing(&self) -> f64 {
        self.rho[0] * self.psi_adj[0] + self.rho[1] * self.psi_adj[1]
    }
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

pub(crate) fn kernel_of(m: &Mat2) -> Result<KernelPair> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let norm2 = m.iter().flatten().map(|x| x * x).sum::<f64>();
    if det.abs() > 1e-8 * norm2 {
        return Err(Error::NotRankDeficient { det });
    }
    let row = if m[0][0].hypot(m[0][1]) >= m[1][0].hypot(m[1][1]) { m[0] } else { m[1] };
    let rho = if row[1] != 0.0 { [1.0, -row[0] / row[1]] } else { [0.0, 1.0] };
    let col = if m[0][0].hypot(m[1][0]) >= m[0][1].hypot(m[1][1]) {
        [m[0][0], m[1][0]]
    } else {
        [m[0][1], m[1][1]]
    };
    let psi = [-col[1], col[0]];
    let s = dot(psi, rho);
    if s == 0.0 {
        return Err(Error::NotRankDeficient { det });
    }
    Ok(KernelPair {
        rho,
        psi_adj: [psi[0] / s, psi[1] / s],
    })
}

/// Kernel pair of `ΓK − k2·D` at the parameters' `b`.
pub fn critical_kernels(np: &NondimParams, k2: f64) -> Result<KernelPair> {
    kernel_of(&linearize(np).operator(k2))
}

/// Solves `(ΓK − k2·D) x = rhs` at the parameters' `b`.
///
/// When the operator is singular the solution orthogonal to `ρ` is returned,
/// provided `rhs` is orthogonal to the adjoint null vector.
pub fn solve_harmonic(np: &NondimParams, harmonic_k2: f64, rhs: [f64; 2]) -> Result<[f64; 2]> {
    let m = linearize(np).operator(harmonic_k2);
    if let Some(x) = solve2(&m, rhs) {
        return Ok(x);
    }
    let kp = kernel_of(&m)?;
    let scale = rhs[0].hypot(rhs[1]);
    let residual = dot(kp.psi_adj, rhs) / kp.psi_adj[0].hypot(kp.psi_adj[1]);
    if scale > 0.0 && residual.abs() > 1e-9 * scale {
        return Err(Error::Solvability { residual });
    }
    series::solve_singular(&m, &kp.rho, rhs)
}

/// Diffusion expansion matrices and kinetic weights at `b^c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTables {
    /// Diagonal of `D⁽¹⁾`, the quadratic diffusion weights.
    pub d1: [f64; 2],
    /// Diagonal of `D⁽²⁾`, the cubic diffusion weights.
    pub d2: [f64; 2],
    /// Weights of `u v` and `u²` in the quadratic kinetics: `(2Q, b^c/Q)`.
    pub quadratic: [f64; 2],
    /// Weight of `u² v` in the cubic kinetics.
    pub cubic: f64,
    /// `(b⁽¹⁾, b⁽²⁾)` for `b = b^c (1 + ε²)`.
    pub b_corrections: (f64, f64),
}

pub fn expansion_tables(np: &NondimParams) -> Result<ExpansionTables> {
    let bc = turing_threshold(np)?.b_turing;
    let (q, m, n, eta2) = (np.q, np.m, np.n, np.eta2());
    let vb = bc / q;
    Ok(ExpansionTables {
        d1: [binom(m + 1.0, 2) * q.powf(m - 1.0), binom(n + 1.0, 2) / eta2 * vb.powf(n - 1.0)],
        d2: [binom(m + 1.0, 3) * q.powf(m - 2.0), binom(n + 1.0, 3) / eta2 * vb.powf(n - 2.0)],
        quadratic: [2.0 * q, bc / q],
        cubic: 1.0,
        b_corrections: (0.0, bc),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    CubicSl,
    Gl,
    QuinticSl,
    Coupled,
    Resonant,
}

impl std::str::FromStr for ModelKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "sl" | "cubic" | "cubic_sl" => ModelKind::CubicSl,
            "gl" => ModelKind::Gl,
            "quintic" | "quintic_sl" => ModelKind::QuinticSl,
            "coupled" => ModelKind::Coupled,
            "resonant" => ModelKind::Resonant,
            _ => return Err(Error::Config(format!("unknown model kind {s:?}"))),
        })
    }
}

/// Named coefficients; sign conventions follow the amplitude equations
/// documented on each variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Coefficients {
    /// `A' = σA − LA³`
    CubicSl { sigma: f64, l: f64 },
    /// `∂_T A = ν ∂²_X A + σA − LA³` with `X = εx`
    Gl { sigma: f64, l: f64, nu: f64 },
    /// `A' = σA − LA³ + RA⁵`
    QuinticSl { sigma: f64, l: f64, r: f64 },
    /// `A₁' = σA₁ − L₁A₁³ + R₁A₁A₂²` and symmetrically for `A₂`
    Coupled { sigma: f64, l1: f64, l2: f64, r1: f64, r2: f64 },
    /// `A₁' = σ₁A₁ − L₁A₁A₂ + R₁A₁A₂² + S₁A₁³`,
    /// `A₂' = σ₂A₂ − L₂A₁² + R₂A₁²A₂ + S₂A₂³`
    Resonant {
        sigma1: f64,
        sigma2: f64,
        l1: f64,
        l2: f64,
        r1: f64,
        r2: f64,
        s1: f64,
        s2: f64,
    },
}

impl Coefficients {
    pub fn kind(&self) -> ModelKind {
        match self {
            Coefficients::CubicSl { .. } => ModelKind::CubicSl,
            Coefficients::Gl { .. } => ModelKind::Gl,
            Coefficients::QuinticSl { .. } => ModelKind::QuinticSl,
            Coefficients::Coupled { .. } => ModelKind::Coupled,
            Coefficients::Resonant { .. } => ModelKind::Resonant,
        }
    }

    /// Number of scalar amplitudes.
    pub fn dimension(&self) -> usize {
        match self {
            Coefficients::Coupled { .. } | Coefficients::Resonant { .. } => 2,
            _ => 1,
        }
    }

    /// Right-hand side of the ODE system (spatially uniform for GL).
    pub fn rhs(&self, a: &[f64], out: &mut [f64]) {
        match *self {
            Coefficients::CubicSl { sigma, l } | Coefficients::Gl { sigma, l, .. } => {
                out[0] = sigma * a[0] - l * a[0].powi(3);
            }
            Coefficients::QuinticSl { sigma, l, r } => {
                let x = a[0];
                out[0] = sigma * x - l * x.powi(3) + r * x.powi(5);
            }
            Coefficients::Coupled { sigma, l1, l2, r1, r2 } => {
                let (x, y) = (a[0], a[1]);
                out[0] = sigma * x - l1 * x.powi(3) + r1 * x * y * y;
                out[1] = sigma * y - l2 * y.powi(3) + r2 * x * x * y;
            }
            Coefficients::Resonant { sigma1, sigma2, l1, l2, r1, r2, s1, s2 } => {
                let (x, y) = (a[0], a[1]);
                out[0] = sigma1 * x - l1 * x * y + r1 * x * y * y + s1 * x.powi(3);
                out[1] = sigma2 * y - l2 * x * x + r2 * x * x * y + s2 * y.powi(3);
            }
        }
    }

    /// Jacobian of [`Coefficients::rhs`], row-major, `dimension²` entries.
    pub fn jacobian(&self, a: &[f64]) -> Vec<f64> {
        match *self {
            Coefficients::CubicSl { sigma, l } | Coefficients::Gl { sigma, l, .. } => {
                vec![sigma - 3.0 * l * a[0] * a[0]]
            }
            Coefficients::QuinticSl { sigma, l, r } => {
                let x2 = a[0] * a[0];
                vec![sigma - 3.0 * l * x2 + 5.0 * r * x2 * x2]
            }
            Coefficients::Coupled { sigma, l1, l2, r1, r2 } => {
                let (x, y) = (a[0], a[1]);
                vec![
                    sigma - 3.0 * l1 * x * x + r1 * y * y,
                    2.0 * r1 * x * y,
                    2.0 * r2 * x * y,
                    sigma - 3.0 * l2 * y * y + r2 * x * x,
                ]
            }
            Coefficients::Resonant { sigma1, sigma2, l1, l2, r1, r2, s1, s2 } => {
                let (x, y) = (a[0], a[1]);
                vec![
                    sigma1 - l1 * y + r1 * y * y + 3.0 * s1 * x * x,
                    -l1 * x + 2.0 * r1 * x * y,
                    -2.0 * l2 * x + 2.0 * r2 * x * y,
                    sigma2 + r2 * x * x + 3.0 * s2 * y * y,
                ]
            }
        }
    }
}

/// One normal-form coefficient: the `a^α δ^β` term of `ȧ_eq`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTerm {
    pub eq: usize,
    pub alpha: Vec<u8>,
    pub delta_pow: u8,
    pub value: f64,
}

/// One planform component of the expansion `w(a, δ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldTerm {
    pub alpha: Vec<u8>,
    pub delta_pow: u8,
    pub p: u32,
    pub q: u32,
    pub u: f64,
    pub v: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub kernel_residual: f64,
    pub adjoint_residual: f64,
    pub solvability_residual: f64,
    /// Largest normal-form term not represented by the reported coefficients,
    /// relative to the largest term of the same weight that is.
    pub unmodeled: f64,
}

/// Amplitude equation together with everything needed to rescale,
/// reconstruct and audit it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeModel {
    pub coefficients: Coefficients,
    pub params: NondimParams,
    pub eps: f64,
    pub b_c: f64,
    /// Expansion point; equals `b_c` without a domain.
    pub b0: f64,
    /// Squared wavenumber of the critical modes.
    pub k2: f64,
    pub modes: Vec<(u32, u32)>,
    pub domain: Option<Domain>,
    /// Wavenumbers of a unit index along x and y.
    pub unit_k: [f64; 2],
    /// `a = amplitude_scale · A`.
    pub amplitude_scale: f64,
    pub weight_delta: u32,
    pub kernel: KernelPair,
    pub w21: Option<[f64; 2]>,
    pub raw: Vec<RawTerm>,
    pub field_terms: Vec<FieldTerm>,
    pub diagnostics: Diagnostics,
}

impl AmplitudeModel {
    pub fn kind(&self) -> ModelKind {
        self.coefficients.kind()
    }

    pub fn raw_value(&self, eq: usize, alpha: &[u8], delta_pow: u8) -> f64 {
        self.raw
            .iter()
            .find(|t| t.eq == eq && t.alpha == alpha && t.delta_pow == delta_pow)
            .map_or(0.0, |t| t.value)
    }

    /// Same reduction re-scaled to another `b` (and hence another ε).
    pub fn at_b(&self, b: f64) -> Result<AmplitudeModel> {
        let mut out = self.clone();
        out.params = self.params.with_b(b);
        let e2 = (b - self.b_c) / self.b_c;
        if self.domain.is_some() && e2 <= 0.0 {
            return Err(Error::BelowThreshold { b, b_c: self.b_c });
        }
        out.eps = e2.max(0.0).sqrt();
        let sc = Scaling::new(&out);
        out.amplitude_scale = sc.amp;
        out.coefficients = scale_coefficients(self.kind(), &self.raw, &sc, self.nu())?;
        Ok(out)
    }

    fn nu(&self) -> Option<f64> {
        match self.coefficients {
            Coefficients::Gl { nu, .. } => Some(nu),
            _ => None,
        }
    }
}

/// Maps normal-form coefficients to the scaled amplitude equations.
struct Scaling {
    /// `(b − b0)/ε²`, equal to `b^c` exactly when `b0 = b^c`.
    d_over_e2: f64,
    delta: f64,
    e2: f64,
    amp: f64,
}

impl Scaling {
    fn new(m: &AmplitudeModel) -> Scaling {
        let e2 = m.eps * m.eps;
        let delta = m.params.b - m.b0;
        let d_over_e2 = if m.domain.is_none() { m.b_c } else { delta / e2 };
        let amp = if m.weight_delta == 1 { e2 } else { m.eps };
        Scaling {
            d_over_e2,
            delta,
            e2,
            amp,
        }
    }
}

fn scale_coefficients(kind: ModelKind, raw: &[RawTerm], sc: &Scaling, nu: Option<f64>) -> Result<Coefficients> {
    let get = |eq: usize, alpha: &[u8], d: u8| -> f64 {
        raw.iter()
            .find(|t| t.eq == eq && t.alpha == alpha && t.delta_pow == d)
            .map_or(0.0, |t| t.value)
    };
    let (dq, dl, e2) = (sc.d_over_e2, sc.delta, sc.e2);
    Ok(match kind {
        ModelKind::CubicSl => Coefficients::CubicSl {
            sigma: get(0, &[1], 1) * dq,
            l: -get(0, &[3], 0),
        },
        ModelKind::Gl => Coefficients::Gl {
            sigma: get(0, &[1], 1) * dq,
            l: -get(0, &[3], 0),
            nu: nu.ok_or(Error::DegenerateCoefficient("nu"))?,
        },
        ModelKind::QuinticSl => Coefficients::QuinticSl {
            sigma: (get(0, &[1], 1) + get(0, &[1], 2) * dl) * dq,
            l: -(get(0, &[3], 0) + get(0, &[3], 1) * dl),
            r: get(0, &[5], 0) * e2,
        },
        ModelKind::Coupled => Coefficients::Coupled {
            sigma: get(0, &[1, 0], 1) * dq,
            l1: -get(0, &[3, 0], 0),
            l2: -get(1, &[0, 3], 0),
            r1: get(0, &[1, 2], 0),
            r2: get(1, &[2, 1], 0),
        },
        ModelKind::Resonant => Coefficients::Resonant {
            sigma1: (get(0, &[1, 0], 1) + get(0, &[1, 0], 2) * dl) * dq,
            sigma2: (get(1, &[0, 1], 1) + get(1, &[0, 1], 2) * dl) * dq,
            l1: -(get(0, &[1, 1], 0) + get(0, &[1, 1], 1) * dl),
            l2: -(get(1, &[2, 0], 0) + get(1, &[2, 0], 1) * dl),
            r1: get(0, &[1, 2], 0) * e2,
            r2: get(1, &[2, 1], 0) * e2,
            s1: get(0, &[3, 0], 0) * e2,
            s2: get(1, &[0, 3], 0) * e2,
        },
    })
}

/// Terms (eq, α, β) consumed by each kind; used to audit truncation.
fn modeled_terms(kind: ModelKind) -> &'static [(usize, &'static [u8], u8)] {
    match kind {
        ModelKind::CubicSl | ModelKind::Gl => &[(0, &[1], 1), (0, &[3], 0)],
        ModelKind::QuinticSl => &[(0, &[1], 1), (0, &[1], 2), (0, &[3], 0), (0, &[3], 1), (0, &[5], 0)],
        ModelKind::Coupled => &[
            (0, &[1, 0], 1),
            (1, &[0, 1], 1),
            (0, &[3, 0], 0),
            (1, &[0, 3], 0),
            (0, &[1, 2], 0),
            (1, &[2, 1], 0),
        ],
        ModelKind::Resonant => &[
            (0, &[1, 0], 1),
            (0, &[1, 0], 2),
            (1, &[0, 1], 1),
            (1, &[0, 1], 2),
            (0, &[1, 1], 0),
            (0, &[1, 1], 1),
            (1, &[2, 0], 0),
            (1, &[2, 0], 1),
            (0, &[1, 2], 0),
            (1, &[2, 1], 0),
            (0, &[3, 0], 0),
            (1, &[0, 3], 0),
        ],
    }
}

/// Where and how the reduction is set up.
struct Setup {
    np: NondimParams,
    b_c: f64,
    b0: f64,
    k2: f64,
    metric: Metric,
    crit: Vec<(u32, u32)>,
    domain: Option<Domain>,
    unit_k: [f64; 2],
    eps: f64,
}

fn setup(np: &NondimParams, domain: Option<Domain>) -> Result<(Setup, Option<ModeSet>)> {
    let th = turing_threshold(np)?;
    let e2 = (np.b - th.b_turing) / th.b_turing;
    match domain {
        None => Ok((
            Setup {
                np: *np,
                b_c: th.b_turing,
                b0: th.b_turing,
                k2: th.kc2,
                metric: Metric {
                    ax: Ratio::from_integer(1),
                    ay: Ratio::from_integer(0),
                    scale: th.kc2,
                },
                crit: vec![(1, 0)],
                domain: None,
                unit_k: [th.kc2.sqrt(), 0.0],
                eps: e2.max(0.0).sqrt(),
            },
            None,
        )),
        Some(d) => {
            let ms = admissible_modes(np, d)?;
            let k2 = ms.k2_value();
            let b0 = neutral_b(np, k2)?;
            let pi = std::f64::consts::PI;
            Ok((
                Setup {
                    np: *np,
                    b_c: th.b_turing,
                    b0,
                    k2,
                    metric: Metric {
                        ax: d.lx().inv_sq(),
                        ay: d.ly().map_or(Ratio::from_integer(0), |l| l.inv_sq()),
                        scale: 1.0,
                    },
                    crit: ms.indices(),
                    domain: Some(d),
                    unit_k: [pi / d.lx().value(), d.ly().map_or(0.0, |l| pi / l.value())],
                    eps: e2.max(0.0).sqrt(),
                },
                Some(ms),
            ))
        }
    }
}

fn run(s: &Setup, kind: ModelKind, rho_scale: f64) -> Result<AmplitudeModel> {
    let (wd, wmax) = match kind {
        ModelKind::CubicSl | ModelKind::Gl | ModelKind::Coupled => (2, 3),
        ModelKind::QuinticSl => (2, 5),
        ModelKind::Resonant => (1, 3),
    };
    let problem = Problem {
        np0: s.np.with_b(s.b0),
        metric: s.metric,
        crit: s.crit.clone(),
        wd,
        wmax,
        rho_scale,
    };
    let ex: Expansion = problem.solve()?;
    let r = s.crit.len();
    let raw: Vec<RawTerm> = ex
        .g
        .iter()
        .enumerate()
        .flat_map(|(eq, gi)| {
            gi.iter().map(move |(mono, v)| RawTerm {
                eq,
                alpha: mono.a[..r].to_vec(),
                delta_pow: mono.d,
                value: *v,
            })
        })
        .collect();
    let mut field_terms = Vec::new();
    let mut keys: Vec<(&Mono, &(u32, u32))> = ex.w[0]
        .terms
        .iter()
        .chain(ex.w[1].terms.iter())
        .flat_map(|(m, f)| f.keys().map(move |md| (m, md)))
        .filter(|(m, _)| m.weight(wd) <= 2)
        .collect();
    keys.sort();
    keys.dedup();
    for (mono, md) in keys {
        let get = |c: usize| ex.w[c].terms.get(mono).and_then(|f| f.get(md)).copied().unwrap_or(0.0);
        field_terms.push(FieldTerm {
            alpha: mono.a[..r].to_vec(),
            delta_pow: mono.d,
            p: md.0,
            q: md.1,
            u: get(0),
            v: get(1),
        });
    }
    let m_crit = ex.lin.operator(s.k2);
    let (kr, ar) = ex.kernel.residuals(&m_crit);

    let nu = if kind == ModelKind::Gl {
        let np0 = s.np.with_b(s.b0);
        let kc = s.k2.sqrt();
        let d = ex.lin.d;
        let rho = ex.kernel.rho;
        let w21 = solve_harmonic(&np0, s.k2, [-2.0 * kc * d[0] * rho[0], -2.0 * kc * d[1] * rho[1]])?;
        let v = [
            2.0 * kc * d[0] * w21[0] + d[0] * rho[0],
            2.0 * kc * d[1] * w21[1] + d[1] * rho[1],
        ];
        Some((-dot(v, ex.kernel.psi_adj) / ex.kernel.pairing(), w21))
    } else {
        None
    };

    let used = modeled_terms(kind);
    let mut unmodeled: f64 = 0.0;
    let mut by_weight: BTreeMap<u32, f64> = BTreeMap::new();
    for t in &raw {
        let w = t.alpha.iter().map(|&x| u32::from(x)).sum::<u32>() + wd * u32::from(t.delta_pow);
        if used.iter().any(|(eq, a, d)| *eq == t.eq && *a == t.alpha.as_slice() && *d == t.delta_pow) {
            let e = by_weight.entry(w).or_insert(0.0);
            *e = e.max(t.value.abs());
        }
    }
    for t in &raw {
        if !used.iter().any(|(eq, a, d)| *eq == t.eq && *a == t.alpha.as_slice() && *d == t.delta_pow) {
            let w = t.alpha.iter().map(|&x| u32::from(x)).sum::<u32>() + wd * u32::from(t.delta_pow);
            let reference = by_weight.get(&w).copied().unwrap_or(1.0).max(f64::MIN_POSITIVE);
            unmodeled = unmodeled.max(t.value.abs() / reference);
        }
    }

    let mut model = AmplitudeModel {
        coefficients: Coefficients::CubicSl { sigma: 0.0, l: 0.0 },
        params: s.np,
        eps: s.eps,
        b_c: s.b_c,
        b0: s.b0,
        k2: s.k2,
        modes: s.crit.clone(),
        domain: s.domain,
        unit_k: s.unit_k,
        amplitude_scale: 0.0,
        weight_delta: wd,
        kernel: ex.kernel,
        w21: nu.map(|x| x.1),
        raw,
        field_terms,
        diagnostics: Diagnostics {
            kernel_residual: kr,
            adjoint_residual: ar,
            solvability_residual: ex.solvability_residual,
            unmodeled,
        },
    };
    let sc = Scaling::new(&model);
    if s.domain.is_some() && sc.e2 <= 0.0 {
        return Err(Error::BelowThreshold { b: s.np.b, b_c: s.b_c });
    }
    model.amplitude_scale = sc.amp;
    model.coefficients = scale_coefficients(kind, &model.raw, &sc, nu.map(|x| x.0))?;
    Ok(model)
}

/// Cubic Landau coefficient `L` of the unbounded problem at `b^c`.
///
/// `L > 0` means the bifurcation is supercritical.
pub fn landau_coefficient(np: &NondimParams) -> Result<f64> {
    let (s, _) = setup(np, None)?;
    let m = run(&s, ModelKind::CubicSl, 1.0)?;
    match m.coefficients {
        Coefficients::CubicSl { l, .. } => Ok(l),
        _ => unreachable!(),
    }
}

fn single_mode(ms: &Option<ModeSet>) -> Result<()> {
    match ms {
        Some(ms) if ms.multiplicity != 1 => Err(Error::ModeConfiguration(format!(
            "expected a simple eigenvalue, found multiplicity {}",
            ms.multiplicity
        ))),
        _ => Ok(()),
    }
}

/// Cubic Stuart-Landau equation; `domain = None` uses the critical mode `k_c`.
pub fn stuart_landau_coeffs(np: &NondimParams, domain: Option<Domain>) -> Result<AmplitudeModel> {
    let (s, ms) = setup(np, domain)?;
    single_mode(&ms)?;
    run(&s, ModelKind::CubicSl, 1.0)
}

/// Ginzburg-Landau equation for a slowly modulated `cos(k_c x)` pattern.
pub fn ginzburg_landau_coeffs(np: &NondimParams) -> Result<AmplitudeModel> {
    let (s, _) = setup(np, None)?;
    run(&s, ModelKind::Gl, 1.0)
}

/// Quintic Stuart-Landau equation, for subcritical parameters.
pub fn quintic_coeffs(np: &NondimParams, domain: Option<Domain>) -> Result<AmplitudeModel> {
    let (s, ms) = setup(np, domain)?;
    single_mode(&ms)?;
    let cubic = run(&s, ModelKind::CubicSl, 1.0)?;
    if let Coefficients::CubicSl { l, .. } = cubic.coefficients {
        if l >= 0.0 {
            return Err(Error::NotSubcritical { l });
        }
    }
    run(&s, ModelKind::QuinticSl, 1.0)
}

/// Two coupled Landau equations for a non-resonant double eigenvalue.
pub fn coupled_landau_coeffs(np: &NondimParams, domain: Domain) -> Result<AmplitudeModel> {
    let (s, ms) = setup(np, Some(domain))?;
    let ms = ms.expect("domain given");
    if ms.multiplicity != 2 {
        return Err(Error::ModeConfiguration(format!("expected multiplicity 2, found {}", ms.multiplicity)));
    }
    if ms.resonance == Resonance::Resonant {
        return Err(Error::Resonant);
    }
    run(&s, ModelKind::Coupled, 1.0)
}

/// Resonant (hexagonal) amplitude system; mode 2 is the pure harmonic `(2φ₁, 0)`.
pub fn resonant_coeffs(np: &NondimParams, domain: Domain) -> Result<AmplitudeModel> {
    let (mut s, ms) = setup(np, Some(domain))?;
    let ms = ms.expect("domain given");
    if ms.multiplicity != 2 || ms.resonance != Resonance::Resonant {
        return Err(Error::NotResonant);
    }
    let (a, b) = (s.crit[0], s.crit[1]);
    let harmonic_of = |i: (u32, u32), j: (u32, u32)| (i.0 == 2 * j.0 && i.1 == 0) || (i.0 == 0 && i.1 == 2 * j.1);
    if harmonic_of(a, b) {
        s.crit = vec![b, a];
    }
    run(&s, ModelKind::Resonant, 1.0)
}

/// Dispatches on `kind`; `domain` is required for the two-mode kinds.
pub fn amplitude_model(np: &NondimParams, kind: ModelKind, domain: Option<Domain>) -> Result<AmplitudeModel> {
    match kind {
        ModelKind::CubicSl => stuart_landau_coeffs(np, domain),
        ModelKind::Gl => ginzburg_landau_coeffs(np),
        ModelKind::QuinticSl => quintic_coeffs(np, domain),
        ModelKind::Coupled => coupled_landau_coeffs(
            np,
            domain.ok_or_else(|| Error::Config("coupled model needs a 2D domain".into()))?,
        ),
        ModelKind::Resonant => resonant_coeffs(
            np,
            domain.ok_or_else(|| Error::Config("resonant model needs a 2D domain".into()))?,
        ),
    }
}

/// Saddle-node value `b^s` of the quintic equation: where the two
/// nonzero `A²` roots of `σ̄ − L̄A² + R̄A⁴ = 0` coalesce.
pub fn quintic_saddle_node(model: &AmplitudeModel) -> Result<f64> {
    if model.kind() != ModelKind::QuinticSl {
        return Err(Error::ModeConfiguration("saddle-node needs a quintic model".into()));
    }
    let g1 = model.raw_value(0, &[1], 1);
    let g2 = model.raw_value(0, &[1], 2);
    let g3 = model.raw_value(0, &[3], 0);
    let g4 = model.raw_value(0, &[3], 1);
    let g5 = model.raw_value(0, &[5], 0);
    // In the unscaled amplitude a = εA: (g3 + g4 δ)² = 4 g5 (g1 δ + g2 δ²).
    let f = |d: f64| (g3 + g4 * d).powi(2) - 4.0 * g5 * (g1 * d + g2 * d * d);
    if !(g3 > 0.0 && g5 < 0.0 && g1 > 0.0) {
        return Err(Error::NoSaddleNode);
    }
    let mut lo = 0.0;
    let mut hi = -1e-6 * model.b0.abs().max(1.0);
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        if model.b0 + hi <= 0.0 {
            return Err(Error::NoSaddleNode);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(model.b0 + 0.5 * (lo + hi))
}

/// Approximate pattern `(u, v)` rebuilt from amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    pub steady: (f64, f64),
    pub unit_k: [f64; 2],
    /// `(p, q, u-coefficient, v-coefficient)` of `cos(p k_x x) cos(q k_y y)`.
    pub terms: Vec<(u32, u32, f64, f64)>,
}

impl Reconstruction {
    pub fn eval(&self, x: f64, y: f64) -> (f64, f64) {
        let (mut u, mut v) = self.steady;
        for &(p, q, cu, cv) in &self.terms {
            let c = (f64::from(p) * self.unit_k[0] * x).cos() * (f64::from(q) * self.unit_k[1] * y).cos();
            u += cu * c;
            v += cv * c;
        }
        (u, v)
    }

    pub fn coefficient(&self, p: u32, q: u32) -> (f64, f64) {
        self.terms
            .iter()
            .find(|t| t.0 == p && t.1 == q)
            .map_or((0.0, 0.0), |t| (t.2, t.3))
    }
}

/// Steady state plus the expansion `w(a, δ)` truncated at the given weight.
///
/// `amplitudes` are the scaled `A_i`; for the cubic scalings order 1 is the
/// `ε ρ A cos(..)` term and order 2 adds the `ε²` harmonics.
pub fn wnl_solution(model: &AmplitudeModel, amplitudes: &[f64], order: u32) -> Result<Reconstruction> {
    let r = model.modes.len();
    if amplitudes.len() != r || r > MAX_R {
        return Err(Error::ModeConfiguration(format!(
            "expected {r} amplitudes, got {}",
            amplitudes.len()
        )));
    }
    let a: Vec<f64> = amplitudes.iter().map(|x| x * model.amplitude_scale).collect();
    let delta = model.params.b - model.b0;
    let mut acc: BTreeMap<(u32, u32), (f64, f64)> = BTreeMap::new();
    for t in &model.field_terms {
        let w = t.alpha.iter().map(|&x| u32::from(x)).sum::<u32>() + model.weight_delta * u32::from(t.delta_pow);
        if w > order {
            continue;
        }
        let mut c = delta.powi(i32::from(t.delta_pow));
        for (ai, &e) in a.iter().zip(&t.alpha) {
            c *= ai.powi(i32::from(e));
        }
        let e = acc.entry((t.p, t.q)).or_insert((0.0, 0.0));
        e.0 += c * t.u;
        e.1 += c * t.v;
    }
    let ss = model.params.steady_state();
    Ok(Reconstruction {
        steady: (ss.u_bar, ss.v_bar),
        unit_k: model.unit_k,
        terms: acc.into_iter().map(|((p, q), (u, v))| (p, q, u, v)).collect(),
    })
}

#[cfg(test)]
mod tests;
