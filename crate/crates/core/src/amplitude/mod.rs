//! Integration and equilibria of the amplitude equations.

mod diagram;
mod gl;
pub mod ode;

pub use diagram::{hysteresis_sweep, quintic_diagram, BifurcationDiagram, Branch, BranchPoint, HysteresisPoint};
pub use gl::{integrate_gl, GlGrid, GlSnapshot};
pub use ode::{OdeEnd, OdeOptions};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wnl::Coefficients;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeState {
    pub t: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub states: Vec<AmplitudeState>,
    pub end: OdeEnd,
}

impl Trajectory {
    pub fn last(&self) -> &AmplitudeState {
        self.states.last().expect("trajectory has the initial state")
    }

    pub fn diverged(&self) -> bool {
        matches!(self.end, OdeEnd::Diverged { .. })
    }

    pub fn to_csv(&self) -> String {
        let dim = self.states.first().map_or(0, |s| s.values.len());
        let mut s = String::from("T");
        for i in 1..=dim {
            s.push_str(&format!(",A{i}"));
        }
        s.push('\n');
        for st in &self.states {
            s.push_str(&format!("{:.12e}", st.t));
            for v in &st.values {
                s.push_str(&format!(",{v:.12e}"));
            }
            s.push('\n');
        }
        s
    }
}

/// Integrates the ODE form of the amplitude equation, recording every `record_dt`.
/// With `record_dt = 0` only the initial and final states are kept.
pub fn integrate_amplitude(
    coeffs: &Coefficients,
    init: &[f64],
    t_end: f64,
    record_dt: f64,
    opts: &OdeOptions,
) -> Result<Trajectory> {
    if init.len() != coeffs.dimension() {
        return Err(Error::ModeConfiguration(format!(
            "expected {} initial values, got {}",
            coeffs.dimension(),
            init.len()
        )));
    }
    let stops: Vec<f64> = if record_dt > 0.0 {
        (1..).map(|i| i as f64 * record_dt).take_while(|&t| t < t_end).collect()
    } else {
        Vec::new()
    };
    let mut states = vec![AmplitudeState {
        t: 0.0,
        values: init.to_vec(),
    }];
    let (_, end) = ode::dopri5(
        |_, a, d| coeffs.rhs(a, d),
        0.0,
        init,
        t_end,
        opts,
        &stops,
        |t, y| states.push(AmplitudeState { t, values: y.to_vec() }),
    )?;
    Ok(Trajectory { states, end })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
    Saddle,
    Marginal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Equilibrium {
    pub label: String,
    pub values: Vec<f64>,
    pub stability: Stability,
    pub eigenvalues: Vec<Complex64>,
    /// Max over equations of `|rhs|` divided by the sum of the magnitudes of its terms.
    pub residual: f64,
}

const MARGINAL: f64 = 1e-10;

fn classify(coeffs: &Coefficients, label: &str, values: Vec<f64>) -> Equilibrium {
    let j = coeffs.jacobian(&values);
    let eigenvalues = if j.len() == 1 {
        vec![Complex64::new(j[0], 0.0)]
    } else {
        let tr = j[0] + j[3];
        let det = j[0] * j[3] - j[1] * j[2];
        crate::linstab::quadratic_roots(-tr, det).to_vec()
    };
    let scale = j.iter().map(|x| x.abs()).fold(1.0, f64::max);
    let signs: Vec<i8> = eigenvalues
        .iter()
        .map(|e| {
            if e.re.abs() <= MARGINAL * scale {
                0
            } else if e.re < 0.0 {
                -1
            } else {
                1
            }
        })
        .collect();
    let stability = if signs.contains(&0) {
        Stability::Marginal
    } else if signs.iter().all(|&s| s < 0) {
        Stability::Stable
    } else if signs.iter().all(|&s| s > 0) {
        Stability::Unstable
    } else {
        Stability::Saddle
    };
    Equilibrium {
        label: label.to_string(),
        residual: relative_residual(coeffs, &values),
        values,
        stability,
        eigenvalues,
    }
}

/// `A∞ = √(σ/L)` of the cubic equation (or of the uniform GL state).
pub fn sl_equilibrium(coeffs: &Coefficients) -> Result<Equilibrium> {
    let (sigma, l) = match *coeffs {
        Coefficients::CubicSl { sigma, l } | Coefficients::Gl { sigma, l, .. } => (sigma, l),
        _ => return Err(Error::ModeConfiguration("not a cubic model".into())),
    };
    if sigma == 0.0 {
        return Ok(classify(coeffs, "A_inf", vec![0.0]));
    }
    if l == 0.0 {
        return Err(Error::DegenerateCoefficient("L"));
    }
    let ratio = sigma / l;
    if ratio < 0.0 {
        return Err(Error::NoEquilibrium { ratio });
    }
    Ok(classify(coeffs, "A_inf", vec![ratio.sqrt()]))
}

/// Origin and the nonzero roots of `σ − L A² + R A⁴ = 0`.
pub fn quintic_equilibria(coeffs: &Coefficients) -> Result<Vec<Equilibrium>> {
    let Coefficients::QuinticSl { sigma, l, r } = *coeffs else {
        return Err(Error::ModeConfiguration("not a quintic model".into()));
    };
    let mut out = vec![classify(coeffs, "O", vec![0.0])];
    let mut ys: Vec<f64> = Vec::new();
    if r == 0.0 {
        if l != 0.0 {
            ys.push(sigma / l);
        }
    } else {
        let disc = l * l - 4.0 * r * sigma;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            ys.push((l - sq) / (2.0 * r));
            ys.push((l + sq) / (2.0 * r));
        }
    }
    ys.retain(|&y| y > 0.0);
    ys.sort_by(|a, b| a.total_cmp(b));
    for (i, y) in ys.iter().enumerate() {
        let a = polish(coeffs, vec![y.sqrt()]);
        out.push(classify(coeffs, &format!("A{}+", i + 1), a.clone()));
        out.push(classify(coeffs, &format!("A{}-", i + 1), vec![-a[0]]));
    }
    Ok(out)
}

/// Origin, the four rhombic axis states and the mixed modes of the coupled system.
pub fn coupled_equilibria(coeffs: &Coefficients) -> Result<Vec<Equilibrium>> {
    let Coefficients::Coupled { sigma, l1, l2, r1, r2 } = *coeffs else {
        return Err(Error::ModeConfiguration("not a coupled model".into()));
    };
    let mut out = vec![classify(coeffs, "O", vec![0.0, 0.0])];
    if l1 != 0.0 && sigma / l1 > 0.0 {
        let a = (sigma / l1).sqrt();
        out.push(classify(coeffs, "X+", vec![a, 0.0]));
        out.push(classify(coeffs, "X-", vec![-a, 0.0]));
    }
    if l2 != 0.0 && sigma / l2 > 0.0 {
        let a = (sigma / l2).sqrt();
        out.push(classify(coeffs, "Y+", vec![0.0, a]));
        out.push(classify(coeffs, "Y-", vec![0.0, -a]));
    }
    // L1 X − R1 Y = σ,  −R2 X + L2 Y = σ  with X = A₁², Y = A₂²
    let det = l1 * l2 - r1 * r2;
    if det != 0.0 {
        let x = sigma * (l2 + r1) / det;
        let y = sigma * (l1 + r2) / det;
        if x > 0.0 && y > 0.0 {
            for (sx, sy, tag) in [(1.0, 1.0, "++"), (1.0, -1.0, "+-"), (-1.0, 1.0, "-+"), (-1.0, -1.0, "--")] {
                let v = polish(coeffs, vec![sx * x.sqrt(), sy * y.sqrt()]);
                out.push(classify(coeffs, &format!("M{tag}"), v));
            }
        }
    }
    Ok(out)
}

/// Real roots of `c3 x³ + c2 x² + c1 x + c0`, ascending, Newton-polished.
pub fn cubic_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    let scale = c3.abs().max(c2.abs()).max(c1.abs()).max(c0.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    let mut roots = if c3.abs() <= 1e-14 * scale {
        if c2.abs() <= 1e-14 * scale {
            if c1 == 0.0 { vec![] } else { vec![-c0 / c1] }
        } else {
            let d = c1 * c1 - 4.0 * c2 * c0;
            if d < 0.0 {
                vec![]
            } else {
                let q = -0.5 * (c1 + c1.signum() * d.sqrt());
                let mut v = Vec::new();
                if q != 0.0 {
                    v.push(q / c2);
                    v.push(c0 / q);
                } else {
                    v.push(0.0);
                }
                v
            }
        }
    } else {
        let (a, b, c) = (c2 / c3, c1 / c3, c0 / c3);
        let p = b - a * a / 3.0;
        let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
        let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
        let shift = -a / 3.0;
        if disc > 0.0 {
            let s = disc.sqrt();
            vec![(-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt() + shift]
        } else {
            let r = (-p / 3.0).max(0.0).sqrt();
            let arg = if r == 0.0 { 0.0 } else { (-q / (2.0 * r * r * r)).clamp(-1.0, 1.0) };
            let phi = arg.acos();
            (0..3)
                .map(|k| 2.0 * r * ((phi - 2.0 * std::f64::consts::PI * f64::from(k)) / 3.0).cos() + shift)
                .collect()
        }
    };
    for x in roots.iter_mut() {
        for _ in 0..8 {
            let f = ((c3 * *x + c2) * *x + c1) * *x + c0;
            let df = (3.0 * c3 * *x + 2.0 * c2) * *x + c1;
            if df == 0.0 {
                break;
            }
            let dx = f / df;
            *x -= dx;
            if dx.abs() <= 1e-16 * x.abs() {
                break;
            }
        }
    }
    roots.sort_by(|a, b| a.total_cmp(b));
    roots
}

/// `R±` rolls and the hexagon roots `H±ᵢ` (numbered by ascending `A₂`).
pub fn hexagon_equilibria(coeffs: &Coefficients) -> Result<Vec<Equilibrium>> {
    let Coefficients::Resonant { sigma1, sigma2, l1, l2, r1, r2, s1, s2 } = *coeffs else {
        return Err(Error::ModeConfiguration("not a resonant model".into()));
    };
    if s1 == 0.0 {
        return Err(Error::DegenerateCoefficient("S1"));
    }
    if s2 == 0.0 {
        return Err(Error::DegenerateCoefficient("S2"));
    }
    let mut out = vec![classify(coeffs, "O", vec![0.0, 0.0])];
    let rr = -sigma2 / s2;
    if rr > 0.0 {
        out.push(classify(coeffs, "R+", vec![0.0, rr.sqrt()]));
        out.push(classify(coeffs, "R-", vec![0.0, -rr.sqrt()]));
    }
    let roots = cubic_roots(s1 * s2 - r1 * r2, l1 * r2 + l2 * r1, s1 * sigma2 - l1 * l2 - r2 * sigma1, l2 * sigma1);
    for (i, a2) in roots.iter().enumerate() {
        let a1sq = (-r1 * a2 * a2 + l1 * a2 - sigma1) / s1;
        if a1sq < 0.0 {
            continue;
        }
        for (sign, tag) in [(1.0, "+"), (-1.0, "-")] {
            let v = polish(coeffs, vec![sign * a1sq.sqrt(), *a2]);
            out.push(classify(coeffs, &format!("H{}{tag}", i + 1), v));
        }
    }
    Ok(out)
}

/// All equilibria of whichever system `coeffs` describes.
pub fn equilibria(coeffs: &Coefficients) -> Result<Vec<Equilibrium>> {
    match coeffs {
        Coefficients::CubicSl { .. } | Coefficients::Gl { .. } => {
            let mut v = vec![classify(coeffs, "O", vec![0.0])];
            if let Ok(e) = sl_equilibrium(coeffs) {
                if e.values[0] != 0.0 {
                    let neg = classify(coeffs, "A_inf-", vec![-e.values[0]]);
                    v.push(e);
                    v.push(neg);
                }
            }
            Ok(v)
        }
        Coefficients::QuinticSl { .. } => quintic_equilibria(coeffs),
        Coefficients::Coupled { .. } => coupled_equilibria(coeffs),
        Coefficients::Resonant { .. } => hexagon_equilibria(coeffs),
    }
}

fn abs_coefficients(c: &Coefficients) -> Coefficients {
    match *c {
        Coefficients::CubicSl { sigma, l } => Coefficients::CubicSl { sigma: sigma.abs(), l: -l.abs() },
        Coefficients::Gl { sigma, l, nu } => Coefficients::Gl { sigma: sigma.abs(), l: -l.abs(), nu },
        Coefficients::QuinticSl { sigma, l, r } => Coefficients::QuinticSl {
            sigma: sigma.abs(),
            l: -l.abs(),
            r: r.abs(),
        },
        Coefficients::Coupled { sigma, l1, l2, r1, r2 } => Coefficients::Coupled {
            sigma: sigma.abs(),
            l1: -l1.abs(),
            l2: -l2.abs(),
            r1: r1.abs(),
            r2: r2.abs(),
        },
        Coefficients::Resonant { sigma1, sigma2, l1, l2, r1, r2, s1, s2 } => Coefficients::Resonant {
            sigma1: sigma1.abs(),
            sigma2: sigma2.abs(),
            l1: -l1.abs(),
            l2: -l2.abs(),
            r1: r1.abs(),
            r2: r2.abs(),
            s1: s1.abs(),
            s2: s2.abs(),
        },
    }
}

/// Stationarity residual scaled by term size, so large-amplitude roots are judged fairly.
pub fn relative_residual(coeffs: &Coefficients, values: &[f64]) -> f64 {
    let n = values.len();
    let (mut r, mut m) = (vec![0.0; n], vec![0.0; n]);
    coeffs.rhs(values, &mut r);
    let av: Vec<f64> = values.iter().map(|x| x.abs()).collect();
    abs_coefficients(coeffs).rhs(&av, &mut m);
    r.iter()
        .zip(&m)
        .map(|(r, m)| if *m == 0.0 { r.abs() } else { r.abs() / m })
        .fold(0.0, f64::max)
}

/// Newton refinement of a stationary point (keeps exact zeros).
fn polish(coeffs: &Coefficients, mut x: Vec<f64>) -> Vec<f64> {
    let n = x.len();
    let mut r = vec![0.0; n];
    for _ in 0..20 {
        coeffs.rhs(&x, &mut r);
        let j = coeffs.jacobian(&x);
        let dx = if n == 1 {
            if j[0] == 0.0 {
                break;
            }
            vec![r[0] / j[0]]
        } else {
            match crate::linstab::solve2(&[[j[0], j[1]], [j[2], j[3]]], [r[0], r[1]]) {
                Some(d) => d.to_vec(),
                None => break,
            }
        };
        let mut small = true;
        for i in 0..n {
            if x[i] != 0.0 {
                x[i] -= dx[i];
                small &= dx[i].abs() <= 1e-15 * x[i].abs();
            }
        }
        if small {
            break;
        }
    }
    x
}
