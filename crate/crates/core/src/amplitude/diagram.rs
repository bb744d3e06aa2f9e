//! Bifurcation diagram and hysteresis trace of the quintic reduction,
//! both in the unscaled amplitude `a` (so they do not depend on ε).

use serde::{Deserialize, Serialize};

use super::ode::{dopri5, OdeOptions};
use super::Stability;
use crate::error::{Error, Result};
use crate::wnl::{quintic_saddle_node, AmplitudeModel, ModelKind};

/// `ȧ = c1 a + c3 a³ + c5 a⁵` at a given `b`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Unscaled {
    c1: f64,
    c3: f64,
    c5: f64,
}

impl Unscaled {
    fn at(model: &AmplitudeModel, b: f64) -> Self {
        let d = b - model.b0;
        let g = |a: u8, p: u8| model.raw_value(0, &[a], p);
        Self {
            c1: g(1, 1) * d + g(1, 2) * d * d,
            c3: g(3, 0) + g(3, 1) * d,
            c5: g(5, 0),
        }
    }

    fn rhs(&self, a: f64) -> f64 {
        let a2 = a * a;
        a * (self.c1 + a2 * (self.c3 + a2 * self.c5))
    }

    fn slope(&self, a: f64) -> f64 {
        let a2 = a * a;
        self.c1 + a2 * (3.0 * self.c3 + 5.0 * a2 * self.c5)
    }

    /// Positive roots of `c1 + c3 y + c5 y² = 0` in `y = a²`, ascending.
    fn squared_roots(&self) -> Vec<f64> {
        let mut ys = Vec::new();
        if self.c5 == 0.0 {
            if self.c3 != 0.0 {
                ys.push(-self.c1 / self.c3);
            }
        } else {
            let disc = self.c3 * self.c3 - 4.0 * self.c5 * self.c1;
            if disc >= 0.0 {
                let s = disc.sqrt();
                let q = -0.5 * (self.c3 + self.c3.signum() * s);
                if q != 0.0 {
                    ys.push(q / self.c5);
                    ys.push(self.c1 / q);
                }
            }
        }
        ys.retain(|&y| y > 0.0 && y.is_finite());
        ys.sort_by(|a, b| a.total_cmp(b));
        ys
    }
}

fn stability_of(slope: f64, scale: f64) -> Stability {
    if slope.abs() <= 1e-10 * scale.max(1.0) {
        Stability::Marginal
    } else if slope < 0.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchPoint {
    pub b: f64,
    /// Unscaled amplitude `a ≥ 0` of the critical mode.
    pub amplitude: f64,
    pub stability: Stability,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub label: String,
    pub points: Vec<BranchPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationDiagram {
    pub b_c: f64,
    pub b_s: Option<f64>,
    pub branches: Vec<Branch>,
}

impl BifurcationDiagram {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("branch,b,amplitude,stability\n");
        for br in &self.branches {
            for p in &br.points {
                s.push_str(&format!(
                    "{},{:.12e},{:.12e},{}\n",
                    br.label,
                    p.b,
                    p.amplitude,
                    serde_json::to_value(p.stability).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
                ));
            }
        }
        s
    }

    pub fn branch(&self, label: &str) -> Option<&Branch> {
        self.branches.iter().find(|b| b.label == label)
    }
}

fn require_quintic(model: &AmplitudeModel) -> Result<()> {
    if model.kind() == ModelKind::QuinticSl {
        Ok(())
    } else {
        Err(Error::ModeConfiguration("needs a quintic model".into()))
    }
}

/// Origin, lower (unstable) and upper (large-amplitude) branches sampled at `bs`.
/// The ± symmetric copies are implied.
pub fn quintic_diagram(model: &AmplitudeModel, bs: &[f64]) -> Result<BifurcationDiagram> {
    require_quintic(model)?;
    let b_s = match quintic_saddle_node(model) {
        Ok(b) => Some(b),
        Err(Error::NoSaddleNode) => None,
        Err(e) => return Err(e),
    };
    let mut origin = Branch {
        label: "origin".into(),
        points: Vec::new(),
    };
    let mut lower = Branch {
        label: "lower".into(),
        points: Vec::new(),
    };
    let mut upper = Branch {
        label: "upper".into(),
        points: Vec::new(),
    };
    for &b in bs {
        let c = Unscaled::at(model, b);
        let scale = c.c1.abs() + c.c3.abs() + c.c5.abs();
        origin.points.push(BranchPoint {
            b,
            amplitude: 0.0,
            stability: stability_of(c.c1, scale),
            residual: 0.0,
        });
        let ys = c.squared_roots();
        let mut roots: Vec<f64> = ys.iter().map(|y| polish(&c, y.sqrt())).collect();
        roots.sort_by(|a, b| a.total_cmp(b));
        let push = |br: &mut Branch, a: f64| {
            br.points.push(BranchPoint {
                b,
                amplitude: a,
                stability: stability_of(c.slope(a), scale),
                residual: c.rhs(a).abs(),
            })
        };
        match roots.as_slice() {
            [a] => {
                if c.slope(*a) < 0.0 {
                    push(&mut upper, *a)
                } else {
                    push(&mut lower, *a)
                }
            }
            [a1, a2] => {
                push(&mut lower, *a1);
                push(&mut upper, *a2);
            }
            _ => {}
        }
    }
    Ok(BifurcationDiagram {
        b_c: model.b_c,
        b_s,
        branches: vec![origin, lower, upper],
    })
}

fn polish(c: &Unscaled, mut a: f64) -> f64 {
    for _ in 0..20 {
        let s = c.slope(a);
        if s == 0.0 {
            break;
        }
        let da = c.rhs(a) / s;
        a -= da;
        if da.abs() <= 1e-16 * a.abs() {
            break;
        }
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HysteresisPoint {
    pub t: f64,
    pub b: f64,
    pub amplitude: f64,
}

/// Holds `b` at each value of `path` for `dwell` time units and integrates the
/// unscaled quintic equation. Before each segment the amplitude is kept at least
/// `noise` in magnitude, standing in for the fluctuations that seed the pattern.
pub fn hysteresis_sweep(
    model: &AmplitudeModel,
    path: &[f64],
    dwell: f64,
    noise: f64,
    samples_per_segment: usize,
) -> Result<Vec<HysteresisPoint>> {
    require_quintic(model)?;
    if !(dwell > 0.0) {
        return Err(Error::domain("dwell", dwell, "must be positive"));
    }
    let samples = samples_per_segment.max(1);
    let opts = OdeOptions::default();
    let mut a = noise.abs();
    let mut t0 = 0.0;
    let mut out = Vec::with_capacity(path.len() * samples);
    for &b in path {
        let c = Unscaled::at(model, b);
        if a.abs() < noise {
            a = noise.abs();
        }
        let stops: Vec<f64> = (1..samples).map(|i| t0 + dwell * i as f64 / samples as f64).collect();
        let (y, end) = dopri5(
            |_, y, d| d[0] = c.rhs(y[0]),
            t0,
            &[a],
            t0 + dwell,
            &opts,
            &stops,
            |t, y| out.push(HysteresisPoint { t, b, amplitude: y[0].abs() }),
        )?;
        if let super::OdeEnd::Diverged { t } = end {
            return Err(Error::NonFinite { t });
        }
        a = y[0];
        t0 += dwell;
    }
    Ok(out)
}
