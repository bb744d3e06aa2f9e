//! Explicit adaptive time integration of the semi-discrete system.

use serde::{Deserialize, Serialize};

use super::ops::Rhs;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Integrator {
    /// Second-order Runge–Kutta–Chebyshev, stages chosen from the spectral radius.
    #[default]
    Rkc,
    /// Bogacki–Shampine 3(2) with the diffusive CFL cap.
    Bs23,
}

impl std::str::FromStr for Integrator {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rkc" => Ok(Integrator::Rkc),
            "bs23" => Ok(Integrator::Bs23),
            _ => Err(Error::Config(format!("unknown integrator '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepControl {
    pub integrator: Integrator,
    pub rtol: f64,
    pub atol: f64,
    /// CFL safety factor in `(0, 1]` for the Bogacki–Shampine path.
    pub cfl_safety: f64,
    pub max_stages: usize,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            integrator: Integrator::Rkc,
            rtol: 1e-6,
            atol: 1e-9,
            cfl_safety: 0.4,
            max_stages: 400,
            max_steps: 50_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

pub(crate) struct Stepper<'a> {
    pub rhs: &'a mut Rhs,
    pub ctl: StepControl,
    pub cfl_h2: f64,
    pub dim: usize,
    pub stats: StepStats,
    n2: usize,
    f0: Vec<f64>,
    f1: Vec<f64>,
    k: [Vec<f64>; 4],
    y1: Vec<f64>,
    yj: Vec<f64>,
    yjm1: Vec<f64>,
    yjm2: Vec<f64>,
    fsal_valid: bool,
}

impl<'a> Stepper<'a> {
    pub fn new(rhs: &'a mut Rhs, ctl: StepControl, cfl_h2: f64, dim: usize) -> Self {
        let len = rhs.state_len();
        let z = || vec![0.0; len];
        Self {
            n2: len - 1,
            rhs,
            ctl,
            cfl_h2,
            dim,
            stats: StepStats::default(),
            f0: z(),
            f1: z(),
            k: [z(), z(), z(), z()],
            y1: z(),
            yj: z(),
            yjm1: z(),
            yjm2: z(),
            fsal_valid: false,
        }
    }

    fn eval(&mut self, y: &[f64], out_idx: Out) {
        self.stats.evaluations += 1;
        let out = match out_idx {
            Out::F0 => &mut self.f0,
            Out::F1 => &mut self.f1,
            Out::K(i) => &mut self.k[i],
        };
        self.rhs.eval(y, out);
    }

    fn err_norm(&self, y: &[f64], ynew: &[f64], e: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n2 {
            let sc = self.ctl.atol + self.ctl.rtol * y[i].abs().max(ynew[i].abs());
            let r = e[i] / sc;
            s += r * r;
        }
        (s / self.n2 as f64).sqrt()
    }

    /// Advances `y` from `t` to `t_end` (exactly), with `dt` carried between calls.
    pub fn advance(&mut self, y: &mut Vec<f64>, t: &mut f64, t_end: f64, dt: &mut f64) -> Result<()> {
        if !self.fsal_valid {
            let y0 = y.clone();
            self.eval(&y0, Out::F0);
            self.fsal_valid = true;
        }
        if *dt <= 0.0 {
            let num: f64 = (0..self.n2).map(|i| (self.f0[i] / (self.ctl.atol + self.ctl.rtol * y[i].abs())).powi(2)).sum();
            let fn_ = (num / self.n2 as f64).sqrt();
            *dt = if fn_ > 0.0 { (0.05 / fn_).min(1.0) } else { 1.0 };
            *dt = dt.max(1e-8);
        }
        while *t < t_end {
            if self.stats.accepted + self.stats.rejected >= self.ctl.max_steps {
                return Err(Error::StepSizeUnderflow { t: *t, dt: *dt });
            }
            let mut h = *dt;
            if self.ctl.integrator == Integrator::Bs23 {
                let cap = self.ctl.cfl_safety * self.cfl_h2 / (2.0 * self.dim as f64 * self.rhs.max_diffusivity(y));
                h = h.min(cap);
            }
            if *t + h >= t_end {
                h = t_end - *t;
            }
            if h <= 1e-13 * t.abs().max(1.0) {
                return Err(Error::StepSizeUnderflow { t: *t, dt: h });
            }
            let (err, order) = match self.ctl.integrator {
                Integrator::Rkc => {
                    // The damped Chebyshev region is thin off the real axis, so the
                    // (complex) kinetics eigenvalues must stay near the origin.
                    h = h.min(self.rhs.reaction_step_limit(y));
                    let mut s = self.stages(y, h);
                    if s > self.ctl.max_stages {
                        // Too stiff for one step of this size: shrink until the stage budget fits.
                        let rho = self.rhs.spectral_radius(y);
                        let hmax = ((self.ctl.max_stages as f64 - 1.0).powi(2) - 1.0) / (1.54 * rho);
                        h = h.min(hmax);
                        s = self.ctl.max_stages;
                    }
                    self.rkc_step(y, h, s);
                    (self.rkc_error(y, h), 2.0)
                }
                Integrator::Bs23 => {
                    self.bs23_step(y, h);
                    let e = std::mem::take(&mut self.yjm2);
                    let r = self.err_norm(y, &self.y1, &e);
                    self.yjm2 = e;
                    (r, 3.0)
                }
            };
            let full = h >= t_end - *t;
            if err.is_finite() && err <= 1.0 {
                self.stats.accepted += 1;
                *t = if full { t_end } else { *t + h };
                std::mem::swap(y, &mut self.y1);
                std::mem::swap(&mut self.f0, &mut self.f1);
                let n = self.n2;
                if y[..n].iter().any(|x| !x.is_finite()) {
                    return Err(Error::NonFinite { t: *t });
                }
                let min = y[..n].iter().copied().fold(f64::INFINITY, f64::min);
                if min <= 0.0 {
                    return Err(Error::Positivity { t: *t, min });
                }
            } else {
                self.stats.rejected += 1;
            }
            let fac = if !err.is_finite() {
                0.1
            } else if err == 0.0 {
                10.0
            } else {
                (0.8 * err.powf(-1.0 / order)).clamp(0.1, 10.0)
            };
            let accepted = err.is_finite() && err <= 1.0;
            let new_h = h * if accepted { fac } else { fac.min(0.9) };
            // Keep the step carried over from a truncated final step.
            *dt = if accepted && full && new_h < *dt { *dt } else { new_h };
        }
        Ok(())
    }

    fn stages(&self, y: &[f64], h: f64) -> usize {
        let rho = self.rhs.spectral_radius(y);
        (1 + (1.0 + 1.54 * h * rho).sqrt() as usize).max(2)
    }

    /// One RKC2 step with damping `2/13`; writes `y1` and `f1 = F(y1)`.
    fn rkc_step(&mut self, y: &[f64], h: f64, s: usize) {
        let w0 = 1.0 + 2.0 / (13.0 * (s * s) as f64);
        // Chebyshev T_j, T_j', T_j'' at w0.
        let mut t = vec![0.0; s + 1];
        let mut tp = vec![0.0; s + 1];
        let mut tpp = vec![0.0; s + 1];
        t[0] = 1.0;
        t[1] = w0;
        tp[1] = 1.0;
        for j in 2..=s {
            t[j] = 2.0 * w0 * t[j - 1] - t[j - 2];
            tp[j] = 2.0 * t[j - 1] + 2.0 * w0 * tp[j - 1] - tp[j - 2];
            tpp[j] = 4.0 * tp[j - 1] + 2.0 * w0 * tpp[j - 1] - tpp[j - 2];
        }
        let w1 = tp[s] / tpp[s];
        let b: Vec<f64> = (0..=s)
            .map(|j| {
                let jj = j.max(2);
                tpp[jj] / (tp[jj] * tp[jj])
            })
            .collect();
        let a: Vec<f64> = (0..=s).map(|j| 1.0 - b[j] * t[j]).collect();
        let len = y.len();
        let mu1 = b[1] * w1;
        self.yjm2.copy_from_slice(y);
        for i in 0..len {
            self.yjm1[i] = y[i] + mu1 * h * self.f0[i];
        }
        for j in 2..=s {
            let mu = 2.0 * b[j] * w0 / b[j - 1];
            let nu = -b[j] / b[j - 2];
            let mut_ = 2.0 * b[j] * w1 / b[j - 1];
            let gam = -a[j - 1] * mut_;
            let prev = std::mem::take(&mut self.yjm1);
            self.eval(&prev, Out::K(0));
            self.yjm1 = prev;
            let fj = &self.k[0];
            for i in 0..len {
                self.yj[i] = (1.0 - mu - nu) * y[i]
                    + mu * self.yjm1[i]
                    + nu * self.yjm2[i]
                    + mut_ * h * fj[i]
                    + gam * h * self.f0[i];
            }
            std::mem::swap(&mut self.yjm2, &mut self.yjm1);
            std::mem::swap(&mut self.yjm1, &mut self.yj);
        }
        self.y1.copy_from_slice(&self.yjm1);
        let y1 = std::mem::take(&mut self.y1);
        self.eval(&y1, Out::F1);
        self.y1 = y1;
    }

    fn rkc_error(&self, y: &[f64], h: f64) -> f64 {
        let mut s = 0.0;
        for i in 0..self.n2 {
            let e = 0.8 * (y[i] - self.y1[i]) + 0.4 * h * (self.f0[i] + self.f1[i]);
            let sc = self.ctl.atol + self.ctl.rtol * y[i].abs().max(self.y1[i].abs());
            s += (e / sc).powi(2);
        }
        (s / self.n2 as f64).sqrt()
    }

    /// Bogacki–Shampine 3(2); writes `y1`, `f1`, and the error vector into `yjm2`.
    fn bs23_step(&mut self, y: &[f64], h: f64) {
        let len = y.len();
        for i in 0..len {
            self.yj[i] = y[i] + 0.5 * h * self.f0[i];
        }
        let tmp = std::mem::take(&mut self.yj);
        self.eval(&tmp, Out::K(1));
        self.yj = tmp;
        for i in 0..len {
            self.yj[i] = y[i] + 0.75 * h * self.k[1][i];
        }
        let tmp = std::mem::take(&mut self.yj);
        self.eval(&tmp, Out::K(2));
        self.yj = tmp;
        for i in 0..len {
            self.y1[i] = y[i] + h * (2.0 / 9.0 * self.f0[i] + 1.0 / 3.0 * self.k[1][i] + 4.0 / 9.0 * self.k[2][i]);
        }
        let y1 = std::mem::take(&mut self.y1);
        self.eval(&y1, Out::F1);
        self.y1 = y1;
        for i in 0..len {
            self.yjm2[i] = h
                * (-5.0 / 72.0 * self.f0[i] + 1.0 / 12.0 * self.k[1][i] + 1.0 / 9.0 * self.k[2][i]
                    - 1.0 / 8.0 * self.f1[i]);
        }
    }

    /// `F` at the current state (valid after `advance`).
    pub fn derivative(&self) -> &[f64] {
        &self.f0
    }
}

#[derive(Clone, Copy)]
enum Out {
    F0,
    F1,
    K(usize),
}
