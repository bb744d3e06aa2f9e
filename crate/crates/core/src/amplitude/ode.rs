//! Dormand–Prince 5(4) with standard step-size control.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; `0` picks one from the initial slope.
    pub h0: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// The run stops as diverged once any component exceeds this magnitude.
    pub blowup: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
            h0: 0.0,
            h_max: f64::INFINITY,
            max_steps: 10_000_000,
            blowup: 1e8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum OdeEnd {
    Completed,
    Diverged { t: f64 },
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y' = f(t, y)` from `t0` to `t_end`, landing exactly on every
/// time in `stops` and calling `observe(t, y)` there and at `t_end`.
pub fn dopri5<F, O>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t_end: f64,
    opts: &OdeOptions,
    stops: &[f64],
    mut observe: O,
) -> Result<(Vec<f64>, OdeEnd)>
where
    F: FnMut(f64, &[f64], &mut [f64]),
    O: FnMut(f64, &[f64]),
{
    let n = y0.len();
    if y0.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { t: t0 });
    }
    let mut y = y0.to_vec();
    let mut k: Vec<Vec<f64>> = (0..7).map(|_| vec![0.0; n]).collect();
    let mut tmp = vec![0.0; n];
    let mut ynew = vec![0.0; n];
    let mut t = t0;
    f(t, &y, &mut k[0]);
    let mut h = if opts.h0 > 0.0 {
        opts.h0
    } else {
        let d0 = rms(&y, &y, opts);
        let d1 = rms(&k[0], &y, opts);
        if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 }
    }
    .min(opts.h_max)
    .min((t_end - t0).max(0.0));
    let mut stop_iter = stops.iter().copied().filter(|&s| s > t0 && s < t_end).peekable();
    let mut steps = 0usize;
    while t < t_end {
        let target = stop_iter.peek().copied().unwrap_or(t_end);
        let mut last = false;
        if t + h >= target {
            h = target - t;
            last = true;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            // A finite-time singularity shows up as step collapse before the bound is hit.
            if y.iter().any(|x| x.abs() > opts.blowup.sqrt()) {
                observe(t, &y);
                return Ok((y, OdeEnd::Diverged { t }));
            }
            return Err(Error::StepSizeUnderflow { t, dt: h });
        }
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::StepSizeUnderflow { t, dt: h });
        }
        let stage = |coef: &[(f64, usize)], k: &Vec<Vec<f64>>, y: &[f64], out: &mut [f64]| {
            for i in 0..n {
                let mut s = 0.0;
                for &(c, j) in coef {
                    s += c * k[j][i];
                }
                out[i] = y[i] + h * s;
            }
        };
        stage(&[(A21, 0)], &k, &y, &mut tmp);
        f(t + C2 * h, &tmp, &mut k[1]);
        stage(&[(A31, 0), (A32, 1)], &k, &y, &mut tmp);
        f(t + C3 * h, &tmp, &mut k[2]);
        stage(&[(A41, 0), (A42, 1), (A43, 2)], &k, &y, &mut tmp);
        f(t + C4 * h, &tmp, &mut k[3]);
        stage(&[(A51, 0), (A52, 1), (A53, 2), (A54, 3)], &k, &y, &mut tmp);
        f(t + C5 * h, &tmp, &mut k[4]);
        stage(&[(A61, 0), (A62, 1), (A63, 2), (A64, 3), (A65, 4)], &k, &y, &mut tmp);
        f(t + h, &tmp, &mut k[5]);
        stage(&[(B1, 0), (B3, 2), (B4, 3), (B5, 4), (B6, 5)], &k, &y, &mut ynew);
        f(t + h, &ynew, &mut k[6]);
        let mut err = 0.0;
        for i in 0..n {
            let e = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(ynew[i].abs());
            err += (e / sc) * (e / sc);
        }
        let err = (err / n.max(1) as f64).sqrt();
        if !err.is_finite() {
            h *= 0.1;
            continue;
        }
        if err <= 1.0 {
            t = if last { target } else { t + h };
            std::mem::swap(&mut y, &mut ynew);
            k.swap(0, 6);
            if y.iter().any(|x| !x.is_finite() || x.abs() > opts.blowup) {
                observe(t, &y);
                return Ok((y, OdeEnd::Diverged { t }));
            }
            if last {
                observe(t, &y);
                if stop_iter.peek().is_some() && target < t_end {
                    stop_iter.next();
                }
            }
        }
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * if err <= 1.0 { fac } else { fac.min(1.0) }).min(opts.h_max);
    }
    Ok((y, OdeEnd::Completed))
}

fn rms(v: &[f64], y: &[f64], opts: &OdeOptions) -> f64 {
    let n = v.len().max(1) as f64;
    (v.iter()
        .zip(y)
        .map(|(a, b)| (a / (opts.atol + opts.rtol * b.abs())).powi(2))
        .sum::<f64>()
        / n)
        .sqrt()
}
