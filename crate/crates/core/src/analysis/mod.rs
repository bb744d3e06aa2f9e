//! Post-processing of simulated fields.

mod bessel;

pub use bessel::bessel_j0;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pde::{CosineTransform, Field, Geometry, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeAmplitude {
    pub p: u32,
    pub q: u32,
    pub coefficient: f64,
}

/// Cosine-basis coefficients of one species.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub n: [usize; 2],
    /// `c_pq` at index `q·nx + p`; the mean is kept here.
    pub coefficients: Vec<f64>,
    pub mean: f64,
    /// Non-mean modes at or above `threshold × max`, strongest first.
    pub dominant: Vec<ModeAmplitude>,
    pub threshold: f64,
    /// The display set excludes the mean mode.
    pub mean_zeroed: bool,
}

impl SpectrumReport {
    pub fn coefficient(&self, p: u32, q: u32) -> f64 {
        let (p, q) = (p as usize, q as usize);
        if p >= self.n[0] || q >= self.n[1] {
            return 0.0;
        }
        self.coefficients[q * self.n[0] + p]
    }

    /// `Σ c_pq² · (discrete norm of the basis function)`, which equals `Σ f²` over the grid.
    pub fn energy(&self) -> f64 {
        let [nx, ny] = self.n;
        let mut s = 0.0;
        for q in 0..ny {
            let wy = if q == 0 { ny as f64 } else { 0.5 * ny as f64 };
            for p in 0..nx {
                let wx = if p == 0 { nx as f64 } else { 0.5 * nx as f64 };
                s += wx * wy * self.coefficients[q * nx + p].powi(2);
            }
        }
        s
    }

    pub fn dominant_modes(&self) -> Vec<(u32, u32)> {
        self.dominant.iter().map(|m| (m.p, m.q)).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("p,q,coefficient\n");
        let nx = self.n[0];
        for (k, c) in self.coefficients.iter().enumerate() {
            let c = if k == 0 && self.mean_zeroed { 0.0 } else { *c };
            s.push_str(&format!("{},{},{:.12e}\n", k % nx, k / nx, c));
        }
        s
    }
}

/// Default threshold for the dominant-mode list.
pub const DOMINANT_FRACTION: f64 = 0.05;

/// Cosine spectrum of `data` (one species) on a line or rectangle.
pub fn cosine_spectrum(grid: &Grid, data: &[f64], threshold: f64) -> Result<SpectrumReport> {
    if grid.geometry == Geometry::Radial {
        return Err(Error::Grid("the cosine spectrum needs a line or rectangle".into()));
    }
    if data.len() != grid.len() {
        return Err(Error::GridMismatch);
    }
    let [nx, ny] = grid.n;
    let mut c = data.to_vec();
    CosineTransform::new(nx, ny).forward(&mut c);
    let max = c.iter().skip(1).fold(0.0f64, |m, x| m.max(x.abs()));
    let mut dominant: Vec<ModeAmplitude> = c
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, x)| max > 0.0 && x.abs() >= threshold * max)
        .map(|(k, x)| ModeAmplitude {
            p: (k % nx) as u32,
            q: (k / nx) as u32,
            coefficient: *x,
        })
        .collect();
    dominant.sort_by(|a, b| b.coefficient.abs().total_cmp(&a.coefficient.abs()));
    Ok(SpectrumReport {
        n: grid.n,
        mean: c[0],
        coefficients: c,
        dominant,
        threshold,
        mean_zeroed: true,
    })
}

/// `∫|u_a − u_b|` by the grid quadrature.
pub fn l1_distance(grid: &Grid, a: &Field, b: &Field) -> Result<f64> {
    if a.u.len() != grid.len() || b.u.len() != grid.len() {
        return Err(Error::GridMismatch);
    }
    Ok(grid
        .weights()
        .iter()
        .zip(a.u.iter().zip(&b.u))
        .map(|(w, (x, y))| w * (x - y).abs())
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub x: Vec<f64>,
    pub amplitude: Vec<f64>,
    pub kc: f64,
    pub extrema: usize,
    pub method: String,
}

/// Interior local extrema `(x, value)` with parabolic refinement.
fn extrema(x: &[f64], f: &[f64], maxima: bool) -> Vec<(f64, f64)> {
    let s = if maxima { 1.0 } else { -1.0 };
    let mut out = Vec::new();
    for i in 1..f.len() - 1 {
        let (a, b, c) = (s * f[i - 1], s * f[i], s * f[i + 1]);
        if b > a && b >= c {
            let denom = a - 2.0 * b + c;
            let h = x[i + 1] - x[i];
            let (dx, val) = if denom < 0.0 {
                let d = 0.5 * (a - c) / denom;
                (d * h, b - 0.25 * (a - c) * d)
            } else {
                (0.0, b)
            };
            out.push((x[i] + dx, s * val));
        }
    }
    out
}

fn interp(points: &[(f64, f64)], x: f64) -> f64 {
    match points.iter().position(|p| p.0 >= x) {
        None => points.last().map_or(0.0, |p| p.1),
        Some(0) => points[0].1,
        Some(k) => {
            let (x0, y0) = points[k - 1];
            let (x1, y1) = points[k];
            y0 + (y1 - y0) * (x - x0) / (x1 - x0)
        }
    }
}

/// Half the gap between the curves through the local maxima and minima.
/// This removes slowly varying mean shifts without choosing a baseline.
pub fn envelope_1d(x: &[f64], f: &[f64], kc: f64) -> Result<Envelope> {
    if x.len() != f.len() || f.len() < 3 {
        return Err(Error::Envelope("need matching x and f with at least 3 points".into()));
    }
    let upper = extrema(x, f, true);
    let lower = extrema(x, f, false);
    let count = upper.len() + lower.len();
    if count < 3 || upper.is_empty() || lower.is_empty() {
        return Err(Error::Envelope(format!("only {count} extrema")));
    }
    let amplitude = x
        .iter()
        .map(|&xi| (0.5 * (interp(&upper, xi) - interp(&lower, xi))).max(0.0))
        .collect();
    Ok(Envelope {
        x: x.to_vec(),
        amplitude,
        kc,
        extrema: count,
        method: "extrema interpolation".into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontReport {
    pub level: f64,
    pub times: Vec<f64>,
    /// All level crossings per snapshot.
    pub crossings: Vec<Vec<f64>>,
    /// Outward speed of the front whose envelope falls with increasing `x`.
    pub right_speed: Option<f64>,
    /// Outward speed of the front whose envelope rises with increasing `x`.
    pub left_speed: Option<f64>,
}

fn slope(t: &[f64], y: &[f64]) -> f64 {
    let n = t.len() as f64;
    let (mt, my) = (t.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let num: f64 = t.iter().zip(y).map(|(a, b)| (a - mt) * (b - my)).sum();
    let den: f64 = t.iter().map(|a| (a - mt).powi(2)).sum();
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Tracks where each envelope crosses `level` and fits a speed for each side.
pub fn front_position(series: &[(f64, Envelope)], level: f64) -> Result<FrontReport> {
    let mut times = Vec::new();
    let mut crossings = Vec::new();
    let (mut rt, mut rx, mut lt, mut lx) = (vec![], vec![], vec![], vec![]);
    for (t, env) in series {
        let mut cs = Vec::new();
        let (mut fall, mut rise) = (None, None);
        for i in 0..env.x.len().saturating_sub(1) {
            let (a, b) = (env.amplitude[i] - level, env.amplitude[i + 1] - level);
            if (a >= 0.0) != (b >= 0.0) {
                let xc = env.x[i] + (env.x[i + 1] - env.x[i]) * a / (a - b);
                cs.push(xc);
                if a >= 0.0 {
                    fall = Some(xc);
                } else if rise.is_none() {
                    rise = Some(xc);
                }
            }
        }
        if let Some(x) = fall {
            rt.push(*t);
            rx.push(x);
        }
        if let Some(x) = rise {
            lt.push(*t);
            lx.push(x);
        }
        times.push(*t);
        crossings.push(cs);
    }
    if rt.is_empty() && lt.is_empty() {
        return Err(Error::NoCrossing);
    }
    Ok(FrontReport {
        level,
        times,
        crossings,
        right_speed: (rt.len() >= 2).then(|| slope(&rt, &rx)),
        left_speed: (lt.len() >= 2).then(|| -slope(&lt, &lx)),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreMatch {
    /// `|C|` of the core fit `u − ū ≈ C J₀(k_c r) + d`.
    pub c: f64,
    /// Sign of `C` (the centre is a maximum when positive).
    pub sign: f64,
    pub offset: f64,
    /// RMS misfit over the core region relative to the largest core deviation.
    pub residual: f64,
    pub eps: f64,
    pub core_radius: f64,
    /// Median envelope over the outer half of the domain.
    pub outer_amplitude: f64,
    /// Largest ring amplitude away from the centre.
    pub center_amplitude: f64,
    pub low_confidence: bool,
}

/// Fits the Bessel core to a radial profile `u(r)` (deviation from `u_bar`).
pub fn core_match(grid: &Grid, u: &[f64], u_bar: f64, kc: f64, eps: f64) -> Result<CoreMatch> {
    if grid.geometry != Geometry::Radial {
        return Err(Error::Grid("core matching needs a radial profile".into()));
    }
    if u.len() != grid.len() {
        return Err(Error::GridMismatch);
    }
    let r = grid.xs();
    let core_radius = 2.0 * 2.0 * std::f64::consts::PI / kc;
    // Least squares for (C, d) on r ≤ core_radius.
    let (mut sjj, mut sj, mut s1, mut sjy, mut sy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut pts = Vec::new();
    for (ri, ui) in r.iter().zip(u) {
        if *ri > core_radius {
            break;
        }
        let j = bessel_j0(kc * ri);
        let y = ui - u_bar;
        sjj += j * j;
        sj += j;
        s1 += 1.0;
        sjy += j * y;
        sy += y;
        pts.push((j, y));
    }
    let det = sjj * s1 - sj * sj;
    if pts.len() < 3 || det.abs() < 1e-300 {
        return Err(Error::Envelope("too few points in the core region".into()));
    }
    let c = (sjy * s1 - sj * sy) / det;
    let d = (sjj * sy - sj * sjy) / det;
    let scale = pts.iter().fold(0.0f64, |m, (_, y)| m.max(y.abs()));
    let rms = (pts.iter().map(|(j, y)| (c * j + d - y).powi(2)).sum::<f64>() / pts.len() as f64).sqrt();
    let residual = if scale > 0.0 { rms / scale } else { 0.0 };
    let env = envelope_1d(&r, u, kc)?;
    let r_max = grid.lengths[0];
    let mut outer: Vec<f64> = r
        .iter()
        .zip(&env.amplitude)
        .filter(|(ri, _)| **ri >= 0.5 * r_max && **ri <= 0.9 * r_max)
        .map(|(_, a)| *a)
        .collect();
    outer.sort_by(|a, b| a.total_cmp(b));
    let outer_amplitude = outer.get(outer.len() / 2).copied().unwrap_or(0.0);
    let center_amplitude = (u[0] - u_bar - d).abs();
    Ok(CoreMatch {
        c: c.abs(),
        sign: c.signum(),
        offset: d,
        residual,
        eps,
        core_radius,
        outer_amplitude,
        center_amplitude,
        low_confidence: residual > 0.1,
    })
}

/// Least-squares exponent `α` in `C ∝ ε^α`.
pub fn scaling_exponent(eps: &[f64], c: &[f64]) -> f64 {
    let le: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let lc: Vec<f64> = c.iter().map(|x| x.ln()).collect();
    slope(&le, &lc)
}

/// Fits `𝒜 ≈ a + bR + a³R log R` (real `a`) to samples of the outer envelope.
pub fn small_r_fit(big_r: &[f64], calligraphic_a: &[f64]) -> Result<(f64, f64, f64)> {
    if big_r.len() < 3 || big_r.len() != calligraphic_a.len() {
        return Err(Error::Envelope("need at least 3 matching samples".into()));
    }
    let (mut a, mut b) = (calligraphic_a[0], 0.0);
    for _ in 0..50 {
        // Linear least squares for (a, b) with the log term frozen at the current a.
        let ys: Vec<f64> = big_r
            .iter()
            .zip(calligraphic_a)
            .map(|(r, y)| y - a.powi(3) * r * r.ln())
            .collect();
        let n = big_r.len() as f64;
        let (sr, srr) = (big_r.iter().sum::<f64>(), big_r.iter().map(|r| r * r).sum::<f64>());
        let (sy, sry) = (ys.iter().sum::<f64>(), big_r.iter().zip(&ys).map(|(r, y)| r * y).sum::<f64>());
        let det = n * srr - sr * sr;
        if det == 0.0 {
            return Err(Error::Envelope("degenerate sample radii".into()));
        }
        let na = (srr * sy - sr * sry) / det;
        let nb = (n * sry - sr * sy) / det;
        let done = (na - a).abs() < 1e-13 * a.abs().max(1.0);
        a = na;
        b = nb;
        if done {
            break;
        }
    }
    let rms = (big_r
        .iter()
        .zip(calligraphic_a)
        .map(|(r, y)| (a + b * r + a.powi(3) * r * r.ln() - y).powi(2))
        .sum::<f64>()
        / big_r.len() as f64)
        .sqrt();
    Ok((a, b, rms))
}

#[cfg(test)]
mod tests;
