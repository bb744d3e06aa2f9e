//! Method of lines for the real Ginzburg–Landau equation on `[0, length]`
//! with no-flux ends.

use serde::{Deserialize, Serialize};

use super::ode::{dopri5, OdeEnd, OdeOptions};
use crate::error::{Error, Result};
use crate::wnl::Coefficients;

/// Vertex-centred grid `X_j = j·length/(n−1)` on the slow scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlGrid {
    pub n: usize,
    pub length: f64,
}

impl GlGrid {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::Grid(format!("GL grid needs at least 3 points, got {n}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::domain("length", length, "must be positive"));
        }
        Ok(Self { n, length })
    }

    pub fn h(&self) -> f64 {
        self.length / (self.n - 1) as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.h()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlSnapshot {
    pub t: f64,
    pub values: Vec<f64>,
}

/// Second-order Laplacian with mirror ghosts, `A₋₁ = A₁` and `A_n = A_{n−2}`.
fn laplacian(a: &[f64], inv_h2: f64, out: &mut [f64]) {
    let n = a.len();
    out[0] = 2.0 * (a[1] - a[0]) * inv_h2;
    out[n - 1] = 2.0 * (a[n - 2] - a[n - 1]) * inv_h2;
    for j in 1..n - 1 {
        out[j] = (a[j - 1] - 2.0 * a[j] + a[j + 1]) * inv_h2;
    }
}

/// Integrates `∂_T A = ν A_XX + σA − LA³`, recording every `record_dt`.
pub fn integrate_gl(
    coeffs: &Coefficients,
    grid: &GlGrid,
    init: &[f64],
    t_end: f64,
    record_dt: f64,
    opts: &OdeOptions,
) -> Result<(Vec<GlSnapshot>, OdeEnd)> {
    let Coefficients::Gl { sigma, l, nu } = *coeffs else {
        return Err(Error::ModeConfiguration("GL integration needs GL coefficients".into()));
    };
    if init.len() != grid.n {
        return Err(Error::GridMismatch);
    }
    let inv_h2 = 1.0 / (grid.h() * grid.h());
    // Explicit stability bound for the diffusion part (the pair is stable to about 3.3 on the real axis).
    let mut opts = *opts;
    if nu > 0.0 {
        opts.h_max = opts.h_max.min(0.8 * 3.3 / (4.0 * nu * inv_h2));
    }
    let stops: Vec<f64> = if record_dt > 0.0 {
        (1..).map(|i| i as f64 * record_dt).take_while(|&t| t < t_end).collect()
    } else {
        Vec::new()
    };
    let mut snaps = vec![GlSnapshot {
        t: 0.0,
        values: init.to_vec(),
    }];
    let (_, end) = dopri5(
        |_, a, d| {
            laplacian(a, inv_h2, d);
            for (dj, &aj) in d.iter_mut().zip(a) {
                *dj = nu * *dj + sigma * aj - l * aj * aj * aj;
            }
        },
        0.0,
        init,
        t_end,
        &opts,
        &stops,
        |t, y| snaps.push(GlSnapshot { t, values: y.to_vec() }),
    )?;
    Ok((snaps, end))
}
