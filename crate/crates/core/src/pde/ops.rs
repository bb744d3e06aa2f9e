//! Spatial operators and the semi-discrete right-hand side.

use serde::{Deserialize, Serialize};

use super::grid::{Geometry, Grid};
use super::transform::CosineTransform;
use crate::model::NondimParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Pseudo-spectral cosine basis (Neumann by construction).
    #[default]
    Spectral,
    /// Conservative second-order finite volumes.
    FiniteDifference,
}

impl std::str::FromStr for Scheme {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "spectral" => Ok(Scheme::Spectral),
            "fd" | "finite_difference" => Ok(Scheme::FiniteDifference),
            _ => Err(crate::Error::Config(format!("unknown scheme '{s}'"))),
        }
    }
}

/// Neumann Laplacian on a grid.
#[derive(Debug, Clone)]
pub enum Laplacian {
    Spectral {
        transform: CosineTransform,
        /// `−k²` per coefficient, with the 2/3 truncation folded in when requested.
        multiplier: Vec<f64>,
        max_k2: f64,
    },
    FiniteDifference {
        grid: Grid,
    },
    Radial {
        grid: Grid,
        /// Face radii over `(r_i h²)`, left and right of each cell.
        left: Vec<f64>,
        right: Vec<f64>,
    },
}

impl Laplacian {
    pub fn new(grid: &Grid, scheme: Scheme, dealias: bool) -> Self {
        if grid.geometry == Geometry::Radial {
            let h = grid.spacing()[0];
            let n = grid.n[0];
            let mut left = vec![0.0; n];
            let mut right = vec![0.0; n];
            for i in 0..n {
                let r = grid.x(i);
                left[i] = if i == 0 { 0.0 } else { (r - 0.5 * h) / (r * h * h) };
                right[i] = if i == n - 1 { 0.0 } else { (r + 0.5 * h) / (r * h * h) };
            }
            return Laplacian::Radial { grid: *grid, left, right };
        }
        match scheme {
            Scheme::FiniteDifference => Laplacian::FiniteDifference { grid: *grid },
            Scheme::Spectral => {
                let [nx, ny] = grid.n;
                let kx = std::f64::consts::PI / grid.lengths[0];
                let ky = if ny > 1 { std::f64::consts::PI / grid.lengths[1] } else { 0.0 };
                let mut multiplier = vec![0.0; nx * ny];
                let mut max_k2: f64 = 0.0;
                for q in 0..ny {
                    for p in 0..nx {
                        let keep = !dealias || (3 * p < 2 * nx && (ny == 1 || 3 * q < 2 * ny));
                        let k2 = (p as f64 * kx).powi(2) + (q as f64 * ky).powi(2);
                        max_k2 = max_k2.max(k2);
                        multiplier[q * nx + p] = if keep { -k2 } else { 0.0 };
                    }
                }
                Laplacian::Spectral {
                    transform: CosineTransform::new(nx, ny),
                    multiplier,
                    max_k2,
                }
            }
        }
    }

    /// Bound on the spectral radius of the operator.
    pub fn max_eigenvalue(&self) -> f64 {
        match self {
            Laplacian::Spectral { max_k2, .. } => *max_k2,
            Laplacian::FiniteDifference { grid } => {
                let [hx, hy] = grid.spacing();
                4.0 / (hx * hx) + if grid.n[1] > 1 { 4.0 / (hy * hy) } else { 0.0 }
            }
            Laplacian::Radial { left, right, .. } => left
                .iter()
                .zip(right)
                .map(|(l, r)| 2.0 * (l + r))
                .fold(0.0, f64::max),
        }
    }

    /// `out = Δp`; `p` is overwritten in the spectral case.
    pub fn apply(&mut self, p: &mut [f64], out: &mut [f64]) {
        match self {
            Laplacian::Spectral { transform, multiplier, .. } => {
                // Removing a constant keeps uniform states exactly uniform.
                let c = p[0];
                p.iter_mut().for_each(|x| *x -= c);
                transform.forward(p);
                for (c, m) in p.iter_mut().zip(multiplier.iter()) {
                    *c *= m;
                }
                transform.inverse(p);
                out.copy_from_slice(p);
            }
            Laplacian::FiniteDifference { grid } => fd_laplacian(grid, p, out),
            Laplacian::Radial { left, right, .. } => {
                let n = p.len();
                for i in 0..n {
                    let mut s = 0.0;
                    if i > 0 {
                        s += left[i] * (p[i - 1] - p[i]);
                    }
                    if i + 1 < n {
                        s += right[i] * (p[i + 1] - p[i]);
                    }
                    out[i] = s;
                }
            }
        }
    }
}

fn fd_laplacian(grid: &Grid, p: &[f64], out: &mut [f64]) {
    let [nx, ny] = grid.n;
    let [hx, hy] = grid.spacing();
    let ix2 = 1.0 / (hx * hx);
    for j in 0..ny {
        let row = &p[j * nx..(j + 1) * nx];
        let o = &mut out[j * nx..(j + 1) * nx];
        o[0] = (row[1] - row[0]) * ix2;
        o[nx - 1] = (row[nx - 2] - row[nx - 1]) * ix2;
        for i in 1..nx - 1 {
            o[i] = (row[i - 1] - 2.0 * row[i] + row[i + 1]) * ix2;
        }
    }
    if ny > 1 {
        let iy2 = 1.0 / (hy * hy);
        for j in 0..ny {
            for i in 0..nx {
                let c = p[j * nx + i];
                let mut s = 0.0;
                if j > 0 {
                    s += p[(j - 1) * nx + i] - c;
                }
                if j + 1 < ny {
                    s += p[(j + 1) * nx + i] - c;
                }
                out[j * nx + i] += s * iy2;
            }
        }
    }
}

/// `x^e`, with the common integer exponents spelled out.
#[inline]
pub(crate) fn pow(x: f64, e: f64) -> f64 {
    if e == 1.0 {
        x
    } else if e == 2.0 {
        x * x
    } else if e == 3.0 {
        x * x * x
    } else {
        x.powf(e)
    }
}

/// The full semi-discrete system. The state is `[u, v, z]` where `z` accumulates
/// `Γ∫(Q − u)`, so that the mass balance can be checked exactly.
#[derive(Debug, Clone)]
pub struct Rhs {
    pub np: NondimParams,
    pub reaction: bool,
    lap: Laplacian,
    weights: Vec<f64>,
    work: Vec<f64>,
    tmp: Vec<f64>,
    n: usize,
}

impl Rhs {
    pub fn new(np: &NondimParams, grid: &Grid, scheme: Scheme, dealias: bool, reaction: bool) -> Self {
        let n = grid.len();
        Self {
            np: *np,
            reaction,
            lap: Laplacian::new(grid, scheme, dealias),
            weights: grid.weights(),
            work: vec![0.0; n],
            tmp: vec![0.0; n],
            n,
        }
    }

    pub fn state_len(&self) -> usize {
        2 * self.n + 1
    }

    pub fn eval(&mut self, y: &[f64], dy: &mut [f64]) {
        let n = self.n;
        let np = self.np;
        let (u, rest) = y.split_at(n);
        let v = &rest[..n];
        let eta2 = np.eta2();
        let (eu, ev) = (np.m + 1.0, np.n + 1.0);
        for (w, &x) in self.work.iter_mut().zip(u) {
            *w = pow(x, eu);
        }
        self.lap.apply(&mut self.work, &mut self.tmp);
        dy[..n].copy_from_slice(&self.tmp);
        for (w, &x) in self.work.iter_mut().zip(v) {
            *w = pow(x, ev);
        }
        self.lap.apply(&mut self.work, &mut self.tmp);
        for (d, t) in dy[n..2 * n].iter_mut().zip(&self.tmp) {
            *d = t / eta2;
        }
        let mut z = 0.0;
        if self.reaction {
            let g = np.gamma;
            let gv = g / eta2;
            let q = np.q;
            let b = np.b;
            for i in 0..n {
                let (ui, vi) = (u[i], v[i]);
                let uuv = ui * ui * vi;
                dy[i] += g * (q - (b + 1.0) * ui + uuv);
                dy[n + i] += gv * (b * ui - uuv);
                z += self.weights[i] * (q - ui);
            }
            z *= g;
        }
        dy[2 * n] = z;
    }

    /// Gershgorin-type bound on the Jacobian's spectral radius at `y`.
    pub fn spectral_radius(&self, y: &[f64]) -> f64 {
        let n = self.n;
        let np = self.np;
        let eta2 = np.eta2();
        let (umax, vmax) = (
            y[..n].iter().copied().fold(0.0, f64::max),
            y[n..2 * n].iter().copied().fold(0.0, f64::max),
        );
        let du = (np.m + 1.0) * pow(umax.max(1e-300), np.m);
        let dv = (np.n + 1.0) / eta2 * pow(vmax.max(1e-300), np.n);
        let mut rho = self.lap.max_eigenvalue() * du.max(dv);
        if self.reaction {
            let mut r: f64 = 0.0;
            for i in 0..n {
                let (ui, vi) = (y[i], y[n + i]);
                let a = np.gamma * ((2.0 * ui * vi - np.b - 1.0).abs() + ui * ui);
                let c = np.gamma / eta2 * ((np.b - 2.0 * ui * vi).abs() + ui * ui);
                r = r.max(a.max(c));
            }
            rho += r;
        }
        rho
    }

    /// Largest eigenvalue modulus of the pointwise kinetics Jacobian.
    /// Largest step the kinetics admit under an explicit second-order method.
    ///
    /// Each node's Jacobian eigenvalues must satisfy `h|λ| ≤ 1`. Oscillatory
    /// pairs `α ± iω` get a second bound: a second-order stability polynomial
    /// amplifies them by about `1 + (hω)⁴/8` per step, so `ω⁴h³/8` is kept below
    /// the local damping `-α` plus a small allowance.
    pub fn reaction_step_limit(&self, y: &[f64]) -> f64 {
        if !self.reaction {
            return f64::INFINITY;
        }
        const ALLOWANCE: f64 = 0.1;
        let n = self.n;
        let np = self.np;
        let gv = np.gamma / np.eta2();
        let mut h: f64 = f64::INFINITY;
        for i in 0..n {
            let (ui, vi) = (y[i], y[n + i]);
            let j11 = np.gamma * (2.0 * ui * vi - np.b - 1.0);
            let j12 = np.gamma * ui * ui;
            let j21 = gv * (np.b - 2.0 * ui * vi);
            let j22 = -gv * ui * ui;
            let tr = j11 + j22;
            let det = j11 * j22 - j12 * j21;
            let disc = tr * tr - 4.0 * det;
            if disc >= 0.0 {
                h = h.min(1.0 / (0.5 * (tr.abs() + disc.sqrt())));
            } else {
                let omega = 0.5 * (-disc).sqrt();
                let damping = (-0.5 * tr).max(0.0);
                h = h.min(1.0 / det.abs().sqrt());
                h = h.min((8.0 * (damping + ALLOWANCE) / omega.powi(4)).cbrt());
            }
        }
        h
    }

    /// Largest effective diffusivity, for the explicit CFL bound.
    pub fn max_diffusivity(&self, y: &[f64]) -> f64 {
        let n = self.n;
        let np = self.np;
        let umax = y[..n].iter().copied().fold(0.0, f64::max);
        let vmax = y[n..2 * n].iter().copied().fold(0.0, f64::max);
        ((np.m + 1.0) * pow(umax, np.m)).max((np.n + 1.0) / np.eta2() * pow(vmax, np.n))
    }
}
