//! Linear stability of the homogeneous steady state.
//!
//! Linearizing about `(Q, b/Q)` gives the kinetics Jacobian `K` and the
//! diffusion matrix `D`; a Fourier mode with squared wavenumber `k²` grows
//! at the rate `σ` solving `σ² + g(k²) σ + h(k²) = 0` with
//! `g = k² tr D − Γ tr K` and `h = det D k⁴ + Γ q k² + Γ² det K`.

mod modes;
mod sweep;

pub use modes::{admissible_modes, Domain, ModePair, ModeSet, PiLength, Resonance};
pub use sweep::{boundary_sweep, BoundaryCurves, Criticality, Region, Sweep, SweepKind, SweepRow};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::NondimParams;

/// A 2×2 matrix stored row-major.
pub type Mat2 = [[f64; 2]; 2];

/// Kinetics Jacobian `K`, diagonal diffusion `D` and `q = −K11 D22 − K22 D11`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Linearization {
    pub k: Mat2,
    pub d: [f64; 2],
    pub q: f64,
    pub gamma: f64,
}

impl Linearization {
    pub fn det_k(&self) -> f64 {
        self.k[0][0] * self.k[1][1] - self.k[0][1] * self.k[1][0]
    }

    pub fn tr_k(&self) -> f64 {
        self.k[0][0] + self.k[1][1]
    }

    pub fn det_d(&self) -> f64 {
        self.d[0] * self.d[1]
    }

    pub fn tr_d(&self) -> f64 {
        self.d[0] + self.d[1]
    }

    /// `Γ K − k² D`, the linear operator acting on a mode with squared wavenumber `k2`.
    pub fn operator(&self, k2: f64) -> Mat2 {
        [
            [
                self.gamma * self.k[0][0] - k2 * self.d[0],
                self.gamma * self.k[0][1],
            ],
            [
                self.gamma * self.k[1][0],
                self.gamma * self.k[1][1] - k2 * self.d[1],
            ],
        ]
    }

    pub fn g(&self, k2: f64) -> f64 {
        k2 * self.tr_d() - self.gamma * self.tr_k()
    }

    pub fn h(&self, k2: f64) -> f64 {
        self.det_d() * k2 * k2 + self.gamma * self.q * k2 + self.gamma * self.gamma * self.det_k()
    }
}

pub fn linearize(np: &NondimParams) -> Linearization {
    let (q, eta2, b) = (np.q, np.eta2(), np.b);
    let k = [[b - 1.0, q * q], [-b / eta2, -(q * q) / eta2]];
    let d = [
        (np.m + 1.0) * q.powf(np.m),
        (np.n + 1.0) / eta2 * (b / q).powf(np.n),
    ];
    let qq = -k[0][0] * d[1] - k[1][1] * d[0];
    Linearization {
        k,
        d,
        q: qq,
        gamma: np.gamma,
    }
}

/// Growth rates at one squared wavenumber.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionSample {
    pub k2: f64,
    pub roots: [Complex64; 2],
    pub g_val: f64,
    pub h_val: f64,
}

impl DispersionSample {
    pub fn max_real(&self) -> f64 {
        self.roots[0].re.max(self.roots[1].re)
    }

    /// Largest relative residual of `σ² + gσ + h` over both roots.
    pub fn residual(&self) -> f64 {
        self.roots
            .iter()
            .map(|&s| {
                let r = s * s + self.g_val * s + self.h_val;
                let scale = s.norm_sqr() + self.g_val.abs() * s.norm() + self.h_val.abs();
                if scale == 0.0 {
                    0.0
                } else {
                    r.norm() / scale
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Roots of the quadratic `σ² + g σ + h = 0`, largest real part first.
pub(crate) fn quadratic_roots(g: f64, h: f64) -> [Complex64; 2] {
    let disc = g * g - 4.0 * h;
    if disc >= 0.0 {
        let sq = disc.sqrt();
        // Avoid cancellation: one root from the formula, the other from Vieta.
        let sgn = if g >= 0.0 { 1.0 } else { -1.0 };
        let t = -0.5 * (g + sgn * sq);
        let (r1, r2) = if t == 0.0 { (0.0, -g) } else { (t, h / t) };
        let (a, b) = if r1 >= r2 { (r1, r2) } else { (r2, r1) };
        [Complex64::new(a, 0.0), Complex64::new(b, 0.0)]
    } else {
        let im = 0.5 * (-disc).sqrt();
        [Complex64::new(-0.5 * g, im), Complex64::new(-0.5 * g, -im)]
    }
}

pub fn growth_rates(np: &NondimParams, k2: f64) -> DispersionSample {
    let lin = linearize(np);
    let g_val = lin.g(k2);
    let h_val = lin.h(k2);
    DispersionSample {
        k2,
        roots: quadratic_roots(g_val, h_val),
        g_val,
        h_val,
    }
}

/// Largest real growth rate at `k2`.
pub fn max_growth(np: &NondimParams, k2: f64) -> f64 {
    growth_rates(np, k2).max_real()
}

/// Onset of the homogeneous oscillatory instability, `1 + Q²/η²` (at `k = 0`).
pub fn hopf_threshold(np: &NondimParams) -> f64 {
    1.0 + np.q2() / np.eta2()
}

/// Hopf and Turing thresholds for fixed `(Q, η, Γ, m, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub b_hopf: f64,
    pub b_turing: f64,
    /// Critical squared wavenumber at `b_turing`.
    pub kc2: f64,
}

impl Thresholds {
    pub fn kc(&self) -> f64 {
        self.kc2.sqrt()
    }
}

/// `η² q` as a function of `b`; negative values are required for a Turing branch.
fn scaled_q(b: f64, q: f64, m: f64, n: f64) -> f64 {
    (n + 1.0) * (b / q).powf(n) * (1.0 - b) + (m + 1.0) * q.powf(m + 2.0)
}

/// `η⁴ (q² − 4 det D det K)`: its zero with `q < 0` is the Turing threshold.
pub fn turing_discriminant(b: f64, q: f64, m: f64, n: f64) -> f64 {
    let s = scaled_q(b, q, m, n);
    s * s - 4.0 * (m + 1.0) * (n + 1.0) * q.powf(m - n + 2.0) * b.powf(n)
}

/// Critical squared wavenumber `−Γ q / (2 det D)` at the given `b`.
pub fn critical_k2(np: &NondimParams) -> f64 {
    let (q, m, n, b) = (np.q, np.m, np.n, np.b);
    -np.gamma * scaled_q(b, q, m, n) / (2.0 * (m + 1.0) * (n + 1.0) * q.powf(m - n) * b.powf(n))
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, abs_tol: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= abs_tol || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const B_SEARCH_CAP: f64 = 1e8;

/// Turing threshold `b^c` and critical wavenumber; `np.b` is ignored.
///
/// The threshold is the smallest `b > 1` with `q < 0` at which the
/// discriminant `q² − 4 det D det K` vanishes. It depends on `(Q, m, n)`
/// only; `k_c²` is proportional to `Γ`.
pub fn turing_threshold(np: &NondimParams) -> Result<Thresholds> {
    let (q, m, n) = (np.q, np.m, np.n);
    // q changes sign once on (1, ∞): the factor b^n (1 - b) is decreasing there.
    let mut hi = 2.0;
    while scaled_q(hi, q, m, n) >= 0.0 {
        hi = 1.0 + 2.0 * (hi - 1.0);
        if hi > B_SEARCH_CAP {
            return Err(Error::NoTuringBranch);
        }
    }
    let b_q = bisect(|b| scaled_q(b, q, m, n), 1.0, hi, 1e-15);
    let b_q = if scaled_q(b_q, q, m, n) >= 0.0 {
        // step just past the sign change so that q < 0 holds on the scan
        let mut b = b_q;
        while scaled_q(b, q, m, n) >= 0.0 {
            b = b + b.abs() * 1e-15 + 1e-300;
        }
        b
    } else {
        b_q
    };

    let disc = |b: f64| turing_discriminant(b, q, m, n);
    if disc(b_q) >= 0.0 {
        return Err(Error::NoTuringBranch);
    }
    let mut step = 1e-6 * b_q;
    let mut lo = b_q;
    let mut hi = b_q + step;
    while disc(hi) < 0.0 {
        lo = hi;
        step *= 1.05;
        hi = lo + step;
        if hi > B_SEARCH_CAP {
            return Err(Error::NoTuringBranch);
        }
    }
    let b_turing = bisect(disc, lo, hi, 1e-13);
    let kc2 = critical_k2(&np.with_b(b_turing));
    if !(b_turing > 1.0 && kc2 > 0.0) {
        return Err(Error::NoTuringBranch);
    }
    Ok(Thresholds {
        b_hopf: hopf_threshold(np),
        b_turing,
        kc2,
    })
}

/// `ε = sqrt((b − b^c)/b^c)` for the parameters' own `b`.
pub fn epsilon(np: &NondimParams) -> Result<f64> {
    let th = turing_threshold(np)?;
    if np.b <= th.b_turing {
        return Err(Error::BelowThreshold {
            b: np.b,
            b_c: th.b_turing,
        });
    }
    Ok(((np.b - th.b_turing) / th.b_turing).sqrt())
}

/// Edges `(k1², k2²)` of the unstable band, the two roots of `h(k²) = 0`.
///
/// Returns `None` when `h` has no positive real roots (no Turing-unstable band).
pub fn unstable_band(np: &NondimParams) -> Option<(f64, f64)> {
    let lin = linearize(np);
    let a = lin.det_d();
    let bq = np.gamma * lin.q;
    let c = np.gamma * np.gamma * lin.det_k();
    let disc = bq * bq - 4.0 * a * c;
    if disc <= 0.0 || bq >= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let k2_hi = (-bq + sq) / (2.0 * a);
    let k2_lo = c / (a * k2_hi);
    if k2_hi <= 0.0 {
        return None;
    }
    Some((k2_lo.max(0.0), k2_hi))
}

/// Bifurcation value at which the mode with squared wavenumber `k2` becomes neutral,
/// the first crossing of `h(k2; b) = 0` at or above `b^c`.
pub fn neutral_b(np: &NondimParams, k2: f64) -> Result<f64> {
    if !(k2 > 0.0) {
        return Err(Error::domain("k2", k2, "must be positive"));
    }
    let th = turing_threshold(np)?;
    let h = |b: f64| linearize(&np.with_b(b)).h(k2);
    let b0 = th.b_turing;
    if h(b0) <= 0.0 {
        return Ok(b0);
    }
    let mut step = 1e-9 * b0;
    let mut lo = b0;
    let mut hi = b0 + step;
    while h(hi) > 0.0 {
        lo = hi;
        step *= 1.5;
        hi = lo + step;
        if hi > B_SEARCH_CAP {
            return Err(Error::NoAdmissibleMode);
        }
    }
    Ok(bisect(h, lo, hi, 1e-14 * b0))
}

/// Solves the 2×2 system `a x = rhs` by Cramer's rule.
pub(crate) fn solve2(a: &Mat2, rhs: [f64; 2]) -> Option<[f64; 2]> {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let scale = (a[0][0].abs() + a[0][1].abs()) * (a[1][0].abs() + a[1][1].abs());
    if det == 0.0 || det.abs() <= 1e-14 * scale {
        return None;
    }
    Some([
        (rhs[0] * a[1][1] - a[0][1] * rhs[1]) / det,
        (a[0][0] * rhs[1] - a[1][0] * rhs[0]) / det,
    ])
}
