//! Center-manifold reduction by polynomial series in the critical amplitudes.
//!
//! The deviation from the steady state is expanded as
//! `w(a, δ) = Σ w_μ a^α δ^β` and the amplitudes obey `ȧ_i = g_i(a, δ)`,
//! where `δ = b − b0` and `b0` is the bifurcation value at which the
//! critical modes are neutral. Each coefficient field is a finite sum of
//! Neumann planforms `cos(p φ x) cos(q ψ y)`, so products reduce exactly
//! through the product-to-sum identity. Monomials are processed by weight
//! `|α| + w_δ β`; at each weight the critical projection gives `g` and the
//! remaining linear systems give `w`.

use std::collections::BTreeMap;

use num_rational::Ratio;

use super::KernelPair;
use crate::error::{Error, Result};
use crate::linstab::{linearize, solve2, Linearization, Mat2};
use crate::model::NondimParams;

pub(crate) const MAX_R: usize = 4;

pub(crate) type Mode = (u32, u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub(crate) struct Mono {
    pub a: [u8; MAX_R],
    pub d: u8,
}

impl Mono {
    pub fn amp(i: usize) -> Mono {
        let mut m = Mono::default();
        m.a[i] = 1;
        m
    }

    pub fn delta() -> Mono {
        Mono { a: [0; MAX_R], d: 1 }
    }

    pub fn degree(&self) -> u32 {
        self.a.iter().map(|&x| u32::from(x)).sum()
    }

    pub fn weight(&self, wd: u32) -> u32 {
        self.degree() + wd * u32::from(self.d)
    }

    pub fn times(&self, o: &Mono) -> Mono {
        let mut a = [0; MAX_R];
        for (k, x) in a.iter_mut().enumerate() {
            *x = self.a[k] + o.a[k];
        }
        Mono { a, d: self.d + o.d }
    }
}

pub(crate) type Field = BTreeMap<Mode, f64>;

fn field_mul(f1: &Field, f2: &Field, out: &mut Field, scale: f64) {
    for (&(p1, q1), &v1) in f1 {
        for (&(p2, q2), &v2) in f2 {
            let pr = 0.25 * scale * v1 * v2;
            if pr == 0.0 {
                continue;
            }
            for x in [p1 + p2, p1.abs_diff(p2)] {
                for y in [q1 + q2, q1.abs_diff(q2)] {
                    *out.entry((x, y)).or_insert(0.0) += pr;
                }
            }
        }
    }
}

/// A truncated scalar series: monomial → planform coefficients.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Series {
    pub terms: BTreeMap<Mono, Field>,
}

impl Series {
    pub fn single(mono: Mono, mode: Mode, value: f64) -> Series {
        let mut s = Series::default();
        s.terms.entry(mono).or_default().insert(mode, value);
        s
    }

    pub fn add_scaled(&mut self, other: &Series, c: f64) {
        if c == 0.0 {
            return;
        }
        for (mono, f) in &other.terms {
            let g = self.terms.entry(*mono).or_default();
            for (md, v) in f {
                *g.entry(*md).or_insert(0.0) += c * v;
            }
        }
    }

    pub fn scaled(&self, c: f64) -> Series {
        let mut s = Series::default();
        s.add_scaled(self, c);
        s
    }

    /// Product truncated to total weight `≤ wmax`.
    pub fn mul(&self, other: &Series, wd: u32, wmax: u32) -> Series {
        let mut out = Series::default();
        for (m1, f1) in &self.terms {
            for (m2, f2) in &other.terms {
                let m = m1.times(m2);
                if m.weight(wd) > wmax {
                    continue;
                }
                field_mul(f1, f2, out.terms.entry(m).or_default(), 1.0);
            }
        }
        out
    }

    pub fn laplacian(&self, metric: &Metric) -> Series {
        let mut out = Series::default();
        for (mono, f) in &self.terms {
            let g: Field = f
                .iter()
                .filter(|(md, _)| **md != (0, 0))
                .map(|(md, v)| (*md, -metric.k2(*md) * v))
                .collect();
            if !g.is_empty() {
                out.terms.insert(*mono, g);
            }
        }
        out
    }

    pub fn at_weight(&self, wd: u32, w: u32) -> impl Iterator<Item = (&Mono, &Field)> {
        self.terms.iter().filter(move |(m, _)| m.weight(wd) == w)
    }
}

/// Squared wavenumber of mode `(p, q)`: `scale · (p² ax + q² ay)` with exact `ax`, `ay`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Metric {
    pub ax: Ratio<i64>,
    pub ay: Ratio<i64>,
    pub scale: f64,
}

impl Metric {
    pub fn exact(&self, (p, q): Mode) -> Ratio<i64> {
        self.ax * i64::from(p * p) + self.ay * i64::from(q * q)
    }

    pub fn k2(&self, md: Mode) -> f64 {
        let r = self.exact(md);
        self.scale * (*r.numer() as f64 / *r.denom() as f64)
    }
}

/// Generalized binomial coefficient `C(x, j)` for real `x`.
pub(crate) fn binom(x: f64, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (x - f64::from(i)) / f64::from(i + 1))
}

pub(crate) struct Problem {
    pub np0: NondimParams,
    pub metric: Metric,
    pub crit: Vec<Mode>,
    pub wd: u32,
    pub wmax: u32,
    /// Multiplies the kernel vector; 1 gives the `rho = (1, ρ₂)` gauge.
    pub rho_scale: f64,
}

pub(crate) struct Expansion {
    pub g: Vec<BTreeMap<Mono, f64>>,
    pub w: [Series; 2],
    pub kernel: KernelPair,
    pub lin: Linearization,
    pub solvability_residual: f64,
}

impl Problem {
    fn op(&self, lin: &Linearization, md: Mode) -> Mat2 {
        lin.operator(self.metric.k2(md))
    }

    /// Nonlinear part of the right-hand side, both components, truncated at `wmax`.
    fn nonlinear(&self, w: &[Series; 2], wmax: u32) -> [Series; 2] {
        let NondimParams { q, gamma, m, n, b: b0, .. } = self.np0;
        let eta2 = self.np0.eta2();
        let wd = self.wd;
        let (u, v) = (&w[0], &w[1]);
        let delta = Series::single(Mono::delta(), (0, 0), 1.0);

        let uu = u.mul(u, wd, wmax);
        let uv = u.mul(v, wd, wmax);
        let uuv = uu.mul(v, wd, wmax);
        let mut kin = Series::default();
        kin.add_scaled(&uv, 2.0 * q);
        kin.add_scaled(&uu, b0 / q);
        kin.add_scaled(&uuv, 1.0);
        let mut lin_d = u.clone();
        lin_d.add_scaled(&uu, 1.0 / q);
        kin.add_scaled(&delta.mul(&lin_d, wd, wmax), 1.0);

        let mut fu = kin.scaled(gamma);
        let mut fv = kin.scaled(-gamma / eta2);

        // Σ_{j≥2} C(m+1, j) Q^{m+1-j} U^j
        let mut diff_u = Series::default();
        let mut pow = u.clone();
        for j in 2..=wmax {
            pow = pow.mul(u, wd, wmax);
            if pow.terms.is_empty() {
                break;
            }
            let c = binom(m + 1.0, j) * q.powf(m + 1.0 - f64::from(j));
            diff_u.add_scaled(&pow, c);
        }
        fu.add_scaled(&diff_u.laplacian(&self.metric), 1.0);

        // v = b0/Q + s with s = δ/Q + V; the j = 1 term is linear or constant.
        let vbar = b0 / q;
        let mut s = v.clone();
        s.add_scaled(&delta, 1.0 / q);
        let mut diff_v = Series::default();
        let mut pow = s.clone();
        for j in 2..=wmax {
            pow = pow.mul(&s, wd, wmax);
            if pow.terms.is_empty() {
                break;
            }
            let c = binom(n + 1.0, j) * vbar.powf(n + 1.0 - f64::from(j)) / eta2;
            diff_v.add_scaled(&pow, c);
        }
        fv.add_scaled(&diff_v.laplacian(&self.metric), 1.0);
        [fu, fv]
    }

    pub fn kernel(&self, lin: &Linearization) -> Result<KernelPair> {
        let k2 = self.metric.k2(self.crit[0]);
        let kp = super::kernel_of(&lin.operator(k2))?;
        Ok(KernelPair {
            rho: [kp.rho[0] * self.rho_scale, kp.rho[1] * self.rho_scale],
            psi_adj: [kp.psi_adj[0] / self.rho_scale, kp.psi_adj[1] / self.rho_scale],
        })
    }

    pub fn solve(&self) -> Result<Expansion> {
        let r = self.crit.len();
        if r == 0 || r > MAX_R {
            return Err(Error::ModeConfiguration(format!("{r} critical modes")));
        }
        let k2c = self.metric.exact(self.crit[0]);
        if self.crit.iter().any(|&c| self.metric.exact(c) != k2c) {
            return Err(Error::ModeConfiguration("critical modes differ in k²".into()));
        }
        let lin = linearize(&self.np0);
        let kernel = self.kernel(&lin)?;
        let (rho, psi) = (kernel.rho, kernel.psi_adj);
        let m_crit = self.op(&lin, self.crit[0]);
        let wd = self.wd;

        let mut w = [Series::default(), Series::default()];
        for (i, &c) in self.crit.iter().enumerate() {
            w[0].terms.entry(Mono::amp(i)).or_default().insert(c, rho[0]);
            w[1].terms.entry(Mono::amp(i)).or_default().insert(c, rho[1]);
        }
        let mut g: Vec<BTreeMap<Mono, f64>> = vec![BTreeMap::new(); r];
        let mut max_resid: f64 = 0.0;

        for k in 2..=self.wmax {
            let nl = self.nonlinear(&w, k);
            // H = Σ_i ∂w/∂a_i · g_i, restricted to weight k.
            let mut h = [Series::default(), Series::default()];
            for (i, gi) in g.iter().enumerate() {
                for c in 0..2 {
                    for (mw, f) in &w[c].terms {
                        if mw.a[i] == 0 || mw.weight(wd) < 2 {
                            continue;
                        }
                        let mut dm = *mw;
                        dm.a[i] -= 1;
                        let factor = f64::from(mw.a[i]);
                        for (mg, gv) in gi {
                            let target = dm.times(mg);
                            if target.weight(wd) != k {
                                continue;
                            }
                            let e = h[c].terms.entry(target).or_default();
                            for (md, v) in f {
                                *e.entry(*md).or_insert(0.0) += factor * gv * v;
                            }
                        }
                    }
                }
            }
            let mut monos: Vec<Mono> = nl[0]
                .at_weight(wd, k)
                .chain(nl[1].at_weight(wd, k))
                .chain(h[0].at_weight(wd, k))
                .chain(h[1].at_weight(wd, k))
                .map(|(m, _)| *m)
                .filter(|m| m.degree() >= 1)
                .collect();
            monos.sort();
            monos.dedup();
            for mono in monos {
                let mut modes: Vec<Mode> = Vec::new();
                for s in [&nl[0], &nl[1], &h[0], &h[1]] {
                    if let Some(f) = s.terms.get(&mono) {
                        modes.extend(f.keys().copied());
                    }
                }
                modes.sort();
                modes.dedup();
                let get = |s: &Series, md: Mode| s.terms.get(&mono).and_then(|f| f.get(&md)).copied().unwrap_or(0.0);
                for md in modes {
                    let rv = [get(&nl[0], md) - get(&h[0], md), get(&nl[1], md) - get(&h[1], md)];
                    let x = if let Some(i) = self.crit.iter().position(|&c| c == md) {
                        let gv = psi[0] * rv[0] + psi[1] * rv[1];
                        if gv != 0.0 {
                            g[i].insert(mono, gv);
                        }
                        let rhs = [gv * rho[0] - rv[0], gv * rho[1] - rv[1]];
                        let scale = rv[0].abs().max(rv[1].abs()).max(f64::MIN_POSITIVE);
                        max_resid = max_resid.max((psi[0] * rhs[0] + psi[1] * rhs[1]).abs() / scale);
                        solve_singular(&m_crit, &rho, rhs)?
                    } else {
                        if md != (0, 0) && self.metric.exact(md) == k2c {
                            return Err(Error::ModeConfiguration(format!(
                                "mode {md:?} is critical but not in the critical set"
                            )));
                        }
                        solve2(&self.op(&lin, md), [-rv[0], -rv[1]]).ok_or(Error::Resonant)?
                    };
                    for c in 0..2 {
                        if x[c] != 0.0 {
                            w[c].terms.entry(mono).or_default().insert(md, x[c]);
                        }
                    }
                }
            }
        }
        Ok(Expansion {
            g,
            w,
            kernel,
            lin,
            solvability_residual: max_resid,
        })
    }
}

/// Minimum-norm solution of the rank-one system `m x = rhs` with `x · rho = 0`.
pub(crate) fn solve_singular(m: &Mat2, rho: &[f64; 2], rhs: [f64; 2]) -> Result<[f64; 2]> {
    let n0 = m[0][0].hypot(m[0][1]);
    let n1 = m[1][0].hypot(m[1][1]);
    let row = if n0 >= n1 { 0 } else { 1 };
    let sys = [[m[row][0], m[row][1]], [rho[0], rho[1]]];
    solve2(&sys, [rhs[row], 0.0]).ok_or(Error::NotRankDeficient { det: 0.0 })
}
