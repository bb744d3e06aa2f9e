//! Direct simulation of the rescaled reaction–diffusion system.

mod grid;
pub mod io;
mod ops;
mod stepper;
pub mod transform;

pub use grid::{Field, Geometry, Grid};
pub use ops::{Laplacian, Rhs, Scheme};
pub use stepper::{Integrator, StepControl, StepStats};
pub use transform::CosineTransform;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::NondimParams;
use stepper::Stepper;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    Steady,
    /// Independent uniform noise in `[−amp, amp]` on both species at every node.
    Random { amp: f64 },
    /// Gaussian `amp·exp(−d²/width²)` in `u`, centred in the domain (at `r = 0` when radial).
    Pulse { amp: f64, width: f64 },
    /// Smooth bump `amp·cos²(πd/2width)` for `d < width`, centred as for `Pulse`.
    Bump { amp: f64, width: f64 },
    /// `amp·cos(pπx/Lx)·cos(qπy/Ly)` in `u`.
    Mode { amp: f64, p: u32, q: u32 },
}

impl InitialCondition {
    fn amp(&self) -> f64 {
        match *self {
            InitialCondition::Steady => 0.0,
            InitialCondition::Random { amp }
            | InitialCondition::Pulse { amp, .. }
            | InitialCondition::Bump { amp, .. }
            | InitialCondition::Mode { amp, .. } => amp,
        }
    }
}

/// Distance from the seeding point for pulses and bumps.
fn centre_distance(grid: &Grid, i: usize, j: usize) -> f64 {
    match grid.geometry {
        Geometry::Radial => grid.x(i),
        Geometry::Line => grid.x(i) - 0.5 * grid.lengths[0],
        Geometry::Rectangle => (grid.x(i) - 0.5 * grid.lengths[0]).hypot(grid.y(j) - 0.5 * grid.lengths[1]),
    }
}

/// Steady state plus the requested perturbation.
pub fn make_initial(np: &NondimParams, grid: &Grid, ic: &InitialCondition, seed: u64) -> Result<Field> {
    grid.validate()?;
    let ss = np.steady_state();
    let amp = ic.amp();
    if !(amp.is_finite() && amp >= 0.0) {
        return Err(Error::domain("amp", amp, "must be finite and nonnegative"));
    }
    if amp >= ss.u_bar.min(ss.v_bar) {
        return Err(Error::Positivity { t: 0.0, min: ss.u_bar.min(ss.v_bar) - amp });
    }
    let mut f = Field::constant(grid, ss.u_bar, ss.v_bar);
    let [nx, ny] = grid.n;
    match *ic {
        InitialCondition::Steady => {}
        InitialCondition::Random { amp } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for x in f.u.iter_mut() {
                *x += amp * rng.gen_range(-1.0..=1.0);
            }
            for x in f.v.iter_mut() {
                *x += amp * rng.gen_range(-1.0..=1.0);
            }
        }
        InitialCondition::Pulse { amp, width } | InitialCondition::Bump { amp, width } => {
            if !(width > 0.0) {
                return Err(Error::domain("width", width, "must be positive"));
            }
            let gauss = matches!(ic, InitialCondition::Pulse { .. });
            for j in 0..ny {
                for i in 0..nx {
                    let d = centre_distance(grid, i, j);
                    let s = if gauss {
                        (-(d / width).powi(2)).exp()
                    } else if d.abs() < width {
                        (0.5 * std::f64::consts::PI * d / width).cos().powi(2)
                    } else {
                        0.0
                    };
                    f.u[j * nx + i] += amp * s;
                }
            }
        }
        InitialCondition::Mode { amp, p, q } => {
            let kx = p as f64 * std::f64::consts::PI / grid.lengths[0];
            let ky = if ny > 1 { q as f64 * std::f64::consts::PI / grid.lengths[1] } else { 0.0 };
            for j in 0..ny {
                for i in 0..nx {
                    f.u[j * nx + i] += amp * (kx * grid.x(i)).cos() * (ky * grid.y(j)).cos();
                }
            }
        }
    }
    f.check(grid, 0.0)?;
    Ok(f)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub t_end: f64,
    pub snap_every: f64,
    pub scheme: Scheme,
    pub control: StepControl,
    pub initial: InitialCondition,
    pub seed: u64,
    /// 2/3 truncation of the transformed diffusion potentials (spectral only).
    pub dealias: bool,
    /// Switches the kinetics off (pure nonlinear diffusion).
    pub reaction: bool,
    /// Stop early once `max |∂_t u|, |∂_t v|` at a snapshot falls below this.
    pub steady_tol: Option<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            t_end: 10.0,
            snap_every: 1.0,
            scheme: Scheme::Spectral,
            control: StepControl::default(),
            initial: InitialCondition::Steady,
            seed: 0,
            dealias: false,
            reaction: true,
            steady_tol: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        if !(self.snap_every > 0.0) {
            return Err(Error::Config(format!("snap_every must be positive, got {}", self.snap_every)));
        }
        let s = self.control.cfl_safety;
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::Config(format!("CFL safety factor {s} must lie in (0, 1]")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub t: f64,
    pub field: Field,
    /// `max |∂_t u|, |∂_t v|` at this time.
    pub rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalanceSample {
    pub t: f64,
    /// `∫(u + η²v)`
    pub mass: f64,
    /// `∫₀ᵗ Γ∫(Q − u)` accumulated by the integrator.
    pub reaction: f64,
    pub u_integral: f64,
    pub v_integral: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotSeries {
    pub params: NondimParams,
    pub grid: Grid,
    /// Scheme actually used (radial runs always use finite volumes).
    pub scheme: Scheme,
    pub seed: u64,
    pub snapshots: Vec<Snapshot>,
    pub balance: Vec<BalanceSample>,
    pub stats: StepStats,
    pub settled: bool,
}

impl SnapshotSeries {
    pub fn last(&self) -> &Snapshot {
        self.snapshots.last().expect("series holds the initial snapshot")
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.t).collect()
    }
}

fn balance_sample(np: &NondimParams, grid: &Grid, y: &[f64], t: f64) -> BalanceSample {
    let n = grid.len();
    let ui = grid.integrate(&y[..n]);
    let vi = grid.integrate(&y[n..2 * n]);
    BalanceSample {
        t,
        mass: ui + np.eta2() * vi,
        reaction: y[2 * n],
        u_integral: ui,
        v_integral: vi,
    }
}

/// Runs `cfg` from the initial condition it names.
pub fn simulate(np: &NondimParams, grid: &Grid, cfg: &SimConfig) -> Result<SnapshotSeries> {
    let init = make_initial(np, grid, &cfg.initial, cfg.seed)?;
    simulate_from(np, grid, cfg, init)
}

/// Axisymmetric run; `grid` must be radial.
pub fn simulate_radial(np: &NondimParams, grid: &Grid, cfg: &SimConfig) -> Result<SnapshotSeries> {
    if grid.geometry != Geometry::Radial {
        return Err(Error::Grid("simulate_radial needs a radial grid".into()));
    }
    simulate(np, grid, cfg)
}

/// Runs from an explicit initial field.
pub fn simulate_from(np: &NondimParams, grid: &Grid, cfg: &SimConfig, init: Field) -> Result<SnapshotSeries> {
    np.validate()?;
    grid.validate()?;
    cfg.validate()?;
    init.check(grid, 0.0)?;
    let scheme = if grid.geometry == Geometry::Radial {
        Scheme::FiniteDifference
    } else {
        cfg.scheme
    };
    let mut rhs = Rhs::new(np, grid, scheme, cfg.dealias, cfg.reaction);
    let n = grid.len();
    let mut y = Vec::with_capacity(2 * n + 1);
    y.extend_from_slice(&init.u);
    y.extend_from_slice(&init.v);
    y.push(0.0);
    let [hx, hy] = grid.spacing();
    let h2 = if grid.dimension() == 2 { hx.min(hy).powi(2) } else { hx * hx };
    let mut stepper = Stepper::new(&mut rhs, cfg.control, h2, grid.dimension());
    let mut t = 0.0;
    let mut dt = 0.0;
    // Evaluates F at t = 0 for the first snapshot's rate.
    stepper.advance(&mut y, &mut t, 0.0, &mut dt)?;
    let rate = |d: &[f64]| d[..2 * n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut snapshots = vec![Snapshot {
        t: 0.0,
        field: init,
        rate: rate(stepper.derivative()),
    }];
    let mut balance = vec![balance_sample(np, grid, &y, 0.0)];
    let mut settled = false;
    let mut k = 1u64;
    while t < cfg.t_end {
        let target = (k as f64 * cfg.snap_every).min(cfg.t_end);
        k += 1;
        stepper.advance(&mut y, &mut t, target, &mut dt)?;
        let r = rate(stepper.derivative());
        snapshots.push(Snapshot {
            t,
            field: Field {
                u: y[..n].to_vec(),
                v: y[n..2 * n].to_vec(),
            },
            rate: r,
        });
        balance.push(balance_sample(np, grid, &y, t));
        if let Some(tol) = cfg.steady_tol {
            if r < tol {
                settled = true;
                break;
            }
        }
    }
    let stats = stepper.stats;
    Ok(SnapshotSeries {
        params: *np,
        grid: *grid,
        scheme,
        seed: cfg.seed,
        snapshots,
        balance,
        stats,
        settled,
    })
}

/// `(d/dt ∫(u + η²v) − Γ∫(Q − u))` over each snapshot interval, relative to `|∫(u + η²v)|`.
pub fn mass_balance(series: &SnapshotSeries) -> Vec<f64> {
    series
        .balance
        .windows(2)
        .map(|w| {
            let dt = w[1].t - w[0].t;
            let scale = w[0].mass.abs().max(f64::MIN_POSITIVE);
            ((w[1].mass - w[0].mass) - (w[1].reaction - w[0].reaction)) / (dt * scale)
        })
        .collect()
}

#[cfg(test)]
mod tests;
