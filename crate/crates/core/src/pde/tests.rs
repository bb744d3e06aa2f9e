use super::*;
use crate::linstab::turing_threshold;
use std::f64::consts::PI;

fn fig31(eps: f64) -> NondimParams {
    let np = NondimParams::from_squares(3.0, 0.36, 1.0, 80.0, 1.0, 1.0).unwrap();
    let bc = turing_threshold(&np).unwrap().b_turing;
    np.with_b(bc * (1.0 + eps * eps))
}

fn cfg(t_end: f64, initial: InitialCondition) -> SimConfig {
    SimConfig {
        t_end,
        snap_every: t_end / 4.0,
        initial,
        ..SimConfig::default()
    }
}

#[test]
fn grid_validation() {
    assert!(Grid::line(1.0, 15).is_err());
    assert!(Grid::line(1.0, 18).is_ok());
    assert!(Grid::line(1.0, 17).is_err());
    assert!(Grid::rectangle(1.0, -1.0, 16, 16).is_err());
    let g = Grid::radial(2.0, 16).unwrap();
    let area: f64 = g.weights().iter().sum();
    assert!((area - PI * 4.0).abs() < 1e-12);
}

#[test]
fn laplacians_on_known_functions() {
    let g = Grid::line(2.0, 64).unwrap();
    let k = 3.0 * PI / 2.0;
    let f: Vec<f64> = g.xs().iter().map(|x| (k * x).cos()).collect();
    let mut out = vec![0.0; 64];
    let mut sp = Laplacian::new(&g, Scheme::Spectral, false);
    sp.apply(&mut f.clone(), &mut out);
    for (o, fi) in out.iter().zip(&f) {
        assert!((o + k * k * fi).abs() < 1e-10);
    }
    let mut fd = Laplacian::new(&g, Scheme::FiniteDifference, false);
    fd.apply(&mut f.clone(), &mut out);
    let h = g.spacing()[0];
    // Symbol of the three-point stencil: −(2 sin(kh/2)/h)².
    let sym = (2.0 * (0.5 * k * h).sin() / h).powi(2);
    for (o, fi) in out.iter().zip(&f) {
        assert!((o + sym * fi).abs() < 1e-9);
    }
    let r = Grid::radial(3.0, 32).unwrap();
    let mut p: Vec<f64> = r.xs().iter().map(|x| x * x).collect();
    let mut lap = Laplacian::new(&r, Scheme::Spectral, false);
    lap.apply(&mut p, &mut out[..32]);
    for o in &out[..31] {
        assert!((o - 4.0).abs() < 1e-10, "{o}");
    }
}

#[test]
fn steady_state_is_preserved() {
    let np = fig31(0.1);
    let ss = np.steady_state();
    let grids = [
        (Grid::line(2.0 * PI, 64).unwrap(), Scheme::Spectral),
        (Grid::line(2.0 * PI, 64).unwrap(), Scheme::FiniteDifference),
        (Grid::rectangle(PI, PI, 16, 16).unwrap(), Scheme::Spectral),
        (Grid::radial(PI, 32).unwrap(), Scheme::FiniteDifference),
    ];
    for (g, scheme) in grids {
        let c = SimConfig {
            scheme,
            ..cfg(10.0, InitialCondition::Steady)
        };
        let s = simulate(&np, &g, &c).unwrap();
        let f = &s.last().field;
        let dev = f.sup_distance(&Field::constant(&g, ss.u_bar, ss.v_bar));
        assert!(dev < 1e-10, "{:?}: {dev}", g.geometry);
        assert_eq!(s.last().t, 10.0);
    }
}

#[test]
fn random_initial_data_is_seeded() {
    let np = fig31(0.1);
    let g = Grid::rectangle(PI, PI, 16, 16).unwrap();
    let ic = InitialCondition::Random { amp: 1e-3 };
    let a = make_initial(&np, &g, &ic, 7).unwrap();
    let b = make_initial(&np, &g, &ic, 7).unwrap();
    let c = make_initial(&np, &g, &ic, 8).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(matches!(
        make_initial(&np, &g, &InitialCondition::Random { amp: 10.0 }, 0),
        Err(Error::Positivity { .. })
    ));
}

#[test]
fn pulse_mass_matches_quadrature() {
    let np = fig31(0.1);
    let g = Grid::line(20.0, 400).unwrap();
    let (amp, w) = (0.2, 1.0);
    let f = make_initial(&np, &g, &InitialCondition::Pulse { amp, width: w }, 0).unwrap();
    let excess = g.integrate(&f.u) - np.q * 20.0;
    // ∫ amp·exp(−x²/w²) over (−10, 10) = amp·w·√π up to erfc(10) ≈ 2e-45.
    assert!((excess - amp * w * PI.sqrt()).abs() < 1e-12, "{excess}");
}

#[test]
fn mass_balance_closes() {
    let np = fig31(0.1);
    let g = Grid::line(2.0 * PI, 64).unwrap();
    let s = simulate(&np, &g, &cfg(2.0, InitialCondition::Random { amp: 1e-2 })).unwrap();
    for r in mass_balance(&s) {
        assert!(r.abs() < 1e-6, "{r}");
    }
    let r = Grid::radial(2.0 * PI, 64).unwrap();
    let s = simulate(&np, &r, &cfg(2.0, InitialCondition::Bump { amp: 0.1, width: 1.0 })).unwrap();
    for x in mass_balance(&s) {
        assert!(x.abs() < 1e-6, "{x}");
    }
}

#[test]
fn pure_diffusion_conserves_each_species() {
    let np = fig31(0.1);
    for g in [Grid::line(2.0 * PI, 64).unwrap(), Grid::radial(PI, 32).unwrap(), Grid::rectangle(PI, 2.0, 16, 20).unwrap()] {
        let c = SimConfig {
            reaction: false,
            ..cfg(1.0, InitialCondition::Pulse { amp: 0.5, width: 0.5 })
        };
        let s = simulate(&np, &g, &c).unwrap();
        let (b0, b1) = (s.balance[0], *s.balance.last().unwrap());
        assert!((b1.u_integral - b0.u_integral).abs() < 1e-8 * b0.u_integral);
        assert!((b1.v_integral - b0.v_integral).abs() < 1e-8 * b0.v_integral);
        assert!(b1.reaction == 0.0);
    }
}

fn smooth_run(scheme: Scheme, n: usize, integrator: Integrator) -> Vec<f64> {
    let np = fig31(0.1);
    let g = Grid::line(2.0 * PI, n).unwrap();
    let c = SimConfig {
        scheme,
        control: StepControl {
            integrator,
            rtol: 1e-10,
            atol: 1e-12,
            ..StepControl::default()
        },
        ..cfg(1.0, InitialCondition::Pulse { amp: 0.05, width: 1.0 })
    };
    simulate(&np, &g, &c).unwrap().last().field.u.clone()
}

/// Evaluates the cosine interpolant of cell data `f` on `[0, 2π]` at `m` cell centres.
fn interpolate(f: &[f64], m: usize) -> Vec<f64> {
    let mut c = f.to_vec();
    CosineTransform::new(f.len(), 1).forward(&mut c);
    let g = Grid::line(2.0 * PI, m).unwrap();
    g.xs()
        .iter()
        .map(|x| c.iter().enumerate().map(|(p, cp)| cp * (p as f64 * x / 2.0).cos()).sum())
        .collect()
}

fn sup(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn schemes_agree_and_converge() {
    let sp = smooth_run(Scheme::Spectral, 64, Integrator::Rkc);
    let sp2 = smooth_run(Scheme::Spectral, 128, Integrator::Rkc);
    assert!(sup(&interpolate(&sp, 128), &sp2) < 1e-6);
    let fd = smooth_run(Scheme::FiniteDifference, 128, Integrator::Rkc);
    let fd2 = smooth_run(Scheme::FiniteDifference, 256, Integrator::Rkc);
    let e2 = sup(&fd2, &interpolate(&sp2, 256));
    assert!(e2 < 1e-4, "{e2}");
    let ratio = sup(&fd, &sp2) / e2;
    assert!(ratio > 3.5 && ratio < 4.5, "{ratio}");
    let bs = smooth_run(Scheme::Spectral, 64, Integrator::Bs23);
    assert!(sup(&bs, &sp) < 1e-7, "{}", sup(&bs, &sp));
}

#[test]
fn symmetric_data_stays_symmetric() {
    let np = fig31(0.1);
    for (g, scheme) in [
        (Grid::line(2.0 * PI, 64).unwrap(), Scheme::Spectral),
        (Grid::rectangle(PI, PI, 16, 16).unwrap(), Scheme::FiniteDifference),
    ] {
        let c = SimConfig {
            scheme,
            ..cfg(2.0, InitialCondition::Pulse { amp: 0.3, width: 0.7 })
        };
        let s = simulate(&np, &g, &c).unwrap();
        let u = &s.last().field.u;
        let [nx, ny] = g.n;
        for j in 0..ny {
            for i in 0..nx {
                let a = u[j * nx + i];
                let b = u[j * nx + nx - 1 - i];
                assert!((a - b).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn snapshot_round_trip() {
    let np = fig31(0.1);
    let g = Grid::rectangle(PI, PI, 16, 16).unwrap();
    let s = simulate(&np, &g, &cfg(0.5, InitialCondition::Random { amp: 1e-3 })).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let files = io::write_series(dir.path(), &s).unwrap();
    assert_eq!(files.len(), 3 * s.snapshots.len() + 1);
    let back = io::read_series(dir.path()).unwrap();
    assert_eq!(back, s);
    assert!(io::profile_csv(&g, &s.last().field).starts_with("x,u,v\n"));
}

#[test]
fn config_validation() {
    let mut c = SimConfig::default();
    c.control.cfl_safety = 1.5;
    assert!(c.validate().is_err());
    c.control.cfl_safety = 0.5;
    c.t_end = -1.0;
    assert!(c.validate().is_err());
}
