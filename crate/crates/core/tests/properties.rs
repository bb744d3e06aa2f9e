//! Property tests over randomly drawn parameters and fields.

use brusselator::amplitude::{equilibria, integrate_amplitude, integrate_gl, GlGrid, OdeOptions, Stability};
use brusselator::analysis::{bessel_j0, cosine_spectrum};
use brusselator::linstab::{growth_rates, linearize, max_growth, turing_threshold, Domain};
use brusselator::model::{nondimensionalize, NondimParams, PhysicalParams};
use brusselator::pde::{simulate, CosineTransform, Grid, InitialCondition, SimConfig};
use brusselator::wnl::{critical_kernels, stuart_landau_coeffs, wnl_solution, Coefficients};
use proptest::prelude::*;

fn params() -> impl Strategy<Value = NondimParams> {
    (0.05f64..8.0, 0.05f64..1.5, 1.0f64..20.0, 1.0f64..1000.0, 0.0f64..3.0, 0.0f64..3.0)
        .prop_map(|(q2, e2, b, g, m, n)| NondimParams::from_squares(q2, e2, b, g, m, n).unwrap())
}

/// Parameters whose Turing threshold exists and precedes the Hopf one.
fn turing_params() -> impl Strategy<Value = NondimParams> {
    params().prop_filter_map("no Turing branch", |p| {
        let th = turing_threshold(&p).ok()?;
        (th.b_turing < th.b_hopf).then(|| p.with_b(th.b_turing))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn kinetics_vanish_at_the_steady_state(p in params()) {
        let ss = p.steady_state();
        let (f, g) = p.kinetics(ss.u_bar, ss.v_bar);
        let scale = p.gamma * (p.q + (p.b + 1.0) * p.q) / p.eta2().min(1.0);
        prop_assert!(f.abs() <= 1e-14 * scale && g.abs() <= 1e-14 * scale);
    }

    #[test]
    fn kinetic_identity(p in params(), u in 0.01f64..10.0, v in 0.01f64..10.0) {
        let (f, g) = p.kinetics(u, v);
        let lhs = f + p.eta2() * g;
        let rhs = p.gamma * (p.q - u);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (f.abs() + rhs.abs() + 1.0));
    }

    #[test]
    fn physical_round_trip(
        d_u in 0.01f64..10.0, d_v in 0.01f64..10.0, u0 in 0.1f64..5.0, v0 in 0.1f64..5.0,
        a in 0.1f64..5.0, b in 0.5f64..10.0, gamma in 1.0f64..500.0, m in 0.0f64..3.0, n in 0.0f64..3.0,
    ) {
        let phys = PhysicalParams { d_u, d_v, u0, v0, a, b, gamma, m, n };
        let (np, scales) = nondimensionalize(&phys).unwrap();
        prop_assert!(((scales.physical_a(&np) - a) / a).abs() < 1e-12);
        prop_assert!(((np.gamma - gamma) / gamma).abs() < 1e-12);
        prop_assert!((np.eta * scales.u_star - 1.0).abs() < 1e-12);
    }

    #[test]
    fn growth_rates_solve_the_dispersion_relation(p in params(), k2 in 0.0f64..500.0) {
        prop_assert!(growth_rates(&p, k2).residual() < 1e-12);
    }

    #[test]
    fn threshold_invariant_under_eta_and_gamma(
        q2 in 0.1f64..8.0, m in 0.0f64..2.5, n in 0.0f64..2.5,
        e1 in 0.05f64..0.5, e2 in 0.5f64..5.0, g1 in 1.0f64..30.0, g2 in 30.0f64..3000.0,
    ) {
        let a = NondimParams::from_squares(q2, e1, 2.0, g1, m, n).unwrap();
        let b = NondimParams::from_squares(q2, e2, 2.0, g2, m, n).unwrap();
        if let (Ok(ta), Ok(tb)) = (turing_threshold(&a), turing_threshold(&b)) {
            prop_assert!((ta.b_turing - tb.b_turing).abs() <= 1e-9 * ta.b_turing);
            prop_assert!((ta.kc2 / g1 - tb.kc2 / g2).abs() <= 1e-9 * ta.kc2 / g1);
        } else {
            prop_assert!(turing_threshold(&a).is_err() && turing_threshold(&b).is_err());
        }
    }

    #[test]
    fn stable_just_below_both_thresholds(p in turing_params()) {
        let th = turing_threshold(&p).unwrap();
        let below = p.with_b(th.b_turing.min(th.b_hopf) * (1.0 - 1e-3));
        let k_max = 4.0 * th.kc2 + 10.0;
        for i in 0..=400 {
            let k2 = k_max * f64::from(i) / 400.0;
            prop_assert!(max_growth(&below, k2) < 0.0, "k2 = {k2}");
        }
    }

    #[test]
    fn h_touches_zero_only_at_kc2(p in turing_params()) {
        let th = turing_threshold(&p).unwrap();
        let lin = linearize(&p);
        let scale = lin.h(0.0).abs().max(1.0);
        prop_assert!(lin.h(th.kc2).abs() <= 1e-7 * scale);
        for f in [0.0, 0.25, 0.5, 0.9, 1.1, 2.0, 4.0] {
            prop_assert!(lin.h(f * th.kc2) >= -1e-9 * scale);
        }
    }

    #[test]
    fn critical_kernels_are_normalized(p in turing_params()) {
        let th = turing_threshold(&p).unwrap();
        let kp = critical_kernels(&p, th.kc2).unwrap();
        let (r, a) = kp.residuals(&linearize(&p).operator(th.kc2));
        prop_assert!(r < 1e-10 && a < 1e-10);
        prop_assert!((kp.rho[0] - 1.0).abs() < 1e-15);
        prop_assert!((kp.pairing() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cubic_sl_growth_is_positive(p in turing_params()) {
        if let Ok(model) = stuart_landau_coeffs(&p, None) {
            if let Coefficients::CubicSl { sigma, .. } = model.coefficients {
                prop_assert!(sigma > 0.0);
            }
        }
    }

    #[test]
    fn cosine_round_trip_and_parseval(nx in 16usize..40, ny in 1usize..20, seed in any::<u64>()) {
        use rand::{Rng, SeedableRng};
        let nx = 2 * (nx / 2);
        let ny = if ny < 16 { 1 } else { 2 * (ny / 2) };
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f: Vec<f64> = (0..nx * ny).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut t = CosineTransform::new(nx, ny);
        let mut g = f.clone();
        t.forward(&mut g);
        t.inverse(&mut g);
        let err = f.iter().zip(&g).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);

        let grid = if ny == 1 { Grid::line(3.0, nx).unwrap() } else { Grid::rectangle(3.0, 2.0, nx, ny).unwrap() };
        let s = cosine_spectrum(&grid, &f, 0.05).unwrap();
        let direct: f64 = f.iter().map(|x| x * x).sum();
        prop_assert!((s.energy() - direct).abs() <= 1e-10 * direct);
    }

    #[test]
    fn bessel_equation_residual(x in 0.5f64..60.0) {
        // Coarser steps lose to truncation, finer ones to cancellation in the series.
        let h = 1e-2;
        let f = |d: f64| bessel_j0(x + d * h);
        let d1 = (f(-2.0) - 8.0 * f(-1.0) + 8.0 * f(1.0) - f(2.0)) / (12.0 * h);
        let d2 = (-f(-2.0) + 16.0 * f(-1.0) - 30.0 * f(0.0) + 16.0 * f(1.0) - f(2.0)) / (12.0 * h * h);
        prop_assert!((d2 + d1 / x + f(0.0)).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Equilibria are fixed points when stable and repel a small kick when not.
    #[test]
    fn equilibria_are_consistent_with_the_flow(sigma in 0.1f64..5.0, l in -5.0f64..5.0, r in -5.0f64..-0.1) {
        prop_assume!(l.abs() > 0.05);
        for coeffs in [Coefficients::CubicSl { sigma, l }, Coefficients::QuinticSl { sigma, l, r }] {
            let Ok(eqs) = equilibria(&coeffs) else { continue };
            for e in eqs {
                let opts = OdeOptions::default();
                match e.stability {
                    Stability::Stable => {
                        let tr = integrate_amplitude(&coeffs, &e.values, 100.0, 0.0, &opts).unwrap();
                        let d = tr.last().values.iter().zip(&e.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                        prop_assert!(d < 1e-6, "{} drifted by {d}", e.label);
                    }
                    Stability::Unstable | Stability::Saddle => {
                        let kicked: Vec<f64> = e.values.iter().map(|v| v + 1e-4).collect();
                        let tr = integrate_amplitude(&coeffs, &kicked, 100.0, 0.0, &opts).unwrap();
                        let d = tr.last().values.iter().zip(&e.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                        prop_assert!(tr.diverged() || d > 1e-3, "{} held a kicked state", e.label);
                    }
                    Stability::Marginal => {}
                }
            }
        }
    }

    #[test]
    fn uniform_gl_matches_stuart_landau(sigma in 0.5f64..3.0, l in 0.5f64..3.0, nu in 0.1f64..2.0, a0 in 0.01f64..1.0) {
        let gl = Coefficients::Gl { sigma, l, nu };
        let sl = Coefficients::CubicSl { sigma, l };
        let opts = OdeOptions::default();
        let (snaps, _) = integrate_gl(&gl, &GlGrid::new(32, 5.0).unwrap(), &[a0; 32], 2.0, 2.0, &opts).unwrap();
        let tr = integrate_amplitude(&sl, &[a0], 2.0, 0.0, &opts).unwrap();
        let target = tr.last().values[0];
        for a in &snaps.last().unwrap().values {
            prop_assert!((a - target).abs() < 1e-8);
        }
    }

    /// Order 1 reconstructs only critical modes; order 2 adds the mean and second harmonics.
    #[test]
    fn reconstruction_mode_content(q2 in 1.0f64..6.0, gamma in 10.0f64..200.0, amp in 0.1f64..2.0) {
        let base = NondimParams::from_squares(q2, 0.36, 2.0, gamma, 1.0, 1.0).unwrap();
        let Ok(th) = turing_threshold(&base) else { return Ok(()) };
        prop_assume!(th.b_turing < th.b_hopf);
        let np = base.with_b(th.b_turing * 1.01);
        let domain = Domain::Line { lx: brusselator::linstab::PiLength::pi_multiple(2) };
        let Ok(model) = stuart_landau_coeffs(&np, Some(domain)) else { return Ok(()) };
        let p = model.modes[0].0;
        let one = wnl_solution(&model, &[amp], 1).unwrap();
        let two = wnl_solution(&model, &[amp], 2).unwrap();
        for j in 0..=4 * p {
            let (c1, c2) = (one.coefficient(j, 0).0, two.coefficient(j, 0).0);
            if j != p {
                prop_assert!(c1 == 0.0, "order 1 holds mode {j}");
            }
            if j != 0 && j != p && j != 2 * p {
                prop_assert!(c2 == 0.0, "order 2 holds mode {j}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn steady_state_is_preserved(p in turing_params(), n in 1usize..3) {
        let grid = Grid::line(2.0 * std::f64::consts::PI, 32 * n).unwrap();
        let cfg = SimConfig { t_end: 10.0, snap_every: 10.0, ..SimConfig::default() };
        let run = simulate(&p, &grid, &cfg).unwrap();
        let ss = p.steady_state();
        let d = run.last().field.u.iter().map(|u| (u - ss.u_bar).abs())
            .chain(run.last().field.v.iter().map(|v| (v - ss.v_bar).abs()))
            .fold(0.0, f64::max);
        prop_assert!(d < 1e-10, "drift {d}");
    }

    #[test]
    fn mirror_symmetry_is_preserved(amp in 0.01f64..0.1, width in 0.3f64..1.5) {
        let p = NondimParams::from_squares(3.0, 0.36, 5.6, 8.0, 1.0, 1.0).unwrap();
        let n = 64;
        let grid = Grid::line(2.0 * std::f64::consts::PI, n).unwrap();
        let cfg = SimConfig { t_end: 2.0, snap_every: 2.0, initial: InitialCondition::Pulse { amp, width }, ..SimConfig::default() };
        let run = simulate(&p, &grid, &cfg).unwrap();
        let u = &run.last().field.u;
        let asym = (0..n / 2).map(|i| (u[i] - u[n - 1 - i]).abs()).fold(0.0, f64::max);
        prop_assert!(asym < 1e-9);
    }
}
