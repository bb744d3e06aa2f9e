use super::*;
use crate::linstab::{growth_rates, PiLength};
use approx::assert_relative_eq;

fn at_eps(q2: f64, eta2: f64, gamma: f64, m: f64, n: f64, eps: f64) -> NondimParams {
    let np = NondimParams::from_squares(q2, eta2, 1.0, gamma, m, n).unwrap();
    let bc = turing_threshold(&np).unwrap().b_turing;
    np.with_b(bc * (1.0 + eps * eps))
}

fn supercritical() -> NondimParams {
    at_eps(3.0, 0.36, 80.0, 1.0, 1.0, 0.1)
}

fn subcritical() -> NondimParams {
    at_eps(0.14, 0.36, 150.0, 1.0, 1.0, 0.1)
}

fn sl(model: &AmplitudeModel) -> (f64, f64) {
    match model.coefficients {
        Coefficients::CubicSl { sigma, l } => (sigma, l),
        _ => panic!("not a cubic model"),
    }
}

#[test]
fn kernel_residuals_and_normalization() {
    let np = supercritical();
    let th = turing_threshold(&np).unwrap();
    let at = np.with_b(th.b_turing);
    let kp = critical_kernels(&at, th.kc2).unwrap();
    let (r1, r2) = kp.residuals(&linearize(&at).operator(th.kc2));
    assert!(r1 < 1e-12 && r2 < 1e-12, "{r1} {r2}");
    assert_eq!(kp.rho[0], 1.0);
    assert_relative_eq!(kp.pairing(), 1.0, max_relative = 1e-15);
}

#[test]
fn kernel_of_the_linear_diffusion_case_by_hand() {
    // Q = 1, η² = 1/4, b^c = 4, k_c² = Γ: the operator is Γ [[2, 1], [-16, -8]].
    let np = NondimParams::new(1.0, 0.5, 4.0, 3.0, 0.0, 0.0).unwrap();
    let kp = critical_kernels(&np, 3.0).unwrap();
    assert_relative_eq!(kp.rho[1], -2.0, max_relative = 1e-14);
    // ψ ∝ (8, 1), ⟨ρ, ψ⟩ = 6
    assert_relative_eq!(kp.psi_adj[0], 8.0 / 6.0, max_relative = 1e-14);
    assert_relative_eq!(kp.psi_adj[1], 1.0 / 6.0, max_relative = 1e-14);
}

#[test]
fn kernel_rejects_regular_operator() {
    let np = supercritical();
    assert!(matches!(critical_kernels(&np, 1.0), Err(Error::NotRankDeficient { .. })));
}

#[test]
fn harmonic_solve_zero_and_singular_branch() {
    let np = supercritical();
    let th = turing_threshold(&np).unwrap();
    let at = np.with_b(th.b_turing);
    assert_eq!(solve_harmonic(&at, 4.0 * th.kc2, [0.0, 0.0]).unwrap(), [0.0, 0.0]);
    let lin = linearize(&at);
    let kp = critical_kernels(&at, th.kc2).unwrap();
    let kc = th.kc2.sqrt();
    let rhs = [-2.0 * kc * lin.d[0] * kp.rho[0], -2.0 * kc * lin.d[1] * kp.rho[1]];
    let x = solve_harmonic(&at, th.kc2, rhs).unwrap();
    let m = lin.operator(th.kc2);
    let res = [
        m[0][0] * x[0] + m[0][1] * x[1] - rhs[0],
        m[1][0] * x[0] + m[1][1] * x[1] - rhs[1],
    ];
    let scale = rhs[0].hypot(rhs[1]);
    assert!(res[0].hypot(res[1]) < 1e-12 * scale * 1e2, "{res:?}");
    assert!(dot(x, kp.rho).abs() < 1e-12 * scale);
    // a right-hand side along ρ is not solvable
    assert!(matches!(
        solve_harmonic(&at, th.kc2, kp.rho),
        Err(Error::Solvability { .. })
    ));
}

#[test]
fn second_harmonic_matches_dense_solve() {
    let np = supercritical();
    let model = stuart_landau_coeffs(&np, None).unwrap();
    let th = turing_threshold(&np).unwrap();
    let at = np.with_b(th.b_turing);
    let (q, eta2, g) = (at.q, at.eta2(), at.gamma);
    let rho = model.kernel.rho;
    let vb = th.b_turing / q;
    // cos² = (1 + cos 2kx)/2: quadratic kinetics and diffusion forcing at 2k_c
    let kin = 0.5 * (2.0 * q * rho[0] * rho[1] + vb * rho[0] * rho[0]);
    let k2 = 4.0 * th.kc2;
    let du = 0.5 * q.powf(0.0) * rho[0] * rho[0];
    let dv = 0.5 / eta2 * rho[1] * rho[1];
    let forcing = nalgebra::Vector2::new(g * kin - k2 * du, -g / eta2 * kin - k2 * dv);
    let m = linearize(&at).operator(k2);
    let mm = nalgebra::Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1]);
    let x = mm.lu().solve(&(-forcing)).unwrap();
    let t = model
        .field_terms
        .iter()
        .find(|t| t.alpha == [2] && t.delta_pow == 0 && t.p == 2)
        .unwrap();
    assert_relative_eq!(t.u, x[0], max_relative = 1e-10);
    assert_relative_eq!(t.v, x[1], max_relative = 1e-10);
}

#[test]
fn criticality_signs() {
    let (s1, l1) = sl(&stuart_landau_coeffs(&supercritical(), None).unwrap());
    let (s2, l2) = sl(&stuart_landau_coeffs(&subcritical(), None).unwrap());
    assert!(l1 > 0.0, "L = {l1}");
    assert!(l2 < 0.0, "L = {l2}");
    assert!(s1 > 0.0 && s2 > 0.0);
}

#[test]
fn sigma_matches_growth_rate_derivative() {
    for np in [supercritical(), subcritical()] {
        let th = turing_threshold(&np).unwrap();
        let (sigma, _) = sl(&stuart_landau_coeffs(&np, None).unwrap());
        let h = 1e-6 * th.b_turing;
        let lam = |b: f64| growth_rates(&np.with_b(b), th.kc2).max_real();
        let d = (lam(th.b_turing + h) - lam(th.b_turing - h)) / (2.0 * h);
        assert_relative_eq!(sigma, th.b_turing * d, max_relative = 1e-6);
    }
}

#[test]
fn nu_matches_dispersion_curvature() {
    let np = supercritical().with_gamma(800.0);
    let model = ginzburg_landau_coeffs(&np).unwrap();
    let Coefficients::Gl { nu, .. } = model.coefficients else {
        panic!()
    };
    assert!(nu.is_finite() && nu > 0.0);
    let th = turing_threshold(&np).unwrap();
    let at = np.with_b(th.b_turing);
    let kc = th.kc2.sqrt();
    let h = 1e-3 * kc;
    let lam = |k: f64| growth_rates(&at, k * k).max_real();
    let d2 = (lam(kc + h) - 2.0 * lam(kc) + lam(kc - h)) / (h * h);
    assert_relative_eq!(nu, -0.5 * d2, max_relative = 1e-5);
    assert!(model.w21.is_some());
}

#[test]
fn gl_shares_cubic_coefficients() {
    let np = supercritical();
    let (s, l) = sl(&stuart_landau_coeffs(&np, None).unwrap());
    let Coefficients::Gl { sigma, l: lg, .. } = ginzburg_landau_coeffs(&np).unwrap().coefficients else {
        panic!()
    };
    assert_eq!((s, l), (sigma, lg));
}

#[test]
fn solvability_residual_vanishes() {
    for np in [supercritical(), subcritical()] {
        let m = stuart_landau_coeffs(&np, None).unwrap();
        assert!(m.diagnostics.solvability_residual < 1e-10);
        assert!(m.diagnostics.kernel_residual < 1e-12);
    }
}

#[test]
fn expansion_tables_match_displayed_matrices() {
    let np = supercritical();
    let t = expansion_tables(&np).unwrap();
    let (q, bc) = (np.q, turing_threshold(&np).unwrap().b_turing);
    // m = n = 1: D⁽¹⁾ = diag(1, (b^c/Q)^0 / η²), D⁽²⁾ = 0
    assert_relative_eq!(t.d1[0], 1.0, max_relative = 1e-15);
    assert_relative_eq!(t.d1[1], 1.0 / 0.36, max_relative = 1e-14);
    assert_eq!(t.d2, [0.0, 0.0]);
    assert_relative_eq!(t.quadratic[1], bc / q);
    assert_eq!(t.b_corrections.0, 0.0);
    let np = at_eps(3.5, 0.81, 30.3, 1.0, 2.0, 0.02);
    let t = expansion_tables(&np).unwrap();
    let bc = turing_threshold(&np).unwrap().b_turing;
    assert_relative_eq!(t.d1[1], 3.0 / 0.81 * bc / np.q, max_relative = 1e-13);
    assert_relative_eq!(t.d2[1], 1.0 / 0.81, max_relative = 1e-13);
    let lin = NondimParams::new(1.0, 0.5, 4.0, 3.0, 0.0, 0.0).unwrap();
    let t = expansion_tables(&lin).unwrap();
    assert_eq!(t.d1, [0.0, 0.0]);
    assert_eq!(t.d2, [0.0, 0.0]);
}

#[test]
fn linear_diffusion_has_no_diffusive_nonlinearity() {
    // With m = n = 0 the coefficients depend on the diffusion only through k²:
    // the second harmonic is forced purely by the kinetics.
    let np = NondimParams::new(1.5, 0.5, 6.25 * 1.01, 3.0, 0.0, 0.0).unwrap();
    let model = stuart_landau_coeffs(&np, None).unwrap();
    let th = turing_threshold(&np).unwrap();
    let at = np.with_b(th.b_turing);
    let rho = model.kernel.rho;
    let kin = 0.5 * (3.0 * rho[0] * rho[1] + th.b_turing / 1.5 * rho[0] * rho[0]);
    assert!(kin.abs() > 1e-3);
    let x = solve2(&linearize(&at).operator(4.0 * th.kc2), [-3.0 * kin, 3.0 / 0.25 * kin]).unwrap();
    let t = model.field_terms.iter().find(|t| t.alpha == [2] && t.p == 2).unwrap();
    assert_relative_eq!(t.u, x[0], max_relative = 1e-9);
    assert_relative_eq!(t.v, x[1], max_relative = 1e-9);
}

#[test]
fn gauge_rescaling_keeps_the_pattern() {
    let np = supercritical();
    let (s, _) = setup(&np, None).unwrap();
    let a = run(&s, ModelKind::CubicSl, 1.0).unwrap();
    let b = run(&s, ModelKind::CubicSl, 2.0).unwrap();
    let ((sa, la), (sb, lb)) = (sl(&a), sl(&b));
    assert_relative_eq!(sa, sb, max_relative = 1e-10);
    assert_relative_eq!(lb, 4.0 * la, max_relative = 1e-10);
    // amplitude of the u-component of the saturated pattern is gauge invariant
    let ua = (sa / la).sqrt() * a.kernel.rho[0];
    let ub = (sb / lb).sqrt() * b.kernel.rho[0];
    assert_relative_eq!(ua, ub, max_relative = 1e-10);
}

#[test]
fn quintic_saddle_node_below_threshold() {
    let np = at_eps(0.14, 0.36, 150.0, 1.0, 1.0, 0.01);
    let model = quintic_coeffs(&np, None).unwrap();
    let Coefficients::QuinticSl { sigma, l, r } = model.coefficients else {
        panic!()
    };
    assert!(sigma > 0.0 && l < 0.0 && r < 0.0);
    let bs = quintic_saddle_node(&model).unwrap();
    assert!((bs - 1.2634).abs() / 1.2634 < 1e-3, "b^s = {bs}");
    assert!(bs < model.b_c);
}

#[test]
fn quintic_reduces_to_cubic_as_eps_vanishes() {
    let base = quintic_coeffs(&at_eps(0.14, 0.36, 150.0, 1.0, 1.0, 0.1), None).unwrap();
    let (sc, lc) = sl(&stuart_landau_coeffs(&subcritical(), None).unwrap());
    let mut prev: Option<f64> = None;
    for eps in [0.1, 0.05, 0.025] {
        let m = base.at_b(base.b_c * (1.0 + eps * eps)).unwrap();
        let Coefficients::QuinticSl { sigma, l, r } = m.coefficients else {
            panic!()
        };
        let dev = (sigma / sc - 1.0).abs().max((l / lc - 1.0).abs());
        if let Some(p) = prev {
            // O(ε²): halving ε divides the deviation by about four
            assert!((3.0..5.0).contains(&(p / dev)), "eps {eps}: {p} -> {dev}");
        }
        assert!(r < 0.0);
        prev = Some(dev);
    }
}

#[test]
fn quintic_requires_subcritical_parameters() {
    assert!(matches!(quintic_coeffs(&supercritical(), None), Err(Error::NotSubcritical { .. })));
}

fn square(n: i64) -> Domain {
    Domain::Rect {
        lx: PiLength::pi_multiple(n),
        ly: PiLength::pi_multiple(n),
    }
}

#[test]
fn coupled_pair_is_symmetric() {
    let np = at_eps(8.0, 0.36, 11.93, 1.0, 1.0, 0.03);
    let m = coupled_landau_coeffs(&np, square(2)).unwrap();
    let Coefficients::Coupled { sigma, l1, l2, r1, r2 } = m.coefficients else {
        panic!()
    };
    assert!(sigma > 0.0);
    assert_relative_eq!(l1, l2, max_relative = 1e-9);
    assert_relative_eq!(r1, r2, max_relative = 1e-9);
    assert!(m.diagnostics.solvability_residual < 1e-10);
    assert!(m.diagnostics.unmodeled < 1e-8, "{}", m.diagnostics.unmodeled);
}

#[test]
fn coupled_rejects_resonant_pair() {
    let np = at_eps(4.0, 0.3025, 23.054, 1.0, 1.0, 0.01);
    let d = Domain::Rect {
        lx: PiLength::pi_multiple(2),
        ly: "2*sqrt(3)".parse().unwrap(),
    };
    assert_eq!(coupled_landau_coeffs(&np, d), Err(Error::Resonant));
    let m = resonant_coeffs(&np, d).unwrap();
    assert_eq!(m.modes, vec![(3, 9), (6, 0)]);
    let Coefficients::Resonant { sigma1, sigma2, l1, l2, .. } = m.coefficients else {
        panic!()
    };
    assert!(l1.abs() > 1.0 && l2.abs() > 1.0);
    assert!(sigma1 > 0.0 && sigma2 > 0.0);
    assert_relative_eq!(sigma1, sigma2, max_relative = 1e-9);
}

#[test]
fn resonant_rejects_non_resonant_pair() {
    let np = at_eps(8.0, 0.36, 11.93, 1.0, 1.0, 0.03);
    assert_eq!(resonant_coeffs(&np, square(2)), Err(Error::NotResonant));
}

#[test]
fn line_domain_expansion_is_close_to_unbounded_one() {
    let np = supercritical();
    let d = Domain::Line {
        lx: PiLength::pi_multiple(2),
    };
    let (sb, lb) = sl(&stuart_landau_coeffs(&np, Some(d)).unwrap());
    let (su, lu) = sl(&stuart_landau_coeffs(&np, None).unwrap());
    assert_relative_eq!(sb, su, max_relative = 0.05);
    assert_relative_eq!(lb, lu, max_relative = 0.05);
}

#[test]
fn reconstruction_orders() {
    let np = supercritical();
    let m = stuart_landau_coeffs(&np, None).unwrap();
    let zero = wnl_solution(&m, &[0.0], 2).unwrap();
    let ss = np.steady_state();
    assert_eq!(zero.eval(0.3, 0.0), (ss.u_bar, ss.v_bar));
    let r1 = wnl_solution(&m, &[1.0], 1).unwrap();
    assert_eq!(r1.terms.len(), 1);
    let r2 = wnl_solution(&m, &[1.0], 2).unwrap();
    assert!(r2.coefficient(0, 0).0 != 0.0);
    assert!(r2.coefficient(2, 0).0 != 0.0);
    assert_relative_eq!(r2.coefficient(1, 0).0, m.eps, max_relative = 1e-14);
    assert!(wnl_solution(&m, &[1.0, 2.0], 2).is_err());
}

#[test]
fn model_round_trips_through_json() {
    let m = stuart_landau_coeffs(&supercritical(), None).unwrap();
    let s = serde_json::to_string(&m).unwrap();
    let back: AmplitudeModel = serde_json::from_str(&s).unwrap();
    assert_eq!(back.coefficients, m.coefficients);
    assert!(s.contains("\"kind\":\"cubic_sl\""));
}
