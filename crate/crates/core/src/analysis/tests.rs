use super::*;
use approx::assert_relative_eq;
use std::f64::consts::PI;

#[test]
fn spectrum_recovers_planted_modes_and_parseval() {
    let grid = Grid::rectangle(2.0 * PI, 4.0 * PI, 32, 64).unwrap();
    let (xs, ys) = (grid.xs(), grid.ys());
    let mut data = Vec::new();
    for y in &ys {
        for x in &xs {
            data.push(3.0 + 0.5 * (3.0 * x).cos() + 0.2 * (2.0 * x).cos() * (y).cos());
        }
    }
    let s = cosine_spectrum(&grid, &data, DOMINANT_FRACTION).unwrap();
    assert_relative_eq!(s.mean, 3.0, epsilon = 1e-12);
    // x has period 2π so cos(3x) is p = 6; y ∈ [0, 4π] so cos(y) is q = 4.
    assert_relative_eq!(s.coefficient(6, 0), 0.5, epsilon = 1e-12);
    assert_relative_eq!(s.coefficient(4, 4), 0.2, epsilon = 1e-12);
    assert_eq!(s.dominant_modes(), vec![(6, 0), (4, 4)]);
    let direct: f64 = data.iter().map(|v| v * v).sum();
    assert_relative_eq!(s.energy(), direct, max_relative = 1e-12);
}

#[test]
fn spectrum_rejects_radial_and_bad_length() {
    let radial = Grid::radial(10.0, 32).unwrap();
    assert!(cosine_spectrum(&radial, &vec![0.0; 32], 0.05).is_err());
    let line = Grid::line(10.0, 32).unwrap();
    assert_eq!(cosine_spectrum(&line, &[0.0; 5], 0.05), Err(Error::GridMismatch));
}

#[test]
fn l1_of_shift_is_length_times_shift() {
    let grid = Grid::line(5.0, 64).unwrap();
    let a = Field::constant(&grid, 1.0, 2.0);
    let b = Field::constant(&grid, 1.25, 2.0);
    assert_relative_eq!(l1_distance(&grid, &a, &b).unwrap(), 1.25, epsilon = 1e-12);
}

#[test]
fn envelope_of_modulated_carrier() {
    let kc = 4.0;
    let n = 4096;
    let len = 40.0;
    let x: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * len / n as f64).collect();
    let a = |x: f64| 0.3 / ((x - 20.0) / 4.0).cosh();
    let f: Vec<f64> = x.iter().map(|&x| 1.0 + 0.01 * x + a(x) * (kc * x).cos()).collect();
    let env = envelope_1d(&x, &f, kc).unwrap();
    for (xi, ai) in env.x.iter().zip(&env.amplitude) {
        if (*xi - 20.0).abs() < 8.0 {
            assert!((ai - a(*xi)).abs() < 0.02 * 0.3, "x = {xi}: {ai} vs {}", a(*xi));
        }
    }
    assert!(envelope_1d(&x[..3], &[0.0, 1.0, 2.0], kc).is_err());
}

#[test]
fn translating_front_speed() {
    let kc = 3.0;
    let x: Vec<f64> = (0..4000).map(|i| i as f64 * 0.02).collect();
    let speed = 0.35;
    let series: Vec<(f64, Envelope)> = (0..10)
        .map(|k| {
            let t = 10.0 * k as f64;
            let front = 30.0 + speed * t;
            let f: Vec<f64> = x
                .iter()
                .map(|&x| 0.5 * (1.0 - ((x - front) / 2.0).tanh()) * (kc * x).cos())
                .collect();
            (t, envelope_1d(&x, &f, kc).unwrap())
        })
        .collect();
    let rep = front_position(&series, 0.5).unwrap();
    let v = rep.right_speed.unwrap();
    assert!((v - speed).abs() < 0.01 * speed, "speed {v}");
    assert!(rep.left_speed.is_none());
}

#[test]
fn no_crossing_is_reported() {
    let x: Vec<f64> = (0..100).map(|i| i as f64 * 0.1).collect();
    let f: Vec<f64> = x.iter().map(|x| 0.1 * (5.0 * x).cos()).collect();
    let env = envelope_1d(&x, &f, 5.0).unwrap();
    assert_eq!(front_position(&[(0.0, env)], 0.5), Err(Error::NoCrossing));
}

#[test]
fn core_match_recovers_bessel_profile() {
    let kc = 1.0;
    let grid = Grid::radial(4.0 * PI * 4.0, 512).unwrap();
    let u: Vec<f64> = grid.xs().iter().map(|r| 2.0 + 0.07 * bessel_j0(kc * r) + 0.001).collect();
    let m = core_match(&grid, &u, 2.0, kc, 0.1).unwrap();
    assert_relative_eq!(m.c, 0.07, max_relative = 1e-10);
    assert_relative_eq!(m.offset, 0.001, epsilon = 1e-10);
    assert!(m.residual < 1e-10 && !m.low_confidence);
    assert_eq!(m.sign, 1.0);
}

#[test]
fn scaling_exponent_of_power_law() {
    let eps = [0.4, 0.2, 0.1, 0.05];
    let c: Vec<f64> = eps.iter().map(|e: &f64| 0.3 * e.powf(1.5)).collect();
    assert_relative_eq!(scaling_exponent(&eps, &c), 1.5, epsilon = 1e-12);
}

#[test]
fn small_r_fit_recovers_coefficients() {
    let (a, b) = (0.3, -0.2);
    let r: Vec<f64> = (1..20).map(|i| i as f64 * 0.01).collect();
    let y: Vec<f64> = r.iter().map(|r| a + b * r + a * a * a * r * r.ln()).collect();
    let (fa, fb, rms) = small_r_fit(&r, &y).unwrap();
    assert_relative_eq!(fa, a, epsilon = 1e-10);
    assert_relative_eq!(fb, b, epsilon = 1e-9);
    assert!(rms < 1e-12);
}
