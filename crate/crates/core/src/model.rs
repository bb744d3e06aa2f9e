//! Model parameters, rescaling, reaction kinetics and the homogeneous
//! steady state.
//!
//! The library works with the rescaled system
//!
//! ```text
//! u_t = Δ(u^{m+1})          + Γ (Q - (b+1) u + u² v)
//! v_t = (1/η²) Δ(v^{n+1})   + (Γ/η²) (b u - u² v)
//! ```
//!
//! with Neumann boundary conditions. [`PhysicalParams`] is an optional
//! entry point; [`nondimensionalize`] maps it onto [`NondimParams`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the dimensional model with density-dependent diffusion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub d_u: f64,
    pub d_v: f64,
    pub u0: f64,
    pub v0: f64,
    pub a: f64,
    pub b: f64,
    #[serde(rename = "Gamma")]
    pub gamma: f64,
    pub m: f64,
    pub n: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("D_u", self.d_u),
            ("D_v", self.d_v),
            ("u0", self.u0),
            ("v0", self.v0),
            ("a", self.a),
            ("b", self.b),
            ("Gamma", self.gamma),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::domain(name, value, "must be positive and finite"));
            }
        }
        check_exponent("m", self.m)?;
        check_exponent("n", self.n)
    }
}

fn check_exponent(name: &'static str, value: f64) -> Result<()> {
    if !(value.is_finite() && value >= 0.0) {
        return Err(Error::domain(name, value, "must be finite and nonnegative"));
    }
    Ok(())
}

/// Rescaled parameters `(Q, η, b, Γ, m, n)` consumed by every analysis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NondimParams {
    pub q: f64,
    pub eta: f64,
    pub b: f64,
    pub gamma: f64,
    pub m: f64,
    pub n: f64,
}

/// Scale factors `U = u* u`, `V = v* v`, `ζ = x* x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scales {
    pub u_star: f64,
    pub v_star: f64,
    pub x_star: f64,
}

/// The homogeneous stationary solution `(Q, b/Q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SteadyState {
    pub u_bar: f64,
    pub v_bar: f64,
}

impl NondimParams {
    pub fn new(q: f64, eta: f64, b: f64, gamma: f64, m: f64, n: f64) -> Result<Self> {
        let p = NondimParams {
            q,
            eta,
            b,
            gamma,
            m,
            n,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds parameters from the squared values `Q²`, `η²`.
    pub fn from_squares(q2: f64, eta2: f64, b: f64, gamma: f64, m: f64, n: f64) -> Result<Self> {
        if !(q2.is_finite() && q2 > 0.0) {
            return Err(Error::domain("Q2", q2, "must be positive and finite"));
        }
        if !(eta2.is_finite() && eta2 > 0.0) {
            return Err(Error::domain("eta2", eta2, "must be positive and finite"));
        }
        Self::new(q2.sqrt(), eta2.sqrt(), b, gamma, m, n)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("Q", self.q),
            ("eta", self.eta),
            ("b", self.b),
            ("Gamma", self.gamma),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::domain(name, value, "must be positive and finite"));
            }
        }
        check_exponent("m", self.m)?;
        check_exponent("n", self.n)
    }

    pub fn q2(&self) -> f64 {
        self.q * self.q
    }

    pub fn eta2(&self) -> f64 {
        self.eta * self.eta
    }

    /// Same parameters with a different bifurcation parameter.
    pub fn with_b(&self, b: f64) -> Self {
        NondimParams { b, ..*self }
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        NondimParams { gamma, ..*self }
    }

    pub fn steady_state(&self) -> SteadyState {
        steady_state(self)
    }

    pub fn kinetics(&self, u: f64, v: f64) -> (f64, f64) {
        kinetics(self, u, v)
    }

    /// Reaction terms written in the deviations `U = u - Q`, `V = v - b/Q`.
    ///
    /// Algebraically identical to [`kinetics`], but vanishes bit-exactly at
    /// the steady state, which keeps unstable equilibria fixed under
    /// time stepping.
    #[inline]
    pub fn kinetics_deviation(&self, du: f64, dv: f64) -> (f64, f64) {
        let q = self.q;
        let b = self.b;
        let nonlinear = 2.0 * q * du * dv + (b / q) * du * du + du * du * dv;
        let core = (b - 1.0) * du + q * q * dv + nonlinear;
        let f = self.gamma * core;
        let g = -(self.gamma / self.eta2()) * (du + core);
        (f, g)
    }
}

/// Maps physical parameters onto the rescaled model.
pub fn nondimensionalize(p: &PhysicalParams) -> Result<(NondimParams, Scales)> {
    p.validate()?;
    let (m, n) = (p.m, p.n);
    let u_star = ((m + 1.0) * p.d_v * p.u0.powf(m) / ((n + 1.0) * p.d_u * p.v0.powf(n)))
        .powf(1.0 / (m + n + 2.0));
    let v_star = 1.0 / u_star;
    let x_star = (p.d_v / ((n + 1.0) * p.v0.powf(n) * u_star.powf(n + 2.0))).sqrt();
    let eta = 1.0 / u_star;
    let q = p.a / u_star;
    let np = NondimParams::new(q, eta, p.b, p.gamma, m, n)?;
    Ok((
        np,
        Scales {
            u_star,
            v_star,
            x_star,
        },
    ))
}

impl Scales {
    /// Recovers the dimensional constant `a` from `Q`.
    pub fn physical_a(&self, np: &NondimParams) -> f64 {
        np.q * self.u_star
    }
}

/// The two reaction terms of the rescaled system.
pub fn kinetics(np: &NondimParams, u: f64, v: f64) -> (f64, f64) {
    let uuv = u * u * v;
    let f = np.gamma * (np.q - (np.b + 1.0) * u + uuv);
    let g = np.gamma / np.eta2() * (np.b * u - uuv);
    (f, g)
}

pub fn steady_state(np: &NondimParams) -> SteadyState {
    SteadyState {
        u_bar: np.q,
        v_bar: np.b / np.q,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn phys(d_u: f64, d_v: f64, u0: f64, v0: f64, a: f64, m: f64, n: f64) -> PhysicalParams {
        PhysicalParams {
            d_u,
            d_v,
            u0,
            v0,
            a,
            b: 3.0,
            gamma: 10.0,
            m,
            n,
        }
    }

    #[test]
    fn unit_scales_collapse() {
        let (np, s) = nondimensionalize(&phys(1.0, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0)).unwrap();
        assert_relative_eq!(s.u_star, 1.0, epsilon = 1e-15);
        assert_relative_eq!(np.eta, 1.0, epsilon = 1e-15);
        assert_relative_eq!(np.q, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn linear_diffusion_scale_is_diffusivity_ratio() {
        let (np, s) = nondimensionalize(&phys(1.0, 4.0, 1.0, 1.0, 1.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(s.u_star, 2.0, epsilon = 1e-15);
        assert_relative_eq!(np.eta, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn mixed_exponents_match_arithmetic_oracle() {
        // u* = (2*2*2 / (3*0.5*1))^(1/5), x* = sqrt(2 / (3 u*^4))
        let (np, s) = nondimensionalize(&phys(0.5, 2.0, 2.0, 1.0, 1.0, 1.0, 2.0)).unwrap();
        assert_relative_eq!(s.u_star, 1.3976542375431584, max_relative = 1e-14);
        assert_relative_eq!(np.eta, 0.7154845405526278, max_relative = 1e-14);
        assert_relative_eq!(np.q, 0.7154845405526278, max_relative = 1e-14);
        assert_relative_eq!(s.x_star, 0.41797940103896847, max_relative = 1e-14);
        assert_relative_eq!(np.q, 1.0 * np.eta, max_relative = 1e-15);
        assert_relative_eq!(s.v_star * s.u_star, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        let mut p = phys(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0);
        p.d_u = 0.0;
        assert!(matches!(
            nondimensionalize(&p),
            Err(Error::Domain { name: "D_u", .. })
        ));
        p.d_u = 1.0;
        p.m = -1.0;
        assert!(nondimensionalize(&p).is_err());
        assert!(NondimParams::new(1.0, -1.0, 2.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn steady_state_values() {
        let np = NondimParams::new(1.0, 1.0, 4.0, 1.0, 1.0, 1.0).unwrap();
        let s = np.steady_state();
        assert_eq!((s.u_bar, s.v_bar), (1.0, 4.0));

        let np = NondimParams::from_squares(3.0, 0.36, 5.3028, 80.0, 1.0, 1.0).unwrap();
        let s = np.steady_state();
        assert_relative_eq!(s.u_bar, 1.7320508075688772, max_relative = 1e-15);
        assert_relative_eq!(s.v_bar, 3.061573007458748, max_relative = 1e-14);
    }

    #[test]
    fn kinetics_at_zero_activator() {
        let np = NondimParams::new(1.3, 0.7, 2.5, 8.0, 1.0, 1.0).unwrap();
        let (f, g) = np.kinetics(0.0, 0.42);
        assert_relative_eq!(f, np.gamma * np.q, max_relative = 1e-15);
        assert_eq!(g, 0.0);
    }

    fn params() -> impl Strategy<Value = NondimParams> {
        (0.05f64..4.0, 0.1f64..2.0, 1.0f64..20.0, 0.5f64..500.0, 0.0f64..3.0, 0.0f64..3.0)
            .prop_map(|(q, eta, b, g, m, n)| NondimParams::new(q, eta, b, g, m, n).unwrap())
    }

    proptest! {
        #[test]
        fn steady_state_is_a_fixed_point(np in params()) {
            let s = np.steady_state();
            let (f, g) = np.kinetics(s.u_bar, s.v_bar);
            let scale = np.gamma * (np.q + np.b) / np.eta2();
            prop_assert!(f.abs() <= 1e-13 * scale && g.abs() <= 1e-13 * scale);
            prop_assert_eq!(np.kinetics_deviation(0.0, 0.0), (0.0, 0.0));
        }

        #[test]
        fn kinetics_identity(np in params(), u in 0.0f64..5.0, v in 0.0f64..5.0) {
            let (f, g) = np.kinetics(u, v);
            let lhs = f + np.eta2() * g;
            let rhs = np.gamma * (np.q - u);
            let scale = np.gamma * (1.0 + np.q + (np.b + 1.0) * u + u * u * v);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }

        #[test]
        fn deviation_form_matches_direct_form(np in params(), u in 0.0f64..5.0, v in 0.0f64..5.0) {
            let s = np.steady_state();
            let (f0, g0) = np.kinetics(u, v);
            let (f1, g1) = np.kinetics_deviation(u - s.u_bar, v - s.v_bar);
            let scale = np.gamma / np.eta2() * (1.0 + np.q + (np.b + 1.0) * u + u * u * v);
            prop_assert!((f0 - f1).abs() <= 1e-11 * scale);
            prop_assert!((g0 - g1).abs() <= 1e-11 * scale);
        }

        #[test]
        fn round_trip_reproduces_a_and_gamma(
            d_u in 0.1f64..5.0, d_v in 0.1f64..5.0, u0 in 0.1f64..3.0, v0 in 0.1f64..3.0,
            a in 0.1f64..5.0, m in 0.0f64..3.0, n in 0.0f64..3.0,
        ) {
            let p = PhysicalParams { d_u, d_v, u0, v0, a, b: 2.0, gamma: 7.5, m, n };
            let (np, s) = nondimensionalize(&p).unwrap();
            prop_assert!((s.physical_a(&np) - a).abs() <= 1e-12 * a);
            prop_assert!((np.gamma - p.gamma).abs() <= 1e-12 * p.gamma);
            prop_assert!((np.q - a * np.eta).abs() <= 1e-12 * np.q);
        }
    }
}
