//! Turing patterns in the Brusselator with density-dependent diffusion.
//!
//! * [`model`]: parameters, rescaling and the steady state.
//! * [`linstab`]: Hopf and Turing thresholds, unstable bands, box modes and
//!   parameter sweeps.
//! * [`wnl`]: weakly nonlinear expansion and amplitude-equation coefficients.
//! * [`amplitude`]: integration, equilibria and bifurcation diagrams of those
//!   equations.
//! * [`pde`]: spectral, finite-difference and radial solvers for the full
//!   system.
//! * [`analysis`]: spectra, envelopes, fronts and target-core fits.
//! * [`config`] and [`validation`]: run configurations, presets and the
//!   acceptance criteria.
//!
//! ```
//! use brusselator::{linstab, model::NondimParams};
//!
//! let np = NondimParams::from_squares(3.0, 0.36, 5.4, 80.0, 1.0, 1.0)?;
//! let th = linstab::turing_threshold(&np)?;
//! assert!(th.b_turing < np.b && np.b < th.b_hopf);
//! # Ok::<(), brusselator::Error>(())
//! ```

pub mod amplitude;
pub mod analysis;
pub mod config;
pub mod error;
pub mod linstab;
pub mod model;
pub mod pde;
pub mod validation;
pub mod wnl;

pub use error::{Error, Result};

// Guide chapters double as doctests.
#[cfg(doctest)]
mod guide {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/model.md")]
    mod model {}
    #[doc = include_str!("../../../book/src/stability.md")]
    mod stability {}
    #[doc = include_str!("../../../book/src/amplitude.md")]
    mod amplitude {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../book/src/validation.md")]
    mod validation {}
}
