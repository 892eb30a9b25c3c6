//! Cascade realizations of open quantum harmonic oscillators that prepare a
//! prescribed pure Gaussian state as their unique steady state.
//!
//! The pipeline:
//!
//! 1. describe the target by its `(X, Y)` pair ([`gaussian::PureGaussianState`]),
//! 2. build one oscillator per mode ([`synthesis::synthesize_cascade`]),
//! 3. compose the cascade into a single linear SLH model ([`slh::compose_cascade`]),
//! 4. form the QSDE drift and diffusion ([`slh::qsde_matrices`]),
//! 5. solve the steady-state Lyapunov equation and compare with the target
//!    ([`synthesis::verify_synthesis`]), or integrate the moment equations
//!    ([`dynamics::evolve_moments`]).
//!
//! ```
//! use gaussian_cascade::{gaussian::PureGaussianState, synthesis};
//!
//! let target = PureGaussianState::two_mode_squeezed(0.5)?;
//! let system = synthesis::synthesize_cascade(&target)?;
//! let report = synthesis::verify_synthesis(&system, &target)?;
//! assert!(report.drift_is_minus_identity && report.hamiltonian_is_zero);
//! assert!(report.target_residual < 1e-9);
//! # Ok::<(), gaussian_cascade::Error>(())
//! ```
//!
//! All public types use q-first quadrature ordering `ξ = (q1..qn, p1..pn)`.
//! The interleaved per-oscillator order only appears inside cascade
//! composition, through [`mats::permutation_matrix`].

// `!(x < tol)` is used on purpose throughout: a NaN must fail the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod error;
pub mod gaussian;
pub mod io;
pub mod mats;
pub mod slh;
pub mod synthesis;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/structure-matrices.md")]
    mod structure_matrices {}
    #[doc = include_str!("../../../book/src/pure-states.md")]
    mod pure_states {}
    #[doc = include_str!("../../../book/src/cascades.md")]
    mod cascades {}
    #[doc = include_str!("../../../book/src/synthesis.md")]
    mod synthesis {}
    #[doc = include_str!("../../../book/src/two-mode-squeezing.md")]
    mod two_mode_squeezing {}
    #[doc = include_str!("../../../book/src/dynamics.md")]
    mod dynamics {}
}
