//! Cascade synthesis of a prescribed pure Gaussian state.
//!
//! For a target `(X, Y)` on `n` modes, oscillator `j` couples to `n` channels
//! through the `(q_j, p_j)` column pair of
//!
//! ```text
//! K = Y^{-1/2} [-(X + iY), I_n]
//! ```
//!
//! with no Hamiltonian. All cross terms `Im(K_j† K_k)` vanish, so the
//! composed system is a pure cascade with `R = 0` and drift `A = -I`, and the
//! Lyapunov equation is solved by the target covariance.
//!
//! Two hand-built two-mode squeezed state preparations are included:
//! [`realization1`] uses a single channel and non-zero Hamiltonians,
//! [`realization2`] is the generic construction above.

use num_complex::Complex64;

use crate::dynamics::steady_state;
use crate::error::{Error, Result};
use crate::gaussian::{covariance_from_xy, purity, CovarianceMatrix, PureGaussianState};
use crate::mats::{self, inv_sqrt_spd, max_abs, max_diff, ComplexMatrix, RealMatrix, Tolerances};
use crate::slh::{compose_cascade, qsde_matrices, CascadeSystem, Oscillator};

/// `max |A + I|` below this marks the drift as exactly `-I`.
pub const MINUS_IDENTITY_TOL: f64 = 1e-9;
/// `max |R|` below this marks the composed Hamiltonian as zero.
pub const ZERO_HAMILTONIAN_TOL: f64 = 1e-10;

/// The composed coupling `Y^{-1/2} [-(X + iY), I_n]` (`n x 2n`, q-first).
pub fn target_coupling(state: &PureGaussianState) -> Result<ComplexMatrix> {
    let n = state.modes();
    let w = mats::to_complex(&inv_sqrt_spd(state.y())?);
    let mut right = ComplexMatrix::zeros(n, 2 * n);
    let left = state
        .x()
        .zip_map(state.y(), |x, y| -Complex64::new(x, y));
    right.view_mut((0, 0), (n, n)).copy_from(&left);
    right
        .view_mut((0, n), (n, n))
        .copy_from(&ComplexMatrix::identity(n, n));
    Ok(w * right)
}

/// Builds the `n`-oscillator, `n`-channel cascade whose unique steady state is
/// `state`.
pub fn synthesize_cascade(state: &PureGaussianState) -> Result<CascadeSystem> {
    let n = state.modes();
    let k = target_coupling(state)?;
    let oscillators = (0..n)
        .map(|j| {
            let mut kj = ComplexMatrix::zeros(n, 2);
            kj.set_column(0, &k.column(j));
            kj.set_column(1, &k.column(n + j));
            Oscillator::new(kj, RealMatrix::zeros(2, 2))
        })
        .collect::<Result<Vec<_>>>()?;
    compose_cascade(&oscillators)
}

/// `(Q1, Q2)` of the single-channel two-mode squeezing cascade.
///
/// `Q2` is evaluated exactly as `(sinh² 2α - sinh 2α cosh 2α) / cosh 2α`.
pub fn realization1_parameters(alpha: f64) -> (f64, f64) {
    let (s, c) = ((2.0 * alpha).sinh(), (2.0 * alpha).cosh());
    let q1 = s - c;
    let q2 = (s * s - s * c) / c;
    (q1, q2)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter(format!("squeezing parameter {alpha} is not finite")))
    }
}

/// Two oscillators on one shared channel, `K_j = [iQ1, 1]`,
/// `R_1 = [[2, Q2], [Q2, 2]]` and `R_2 = -R_1`.
pub fn realization1(alpha: f64) -> Result<CascadeSystem> {
    check_alpha(alpha)?;
    let (q1, q2) = realization1_parameters(alpha);
    let k = nalgebra::dmatrix![Complex64::new(0.0, q1), Complex64::new(1.0, 0.0)];
    let r = nalgebra::dmatrix![2.0, q2; q2, 2.0];
    compose_cascade(&[Oscillator::new(k.clone(), r.clone())?, Oscillator::new(k, -r)?])
}

/// The generic construction applied to the two-mode squeezed target; two
/// channels, no Hamiltonian.
pub fn realization2(alpha: f64) -> Result<CascadeSystem> {
    check_alpha(alpha)?;
    synthesize_cascade(&PureGaussianState::two_mode_squeezed(alpha)?)
}

/// Outcome of checking that a cascade prepares a target state.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisReport {
    pub system: CascadeSystem,
    pub drift: RealMatrix,
    pub noise_quadratic: RealMatrix,
    /// Largest real part of the drift spectrum.
    pub spectral_abscissa: f64,
    pub hurwitz: bool,
    pub drift_is_minus_identity: bool,
    pub hamiltonian_is_zero: bool,
    pub steady_covariance: CovarianceMatrix,
    pub target_covariance: CovarianceMatrix,
    /// `‖V∞ - V_target‖_max`
    pub target_residual: f64,
    pub purity: f64,
}

pub fn verify_synthesis(system: &CascadeSystem, target: &PureGaussianState) -> Result<SynthesisReport> {
    verify_synthesis_with(system, target, &Tolerances::default())
}

/// Solves for the steady state of `system` and compares it with `target`.
///
/// Fails with a stability error when the drift is not Hurwitz beyond
/// `tol.hurwitz_margin`, since the steady state is then not unique.
pub fn verify_synthesis_with(
    system: &CascadeSystem,
    target: &PureGaussianState,
    tol: &Tolerances,
) -> Result<SynthesisReport> {
    if system.modes() != target.modes() {
        return Err(Error::Dimension(format!(
            "system has {} modes, target has {}",
            system.modes(),
            target.modes()
        )));
    }
    let q = qsde_matrices(system)?;
    let abscissa = mats::spectral_abscissa(&q.drift)?;
    if !(abscissa < -tol.hurwitz_margin) {
        return Err(Error::Stability(format!(
            "drift is not Hurwitz: max real part {abscissa:.6e} (margin {:.1e})",
            tol.hurwitz_margin
        )));
    }
    let steady = steady_state(&q.drift, &q.noise_quadratic)?;
    let target_cov = covariance_from_xy(target)?;
    let d = 2 * system.modes();
    let drift_is_minus_identity =
        max_diff(&q.drift, &-RealMatrix::identity(d, d)) < MINUS_IDENTITY_TOL;
    let hamiltonian_is_zero = max_abs(system.hamiltonian()) < ZERO_HAMILTONIAN_TOL;
    let target_residual = max_diff(steady.matrix(), target_cov.matrix());
    let purity = purity(&steady)?;
    Ok(SynthesisReport {
        system: system.clone(),
        drift: q.drift,
        noise_quadratic: q.noise_quadratic,
        spectral_abscissa: abscissa,
        hurwitz: true,
        drift_is_minus_identity,
        hamiltonian_is_zero,
        steady_covariance: steady,
        target_covariance: target_cov,
        target_residual,
        purity,
    })
}
