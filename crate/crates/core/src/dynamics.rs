//! First and second moment evolution under a linear QSDE:
//!
//! ```text
//! d⟨ξ⟩/dt = A ⟨ξ⟩
//! dV/dt   = A V + V Aᵀ + ½ B B†
//! ```
//!
//! integrated with fixed-step classical Runge–Kutta, plus the steady state
//! obtained from the algebraic Lyapunov equation.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::gaussian::{heisenberg_min_eigenvalue, CovarianceMatrix};
use crate::mats::{self, max_diff, symmetrize, RealMatrix};
use crate::slh::{qsde_matrices, CascadeSystem};

pub const DEFAULT_DT: f64 = 1e-3;
/// Upper bound on stored samples per trajectory.
pub const MAX_SAMPLES: usize = 2000;
/// Residuals below this are treated as round-off when fitting decay rates.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct MomentTrajectory {
    pub times: Vec<f64>,
    pub means: Vec<DVector<f64>>,
    pub covariances: Vec<RealMatrix>,
}

impl MomentTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Smallest eigenvalue of `V(t) + (i/2)Σ` over all stored samples.
    pub fn min_heisenberg_eigenvalue(&self) -> f64 {
        self.covariances
            .iter()
            .map(heisenberg_min_eigenvalue)
            .fold(f64::INFINITY, f64::min)
    }
}

fn step_count(t_end: f64, dt: f64) -> usize {
    let ratio = t_end / dt;
    let nearest = ratio.round();
    if (ratio - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest as usize
    } else {
        ratio.ceil() as usize
    }
}

/// Integrates mean and covariance from `(mean0, v0)` up to `t_end`.
///
/// The step is `t_end / ceil(t_end / dt)`, so the last step lands exactly on
/// `t_end`. At most [`MAX_SAMPLES`] evenly strided samples are stored, always
/// including `t = 0` and `t = t_end`.
pub fn evolve_moments(
    drift: &RealMatrix,
    noise_quadratic: &RealMatrix,
    mean0: &DVector<f64>,
    v0: &CovarianceMatrix,
    t_end: f64,
    dt: f64,
) -> Result<MomentTrajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Parameter(format!("time step must be positive, got {dt}")));
    }
    if !(t_end.is_finite() && t_end >= dt) {
        return Err(Error::Parameter(format!(
            "end time must be finite and at least one step, got {t_end}"
        )));
    }
    let d = drift.nrows();
    if !drift.is_square() || noise_quadratic.shape() != (d, d) || v0.matrix().nrows() != d || mean0.len() != d {
        return Err(Error::Dimension(format!(
            "drift {}x{}, noise {}x{}, covariance {}x{}, mean {}",
            drift.nrows(),
            drift.ncols(),
            noise_quadratic.nrows(),
            noise_quadratic.ncols(),
            v0.matrix().nrows(),
            v0.matrix().ncols(),
            mean0.len()
        )));
    }
    mats::ensure_finite(drift, "drift")?;
    mats::ensure_finite(noise_quadratic, "noise matrix")?;
    if !mean0.iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite("initial mean".into()));
    }

    let steps = step_count(t_end, dt);
    let h = t_end / steps as f64;
    let stride = steps.div_ceil(MAX_SAMPLES - 1).max(1);

    let drift_t = drift.transpose();
    let mean_rhs = |m: &DVector<f64>| drift * m;
    let cov_rhs = |v: &RealMatrix| drift * v + v * &drift_t + noise_quadratic;

    let mut mean = mean0.clone();
    let mut v = v0.matrix().clone();
    let mut out = MomentTrajectory { times: vec![0.0], means: vec![mean.clone()], covariances: vec![v.clone()] };

    for step in 1..=steps {
        let k1 = mean_rhs(&mean);
        let k2 = mean_rhs(&(&mean + &k1 * (0.5 * h)));
        let k3 = mean_rhs(&(&mean + &k2 * (0.5 * h)));
        let k4 = mean_rhs(&(&mean + &k3 * h));
        mean += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);

        let l1 = cov_rhs(&v);
        let l2 = cov_rhs(&(&v + &l1 * (0.5 * h)));
        let l3 = cov_rhs(&(&v + &l2 * (0.5 * h)));
        let l4 = cov_rhs(&(&v + &l3 * h));
        v += (l1 + l2 * 2.0 + l3 * 2.0 + l4) * (h / 6.0);
        v = symmetrize(&v);

        if step % stride == 0 || step == steps {
            out.times.push(if step == steps { t_end } else { step as f64 * h });
            out.means.push(mean.clone());
            out.covariances.push(v.clone());
        }
    }
    Ok(out)
}

/// Steady-state covariance `V∞` solving `A V + V Aᵀ + ½ B B† = 0`.
pub fn steady_state(drift: &RealMatrix, noise_quadratic: &RealMatrix) -> Result<CovarianceMatrix> {
    let v = mats::solve_lyapunov(drift, noise_quadratic)?;
    CovarianceMatrix::new(v)
}

/// Least-squares slope of `ln r(t)` over the last half of the samples,
/// skipping residuals below [`RESIDUAL_FLOOR`]. `None` with fewer than two
/// usable points.
pub fn fit_decay_exponent(times: &[f64], residuals: &[f64]) -> Option<f64> {
    let start = times.len() / 2;
    let pts: Vec<(f64, f64)> = times[start..]
        .iter()
        .zip(&residuals[start..])
        .filter(|(_, r)| **r >= RESIDUAL_FLOOR)
        .map(|(t, r)| (*t, r.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - ym)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub trajectory: MomentTrajectory,
    pub steady_state: CovarianceMatrix,
    /// `‖V(t) - V∞‖_max` at each stored time.
    pub residuals: Vec<f64>,
    pub decay_exponent: Option<f64>,
}

impl ConvergenceReport {
    pub fn times(&self) -> &[f64] {
        &self.trajectory.times
    }

    pub fn final_residual(&self) -> f64 {
        *self.residuals.last().expect("trajectory is never empty")
    }
}

/// Integrates a cascade from zero mean and `v0`, and measures the approach
/// to its steady state.
pub fn convergence_report(
    system: &CascadeSystem,
    v0: &CovarianceMatrix,
    t_end: f64,
    dt: f64,
) -> Result<ConvergenceReport> {
    let q = qsde_matrices(system)?;
    if v0.modes() != system.modes() {
        return Err(Error::Dimension(format!(
            "initial covariance has {} modes, system has {}",
            v0.modes(),
            system.modes()
        )));
    }
    let steady = steady_state(&q.drift, &q.noise_quadratic)?;
    let mean0 = DVector::zeros(2 * system.modes());
    let trajectory = evolve_moments(&q.drift, &q.noise_quadratic, &mean0, v0, t_end, dt)?;
    let residuals: Vec<f64> = trajectory
        .covariances
        .iter()
        .map(|v| max_diff(v, steady.matrix()))
        .collect();
    let decay_exponent = fit_decay_exponent(&trajectory.times, &residuals);
    Ok(ConvergenceReport { trajectory, steady_state: steady, residuals, decay_exponent })
}
