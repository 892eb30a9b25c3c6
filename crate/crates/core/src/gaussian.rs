//! Gaussian states in q-first quadrature ordering `ξ = (q1..qn, p1..pn)`.
//!
//! A pure zero-mean Gaussian state is parametrized by a pair of real symmetric
//! matrices `(X, Y)` with `Y > 0`; its covariance matrix is
//!
//! ```text
//! V = 1/2 [[Y⁻¹,    Y⁻¹X      ],
//!          [XY⁻¹,   XY⁻¹X + Y ]]
//! ```
//!
//! and the map is a bijection onto covariance matrices with `2^{2n} det V = 1`.

use nalgebra::Cholesky;

use crate::error::{Error, Result};
use crate::mats::{
    self, ensure_finite, hermitian_eigenvalues, max_asymmetry, require_symmetric, symmetrize,
    RealMatrix, Tolerances,
};

/// Target pure Gaussian state `(X, Y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureGaussianState {
    x: RealMatrix,
    y: RealMatrix,
}

impl PureGaussianState {
    pub fn new(x: RealMatrix, y: RealMatrix) -> Result<Self> {
        Self::new_with(x, y, &Tolerances::default())
    }

    pub fn new_with(x: RealMatrix, y: RealMatrix, tol: &Tolerances) -> Result<Self> {
        if x.nrows() == 0 || !x.is_square() || !y.is_square() || x.shape() != y.shape() {
            return Err(Error::Shape(format!(
                "X ({}x{}) and Y ({}x{}) must be square of equal size",
                x.nrows(),
                x.ncols(),
                y.nrows(),
                y.ncols()
            )));
        }
        ensure_finite(&x, "X")?;
        ensure_finite(&y, "Y")?;
        require_symmetric(&x, tol.symmetry, "X")?;
        require_symmetric(&y, tol.symmetry, "Y")?;
        if !mats::is_positive_definite_with(&y, tol.eigen_floor)? {
            return Err(Error::Definiteness("Y must be positive definite".into()));
        }
        Ok(PureGaussianState { x: symmetrize(&x), y: symmetrize(&y) })
    }

    /// The n-mode vacuum: `X = 0`, `Y = I`.
    pub fn vacuum(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("mode count must be at least 1".into()));
        }
        Self::new(RealMatrix::zeros(n, n), RealMatrix::identity(n, n))
    }

    /// Two-mode squeezed state with squeezing parameter `alpha`:
    /// `X = 0`, `Y = [[cosh 2α, -sinh 2α], [-sinh 2α, cosh 2α]]`.
    pub fn two_mode_squeezed(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::Parameter(format!("squeezing parameter {alpha} is not finite")));
        }
        let (c, s) = ((2.0 * alpha).cosh(), (2.0 * alpha).sinh());
        Self::new(RealMatrix::zeros(2, 2), nalgebra::dmatrix![c, -s; -s, c])
    }

    pub fn modes(&self) -> usize {
        self.x.nrows()
    }

    pub fn x(&self) -> &RealMatrix {
        &self.x
    }

    pub fn y(&self) -> &RealMatrix {
        &self.y
    }
}

/// Symmetric positive-definite covariance matrix in q-first ordering.
///
/// Construction checks symmetry and definiteness only; the uncertainty
/// principle is checked separately by [`heisenberg_valid`] so that
/// unphysical matrices can still be represented and diagnosed.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    v: RealMatrix,
}

impl CovarianceMatrix {
    pub fn new(v: RealMatrix) -> Result<Self> {
        Self::new_with(v, &Tolerances::default())
    }

    pub fn new_with(v: RealMatrix, tol: &Tolerances) -> Result<Self> {
        if !v.is_square() || v.nrows() == 0 || !v.nrows().is_multiple_of(2) {
            return Err(Error::Shape(format!(
                "covariance must be 2n x 2n, got {}x{}",
                v.nrows(),
                v.ncols()
            )));
        }
        ensure_finite(&v, "covariance")?;
        require_symmetric(&v, tol.symmetry, "covariance")?;
        if !mats::is_positive_definite_with(&v, tol.eigen_floor)? {
            return Err(Error::Definiteness("covariance must be positive definite".into()));
        }
        Ok(CovarianceMatrix { v: symmetrize(&v) })
    }

    /// Vacuum covariance `I/2`.
    pub fn vacuum(n: usize) -> Result<Self> {
        Self::thermal(n, 1.0)
    }

    /// Thermal covariance `ν I / 2`.
    pub fn thermal(n: usize, nu: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("mode count must be at least 1".into()));
        }
        if !(nu.is_finite() && nu > 0.0) {
            return Err(Error::Parameter(format!("thermal factor must be positive, got {nu}")));
        }
        Self::new(RealMatrix::identity(2 * n, 2 * n) * (0.5 * nu))
    }

    pub fn modes(&self) -> usize {
        self.v.nrows() / 2
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.v
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.v
    }
}

/// Covariance of the two-mode squeezed state, written out entry by entry.
pub fn two_mode_squeezed_covariance(alpha: f64) -> RealMatrix {
    let (c, s) = ((2.0 * alpha).cosh(), (2.0 * alpha).sinh());
    nalgebra::dmatrix![
        c, s, 0.0, 0.0;
        s, c, 0.0, 0.0;
        0.0, 0.0, c, -s;
        0.0, 0.0, -s, c
    ] * 0.5
}

/// Block covariance of a pure state from its `(X, Y)` parametrization.
pub fn covariance_from_xy(state: &PureGaussianState) -> Result<CovarianceMatrix> {
    let n = state.modes();
    let y_inv = Cholesky::new(state.y.clone())
        .ok_or_else(|| Error::Definiteness("Y is not invertible".into()))?
        .inverse();
    let y_inv = symmetrize(&y_inv);
    let y_inv_x = &y_inv * &state.x;
    let mut v = RealMatrix::zeros(2 * n, 2 * n);
    v.view_mut((0, 0), (n, n)).copy_from(&y_inv);
    v.view_mut((0, n), (n, n)).copy_from(&y_inv_x);
    v.view_mut((n, 0), (n, n)).copy_from(&y_inv_x.transpose());
    v.view_mut((n, n), (n, n))
        .copy_from(&(&state.x * &y_inv_x + &state.y));
    v *= 0.5;
    CovarianceMatrix::new(symmetrize(&v))
}

/// Result of inverting the covariance map.
#[derive(Debug, Clone, PartialEq)]
pub struct XyDecomposition {
    pub state: PureGaussianState,
    /// `max |X - Xᵀ|` before symmetrization.
    pub x_asymmetry: f64,
}

/// Recovers `(X, Y)` from a pure covariance matrix.
pub fn xy_from_covariance(cov: &CovarianceMatrix) -> Result<XyDecomposition> {
    xy_from_covariance_with(cov, &Tolerances::default())
}

pub fn xy_from_covariance_with(cov: &CovarianceMatrix, tol: &Tolerances) -> Result<XyDecomposition> {
    let n = cov.modes();
    let scaled_det = purity_determinant(cov);
    if !((scaled_det - 1.0).abs() <= tol.purity_gate) {
        return Err(Error::NotPure(format!(
            "2^(2n) det V = {scaled_det:.9}, expected 1 within {:.1e}",
            tol.purity_gate
        )));
    }
    let v = cov.matrix();
    let vqq = v.view((0, 0), (n, n)).into_owned();
    let vqp = v.view((0, n), (n, n)).into_owned();
    let chol = Cholesky::new(vqq)
        .ok_or_else(|| Error::Definiteness("position block of V is singular".into()))?;
    let x_raw = chol.solve(&vqp);
    let y = symmetrize(&(chol.inverse() * 0.5));
    let x_asymmetry = max_asymmetry(&x_raw);
    let state = PureGaussianState::new_with(symmetrize(&x_raw), y, tol)?;
    Ok(XyDecomposition { state, x_asymmetry })
}

/// `2^{2n} det V`, equal to one exactly for pure states.
pub fn purity_determinant(cov: &CovarianceMatrix) -> f64 {
    let n = cov.modes() as i32;
    4f64.powi(n) * cov.matrix().determinant()
}

/// Purity `tr ρ² = 1 / sqrt(2^{2n} det V)`.
pub fn purity(cov: &CovarianceMatrix) -> Result<f64> {
    let d = purity_determinant(cov);
    if !(d > 0.0) {
        return Err(Error::Definiteness(format!("det V is not positive ({d:.3e})")));
    }
    Ok(1.0 / d.sqrt())
}

/// Smallest eigenvalue of the Hermitian matrix `V + (i/2)Σ`.
pub fn heisenberg_min_eigenvalue(v: &RealMatrix) -> f64 {
    let n = v.nrows() / 2;
    let half_sigma = mats::symplectic_form(n).expect("even, non-empty covariance") * 0.5;
    hermitian_eigenvalues(v, &half_sigma)[0]
}

/// True iff `V + (i/2)Σ ⪰ 0` up to the default tolerance.
pub fn heisenberg_valid(cov: &CovarianceMatrix) -> bool {
    heisenberg_min_eigenvalue(cov.matrix()) >= -Tolerances::default().heisenberg
}
