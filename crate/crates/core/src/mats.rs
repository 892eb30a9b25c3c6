//! Dense matrix utilities: quadrature structure matrices, symmetry and
//! definiteness predicates, the principal inverse square root, and a
//! Kronecker-vectorized continuous Lyapunov solver.
//!
//! Everything here works on small dense matrices (2n ≤ 20). All functions are
//! pure and take their inputs by reference.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type RealMatrix = DMatrix<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;

/// Relative tolerance for symmetry and residual checks.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Eigenvalues below this fraction of the largest one count as non-positive.
pub const EIGEN_FLOOR: f64 = 1e-12;

/// Per-call tolerance overrides. `Default` gives the library defaults.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub symmetry: f64,
    pub eigen_floor: f64,
    pub hurwitz_margin: f64,
    /// Accepted deviation of `2^{2n} det V` from one for user-supplied pure states.
    pub purity_gate: f64,
    /// Allowed negativity of the smallest eigenvalue of `V + (i/2)Σ`.
    pub heisenberg: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            symmetry: SYMMETRY_TOL,
            eigen_floor: EIGEN_FLOOR,
            hurwitz_margin: 0.0,
            purity_gate: 1e-6,
            heisenberg: 1e-9,
        }
    }
}

fn check_modes(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Parameter("mode count must be at least 1".into()));
    }
    Ok(())
}

fn check_square<T>(m: &DMatrix<T>, what: &str) -> Result<()>
where
    T: nalgebra::Scalar,
{
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::Shape(format!(
            "{what} must be square and non-empty, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

pub(crate) fn ensure_finite(m: &RealMatrix, what: &str) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

pub(crate) fn ensure_finite_complex(m: &ComplexMatrix, what: &str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// Largest absolute entry (0 for an empty matrix).
pub fn max_abs(m: &RealMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Largest entry modulus of a complex matrix.
pub fn max_abs_complex(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Max-norm distance between two real matrices of equal shape.
pub fn max_diff(a: &RealMatrix, b: &RealMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "max_diff on mismatched shapes");
    max_abs(&(a - b))
}

/// `max |M - Mᵀ|`.
pub fn max_asymmetry(m: &RealMatrix) -> f64 {
    max_abs(&(m - m.transpose()))
}

/// `(M + Mᵀ)/2`.
pub fn symmetrize(m: &RealMatrix) -> RealMatrix {
    (m + m.transpose()) * 0.5
}

/// The commutation matrix `Σ = [[0, I_n], [-I_n, 0]]` in q-first ordering.
pub fn symplectic_form(n: usize) -> Result<RealMatrix> {
    check_modes(n)?;
    let mut s = RealMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        s[(i, n + i)] = 1.0;
        s[(n + i, i)] = -1.0;
    }
    Ok(s)
}

/// Block-diagonal `diag_n(J)` with `J = [[0, 1], [-1, 0]]`: the commutation
/// matrix written in the interleaved order `(q1, p1, q2, p2, ...)`.
pub fn interleaved_symplectic_form(n: usize) -> Result<RealMatrix> {
    check_modes(n)?;
    let mut s = RealMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        s[(2 * j, 2 * j + 1)] = 1.0;
        s[(2 * j + 1, 2 * j)] = -1.0;
    }
    Ok(s)
}

/// Permutation taking the interleaved vector `(a1, a2, ..., a2n)` to the
/// grouped vector `(a1, a3, ..., a2n-1, a2, a4, ..., a2n)`.
///
/// With `x = (q1, p1, ..., qn, pn)` this gives `ξ = P x` in q-first order.
pub fn permutation_matrix(n: usize) -> Result<RealMatrix> {
    check_modes(n)?;
    let mut p = RealMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        p[(j, 2 * j)] = 1.0;
        p[(n + j, 2 * j + 1)] = 1.0;
    }
    Ok(p)
}

/// True iff `max |M - Mᵀ| <= tol * (1 + max |M|)`.
pub fn is_symmetric(m: &RealMatrix, tol: f64) -> Result<bool> {
    check_square(m, "matrix")?;
    Ok(max_asymmetry(m) <= tol * (1.0 + max_abs(m)))
}

pub(crate) fn require_symmetric(m: &RealMatrix, tol: f64, what: &str) -> Result<()> {
    if !is_symmetric(m, tol)? {
        return Err(Error::Symmetry(format!(
            "{what} has asymmetry {:.3e}",
            max_asymmetry(m)
        )));
    }
    Ok(())
}

fn symmetric_eigen(m: &RealMatrix) -> SymmetricEigen<f64, nalgebra::Dyn> {
    SymmetricEigen::new(symmetrize(m))
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &RealMatrix) -> Result<Vec<f64>> {
    check_square(m, "matrix")?;
    require_symmetric(m, SYMMETRY_TOL, "matrix")?;
    let mut ev: Vec<f64> = symmetric_eigen(m).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

fn min_relative_eigenvalue(ev: &[f64]) -> (f64, f64) {
    let lo = ev.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ev.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    (lo, hi)
}

/// True iff every eigenvalue of the symmetric matrix `M` is strictly positive
/// (above `EIGEN_FLOOR` relative to the spectral radius).
pub fn is_positive_definite(m: &RealMatrix) -> Result<bool> {
    is_positive_definite_with(m, EIGEN_FLOOR)
}

pub fn is_positive_definite_with(m: &RealMatrix, eigen_floor: f64) -> Result<bool> {
    ensure_finite(m, "matrix")?;
    let ev = symmetric_eigenvalues(m)?;
    let (lo, hi) = min_relative_eigenvalue(&ev);
    Ok(hi > 0.0 && lo > eigen_floor * hi)
}

/// Eigenvalues of a general real square matrix.
///
/// Computed by faer's Hessenberg QR; nalgebra's Schur iteration does not
/// converge on nearly scalar triangular inputs such as a rounded `-I`.
pub fn eigenvalues(a: &RealMatrix) -> Result<Vec<Complex64>> {
    check_square(a, "matrix")?;
    ensure_finite(a, "matrix")?;
    let m = faer::Mat::<f64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)]);
    let ev = m
        .eigenvalues()
        .map_err(|e| Error::Stability(format!("eigenvalue iteration failed: {e:?}")))?;
    Ok(ev.into_iter().map(|z| Complex64::new(z.re, z.im)).collect())
}

/// Largest real part over the spectrum of `A`.
pub fn spectral_abscissa(a: &RealMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// True iff every eigenvalue of `A` has real part below `-margin`.
pub fn is_hurwitz(a: &RealMatrix, margin: f64) -> Result<bool> {
    Ok(spectral_abscissa(a)? < -margin)
}

/// Principal inverse square root of a symmetric positive-definite matrix.
///
/// Returns the symmetric positive-definite `W` with `W Y W = I`.
pub fn inv_sqrt_spd(y: &RealMatrix) -> Result<RealMatrix> {
    inv_sqrt_spd_with(y, &Tolerances::default())
}

pub fn inv_sqrt_spd_with(y: &RealMatrix, tol: &Tolerances) -> Result<RealMatrix> {
    spd_power(y, -0.5, tol)
}

/// Principal square root of a symmetric positive-definite matrix.
pub fn sqrt_spd(y: &RealMatrix) -> Result<RealMatrix> {
    spd_power(y, 0.5, &Tolerances::default())
}

fn spd_power(y: &RealMatrix, power: f64, tol: &Tolerances) -> Result<RealMatrix> {
    check_square(y, "matrix")?;
    ensure_finite(y, "matrix")?;
    require_symmetric(y, tol.symmetry, "matrix")?;
    let eig = symmetric_eigen(y);
    let (lo, hi) = min_relative_eigenvalue(eig.eigenvalues.as_slice());
    if !(hi > 0.0 && lo > tol.eigen_floor * hi) {
        return Err(Error::Definiteness(format!(
            "smallest eigenvalue {lo:.3e} relative to largest {hi:.3e}"
        )));
    }
    let q = &eig.eigenvectors;
    let d = RealMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.powf(power)));
    Ok(symmetrize(&(q * d * q.transpose())))
}

/// `A V + V Aᵀ + Q` in max-norm.
pub fn lyapunov_residual(a: &RealMatrix, v: &RealMatrix, q: &RealMatrix) -> f64 {
    max_abs(&(a * v + v * a.transpose() + q))
}

/// Solves `A V + V Aᵀ + Q = 0` for symmetric `V`.
///
/// Uses the vectorized form `(I ⊗ A + A ⊗ I) vec(V) = -vec(Q)` with a dense
/// LU factorization, followed by one step of iterative refinement. `A` must be
/// Hurwitz.
pub fn solve_lyapunov(a: &RealMatrix, q: &RealMatrix) -> Result<RealMatrix> {
    check_square(a, "drift")?;
    check_square(q, "noise matrix")?;
    if a.shape() != q.shape() {
        return Err(Error::Dimension(format!(
            "drift is {}x{} but noise matrix is {}x{}",
            a.nrows(),
            a.ncols(),
            q.nrows(),
            q.ncols()
        )));
    }
    ensure_finite(q, "noise matrix")?;
    require_symmetric(q, SYMMETRY_TOL, "noise matrix")?;
    let abscissa = spectral_abscissa(a)?;
    if abscissa >= 0.0 {
        return Err(Error::Stability(format!(
            "drift is not Hurwitz (max real part {abscissa:.6e})"
        )));
    }

    let d = a.nrows();
    let eye = RealMatrix::identity(d, d);
    let op = eye.kronecker(a) + a.kronecker(&eye);
    let lu = op.clone().lu();
    let u = lu.u();
    let pivots = u.diagonal();
    let big = pivots.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()));
    let small = pivots.iter().fold(f64::INFINITY, |acc, x| acc.min(x.abs()));
    if !(small > 1e-14 * big) {
        return Err(Error::Stability(
            "vectorized Lyapunov operator is singular (eigenvalue pair sums to zero)".into(),
        ));
    }

    let rhs = -nalgebra::DVector::from_column_slice(q.as_slice());
    let mut x = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Stability("vectorized Lyapunov operator is singular".into()))?;
    let r = &rhs - &op * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    let v = RealMatrix::from_column_slice(d, d, x.as_slice());
    Ok(symmetrize(&v))
}

/// `M^†` (conjugate transpose), spelled out.
pub fn dagger(m: &ComplexMatrix) -> ComplexMatrix {
    m.map(|z| z.conj()).transpose()
}

pub fn real_part(m: &ComplexMatrix) -> RealMatrix {
    m.map(|z| z.re)
}

pub fn imag_part(m: &ComplexMatrix) -> RealMatrix {
    m.map(|z| z.im)
}

pub fn to_complex(m: &RealMatrix) -> ComplexMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Eigenvalues (ascending) of the Hermitian matrix `S + iA`, where `S` is real
/// symmetric and `A` real antisymmetric. Computed on the real symmetric
/// embedding `[[S, -A], [A, S]]`, whose spectrum is that of `S + iA` with
/// every eigenvalue doubled.
pub fn hermitian_eigenvalues(s: &RealMatrix, a: &RealMatrix) -> Vec<f64> {
    let d = s.nrows();
    let mut emb = RealMatrix::zeros(2 * d, 2 * d);
    emb.view_mut((0, 0), (d, d)).copy_from(s);
    emb.view_mut((d, d), (d, d)).copy_from(s);
    emb.view_mut((0, d), (d, d)).copy_from(&(-a));
    emb.view_mut((d, 0), (d, d)).copy_from(a);
    let mut ev: Vec<f64> = symmetric_eigen(&emb).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev.into_iter().step_by(2).collect()
}
