//! Random generators and independent oracles shared by the integration tests.
#![allow(dead_code)]

use gaussian_cascade::gaussian::PureGaussianState;
use gaussian_cascade::mats::{ComplexMatrix, RealMatrix};
use gaussian_cascade::slh::Oscillator;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut impl Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> RealMatrix {
    RealMatrix::from_fn(rows, cols, |_, _| rng.random_range(lo..hi))
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize, bound: f64) -> RealMatrix {
    let a = uniform_matrix(rng, n, n, -bound, bound);
    let mut s = RealMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            s[(i, j)] = a[(i, j)];
            s[(j, i)] = a[(i, j)];
        }
    }
    s
}

/// `X` with entries in [-2, 2], `Y = MᵀM + 0.1 I`.
pub fn random_target(rng: &mut impl Rng, n: usize) -> PureGaussianState {
    let x = random_symmetric(rng, n, 2.0);
    let m = uniform_matrix(rng, n, n, -1.0, 1.0);
    let y = m.transpose() * &m + RealMatrix::identity(n, n) * 0.1;
    PureGaussianState::new(x, y).expect("valid random target")
}

/// Random SPD matrix with prescribed log10 condition number.
pub fn random_spd(rng: &mut impl Rng, n: usize, log10_cond: f64) -> RealMatrix {
    let q = uniform_matrix(rng, n, n, -1.0, 1.0).qr().q();
    let eig = DVector::from_fn(n, |i, _| {
        let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
        10f64.powf(t * log10_cond) * rng.random_range(0.5..2.0)
    });
    let y = &q * DMatrix::from_diagonal(&eig) * q.transpose();
    (&y + y.transpose()) * 0.5
}

pub fn random_complex(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_oscillator(rng: &mut impl Rng, m: usize) -> Oscillator {
    Oscillator::new(random_complex(rng, m, 2), random_symmetric(rng, 2, 2.0)).unwrap()
}

pub fn random_oscillators(rng: &mut impl Rng, n: usize, m: usize) -> Vec<Oscillator> {
    (0..n).map(|_| random_oscillator(rng, m)).collect()
}

/// Characteristic polynomial coefficients (descending, monic) by the
/// Faddeev–LeVerrier recursion; no eigenvalues involved.
pub fn faddeev_leverrier(a: &RealMatrix) -> Vec<f64> {
    let n = a.nrows();
    let mut coeffs = vec![1.0];
    let mut m = RealMatrix::zeros(n, n);
    let eye = RealMatrix::identity(n, n);
    let mut c_prev = 1.0;
    for k in 1..=n {
        m = a * &m + &eye * c_prev;
        let c = -(a * &m).trace() / k as f64;
        coeffs.push(c);
        c_prev = c;
    }
    coeffs
}

/// Routh–Hurwitz test on a monic real polynomial (descending coefficients).
/// Returns `None` when a first-column entry is too close to zero to decide.
pub fn routh_hurwitz_stable(coeffs: &[f64]) -> Option<bool> {
    let deg = coeffs.len() - 1;
    let width = deg / 2 + 1;
    let mut rows: Vec<Vec<f64>> = vec![vec![0.0; width + 1], vec![0.0; width + 1]];
    for (i, c) in coeffs.iter().enumerate() {
        rows[i % 2][i / 2] = *c;
    }
    let scale = coeffs.iter().fold(0.0_f64, |a, c| a.max(c.abs()));
    for r in 2..=deg {
        let (p, q) = (&rows[r - 2], &rows[r - 1]);
        if q[0].abs() < 1e-9 * scale {
            return None;
        }
        let next: Vec<f64> = (0..width)
            .map(|j| (q[0] * p[j + 1] - p[0] * q[j + 1]) / q[0])
            .chain(std::iter::once(0.0))
            .collect();
        rows.push(next);
    }
    let first: Vec<f64> = rows.iter().take(deg + 1).map(|r| r[0]).collect();
    if first.iter().any(|x| x.abs() < 1e-12 * scale) {
        return None;
    }
    Some(first.iter().all(|x| *x > 0.0))
}

/// Matrix exponential by scaling-and-squaring of a Taylor series.
pub fn expm(a: &RealMatrix) -> RealMatrix {
    let n = a.nrows();
    let norm = a.iter().fold(0.0_f64, |acc, x| acc + x.abs());
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scaled = a / 2f64.powi(squarings as i32);
    let mut term = RealMatrix::identity(n, n);
    let mut sum = term.clone();
    for k in 1..30 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Exact covariance `V(t) = e^{At}(V0 - V∞)e^{Aᵀt} + V∞`.
pub fn exact_covariance(a: &RealMatrix, v0: &RealMatrix, v_inf: &RealMatrix, t: f64) -> RealMatrix {
    let e = expm(&(a * t));
    &e * (v0 - v_inf) * e.transpose() + v_inf
}
