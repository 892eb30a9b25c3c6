//! Helpers shared by the CLI test targets: seeded generators and a thin
//! wrapper around the compiled binary.
#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gaussian_cascade::gaussian::PureGaussianState;
use gaussian_cascade::mats::{ComplexMatrix, RealMatrix};
use gaussian_cascade::slh::Oscillator;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(rng: &mut impl Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> RealMatrix {
    RealMatrix::from_fn(rows, cols, |_, _| rng.random_range(lo..hi))
}

pub fn random_symmetric(rng: &mut impl Rng, n: usize, bound: f64) -> RealMatrix {
    let a = uniform_matrix(rng, n, n, -bound, bound);
    RealMatrix::from_fn(n, n, |i, j| if i >= j { a[(i, j)] } else { a[(j, i)] })
}

/// `X` with entries in [-2, 2], `Y = MᵀM + 0.1 I`.
pub fn random_target(rng: &mut impl Rng, n: usize) -> PureGaussianState {
    let x = random_symmetric(rng, n, 2.0);
    let m = uniform_matrix(rng, n, n, -1.0, 1.0);
    let y = m.transpose() * &m + RealMatrix::identity(n, n) * 0.1;
    PureGaussianState::new(x, y).expect("valid random target")
}

pub fn random_oscillator(rng: &mut impl Rng, m: usize) -> Oscillator {
    let k = ComplexMatrix::from_fn(m, 2, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    Oscillator::new(k, random_symmetric(rng, 2, 2.0)).unwrap()
}

pub fn rows(m: &RealMatrix) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

/// State document at full `f64` precision (serde_json writes shortest
/// round-trip decimals).
pub fn state_json(s: &PureGaussianState) -> String {
    json!({"n": s.modes(), "X": rows(s.x()), "Y": rows(s.y())}).to_string()
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn gcascade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gcascade"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    })
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Parses a nested `[[f64]]` JSON matrix.
pub fn json_matrix(v: &Value) -> RealMatrix {
    let rows: Vec<Vec<f64>> = serde_json::from_value(v.clone()).expect("real matrix");
    let (r, c) = (rows.len(), rows.first().map_or(0, Vec::len));
    RealMatrix::from_fn(r, c, |i, j| rows[i][j])
}
