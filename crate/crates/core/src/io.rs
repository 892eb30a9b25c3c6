//! JSON document schemas and deterministic numeric formatting.
//!
//! * state: `{"n": 2, "X": [[..]], "Y": [[..]]}`
//! * covariance: `{"n": 2, "V": [[..]], "ordering": "q-first"}`
//! * system: `{"m": 1, "oscillators": [{"K": [[[re, im], ..]], "R": [[..]]}]}`
//!
//! Matrices are row-major nested arrays, complex scalars are `[re, im]`.
//! Every number written by this module carries at most 12 significant digits.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dynamics::MomentTrajectory;
use crate::error::{Error, Result};
use crate::gaussian::{CovarianceMatrix, PureGaussianState};
use crate::mats::{ComplexMatrix, RealMatrix, Tolerances};
use crate::slh::{CascadeSystem, Oscillator};
use crate::synthesis::SynthesisReport;

pub const SIGNIFICANT_DIGITS: usize = 12;
pub const ORDERING_Q_FIRST: &str = "q-first";

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits; `-0.0` becomes `0.0`.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap();
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// `printf("%.12g")`-style formatting: fixed notation for decimal exponents
/// in `[-5, 12)`, otherwise scientific with a lowercase `e` and an exponent of
/// at least two digits. Trailing zeros are trimmed.
pub fn format_g12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}").to_lowercase();
    }
    let p = SIGNIFICANT_DIGITS as i32;
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..p).contains(&exp) {
        let decimals = (p - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), sign, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn rows_of(m: &RealMatrix) -> Vec<Vec<f64>> {
    m.row_iter()
        .map(|r| r.iter().copied().map(round_sig).collect())
        .collect()
}

fn complex_rows_of(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    m.row_iter()
        .map(|r| r.iter().map(|z| [round_sig(z.re), round_sig(z.im)]).collect())
        .collect()
}

fn shape_of<T>(rows: &[Vec<T>], what: &str) -> Result<(usize, usize)> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(Error::Shape(format!("{what} is empty")));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != ncols) {
        return Err(Error::Shape(format!(
            "{what} row {} has {} entries, expected {ncols}",
            i + 1,
            rows[i].len()
        )));
    }
    Ok((nrows, ncols))
}

pub fn matrix_from_rows(rows: &[Vec<f64>], what: &str) -> Result<RealMatrix> {
    let (r, c) = shape_of(rows, what)?;
    Ok(RealMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

pub fn complex_matrix_from_rows(rows: &[Vec<[f64; 2]>], what: &str) -> Result<ComplexMatrix> {
    let (r, c) = shape_of(rows, what)?;
    Ok(ComplexMatrix::from_fn(r, c, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

fn check_size(m: &RealMatrix, rows: usize, cols: usize, what: &str) -> Result<()> {
    if m.shape() != (rows, cols) {
        return Err(Error::Shape(format!(
            "{what} must be {rows}x{cols}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateDoc {
    pub n: usize,
    #[serde(rename = "X")]
    pub x: Vec<Vec<f64>>,
    #[serde(rename = "Y")]
    pub y: Vec<Vec<f64>>,
}

impl StateDoc {
    pub fn from_state(s: &PureGaussianState) -> Self {
        StateDoc { n: s.modes(), x: rows_of(s.x()), y: rows_of(s.y()) }
    }

    pub fn to_state(&self, tol: &Tolerances) -> Result<PureGaussianState> {
        let x = matrix_from_rows(&self.x, "X")?;
        let y = matrix_from_rows(&self.y, "Y")?;
        check_size(&x, self.n, self.n, "X")?;
        check_size(&y, self.n, self.n, "Y")?;
        PureGaussianState::new_with(x, y, tol)
    }
}

fn default_ordering() -> String {
    ORDERING_Q_FIRST.to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceDoc {
    pub n: usize,
    #[serde(rename = "V")]
    pub v: Vec<Vec<f64>>,
    #[serde(default = "default_ordering")]
    pub ordering: String,
}

impl CovarianceDoc {
    pub fn from_covariance(c: &CovarianceMatrix) -> Self {
        CovarianceDoc { n: c.modes(), v: rows_of(c.matrix()), ordering: default_ordering() }
    }

    pub fn to_covariance(&self, tol: &Tolerances) -> Result<CovarianceMatrix> {
        if self.ordering != ORDERING_Q_FIRST {
            return Err(Error::Parse(format!(
                "unsupported ordering {:?}, expected {ORDERING_Q_FIRST:?}",
                self.ordering
            )));
        }
        let v = matrix_from_rows(&self.v, "V")?;
        check_size(&v, 2 * self.n, 2 * self.n, "V")?;
        CovarianceMatrix::new_with(v, tol)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatorDoc {
    #[serde(rename = "K")]
    pub k: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "R")]
    pub r: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemDoc {
    pub m: usize,
    pub oscillators: Vec<OscillatorDoc>,
}

impl SystemDoc {
    pub fn from_system(sys: &CascadeSystem) -> Self {
        SystemDoc {
            m: sys.channels(),
            oscillators: sys
                .oscillators()
                .iter()
                .map(|o| OscillatorDoc {
                    k: complex_rows_of(o.coupling()),
                    r: rows_of(o.hamiltonian()),
                })
                .collect(),
        }
    }

    pub fn to_system(&self) -> Result<CascadeSystem> {
        let oscillators = self
            .oscillators
            .iter()
            .enumerate()
            .map(|(j, o)| {
                let what = format!("oscillators[{j}]");
                let k = complex_matrix_from_rows(&o.k, &format!("{what}.K"))?;
                let r = matrix_from_rows(&o.r, &format!("{what}.R"))?;
                if k.nrows() != self.m {
                    return Err(Error::Shape(format!(
                        "{what}.K has {} rows but m = {}",
                        k.nrows(),
                        self.m
                    )));
                }
                Oscillator::new(k, r)
            })
            .collect::<Result<Vec<_>>>()?;
        CascadeSystem::new(oscillators)
    }
}

fn parse_value(text: &str, what: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn from_value<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> Result<T> {
    serde_json::from_value(v).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

/// Parses a state document.
pub fn parse_state(text: &str, tol: &Tolerances) -> Result<PureGaussianState> {
    let doc: StateDoc = serde_json::from_str(text).map_err(|e| Error::Parse(format!("state: {e}")))?;
    doc.to_state(tol)
}

pub fn parse_covariance(text: &str, tol: &Tolerances) -> Result<CovarianceMatrix> {
    let doc: CovarianceDoc =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("covariance: {e}")))?;
    doc.to_covariance(tol)
}

/// Parses a system document. An object carrying the system under a
/// `"system"` key (as written by the synthesize and example commands) is
/// accepted too.
pub fn parse_system(text: &str) -> Result<CascadeSystem> {
    let mut v = parse_value(text, "system")?;
    if v.get("oscillators").is_none() {
        if let Some(inner) = v.get_mut("system") {
            v = inner.take();
        }
    }
    let doc: SystemDoc = from_value(v, "system")?;
    doc.to_system()
}

/// Serialized form of a [`SynthesisReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub n: usize,
    pub m: usize,
    pub hurwitz: bool,
    pub spectral_abscissa: f64,
    pub drift_is_minus_identity: bool,
    pub hamiltonian_is_zero: bool,
    pub target_residual: f64,
    pub purity: f64,
    pub drift: Vec<Vec<f64>>,
    pub noise_quadratic: Vec<Vec<f64>>,
    pub steady_covariance: CovarianceDoc,
}

impl ReportDoc {
    pub fn from_report(r: &SynthesisReport) -> Self {
        ReportDoc {
            n: r.system.modes(),
            m: r.system.channels(),
            hurwitz: r.hurwitz,
            spectral_abscissa: round_sig(r.spectral_abscissa),
            drift_is_minus_identity: r.drift_is_minus_identity,
            hamiltonian_is_zero: r.hamiltonian_is_zero,
            target_residual: round_sig(r.target_residual),
            purity: round_sig(r.purity),
            drift: rows_of(&r.drift),
            noise_quadratic: rows_of(&r.noise_quadratic),
            steady_covariance: CovarianceDoc::from_covariance(&r.steady_covariance),
        }
    }
}

/// Matrix as row-major nested arrays, rounded.
pub fn matrix_rows(m: &RealMatrix) -> Vec<Vec<f64>> {
    rows_of(m)
}

pub fn complex_matrix_rows(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    complex_rows_of(m)
}

fn covariance_column(i: usize, j: usize, dim: usize) -> String {
    if dim < 10 {
        format!("V_{i}{j}")
    } else {
        format!("V_{i}_{j}")
    }
}

/// Trajectory as CSV: `t,mean_1..mean_2n,V_11,V_12,...` with row-major `V`.
/// For `2n >= 10` the covariance columns are written `V_i_j` so that indices
/// stay unambiguous.
pub fn trajectory_csv(traj: &MomentTrajectory) -> String {
    let dim = traj.means.first().map_or(0, |m| m.len());
    let mut header = vec!["t".to_string()];
    header.extend((1..=dim).map(|i| format!("mean_{i}")));
    for i in 1..=dim {
        for j in 1..=dim {
            header.push(covariance_column(i, j, dim));
        }
    }
    let mut out = header.join(",");
    out.push('\n');
    for ((t, m), v) in traj.times.iter().zip(&traj.means).zip(&traj.covariances) {
        let mut row = vec![format_g12(*t)];
        row.extend(m.iter().map(|x| format_g12(*x)));
        for i in 0..dim {
            for j in 0..dim {
                row.push(format_g12(v[(i, j)]));
            }
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}
