use std::fs;
use std::io::Read;
use std::path::Path;

use gaussian_cascade::dynamics::convergence_report;
use gaussian_cascade::gaussian::{CovarianceMatrix, PureGaussianState};
use gaussian_cascade::io::{
    self, complex_matrix_rows, matrix_rows, round_sig, CovarianceDoc, ReportDoc, StateDoc, SystemDoc,
};
use gaussian_cascade::mats;
use gaussian_cascade::Error;
use gaussian_cascade::slh::{char_poly, qsde_matrices, CascadeSystem};
use gaussian_cascade::synthesis::{self, SynthesisReport};
use serde::Serialize;
use serde_json::Value;

use crate::config::{CliError, ExampleName, Io, RunConfig, EXIT_OK, EXIT_RESIDUAL};

type CmdResult = Result<u8, CliError>;

/// Reads `spec` as inline JSON (leading `{`), stdin (`-`) or a file path.
fn read_source(spec: &str, what: &str) -> Result<String, CliError> {
    let trimmed = spec.trim_start();
    if trimmed.starts_with('{') {
        return Ok(spec.to_string());
    }
    if spec == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(spec).map_err(|e| CliError::parse(format!("{what} {spec:?}: {e}")))
}

fn required_input(io: &Io) -> Result<String, CliError> {
    let spec = io
        .input
        .as_deref()
        .ok_or_else(|| CliError::parse("--input is required"))?;
    read_source(spec, "input")
}

fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::parse(format!("output {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn verdict(report: &SynthesisReport, cfg: &RunConfig) -> u8 {
    if report.hurwitz && report.target_residual < cfg.residual {
        EXIT_OK
    } else {
        EXIT_RESIDUAL
    }
}

#[derive(Serialize)]
struct SynthesisOutput {
    system: SystemDoc,
    report: ReportDoc,
}

pub fn synthesize(io: &Io) -> CmdResult {
    let cfg = RunConfig::from_overrides(&io.tol)?;
    let target = io::parse_state(&required_input(io)?, &cfg.tolerances)?;
    let system = synthesis::synthesize_cascade(&target)?;
    let report = synthesis::verify_synthesis_with(&system, &target, &cfg.tolerances)?;
    let out = SynthesisOutput { system: SystemDoc::from_system(&system), report: ReportDoc::from_report(&report) };
    emit(io.output.as_deref(), &to_json(&out))?;
    Ok(verdict(&report, &cfg))
}

#[derive(Serialize)]
struct ComposeOutput {
    n: usize,
    m: usize,
    #[serde(rename = "K")]
    k: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "R")]
    r: Vec<Vec<f64>>,
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    b: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "C")]
    c: Vec<Vec<[f64; 2]>>,
    #[serde(rename = "D")]
    d: Vec<Vec<f64>>,
    noise_quadratic: Vec<Vec<f64>>,
    char_poly: Vec<f64>,
    spectral_abscissa: f64,
    hurwitz: bool,
}

pub fn compose(io: &Io) -> CmdResult {
    let cfg = RunConfig::from_overrides(&io.tol)?;
    let system = io::parse_system(&required_input(io)?)?;
    let q = qsde_matrices(&system)?;
    let abscissa = mats::spectral_abscissa(&q.drift)?;
    let out = ComposeOutput {
        n: system.modes(),
        m: system.channels(),
        k: complex_matrix_rows(system.coupling()),
        r: matrix_rows(system.hamiltonian()),
        a: matrix_rows(&q.drift),
        b: complex_matrix_rows(&q.diffusion),
        c: complex_matrix_rows(&q.output),
        d: matrix_rows(&q.feedthrough),
        noise_quadratic: matrix_rows(&q.noise_quadratic),
        char_poly: char_poly(&q.drift)?.into_iter().map(round_sig).collect(),
        spectral_abscissa: round_sig(abscissa),
        hurwitz: abscissa < -cfg.tolerances.hurwitz_margin,
    };
    emit(io.output.as_deref(), &to_json(&out))?;
    Ok(EXIT_OK)
}

fn split_combined(text: &str) -> Result<(String, String), CliError> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::parse(format!("input: {e}")))?;
    match (v.get("system"), v.get("target")) {
        (Some(s), Some(t)) => Ok((s.to_string(), t.to_string())),
        _ => Err(CliError::parse(
            "verify needs --target, or an input object with \"system\" and \"target\" fields",
        )),
    }
}

pub fn verify(io: &Io, target: Option<&str>) -> CmdResult {
    let cfg = RunConfig::from_overrides(&io.tol)?;
    let input = required_input(io)?;
    let (system_text, target_text) = match target {
        Some(spec) => (input, read_source(spec, "target")?),
        None => split_combined(&input)?,
    };
    let system = io::parse_system(&system_text)?;
    let target = io::parse_state(&target_text, &cfg.tolerances)?;
    let report = synthesis::verify_synthesis_with(&system, &target, &cfg.tolerances)?;
    emit(io.output.as_deref(), &to_json(&ReportDoc::from_report(&report)))?;
    Ok(verdict(&report, &cfg))
}

fn initial_covariance(spec: &str, n: usize, cfg: &RunConfig) -> Result<CovarianceMatrix, CliError> {
    let invalid = |msg: String| CliError::invalid_state(format!("--v0 {spec:?}: {msg}"));
    if spec == "vacuum" {
        return CovarianceMatrix::vacuum(n).map_err(|e| invalid(e.to_string()));
    }
    if let Some(nu) = spec.strip_prefix("thermal:") {
        let nu: f64 = nu.trim().parse().map_err(|_| invalid("thermal factor is not a number".into()))?;
        let v = CovarianceMatrix::thermal(n, nu).map_err(|e| invalid(e.to_string()))?;
        if nu < 1.0 {
            return Err(invalid(format!("thermal factor {nu} violates the uncertainty bound (needs >= 1)")));
        }
        return Ok(v);
    }
    let text = read_source(spec, "--v0").map_err(|e| invalid(e.message))?;
    let v = io::parse_covariance(&text, &cfg.tolerances).map_err(|e| match e {
        Error::Parse(_) => CliError::from(e),
        other => invalid(other.to_string()),
    })?;
    if v.modes() != n {
        return Err(CliError::from(Error::Dimension(format!(
            "--v0 has {} modes, system has {n}",
            v.modes()
        ))));
    }
    if !gaussian_cascade::gaussian::heisenberg_valid(&v) {
        return Err(invalid("covariance violates the uncertainty bound".into()));
    }
    Ok(v)
}

#[derive(Serialize)]
struct SimulationSummary {
    n: usize,
    m: usize,
    t_end: f64,
    dt: f64,
    samples: usize,
    final_residual: f64,
    decay_exponent: Option<f64>,
    steady_covariance: CovarianceDoc,
}

pub fn simulate(io: &Io, t_end: f64, dt: f64, v0: &str, summary: Option<&Path>) -> CmdResult {
    let cfg = RunConfig::from_overrides(&io.tol)?;
    let system = io::parse_system(&required_input(io)?)?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::Parameter(format!("--dt must be positive and finite, got {dt}")).into());
    }
    let v0 = initial_covariance(v0, system.modes(), &cfg)?;
    let rep = convergence_report(&system, &v0, t_end, dt)?;
    let csv = io::trajectory_csv(&rep.trajectory);
    let doc = SimulationSummary {
        n: system.modes(),
        m: system.channels(),
        t_end: round_sig(t_end),
        dt: round_sig(dt),
        samples: rep.trajectory.len(),
        final_residual: round_sig(rep.final_residual()),
        decay_exponent: rep.decay_exponent.map(round_sig),
        steady_covariance: CovarianceDoc::from_covariance(&rep.steady_state),
    };
    let summary_text = to_json(&doc);
    emit(io.output.as_deref(), &csv)?;
    match (summary, io.output.is_some()) {
        (Some(p), _) => emit(Some(p), &summary_text)?,
        (None, true) => emit(None, &summary_text)?,
        (None, false) => eprint!("{summary_text}"),
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ExampleMeta {
    name: String,
    alpha: f64,
}

#[derive(Serialize)]
struct ExampleOutput {
    example: ExampleMeta,
    target: StateDoc,
    system: SystemDoc,
    report: ReportDoc,
}

pub fn example(name: ExampleName, alpha: f64, io: &Io) -> CmdResult {
    let cfg = RunConfig::from_overrides(&io.tol)?;
    if !alpha.is_finite() {
        return Err(Error::Parameter(format!("--alpha must be finite, got {alpha}")).into());
    }
    let system: CascadeSystem = match name {
        ExampleName::Realization1 => synthesis::realization1(alpha)?,
        ExampleName::Realization2 => synthesis::realization2(alpha)?,
    };
    let target = PureGaussianState::two_mode_squeezed(alpha)?;
    let report = synthesis::verify_synthesis_with(&system, &target, &cfg.tolerances)?;
    let out = ExampleOutput {
        example: ExampleMeta { name: name.to_string(), alpha: round_sig(alpha) },
        target: StateDoc::from_state(&target),
        system: SystemDoc::from_system(&system),
        report: ReportDoc::from_report(&report),
    };
    emit(io.output.as_deref(), &to_json(&out))?;
    Ok(verdict(&report, &cfg))
}
