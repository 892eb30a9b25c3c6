//! End-to-end acceptance checks. Runs without the libtest harness so that
//! each criterion prints exactly one PASS/FAIL line in `cargo test` output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use gaussian_cascade::dynamics::{convergence_report, evolve_moments, steady_state};
use gaussian_cascade::gaussian::{
    covariance_from_xy, purity, two_mode_squeezed_covariance, xy_from_covariance, CovarianceMatrix,
    PureGaussianState,
};
use gaussian_cascade::mats::{
    dagger, interleaved_symplectic_form, lyapunov_residual, max_abs, max_abs_complex, max_asymmetry,
    max_diff, permutation_matrix, real_part, solve_lyapunov, spectral_abscissa, symplectic_form,
    RealMatrix,
};
use gaussian_cascade::slh::{char_poly, compose_cascade, qsde_matrices, series_product, CascadeSystem};
use gaussian_cascade::synthesis::{realization1, realization2, synthesize_cascade, verify_synthesis};
use nalgebra::{dmatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn within_budget(start: Instant, budget: Duration, detail: String) -> Outcome {
    let took = start.elapsed();
    ensure!(took < budget, "{detail}; took {took:.2?}, budget {budget:?}");
    Ok(format!("{detail}; {took:.2?}"))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Random pure targets run through synthesis, composition, the QSDE and the
/// steady-state Lyapunov solve.
fn synthesis_end_to_end() -> Outcome {
    let start = Instant::now();
    let mut r = rng(0xC0FFEE);
    let (mut worst_a, mut worst_r, mut worst_v, mut worst_p) = (0f64, 0f64, 0f64, 0f64);
    for case in 0..200 {
        let n = 1 + case % 6;
        let target = random_target(&mut r, n);
        let sys = synthesize_cascade(&target).map_err(|e| e.to_string())?;
        let composed = compose_cascade(sys.oscillators()).map_err(|e| e.to_string())?;
        let q = qsde_matrices(&composed).map_err(|e| e.to_string())?;
        let v = steady_state(&q.drift, &q.noise_quadratic).map_err(|e| e.to_string())?;
        let expected = covariance_from_xy(&target).map_err(|e| e.to_string())?;
        worst_a = worst_a.max(max_diff(&q.drift, &-RealMatrix::identity(2 * n, 2 * n)));
        worst_r = worst_r.max(max_abs(composed.hamiltonian()));
        worst_v = worst_v.max(max_diff(v.matrix(), expected.matrix()));
        worst_p = worst_p.max((purity(&v).map_err(|e| e.to_string())? - 1.0).abs());
    }
    ensure!(worst_a < 1e-9, "max|A+I| = {worst_a:e}");
    ensure!(worst_r < 1e-10, "max|R| = {worst_r:e}");
    ensure!(worst_v < 1e-9, "max|V-V*| = {worst_v:e}");
    ensure!(worst_p < 1e-8, "|purity-1| = {worst_p:e}");
    within_budget(
        start,
        Duration::from_secs(10),
        format!("200 targets, max|A+I| {worst_a:.1e}, max|R| {worst_r:.1e}, max|V-V*| {worst_v:.1e}, |P-1| {worst_p:.1e}"),
    )
}

/// The single-channel cascade for the two-mode squeezed state at α = 0.5.
fn realization1_golden() -> Outcome {
    let start = Instant::now();
    let (s, ch) = (1f64.sinh(), 1f64.cosh());
    let q1 = s - ch;
    let q2 = (s * s - s * ch) / ch;
    let sys = realization1(0.5).map_err(|e| e.to_string())?;

    let r_expected = dmatrix![
        2.0, 0.0, q2, q1;
        0.0, -2.0, -q1, -q2;
        q2, -q1, 2.0, 0.0;
        q1, -q2, 0.0, -2.0
    ];
    let dr = max_diff(sys.hamiltonian(), &r_expected);
    ensure!(dr < 1e-12, "R differs by {dr:e}");
    let k_expected = dmatrix![c(0.0, q1), c(0.0, q1), c(1.0, 0.0), c(1.0, 0.0)];
    let dk = max_abs_complex(&(sys.coupling() - k_expected));
    ensure!(dk < 1e-12, "K differs by {dk:e}");

    let q = qsde_matrices(&sys).map_err(|e| e.to_string())?;
    let half_bbd = real_part(&(&q.diffusion * dagger(&q.diffusion))) * 0.5;
    let sq = q1 * q1;
    let noise_expected = dmatrix![
        1.0, 1.0, 0.0, 0.0;
        1.0, 1.0, 0.0, 0.0;
        0.0, 0.0, sq, sq;
        0.0, 0.0, sq, sq
    ];
    let dn = max_diff(&half_bbd, &noise_expected);
    ensure!(dn < 1e-12, "(1/2)BB† differs by {dn:e}");

    let (b, cc) = (-2.0 * q1, q1 * q1 - q2 * q2 + 4.0);
    let expected = [1.0, 2.0 * b, b * b + 2.0 * cc, 2.0 * b * cc, cc * cc];
    let got = char_poly(&q.drift).map_err(|e| e.to_string())?;
    for (k, (g, e)) in got.iter().zip(&expected).enumerate() {
        ensure!((g - e).abs() <= 1e-6 * e.abs(), "char_poly[{k}] = {g}, expected {e}");
    }

    let v = steady_state(&q.drift, &q.noise_quadratic).map_err(|e| e.to_string())?;
    let dv = max_diff(v.matrix(), &two_mode_squeezed_covariance(0.5));
    ensure!(dv < 1e-8, "steady state differs by {dv:e}");
    within_budget(
        start,
        Duration::from_secs(1),
        format!("R {dr:.1e}, K {dk:.1e}, BB† {dn:.1e}, V {dv:.1e}"),
    )
}

/// The two-channel cascade produced by the general construction.
fn realization2_golden() -> Outcome {
    let start = Instant::now();
    let mut worst = 0f64;
    for alpha in [0.3, 1.0] {
        let (ch, sh) = (f64::cosh(alpha), f64::sinh(alpha));
        let (c2, s2) = ((2.0 * alpha).cosh(), (2.0 * alpha).sinh());
        let target = PureGaussianState::new(RealMatrix::zeros(2, 2), dmatrix![c2, -s2; -s2, c2])
            .map_err(|e| e.to_string())?;
        let sys = synthesize_cascade(&target).map_err(|e| e.to_string())?;
        let k1 = dmatrix![c(0.0, -ch), c(ch, 0.0); c(0.0, sh), c(sh, 0.0)];
        let k2 = dmatrix![c(0.0, sh), c(sh, 0.0); c(0.0, -ch), c(ch, 0.0)];
        let osc = sys.oscillators();
        ensure!(osc.len() == 2 && sys.channels() == 2, "expected two oscillators on two channels");
        let dk = max_abs_complex(&(osc[0].coupling() - k1)).max(max_abs_complex(&(osc[1].coupling() - k2)));
        ensure!(dk < 1e-10, "α={alpha}: couplings differ by {dk:e}");
        for o in osc {
            ensure!(max_abs(o.hamiltonian()) == 0.0, "α={alpha}: nonzero R_j");
        }
        let a = qsde_matrices(&sys).map_err(|e| e.to_string())?.drift;
        let da = max_diff(&a, &-RealMatrix::identity(4, 4));
        ensure!(da < 1e-10, "α={alpha}: max|A+I| = {da:e}");
        worst = worst.max(dk).max(da);
    }
    within_budget(start, Duration::from_secs(1), format!("α ∈ {{0.3, 1.0}}, worst deviation {worst:.1e}"))
}

/// One-channel and two-channel cascades prepare the same state.
fn cross_realization() -> Outcome {
    let mut worst = 0f64;
    for alpha in [0.1, 0.5, 1.0] {
        let target = PureGaussianState::two_mode_squeezed(alpha).map_err(|e| e.to_string())?;
        let s1 = realization1(alpha).map_err(|e| e.to_string())?;
        let s2 = realization2(alpha).map_err(|e| e.to_string())?;
        ensure!(s1.channels() == 1 && s2.channels() == 2, "unexpected channel counts");
        let v1 = verify_synthesis(&s1, &target).map_err(|e| e.to_string())?.steady_covariance;
        let v2 = verify_synthesis(&s2, &target).map_err(|e| e.to_string())?.steady_covariance;
        let d = max_diff(v1.matrix(), v2.matrix());
        ensure!(d < 1e-8, "α={alpha}: steady states differ by {d:e}");
        worst = worst.max(d);
    }
    Ok(format!("α ∈ {{0.1, 0.5, 1.0}}, max difference {worst:.1e}"))
}

fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

/// Covariance relaxes as e^{-2t}, the mean as e^{-t}.
fn dynamics_law() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2024);
    let (mut worst_v, mut worst_m, mut worst_fit) = (0f64, 0f64, 0f64);
    for n in 1..=6 {
        let target = random_target(&mut r, n);
        let sys = synthesize_cascade(&target).map_err(|e| e.to_string())?;
        let q = qsde_matrices(&sys).map_err(|e| e.to_string())?;
        let v_inf = steady_state(&q.drift, &q.noise_quadratic).map_err(|e| e.to_string())?;
        let v0 = CovarianceMatrix::thermal(n, 3.0).map_err(|e| e.to_string())?;
        let mean0 = DVector::from_fn(2 * n, |_, _| r.random_range(-1.0..1.0));
        let traj = evolve_moments(&q.drift, &q.noise_quadratic, &mean0, &v0, 3.0, 1e-3)
            .map_err(|e| e.to_string())?;
        let d0 = (v0.matrix() - v_inf.matrix()).norm();
        for k in (1..traj.len()).step_by(10) {
            let t = traj.times[k];
            let dv = rel_err((&traj.covariances[k] - v_inf.matrix()).norm(), (-2.0 * t).exp() * d0);
            let dm = rel_err(traj.means[k].norm(), (-t).exp() * mean0.norm());
            ensure!(dv < 1e-6, "n={n} t={t}: covariance law off by {dv:e}");
            ensure!(dm < 1e-6, "n={n} t={t}: mean law off by {dm:e}");
            worst_v = worst_v.max(dv);
            worst_m = worst_m.max(dm);
        }
        let rep = convergence_report(&sys, &v0, 3.0, 1e-3).map_err(|e| e.to_string())?;
        let fit = rep.decay_exponent.ok_or("no decay exponent fitted")?;
        ensure!((fit + 2.0).abs() <= 0.04, "n={n}: fitted exponent {fit}");
        worst_fit = worst_fit.max((fit + 2.0).abs());
    }
    within_budget(
        start,
        Duration::from_secs(5),
        format!("n=1..6, covariance law {worst_v:.1e}, mean law {worst_m:.1e}, |fit+2| {worst_fit:.1e}"),
    )
}

fn random_cascade(r: &mut impl Rng, n: usize, m: usize) -> CascadeSystem {
    let osc: Vec<_> = (0..n).map(|_| random_oscillator(r, m)).collect();
    compose_cascade(&osc).unwrap()
}

/// Structural identities over 500 random cases.
fn structural_identities() -> Outcome {
    let start = Instant::now();
    let mut r = rng(77);
    let mut worst = [0f64; 5];
    for case in 0..500 {
        let n = 1 + case % 6;
        let m = 1 + (case / 6) % 4;

        let sys = random_cascade(&mut r, n, m);
        worst[0] = worst[0].max(max_asymmetry(sys.hamiltonian()));

        let q = qsde_matrices(&sys).unwrap();
        let half_bbd = real_part(&(&q.diffusion * dagger(&q.diffusion))) * 0.5;
        let sigma = symplectic_form(n).unwrap();
        let ktk = real_part(&(dagger(sys.coupling()) * sys.coupling()));
        worst[1] = worst[1].max(max_diff(&half_bbd, &(&sigma * ktk * sigma.transpose())));

        let (n1, n2, n3) = (1 + case % 3, 1 + (case / 3) % 3, 1 + (case / 9) % 3);
        let g: Vec<_> = [n1, n2, n3].iter().map(|&k| random_cascade(&mut r, k, m)).collect();
        let left = series_product(&series_product(&g[0], &g[1]).unwrap(), &g[2]).unwrap();
        let right = series_product(&g[0], &series_product(&g[1], &g[2]).unwrap()).unwrap();
        worst[2] = worst[2]
            .max(max_abs_complex(&(left.coupling() - right.coupling())))
            .max(max_diff(left.hamiltonian(), right.hamiltonian()));

        let p = permutation_matrix(n).unwrap();
        if p.transpose() * &sigma * &p != interleaved_symplectic_form(n).unwrap() {
            return Err(format!("n={n}: PᵀΣP is not diag(J)"));
        }

        let target = random_target(&mut r, n);
        let back = xy_from_covariance(&covariance_from_xy(&target).unwrap()).unwrap().state;
        worst[3] = worst[3].max(max_diff(back.x(), target.x())).max(max_diff(back.y(), target.y()));

        let mm = uniform_matrix(&mut r, 2 * n, 2 * n, -1.0, 1.0);
        let shift = spectral_abscissa(&mm).unwrap() + r.random_range(0.1..2.0);
        let a = mm - RealMatrix::identity(2 * n, 2 * n) * shift;
        let v = solve_lyapunov(&a, &q.noise_quadratic).unwrap();
        worst[4] = worst[4].max(lyapunov_residual(&a, &v, &q.noise_quadratic));
    }
    let names = ["R symmetry", "(1/2)BB†", "associativity", "xy roundtrip", "Lyapunov residual"];
    let limits = [1e-10, 1e-10, 1e-12, 1e-8, 1e-9];
    for ((name, w), lim) in names.iter().zip(worst).zip(limits) {
        ensure!(w < lim, "{name}: {w:e} ≥ {lim:e}");
    }
    within_budget(
        start,
        Duration::from_secs(30),
        format!(
            "500 cases, worst: sym {:.1e}, BB† {:.1e}, assoc {:.1e}, xy {:.1e}, lyap {:.1e}",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

/// Binary round trip, determinism and the exit-code contract.
fn cli_contract() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let p = |name: &str| dir.path().join(name).to_str().unwrap().to_string();
    let mut r = rng(99);
    for case in 0..20 {
        let n = 1 + case % 6;
        let target = random_target(&mut r, n);
        fs::write(p("target.json"), state_json(&target)).unwrap();
        let syn = gcascade(&["synthesize", "--input", &p("target.json"), "--output", &p("syn.json")]);
        ensure!(code(&syn) == 0, "case {case}: synthesize exit {} {}", code(&syn), stderr(&syn));
        let doc: serde_json::Value = serde_json::from_slice(&fs::read(p("syn.json")).unwrap()).unwrap();
        fs::write(p("system.json"), doc["system"].to_string()).unwrap();
        let ver = gcascade(&["verify", "--input", &p("system.json"), "--target", &p("target.json")]);
        ensure!(code(&ver) == 0, "case {case}: verify exit {} {}", code(&ver), stderr(&ver));
    }

    let runs: [&[&str]; 3] = [
        &["synthesize", "--input", &p("target.json")],
        &["example", "realization1", "--alpha", "0.5"],
        &["simulate", "--input", &p("system.json"), "--t-end", "1", "--v0", "thermal:2"],
    ];
    for args in runs {
        let (a, b) = (gcascade(args), gcascade(args));
        ensure!(code(&a) == 0 && !a.stdout.is_empty(), "{args:?} failed: {}", stderr(&a));
        ensure!(a.stdout == b.stdout && a.stderr == b.stderr, "{args:?} is not byte-identical");
    }

    let f = |name: &str| fixture(name).to_str().unwrap().to_string();
    let mismatch = stdout_json(&gcascade(&["example", "realization1", "--alpha", "0.9"]));
    fs::write(p("other.json"), mismatch["target"].to_string()).unwrap();
    let r1 = stdout_json(&gcascade(&["example", "realization1", "--alpha", "0.5"]));
    fs::write(p("r1.json"), r1["system"].to_string()).unwrap();
    let cases: [(i32, Vec<String>); 5] = [
        (1, vec!["verify".into(), "--input".into(), p("r1.json"), "--target".into(), p("other.json")]),
        (2, vec!["synthesize".into(), "--input".into(), f("malformed.json")]),
        (3, vec!["synthesize".into(), "--input".into(), f("negative_y.json")]),
        (4, vec!["verify".into(), "--input".into(), f("unstable_system.json"), "--target".into(), f("vacuum_2.json")]),
        (5, vec!["verify".into(), "--input".into(), f("unstable_system.json"), "--target".into(), f("vacuum_1.json")]),
    ];
    for (want, args) in &cases {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = gcascade(&args);
        ensure!(code(&out) == *want, "{args:?}: exit {} (wanted {want})", code(&out));
    }
    Ok("20 round trips exit 0; 3 commands byte-identical; exit codes 1-5 triggered".into())
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("end-to-end synthesis on random targets", synthesis_end_to_end),
        ("single-channel two-mode squeezing cascade", realization1_golden),
        ("two-channel two-mode squeezing cascade", realization2_golden),
        ("cross-realization steady states", cross_realization),
        ("moment relaxation law", dynamics_law),
        ("structural identities", structural_identities),
        ("command-line contract", cli_contract),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({detail})", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
