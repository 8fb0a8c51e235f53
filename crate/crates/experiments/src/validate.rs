//! Release checks: closed forms, the Fock-space oracle, derivative
//! consistency and the qualitative behaviour of every scheme.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::time::Instant;

use num_complex::Complex64;
use serde::Serialize;
use su11_core::fock::{fock_qfi, fock_scheme, DEFAULT_OVERLAP_STEP};
use su11_core::qfi::scheme_qfi_finite_difference;
use su11_core::schemes::finite_difference_dstate;
use su11_core::{
    build, closed_form_partial_one_pass, closed_form_sequential_two_pass, closed_form_standard,
    estimate_period, metric, phase_shifter, qfi_noisy, qfi_pure, scaled_qfi, scheme_qfi,
    two_mode_squeezer, CMatrix, SchemeConfig, SchemeKind, SqueezeParam,
};

use crate::compare::compare_resources;
use crate::output::sweep_csv_string;
use crate::presets::preset;
use crate::sweep::run_sweep;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidateOptions {
    /// Relative tolerance of the analytic-vs-finite-difference QFI check.
    pub qfi_tolerance: f64,
    /// Relative Frobenius tolerance of the derivative check.
    pub derivative_tolerance: f64,
    /// Flip the sign of one squeezer coupling before the metric check.
    pub perturb_squeezer: bool,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            qfi_tolerance: 1e-6,
            derivative_tolerance: 1e-6,
            perturb_squeezer: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

fn timed(name: &'static str, f: impl FnOnce() -> Result<String, String>) -> Check {
    let start = Instant::now();
    let res = f();
    let seconds = start.elapsed().as_secs_f64();
    match res {
        Ok(detail) => Check {
            name,
            passed: true,
            detail,
            seconds,
        },
        Err(detail) => Check {
            name,
            passed: false,
            detail,
            seconds,
        },
    }
}

fn engine<T>(r: su11_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `‖analytic − fd‖ / ‖analytic‖`. Where the analytic derivative vanishes
/// (a stationary phase) the deviation is measured against `‖σ‖` instead.
pub fn derivative_deviation(cov: &CMatrix, analytic: &CMatrix, fd: &CMatrix) -> f64 {
    let d = frobenius(analytic);
    let scale = if d >= 1e-8 * frobenius(cov) {
        d
    } else {
        frobenius(cov)
    };
    frobenius(&(analytic - fd)) / scale
}

/// `n` equally spaced phases on `[0, 2π)`.
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect()
}

fn metric_defect(w: &CMatrix) -> f64 {
    let k = metric(w.nrows() / 2);
    (w * &k * w.adjoint() - &k)
        .iter()
        .fold(0.0_f64, |a, z| a.max(z.norm()))
}

pub fn check_metric(perturb: bool) -> Check {
    timed("metric-preservation", || {
        let mut worst = 0.0_f64;
        for &r in &[0.0, 0.1, 0.5, 1.5] {
            for theta in phase_grid(8) {
                let g = engine(SqueezeParam::new(r, theta))?;
                let mut w = engine(two_mode_squeezer(g, 3, 0, 2))?.matrix().clone();
                if perturb {
                    // b ↦ cosh r·b + e^{iθ} sinh r·a†
                    let idx = (4, 1);
                    w[idx] = -w[idx];
                    if r == 0.0 {
                        w[idx] = Complex64::new(0.1, 0.0);
                    }
                }
                worst = worst.max(metric_defect(&w));
            }
        }
        for phi in phase_grid(8) {
            let u = engine(phase_shifter(phi, 3, 1))?;
            worst = worst.max(metric_defect(u.matrix()));
        }
        if worst < 1e-12 {
            Ok(format!("max |W K W† - K| = {worst:.2e}"))
        } else {
            Err(format!("max |W K W† - K| = {worst:.2e} exceeds 1e-12"))
        }
    })
}

fn closed_form_check(
    name: &'static str,
    cfg: impl Fn(f64) -> SchemeConfig,
    formula: impl Fn(f64, f64) -> f64,
) -> Check {
    timed(name, || {
        let mut worst = (0.0_f64, 0.0, 0.0);
        for &r in &[0.05, 0.1, 0.5] {
            for phi in phase_grid(32) {
                let h = engine(scheme_qfi(&cfg(r), phi))?.h;
                let e = rel(h, formula(r, phi));
                if e > worst.0 {
                    worst = (e, r, phi);
                }
            }
        }
        let (e, r, phi) = worst;
        let detail = format!("max relative deviation {e:.3e} at r={r}, phi={phi:.4}");
        if e <= 1e-9 {
            Ok(detail)
        } else {
            Err(detail)
        }
    })
}

pub fn check_standard_closed_form() -> Check {
    timed("standard-closed-form", || {
        let mut worst = 0.0_f64;
        let mut spread = 0.0_f64;
        for &r in &[0.05, 0.1, 0.5] {
            let hs: Vec<f64> = phase_grid(32)
                .into_iter()
                .map(|phi| scheme_qfi(&SchemeConfig::standard(r), phi).map(|q| q.h))
                .collect::<su11_core::Result<_>>()
                .map_err(|e| e.to_string())?;
            let exact = closed_form_standard(r);
            worst = hs.iter().fold(worst, |a, &h| a.max(rel(h, exact)));
            let (lo, hi) = hs
                .iter()
                .fold((f64::MAX, f64::MIN), |(lo, hi), &h| (lo.min(h), hi.max(h)));
            spread = spread.max((hi - lo) / exact);
        }
        let detail = format!("max relative deviation {worst:.3e}, phase spread {spread:.3e}");
        if worst <= 1e-9 && spread < 1e-9 {
            Ok(detail)
        } else {
            Err(detail)
        }
    })
}

pub fn check_sequential_closed_form() -> Check {
    closed_form_check(
        "sequential-two-pass-closed-form",
        |r| SchemeConfig::sequential(r, 2),
        closed_form_sequential_two_pass,
    )
}

pub fn check_partial_closed_form() -> Check {
    closed_form_check(
        "partial-one-pass-closed-form",
        |r| SchemeConfig::partial(r, 1),
        closed_form_partial_one_pass,
    )
}

pub fn check_fock_oracle() -> Check {
    timed("fock-oracle", || {
        let (mut di, mut dq) = (0.0_f64, 0.0_f64);
        for kind in [SchemeKind::Sequential, SchemeKind::Partial] {
            for n in 1..=3 {
                let cfg = SchemeConfig {
                    kind,
                    loops: n,
                    ..SchemeConfig::sequential(0.1, n)
                };
                for phi in [0.0, FRAC_PI_4, FRAC_PI_2] {
                    let out = engine(build(&cfg, phi))?;
                    let fock = engine(fock_scheme(&cfg, phi))?;
                    for (a, b) in out.state.intensity().iter().zip(fock.intensity()) {
                        di = di.max((a - b).abs());
                    }
                    let h = engine(qfi_pure(&out.state, &out.dstate))?.h;
                    let hf = engine(fock_qfi(&cfg, phi, DEFAULT_OVERLAP_STEP))?.value;
                    dq = dq.max(rel(hf, h));
                }
            }
        }
        let detail = format!("max intensity deviation {di:.3e}, max QFI deviation {dq:.3e}");
        if di <= 1e-6 && dq <= 1e-4 {
            Ok(detail)
        } else {
            Err(detail)
        }
    })
}

fn all_scheme_configs(n: usize) -> Vec<SchemeConfig> {
    vec![
        SchemeConfig::standard(0.1),
        SchemeConfig::sequential(0.1, n),
        SchemeConfig::partial(0.1, n),
        SchemeConfig::swapping(0.1, n, 4.min(n)),
    ]
}

pub fn check_derivative(tolerance: f64) -> Check {
    timed("derivative-finite-difference", || {
        let mut worst = 0.0_f64;
        for n in 1..=10 {
            for cfg in all_scheme_configs(n) {
                if cfg.kind == SchemeKind::Standard && n > 1 {
                    continue;
                }
                for phi in phase_grid(16) {
                    let out = engine(build(&cfg, phi))?;
                    let fd = engine(finite_difference_dstate(&cfg, phi, 1e-5))?;
                    worst = worst.max(derivative_deviation(out.state.cov(), &out.dstate, &fd));
                }
            }
        }
        let detail =
            format!("max relative Frobenius deviation {worst:.3e} (tolerance {tolerance:e})");
        if worst <= tolerance {
            Ok(detail)
        } else {
            Err(detail)
        }
    })
}

pub fn check_qfi_finite_difference(tolerance: f64) -> Check {
    timed("qfi-finite-difference", || {
        let mut worst = 0.0_f64;
        for n in [1, 3, 6] {
            for cfg in all_scheme_configs(n) {
                for phi in [0.3, FRAC_PI_4, 2.0] {
                    let a = engine(scheme_qfi(&cfg, phi))?.h;
                    let f = engine(scheme_qfi_finite_difference(&cfg, phi, 1e-5))?.h;
                    worst = worst.max(rel(f, a));
                }
            }
        }
        let detail = format!("max relative QFI deviation {worst:.3e} (tolerance {tolerance:e})");
        if worst <= tolerance {
            Ok(detail)
        } else {
            Err(detail)
        }
    })
}

fn scaled_series(kind: SchemeKind, r: f64, n_max: usize) -> Result<Vec<f64>, String> {
    (1..=n_max)
        .map(|n| {
            let cfg = SchemeConfig {
                kind,
                ..SchemeConfig::sequential(r, n)
            };
            engine(scheme_qfi(&cfg, FRAC_PI_4)).map(|q| scaled_qfi(q.h, n))
        })
        .collect()
}

pub fn check_scaling() -> Check {
    timed("scaled-qfi-shape", || {
        let seq = scaled_series(SchemeKind::Sequential, 0.1, 20)?;
        let part = scaled_series(SchemeKind::Partial, 0.1, 10)?;
        let seq_hi = scaled_series(SchemeKind::Sequential, 0.2, 20)?;
        let nonmonotone =
            seq.windows(2).any(|w| w[1] < w[0]) && seq.windows(2).any(|w| w[1] > w[0]);
        let increasing = part.windows(2).all(|w| w[1] >= w[0]);
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (m1, m2) = (mean(&seq), mean(&seq_hi));
        let detail = format!(
            "sequential oscillates: {nonmonotone}, partial non-decreasing: {increasing}, \
             mean sequential H/N^2 {m1:.4} (r=0.1) vs {m2:.4} (r=0.2)"
        );
        if nonmonotone && increasing && m2 > m1 {
            Ok(detail)
        } else {
            Err(detail)
        }
    })
}

pub fn check_loss() -> Check {
    timed("photon-loss", || {
        let mut details = Vec::new();
        let mut ok = true;
        for kind in [SchemeKind::Sequential, SchemeKind::Partial] {
            let cfg = |eta: f64| SchemeConfig {
                kind,
                ..SchemeConfig::sequential(0.1, 5).with_loss(eta)
            };
            let hs: Vec<f64> = (0..=10)
                .map(|i| {
                    let c = cfg(i as f64 / 10.0);
                    let out = engine(build(&c, FRAC_PI_4))?;
                    engine(qfi_noisy(&out.state, &out.dstate)).map(|q| q.h)
                })
                .collect::<Result<_, _>>()?;
            let lossless = engine(build(&cfg(0.0), FRAC_PI_4))?;
            let pure = engine(qfi_pure(&lossless.state, &lossless.dstate))?.h;
            let decreasing = hs[..10].windows(2).all(|w| w[1] < w[0]);
            let factor = hs[0] / pure;
            ok &= decreasing && hs[10] == 0.0 && (factor - 2.0).abs() < 1e-12;
            details.push(format!(
                "{kind}: decreasing {decreasing}, H(eta=1) = {:e}, noisy/pure = {factor}",
                hs[10]
            ));
        }
        let detail = details.join("; ");
        if ok {
            Ok(detail)
        } else {
            Err(detail)
        }
    })
}

pub fn check_sensitivity() -> Check {
    timed("sensitivity-comparison", || {
        let rows = engine_rows(compare_resources(0.1, FRAC_PI_4, 12))?;
        let argmin = rows
            .iter()
            .min_by(|a, b| a.sequential.delta_phi.total_cmp(&b.sequential.delta_phi))
            .map(|r| r.loops)
            .unwrap_or(0);
        let below = sequential_lead(&rows);
        let detail = format!(
            "sequential delta_phi minimum at N={argmin} (expected 4±1), \
             below partial up to N={below} (expected 6±1)"
        );
        if (3..=5).contains(&argmin) && (5..=7).contains(&below) {
            Ok(detail)
        } else {
            Err(detail)
        }
    })
}

/// Largest `N` such that sequential Δφ does not exceed partial Δφ for any
/// loop count up to `N` (the two coincide at `N = 1`).
pub fn sequential_lead(rows: &[crate::compare::CompareRow]) -> usize {
    rows.iter()
        .take_while(|r| r.sequential.delta_phi <= r.partial.delta_phi * (1.0 + 1e-12))
        .count()
}

fn engine_rows<T>(r: crate::error::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

pub fn check_swapping() -> Check {
    timed("swapping-scheme", || {
        let k = engine(estimate_period(
            &SchemeConfig::sequential(0.1, 1),
            FRAC_PI_4,
            200,
        ))?;
        let mut intensity = Vec::new();
        let mut qfi = Vec::new();
        for blocks in 1..=4 {
            let cfg = SchemeConfig::swapping(0.1, 4 * blocks, 4);
            let out = engine(build(&cfg, FRAC_PI_4))?;
            intensity.push(out.state.intensity()[0]);
            qfi.push(engine(qfi_pure(&out.state, &out.dstate))?.h);
        }
        let seq = engine(build(&SchemeConfig::sequential(0.1, 16), FRAC_PI_4))?;
        let seq_i = seq.state.intensity()[0];
        let seq_h = engine(qfi_pure(&seq.state, &seq.dstate))?.h;
        let grows = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
        let ok =
            k == 4 && grows(&intensity) && grows(&qfi) && intensity[3] > seq_i && qfi[3] > seq_h;
        let detail = format!(
            "estimated k={k}; at N=16 intensity {:.4} vs sequential {seq_i:.4}, \
             QFI {:.2} vs sequential {seq_h:.2}",
            intensity[3], qfi[3]
        );
        if ok {
            Ok(detail)
        } else {
            Err(detail)
        }
    })
}

pub fn check_determinism() -> Check {
    timed("fig7-determinism", || {
        let p = engine_rows(preset("fig7"))?;
        let run = |threads: usize| -> Result<String, String> {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| e.to_string())?;
            pool.install(|| {
                let rows = engine_rows(run_sweep(&p.spec))?;
                engine_rows(sweep_csv_string(&rows, p.spec.precision))
            })
        };
        let start = Instant::now();
        let a = run(0)?;
        let elapsed = start.elapsed().as_secs_f64();
        let b = run(0)?;
        let c = run(1)?;
        let identical = a == b && a == c;
        let detail = format!(
            "{} bytes, identical across runs: {identical}, one run {elapsed:.2}s",
            a.len()
        );
        if identical && elapsed < 10.0 {
            Ok(detail)
        } else {
            Err(detail)
        }
    })
}

/// Runs every check in a fixed order.
pub fn run_validation(opts: &ValidateOptions) -> Vec<Check> {
    vec![
        check_metric(opts.perturb_squeezer),
        check_standard_closed_form(),
        check_sequential_closed_form(),
        check_partial_closed_form(),
        check_fock_oracle(),
        check_derivative(opts.derivative_tolerance),
        check_qfi_finite_difference(opts.qfi_tolerance),
        check_scaling(),
        check_loss(),
        check_sensitivity(),
        check_swapping(),
        check_determinism(),
    ]
}
