//! Acceptance suite: one line per criterion, non-zero exit if any fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::panic;
use std::process::Command;
use std::time::Instant;

use su11_core::fock::{fock_qfi, fock_scheme, DEFAULT_OVERLAP_STEP};
use su11_core::schemes::finite_difference_dstate;
use su11_core::{
    build, closed_form_partial_one_pass, closed_form_sequential_two_pass, closed_form_standard,
    estimate_period, qfi_noisy, qfi_pure, CMatrix, SchemeConfig, SchemeKind,
};
use su11_experiments::{compare_resources, preset, run_sweep, SweepRow, SweepSpec};

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn phases(n: usize) -> Vec<f64> {
    (0..n).map(|i| 2.0 * PI * i as f64 / n as f64).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn frob(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn config(kind: SchemeKind, r: f64, n: usize) -> SchemeConfig {
    match kind {
        SchemeKind::Standard => SchemeConfig::standard(r),
        SchemeKind::Swapping => SchemeConfig::swapping(r, n, 4.min(n)),
        _ => SchemeConfig {
            kind,
            ..SchemeConfig::sequential(r, n)
        },
    }
}

fn pure_qfi(cfg: &SchemeConfig, phi: f64) -> f64 {
    let out = build(cfg, phi).unwrap();
    qfi_pure(&out.state, &out.dstate).unwrap().h
}

fn standard_qfi() -> Outcome {
    let start = Instant::now();
    let (mut worst, mut spread) = (0.0_f64, 0.0_f64);
    for r in [0.05, 0.1, 0.5] {
        let hs: Vec<f64> = phases(32)
            .into_iter()
            .map(|phi| pure_qfi(&SchemeConfig::standard(r), phi))
            .collect();
        let exact = (2.0 * r).sinh().powi(2);
        assert_eq!(closed_form_standard(r), exact);
        for &h in &hs {
            worst = worst.max(rel(h, exact));
        }
        let hi = hs.iter().cloned().fold(f64::MIN, f64::max);
        let lo = hs.iter().cloned().fold(f64::MAX, f64::min);
        spread = spread.max((hi - lo) / exact);
    }
    let secs = start.elapsed().as_secs_f64();
    (
        worst <= 1e-9 && spread < 1e-9 && secs < 1.0,
        format!("max rel err {worst:.2e}, spread {spread:.2e}, {secs:.3}s"),
    )
}

fn closed_form(kind: SchemeKind, n: usize, formula: fn(f64, f64) -> f64) -> Outcome {
    let start = Instant::now();
    let mut worst = (0.0_f64, 0.0, 0.0, 0.0, 0.0);
    for r in [0.05, 0.1, 0.5] {
        for phi in phases(32) {
            let h = pure_qfi(&config(kind, r, n), phi);
            let f = formula(r, phi);
            let e = rel(h, f);
            if e > worst.0 {
                worst = (e, r, phi, h, f);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let (e, r, phi, h, f) = worst;
    (
        e <= 1e-9 && secs < 1.0,
        format!(
            "max rel err {e:.3e} at r={r}, phi={phi:.4} (pipeline {h:.6e}, formula {f:.6e}), {secs:.3}s"
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let (mut di, mut dq) = (0.0_f64, 0.0_f64);
    for kind in [SchemeKind::Sequential, SchemeKind::Partial] {
        for n in 1..=3 {
            let cfg = config(kind, 0.1, n);
            for phi in [0.0, FRAC_PI_4, FRAC_PI_2] {
                let out = build(&cfg, phi).unwrap();
                let fock = fock_scheme(&cfg, phi).unwrap();
                for (g, f) in out.state.intensity().iter().zip(fock.intensity()) {
                    di = di.max((g - f).abs());
                }
                let h = qfi_pure(&out.state, &out.dstate).unwrap().h;
                let hf = fock_qfi(&cfg, phi, DEFAULT_OVERLAP_STEP).unwrap().value;
                dq = dq.max(rel(hf, h));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        di <= 1e-6 && dq <= 1e-4 && secs < 30.0,
        format!("max intensity dev {di:.2e}, max QFI rel dev {dq:.2e}, {secs:.2}s"),
    )
}

fn derivative_correctness() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    let mut stationary = 0;
    for kind in SchemeKind::ALL {
        let loops = if kind == SchemeKind::Standard { 1 } else { 10 };
        for n in 1..=loops {
            let cfg = config(kind, 0.1, n);
            for phi in phases(16) {
                let out = build(&cfg, phi).unwrap();
                let fd = finite_difference_dstate(&cfg, phi, 1e-5).unwrap();
                let d = frob(&out.dstate);
                let s = frob(out.state.cov());
                // an exactly vanishing derivative has no relative scale of its own
                let scale = if d >= 1e-8 * s {
                    d
                } else {
                    stationary += 1;
                    s
                };
                worst = worst.max(frob(&(&out.dstate - fd)) / scale);
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    (
        worst <= 1e-6 && secs < 5.0,
        format!(
            "max rel Frobenius dev {worst:.2e} ({stationary} stationary points scaled by |sigma|), {secs:.2}s"
        ),
    )
}

fn rows_for(spec: &SweepSpec, r: f64) -> Vec<SweepRow> {
    run_sweep(spec)
        .unwrap()
        .into_iter()
        .filter(|row| row.r == r && row.phi == FRAC_PI_4)
        .collect()
}

fn scaled_qfi_shape() -> Outcome {
    let seq = rows_for(&preset("fig4a").unwrap().spec, 0.1);
    let part = rows_for(&preset("fig5a").unwrap().spec, 0.1);
    let seq_hi = rows_for(
        &SweepSpec {
            r: vec![0.2],
            ..preset("fig4a").unwrap().spec
        },
        0.2,
    );
    assert_eq!((seq.len(), part.len(), seq_hi.len()), (20, 10, 20));
    let s: Vec<f64> = seq.iter().map(|r| r.qfi_scaled).collect();
    let p: Vec<f64> = part.iter().map(|r| r.qfi_scaled).collect();
    let oscillates = s.windows(2).any(|w| w[1] > w[0]) && s.windows(2).any(|w| w[1] < w[0]);
    let monotone = p.windows(2).all(|w| w[1] >= w[0]);
    let mean =
        |rows: &[SweepRow]| rows.iter().map(|r| r.qfi_scaled).sum::<f64>() / rows.len() as f64;
    let (m1, m2) = (mean(&seq), mean(&seq_hi));
    (
        oscillates && monotone && m2 > m1,
        format!(
            "sequential H/N^2 non-monotonic: {oscillates}; partial non-decreasing: {monotone}; \
             mean sequential H/N^2 {m1:.4} (r=0.1) < {m2:.4} (r=0.2)"
        ),
    )
}

fn loss_behaviour() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for kind in [SchemeKind::Sequential, SchemeKind::Partial] {
        let hs: Vec<f64> = (0..=10)
            .map(|i| {
                let cfg = config(kind, 0.1, 5).with_loss(i as f64 / 10.0);
                let out = build(&cfg, FRAC_PI_4).unwrap();
                qfi_noisy(&out.state, &out.dstate).unwrap().h
            })
            .collect();
        let pure = pure_qfi(&config(kind, 0.1, 5), FRAC_PI_4);
        let decreasing = hs[..10].windows(2).all(|w| w[1] < w[0]);
        let ratio = hs[0] / pure;
        ok &= decreasing && hs[10] == 0.0 && ratio == 2.0;
        detail.push(format!(
            "{kind}: strictly decreasing {decreasing}, H(1)={}, noisy/pure at eta=0 {ratio}",
            hs[10]
        ));
    }
    (ok, detail.join("; "))
}

fn sensitivity_comparison() -> Outcome {
    let rows = compare_resources(0.1, FRAC_PI_4, 12).unwrap();
    let argmin = rows
        .iter()
        .min_by(|a, b| a.sequential.delta_phi.total_cmp(&b.sequential.delta_phi))
        .unwrap()
        .loops;
    // N = 1 is a tie: both schemes are the same single loop
    let lead = rows
        .iter()
        .take_while(|r| r.sequential.delta_phi <= r.partial.delta_phi * (1.0 + 1e-12))
        .count();
    (
        (3..=5).contains(&argmin) && (5..=7).contains(&lead),
        format!(
            "sequential delta_phi minimum at N={argmin} (want 4±1); \
             sequential <= partial up to N={lead} (want 6±1)"
        ),
    )
}

fn swapping_scheme() -> Outcome {
    let k = estimate_period(&SchemeConfig::sequential(0.1, 1), FRAC_PI_4, 200).unwrap();
    let (mut intensity, mut qfi) = (Vec::new(), Vec::new());
    for blocks in 1..=4 {
        let cfg = SchemeConfig::swapping(0.1, 4 * blocks, 4);
        let out = build(&cfg, FRAC_PI_4).unwrap();
        intensity.push(out.state.intensity()[0]);
        qfi.push(qfi_pure(&out.state, &out.dstate).unwrap().h);
    }
    let seq = build(&SchemeConfig::sequential(0.1, 16), FRAC_PI_4).unwrap();
    let seq_n = seq.state.intensity()[0];
    let seq_h = qfi_pure(&seq.state, &seq.dstate).unwrap().h;
    let grows = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
    (
        k == 4 && grows(&intensity) && grows(&qfi) && intensity[3] > seq_n && qfi[3] > seq_h,
        format!(
            "k={k}; intensity per block {intensity:.4?} (sequential N=16: {seq_n:.4}); \
             QFI per block {qfi:.2?} (sequential N=16: {seq_h:.2})"
        ),
    )
}

fn determinism_and_speed() -> Outcome {
    let run = || {
        let start = Instant::now();
        let out = Command::new(env!("CARGO_BIN_EXE_su11"))
            .args(["figure", "fig7"])
            .output()
            .expect("su11 runs");
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        (out.stdout, start.elapsed().as_secs_f64())
    };
    let (a, ta) = run();
    let (b, tb) = run();
    let spec = preset("fig7").unwrap().spec;
    let points = su11_experiments::sweep::grid_points(&spec).len();
    let lines = a.iter().filter(|&&c| c == b'\n').count();
    let ok = a == b && ta < 10.0 && tb < 10.0 && lines == points + 1 && !a.contains(&b'\r');
    (
        ok,
        format!(
            "{points} points, {} bytes, identical: {}, runs {ta:.2}s / {tb:.2}s",
            a.len(),
            a == b
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("standard-scheme QFI", standard_qfi),
        ("sequential N=2 closed form", || {
            closed_form(SchemeKind::Sequential, 2, closed_form_sequential_two_pass)
        }),
        ("partial N=1 closed form", || {
            closed_form(SchemeKind::Partial, 1, closed_form_partial_one_pass)
        }),
        ("Fock oracle equivalence", oracle_equivalence),
        ("derivative correctness", derivative_correctness),
        ("scaled QFI shape", scaled_qfi_shape),
        ("loss behaviour", loss_behaviour),
        ("sensitivity comparison", sensitivity_comparison),
        ("swapping scheme", swapping_scheme),
        ("determinism and performance", determinism_and_speed),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let (ok, detail) = panic::catch_unwind(f).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        });
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {name}: {} ({detail})",
            i + 1,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
