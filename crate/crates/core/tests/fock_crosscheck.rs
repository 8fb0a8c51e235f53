//! Gaussian engine against the truncated Fock-space simulator.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use su11_core::fock::{fock_qfi, fock_scheme, DEFAULT_OVERLAP_STEP};
use su11_core::{build, qfi_pure, SchemeConfig, SchemeKind};

fn schemes(n: usize) -> Vec<SchemeConfig> {
    vec![
        SchemeConfig::sequential(0.1, n),
        SchemeConfig::partial(0.1, n),
        SchemeConfig::swapping(0.1, n, 1),
    ]
}

#[test]
fn intensities_agree() {
    for n in 1..=3 {
        for cfg in schemes(n) {
            for phi in [0.0, FRAC_PI_4, FRAC_PI_2] {
                let gauss = build(&cfg, phi).unwrap().state.intensity();
                let fock = fock_scheme(&cfg, phi).unwrap();
                assert!(fock.leakage() < 1e-8);
                for (g, f) in gauss.iter().zip(fock.intensity()) {
                    assert!((g - f).abs() <= 1e-6, "{cfg:?} phi={phi}: {g} vs {f}");
                }
            }
        }
    }
}

#[test]
fn qfi_agrees() {
    for n in 1..=3 {
        for cfg in schemes(n) {
            for phi in [0.0, FRAC_PI_4, FRAC_PI_2] {
                let out = build(&cfg, phi).unwrap();
                let h = qfi_pure(&out.state, &out.dstate).unwrap().h;
                let f = fock_qfi(&cfg, phi, DEFAULT_OVERLAP_STEP).unwrap();
                assert!(
                    (f.value - h).abs() <= 1e-4 * h,
                    "{cfg:?} phi={phi}: {h} vs {}",
                    f.value
                );
            }
        }
    }
}

#[test]
fn standard_interferometer_with_pump_phase() {
    let cfg = SchemeConfig::standard(0.15).with_pump_phases(0.7, 0.0);
    assert_eq!(cfg.kind, SchemeKind::Standard);
    for phi in [0.3, 1.1, 2.9] {
        let out = build(&cfg, phi).unwrap();
        let h = qfi_pure(&out.state, &out.dstate).unwrap().h;
        assert!((h - (0.3_f64).sinh().powi(2)).abs() < 1e-12);
        let f = fock_qfi(&cfg, phi, DEFAULT_OVERLAP_STEP).unwrap().value;
        assert!((f - h).abs() <= 1e-4 * h);
        let fock = fock_scheme(&cfg, phi).unwrap();
        for (g, f) in out.state.intensity().iter().zip(fock.intensity()) {
            assert!((g - f).abs() <= 1e-6);
        }
    }
}
