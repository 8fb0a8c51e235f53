//! Named sweeps reconstructing the published figures.
//!
//! The figures print no grids, so these are reconstructions: `r = 0.1`
//! unless the figure varies it, `φ ∈ {π/8, π/4, π/2}` where the figure shows
//! several phases, `k = 4` for the swapping figures, and 100-point phase
//! grids over `[0, π]` with `N ≤ 20` where nothing is stated.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use su11_core::SchemeKind;

use crate::error::{Error, Result};
use crate::spec::{FormulaChoice, LoopRange, SwapInterval, SweepSpec};

pub const PRESET_NAMES: [&str; 9] = [
    "fig4a", "fig4b", "fig5a", "fig5b", "fig6a", "fig6b", "fig7", "fig8", "fig9",
];

#[derive(Debug, Clone, PartialEq)]
pub struct Preset {
    pub name: &'static str,
    pub title: &'static str,
    pub spec: SweepSpec,
    /// CSV columns for the horizontal and vertical plot axes.
    pub x: &'static str,
    pub y: &'static str,
}

fn base(schemes: &[SchemeKind], loops: usize) -> SweepSpec {
    SweepSpec {
        schemes: schemes.to_vec(),
        r: vec![0.1],
        phi_min: FRAC_PI_4,
        phi_max: FRAC_PI_4,
        phi_steps: 1,
        loops: LoopRange::new(1, loops),
        ..SweepSpec::default()
    }
}

fn squeezing_sweep(kind: SchemeKind, loops: usize) -> SweepSpec {
    SweepSpec {
        r: vec![0.05, 0.1, 0.15],
        ..base(&[kind], loops)
    }
}

fn phase_sweep(kind: SchemeKind, loops: usize) -> SweepSpec {
    SweepSpec {
        phi_values: Some(vec![FRAC_PI_8, FRAC_PI_4, FRAC_PI_2]),
        ..base(&[kind], loops)
    }
}

fn loss_sweep(kind: SchemeKind) -> SweepSpec {
    SweepSpec {
        eta: (0..=10).map(|i| i as f64 / 10.0).collect(),
        // one formula across the whole loss axis
        qfi_formula: FormulaChoice::Noisy,
        ..base(&[kind], 20)
    }
}

fn swapping_sweep() -> SweepSpec {
    SweepSpec {
        phi_min: 0.0,
        phi_max: PI,
        phi_steps: 100,
        swap_interval: SwapInterval::Fixed(4),
        ..base(&[SchemeKind::Swapping], 20)
    }
}

pub fn preset(name: &str) -> Result<Preset> {
    use SchemeKind::{Partial, Sequential};
    let p = |name, title, spec, x, y| Preset {
        name,
        title,
        spec,
        x,
        y,
    };
    Ok(match name {
        "fig4a" => p(
            "fig4a",
            "Sequential feedback: H/N^2 for several squeezing amplitudes",
            squeezing_sweep(Sequential, 20),
            "N",
            "qfi_scaled",
        ),
        "fig4b" => p(
            "fig4b",
            "Sequential feedback: H/N^2 for several phases",
            phase_sweep(Sequential, 20),
            "N",
            "qfi_scaled",
        ),
        "fig5a" => p(
            "fig5a",
            "Partial feedback: H/N^2 for several squeezing amplitudes",
            squeezing_sweep(Partial, 10),
            "N",
            "qfi_scaled",
        ),
        "fig5b" => p(
            "fig5b",
            "Partial feedback: H/N^2 for several phases",
            phase_sweep(Partial, 10),
            "N",
            "qfi_scaled",
        ),
        "fig6a" => p(
            "fig6a",
            "Sequential feedback with photon loss",
            loss_sweep(Sequential),
            "N",
            "qfi",
        ),
        "fig6b" => p(
            "fig6b",
            "Partial feedback with photon loss",
            loss_sweep(Partial),
            "N",
            "qfi",
        ),
        "fig7" => p(
            "fig7",
            "Phase sensitivity of sequential and partial feedback",
            SweepSpec {
                phi_values: Some(vec![FRAC_PI_4, FRAC_PI_2]),
                ..base(&[Sequential, Partial], 50)
            },
            "N",
            "delta_phi",
        ),
        "fig8" => p(
            "fig8",
            "Swapping scheme: intensity of the fed-back mode",
            swapping_sweep(),
            "phi",
            "n1",
        ),
        "fig9" => p(
            "fig9",
            "Swapping scheme: quantum Fisher information",
            swapping_sweep(),
            "phi",
            "qfi",
        ),
        other => {
            return Err(Error::UnknownPreset(
                other.to_string(),
                PRESET_NAMES.join(", "),
            ))
        }
    })
}
