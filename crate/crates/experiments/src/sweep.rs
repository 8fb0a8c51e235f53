//! Grid evaluation.

use rayon::prelude::*;
use su11_core::qfi::scheme_qfi_finite_difference;
use su11_core::{
    build, estimate_period, qfi_noisy, qfi_pure, scaled_qfi, DerivativeMethod, QfiFormula,
    SchemeConfig, SchemeKind,
};

use crate::error::Result;
use crate::spec::{FormulaChoice, SwapInterval, SweepSpec, AUTO_PERIOD_MAX_LOOPS};

/// One grid point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub scheme: SchemeKind,
    pub r: f64,
    pub theta: f64,
    pub eta: f64,
    pub loops: usize,
    pub phi: f64,
}

/// One output row. Numeric results are NaN when `error` is set.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub scheme: SchemeKind,
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub loops: usize,
    pub eta: f64,
    /// Swap interval actually used; swapping scheme only.
    pub k: Option<usize>,
    /// Mean photon number of the fed-back mode.
    pub n1: f64,
    /// Mean photon number of the second mode.
    pub n2: f64,
    /// Mean photon number summed over all modes.
    pub n_total: f64,
    pub qfi: f64,
    pub qfi_scaled: f64,
    pub delta_phi: f64,
    pub method: DerivativeMethod,
    pub formula: Option<QfiFormula>,
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(p: &GridPoint, k: Option<usize>, err: impl ToString) -> Self {
        Self {
            scheme: p.scheme,
            r: p.r,
            theta: p.theta,
            phi: p.phi,
            loops: p.loops,
            eta: p.eta,
            k,
            n1: f64::NAN,
            n2: f64::NAN,
            n_total: f64::NAN,
            qfi: f64::NAN,
            qfi_scaled: f64::NAN,
            delta_phi: f64::NAN,
            method: DerivativeMethod::AnalyticDerivative,
            formula: None,
            error: Some(err.to_string()),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

/// Grid points in output order: scheme, r, eta, N, phi.
pub fn grid_points(spec: &SweepSpec) -> Vec<GridPoint> {
    let phis = spec.phi_grid();
    let rs = spec.r_grid();
    let etas = spec.eta_grid();
    let mut points = Vec::new();
    for scheme in spec.scheme_order() {
        let loops: Vec<usize> = match scheme {
            SchemeKind::Standard => vec![1],
            _ => spec.loops.iter().collect(),
        };
        for &r in &rs {
            for &eta in &etas {
                for &n in &loops {
                    for &phi in &phis {
                        points.push(GridPoint {
                            scheme,
                            r,
                            theta: spec.theta,
                            eta,
                            loops: n,
                            phi,
                        });
                    }
                }
            }
        }
    }
    points
}

/// Swap interval for a swapping-scheme point. A fixed `k` larger than `N` is
/// clamped to `N`, where the scheme coincides with the sequential one.
fn swap_interval(p: &GridPoint, choice: SwapInterval) -> su11_core::Result<usize> {
    let k = match choice {
        SwapInterval::Fixed(k) => k,
        SwapInterval::Auto => {
            let seq = SchemeConfig::sequential(p.r, 1).with_pump_phases(p.theta, p.theta);
            estimate_period(&seq, p.phi, AUTO_PERIOD_MAX_LOOPS)?
        }
    };
    Ok(k.min(p.loops))
}

/// Scheme configuration of a grid point.
pub fn scheme_config(p: &GridPoint, k: Option<usize>) -> SchemeConfig {
    SchemeConfig {
        kind: p.scheme,
        r: p.r,
        theta1: p.theta,
        theta2: p.theta,
        loops: p.loops,
        swap_interval: k,
        eta: p.eta,
    }
}

fn resolve_formula(choice: FormulaChoice, eta: f64) -> QfiFormula {
    match choice {
        FormulaChoice::Pure => QfiFormula::Pure,
        FormulaChoice::Noisy => QfiFormula::Noisy,
        FormulaChoice::Auto if eta > 0.0 => QfiFormula::Noisy,
        FormulaChoice::Auto => QfiFormula::Pure,
    }
}

/// Evaluates one grid point. Engine failures end up in the row's `error`.
pub fn evaluate(p: &GridPoint, swap: SwapInterval, formula: FormulaChoice) -> SweepRow {
    let k = if p.scheme == SchemeKind::Swapping {
        match swap_interval(p, swap) {
            Ok(k) => Some(k),
            Err(e) => return SweepRow::failed(p, None, e),
        }
    } else {
        None
    };
    let cfg = scheme_config(p, k);
    let out = match build(&cfg, p.phi) {
        Ok(out) => out,
        Err(e) => return SweepRow::failed(p, k, e),
    };
    let formula = resolve_formula(formula, p.eta);
    let res = match formula {
        QfiFormula::Pure => qfi_pure(&out.state, &out.dstate),
        QfiFormula::Noisy => qfi_noisy(&out.state, &out.dstate),
    };
    let res = match res {
        Ok(res) => res,
        Err(e) => return SweepRow::failed(p, k, e),
    };
    let n = out.state.intensity();
    SweepRow {
        scheme: p.scheme,
        r: p.r,
        theta: p.theta,
        phi: p.phi,
        loops: p.loops,
        eta: p.eta,
        k,
        n1: n[0],
        n2: n[1],
        n_total: n.iter().sum(),
        qfi: res.h,
        qfi_scaled: scaled_qfi(res.h, p.loops),
        delta_phi: res.delta_phi,
        method: res.method,
        formula: Some(res.formula),
        error: None,
    }
}

/// Evaluates every grid point of a validated spec. Points are computed in
/// parallel; the returned rows are always in grid order.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let points = grid_points(spec);
    Ok(points
        .par_iter()
        .map(|p| evaluate(p, spec.swap_interval, spec.qfi_formula))
        .collect())
}

/// Finite-difference QFI of a grid point, for cross-checking a row.
pub fn evaluate_finite_difference(
    p: &GridPoint,
    k: Option<usize>,
    h: f64,
) -> su11_core::Result<f64> {
    scheme_qfi_finite_difference(&scheme_config(p, k), p.phi, h).map(|r| r.h)
}
