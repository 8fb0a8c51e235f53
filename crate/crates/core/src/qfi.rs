//! Quantum Fisher information of zero-mean Gaussian states and the
//! Cramér–Rao phase uncertainty it implies.
//!
//! Two trace formulas are exposed separately:
//!
//! * pure states: `H = ¼·Tr[(σ⁻¹·∂σ)²]`
//! * lossy states: `H = ½·Tr[(σ⁻¹·∂σ)²]`
//!
//! The lossy formula is an approximation and is deliberately left as is; on a
//! pure input it returns exactly twice the pure value.

use std::fmt;

use nalgebra::Cholesky;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{CMatrix, GaussianState};
use crate::schemes::{build, finite_difference_dstate, SchemeConfig};

/// Covariances with a 1-norm condition number above this are refused.
pub const MAX_CONDITION: f64 = 1e12;
/// Purity tolerance on [`GaussianState::purity_residual`].
pub const PURITY_TOL: f64 = 1e-6;
const IMAG_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DerivativeMethod {
    AnalyticDerivative,
    FiniteDifference,
}

impl DerivativeMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            DerivativeMethod::AnalyticDerivative => "analytic-derivative",
            DerivativeMethod::FiniteDifference => "finite-difference",
        }
    }
}

impl fmt::Display for DerivativeMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QfiFormula {
    Pure,
    Noisy,
}

impl QfiFormula {
    pub fn as_str(&self) -> &'static str {
        match self {
            QfiFormula::Pure => "pure",
            QfiFormula::Noisy => "noisy",
        }
    }
}

impl fmt::Display for QfiFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfiResult {
    /// Quantum Fisher information `H(φ) ≥ 0`.
    pub h: f64,
    /// `(M·H)^{-1/2}`; infinite when `H = 0`.
    pub delta_phi: f64,
    /// Number of independent repetitions `M`.
    pub experiments: u32,
    pub method: DerivativeMethod,
    pub formula: QfiFormula,
}

impl QfiResult {
    fn new(h: f64, formula: QfiFormula) -> Self {
        Self {
            h,
            delta_phi: cramer_rao(h, 1),
            experiments: 1,
            method: DerivativeMethod::AnalyticDerivative,
            formula,
        }
    }

    pub fn with_experiments(self, experiments: u32) -> Self {
        Self {
            experiments,
            delta_phi: cramer_rao(self.h, experiments),
            ..self
        }
    }

    pub fn with_method(self, method: DerivativeMethod) -> Self {
        Self { method, ..self }
    }
}

/// Cramér–Rao bound on the standard deviation, `(M·H)^{-1/2}`.
pub fn cramer_rao(h: f64, experiments: u32) -> f64 {
    if h > 0.0 && experiments > 0 {
        1.0 / (experiments as f64 * h).sqrt()
    } else {
        f64::INFINITY
    }
}

fn one_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `Tr[(σ⁻¹·∂σ)²]` with a conditioning guard.
fn trace_of_squared_log_derivative(state: &GaussianState, dstate: &CMatrix) -> Result<f64> {
    let cov = state.cov();
    if dstate.nrows() != cov.nrows() || dstate.ncols() != cov.ncols() {
        return Err(Error::DimensionMismatch {
            expected: state.modes(),
            found: dstate.nrows() / 2,
        });
    }
    let chol = Cholesky::new(cov.clone()).ok_or(Error::IllConditioned {
        condition: f64::INFINITY,
    })?;
    let inv = chol.inverse();
    let condition = one_norm(cov) * one_norm(&inv);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::IllConditioned { condition });
    }
    let x = inv * dstate;
    let n = x.nrows();
    let mut tr = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            tr += x[(i, j)] * x[(j, i)];
        }
    }
    if tr.im.abs() > IMAG_TOL * tr.re.abs().max(1.0) {
        return Err(Error::ComplexTrace { imag: tr.im });
    }
    // Tr[(σ⁻¹∂σ)²] is a sum of squares of a Hermitian similarity transform
    Ok(tr.re.max(0.0))
}

/// QFI of a pure zero-mean Gaussian state.
pub fn qfi_pure(state: &GaussianState, dstate: &CMatrix) -> Result<QfiResult> {
    let residual = state.purity_residual();
    if residual > PURITY_TOL {
        return Err(Error::NotPure { residual });
    }
    let t = trace_of_squared_log_derivative(state, dstate)?;
    Ok(QfiResult::new(0.25 * t, QfiFormula::Pure))
}

/// Approximate QFI of a lossy (thermalised) zero-mean Gaussian state.
pub fn qfi_noisy(state: &GaussianState, dstate: &CMatrix) -> Result<QfiResult> {
    let t = trace_of_squared_log_derivative(state, dstate)?;
    Ok(QfiResult::new(0.5 * t, QfiFormula::Noisy))
}

/// QFI of a scheme output: the pure formula without loss, the lossy one
/// otherwise.
pub fn scheme_qfi(cfg: &SchemeConfig, phi: f64) -> Result<QfiResult> {
    let out = build(cfg, phi)?;
    if cfg.eta > 0.0 {
        qfi_noisy(&out.state, &out.dstate)
    } else {
        qfi_pure(&out.state, &out.dstate)
    }
}

/// Same as [`scheme_qfi`] but with a central finite-difference derivative.
pub fn scheme_qfi_finite_difference(cfg: &SchemeConfig, phi: f64, h: f64) -> Result<QfiResult> {
    let out = build(cfg, phi)?;
    let fd = finite_difference_dstate(cfg, phi, h)?;
    let res = if cfg.eta > 0.0 {
        qfi_noisy(&out.state, &fd)?
    } else {
        qfi_pure(&out.state, &fd)?
    };
    Ok(res.with_method(DerivativeMethod::FiniteDifference))
}

/// `H / N²`.
pub fn scaled_qfi(h: f64, loops: usize) -> f64 {
    debug_assert!(loops >= 1);
    h / (loops * loops) as f64
}

/// Standard interferometer: `H = sinh²(2r)`.
pub fn closed_form_standard(r: f64) -> f64 {
    (2.0 * r).sinh().powi(2)
}

/// Standard interferometer in terms of the probing photon number
/// `n̄ = 2·sinh²(r)`: `H = n̄(n̄ + 2)`.
pub fn closed_form_standard_photons(r: f64) -> f64 {
    let n = 2.0 * r.sinh().powi(2);
    n * (n + 2.0)
}

/// Published two-pass sequential expression
/// `4 sinh²2r [cosh²2r + cosh²2r sinh²2r cos²φ + cos φ cosh4r cosh²2r + cosh²4r/4]`.
pub fn closed_form_sequential_two_pass(r: f64, phi: f64) -> f64 {
    let (s2, c2, c4) = ((2.0 * r).sinh(), (2.0 * r).cosh(), (4.0 * r).cosh());
    let c = phi.cos();
    4.0 * s2 * s2 * (c2 * c2 + c2 * c2 * s2 * s2 * c * c + c * c4 * c2 * c2 + c4 * c4 / 4.0)
}

/// Published one-pass partial expression
/// `4 sinh²2r [½ cosh2r cosh²r (cos φ + 1) + (1/16) sinh²2r cosh⁴r (8 cos φ + 6 + ½ cos 2φ)]`.
pub fn closed_form_partial_one_pass(r: f64, phi: f64) -> f64 {
    let (s2, c2, c1) = ((2.0 * r).sinh(), (2.0 * r).cosh(), r.cosh());
    4.0 * s2
        * s2
        * (0.5 * c2 * c1 * c1 * (phi.cos() + 1.0)
            + s2 * s2 * c1.powi(4) * (8.0 * phi.cos() + 6.0 + 0.5 * (2.0 * phi).cos()) / 16.0)
}
