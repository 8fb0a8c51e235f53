//! Interferometer builders: standard, sequential feedback, partial feedback
//! and squeeze-swapping.
//!
//! Every builder returns the output covariance together with its analytic
//! φ-derivative. Each loop is a block `S(Γ₂)·U(φ)·S(Γ₁)` acting on two modes,
//! so both matrices are propagated with local row/column updates instead of
//! dense products; the derivative picks up one product-rule term per phase
//! shifter occurrence.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{
    left_local, lossy_cov, mode_indices, phase_block, phase_derivative_block, right_local_adjoint,
    rows_of, squeezer_block, submatrix, symmetrize, CMatrix, GaussianState, LossChannel,
    SqueezeParam,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemeKind {
    Standard,
    Sequential,
    Partial,
    Swapping,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::Standard,
        SchemeKind::Sequential,
        SchemeKind::Partial,
        SchemeKind::Swapping,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeKind::Standard => "standard",
            SchemeKind::Sequential => "sequential",
            SchemeKind::Partial => "partial",
            SchemeKind::Swapping => "swapping",
        }
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" => Ok(SchemeKind::Standard),
            "sequential" => Ok(SchemeKind::Sequential),
            "partial" => Ok(SchemeKind::Partial),
            "swapping" => Ok(SchemeKind::Swapping),
            other => Err(Error::InvalidConfig(format!("unknown scheme '{other}'"))),
        }
    }
}

/// Which interferometer to build and with what parameters.
///
/// `theta1`/`theta2` are the pump phases of the first and second squeezer of
/// each loop. The standard interferometer ignores `theta2` and always uses
/// `Γ₂ = −Γ₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    pub r: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub loops: usize,
    pub swap_interval: Option<usize>,
    pub eta: f64,
}

impl SchemeConfig {
    pub fn standard(r: f64) -> Self {
        Self {
            kind: SchemeKind::Standard,
            r,
            theta1: 0.0,
            theta2: 0.0,
            loops: 1,
            swap_interval: None,
            eta: 0.0,
        }
    }

    pub fn sequential(r: f64, loops: usize) -> Self {
        Self {
            kind: SchemeKind::Sequential,
            loops,
            ..Self::standard(r)
        }
    }

    pub fn partial(r: f64, loops: usize) -> Self {
        Self {
            kind: SchemeKind::Partial,
            loops,
            ..Self::standard(r)
        }
    }

    pub fn swapping(r: f64, loops: usize, swap_interval: usize) -> Self {
        Self {
            kind: SchemeKind::Swapping,
            loops,
            swap_interval: Some(swap_interval),
            ..Self::standard(r)
        }
    }

    pub fn with_loss(self, eta: f64) -> Self {
        Self { eta, ..self }
    }

    pub fn with_loops(self, loops: usize) -> Self {
        Self { loops, ..self }
    }

    pub fn with_pump_phases(self, theta1: f64, theta2: f64) -> Self {
        Self {
            theta1,
            theta2,
            ..self
        }
    }

    /// Number of modes of the covariance the builder produces.
    pub fn mode_count(&self) -> usize {
        match self.kind {
            SchemeKind::Partial => self.loops + 1,
            _ => 2,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.r.is_finite() || !self.theta1.is_finite() || !self.theta2.is_finite() {
            return Err(Error::InvalidConfig(
                "squeezing amplitude and pump phases must be finite".into(),
            ));
        }
        LossChannel::new(self.eta).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        match self.kind {
            SchemeKind::Standard if self.loops != 1 => Err(Error::InvalidConfig(format!(
                "standard interferometer has exactly one pass, got {} loops",
                self.loops
            ))),
            _ if self.loops == 0 => Err(Error::InvalidConfig("loop count must be >= 1".into())),
            SchemeKind::Swapping => match self.swap_interval {
                Some(k) if k >= 1 && k <= self.loops => Ok(()),
                Some(k) => Err(Error::InvalidConfig(format!(
                    "swap interval {k} must lie in 1..={}",
                    self.loops
                ))),
                None => Err(Error::InvalidConfig(
                    "swapping scheme needs a swap interval".into(),
                )),
            },
            _ => Ok(()),
        }
    }

    fn squeezers(&self, negate: bool) -> Result<(SqueezeParam, SqueezeParam)> {
        let first = SqueezeParam::new(self.r, self.theta1)?;
        let second = match self.kind {
            SchemeKind::Standard => first.negated(),
            _ => SqueezeParam::new(self.r, self.theta2)?,
        };
        Ok(if negate {
            (first.negated(), second.negated())
        } else {
            (first, second)
        })
    }
}

/// Output covariance of a scheme and its derivative with respect to φ.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeOutput {
    pub state: GaussianState,
    pub dstate: CMatrix,
    pub modes: usize,
}

impl SchemeOutput {
    /// Reduced state and derivative of the fed-back mode (mode 0).
    pub fn mode1_marginal(&self) -> (GaussianState, CMatrix) {
        let state = self
            .state
            .marginal(&[0])
            .expect("scheme outputs have at least one mode");
        (state, submatrix(&self.dstate, &[0, 1]))
    }
}

/// The 4×4 loop block `S(Γ₂)·U(φ)·S(Γ₁)` on modes `(fed-back, partner)` and
/// its φ-derivative.
struct LoopBlock {
    block: CMatrix,
    dblock: CMatrix,
}

impl LoopBlock {
    fn new(first: SqueezeParam, second: SqueezeParam, phi: f64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let mut u = CMatrix::identity(4, 4);
        u.view_mut((0, 0), (2, 2)).copy_from(&phase_block(phi));
        let mut du = CMatrix::zeros(4, 4);
        du.view_mut((0, 0), (2, 2))
            .copy_from(&phase_derivative_block(phi));
        debug_assert!(u[(2, 2)] == one && du[(2, 2)] == zero);
        let s1 = squeezer_block(first);
        let s2 = squeezer_block(second);
        Self {
            block: &s2 * u * &s1,
            dblock: &s2 * du * &s1,
        }
    }
}

/// Covariance and derivative propagated loop by loop.
struct Evolution {
    cov: CMatrix,
    dcov: CMatrix,
    loss: Option<LossChannel>,
}

impl Evolution {
    fn new(modes: usize, eta: f64) -> Result<Self> {
        let dim = 2 * modes;
        let loss = LossChannel::new(eta)?;
        Ok(Self {
            cov: GaussianState::vacuum(modes)?.into_cov(),
            dcov: CMatrix::zeros(dim, dim),
            loss: (eta > 0.0).then_some(loss),
        })
    }

    /// One loop: `cov ↦ B·cov·B†` and
    /// `dcov ↦ B·dcov·B† + B'·cov·B† + B·cov·B'†`, then loss if any.
    fn step(&mut self, lb: &LoopBlock, fed: usize, partner: usize) {
        let idx = mode_indices(&[fed, partner]);

        // B'·cov·B† only has rows `idx`
        let mut cross = rows_of(&lb.dblock, &idx, &self.cov);
        right_local_adjoint(&lb.block, &idx, &mut cross);

        left_local(&lb.block, &idx, &mut self.dcov);
        right_local_adjoint(&lb.block, &idx, &mut self.dcov);
        for (bi, &i) in idx.iter().enumerate() {
            for col in 0..self.dcov.ncols() {
                let v = cross[(bi, col)];
                self.dcov[(i, col)] += v;
                self.dcov[(col, i)] += v.conj();
            }
        }

        left_local(&lb.block, &idx, &mut self.cov);
        right_local_adjoint(&lb.block, &idx, &mut self.cov);

        if let Some(loss) = self.loss {
            self.cov = lossy_cov(loss, &self.cov);
            self.dcov *= Complex64::new(loss.transmission(), 0.0);
        }
        symmetrize(&mut self.cov);
        symmetrize(&mut self.dcov);
    }

    fn intensity(&self, mode: usize) -> f64 {
        self.cov[(2 * mode, 2 * mode)].re - 0.5
    }

    fn finish(self) -> SchemeOutput {
        let state = GaussianState::from_cov_unchecked(self.cov);
        SchemeOutput {
            modes: state.modes(),
            state,
            dstate: self.dcov,
        }
    }
}

fn expect_kind(cfg: &SchemeConfig, kind: SchemeKind) -> Result<()> {
    if cfg.kind != kind {
        return Err(Error::InvalidConfig(format!(
            "expected a {kind} configuration, got {}",
            cfg.kind
        )));
    }
    cfg.validate()
}

/// Dispatch on `cfg.kind`.
pub fn build(cfg: &SchemeConfig, phi: f64) -> Result<SchemeOutput> {
    match cfg.kind {
        SchemeKind::Standard => build_standard(cfg, phi),
        SchemeKind::Sequential => build_sequential(cfg, phi),
        SchemeKind::Partial => build_partial(cfg, phi),
        SchemeKind::Swapping => build_swapping(cfg, phi),
    }
}

/// `S(−Γ)·U(φ)·S(Γ)` on vacuum.
pub fn build_standard(cfg: &SchemeConfig, phi: f64) -> Result<SchemeOutput> {
    expect_kind(cfg, SchemeKind::Standard)?;
    let (first, second) = cfg.squeezers(false)?;
    let mut evo = Evolution::new(2, cfg.eta)?;
    evo.step(&LoopBlock::new(first, second, phi), 0, 1);
    Ok(evo.finish())
}

/// `[S(Γ₂)·U(φ)·S(Γ₁)]^N` on two-mode vacuum, with loss after every loop.
pub fn build_sequential(cfg: &SchemeConfig, phi: f64) -> Result<SchemeOutput> {
    expect_kind(cfg, SchemeKind::Sequential)?;
    let (first, second) = cfg.squeezers(false)?;
    let lb = LoopBlock::new(first, second, phi);
    let mut evo = Evolution::new(2, cfg.eta)?;
    for _ in 0..cfg.loops {
        evo.step(&lb, 0, 1);
    }
    Ok(evo.finish())
}

/// Partial feedback unrolled onto `N + 1` modes: loop `j` couples the
/// fed-back mode 0 to a fresh vacuum mode `j`.
pub fn build_partial(cfg: &SchemeConfig, phi: f64) -> Result<SchemeOutput> {
    expect_kind(cfg, SchemeKind::Partial)?;
    partial_on(cfg, phi, cfg.loops + 1)
}

/// Partial scheme embedded in `modes ≥ N + 1` modes; the surplus modes stay
/// in vacuum.
pub(crate) fn partial_on(cfg: &SchemeConfig, phi: f64, modes: usize) -> Result<SchemeOutput> {
    debug_assert!(modes > cfg.loops);
    let (first, second) = cfg.squeezers(false)?;
    let lb = LoopBlock::new(first, second, phi);
    let mut evo = Evolution::new(modes, cfg.eta)?;
    for j in 1..=cfg.loops {
        evo.step(&lb, 0, j);
    }
    Ok(evo.finish())
}

/// Sequential scheme whose squeezers flip sign every `k` loops, starting
/// with `+r`.
pub fn build_swapping(cfg: &SchemeConfig, phi: f64) -> Result<SchemeOutput> {
    expect_kind(cfg, SchemeKind::Swapping)?;
    let k = cfg.swap_interval.expect("validated");
    let (first, second) = cfg.squeezers(false)?;
    let (nfirst, nsecond) = cfg.squeezers(true)?;
    let plus = LoopBlock::new(first, second, phi);
    let minus = LoopBlock::new(nfirst, nsecond, phi);
    let mut evo = Evolution::new(2, cfg.eta)?;
    for n in 0..cfg.loops {
        let lb = if (n / k).is_multiple_of(2) {
            &plus
        } else {
            &minus
        };
        evo.step(lb, 0, 1);
    }
    Ok(evo.finish())
}

/// Central finite-difference derivative of the output covariance.
pub fn finite_difference_dstate(cfg: &SchemeConfig, phi: f64, h: f64) -> Result<CMatrix> {
    let plus = build(cfg, phi + h)?.state.into_cov();
    let minus = build(cfg, phi - h)?.state.into_cov();
    Ok((plus - minus) / Complex64::new(2.0 * h, 0.0))
}

/// Mode-1 intensity of the sequential scheme after each of `1..=max_loops`
/// loops.
pub fn sequential_intensity_series(
    cfg: &SchemeConfig,
    phi: f64,
    max_loops: usize,
) -> Result<Vec<f64>> {
    let cfg = SchemeConfig {
        loops: max_loops.max(1),
        ..*cfg
    };
    expect_kind(&cfg, SchemeKind::Sequential)?;
    let (first, second) = cfg.squeezers(false)?;
    let lb = LoopBlock::new(first, second, phi);
    let mut evo = Evolution::new(2, cfg.eta)?;
    let mut series = Vec::with_capacity(max_loops);
    for _ in 0..max_loops {
        evo.step(&lb, 0, 1);
        series.push(evo.intensity(0));
    }
    Ok(series)
}

const PLATEAU_TOL: f64 = 1e-12;

/// Index of the first strict local minimum of `series`, treating the value
/// before index 0 as `+∞`-excluded (a minimum needs a larger neighbour on
/// both sides). Plateaus resolve to their first index.
pub fn first_local_minimum(series: &[f64]) -> Option<usize> {
    let mut i = 1;
    while i < series.len() {
        if series[i] < series[i - 1] - PLATEAU_TOL {
            // walk across a plateau
            let start = i;
            let mut end = i;
            while end + 1 < series.len() && (series[end + 1] - series[start]).abs() <= PLATEAU_TOL {
                end += 1;
            }
            if end + 1 < series.len() && series[end + 1] > series[start] + PLATEAU_TOL {
                return Some(start);
            }
            i = end + 1;
        } else {
            i += 1;
        }
    }
    None
}

/// Half the oscillation period of an intensity series that starts from the
/// vacuum (`I₀ = 0`, prepended here). The period is the loop number at which
/// the intensity first returns to a minimum; the half period is rounded down.
pub fn half_period(series: &[f64]) -> Option<usize> {
    let mut full = Vec::with_capacity(series.len() + 1);
    full.push(0.0);
    full.extend_from_slice(series);
    first_local_minimum(&full).map(|period| (period / 2).max(1))
}

/// Recommended swap interval `k` for the swapping scheme: half the period of
/// the sequential intensity oscillation at this phase.
pub fn estimate_period(cfg: &SchemeConfig, phi: f64, max_loops: usize) -> Result<usize> {
    let series = sequential_intensity_series(cfg, phi, max_loops)?;
    half_period(&series).ok_or(Error::PeriodNotResolved { max_loops })
}
