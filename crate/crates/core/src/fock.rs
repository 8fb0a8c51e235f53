//! Truncated Fock-space simulator used as an independent oracle for the
//! Gaussian engine.
//!
//! States are dense amplitude vectors over `(c + 1)^m` number states. The
//! two-mode squeezer conserves `n_i − n_j`, so its truncated generator is
//! block diagonal with one tridiagonal block per photon-number difference;
//! each block is exponentiated by scaling and squaring.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gaussian::{CMatrix, SqueezeParam};
use crate::schemes::{SchemeConfig, SchemeKind};

/// Default cap on the number of amplitudes of a single state.
pub const DEFAULT_BUDGET: usize = 1 << 22;
/// Largest weight allowed on the truncation boundary.
pub const MAX_LEAKAGE: f64 = 1e-8;
const MIN_CUTOFF: usize = 8;
const TAIL_BOUND: f64 = 1e-12;

/// Smallest cutoff `c ≥ 8` with `tanh(r_total)^{2(c+1)} < 1e-12`.
pub fn cutoff_for(total_squeezing: f64) -> usize {
    let t = total_squeezing.abs().tanh();
    if t == 0.0 {
        return MIN_CUTOFF;
    }
    let needed = (TAIL_BOUND.ln() / (2.0 * t.ln())).floor() as usize;
    // needed + 1 > ln(bound) / (2 ln t), so (needed + 1) = c + 1
    needed.max(MIN_CUTOFF)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    modes: usize,
    cutoff: usize,
    amps: Vec<Complex64>,
}

impl FockState {
    pub fn vacuum(modes: usize, cutoff: usize, budget: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::ZeroModes);
        }
        let required = (cutoff + 1)
            .checked_pow(modes as u32)
            .filter(|&n| n <= budget)
            .ok_or(Error::FockBudget {
                required: (cutoff + 1).saturating_pow(modes as u32),
                budget,
            })?;
        let mut amps = vec![Complex64::new(0.0, 0.0); required];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self {
            modes,
            cutoff,
            amps,
        })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    fn stride(&self, mode: usize) -> usize {
        (self.cutoff + 1).pow((self.modes - 1 - mode) as u32)
    }

    fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.stride(mode)) % (self.cutoff + 1)
    }

    /// Amplitude of the number state `|n₁, n₂, …⟩`.
    pub fn amplitude(&self, occupations: &[usize]) -> Option<Complex64> {
        if occupations.len() != self.modes || occupations.iter().any(|&n| n > self.cutoff) {
            return None;
        }
        let index = occupations
            .iter()
            .enumerate()
            .map(|(mode, &n)| n * self.stride(mode))
            .sum::<usize>();
        Some(self.amps[index])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Weight on number states with some mode at the cutoff.
    pub fn leakage(&self) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|&(idx, _)| (0..self.modes).any(|m| self.occupation(idx, m) == self.cutoff))
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn moment(&self, mode: usize, power: i32) -> f64 {
        let weighted: f64 = self
            .amps
            .iter()
            .enumerate()
            .map(|(idx, a)| a.norm_sqr() * (self.occupation(idx, mode) as f64).powi(power))
            .sum();
        weighted / self.norm_sqr()
    }

    /// Mean photon number per mode.
    pub fn intensity(&self) -> Vec<f64> {
        (0..self.modes).map(|m| self.moment(m, 1)).collect()
    }

    /// `⟨n²⟩ − ⟨n⟩²` of one mode.
    pub fn photon_variance(&self, mode: usize) -> f64 {
        let mean = self.moment(mode, 1);
        self.moment(mode, 2) - mean * mean
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> Result<Complex64> {
        if self.modes != other.modes || self.cutoff != other.cutoff {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: other.modes,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    fn check_leakage(&self) -> Result<()> {
        let leakage = self.leakage();
        if leakage > MAX_LEAKAGE {
            return Err(Error::CutoffTooSmall {
                cutoff: self.cutoff,
                leakage,
            });
        }
        Ok(())
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.modes {
            return Err(Error::ModeOutOfRange {
                index: mode,
                modes: self.modes,
            });
        }
        Ok(())
    }
}

fn one_norm(m: &CMatrix) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring of a Taylor series.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    let norm = one_norm(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / Complex64::new(2f64.powi(squarings), 0.0);
    let mut result = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / Complex64::new(k as f64, 0.0);
        result += &term;
        if one_norm(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Propagator of `S(Γ) = exp(Γ·a_i a_j − Γ*·a_i† a_j†)` restricted to the
/// sector `n_i − n_j = diff`, in the basis `k ↦ (k + diff⁺, k + diff⁻)`.
fn sector_propagator(g: SqueezeParam, cutoff: usize, diff: isize) -> CMatrix {
    let up = diff.max(0) as usize;
    let down = (-diff).max(0) as usize;
    let len = cutoff + 1 - diff.unsigned_abs();
    let gamma = g.gamma();
    let mut gen = CMatrix::zeros(len, len);
    for k in 0..len.saturating_sub(1) {
        let amp = (((k + 1 + up) * (k + 1 + down)) as f64).sqrt();
        gen[(k, k + 1)] = gamma * amp;
        gen[(k + 1, k)] = -gamma.conj() * amp;
    }
    expm(&gen)
}

/// Two-mode squeezer between modes `i` and `j`.
pub fn fock_squeeze(g: SqueezeParam, s: &FockState, i: usize, j: usize) -> Result<FockState> {
    s.check_mode(i)?;
    s.check_mode(j)?;
    if i == j {
        return Err(Error::SameMode(i));
    }
    let c = s.cutoff as isize;
    let (si, sj) = (s.stride(i), s.stride(j));
    let sectors: Vec<(isize, CMatrix)> = (-c..=c)
        .map(|d| (d, sector_propagator(g, s.cutoff, d)))
        .collect();
    let bases: Vec<usize> = (0..s.amps.len())
        .filter(|&idx| s.occupation(idx, i) == 0 && s.occupation(idx, j) == 0)
        .collect();

    let mut out = s.clone();
    let mut buf = Vec::with_capacity(s.cutoff + 1);
    for &base in &bases {
        for (d, prop) in &sectors {
            let up = d.max(&0).unsigned_abs();
            let down = (-d).max(0) as usize;
            let len = prop.nrows();
            let index = |k: usize| base + (k + up) * si + (k + down) * sj;
            buf.clear();
            buf.extend((0..len).map(|k| s.amps[index(k)]));
            for row in 0..len {
                let mut acc = Complex64::new(0.0, 0.0);
                for (col, v) in buf.iter().enumerate() {
                    acc += prop[(row, col)] * v;
                }
                out.amps[index(row)] = acc;
            }
        }
    }
    out.check_leakage()?;
    Ok(out)
}

/// `exp(iφ·n_i)`: number state amplitudes pick up `e^{i·n_i·φ}`.
pub fn fock_phase(phi: f64, s: &FockState, i: usize) -> Result<FockState> {
    s.check_mode(i)?;
    let phases: Vec<Complex64> = (0..=s.cutoff)
        .map(|n| Complex64::from_polar(1.0, n as f64 * phi))
        .collect();
    let mut out = s.clone();
    for (idx, a) in out.amps.iter_mut().enumerate() {
        *a *= phases[s.occupation(idx, i)];
    }
    Ok(out)
}

/// Largest loop count the oracle accepts.
pub const MAX_LOOPS: usize = 3;
/// Largest squeezing amplitude the oracle accepts.
pub const MAX_SQUEEZING: f64 = 0.2;

/// Cutoff for a scheme: the fed-back mode sees every squeezer, so the
/// accumulated amplitude is `2·N·r`.
pub fn scheme_cutoff(cfg: &SchemeConfig) -> usize {
    cutoff_for(2.0 * cfg.loops as f64 * cfg.r)
}

/// Build a scheme's output at the state-vector level.
pub fn fock_scheme(cfg: &SchemeConfig, phi: f64) -> Result<FockState> {
    fock_scheme_with(cfg, phi, scheme_cutoff(cfg), DEFAULT_BUDGET)
}

pub fn fock_scheme_with(
    cfg: &SchemeConfig,
    phi: f64,
    cutoff: usize,
    budget: usize,
) -> Result<FockState> {
    cfg.validate()?;
    if cfg.eta != 0.0 {
        return Err(Error::InvalidConfig(
            "the Fock oracle only simulates lossless schemes".into(),
        ));
    }
    if cfg.loops > MAX_LOOPS || cfg.r.abs() > MAX_SQUEEZING {
        return Err(Error::InvalidConfig(format!(
            "Fock oracle supports at most {MAX_LOOPS} loops and r <= {MAX_SQUEEZING}"
        )));
    }
    let first = SqueezeParam::new(cfg.r, cfg.theta1)?;
    let second = match cfg.kind {
        SchemeKind::Standard => first.negated(),
        _ => SqueezeParam::new(cfg.r, cfg.theta2)?,
    };
    let mut state = FockState::vacuum(cfg.mode_count(), cutoff, budget)?;
    for n in 0..cfg.loops {
        let (partner, negate) = match cfg.kind {
            SchemeKind::Partial => (n + 1, false),
            SchemeKind::Swapping => {
                let k = cfg.swap_interval.expect("validated");
                (1, (n / k) % 2 == 1)
            }
            _ => (1, false),
        };
        let (g1, g2) = if negate {
            (first.negated(), second.negated())
        } else {
            (first, second)
        };
        state = fock_squeeze(g1, &state, 0, partner)?;
        state = fock_phase(phi, &state, 0)?;
        state = fock_squeeze(g2, &state, 0, partner)?;
    }
    Ok(state)
}

/// Overlap step for [`fock_qfi`]. Smaller steps lose accuracy to
/// cancellation in `1 − |⟨ψ|ψ'⟩|`.
pub const DEFAULT_OVERLAP_STEP: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FockQfi {
    pub value: f64,
    /// Difference between the extrapolated and the finer raw estimate.
    pub error: f64,
}

/// Pure-state QFI from the overlap curvature
/// `H ≈ 8(1 − |⟨ψ(φ − δ/2)|ψ(φ + δ/2)⟩|)/δ²`, Richardson-extrapolated over
/// `{δ, δ/2}`. The symmetric placement removes the odd powers of `δ`.
pub fn fock_qfi(cfg: &SchemeConfig, phi: f64, delta: f64) -> Result<FockQfi> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "overlap step must be positive, got {delta}"
        )));
    }
    let curvature = |step: f64| -> Result<f64> {
        let lo = fock_scheme(cfg, phi - step / 2.0)?;
        let hi = fock_scheme(cfg, phi + step / 2.0)?;
        let fidelity = lo.overlap(&hi)?.norm() / (lo.norm_sqr() * hi.norm_sqr()).sqrt();
        Ok(8.0 * (1.0 - fidelity) / (step * step))
    };
    let coarse = curvature(delta)?;
    let fine = curvature(delta / 2.0)?;
    let value = (4.0 * fine - coarse) / 3.0;
    Ok(FockQfi {
        value: value.max(0.0),
        error: (value - fine).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use std::f64::consts::PI;

    fn squeezed(r: f64, cutoff: usize) -> FockState {
        let vac = FockState::vacuum(2, cutoff, DEFAULT_BUDGET).unwrap();
        fock_squeeze(SqueezeParam::new(r, 0.0).unwrap(), &vac, 0, 1).unwrap()
    }

    #[test]
    fn cutoff_rule() {
        assert_eq!(cutoff_for(0.0), 8);
        assert_eq!(cutoff_for(0.01), 8);
        let c = cutoff_for(0.6);
        let t = 0.6_f64.tanh();
        assert!(t.powi(2 * (c as i32 + 1)) < 1e-12);
        assert!(t.powi(2 * c as i32) >= 1e-12);
    }

    #[test]
    fn expm_of_rotation_generator() {
        let theta = 2.3;
        let mut g = CMatrix::zeros(2, 2);
        g[(0, 1)] = Complex64::new(-theta, 0.0);
        g[(1, 0)] = Complex64::new(theta, 0.0);
        let e = expm(&g);
        assert_abs_diff_eq!(e[(0, 0)].re, theta.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[(1, 0)].re, theta.sin(), epsilon = 1e-14);
    }

    #[test]
    fn zero_squeezing_is_identity() {
        let vac = FockState::vacuum(2, 8, DEFAULT_BUDGET).unwrap();
        let out = fock_squeeze(SqueezeParam::new(0.0, 0.0).unwrap(), &vac, 0, 1).unwrap();
        assert_eq!(out, vac);
        assert_eq!(fock_phase(0.0, &vac, 1).unwrap(), vac);
    }

    #[test]
    fn squeezed_vacuum_expansion() {
        let r = 0.1;
        let s = squeezed(r, 12);
        for n in 0..6 {
            let a = s.amplitude(&[n, n]).unwrap();
            let expected = (-r.tanh()).powi(n as i32) / r.cosh();
            assert_abs_diff_eq!(a.re, expected, epsilon = 1e-13);
            assert_abs_diff_eq!(a.im, 0.0, epsilon = 1e-13);
        }
        assert_eq!(s.amplitude(&[1, 0]).unwrap(), Complex64::new(0.0, 0.0));
        let n = s.intensity();
        assert_abs_diff_eq!(n[0], r.sinh().powi(2), epsilon = 1e-8);
        assert_abs_diff_eq!(n[1], r.sinh().powi(2), epsilon = 1e-8);
        assert!((1.0 - s.norm_sqr()).abs() < 1e-8);
    }

    #[test]
    fn inverse_squeeze_restores_state() {
        let g = SqueezeParam::new(0.15, 0.3).unwrap();
        let vac = FockState::vacuum(3, 10, DEFAULT_BUDGET).unwrap();
        let mut s = fock_squeeze(g, &vac, 0, 2).unwrap();
        s = fock_phase(0.4, &s, 0).unwrap();
        let there = fock_squeeze(g, &s, 1, 2).unwrap();
        let back = fock_squeeze(g.negated(), &there, 1, 2).unwrap();
        let diff: f64 = back
            .amplitudes()
            .iter()
            .zip(s.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-8);
    }

    #[test]
    fn phase_overlap_is_geometric_series() {
        let (r, phi) = (0.1, 0.9);
        let s = squeezed(r, 14);
        let rotated = fock_phase(phi, &s, 0).unwrap();
        assert_eq!(rotated.intensity(), s.intensity());
        let ov = s.overlap(&rotated).unwrap();
        // Σ tanh^{2n}(r) e^{inφ} / cosh²(r) = 1 / (cosh²r (1 − tanh²r e^{iφ}))
        let t2 = r.tanh().powi(2);
        let expected = Complex64::new(1.0, 0.0)
            / (Complex64::new(r.cosh().powi(2), 0.0)
                * (Complex64::new(1.0, 0.0) - Complex64::from_polar(t2, phi)));
        assert_abs_diff_eq!(ov.re, expected.re, epsilon = 1e-12);
        assert_abs_diff_eq!(ov.im, expected.im, epsilon = 1e-12);
    }

    #[test]
    fn guards() {
        assert!(matches!(
            FockState::vacuum(6, 30, 1000),
            Err(Error::FockBudget { .. })
        ));
        assert!(fock_scheme(&SchemeConfig::sequential(0.1, 4), 0.0).is_err());
        assert!(fock_scheme(&SchemeConfig::sequential(0.3, 2), 0.0).is_err());
        assert!(fock_scheme(&SchemeConfig::sequential(0.1, 2).with_loss(0.1), 0.0).is_err());
        // a deliberately tiny cutoff leaks
        let vac = FockState::vacuum(2, 2, DEFAULT_BUDGET).unwrap();
        assert!(matches!(
            fock_squeeze(SqueezeParam::new(0.2, 0.0).unwrap(), &vac, 0, 1),
            Err(Error::CutoffTooSmall { .. })
        ));
        assert!(fock_qfi(&SchemeConfig::standard(0.1), 0.0, 0.0).is_err());
    }

    #[test]
    fn standard_returns_to_vacuum_at_zero_phase() {
        let s = fock_scheme(&SchemeConfig::standard(0.2), 0.0).unwrap();
        assert_abs_diff_eq!(s.amplitude(&[0, 0]).unwrap().norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn standard_qfi_oracle() {
        let q = fock_qfi(&SchemeConfig::standard(0.1), 0.4, 1e-3).unwrap();
        assert_relative_eq!(q.value, (0.2_f64).sinh().powi(2), max_relative = 1e-4);
        let zero = fock_qfi(&SchemeConfig::standard(0.0), 0.4, 1e-3).unwrap();
        assert_abs_diff_eq!(zero.value, 0.0, epsilon = 1e-9);
    }

    #[test]
    fn qfi_is_four_times_photon_variance_after_first_squeezer() {
        let r = 0.15;
        let s = squeezed(r, cutoff_for(r));
        let var = s.photon_variance(0);
        assert_relative_eq!(4.0 * var, (2.0 * r).sinh().powi(2), max_relative = 1e-8);
    }

    #[test]
    fn swapping_oracle_flips_sign() {
        // k = 1 with two loops: S(r)US(r) then S(−r)US(−r)
        let phi = PI / 3.0;
        let s = fock_scheme(&SchemeConfig::swapping(0.1, 2, 1), phi).unwrap();
        let g = SqueezeParam::new(0.1, 0.0).unwrap();
        let mut manual = FockState::vacuum(2, s.cutoff(), DEFAULT_BUDGET).unwrap();
        for gg in [g, g.negated()] {
            manual = fock_squeeze(gg, &manual, 0, 1).unwrap();
            manual = fock_phase(phi, &manual, 0).unwrap();
            manual = fock_squeeze(gg, &manual, 0, 1).unwrap();
        }
        assert_eq!(s, manual);
    }
}
