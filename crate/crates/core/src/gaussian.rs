//! Zero-mean Gaussian states in the complex (a, a†) ordering and the
//! Bogoliubov transforms and loss channel that act on them.
//!
//! The covariance of an `m`-mode state is a `2m × 2m` Hermitian matrix over
//! the operator vector `(a₁, a₁†, a₂, a₂†, …)`, normalised so that the vacuum
//! is `I/2`. A Bogoliubov transform `W` maps `cov ↦ W·cov·W†` and preserves
//! the metric `K = diag(+1, −1, +1, −1, …)`.

use std::f64::consts::{PI, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const HERMITIAN_TOL: f64 = 1e-12;
const METRIC_TOL: f64 = 1e-10;
/// States whose smallest symplectic eigenvalue falls below `1/2 - SPECTRUM_TOL`
/// are rejected as numerically invalid.
pub const SPECTRUM_TOL: f64 = 1e-6;

/// Two-mode squeezing parameter `Γ = r·e^{iθ}`.
///
/// A negative amplitude is stored as `|r|` with the pump phase shifted by π,
/// so `SqueezeParam::new(-r, θ)` and `SqueezeParam::new(r, θ + π)` are equal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezeParam {
    r: f64,
    theta: f64,
}

impl SqueezeParam {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        if !r.is_finite() || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "squeeze parameter must be finite (r = {r}, theta = {theta})"
            )));
        }
        let (r, theta) = if r < 0.0 {
            (-r, theta + PI)
        } else {
            (r, theta)
        };
        Ok(Self {
            r,
            theta: theta.rem_euclid(TAU),
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// The complex squeezing parameter `Γ`.
    pub fn gamma(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }

    /// `S(−Γ)`, the inverse squeezer.
    pub fn negated(&self) -> Self {
        Self {
            r: self.r,
            theta: (self.theta + PI).rem_euclid(TAU),
        }
    }
}

/// Uniform linear photon loss applied to every mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossChannel {
    eta: f64,
}

impl LossChannel {
    pub fn new(eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter(format!(
                "loss fraction must lie in [0, 1], got {eta}"
            )));
        }
        Ok(Self { eta })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Transmission `t = 1 − η`.
    pub fn transmission(&self) -> f64 {
        1.0 - self.eta
    }
}

/// The conserved metric `K = diag(+1, −1)` repeated per mode.
pub fn metric(modes: usize) -> CMatrix {
    CMatrix::from_fn(2 * modes, 2 * modes, |i, j| {
        if i != j {
            Complex64::new(0.0, 0.0)
        } else if i % 2 == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(-1.0, 0.0)
        }
    })
}

fn half_identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim) * Complex64::new(0.5, 0.0)
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// Replace `x` by `(x + x†)/2`.
pub(crate) fn symmetrize(x: &mut CMatrix) {
    let n = x.nrows();
    for i in 0..n {
        x[(i, i)] = Complex64::new(x[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let v = (x[(i, j)] + x[(j, i)].conj()) * 0.5;
            x[(i, j)] = v;
            x[(j, i)] = v.conj();
        }
    }
}

/// Zero-mean Gaussian state described by its complex covariance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    modes: usize,
    cov: CMatrix,
}

impl GaussianState {
    /// Vacuum on `modes` modes, `cov = I/2`.
    pub fn vacuum(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::ZeroModes);
        }
        Ok(Self {
            modes,
            cov: half_identity(2 * modes),
        })
    }

    /// Build a state from a user supplied covariance, checking every state
    /// invariant (Hermiticity, diagonal, symplectic spectrum).
    pub fn from_cov(cov: CMatrix) -> Result<Self> {
        let dim = cov.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || cov.ncols() != dim {
            return Err(Error::InvalidState(format!(
                "covariance must be a non-empty 2m x 2m matrix, got {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        let state = Self {
            modes: dim / 2,
            cov,
        };
        state.validate()?;
        Ok(state)
    }

    /// Wrap a covariance produced by a trusted (metric preserving or lossy)
    /// pipeline. Only the cheap structural checks run here.
    pub(crate) fn from_cov_unchecked(cov: CMatrix) -> Self {
        debug_assert!(cov.nrows().is_multiple_of(2) && cov.is_square());
        Self {
            modes: cov.nrows() / 2,
            cov,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let scale = max_abs(&self.cov).max(1.0);
        let adjoint = self.cov.adjoint();
        let herm = max_abs(&(&self.cov - &adjoint));
        if herm > HERMITIAN_TOL * scale {
            return Err(Error::InvalidState(format!(
                "covariance not Hermitian (defect {herm:.3e})"
            )));
        }
        for i in 0..2 * self.modes {
            let d = self.cov[(i, i)];
            if d.im.abs() > HERMITIAN_TOL * scale || d.re < 0.5 - HERMITIAN_TOL * scale {
                return Err(Error::InvalidState(format!(
                    "diagonal entry {i} = {d} below vacuum level"
                )));
            }
        }
        let nu = self.symplectic_eigenvalues();
        if nu[0] < 0.5 - SPECTRUM_TOL {
            return Err(Error::InvalidState(format!(
                "symplectic eigenvalue {:.12} below 1/2",
                nu[0]
            )));
        }
        Ok(())
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cov(&self) -> &CMatrix {
        &self.cov
    }

    pub fn into_cov(self) -> CMatrix {
        self.cov
    }

    /// Mean photon number of each mode, `Re(cov[2i, 2i]) − 1/2`.
    pub fn intensity(&self) -> Vec<f64> {
        (0..self.modes)
            .map(|i| self.cov[(2 * i, 2 * i)].re - 0.5)
            .collect()
    }

    pub fn total_intensity(&self) -> f64 {
        self.intensity().iter().sum()
    }

    /// Symplectic eigenvalues (moduli of the eigenvalues of `K·cov`), one per
    /// mode, sorted ascending.
    ///
    /// Computed from the Hermitian matrix `cov^{1/2}·K·cov^{1/2}`, which is
    /// similar to `K·cov` and has spectrum `±ν`.
    pub fn symplectic_eigenvalues(&self) -> Vec<f64> {
        let eig = self.cov.clone().symmetric_eigen();
        let sqrt_vals = eig
            .eigenvalues
            .map(|l| Complex64::new(l.max(0.0).sqrt(), 0.0));
        let root =
            &eig.eigenvectors * CMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.adjoint();
        let mut sandwich = &root * metric(self.modes) * &root;
        symmetrize(&mut sandwich);
        let mut moduli: Vec<f64> = sandwich
            .symmetric_eigenvalues()
            .iter()
            .map(|l| l.abs())
            .collect();
        moduli.sort_by(|a, b| a.total_cmp(b));
        moduli
            .chunks(2)
            .map(|pair| pair.iter().sum::<f64>() / pair.len() as f64)
            .collect()
    }

    /// Cheap purity residual `max|4·cov·K·cov − K| / max(1, max|cov|)²`.
    ///
    /// Zero for pure states, since their covariance is `W·W†/2` with `W`
    /// metric preserving.
    pub fn purity_residual(&self) -> f64 {
        let k = metric(self.modes);
        let defect = &self.cov * &k * &self.cov * Complex64::new(4.0, 0.0) - &k;
        let scale = max_abs(&self.cov).max(1.0);
        max_abs(&defect) / (scale * scale)
    }

    /// Reduced state on the listed modes (partial trace).
    pub fn marginal(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::ZeroModes);
        }
        let mut idx = Vec::with_capacity(2 * keep.len());
        for &mode in keep {
            if mode >= self.modes {
                return Err(Error::ModeOutOfRange {
                    index: mode,
                    modes: self.modes,
                });
            }
            idx.extend([2 * mode, 2 * mode + 1]);
        }
        Ok(Self {
            modes: keep.len(),
            cov: submatrix(&self.cov, &idx),
        })
    }
}

/// Rows and columns `idx` of `x`.
pub fn submatrix(x: &CMatrix, idx: &[usize]) -> CMatrix {
    CMatrix::from_fn(idx.len(), idx.len(), |i, j| x[(idx[i], idx[j])])
}

/// Bogoliubov transform acting on the `(a₁, a₁†, …)` operator vector.
#[derive(Debug, Clone, PartialEq)]
pub struct BogoliubovTransform {
    modes: usize,
    mat: CMatrix,
}

impl BogoliubovTransform {
    pub fn identity(modes: usize) -> Result<Self> {
        if modes == 0 {
            return Err(Error::ZeroModes);
        }
        Ok(Self {
            modes,
            mat: CMatrix::identity(2 * modes, 2 * modes),
        })
    }

    /// Wrap an arbitrary matrix, rejecting it unless `mat·K·mat† = K`.
    pub fn from_matrix(mat: CMatrix) -> Result<Self> {
        let dim = mat.nrows();
        if dim == 0 || !dim.is_multiple_of(2) || mat.ncols() != dim {
            return Err(Error::InvalidParameter(format!(
                "transform must be 2m x 2m, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let w = Self {
            modes: dim / 2,
            mat,
        };
        let defect = w.metric_defect();
        if defect > METRIC_TOL {
            return Err(Error::InvalidParameter(format!(
                "matrix does not preserve the metric (defect {defect:.3e})"
            )));
        }
        Ok(w)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// `max|mat·K·mat† − K|`.
    pub fn metric_defect(&self) -> f64 {
        let k = metric(self.modes);
        max_abs(&(&self.mat * &k * self.mat.adjoint() - k))
    }

    /// Product `self · rhs`: `rhs` acts first.
    pub fn then_after(&self, rhs: &Self) -> Result<Self> {
        if self.modes != rhs.modes {
            return Err(Error::DimensionMismatch {
                expected: self.modes,
                found: rhs.modes,
            });
        }
        Ok(Self {
            modes: self.modes,
            mat: &self.mat * &rhs.mat,
        })
    }
}

fn check_mode(index: usize, modes: usize) -> Result<()> {
    if modes == 0 {
        return Err(Error::ZeroModes);
    }
    if index >= modes {
        return Err(Error::ModeOutOfRange { index, modes });
    }
    Ok(())
}

/// 4×4 squeezer block on the ordered pair `(a, a†, b, b†)`.
///
/// `a ↦ cosh r·a − e^{iθ} sinh r·b†`, `b ↦ cosh r·b − e^{iθ} sinh r·a†`.
pub(crate) fn squeezer_block(g: SqueezeParam) -> CMatrix {
    let c = Complex64::new(g.r.cosh(), 0.0);
    let s = g.r.sinh();
    let e = Complex64::from_polar(s, g.theta);
    let zero = Complex64::new(0.0, 0.0);
    #[rustfmt::skip]
    let block = CMatrix::from_row_slice(4, 4, &[
        c,          zero,       zero,       -e,
        zero,       c,          -e.conj(),  zero,
        zero,       -e,         c,          zero,
        -e.conj(),  zero,       zero,       c,
    ]);
    block
}

pub(crate) fn phase_block(phi: f64) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::from_polar(1.0, phi),
        Complex64::from_polar(1.0, -phi),
    ]))
}

pub(crate) fn phase_derivative_block(phi: f64) -> CMatrix {
    let i = Complex64::new(0.0, 1.0);
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        i * Complex64::from_polar(1.0, phi),
        -i * Complex64::from_polar(1.0, -phi),
    ]))
}

/// Operator-vector indices of the listed modes.
pub(crate) fn mode_indices(modes: &[usize]) -> Vec<usize> {
    modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect()
}

fn embed(block: &CMatrix, idx: &[usize], dim: usize, base: CMatrix) -> CMatrix {
    let mut out = base;
    debug_assert_eq!(out.nrows(), dim);
    for (bi, &i) in idx.iter().enumerate() {
        for (bj, &j) in idx.iter().enumerate() {
            out[(i, j)] = block[(bi, bj)];
        }
    }
    out
}

/// Two-mode squeezer `S(Γ)` between modes `i` and `j` of an `m`-mode system.
pub fn two_mode_squeezer(
    g: SqueezeParam,
    modes: usize,
    i: usize,
    j: usize,
) -> Result<BogoliubovTransform> {
    check_mode(i, modes)?;
    check_mode(j, modes)?;
    if i == j {
        return Err(Error::SameMode(i));
    }
    let dim = 2 * modes;
    let mat = embed(
        &squeezer_block(g),
        &mode_indices(&[i, j]),
        dim,
        CMatrix::identity(dim, dim),
    );
    Ok(BogoliubovTransform { modes, mat })
}

/// Phase shift `a_i ↦ e^{iφ} a_i` on one mode.
pub fn phase_shifter(phi: f64, modes: usize, i: usize) -> Result<BogoliubovTransform> {
    check_mode(i, modes)?;
    let dim = 2 * modes;
    let mat = embed(
        &phase_block(phi),
        &mode_indices(&[i]),
        dim,
        CMatrix::identity(dim, dim),
    );
    Ok(BogoliubovTransform { modes, mat })
}

/// `∂_φ` of [`phase_shifter`]; zero outside mode `i`.
pub fn phase_shifter_derivative(phi: f64, modes: usize, i: usize) -> Result<CMatrix> {
    check_mode(i, modes)?;
    let dim = 2 * modes;
    Ok(embed(
        &phase_derivative_block(phi),
        &mode_indices(&[i]),
        dim,
        CMatrix::zeros(dim, dim),
    ))
}

/// `cov ↦ W·cov·W†`, re-symmetrised.
pub fn apply(w: &BogoliubovTransform, s: &GaussianState) -> Result<GaussianState> {
    if w.modes != s.modes {
        return Err(Error::DimensionMismatch {
            expected: w.modes,
            found: s.modes,
        });
    }
    let mut cov = &w.mat * &s.cov * w.mat.adjoint();
    symmetrize(&mut cov);
    Ok(GaussianState {
        modes: s.modes,
        cov,
    })
}

/// `cov ↦ t·(cov − I/2) + I/2` on every mode.
pub fn apply_loss(c: LossChannel, s: &GaussianState) -> GaussianState {
    GaussianState {
        modes: s.modes,
        cov: lossy_cov(c, &s.cov),
    }
}

pub(crate) fn lossy_cov(c: LossChannel, cov: &CMatrix) -> CMatrix {
    let t = Complex64::new(c.transmission(), 0.0);
    let half = half_identity(cov.nrows());
    (cov - &half) * t + half
}

/// Left-multiply `x` by a transform that equals `block` on the operator
/// indices `idx` and the identity elsewhere. Only rows `idx` change.
pub(crate) fn left_local(block: &CMatrix, idx: &[usize], x: &mut CMatrix) {
    let rows = rows_of(block, idx, x);
    for (bi, &i) in idx.iter().enumerate() {
        x.row_mut(i).copy_from(&rows.row(bi));
    }
}

/// `block · x[idx, :]`, the non-trivial rows of a product with a transform
/// (or a derivative of one) supported on `idx`.
pub(crate) fn rows_of(block: &CMatrix, idx: &[usize], x: &CMatrix) -> CMatrix {
    let n = x.ncols();
    let k = idx.len();
    let mut rows = CMatrix::zeros(k, n);
    for bi in 0..k {
        for (bj, &j) in idx.iter().enumerate() {
            let b = block[(bi, bj)];
            if b.re == 0.0 && b.im == 0.0 {
                continue;
            }
            for col in 0..n {
                rows[(bi, col)] += b * x[(j, col)];
            }
        }
    }
    rows
}

/// Right-multiply `x` by the adjoint of a transform equal to `block` on `idx`
/// and the identity elsewhere. Only columns `idx` change.
pub(crate) fn right_local_adjoint(block: &CMatrix, idx: &[usize], x: &mut CMatrix) {
    let n = x.nrows();
    let k = idx.len();
    let mut cols = CMatrix::zeros(n, k);
    for bi in 0..k {
        for (bj, &j) in idx.iter().enumerate() {
            let b = block[(bi, bj)].conj();
            if b.re == 0.0 && b.im == 0.0 {
                continue;
            }
            for row in 0..n {
                cols[(row, bi)] += x[(row, j)] * b;
            }
        }
    }
    for (bi, &i) in idx.iter().enumerate() {
        x.column_mut(i).copy_from(&cols.column(bi));
    }
}
