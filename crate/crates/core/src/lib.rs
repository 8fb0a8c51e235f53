//! Gaussian phase-space simulation of SU(1,1) interferometers with feedback.
//!
//! * [`gaussian`]: covariance-matrix states, Bogoliubov transforms, loss.
//! * [`schemes`]: standard, sequential, partial and swapping interferometers,
//!   each returning the output state and its analytic phase derivative.
//! * [`qfi`]: quantum Fisher information and Cramér–Rao bounds.
//! * [`fock`]: a truncated Fock-space simulator used to cross-check the
//!   Gaussian engine at small squeezing.

pub mod error;
pub mod fock;
pub mod gaussian;
pub mod qfi;
pub mod schemes;

pub use error::{Error, Result};
pub use gaussian::{
    apply, apply_loss, metric, phase_shifter, phase_shifter_derivative, two_mode_squeezer,
    BogoliubovTransform, CMatrix, GaussianState, LossChannel, SqueezeParam,
};
pub use qfi::{
    closed_form_partial_one_pass, closed_form_sequential_two_pass, closed_form_standard, qfi_noisy,
    qfi_pure, scaled_qfi, scheme_qfi, DerivativeMethod, QfiFormula, QfiResult,
};
pub use schemes::{
    build, build_partial, build_sequential, build_standard, build_swapping, estimate_period,
    SchemeConfig, SchemeKind, SchemeOutput,
};
