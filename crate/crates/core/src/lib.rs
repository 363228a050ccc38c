//! Worst-case Fourier approximation errors on convolution function classes.
//!
//! This crate computes the exact worst-case error of approximating a
//! 2π-periodic function by its Fourier partial sum of order n−1, taken over
//! Weyl-Nagy classes `W^r_{β,p}` and the more general Stepanets classes
//! `C^ψ_{β̄,p}` generated by a positive summable coefficient sequence ψ and a
//! phase sequence β̄. The worst-case error is evaluated through the dual-norm
//! identity ε_n = (1/π)·‖Ψ_{β̄,n}‖_q, where Ψ_{β̄,n} is the tail kernel
//! Σ_{k≥n} ψ(k)·cos(kt − β_k π/2) and q is the exponent dual to the class
//! metric, with a closed Hurwitz-zeta form in the L₂ setting.
//!
//! Modules:
//! - [`special_fn`]: complete elliptic integral K, Hurwitz zeta (series and
//!   integral forms), Gamma.
//! - [`quadrature`]: adaptive periodic L_q norms and integrals with error
//!   control.
//! - [`kernels`]: coefficient/phase sequences, tail-kernel evaluation with
//!   certified truncation error, Fourier partial sums, convolution.
//! - [`bounds`]: exact ε_n evaluators (dual norm, L₂ closed forms) and a
//!   near-extremal-function oracle.
//! - [`asymptotics`]: classical asymptotic formulas (Kolmogorov/Nikolskii
//!   log form, Stechkin elliptic form, high-smoothness brackets) and
//!   remainder-constant diagnostics against the exact values.

use thiserror::Error;

pub mod asymptotics;
pub mod bounds;
pub mod kernels;
pub mod quadrature;
pub mod special_fn;

/// Errors shared by all numerical routines in this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside a routine's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A requested accuracy could not be certified.
    #[error("tolerance not met: requested {requested:.3e}, achieved {achieved:.3e}")]
    ToleranceNotMet { requested: f64, achieved: f64 },
    /// A series truncation index exceeded its iteration cap.
    #[error("truncation cap exceeded: {0}")]
    TruncationCap(String),
    /// The request is outside the supported class/metric combinations.
    #[error("out of scope: {0}")]
    OutOfScope(String),
    /// Malformed configuration or serialized input.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
