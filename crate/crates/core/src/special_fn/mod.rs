//! Special functions used by the closed-form error expressions: the complete
//! elliptic integral of the first kind, the Hurwitz zeta function (series and
//! integral representations), and the Gamma function.
//!
//! Everything here is self-contained real-argument code; no external
//! special-function crates are involved. All routines are pure and safe to
//! call concurrently.

mod elliptic;
mod gamma;
mod zeta;

pub use elliptic::{elliptic_k, elliptic_k_by_quadrature, EllipticModulus};
pub use gamma::{gamma_fn, ln_gamma};
pub use zeta::{hurwitz_zeta, hurwitz_zeta_integral, ZetaArgs};

pub(crate) use gamma::gamma_positive;
pub(crate) use zeta::{riemann_zeta_real, zeta_em};
