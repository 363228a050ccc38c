//! Complete elliptic integral of the first kind,
//!
//! ```text
//! K(q) = ∫₀^{π/2} dt / √(1 − q² sin² t),   0 ≤ q < 1,
//! ```
//!
//! in the modulus convention (the argument is q, not the parameter m = q²).
//! The primary evaluator is the arithmetic-geometric-mean iteration; a direct
//! adaptive-quadrature evaluator of the defining integral is exposed as an
//! independent cross-check route.

use crate::quadrature::adaptive_interval;
use crate::{Error, Result};
use std::f64::consts::{FRAC_PI_2, PI};

/// Modulus of the elliptic integral, restricted to [0, 1).
///
/// q = 1 is rejected: K diverges there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(q: f64) -> Result<Self> {
        if !q.is_finite() || !(0.0..1.0).contains(&q) {
            return Err(Error::Domain(format!(
                "elliptic modulus must satisfy 0 <= q < 1, got {q}"
            )));
        }
        Ok(Self(q))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

const AGM_MAX_ITER: usize = 40;

/// K(q) by the AGM iteration: K = π / (2·agm(1, √(1−q²))).
///
/// The iteration converges quadratically; the returned value carries an
/// internal error estimate from the last iterate difference, and the call
/// fails if that estimate cannot be brought below `tol`.
pub fn elliptic_k(q: EllipticModulus, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    let q = q.value();
    let mut a = 1.0f64;
    let mut b = (1.0 - q * q).sqrt();

    let mut prev_k = PI / (a + b);
    for _ in 0..AGM_MAX_ITER {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        a = an;
        b = bn;
        let k = PI / (a + b);
        let step = (k - prev_k).abs();
        prev_k = k;
        if step <= f64::EPSILON * k.abs() {
            // converged to machine precision; the floor below is what we can
            // honestly certify in f64
            let achieved = 4.0 * f64::EPSILON * k.abs();
            if achieved > tol {
                return Err(Error::ToleranceNotMet {
                    requested: tol,
                    achieved,
                });
            }
            return Ok(k);
        }
    }
    Err(Error::ToleranceNotMet {
        requested: tol,
        achieved: (PI / (a + b) - prev_k).abs(),
    })
}

/// K(q) by adaptive quadrature of the defining integral. Independent of the
/// AGM route; used as its cross-check.
pub fn elliptic_k_by_quadrature(q: EllipticModulus, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    let qq = q.value() * q.value();
    let f = move |t: f64| {
        let s = t.sin();
        1.0 / (1.0 - qq * s * s).sqrt()
    };
    let (value, err, _evals) = adaptive_interval(&f, 0.0, FRAC_PI_2, tol * 0.5, 1e-14, 40);
    if err > tol {
        return Err(Error::ToleranceNotMet {
            requested: tol,
            achieved: err,
        });
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_at_zero_is_half_pi() {
        let q = EllipticModulus::new(0.0).unwrap();
        assert!((elliptic_k(q, 1e-12).unwrap() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn k_near_zero_continuity() {
        let q = EllipticModulus::new(1e-8).unwrap();
        assert!((elliptic_k(q, 1e-12).unwrap() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_modulus() {
        assert!(EllipticModulus::new(1.0).is_err());
        assert!(EllipticModulus::new(-0.1).is_err());
        assert!(EllipticModulus::new(f64::NAN).is_err());
    }

    #[test]
    fn unreachable_tolerance_reported() {
        let q = EllipticModulus::new(0.5).unwrap();
        match elliptic_k(q, 1e-30) {
            Err(Error::ToleranceNotMet { .. }) => {}
            other => panic!("expected ToleranceNotMet, got {other:?}"),
        }
    }

    #[test]
    fn strictly_increasing_in_q() {
        let mut prev = elliptic_k(EllipticModulus::new(0.0).unwrap(), 1e-12).unwrap();
        for i in 1..100 {
            let q = i as f64 / 100.0;
            let k = elliptic_k(EllipticModulus::new(q).unwrap(), 1e-12).unwrap();
            assert!(k > prev, "K not increasing at q={q}");
            prev = k;
        }
    }

    // Independent oracle: adaptive Simpson on the defining integral, written
    // here so it shares nothing with the library quadrature code.
    fn simpson_oracle(q: f64, tol: f64) -> f64 {
        fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
            (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
        }
        fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, whole: f64, eps: f64) -> f64 {
            let m = 0.5 * (a + b);
            let left = simpson(f, a, m);
            let right = simpson(f, m, b);
            if (left + right - whole).abs() <= 15.0 * eps {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, m, left, eps / 2.0) + rec(f, m, b, right, eps / 2.0)
            }
        }
        let qq = q * q;
        let f = move |t: f64| {
            let s = t.sin();
            1.0 / (1.0 - qq * s * s).sqrt()
        };
        rec(&f, 0.0, FRAC_PI_2, simpson(&f, 0.0, FRAC_PI_2), tol)
    }

    #[test]
    fn agm_matches_frozen_value_at_exp_minus_one() {
        // q = e^{-r/n} with r = n, i.e. q = e^{-1}; frozen from the Simpson
        // oracle at 1e-12
        let q = (-1.0f64).exp();
        let frozen = 1.628_412_678_449_567_8;
        let oracle = simpson_oracle(q, 1e-13);
        assert!(
            (oracle - frozen).abs() < 1e-11,
            "oracle drifted: {oracle} vs {frozen}"
        );
        let agm = elliptic_k(EllipticModulus::new(q).unwrap(), 1e-12).unwrap();
        assert!((agm - frozen).abs() < 1e-11);
    }

    #[test]
    fn agm_matches_simpson_oracle_on_grid() {
        for i in 0..=99 {
            let q = i as f64 / 100.0;
            let agm = elliptic_k(EllipticModulus::new(q).unwrap(), 1e-12).unwrap();
            let oracle = simpson_oracle(q, 1e-13);
            assert!(
                (agm - oracle).abs() < 1e-10,
                "AGM vs Simpson mismatch at q={q}: {agm} vs {oracle}"
            );
        }
    }

    #[test]
    fn quadrature_route_matches_agm() {
        for i in 0..10 {
            let qv = i as f64 * 0.1;
            let q = EllipticModulus::new(qv).unwrap();
            let a = elliptic_k(q, 1e-12).unwrap();
            let b = elliptic_k_by_quadrature(q, 1e-11).unwrap();
            assert!((a - b).abs() < 1e-10, "mismatch at q={qv}");
        }
    }
}
