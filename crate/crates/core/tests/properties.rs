//! Property-based checks of the invariants that hold across whole parameter
//! ranges rather than at hand-picked points.

use fcb_core::kernels::{ClassSpec, Metric, PhaseSeq, SmoothnessSeq, TailKernel};
use fcb_core::quadrature::{lq_norm, Exponent, QuadratureConfig};
use fcb_core::special_fn::{hurwitz_zeta, ZetaArgs};
use proptest::prelude::*;
use std::f64::consts::PI;

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// ζ(s,l) − ζ(s,l+1) = l^{-s} (telescoping). The tolerance scales with
    /// the value, which grows like l^{-s} for l < 1.
    #[test]
    fn hurwitz_telescoping(s in 1.2f64..30.0, l in 0.5f64..12.0) {
        let mag = l.powf(-s).max(1.0);
        let tol = 1e-13 * mag;
        let a = hurwitz_zeta(ZetaArgs::new(s, l).unwrap(), tol).unwrap();
        let b = hurwitz_zeta(ZetaArgs::new(s, l + 1.0).unwrap(), tol).unwrap();
        prop_assert!(
            (a - b - l.powf(-s)).abs() < 4.0 * tol,
            "telescoping broke at s={s}, l={l}: {}", a - b - l.powf(-s)
        );
    }

    /// ‖c·f‖_q = |c|·‖f‖_q for trig-polynomial integrands.
    #[test]
    fn norm_absolute_homogeneity(
        c in -3.0f64..3.0,
        a1 in -1.0f64..1.0,
        b2 in -1.0f64..1.0,
        q in 1.0f64..5.0,
    ) {
        let f = move |t: f64| a1 * t.cos() + b2 * (2.0 * t).sin() + 0.1 * (5.0 * t).cos();
        let g = move |t: f64| c * f(t);
        let nf = lq_norm(&f, Exponent::Finite(q), &cfg()).unwrap().value;
        let ng = lq_norm(&g, Exponent::Finite(q), &cfg()).unwrap().value;
        prop_assert!((ng - c.abs() * nf).abs() < 1e-9 * (1.0 + nf));
    }

    /// Stationary kernels have the parity of their phase: β = 0 even,
    /// β = 1 odd.
    #[test]
    fn kernel_parity(r in 2.2f64..9.0, n in 1usize..5, t in 0.0f64..3.1) {
        let even = TailKernel::new(
            SmoothnessSeq::power_law(r).unwrap(),
            PhaseSeq::stationary(0.0),
            n,
        ).unwrap().evaluator(1e-11).unwrap();
        prop_assert!((even.eval(t) - even.eval(-t)).abs() < 1e-10);
        let odd = TailKernel::new(
            SmoothnessSeq::power_law(r).unwrap(),
            PhaseSeq::stationary(1.0),
            n,
        ).unwrap().evaluator(1e-11).unwrap();
        prop_assert!((odd.eval(t) + odd.eval(-t)).abs() < 1e-10);
    }

    /// The L2 value of ε_n depends on ψ only, never on the phases.
    #[test]
    fn eps_l2_phase_free(
        r in 0.75f64..10.0,
        n in 1usize..6,
        beta in -4.0f64..4.0,
        head in prop::collection::vec(-3.0f64..3.0, 0..5),
    ) {
        let base = ClassSpec::new(
            SmoothnessSeq::power_law(r).unwrap(),
            PhaseSeq::stationary(0.0),
            Exponent::Finite(2.0),
            Metric::Uniform,
        ).unwrap();
        let moved = ClassSpec::new(
            SmoothnessSeq::power_law(r).unwrap(),
            PhaseSeq::explicit(head, beta),
            Exponent::Finite(2.0),
            Metric::Uniform,
        ).unwrap();
        let a = fcb_core::bounds::eps_exact(&base, n, &cfg()).unwrap().value;
        let b = fcb_core::bounds::eps_exact(&moved, n, &cfg()).unwrap().value;
        prop_assert!((a - b).abs() < 1e-10 * (1.0 + a));
    }

    /// ClassSpec JSON serialization round-trips.
    #[test]
    fn class_spec_json_round_trip(
        power in 1.1f64..20.0,
        beta in -2.0f64..2.0,
        p_sel in 0usize..4,
    ) {
        let p = match p_sel {
            0 => Exponent::Finite(1.0),
            1 => Exponent::Finite(2.0),
            2 => Exponent::Finite(4.0),
            _ => Exponent::Infinity,
        };
        let spec = ClassSpec::new(
            SmoothnessSeq::power_law(power).unwrap(),
            PhaseSeq::stationary(beta),
            p,
            Metric::Uniform,
        ).unwrap();
        let back = ClassSpec::from_json(&spec.to_json()).unwrap();
        prop_assert_eq!(back, spec);
    }

    /// Evaluating a truncated kernel never exceeds Σψ(k) in magnitude.
    #[test]
    fn kernel_bounded_by_coefficient_sum(r in 1.6f64..6.0, t in -3.14f64..3.14) {
        let kernel = TailKernel::new(
            SmoothnessSeq::power_law(r).unwrap(),
            PhaseSeq::stationary(0.5),
            1,
        ).unwrap();
        let ev = kernel.evaluator(1e-10).unwrap();
        let total = hurwitz_zeta(ZetaArgs::new(r, 1.0).unwrap(), 1e-12).unwrap();
        prop_assert!(ev.eval(t).abs() <= total + 1e-9);
    }
}

/// Hölder monotonicity of the normalized norms, deterministic grid.
#[test]
fn normalized_norm_monotone_in_q() {
    let f = |t: f64| (2.0 * t).cos() - 0.7 * (3.0 * t).sin();
    let mut prev = 0.0;
    for &q in &[1.0, 1.25, 2.0, 2.5, 4.0, 8.0] {
        let v = lq_norm(&f, Exponent::Finite(q), &cfg()).unwrap().value
            * (2.0 * PI).powf(-1.0 / q);
        assert!(v >= prev - 1e-10, "q={q}");
        prev = v;
    }
}
