//! Coefficient and phase data of Stepanets kernels, pointwise evaluation of
//! kernels and tail kernels with certified truncation error, Fourier partial
//! sums of class members, and convolution against a test function.
//!
//! A kernel is the series Σ_k ψ(k)·cos(kt − β_k π/2); the tail kernel
//! Ψ_{β̄,n} starts the sum at k = n. Coefficient sequences are either a power
//! law k^{-r} or an explicit head with a dominating tail rule, so every
//! truncation carries an integral-test (or geometric) certificate.

mod eval;

pub use eval::KernelEvaluator;

use crate::quadrature::{self, Exponent, NormResult, QuadratureConfig};
use crate::{Error, Result};
use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

// --------------------------------------------------------------------------
// Coefficient sequences
// --------------------------------------------------------------------------

/// Continuation rule for an explicit coefficient head: either c·ρ^k or
/// c·k^{-power} beyond the listed values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TailRule {
    Geometric { coeff: f64, ratio: f64 },
    Power { coeff: f64, power: f64 },
}

impl TailRule {
    fn validate(&self) -> Result<()> {
        match *self {
            TailRule::Geometric { coeff, ratio } => {
                if !(coeff > 0.0) || !(ratio > 0.0) || !(ratio < 1.0) {
                    return Err(Error::InvalidInput(format!(
                        "geometric tail needs coeff > 0 and 0 < ratio < 1, got coeff={coeff}, ratio={ratio}"
                    )));
                }
            }
            TailRule::Power { coeff, power } => {
                if !(coeff > 0.0) || !power.is_finite() || power <= 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "power tail needs coeff > 0 and power > 0, got coeff={coeff}, power={power}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn value(&self, k: usize) -> f64 {
        match *self {
            TailRule::Geometric { coeff, ratio } => coeff * ratio.powi(k as i32),
            TailRule::Power { coeff, power } => coeff * (k as f64).powf(-power),
        }
    }
}

/// The coefficient sequence ψ(k), k ≥ 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SmoothnessSeq {
    /// ψ(k) = k^{-power}
    PowerLaw { power: f64 },
    /// Listed head values followed by the tail rule.
    Explicit { explicit: Vec<f64>, tail: TailRule },
}

impl SmoothnessSeq {
    pub fn power_law(r: f64) -> Result<Self> {
        let s = SmoothnessSeq::PowerLaw { power: r };
        s.validate()?;
        Ok(s)
    }

    pub fn explicit(values: Vec<f64>, tail: TailRule) -> Result<Self> {
        let s = SmoothnessSeq::Explicit {
            explicit: values,
            tail,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SmoothnessSeq::PowerLaw { power } => {
                if !power.is_finite() || *power <= 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "power law exponent must be positive, got {power}"
                    )));
                }
            }
            SmoothnessSeq::Explicit { explicit, tail } => {
                if explicit.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
                    return Err(Error::InvalidInput(
                        "explicit coefficient values must be positive and finite".into(),
                    ));
                }
                tail.validate()?;
            }
        }
        Ok(())
    }

    /// Summability certificate for Σψ(k): requires a power exponent > 1 or a
    /// geometric tail. This is checked per operation rather than at
    /// construction, because the square-summable regime (2r > 1) is wider
    /// and still serves the L₂ closed forms.
    pub fn summability(&self) -> Result<()> {
        let ok = match self {
            SmoothnessSeq::PowerLaw { power } => *power > 1.0,
            SmoothnessSeq::Explicit { tail, .. } => match tail {
                TailRule::Geometric { .. } => true,
                TailRule::Power { power, .. } => *power > 1.0,
            },
        };
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfScope(
                "coefficient sequence is not summable (power-law tail needs exponent > 1)".into(),
            ))
        }
    }

    pub fn square_summability(&self) -> Result<()> {
        let ok = match self {
            SmoothnessSeq::PowerLaw { power } => 2.0 * *power > 1.0,
            SmoothnessSeq::Explicit { tail, .. } => match tail {
                TailRule::Geometric { .. } => true,
                TailRule::Power { power, .. } => 2.0 * *power > 1.0,
            },
        };
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfScope(
                "coefficient sequence is not square-summable (needs exponent > 1/2)".into(),
            ))
        }
    }

    pub fn value(&self, k: usize) -> f64 {
        debug_assert!(k >= 1);
        match self {
            SmoothnessSeq::PowerLaw { power } => (k as f64).powf(-power),
            SmoothnessSeq::Explicit { explicit, tail } => {
                if k <= explicit.len() {
                    explicit[k - 1]
                } else {
                    tail.value(k)
                }
            }
        }
    }

    /// Index after which the sequence is pure power law or geometric.
    pub(crate) fn head_end(&self) -> usize {
        match self {
            SmoothnessSeq::PowerLaw { .. } => 1,
            SmoothnessSeq::Explicit { explicit, .. } => explicit.len() + 1,
        }
    }

    pub(crate) fn tail_rule(&self) -> TailRule {
        match self {
            SmoothnessSeq::PowerLaw { power } => TailRule::Power {
                coeff: 1.0,
                power: *power,
            },
            SmoothnessSeq::Explicit { tail, .. } => tail.clone(),
        }
    }

    /// Upper bound on Σ_{k>m} ψ(k) via the integral test (power tails) or
    /// the exact geometric sum. Requires summability.
    pub fn tail_sum_bound(&self, m: usize) -> f64 {
        let rule_bound = |rule: &TailRule, m: usize| -> f64 {
            match *rule {
                TailRule::Geometric { coeff, ratio } => {
                    coeff * ratio.powi(m as i32 + 1) / (1.0 - ratio)
                }
                TailRule::Power { coeff, power } => {
                    // Σ_{k>m} k^{-r} < (m+1)^{-r} + ∫_{m+1}^∞ t^{-r} dt
                    let mp = m as f64 + 1.0;
                    coeff * (mp.powf(-power) + mp.powf(1.0 - power) / (power - 1.0))
                }
            }
        };
        match self {
            SmoothnessSeq::PowerLaw { .. } => rule_bound(&self.tail_rule(), m),
            SmoothnessSeq::Explicit { explicit, tail } => {
                if m >= explicit.len() {
                    rule_bound(tail, m)
                } else {
                    let head: f64 = explicit[m..].iter().sum();
                    head + rule_bound(tail, explicit.len())
                }
            }
        }
    }

    /// Smallest truncation index M (within a cap) with Σ_{k>M} ψ(k) ≤ tol.
    pub fn truncation_index(&self, tol: f64, cap: usize) -> Result<usize> {
        if self.tail_sum_bound(cap) > tol {
            return Err(Error::TruncationCap(format!(
                "no truncation index within cap {cap} reaches tail tolerance {tol:.3e}"
            )));
        }
        let mut lo = 1usize;
        let mut hi = cap;
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.tail_sum_bound(mid) <= tol {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok(lo)
    }

    /// The sequence ψ(k)², same representation family.
    pub(crate) fn squared(&self) -> SmoothnessSeq {
        match self {
            SmoothnessSeq::PowerLaw { power } => SmoothnessSeq::PowerLaw { power: 2.0 * power },
            SmoothnessSeq::Explicit { explicit, tail } => SmoothnessSeq::Explicit {
                explicit: explicit.iter().map(|v| v * v).collect(),
                tail: match *tail {
                    TailRule::Geometric { coeff, ratio } => TailRule::Geometric {
                        coeff: coeff * coeff,
                        ratio: ratio * ratio,
                    },
                    TailRule::Power { coeff, power } => TailRule::Power {
                        coeff: coeff * coeff,
                        power: 2.0 * power,
                    },
                },
            },
        }
    }

    /// Σ_{k≥n} ψ(k)² with absolute error ≤ tol. Needs square-summability
    /// only, so the L₂ closed forms reach down to power exponents > 1/2.
    pub fn sum_squares_from(&self, n: usize, tol: f64) -> Result<f64> {
        self.square_summability()?;
        let sq = self.squared();
        match &sq {
            SmoothnessSeq::PowerLaw { power } => {
                let args = crate::special_fn::ZetaArgs::new(*power, n as f64)?;
                crate::special_fn::hurwitz_zeta(args, tol)
            }
            SmoothnessSeq::Explicit { explicit, tail } => {
                let head_end = explicit.len() + 1;
                let mut sum = 0.0;
                for k in n..head_end.max(n) {
                    sum += sq.value(k);
                }
                let from = head_end.max(n);
                sum += match *tail {
                    TailRule::Geometric { coeff, ratio } => {
                        coeff * ratio.powi(from as i32) / (1.0 - ratio)
                    }
                    TailRule::Power { coeff, power } => {
                        let args = crate::special_fn::ZetaArgs::new(power, from as f64)?;
                        coeff * crate::special_fn::hurwitz_zeta(args, tol / coeff.max(1.0))?
                    }
                };
                Ok(sum)
            }
        }
    }
}

// --------------------------------------------------------------------------
// Phase sequences
// --------------------------------------------------------------------------

/// The phase sequence β̄ = {β_k}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhaseSeq {
    Stationary { stationary: f64 },
    Explicit { explicit: Vec<f64>, default: f64 },
}

impl PhaseSeq {
    pub fn stationary(beta: f64) -> Self {
        PhaseSeq::Stationary { stationary: beta }
    }

    pub fn explicit(values: Vec<f64>, default: f64) -> Self {
        PhaseSeq::Explicit {
            explicit: values,
            default,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all_finite = match self {
            PhaseSeq::Stationary { stationary } => stationary.is_finite(),
            PhaseSeq::Explicit { explicit, default } => {
                default.is_finite() && explicit.iter().all(|b| b.is_finite())
            }
        };
        if all_finite {
            Ok(())
        } else {
            Err(Error::InvalidInput("phase entries must be finite".into()))
        }
    }

    pub fn phase(&self, k: usize) -> f64 {
        match self {
            PhaseSeq::Stationary { stationary } => *stationary,
            PhaseSeq::Explicit { explicit, default } => {
                if k >= 1 && k <= explicit.len() {
                    explicit[k - 1]
                } else {
                    *default
                }
            }
        }
    }

    /// First index from which the sequence is constant, and that constant.
    pub(crate) fn stationary_from(&self) -> (usize, f64) {
        match self {
            PhaseSeq::Stationary { stationary } => (1, *stationary),
            PhaseSeq::Explicit { explicit, default } => (explicit.len() + 1, *default),
        }
    }
}

// --------------------------------------------------------------------------
// Tail kernel and class description
// --------------------------------------------------------------------------

/// The remainder kernel Ψ_{β̄,n}(t) = Σ_{k≥n} ψ(k) cos(kt − β_k π/2).
/// With n = 1 this is the full kernel Ψ_{β̄}.
#[derive(Debug, Clone, PartialEq)]
pub struct TailKernel {
    pub psi: SmoothnessSeq,
    pub phases: PhaseSeq,
    pub start: usize,
}

impl TailKernel {
    pub fn new(psi: SmoothnessSeq, phases: PhaseSeq, start: usize) -> Result<Self> {
        if start < 1 {
            return Err(Error::Domain("tail kernel start index must be >= 1".into()));
        }
        psi.validate()?;
        phases.validate()?;
        Ok(Self { psi, phases, start })
    }

    /// Build a reusable pointwise evaluator with certified absolute error
    /// at most `tol`.
    pub fn evaluator(&self, tol: f64) -> Result<KernelEvaluator> {
        eval::build(self, tol, 0.0)
    }

    /// Evaluator for e^{log_scale}·Ψ_{β̄,n}; `bounds` uses this to keep the
    /// working range near 1 for very smooth classes.
    pub(crate) fn evaluator_scaled(&self, tol: f64, log_scale: f64) -> Result<KernelEvaluator> {
        eval::build(self, tol, log_scale)
    }
}

/// Σ_{k≥n} ψ(k) cos(kt − β_k π/2) with absolute error ≤ tol.
pub fn eval_tail_kernel(kernel: &TailKernel, t: f64, tol: f64) -> Result<f64> {
    Ok(kernel.evaluator(tol)?.eval(t))
}

/// Target metric of the approximation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Uniform,
    Lp(Exponent),
}

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Metric::Uniform => s.serialize_str("uniform"),
            Metric::Lp(e) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("Lp", e)?;
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct MetricVisitor;
        impl<'de> Visitor<'de> for MetricVisitor {
            type Value = Metric;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("\"uniform\" or {\"Lp\": exponent}")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Metric, E> {
                match v {
                    "uniform" => Ok(Metric::Uniform),
                    other => Err(E::custom(format!("unknown metric {other:?}"))),
                }
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Metric, A::Error> {
                let key: String = map
                    .next_key()?
                    .ok_or_else(|| de::Error::custom("empty metric map"))?;
                if key != "Lp" {
                    return Err(de::Error::custom(format!("unknown metric key {key:?}")));
                }
                Ok(Metric::Lp(map.next_value()?))
            }
        }
        d.deserialize_any(MetricVisitor)
    }
}

/// A function class C^ψ_{β̄,p} together with the metric the error is
/// measured in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub psi: SmoothnessSeq,
    #[serde(rename = "beta")]
    pub phases: PhaseSeq,
    pub p: Exponent,
    pub metric: Metric,
}

impl ClassSpec {
    pub fn new(psi: SmoothnessSeq, phases: PhaseSeq, p: Exponent, metric: Metric) -> Result<Self> {
        let spec = Self {
            psi,
            phases,
            p,
            metric,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        self.psi.validate()?;
        self.phases.validate()?;
        Ok(())
    }

    /// The norm exponent dual to this class/metric pairing: q = p' for the
    /// uniform metric, q = p_target for the L_p metric on classes with
    /// p = 1 (the only L_p-metric setting in scope).
    pub fn dual_exponent(&self) -> Result<Exponent> {
        match self.metric {
            Metric::Uniform => Ok(self.p.conjugate()),
            Metric::Lp(target) => {
                if self.p != Exponent::Finite(1.0) {
                    return Err(Error::OutOfScope(
                        "L_p target metrics are supported only for classes with p = 1".into(),
                    ));
                }
                Ok(target)
            }
        }
    }

    pub fn tail_kernel(&self, n: usize) -> Result<TailKernel> {
        TailKernel::new(self.psi.clone(), self.phases.clone(), n)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("ClassSpec serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: ClassSpec =
            serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("bad class spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }
}

// --------------------------------------------------------------------------
// Trigonometric polynomials and partial sums
// --------------------------------------------------------------------------

/// Finite spectral description a₀/2 + Σ_k (a_k cos kt + b_k sin kt);
/// index k−1 holds the coefficients of frequency k.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrigPoly {
    pub a0: f64,
    pub cos_coeffs: Vec<f64>,
    pub sin_coeffs: Vec<f64>,
}

impl TrigPoly {
    pub fn degree(&self) -> usize {
        self.cos_coeffs.len().max(self.sin_coeffs.len())
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut v = 0.5 * self.a0;
        for (i, &a) in self.cos_coeffs.iter().enumerate() {
            v += a * ((i + 1) as f64 * t).cos();
        }
        for (i, &b) in self.sin_coeffs.iter().enumerate() {
            v += b * ((i + 1) as f64 * t).sin();
        }
        v
    }
}

/// Partial Fourier sum of order n−1: a₀/2 + Σ_{k<n} (a_k cos kt + b_k sin kt).
/// The sum is finite and exact.
pub fn fourier_partial_sum(coeffs: &TrigPoly, n: usize, t: f64) -> f64 {
    let mut v = 0.5 * coeffs.a0;
    for k in 1..n {
        if let Some(&a) = coeffs.cos_coeffs.get(k - 1) {
            v += a * (k as f64 * t).cos();
        }
        if let Some(&b) = coeffs.sin_coeffs.get(k - 1) {
            v += b * (k as f64 * t).sin();
        }
    }
    v
}

/// Fourier coefficients of the class member f = (1/π) ∫ φ(x−t) Ψ_{β̄}(t) dt
/// for a trigonometric-polynomial φ: frequency k of φ is scaled by ψ(k) and
/// rotated by β_k π/2.
pub fn class_member_coeffs(
    psi: &SmoothnessSeq,
    phases: &PhaseSeq,
    phi: &TrigPoly,
    upto: usize,
) -> TrigPoly {
    let deg = phi.degree().min(upto);
    let mut out = TrigPoly {
        a0: 0.0,
        cos_coeffs: vec![0.0; deg],
        sin_coeffs: vec![0.0; deg],
    };
    for k in 1..=deg {
        let a = phi.cos_coeffs.get(k - 1).copied().unwrap_or(0.0);
        let b = phi.sin_coeffs.get(k - 1).copied().unwrap_or(0.0);
        let theta = phases.phase(k) * FRAC_PI_2;
        let (s, c) = theta.sin_cos();
        let pk = psi.value(k);
        out.cos_coeffs[k - 1] = pk * (a * c - b * s);
        out.sin_coeffs[k - 1] = pk * (a * s + b * c);
    }
    out
}

// --------------------------------------------------------------------------
// Convolution
// --------------------------------------------------------------------------

/// A 2π-periodic test function φ given as an evaluation handle, with its
/// known discontinuity/kink locations and a stated sup bound.
pub struct PhiFn<'a> {
    f: &'a dyn Fn(f64) -> f64,
    breakpoints: Vec<f64>,
    sup_bound: f64,
}

impl<'a> PhiFn<'a> {
    pub fn new(f: &'a dyn Fn(f64) -> f64, sup_bound: f64) -> Self {
        Self {
            f,
            breakpoints: Vec::new(),
            sup_bound,
        }
    }

    pub fn with_breakpoints(f: &'a dyn Fn(f64) -> f64, breakpoints: Vec<f64>, sup_bound: f64) -> Self {
        Self {
            f,
            breakpoints,
            sup_bound,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut x = (t + PI).rem_euclid(2.0 * PI) - PI;
        if x == PI {
            x = -PI;
        }
        (self.f)(x)
    }
}

struct ConvIntegrand<'a, 'b> {
    kernel: &'a KernelEvaluator,
    phi: &'b PhiFn<'b>,
    x: f64,
}

impl quadrature::PeriodicFn for ConvIntegrand<'_, '_> {
    fn eval(&self, t: f64) -> f64 {
        self.phi.eval(self.x - t) * self.kernel.eval(t)
    }
    fn max_frequency(&self) -> Option<usize> {
        self.kernel.max_frequency()
    }
    fn eval_error_bound(&self) -> f64 {
        self.kernel.eval_error_bound() * self.phi.sup_bound
    }
}

/// (1/π) ∫_{−π}^{π} φ(x−t)·kernel(t) dt by adaptive quadrature, with panel
/// boundaries forced at the images of φ's breakpoints.
pub(crate) fn convolve_result(
    kernel: &KernelEvaluator,
    phi: &PhiFn<'_>,
    x: f64,
    cfg: &QuadratureConfig,
) -> Result<NormResult> {
    let integrand = ConvIntegrand { kernel, phi, x };
    let shifted: Vec<f64> = phi.breakpoints.iter().map(|b| x - b).collect();
    let res = quadrature::integrate_with_breakpoints(&integrand, &shifted, cfg)?;
    Ok(NormResult {
        value: res.value / PI,
        error_estimate: res.error_estimate / PI,
        evaluations: res.evaluations,
    })
}

/// Convolution value (1/π) ∫ φ(x−t)·kernel(t) dt with absolute error ≤ tol.
pub fn convolve_with_phi(
    kernel: &KernelEvaluator,
    phi: &PhiFn<'_>,
    x: f64,
    tol: f64,
) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol must be positive, got {tol}")));
    }
    let cfg = QuadratureConfig {
        abs_tol: tol * PI * 0.5,
        rel_tol: 1e-13,
        ..QuadratureConfig::default()
    };
    Ok(convolve_result(kernel, phi, x, &cfg)?.value)
}
