//! Asymptotic formulas for ε_n and remainder-constant diagnostics.
//!
//! Each evaluator returns both the raw leading term/remainder scale and
//! their n^r-normalized ("bracket") counterparts, which stay finite in the
//! deep-smoothness regime where n^{-r} underflows. Remainder sweeps compare
//! the formulas against the exact values from [`crate::bounds`] and measure
//! the implied uniformly-bounded constants.

use crate::bounds::{self, ErrorReport};
use crate::kernels::{ClassSpec, Metric, PhaseSeq, SmoothnessSeq};
use crate::quadrature::{cos_norm, Exponent, QuadratureConfig};
use crate::special_fn::{elliptic_k, EllipticModulus};
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;

/// Which displayed estimate an [`AsymptoticEstimate`] instantiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FormulaId {
    KolmogorovLog,
    NikolskiiLogL1,
    StechkinElliptic,
    StechkinHighSmoothness,
    StechkinEllipticL1,
    StechkinHighSmoothnessL1,
    HighSmoothnessUniform,
    HighSmoothnessL1,
    HighSmoothnessL2,
}

/// A leading term with the magnitude multiplying its O(1) remainder.
/// `bracket_*` are the n^r-normalized counterparts.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AsymptoticEstimate {
    pub formula: FormulaId,
    pub leading: f64,
    pub remainder_scale: f64,
    pub bracket_leading: f64,
    pub bracket_scale: f64,
}

/// The classical logarithmic estimate (4/π²)·ln n / n^r + O(1/n^r),
/// identical in the uniform and the L₁ settings.
pub fn leading_kolmogorov(n: usize, r: f64) -> Result<AsymptoticEstimate> {
    if n < 2 {
        return Err(Error::Domain(
            "the log asymptotic needs n >= 2 (ln 1 = 0 makes it vacuous)".into(),
        ));
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("r must be positive, got {r}")));
    }
    let nf = n as f64;
    let n_pow = (-r * nf.ln()).exp();
    let bracket_leading = 4.0 / (PI * PI) * nf.ln();
    Ok(AsymptoticEstimate {
        formula: FormulaId::KolmogorovLog,
        leading: bracket_leading * n_pow,
        remainder_scale: n_pow,
        bracket_leading,
        bracket_scale: 1.0,
    })
}

/// Stechkin's elliptic estimate n^{-r}·((8/π²)·K(e^{-r/n}) + O(1)/r),
/// r ≥ 1; the same display serves the uniform (`StechkinElliptic`) and L₁
/// (`StechkinEllipticL1`) settings.
pub fn leading_stechkin_elliptic(n: usize, r: f64, l1_setting: bool) -> Result<AsymptoticEstimate> {
    if n < 1 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    if !(r >= 1.0) {
        return Err(Error::Domain(format!(
            "the elliptic estimate requires r >= 1, got {r}"
        )));
    }
    let nf = n as f64;
    let q = EllipticModulus::new((-r / nf).exp())?;
    let k = elliptic_k(q, 1e-13)?;
    let n_pow = (-r * nf.ln()).exp();
    let bracket_leading = 8.0 / (PI * PI) * k;
    Ok(AsymptoticEstimate {
        formula: if l1_setting {
            FormulaId::StechkinEllipticL1
        } else {
            FormulaId::StechkinElliptic
        },
        leading: bracket_leading * n_pow,
        remainder_scale: n_pow / r,
        bracket_leading,
        bracket_scale: 1.0 / r,
    })
}

/// The two settings of the high-smoothness estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BracketSetting {
    /// ε_n(W^r_{β̄,p})_C = n^{-r}(‖cos‖_{p'}/π + O(1)(1+1/n)^{-r})
    UniformOnWp,
    /// ε_n(W^r_{β̄,1})_{L_p} = n^{-r}(‖cos‖_p/π + O(1)(1+1/n)^{-r})
    LpOnW1,
}

fn bracket_formula_id(p: Exponent, setting: BracketSetting) -> FormulaId {
    match (setting, p) {
        (_, Exponent::Finite(v)) if v == 2.0 => FormulaId::HighSmoothnessL2,
        (BracketSetting::UniformOnWp, Exponent::Infinity) => FormulaId::StechkinHighSmoothness,
        (BracketSetting::LpOnW1, Exponent::Finite(v)) if v == 1.0 => FormulaId::StechkinHighSmoothnessL1,
        (BracketSetting::UniformOnWp, _) => FormulaId::HighSmoothnessUniform,
        (BracketSetting::LpOnW1, _) => FormulaId::HighSmoothnessL1,
    }
}

/// High-smoothness leading term n^{-r}·‖cos‖_q/π with remainder scale
/// n^{-r}(1+1/n)^{-r}. Returns the estimate and whether the hypothesis
/// r ≥ n+1 holds (the value is still produced outside it, flagged).
pub fn leading_high_smoothness(
    n: usize,
    r: f64,
    p: Exponent,
    setting: BracketSetting,
    cfg: &QuadratureConfig,
) -> Result<(AsymptoticEstimate, bool)> {
    if n < 1 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("r must be positive, got {r}")));
    }
    let q = match setting {
        BracketSetting::UniformOnWp => p.conjugate(),
        BracketSetting::LpOnW1 => p,
    };
    let nf = n as f64;
    let n_pow = (-r * nf.ln()).exp();
    let bracket_leading = cos_norm(q, cfg)? / PI;
    let bracket_scale = (-r * (1.0 + 1.0 / nf).ln()).exp();
    Ok((
        AsymptoticEstimate {
            formula: bracket_formula_id(p, setting),
            leading: bracket_leading * n_pow,
            remainder_scale: n_pow * bracket_scale,
            bracket_leading,
            bracket_scale,
        },
        r >= nf + 1.0,
    ))
}

/// The tail inequality chain certifying the bracket constant 3:
/// Σ_{k>n} k^{-r} < (n+1)^{-r}(r+n)/(r−1)
///                ≤ n^{-r}(1+1/n)^{-r}(2r−1)/(r−1)
///                ≤ n^{-r}(1+1/n)^{-r}(2+1/n)
///                ≤ 3·n^{-r}(1+1/n)^{-r}.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailBoundCheck {
    pub lhs: f64,
    pub chain: [f64; 3],
    pub rhs: f64,
    pub holds: bool,
}

/// Evaluates the chain at (n, r); requires the hypothesis r ≥ n+1 under
/// which the middle comparison is valid.
pub fn tail_bound_check(n: usize, r: f64, tol: f64) -> Result<TailBoundCheck> {
    if n < 1 {
        return Err(Error::Domain("n must be >= 1".into()));
    }
    if !(r >= n as f64 + 1.0) {
        return Err(Error::Domain(format!(
            "the chain requires r >= n+1, got n={n}, r={r}"
        )));
    }
    let nf = n as f64;
    let lhs = bounds::tail_sum_power(r, n, tol)?;
    let np_pow = (-(r) * (nf + 1.0).ln()).exp(); // (n+1)^{-r}
    let q1 = np_pow * (r + nf) / (r - 1.0);
    // (n+1)^{-r} = n^{-r}(1+1/n)^{-r} exactly; keep that form for the rest
    let q2 = np_pow * (2.0 * r - 1.0) / (r - 1.0);
    let q3 = np_pow * (2.0 + 1.0 / nf);
    let rhs = 3.0 * np_pow;
    let holds = lhs < q1 && q1 <= q2 * (1.0 + 1e-15) && q2 <= q3 * (1.0 + 1e-15) && q3 <= rhs && lhs < rhs;
    Ok(TailBoundCheck {
        lhs,
        chain: [q1, q2, q3],
        rhs,
        holds,
    })
}

/// Both sides of (1+1/n)^{-r} ≤ e^{-r/(n+1)}.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RegimeCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn convergence_regime_check(n: usize, r: f64) -> Result<RegimeCheck> {
    if n < 1 || !(r > 0.0) {
        return Err(Error::Domain(format!(
            "convergence check needs n >= 1 and r > 0, got n={n}, r={r}"
        )));
    }
    let nf = n as f64;
    let lhs = (-r * (1.0 + 1.0 / nf).ln()).exp();
    let rhs = (-r / (nf + 1.0)).exp();
    Ok(RegimeCheck {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-15),
    })
}

// --------------------------------------------------------------------------
// Remainder sweeps
// --------------------------------------------------------------------------

/// Rule producing the r values swept at each n.
#[derive(Debug, Clone)]
pub enum RRule {
    /// r = c·(n+1)
    MultipleOfNp1(f64),
    /// fixed list of r values used for every n
    Values(Vec<f64>),
    /// r = n²
    NSquared,
}

impl RRule {
    fn r_values(&self, n: usize) -> Vec<f64> {
        match self {
            RRule::MultipleOfNp1(c) => vec![c * (n as f64 + 1.0)],
            RRule::Values(v) => v.clone(),
            RRule::NSquared => vec![(n * n) as f64],
        }
    }
}

/// One grid point of a remainder sweep. `exact` and `leading` are the
/// n^r-normalized quantities; `implied_o1 = (exact − leading)/remainder_scale`
/// with the bracket-level scale (1+1/n)^{-r}, and the Telyakovskii variant
/// re-divides by (1+2/n)^{-r}.
#[derive(Debug, Clone, Serialize)]
pub struct RemainderDiagnostic {
    pub setting: BracketSetting,
    pub n: usize,
    pub r: f64,
    pub p: Exponent,
    pub q: Exponent,
    pub exact: f64,
    pub leading: f64,
    pub remainder_scale: f64,
    pub implied_o1: f64,
    pub telyakovskii_o1: f64,
    pub in_hypothesis: bool,
}

impl RemainderDiagnostic {
    pub const CSV_HEADER: &'static str =
        "setting,n,r,p,q,exact,leading,remainder_scale,implied_O1";

    pub fn to_csv_row(&self) -> String {
        let setting = match self.setting {
            BracketSetting::UniformOnWp => "uniform",
            BracketSetting::LpOnW1 => "l1-class",
        };
        format!(
            "{},{},{},{},{},{:.16e},{:.16e},{:.16e},{:.16e}",
            setting, self.n, self.r, self.p, self.q, self.exact, self.leading,
            self.remainder_scale, self.implied_o1
        )
    }
}

/// Sweep summary: every diagnostic in deterministic (n, r) order plus the
/// running maxima of the measured constants.
#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub diagnostics: Vec<RemainderDiagnostic>,
    pub max_abs_o1: f64,
    pub max_abs_telyakovskii_o1: f64,
}

fn class_for(setting: BracketSetting, r: f64, p: Exponent, beta: f64) -> Result<ClassSpec> {
    let psi = SmoothnessSeq::power_law(r)?;
    let phases = PhaseSeq::stationary(beta);
    match setting {
        BracketSetting::UniformOnWp => ClassSpec::new(psi, phases, p, Metric::Uniform),
        BracketSetting::LpOnW1 => ClassSpec::new(psi, phases, Exponent::Finite(1.0), Metric::Lp(p)),
    }
}

/// Computes exact ε_n over the grid, subtracts the high-smoothness leading term
/// and divides by the remainder scale. Grid points run in parallel on up to
/// `threads` workers; results are ordered by (n, r) regardless.
pub fn remainder_sweep(
    setting: BracketSetting,
    ns: &[usize],
    rule: &RRule,
    p: Exponent,
    beta: f64,
    cfg: &QuadratureConfig,
    threads: usize,
) -> Result<SweepResult> {
    let mut grid: Vec<(usize, f64)> = Vec::new();
    for &n in ns {
        for r in rule.r_values(n) {
            grid.push((n, r));
        }
    }
    if grid.is_empty() {
        return Err(Error::Domain("empty sweep grid".into()));
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let jobs: Vec<_> = grid
        .iter()
        .map(|&(n, r)| {
            let cfg = cfg.clone();
            move || -> Result<RemainderDiagnostic> {
                let spec = class_for(setting, r, p, beta)?;
                let q = spec.dual_exponent()?;
                let report: ErrorReport = bounds::eps_exact(&spec, n, &cfg)?;
                let exact = report.scaled_value.ok_or_else(|| {
                    Error::Domain("remainder sweeps need power-law classes".into())
                })?;
                let (est, in_hyp) = leading_high_smoothness(n, r, p, setting, &cfg)?;
                let nf = n as f64;
                let tely_scale = (-r * (1.0 + 2.0 / nf).ln()).exp();
                let implied = (exact - est.bracket_leading) / est.bracket_scale;
                Ok(RemainderDiagnostic {
                    setting,
                    n,
                    r,
                    p,
                    q,
                    exact,
                    leading: est.bracket_leading,
                    remainder_scale: est.bracket_scale,
                    implied_o1: implied,
                    telyakovskii_o1: (exact - est.bracket_leading) / tely_scale,
                    in_hypothesis: in_hyp,
                })
            }
        })
        .collect();

    let results = run_parallel(jobs, threads.max(1));
    let mut diagnostics = Vec::with_capacity(results.len());
    for r in results {
        diagnostics.push(r?);
    }
    let max_abs_o1 = diagnostics
        .iter()
        .map(|d| d.implied_o1.abs())
        .fold(0.0, f64::max);
    let max_abs_telyakovskii_o1 = diagnostics
        .iter()
        .map(|d| d.telyakovskii_o1.abs())
        .fold(0.0, f64::max);
    Ok(SweepResult {
        diagnostics,
        max_abs_o1,
        max_abs_telyakovskii_o1,
    })
}

/// Index-stealing parallel map over FnOnce jobs with plain scoped threads;
/// output order matches input order.
pub(crate) fn run_parallel<T, F>(jobs: Vec<F>, threads: usize) -> Vec<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    if threads <= 1 || jobs.len() <= 1 {
        return jobs.into_iter().map(|j| j()).collect();
    }
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;
    let slots: Vec<Mutex<Option<F>>> = jobs.into_iter().map(|j| Mutex::new(Some(j))).collect();
    let out: Vec<Mutex<Option<T>>> = slots.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    std::thread::scope(|scope| {
        for _ in 0..threads.min(slots.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= slots.len() {
                    break;
                }
                let job = slots[i].lock().unwrap().take().unwrap();
                *out[i].lock().unwrap() = Some(job());
            });
        }
    });
    out.into_iter()
        .map(|m| m.into_inner().unwrap().unwrap())
        .collect()
}
