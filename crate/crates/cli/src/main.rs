//! Command-line front end: compute single worst-case error values, run the
//! verification suites, and produce sweep tables.
//!
//! Exit codes: 0 success, 1 failed verification check, 2 domain error,
//! 3 tolerance failure.

use clap::{Args, Parser, Subcommand};
use fcb_core::asymptotics::{
    convergence_regime_check, leading_high_smoothness, remainder_sweep, tail_bound_check, RRule,
    RemainderDiagnostic, BracketSetting,
};
use fcb_core::bounds::{eps_exact, eps_l2_closed_form, eps_l2_integral_form, ErrorReport};
use fcb_core::kernels::{ClassSpec, Metric, PhaseSeq, SmoothnessSeq, TailKernel};
use fcb_core::quadrature::{integrate, Exponent, QuadratureConfig};
use fcb_core::special_fn::{
    elliptic_k, elliptic_k_by_quadrature, hurwitz_zeta, hurwitz_zeta_integral, EllipticModulus,
    ZetaArgs,
};
use fcb_core::Error as CoreError;
use std::f64::consts::PI;
use std::process::ExitCode;

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_TOLERANCE: u8 = 3;

#[derive(Parser)]
#[command(name = "fcb", version, about = "Worst-case Fourier-sum errors on convolution classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute ε_n for a single (class, n) point.
    Compute(ComputeArgs),
    /// Run the verification suites (special functions, kernels, route
    /// equalities, tail chain, regime inequality, bracket sweeps).
    Verify(VerifyArgs),
    /// Sweep a (n, r) grid and emit remainder diagnostics as CSV.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ClassArgs {
    /// Power-law smoothness exponent (shorthand for --psi power:<r>)
    #[arg(long)]
    r: Option<f64>,
    /// Coefficient sequence: power:<r> or file:<path.json>
    #[arg(long)]
    psi: Option<String>,
    /// Stationary phase β
    #[arg(long, default_value_t = 0.0)]
    beta: f64,
    /// Phase sequence file: {"explicit": [...], "default": b}
    #[arg(long)]
    beta_seq: Option<String>,
    /// Class integral exponent p: a number or "inf"
    #[arg(long, default_value = "inf")]
    p: String,
    /// Error metric: "uniform" or "lp:<q>"
    #[arg(long, default_value = "uniform")]
    metric: String,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    class: ClassArgs,
    #[arg(long)]
    n: usize,
    /// Absolute tolerance override
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Output format: pretty, csv or json
    #[arg(long, default_value = "pretty")]
    out: String,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only suites whose name contains this string
    #[arg(long)]
    suite: Option<String>,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    class: ClassArgs,
    /// n range: "4" or "1..6"
    #[arg(long)]
    n: String,
    /// r values: "2.5" or "2,3,4.5" (alternative to --r-rule)
    #[arg(long)]
    r_values: Option<String>,
    /// r rule per n: "c(n+1)" (e.g. "10(n+1)") or "n^2"
    #[arg(long)]
    r_rule: Option<String>,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Output format: csv or json
    #[arg(long, default_value = "csv")]
    out: String,
}

fn exit_for(err: &CoreError) -> u8 {
    match err {
        CoreError::ToleranceNotMet { .. } | CoreError::TruncationCap(_) => EXIT_TOLERANCE,
        _ => EXIT_DOMAIN,
    }
}

fn parse_exponent(s: &str) -> Result<Exponent, CoreError> {
    if s.eq_ignore_ascii_case("inf") {
        return Ok(Exponent::Infinity);
    }
    let v: f64 = s
        .parse()
        .map_err(|_| CoreError::InvalidInput(format!("bad exponent {s:?}")))?;
    Exponent::finite(v)
}

fn parse_metric(s: &str) -> Result<Metric, CoreError> {
    if s == "uniform" {
        return Ok(Metric::Uniform);
    }
    if let Some(rest) = s.strip_prefix("lp:") {
        return Ok(Metric::Lp(parse_exponent(rest)?));
    }
    Err(CoreError::InvalidInput(format!(
        "metric must be \"uniform\" or \"lp:<q>\", got {s:?}"
    )))
}

fn parse_psi(class: &ClassArgs) -> Result<SmoothnessSeq, CoreError> {
    if let Some(spec) = &class.psi {
        if let Some(r) = spec.strip_prefix("power:") {
            let r: f64 = r
                .parse()
                .map_err(|_| CoreError::InvalidInput(format!("bad power {spec:?}")))?;
            return SmoothnessSeq::power_law(r);
        }
        if let Some(path) = spec.strip_prefix("file:") {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CoreError::InvalidInput(format!("cannot read {path}: {e}")))?;
            let seq: SmoothnessSeq = serde_json::from_str(&text)
                .map_err(|e| CoreError::InvalidInput(format!("bad psi file: {e}")))?;
            seq.validate()?;
            return Ok(seq);
        }
        return Err(CoreError::InvalidInput(format!(
            "--psi must be power:<r> or file:<path>, got {spec:?}"
        )));
    }
    match class.r {
        Some(r) => SmoothnessSeq::power_law(r),
        None => Err(CoreError::InvalidInput(
            "either --r or --psi is required".into(),
        )),
    }
}

fn parse_phases(class: &ClassArgs) -> Result<PhaseSeq, CoreError> {
    if let Some(path) = &class.beta_seq {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CoreError::InvalidInput(format!("cannot read {path}: {e}")))?;
        let seq: PhaseSeq = serde_json::from_str(&text)
            .map_err(|e| CoreError::InvalidInput(format!("bad beta file: {e}")))?;
        seq.validate()?;
        return Ok(seq);
    }
    Ok(PhaseSeq::stationary(class.beta))
}

fn parse_class(class: &ClassArgs) -> Result<ClassSpec, CoreError> {
    ClassSpec::new(
        parse_psi(class)?,
        parse_phases(class)?,
        parse_exponent(&class.p)?,
        parse_metric(&class.metric)?,
    )
}

fn parse_n_range(s: &str) -> Result<Vec<usize>, CoreError> {
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a
            .trim()
            .parse()
            .map_err(|_| CoreError::InvalidInput(format!("bad range start {a:?}")))?;
        let b: usize = b
            .trim()
            .parse()
            .map_err(|_| CoreError::InvalidInput(format!("bad range end {b:?}")))?;
        if a < 1 || b < a {
            return Err(CoreError::Domain(format!("empty or invalid n range {s:?}")));
        }
        return Ok((a..=b).collect());
    }
    let n: usize = s
        .trim()
        .parse()
        .map_err(|_| CoreError::InvalidInput(format!("bad n {s:?}")))?;
    if n < 1 {
        return Err(CoreError::Domain("n must be >= 1".into()));
    }
    Ok(vec![n])
}

fn parse_r_rule(args: &SweepArgs) -> Result<RRule, CoreError> {
    if let Some(vals) = &args.r_values {
        let mut out = Vec::new();
        for part in vals.split(',') {
            let v: f64 = part
                .trim()
                .parse()
                .map_err(|_| CoreError::InvalidInput(format!("bad r value {part:?}")))?;
            out.push(v);
        }
        if out.is_empty() {
            return Err(CoreError::Domain("empty r list".into()));
        }
        return Ok(RRule::Values(out));
    }
    let rule = args
        .r_rule
        .as_deref()
        .ok_or_else(|| CoreError::InvalidInput("either --r-values or --r-rule required".into()))?;
    let compact: String = rule.chars().filter(|c| !c.is_whitespace()).collect();
    if compact == "n^2" {
        return Ok(RRule::NSquared);
    }
    if let Some(c) = compact
        .strip_suffix("(n+1)")
        .map(|c| c.trim_end_matches('*'))
    {
        let c: f64 = if c.is_empty() { 1.0 } else {
            c.parse()
                .map_err(|_| CoreError::InvalidInput(format!("bad rule multiplier {c:?}")))?
        };
        if c < 1.0 {
            return Err(CoreError::Domain("r-rule multiplier must be >= 1".into()));
        }
        return Ok(RRule::MultipleOfNp1(c));
    }
    Err(CoreError::InvalidInput(format!(
        "r rule must be c(n+1) or n^2, got {rule:?}"
    )))
}

fn threads_from_env() -> usize {
    std::env::var("FCB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or(1)
}

fn quad_cfg(tol: f64) -> QuadratureConfig {
    QuadratureConfig {
        abs_tol: tol,
        rel_tol: (tol * 10.0).min(1e-8).max(1e-12),
        ..QuadratureConfig::default()
    }
}

// --------------------------------------------------------------------------
// compute
// --------------------------------------------------------------------------

fn cmd_compute(args: &ComputeArgs) -> Result<(), CoreError> {
    if !(args.tol > 0.0) {
        return Err(CoreError::Domain("tol must be positive".into()));
    }
    let spec = parse_class(&args.class)?;
    let cfg = quad_cfg(args.tol);
    let report = eps_exact(&spec, args.n, &cfg)?;

    // leading term of the matching high-smoothness estimate plus the implied
    // O(1) constant, when the class is a power law
    let (setting, p) = match spec.metric {
        Metric::Uniform => (BracketSetting::UniformOnWp, spec.p),
        Metric::Lp(t) => (BracketSetting::LpOnW1, t),
    };
    let detail = match (&spec.psi, report.scaled_value) {
        (SmoothnessSeq::PowerLaw { power }, Some(scaled)) => {
            let (est, in_hyp) = leading_high_smoothness(args.n, *power, p, setting, &cfg)?;
            let implied = (scaled - est.bracket_leading) / est.bracket_scale;
            Some((est, implied, in_hyp))
        }
        _ => None,
    };

    match args.out.as_str() {
        "pretty" => {
            println!("eps_n           = {:.16e}", report.value);
            if let Some(s) = report.scaled_value {
                println!("n^r * eps_n     = {s:.16e}");
            }
            if let Some((est, implied, in_hyp)) = &detail {
                println!("leading (n^r x) = {:.16e}", est.bracket_leading);
                println!("implied O(1)    = {implied:.6e}");
                if !*in_hyp {
                    println!("note: outside the r >= n+1 hypothesis");
                }
            }
            println!("method          = {}", report.method);
            println!("quad error est  = {:.3e}", report.quadrature_error);
        }
        "csv" => {
            println!("{},leading,implied_O1", ErrorReport::CSV_HEADER);
            let (lead, implied) = detail
                .as_ref()
                .map(|(e, i, _)| (format!("{:.16e}", e.bracket_leading), format!("{i:.16e}")))
                .unwrap_or_else(|| ("-".into(), "-".into()));
            println!("{},{},{}", report.to_csv_row(), lead, implied);
        }
        "json" => {
            let mut obj = serde_json::to_value(&report)
                .map_err(|e| CoreError::InvalidInput(e.to_string()))?;
            if let Some((est, implied, in_hyp)) = &detail {
                obj["leading_scaled"] = est.bracket_leading.into();
                obj["implied_o1"] = (*implied).into();
                obj["in_hypothesis"] = (*in_hyp).into();
            }
            println!("{obj}");
        }
        other => {
            return Err(CoreError::InvalidInput(format!(
                "unknown output format {other:?}"
            )))
        }
    }
    Ok(())
}

// --------------------------------------------------------------------------
// verify
// --------------------------------------------------------------------------

struct Check {
    suite: &'static str,
    name: &'static str,
    run: Box<dyn Fn(f64) -> Result<(bool, String), CoreError>>,
}

fn verify_checks() -> Vec<Check> {
    let mut checks: Vec<Check> = Vec::new();

    checks.push(Check {
        suite: "special",
        name: "elliptic AGM vs quadrature",
        run: Box::new(|tol| {
            let mut worst = 0.0f64;
            let mut grid: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
            grid.push(0.99);
            for q in grid {
                let m = EllipticModulus::new(q)?;
                let a = elliptic_k(m, tol)?;
                let b = elliptic_k_by_quadrature(m, (tol * 10.0).max(1e-11))?;
                worst = worst.max((a - b).abs());
            }
            Ok((worst <= 1e-10, format!("worst gap {worst:.2e}")))
        }),
    });

    checks.push(Check {
        suite: "special",
        name: "hurwitz zeta series vs integral",
        run: Box::new(|tol| {
            let mut worst = 0.0f64;
            for &s in &[1.5, 2.0, 6.0, 12.0, 25.0] {
                for &l in &[1.0, 2.0, 8.0] {
                    let args = ZetaArgs::new(s, l)?;
                    let a = hurwitz_zeta(args, tol)?;
                    let b = hurwitz_zeta_integral(args, tol)?;
                    worst = worst.max((a - b).abs());
                }
            }
            Ok((worst <= 1e-10, format!("worst gap {worst:.2e}")))
        }),
    });

    checks.push(Check {
        suite: "special",
        name: "zeta classical values",
        run: Box::new(|tol| {
            let z2 = hurwitz_zeta(ZetaArgs::new(2.0, 1.0)?, tol)?;
            let z4 = hurwitz_zeta(ZetaArgs::new(4.0, 1.0)?, tol)?;
            let gap = (z2 - PI * PI / 6.0).abs().max((z4 - PI.powi(4) / 90.0).abs());
            Ok((gap <= 1e-12, format!("gap {gap:.2e}")))
        }),
    });

    checks.push(Check {
        suite: "kernels",
        name: "tail kernel zero mean",
        run: Box::new(|tol| {
            let kernel = TailKernel::new(
                SmoothnessSeq::power_law(2.5)?,
                PhaseSeq::stationary(0.3),
                2,
            )?;
            let ev = kernel.evaluator(tol.max(1e-13))?;
            let m = integrate(&ev, &quad_cfg(tol.max(1e-11)))?;
            Ok((m.value.abs() <= 1e-9, format!("mean {:.2e}", m.value)))
        }),
    });

    checks.push(Check {
        suite: "kernels",
        name: "kernel parity",
        run: Box::new(|tol| {
            let even = TailKernel::new(SmoothnessSeq::power_law(3.0)?, PhaseSeq::stationary(0.0), 1)?
                .evaluator(tol.max(1e-12))?;
            let odd = TailKernel::new(SmoothnessSeq::power_law(3.0)?, PhaseSeq::stationary(1.0), 1)?
                .evaluator(tol.max(1e-12))?;
            let mut worst = 0.0f64;
            for i in 1..40 {
                let t = i as f64 * 0.078;
                worst = worst.max((even.eval(t) - even.eval(-t)).abs());
                worst = worst.max((odd.eval(t) + odd.eval(-t)).abs());
            }
            Ok((worst <= 1e-10, format!("worst asymmetry {worst:.2e}")))
        }),
    });

    checks.push(Check {
        suite: "l2routes",
        name: "p=2 route equality",
        run: Box::new(|tol| {
            let cfg = quad_cfg(tol.max(1e-12));
            let mut worst = 0.0f64;
            for &r in &[1.0, 2.0, 4.0] {
                for &n in &[1usize, 3] {
                    let spec = ClassSpec::new(
                        SmoothnessSeq::power_law(r)?,
                        PhaseSeq::stationary(0.0),
                        Exponent::Finite(2.0),
                        Metric::Uniform,
                    )?;
                    let a = eps_exact(&spec, n, &cfg)?.value;
                    let b = eps_l2_closed_form(r, n)?;
                    let c = eps_l2_integral_form(r, n, tol.max(1e-11))?;
                    worst = worst.max((a - b).abs()).max((a - c).abs());
                }
            }
            Ok((worst <= 1e-9, format!("worst gap {worst:.2e}")))
        }),
    });

    checks.push(Check {
        suite: "tailchain",
        name: "tail-sum inequality chain",
        run: Box::new(|tol| {
            for n in 1..=10usize {
                for r in [n as f64 + 1.0, n as f64 + 2.0, 2.0 * n as f64 + 2.0] {
                    let c = tail_bound_check(n, r, tol.max(1e-13))?;
                    if !c.holds {
                        return Ok((false, format!("chain fails at n={n}, r={r}")));
                    }
                }
            }
            Ok((true, "30 grid points".into()))
        }),
    });

    checks.push(Check {
        suite: "regime",
        name: "regime inequality",
        run: Box::new(|_tol| {
            for n in 1..=50usize {
                for &r in &[1.0, 2.0, 5.0, 10.0, 100.0] {
                    if !convergence_regime_check(n, r)?.holds {
                        return Ok((false, format!("fails at n={n}, r={r}")));
                    }
                }
            }
            Ok((true, "250 grid points".into()))
        }),
    });

    checks.push(Check {
        suite: "bracket",
        name: "high-smoothness bracket sweep",
        run: Box::new(|tol| {
            let cfg = quad_cfg(tol.max(1e-10));
            let ns: Vec<usize> = (1..=4).collect();
            let mut k_all = 0.0f64;
            let mut k_p2 = 0.0f64;
            for p in [Exponent::Finite(2.0), Exponent::Infinity] {
                for c in [2.0, 5.0] {
                    let s = remainder_sweep(
                        BracketSetting::UniformOnWp,
                        &ns,
                        &RRule::MultipleOfNp1(c),
                        p,
                        0.0,
                        &cfg,
                        threads_from_env(),
                    )?;
                    k_all = k_all.max(s.max_abs_o1);
                    if p == Exponent::Finite(2.0) {
                        k_p2 = k_p2.max(s.max_abs_o1);
                    }
                }
            }
            Ok((
                k_p2 <= 3.0 && k_all.is_finite(),
                format!("K = {k_all:.3}, p2 component {k_p2:.3}"),
            ))
        }),
    });

    checks
}

fn cmd_verify(args: &VerifyArgs) -> Result<bool, CoreError> {
    if !(args.tol > 0.0) {
        return Err(CoreError::Domain("tol must be positive".into()));
    }
    let mut all_pass = true;
    let mut ran = 0usize;
    for check in verify_checks() {
        if let Some(filter) = &args.suite {
            if !check.suite.contains(filter.as_str()) && !check.name.contains(filter.as_str()) {
                continue;
            }
        }
        ran += 1;
        let (ok, detail) = (check.run)(args.tol)?;
        all_pass &= ok;
        println!(
            "{} [{}] {}: {}",
            if ok { "PASS" } else { "FAIL" },
            check.suite,
            check.name,
            detail
        );
    }
    if ran == 0 {
        return Err(CoreError::InvalidInput(format!(
            "no suite matches {:?}",
            args.suite
        )));
    }
    Ok(all_pass)
}

// --------------------------------------------------------------------------
// sweep
// --------------------------------------------------------------------------

fn cmd_sweep(args: &SweepArgs) -> Result<(), CoreError> {
    let ns = parse_n_range(&args.n)?;
    let rule = parse_r_rule(args)?;
    let p = parse_exponent(&args.class.p)?;
    let metric = parse_metric(&args.class.metric)?;
    let (setting, target_p) = match metric {
        Metric::Uniform => (BracketSetting::UniformOnWp, p),
        Metric::Lp(t) => (BracketSetting::LpOnW1, t),
    };
    let cfg = quad_cfg(args.tol);
    let result = remainder_sweep(
        setting,
        &ns,
        &rule,
        target_p,
        args.class.beta,
        &cfg,
        threads_from_env(),
    )?;
    match args.out.as_str() {
        "csv" => {
            println!("{}", RemainderDiagnostic::CSV_HEADER);
            for d in &result.diagnostics {
                println!("{}", d.to_csv_row());
            }
            println!("# max_abs_implied_O1 = {:.16e}", result.max_abs_o1);
            println!(
                "# max_abs_telyakovskii_O1 = {:.16e}",
                result.max_abs_telyakovskii_o1
            );
        }
        "json" => {
            let s = serde_json::to_string_pretty(&result)
                .map_err(|e| CoreError::InvalidInput(e.to_string()))?;
            println!("{s}");
        }
        other => {
            return Err(CoreError::InvalidInput(format!(
                "unknown output format {other:?}"
            )))
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Compute(args) => cmd_compute(args).map(|_| true),
        Command::Verify(args) => cmd_verify(args),
        Command::Sweep(args) => cmd_sweep(args).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
