//! Command-line front end: argument parsing, validation into a
//! [`RunConfig`], dispatch, and JSON / table reports.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::algebra::RationalFunction;
use crate::analytic::{
    lattice::period_lattice_with_tol, regularized_integral, CurvePoint, NumericOptions, PeriodLattice,
    RegularizationOptions, RegularizedValue, WeierstrassCurveC, C64,
};
use crate::arith::{format_rational, parse_rational, to_f64, LogCombination};
use crate::degeneration::{geometric_t_sequence, CornerOptions, LmhsCorner, NodalFamily};
use crate::error::{Error, Result};
use crate::global::{
    compatible_function, describe, verify_main_theorem, CompatibleOptions, GlobalCurve, HeightReport, ReportTerm,
};
use crate::nonarch::{EllipticCurveQ, NonarchContext, NonarchTerm, RationalPoint};

#[derive(Debug, Parser)]
#[command(name = "lmhs", version, about = "Biextension heights, regularized Néron pairings and their verification")]
pub struct Cli {
    #[command(flatten)]
    pub flags: Flags,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Flags {
    /// Target accuracy of each adaptive quadrature.
    #[arg(long, global = true, default_value_t = 1e-12)]
    pub quad_eps: f64,
    /// Tolerance on real parts that must vanish.
    #[arg(long, global = true, default_value_t = crate::mhs::DEFAULT_IM_TOL)]
    pub im_tol: f64,
    /// Largest accepted residual for exit status 0.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub residual_tol: f64,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for randomized auxiliary choices.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    pub json: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
}

#[derive(Debug, Clone, Args)]
pub struct PairArgs {
    /// Curve `[a1,a2,a3,a4,a6]`.
    #[arg(long)]
    pub curve: String,
    /// Point `x,y` or `inf`.
    #[arg(long = "P")]
    pub p: String,
    #[arg(long = "Q")]
    pub q: String,
    /// Local coordinate at P, a rational expression in x, y.
    #[arg(long)]
    pub u: String,
    /// Local coordinate at Q.
    #[arg(long)]
    pub v: String,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Period lattice of the invariant differential.
    Periods {
        /// Curve `[a1,a2,a3,a4,a6]`; entries rational or `(re,im)`.
        #[arg(long)]
        curve: String,
    },
    /// Archimedean regularized pairing `⟨P − Q, P − Q⟩_{ξ,∞}`.
    RegularizedArch {
        #[command(flatten)]
        pair: PairArgs,
    },
    /// Exact non-Archimedean regularized pairings, prime by prime.
    Nonarch {
        #[command(flatten)]
        pair: PairArgs,
        /// Restrict to one prime.
        #[arg(long)]
        prime: Option<String>,
    },
    /// Limit corner period of a nodal family `y² = q(x) + κ·t`.
    LmhsLimit {
        #[arg(long)]
        family: String,
        #[arg(long, default_value = "1")]
        kappa: String,
        #[arg(long, default_value_t = 1e-8)]
        tmin: f64,
        #[arg(long, default_value_t = 1e-2)]
        tmax: f64,
        #[arg(long, default_value_t = 7)]
        steps: usize,
    },
    /// Canonical height of `P − Q` against the sum of regularized pairings.
    Verify {
        #[command(flatten)]
        pair: PairArgs,
    },
}

/// A validated request.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub flags: Flags,
    pub job: Job,
}

#[derive(Debug, Clone)]
pub struct PairInput {
    pub curve: EllipticCurveQ,
    pub p: RationalPoint,
    pub q: RationalPoint,
    pub u: RationalFunction,
    pub v: RationalFunction,
}

#[derive(Debug, Clone)]
pub enum Job {
    Periods { curve: WeierstrassCurveC },
    RegularizedArch { curve: WeierstrassCurveC, p: CurvePoint, q: CurvePoint, u: RationalFunction, v: RationalFunction },
    Nonarch { input: PairInput, prime: Option<BigInt> },
    LmhsLimit { spec: String, family: NodalFamily, ts: Vec<f64> },
    Verify { input: PairInput },
}

fn split_top_level(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur.clear();
                continue;
            }
            _ => {}
        }
        cur.push(ch);
    }
    out.push(cur.trim().to_string());
    out
}

/// A real or complex number: a rational, a decimal, or `(re,im)`.
fn parse_number(s: &str, field: &str) -> Result<C64> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let parts = split_top_level(inner);
        if parts.len() != 2 {
            return Err(Error::parse(field, format!("expected (re,im), got {s:?}")));
        }
        return Ok(C64::new(parse_number(&parts[0], field)?.re, parse_number(&parts[1], field)?.re));
    }
    if let Ok(r) = parse_rational(s) {
        return Ok(C64::new(to_f64(&r), 0.0));
    }
    s.parse::<f64>()
        .map(|x| C64::new(x, 0.0))
        .map_err(|_| Error::parse(field, format!("not a number: {s:?}")))
}

/// Curve spec with rational, decimal or complex entries.
pub fn parse_complex_curve(s: &str) -> Result<WeierstrassCurveC> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::parse("curve", "expected [a1,a2,a3,a4,a6]"))?;
    let parts = split_top_level(inner);
    if parts.len() != 5 {
        return Err(Error::parse("curve", format!("expected 5 coefficients, got {}", parts.len())));
    }
    let mut a = [C64::new(0.0, 0.0); 5];
    for (k, p) in parts.iter().enumerate() {
        a[k] = parse_number(p, "curve")?;
    }
    WeierstrassCurveC::new(a)
}

fn parse_complex_point(s: &str, field: &str) -> Result<CurvePoint> {
    let t = s.trim();
    if matches!(t, "inf" | "infinity" | "O") {
        return Ok(CurvePoint::Infinity);
    }
    let parts = split_top_level(t);
    if parts.len() != 2 {
        return Err(Error::parse(field, format!("expected \"x,y\" or \"inf\", got {s:?}")));
    }
    Ok(CurvePoint::affine(parse_number(&parts[0], field)?, parse_number(&parts[1], field)?))
}

fn named<T>(r: Result<T>, field: &str) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { message, .. } => Error::parse(field, message),
        other => other,
    })
}

impl PairArgs {
    fn validate(&self) -> Result<PairInput> {
        let curve = named(EllipticCurveQ::parse(&self.curve), "curve")?;
        let p = named(RationalPoint::parse(&self.p), "P")?;
        let q = named(RationalPoint::parse(&self.q), "Q")?;
        let u = named(RationalFunction::parse(&self.u), "u")?;
        let v = named(RationalFunction::parse(&self.v), "v")?;
        curve.require(&p).map_err(|_| Error::parse("P", format!("{p} is not on the curve")))?;
        curve.require(&q).map_err(|_| Error::parse("Q", format!("{q} is not on the curve")))?;
        if p == q {
            return Err(Error::parse("Q", "P and Q must differ"));
        }
        Ok(PairInput { curve, p, q, u, v })
    }
}

impl RunConfig {
    /// Parses and validates every input before any computation.
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let flags = cli.flags;
        for (name, x) in [("quad-eps", flags.quad_eps), ("im-tol", flags.im_tol), ("residual-tol", flags.residual_tol)] {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::parse(name, "must be a positive number"));
            }
        }
        if flags.threads == Some(0) {
            return Err(Error::parse("threads", "must be at least 1"));
        }
        let job = match cli.command {
            Command::Periods { curve } => Job::Periods { curve: parse_complex_curve(&curve)? },
            Command::RegularizedArch { pair } => {
                let curve = parse_complex_curve(&pair.curve)?;
                let p = parse_complex_point(&pair.p, "P")?;
                let q = parse_complex_point(&pair.q, "Q")?;
                for (name, pt) in [("P", &p), ("Q", &q)] {
                    if !curve.contains(pt) {
                        return Err(Error::parse(name, "point is not on the curve"));
                    }
                }
                let u = named(RationalFunction::parse(&pair.u), "u")?;
                let v = named(RationalFunction::parse(&pair.v), "v")?;
                Job::RegularizedArch { curve, p, q, u, v }
            }
            Command::Nonarch { pair, prime } => {
                let prime = match prime {
                    None => None,
                    Some(s) => {
                        let p: BigInt = s.trim().parse().map_err(|_| Error::parse("prime", format!("not an integer: {s:?}")))?;
                        if !crate::arith::is_prime(&p) {
                            return Err(Error::parse("prime", format!("{p} is not prime")));
                        }
                        Some(p)
                    }
                };
                Job::Nonarch { input: pair.validate()?, prime }
            }
            Command::LmhsLimit { family, kappa, tmin, tmax, steps } => {
                let kappa = named(parse_rational(&kappa), "kappa")?;
                let spec = family.trim().to_string();
                let family = named(NodalFamily::parse(&spec), "family")?.with_kappa(kappa)?;
                let ts = geometric_t_sequence(tmin, tmax, steps).map_err(|e| Error::parse("tmin/tmax/steps", e.to_string()))?;
                Job::LmhsLimit { spec, family, ts }
            }
            Command::Verify { pair } => Job::Verify { input: pair.validate()? },
        };
        Ok(RunConfig { flags, job })
    }

    fn regularization(&self) -> RegularizationOptions {
        RegularizationOptions {
            numeric: NumericOptions { quad_eps: self.flags.quad_eps, im_tol: self.flags.im_tol },
            ..RegularizationOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodsReport {
    pub omega1: C64,
    pub omega2: C64,
    pub tau: C64,
    /// Change of the periods when the quadrature tolerance is relaxed 100-fold.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizedArchReport {
    pub value: f64,
    pub error: f64,
    pub order: usize,
    pub samples: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonarchReport {
    pub primes: Vec<String>,
    pub terms: Vec<NonarchTerm>,
    pub total: LogCombination,
    pub total_exact: String,
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LmhsLimitReport {
    pub family: String,
    pub kappa: String,
    pub corner: LmhsCorner,
    /// `hgt(L_χ) = Re I_χ` from the limit period matrix.
    pub height: ReportTerm,
    /// Closed-form value on the normalization.
    pub closed_form: ReportTerm,
    pub residual: ReportTerm,
}

/// Cross-check of the regularized pairings by a compatible function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompatibleCheck {
    pub seed: u64,
    pub r: String,
    pub s: String,
    pub a: String,
    pub b: String,
    pub archimedean: ReportTerm,
    pub finite: ReportTerm,
    pub total: ReportTerm,
    /// Difference from the sum of regularized pairings.
    pub difference: ReportTerm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub report: HeightReport,
    pub compatible: CompatibleCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Report {
    Periods(PeriodsReport),
    RegularizedArch(RegularizedArchReport),
    Nonarch(NonarchReport),
    LmhsLimit(LmhsLimitReport),
    Verify(VerifyReport),
}

/// Result of a run: the report and whether every residual is within
/// tolerance.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub within_tolerance: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.within_tolerance {
            0
        } else {
            1
        }
    }
}

fn c64(z: C64) -> String {
    format!("{:.15} {:+.15}i", z.re, z.im)
}

fn term_row(out: &mut String, name: &str, t: &ReportTerm) {
    let _ = writeln!(out, "{name:<24} {:>22.15} {:>10.2e}  {}", t.value, t.error, t.exact.as_deref().unwrap_or(""));
}

impl Report {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::parse("report", e.to_string()))
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        match self {
            Report::Periods(r) => {
                let _ = writeln!(out, "omega1  {}", c64(r.omega1));
                let _ = writeln!(out, "omega2  {}", c64(r.omega2));
                let _ = writeln!(out, "tau     {}", c64(r.tau));
                let _ = writeln!(out, "error   {:.2e}", r.error);
            }
            Report::RegularizedArch(r) => {
                let _ = writeln!(out, "{:>12} {:>24}", "epsilon", "F(epsilon)");
                for (h, f) in &r.samples {
                    let _ = writeln!(out, "{h:>12.4e} {f:>24.15}");
                }
                let _ = writeln!(out, "limit {:.15}  error {:.2e}  order {}", r.value, r.error, r.order);
            }
            Report::Nonarch(r) => {
                let _ = writeln!(out, "{:<8} {:<6} {:>8} {:>6} {:>10} {:>12} {:>22}", "prime", "type", "val_chi", "iota", "phi", "coefficient", "value");
                for t in &r.terms {
                    let _ = writeln!(
                        out,
                        "{:<8} {:<6} {:>8} {:>6} {:>10} {:>12} {:>22.15}",
                        t.prime.to_string(),
                        t.kodaira.to_string(),
                        t.val_chi,
                        t.intersection,
                        format_rational(&t.phi),
                        format_rational(&t.coefficient),
                        t.value
                    );
                }
                let _ = writeln!(out, "total {} = {:.15}", r.total_exact, r.value);
            }
            Report::LmhsLimit(r) => {
                let _ = writeln!(out, "family {}  kappa {}", r.family, r.kappa);
                let _ = writeln!(out, "{:>12} {:>24} {:>24}", "t", "Re(int_alpha - log t)", "Re(single valued)");
                for s in &r.corner.samples {
                    let _ = writeln!(out, "{:>12.4e} {:>24.15} {:>24.15}", s.t, s.naive.re, s.single_valued.re);
                }
                let _ = writeln!(out, "I_chi  {}  error {:.2e}  degree {}", c64(r.corner.value), r.corner.error, r.corner.degree);
                term_row(&mut out, "hgt(L_chi)", &r.height);
                term_row(&mut out, "closed form", &r.closed_form);
                term_row(&mut out, "residual", &r.residual);
            }
            Report::Verify(r) => {
                let _ = write!(out, "{}", r.report);
                let c = &r.compatible;
                let _ = writeln!(out, "compatible f (seed {}): R = {}  S = {}  a = {}  b = {}", c.seed, c.r, c.s, c.a, c.b);
                term_row(&mut out, "<D, E + div f>_inf", &c.archimedean);
                term_row(&mut out, "<D, E + div f>_fin", &c.finite);
                term_row(&mut out, "difference", &c.difference);
            }
        }
        out
    }
}

fn run_periods(curve: &WeierstrassCurveC, flags: &Flags) -> Result<Outcome> {
    let l: PeriodLattice = period_lattice_with_tol(curve, flags.quad_eps)?;
    let coarse = period_lattice_with_tol(curve, (flags.quad_eps * 100.0).min(1e-4))?;
    let error = (l.omega1 - coarse.omega1).norm().max((l.omega2 - coarse.omega2).norm()) + flags.quad_eps;
    Ok(Outcome {
        report: Report::Periods(PeriodsReport { omega1: l.omega1, omega2: l.omega2, tau: l.tau(), error }),
        within_tolerance: true,
    })
}

fn run_nonarch(input: &PairInput, prime: &Option<BigInt>) -> Result<Outcome> {
    let ctx = NonarchContext::new(&input.curve, &input.p, &input.q, &input.u, &input.v)?;
    let terms = match prime {
        Some(p) => vec![ctx.term(p)?],
        None => ctx.terms()?,
    };
    let mut total = LogCombination::new();
    for t in &terms {
        total.add_term(t.prime.clone(), t.coefficient.clone());
    }
    Ok(Outcome {
        report: Report::Nonarch(NonarchReport {
            primes: terms.iter().map(|t| t.prime.to_string()).collect(),
            total_exact: describe(&total),
            value: total.value(),
            error: 0.0,
            total,
            terms,
        }),
        within_tolerance: true,
    })
}

fn run_lmhs(spec: &str, family: &NodalFamily, ts: &[f64], flags: &Flags) -> Result<Outcome> {
    let options = CornerOptions { quad_eps: flags.quad_eps.min(1e-12), ..CornerOptions::default() };
    let corner = family.lmhs_corner(ts, &options)?;
    let height = family.lmhs_height(&corner, flags.im_tol.max(corner.error))?;
    let closed = family.closed_form_corner()?;
    let residual = height - closed;
    Ok(Outcome {
        within_tolerance: residual.abs() < flags.residual_tol,
        report: Report::LmhsLimit(LmhsLimitReport {
            family: spec.to_string(),
            kappa: format_rational(family.kappa()),
            height: ReportTerm { value: height, error: corner.error, exact: None },
            closed_form: ReportTerm { value: closed, error: 1e-15 * closed.abs().max(1.0), exact: None },
            residual: ReportTerm { value: residual, error: corner.error, exact: None },
            corner,
        }),
    })
}

fn run_verify(input: &PairInput, config: &RunConfig) -> Result<Outcome> {
    let options = config.regularization();
    let curve = GlobalCurve::new(input.curve.clone(), config.flags.quad_eps)?;
    let report = verify_main_theorem(&curve, &input.p, &input.q, &input.u, &input.v, &options)?;
    let copts = CompatibleOptions { seed: config.flags.seed, ..CompatibleOptions::default() };
    let f = compatible_function(&curve.exact, &input.p, &input.q, &input.u, &input.v, &copts)?;
    let arch = f.archimedean(&curve.complex, &curve.lattice, options.numeric)?;
    let finite = f.nonarch_total(&curve.exact)?;
    let total = arch.value + finite.value();
    let difference = total - report.rhs.value;
    let within = report.within(config.flags.residual_tol) && difference.abs() < config.flags.residual_tol;
    let compatible = CompatibleCheck {
        seed: config.flags.seed,
        r: f.r.to_string(),
        s: f.s.to_string(),
        a: format_rational(&f.a),
        b: format_rational(&f.b),
        archimedean: ReportTerm { value: arch.value, error: arch.error, exact: None },
        finite: ReportTerm { value: finite.value(), error: 0.0, exact: Some(describe(&finite)) },
        total: ReportTerm { value: total, error: arch.error, exact: None },
        difference: ReportTerm { value: difference, error: arch.error + report.rhs.error, exact: None },
    };
    Ok(Outcome { report: Report::Verify(VerifyReport { report, compatible }), within_tolerance: within })
}

fn dispatch(config: &RunConfig) -> Result<Outcome> {
    match &config.job {
        Job::Periods { curve } => run_periods(curve, &config.flags),
        Job::RegularizedArch { curve, p, q, u, v } => {
            let lattice = period_lattice_with_tol(curve, config.flags.quad_eps)?;
            let r: RegularizedValue = regularized_integral(curve, &lattice, p, q, u, v, &config.regularization())?;
            Ok(Outcome {
                report: Report::RegularizedArch(RegularizedArchReport {
                    value: r.value,
                    error: r.error,
                    order: r.order,
                    samples: r.samples,
                }),
                within_tolerance: true,
            })
        }
        Job::Nonarch { input, prime } => run_nonarch(input, prime),
        Job::LmhsLimit { spec, family, ts } => run_lmhs(spec, family, ts, &config.flags),
        Job::Verify { input } => run_verify(input, config),
    }
}

/// Runs a validated configuration on a pool of `--threads` workers.
pub fn run(config: &RunConfig) -> Result<Outcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = config.flags.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::InvalidInput(e.to_string()))?;
    pool.install(|| dispatch(config))
}

/// Parses `args`, runs, prints, and returns the process exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = RunConfig::from_cli(cli).and_then(|config| {
        let outcome = run(&config)?;
        let json = outcome.report.to_json()?;
        if let Some(path) = &config.flags.json {
            std::fs::write(path, format!("{json}\n")).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        }
        match config.flags.format {
            Format::Json => println!("{json}"),
            Format::Table => print!("{}", outcome.report.to_table()),
        }
        Ok(outcome)
    });
    match outcome {
        Ok(o) => {
            if !o.within_tolerance {
                eprintln!("residual exceeds tolerance");
            }
            o.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(args: &[&str]) -> Result<RunConfig> {
        let mut full = vec!["lmhs"];
        full.extend_from_slice(args);
        RunConfig::from_cli(Cli::try_parse_from(full).expect("clap"))
    }

    #[test]
    fn parse_diagnostics_name_the_field() {
        let e = config(&["nonarch", "--curve", "[0,0,1,-1]", "--P", "0,0", "--Q", "inf", "--u", "x", "--v", "x/y"]).unwrap_err();
        assert!(matches!(&e, Error::Parse { field, .. } if field == "curve"), "{e}");
        let e = config(&["verify", "--curve", "[0,0,1,-1,0]", "--P", "1,1", "--Q", "inf", "--u", "x", "--v", "x/y"]).unwrap_err();
        assert!(matches!(&e, Error::Parse { field, .. } if field == "P"), "{e}");
        let e = config(&["verify", "--curve", "[0,0,1,-1,0]", "--P", "0,0", "--Q", "inf", "--u", "x+", "--v", "x/y"]).unwrap_err();
        assert!(matches!(&e, Error::Parse { field, .. } if field == "u"), "{e}");
        let e = config(&["--quad-eps=-1", "periods", "--curve", "[0,0,1,-1,0]"]).unwrap_err();
        assert!(matches!(&e, Error::Parse { field, .. } if field == "quad-eps"), "{e}");
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn complex_curve_spec() {
        let c = parse_complex_curve("[0, (1,1/2), 0, -1, 0.5]").unwrap();
        assert_eq!(c.coefficients()[1], C64::new(1.0, 0.5));
        assert!(parse_complex_curve("[0,0,0,0,0]").is_err());
    }

    #[test]
    fn nonarch_report_round_trips() {
        let c = config(&["nonarch", "--curve", "[0,-1,1,-5,-16]", "--P", "4,3", "--Q", "inf", "--u", "x-4", "--v", "x/y"]).unwrap();
        let out = run(&c).unwrap();
        let json = out.report.to_json().unwrap();
        assert_eq!(Report::from_json(&json).unwrap().to_json().unwrap(), json);
        assert!(out.report.to_table().contains("I4"));
    }
}
