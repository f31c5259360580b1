//! End-to-end acceptance checks, one line per criterion:
//!
//! ```text
//! criterion 3 PASS (0.00 s, limit 60 s): hgt = -4.158883083360, closed form -4.158883083360, |Δ| = 3.0e-13 < 1e-6
//! ```
//!
//! Runs without the test harness; the process fails if any criterion fails.

use std::time::{Duration, Instant};

use lmhs_heights::analytic::{genus0_regularized_integral, regularized_integral_p1, RegularizationOptions, C64};
use lmhs_heights::arith::{factorize, ln_abs, log_norm, prime_divisors, valuation, BigInt, BigRational};
use lmhs_heights::degeneration::{default_t_sequence, CornerOptions, NodalFamily};
use lmhs_heights::global::{
    archimedean_regularized_self_pairing, compatible_function, fixtures, verify_main_theorem, CompatibleOptions,
    Fixture, GlobalCurve,
};
use lmhs_heights::mhs::random::{random_basis_change, well_conditioned_matrix};
use lmhs_heights::mhs::{change_basis, height};
use lmhs_heights::nonarch::NonarchContext;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn criterion(n: u32, limit: Option<Duration>, f: impl FnOnce() -> Result<Outcome, String>) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let (pass, detail) = match out {
        Ok(o) => (o.pass && in_time, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let limit = limit.map(|l| format!(", limit {} s", l.as_secs())).unwrap_or_default();
    println!(
        "criterion {n} {} ({:.2} s{limit}): {detail}",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    pass
}

fn matrix_invariance() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for trial in 0..1000 {
        let k = trial % 4;
        let p = well_conditioned_matrix(k, &mut rng);
        let g = random_basis_change(k, &mut rng);
        let h0 = height(&p).map_err(|e| e.to_string())?;
        let h1 = height(&change_basis(&p, &g).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        worst = worst.max((h0 - h1).abs());
    }
    Ok(Outcome { pass: worst < 1e-10, detail: format!("1000 trials, max |Δh| = {worst:.1e} < 1e-10") })
}

fn genus_zero() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut c = || C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (p, mut q) = (c(), c());
        while (p - q).norm() < 0.3 {
            q = c();
        }
        let (sp, sq, a2, b2) = (c(), c(), c(), c());
        let u = move |z: C64| sp * (z - p) + a2 * (z - p) * (z - p);
        let v = move |z: C64| sq * (z - q) + b2 * (z - q) * (z - q);
        let num = regularized_integral_p1(p, q, u, v, &RegularizationOptions::default()).map_err(|e| e.to_string())?;
        let exact = genus0_regularized_integral(p, q, sp, sq).map_err(|e| e.to_string())?;
        worst = worst.max((num.value - exact).abs());
    }
    Ok(Outcome { pass: worst < 1e-8, detail: format!("20 instances, max error {worst:.1e} < 1e-8") })
}

fn family() -> Result<NodalFamily, String> {
    NodalFamily::parse("x^3+x^2").map_err(|e| e.to_string())
}

fn lmhs_limit() -> Result<Outcome, String> {
    let f = family()?;
    let corner = f.lmhs_corner(&default_t_sequence(), &CornerOptions::default()).map_err(|e| e.to_string())?;
    let h = f.lmhs_height(&corner, 1e-9).map_err(|e| e.to_string())?;
    let exact = f.closed_form_corner().map_err(|e| e.to_string())?;
    let d = (h - exact).abs();
    Ok(Outcome { pass: d < 1e-6, detail: format!("hgt = {h:.12}, closed form {exact:.12}, |Δ| = {d:.1e} < 1e-6") })
}

fn scaling() -> Result<Outcome, String> {
    let f = family()?;
    let ts = default_t_sequence();
    let opts = CornerOptions::default();
    let base = f.lmhs_corner(&ts, &opts).map_err(|e| e.to_string())?.value.re;
    let mut worst: f64 = 0.0;
    for (n, d) in [(2, 1), (1, 3), (5, 1)] {
        let lambda = BigRational::new(BigInt::from(n), BigInt::from(d));
        let g = f.rescale_base(&lambda).map_err(|e| e.to_string())?;
        let v = g.lmhs_corner(&ts, &opts).map_err(|e| e.to_string())?.value.re;
        worst = worst.max((v - base + (n as f64 / d as f64).ln()).abs());
    }
    Ok(Outcome { pass: worst < 1e-7, detail: format!("λ ∈ {{2, 1/3, 5}}, max |shift + log λ| = {worst:.1e} < 1e-7") })
}

fn picard_lefschetz() -> Result<Outcome, String> {
    let f = family()?;
    let r = f.monodromy_check(C64::new(1e-3, 0.0), 1, 1e-12).map_err(|e| e.to_string())?;
    let m = r.matrix;
    let n = [[m[0][0] - 1, m[0][1]], [m[1][0], m[1][1] - 1]];
    let square_zero = (0..2).all(|i| (0..2).all(|j| n[i][0] * n[0][j] + n[i][1] * n[1][j] == 0));
    let off = m[1][0];
    let pass = r.unipotent && square_zero && m[0][1] == 0 && off.abs() == 1;
    Ok(Outcome { pass, detail: format!("T = {m:?}, (T-1)² = 0: {square_zero}, residual {:.1e}", r.residual) })
}

struct Loaded {
    curve: GlobalCurve,
    p: lmhs_heights::nonarch::RationalPoint,
    q: lmhs_heights::nonarch::RationalPoint,
    u: lmhs_heights::algebra::RationalFunction,
    v: lmhs_heights::algebra::RationalFunction,
}

fn load(fx: &Fixture) -> Result<Loaded, String> {
    let s = |e: lmhs_heights::Error| e.to_string();
    let curve = GlobalCurve::new(fx.curve().map_err(s)?, 1e-13).map_err(s)?;
    let (p, q) = fx.points().map_err(s)?;
    let (u, v) = fx.functions().map_err(s)?;
    Ok(Loaded { curve, p, q, u, v })
}

fn compatible_equivalence() -> Result<Outcome, String> {
    let s = |e: lmhs_heights::Error| e.to_string();
    let opts = RegularizationOptions::default();
    let mut worst_arch: f64 = 0.0;
    let mut worst_choice: f64 = 0.0;
    let mut exact = true;
    let all = fixtures();
    for fx in &all {
        let l = load(fx)?;
        let reg = archimedean_regularized_self_pairing(&l.curve, &l.p, &l.q, &l.u, &l.v, &opts).map_err(s)?;
        let ctx = NonarchContext::new(&l.curve.exact, &l.p, &l.q, &l.u, &l.v).map_err(s)?;
        let finite = ctx.total().map_err(s)?;
        let mut totals = Vec::new();
        for seed in [0, 7] {
            let co = CompatibleOptions { seed, ..CompatibleOptions::default() };
            let f = compatible_function(&l.curve.exact, &l.p, &l.q, &l.u, &l.v, &co).map_err(s)?;
            let arch = f.archimedean(&l.curve.complex, &l.curve.lattice, opts.numeric).map_err(s)?;
            let fin = f.nonarch_total(&l.curve.exact).map_err(s)?;
            worst_arch = worst_arch.max((arch.value - reg.value).abs());
            exact &= fin == finite;
            totals.push(arch.value + fin.value());
        }
        worst_choice = worst_choice.max((totals[0] - totals[1]).abs());
    }
    Ok(Outcome {
        pass: worst_arch < 1e-6 && worst_choice < 1e-6 && exact,
        detail: format!(
            "{} fixtures, max |Δ_∞| = {worst_arch:.1e}, finite parts exact: {exact}, two choices of f differ by {worst_choice:.1e}",
            all.len()
        ),
    })
}

fn main_theorem() -> Result<Outcome, String> {
    let s = |e: lmhs_heights::Error| e.to_string();
    let opts = RegularizationOptions::default();
    let mut lines = Vec::new();
    let mut pass = true;
    let mut meets = false;
    let mut phi = false;
    for fx in fixtures() {
        let l = load(&fx)?;
        let r = verify_main_theorem(&l.curve, &l.p, &l.q, &l.u, &l.v, &opts).map_err(s)?;
        pass &= r.within(1e-6);
        meets |= r.nonarchimedean.iter().any(|t| t.intersection > 0);
        phi |= r.nonarchimedean.iter().any(|t| !t.phi.is_zero());
        lines.push(format!("{} {:.1e}", fx.name, r.residual.value.abs()));
    }
    Ok(Outcome {
        pass: pass && meets && phi,
        detail: format!("residuals [{}] < 1e-6, ι > 0 exercised: {meets}, Φ ≠ 0 exercised: {phi}", lines.join(", ")),
    })
}

fn arith_properties() -> Result<Outcome, String> {
    let s = |e: lmhs_heights::Error| e.to_string();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut exact = true;
    for _ in 0..500 {
        let mut pick = || loop {
            let n: i64 = rng.random_range(-1_000_000..1_000_000);
            if n != 0 {
                return BigInt::from(n);
            }
        };
        let (a, b, c) = (pick(), pick(), pick());
        let r = BigRational::new(a.clone(), b.clone());
        let mut sum = 0.0;
        for p in prime_divisors(r.numer()).map_err(s)?.into_iter().chain(prime_divisors(r.denom()).map_err(s)?) {
            sum += valuation(&r, &p).map_err(s)? as f64 * log_norm(&p);
        }
        worst = worst.max((ln_abs(&r) - sum).abs() / (1.0 + ln_abs(&r).abs()));
        let prod = &a * &c;
        for p in prime_divisors(&prod).map_err(s)? {
            let ra = BigRational::from_integer(a.clone());
            let rc = BigRational::from_integer(c.clone());
            let v = |x: &BigRational| valuation(x, &p).map_err(s);
            exact &= v(&BigRational::from_integer(prod.clone()))? == v(&ra)? + v(&rc)?;
            let sum = &ra + &rc;
            if !sum.is_zero() {
                exact &= v(&sum)? >= v(&ra)?.min(v(&rc)?);
            }
        }
        let mut back = BigInt::one();
        for pp in factorize(&a).map_err(s)? {
            back *= pp.prime.pow(pp.exponent as u32);
        }
        exact &= back == a.abs();
    }
    Ok(Outcome {
        pass: worst < 1e-12 && exact,
        detail: format!("500 samples, product formula max error {worst:.1e} < 1e-12, valuation laws exact: {exact}"),
    })
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let results = [
        criterion(1, secs(10), matrix_invariance),
        criterion(2, secs(10), genus_zero),
        criterion(3, secs(60), lmhs_limit),
        criterion(4, secs(60), scaling),
        criterion(5, secs(30), picard_lefschetz),
        criterion(6, secs(120), compatible_equivalence),
        criterion(7, secs(300), main_theorem),
        criterion(8, None, arith_properties),
    ];
    let failed = results.iter().filter(|p| !**p).count();
    println!("acceptance: {} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
