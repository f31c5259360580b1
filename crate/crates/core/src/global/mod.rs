//! Assembly of regularized local pairings into the Néron–Tate height:
//!
//! ```text
//!   hgt(p − q) = Σ_ν ⟨p − q, p − q⟩_{ξ,ν}
//!              = hgt(L_χ) + log‖χ‖ + 2(p̄·q̄)_fin − ((p̄ − q̄)·Φ)_fin
//! ```
//!
//! with the left side computed independently by [`canonical_height_oracle`].

pub mod compatible;
pub mod oracle;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use compatible::{compatible_function, line_through, CompatibleFunction, CompatibleOptions, SupportPoint};
pub use oracle::{canonical_height, canonical_height_oracle, CanonicalHeight, QLattice, CALIBRATION};

use crate::algebra::RationalFunction;
use crate::analytic::{
    lattice::period_lattice_with_tol, regularized_integral, PeriodLattice, RegularizationOptions, RegularizedValue,
    WeierstrassCurveC,
};
use crate::arith::{format_rational, LogCombination};
use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::nonarch::{EllipticCurveQ, NonarchContext, NonarchTerm, RationalPoint};

/// An elliptic curve over Q with its complex model and period lattice.
#[derive(Debug, Clone)]
pub struct GlobalCurve {
    pub exact: EllipticCurveQ,
    pub complex: WeierstrassCurveC,
    pub lattice: PeriodLattice,
}

impl GlobalCurve {
    pub fn new(exact: EllipticCurveQ, quad_eps: f64) -> Result<Self> {
        let complex = exact.to_complex()?;
        let lattice = period_lattice_with_tol(&complex, quad_eps.max(1e-15))?;
        Ok(GlobalCurve { exact, complex, lattice })
    }
}

/// `⟨p − q, p − q⟩_{ξ,∞} = hgt(L_χ)`: the regularized limit of the
/// third-kind integral at the single real place.
pub fn archimedean_regularized_self_pairing(
    curve: &GlobalCurve,
    p: &RationalPoint,
    q: &RationalPoint,
    u: &RationalFunction,
    v: &RationalFunction,
    options: &RegularizationOptions,
) -> Result<RegularizedValue> {
    curve.exact.require(p)?;
    curve.exact.require(q)?;
    if p == q {
        return Err(Error::InvalidInput("P and Q must differ".into()));
    }
    regularized_integral(&curve.complex, &curve.lattice, &p.to_complex(), &q.to_complex(), u, v, options)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Place {
    Infinite,
    Finite(BigInt),
}

/// `⟨D, E + div f⟩_ν` for a compatible `f`.
pub fn regularized_pairing_via_compatible_f(
    curve: &GlobalCurve,
    f: &CompatibleFunction,
    place: &Place,
    options: &RegularizationOptions,
) -> Result<Estimate> {
    match place {
        Place::Infinite => f.archimedean(&curve.complex, &curve.lattice, options.numeric),
        Place::Finite(p) => {
            let c = f.nonarch_coefficient(&curve.exact, p)?;
            Ok(Estimate::exact(crate::arith::to_f64(&c) * crate::arith::log_norm(p)))
        }
    }
}

/// A reported real number: its value, an error bound, and the exact form
/// when the term is exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportTerm {
    pub value: f64,
    pub error: f64,
    pub exact: Option<String>,
}

impl ReportTerm {
    fn numerical(e: Estimate) -> Self {
        ReportTerm { value: e.value, error: e.error, exact: None }
    }

    fn exact(c: &LogCombination) -> Self {
        ReportTerm { value: c.value(), error: 0.0, exact: Some(describe(c)) }
    }
}

/// `"q₁·log p₁ + q₂·log p₂"`, or `"0"`.
pub fn describe(c: &LogCombination) -> String {
    let parts: Vec<String> = c.terms().map(|(p, q)| format!("{}*log({p})", format_rational(q))).collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Both sides of the height identity, term by term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeightReport {
    pub curve: String,
    pub p: String,
    pub q: String,
    pub u: String,
    pub v: String,
    /// The class `P − Q` as a rational point.
    pub difference: String,
    /// `hgt(L_χ)`, the Archimedean regularized pairing.
    pub archimedean: ReportTerm,
    pub nonarchimedean: Vec<NonarchTerm>,
    /// `log‖χ‖ = Σ_p (val_p(du|_P) + val_p(dv|_Q))·log p`.
    pub log_norm_chi: ReportTerm,
    /// `2(p̄·q̄)_fin`.
    pub two_pq_fin: ReportTerm,
    /// `((p̄ − q̄)·Φ)_fin`.
    pub phi_fin: ReportTerm,
    /// Canonical height of `P − Q` from the independent oracle.
    pub lhs: ReportTerm,
    /// Archimedean pairing plus the sum of non-Archimedean pairings.
    pub rhs: ReportTerm,
    /// `hgt(L_χ) + log‖χ‖ + 2(p̄·q̄)_fin − ((p̄ − q̄)·Φ)_fin`.
    pub regrouped: ReportTerm,
    /// Whether the regrouped finite part equals the place-by-place finite
    /// part as an exact combination of logarithms.
    pub regrouping_exact: bool,
    pub residual: ReportTerm,
}

impl HeightReport {
    pub fn within(&self, tol: f64) -> bool {
        self.residual.value.abs() < tol && self.regrouping_exact
    }
}

impl fmt::Display for HeightReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "curve {}  P = {}  Q = {}  u = {}  v = {}", self.curve, self.p, self.q, self.u, self.v)?;
        writeln!(f, "P - Q = {}", self.difference)?;
        let row = |f: &mut fmt::Formatter<'_>, name: &str, t: &ReportTerm| {
            writeln!(f, "{name:<24} {:>22.15} {:>10.2e}  {}", t.value, t.error, t.exact.as_deref().unwrap_or(""))
        };
        row(f, "hgt(L_chi)", &self.archimedean)?;
        for t in &self.nonarchimedean {
            let name = format!("p = {} ({})", t.prime, t.kodaira);
            writeln!(f, "{name:<24} {:>22.15} {:>10.2e}  {}", t.value, 0.0, format_rational(&t.coefficient))?;
        }
        row(f, "log|chi|", &self.log_norm_chi)?;
        row(f, "2(p.q)_fin", &self.two_pq_fin)?;
        row(f, "((p-q).Phi)_fin", &self.phi_fin)?;
        row(f, "canonical height", &self.lhs)?;
        row(f, "sum of pairings", &self.rhs)?;
        row(f, "regrouped", &self.regrouped)?;
        row(f, "residual", &self.residual)
    }
}

/// Checks the height identity for `P − Q` with cotangent data
/// `du|_P ⊗ dv|_Q`.
pub fn verify_main_theorem(
    curve: &GlobalCurve,
    p: &RationalPoint,
    q: &RationalPoint,
    u: &RationalFunction,
    v: &RationalFunction,
    options: &RegularizationOptions,
) -> Result<HeightReport> {
    let e = &curve.exact;
    for rd in e.reductions() {
        rd.check_supported()?;
    }
    let ctx = NonarchContext::new(e, p, q, u, v)?;
    let difference = e.sub(p, q);
    let (arch, rest) = rayon::join(
        || archimedean_regularized_self_pairing(curve, p, q, u, v, options),
        || -> Result<(Vec<NonarchTerm>, f64)> {
            let primes = ctx.sufficient_primes()?;
            let terms = primes.par_iter().map(|l| ctx.term(l)).collect::<Result<Vec<_>>>()?;
            Ok((terms, canonical_height_oracle(e, &difference)?))
        },
    );
    let arch = arch?.estimate();
    let (terms, lhs) = rest?;

    let mut finite = LogCombination::new();
    let mut chi = LogCombination::new();
    let mut pq = LogCombination::new();
    let mut phi = LogCombination::new();
    for t in &terms {
        finite.add_term(t.prime.clone(), t.coefficient.clone());
        chi.add_term(t.prime.clone(), BigRational::from_integer(t.val_chi.into()));
        pq.add_term(t.prime.clone(), BigRational::from_integer((2 * t.intersection).into()));
        phi.add_term(t.prime.clone(), t.phi.clone());
    }
    let regrouped_finite = chi.clone() + pq.clone() - phi.clone();
    let regrouping_exact = regrouped_finite == finite;
    let rhs = arch + Estimate::exact(finite.value());
    let regrouped = arch + Estimate::exact(chi.value() + pq.value() - phi.value());
    let residual = Estimate::new(lhs - rhs.value, rhs.error + 1e-12 * lhs.abs().max(1.0));
    Ok(HeightReport {
        curve: format!("{:?}", e.coefficients().iter().map(|c| c.to_string()).collect::<Vec<_>>()).replace('"', ""),
        p: p.to_string(),
        q: q.to_string(),
        u: u.to_string(),
        v: v.to_string(),
        difference: difference.to_string(),
        archimedean: ReportTerm::numerical(arch),
        nonarchimedean: terms,
        log_norm_chi: ReportTerm::exact(&chi),
        two_pq_fin: ReportTerm::exact(&pq),
        phi_fin: ReportTerm::exact(&phi),
        lhs: ReportTerm { value: lhs, error: 1e-12 * lhs.abs().max(1.0), exact: None },
        rhs: ReportTerm::numerical(rhs),
        regrouped: ReportTerm::numerical(regrouped),
        regrouping_exact,
        residual: ReportTerm::numerical(residual),
    })
}

/// A curve, two points and coordinate functions used as a verification
/// fixture.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub curve: [i64; 5],
    pub p: &'static str,
    pub q: &'static str,
    pub u: &'static str,
    pub v: &'static str,
}

impl Fixture {
    pub fn curve(&self) -> Result<EllipticCurveQ> {
        EllipticCurveQ::from_ints(self.curve)
    }

    pub fn points(&self) -> Result<(RationalPoint, RationalPoint)> {
        Ok((RationalPoint::parse(self.p)?, RationalPoint::parse(self.q)?))
    }

    pub fn functions(&self) -> Result<(RationalFunction, RationalFunction)> {
        Ok((RationalFunction::parse(self.u)?, RationalFunction::parse(self.v)?))
    }
}

/// Verification fixtures: a generator against the origin on a curve with
/// a single `I_1` prime, two points meeting modulo 2, points on
/// non-identity components of `I_4` and `I_5` fibers, and a pair of
/// affine points.
pub fn fixtures() -> Vec<Fixture> {
    vec![
        Fixture { name: "37a-generator", curve: [0, 0, 1, -1, 0], p: "0,0", q: "inf", u: "x", v: "x/y" },
        Fixture { name: "37a-meeting-at-2", curve: [0, 0, 1, -1, 0], p: "0,0", q: "6,14", u: "x", v: "x - 6" },
        Fixture { name: "I4-component", curve: [0, -1, 1, -5, -16], p: "4,3", q: "inf", u: "x - 4", v: "x/y" },
        Fixture { name: "I5-component", curve: [0, 1, 1, -10, 10], p: "-4,1", q: "inf", u: "x + 4", v: "x/y" },
        Fixture { name: "I4-affine-pair", curve: [0, 0, 1, -8, -12], p: "6,12", q: "4,4", u: "2*(x - 6)", v: "x - 4" },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn options() -> RegularizationOptions {
        RegularizationOptions::default()
    }

    fn setup(fx: &Fixture) -> (GlobalCurve, RationalPoint, RationalPoint, RationalFunction, RationalFunction) {
        let curve = GlobalCurve::new(fx.curve().unwrap(), 1e-13).unwrap();
        let (p, q) = fx.points().unwrap();
        let (u, v) = fx.functions().unwrap();
        (curve, p, q, u, v)
    }

    #[test]
    fn generator_of_37a() {
        let fx = &fixtures()[0];
        let (c, p, q, u, v) = setup(fx);
        let r = verify_main_theorem(&c, &p, &q, &u, &v, &options()).unwrap();
        assert!(r.within(1e-6), "{r}");
        assert!((r.lhs.value - 0.0511114082399688).abs() < 1e-12);
    }

    #[test]
    fn compatible_function_certificates() {
        let fx = &fixtures()[2];
        let (c, p, q, u, v) = setup(fx);
        let f = compatible_function(&c.exact, &p, &q, &u, &v, &CompatibleOptions::default()).unwrap();
        assert_eq!(f.leading_at_p, (-1, rat(1)));
        assert_eq!(f.leading_at_q, (1, rat(1)));
        assert!(f.divisor_sum(&c.exact).is_infinity());
        for (pt, _) in &f.divisor[1..] {
            if let SupportPoint::Point(pt) = pt {
                assert!(pt == &f.q || pt == &f.p || (pt != &p && pt != &q));
            }
        }
        for x in [&f.a, &f.b] {
            assert!(p.x() != Some(x) && q.x() != Some(x));
        }
    }

    #[test]
    fn scaling_u_moves_terms_but_not_the_residual() {
        let fx = &fixtures()[0];
        let (c, p, q, _, v) = setup(fx);
        let u3 = RationalFunction::parse("3*x").unwrap();
        let a = verify_main_theorem(&c, &p, &q, &RationalFunction::x(), &v, &options()).unwrap();
        let b = verify_main_theorem(&c, &p, &q, &u3, &v, &options()).unwrap();
        let l3 = 3f64.ln();
        assert!((b.archimedean.value - (a.archimedean.value - l3)).abs() < 1e-8);
        assert!((b.log_norm_chi.value - (a.log_norm_chi.value + l3)).abs() < 1e-14);
        assert!((b.residual.value - a.residual.value).abs() < 1e-8);
    }
}
