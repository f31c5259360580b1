//! Elliptic curves over Q with integral Weierstrass models: exact group
//! law, invariants and local expansions at rational points.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{Laurent, RationalFunction};
use crate::analytic::{CurvePoint, WeierstrassCurveC, C64};
use crate::arith::{format_rational, parse_rational, prime_divisors, to_f64};
use crate::error::{Error, Result};

use super::tate::{tate_reduce, ReductionData};

/// A rational point, exact.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RationalPoint {
    Infinity,
    Affine { x: BigRational, y: BigRational },
}

impl RationalPoint {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        RationalPoint::Affine { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        RationalPoint::Affine { x: BigRational::from_integer(x.into()), y: BigRational::from_integer(y.into()) }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, RationalPoint::Infinity)
    }

    pub fn x(&self) -> Option<&BigRational> {
        match self {
            RationalPoint::Affine { x, .. } => Some(x),
            RationalPoint::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&BigRational> {
        match self {
            RationalPoint::Affine { y, .. } => Some(y),
            RationalPoint::Infinity => None,
        }
    }

    pub fn to_complex(&self) -> CurvePoint {
        match self {
            RationalPoint::Infinity => CurvePoint::Infinity,
            RationalPoint::Affine { x, y } => CurvePoint::affine(C64::new(to_f64(x), 0.0), C64::new(to_f64(y), 0.0)),
        }
    }

    /// Parses `"x,y"` or `"inf"`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t == "O" || t.eq_ignore_ascii_case("infinity") {
            return Ok(RationalPoint::Infinity);
        }
        let parts: Vec<&str> = t.trim_matches(|c| c == '(' || c == ')').split(',').collect();
        if parts.len() != 2 {
            return Err(Error::parse("point", format!("expected \"x,y\" or \"inf\", got {s:?}")));
        }
        let x = parse_rational(parts[0]).map_err(|e| Error::parse("point", e.to_string()))?;
        let y = parse_rational(parts[1]).map_err(|e| Error::parse("point", e.to_string()))?;
        Ok(RationalPoint::Affine { x, y })
    }
}

impl fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RationalPoint::Infinity => write!(f, "inf"),
            RationalPoint::Affine { x, y } => write!(f, "{},{}", format_rational(x), format_rational(y)),
        }
    }
}

impl Serialize for RationalPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RationalPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        RationalPoint::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// `y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6` with integer coefficients,
/// minimal at every prime, together with its reduction data.
#[derive(Debug, Clone)]
pub struct EllipticCurveQ {
    a: [BigInt; 5],
    discriminant: BigInt,
    reductions: Vec<ReductionData>,
}

impl EllipticCurveQ {
    /// Builds the curve from `[a1, a2, a3, a4, a6]`; runs Tate's algorithm
    /// at every prime dividing the discriminant.
    pub fn new(a: [BigInt; 5]) -> Result<Self> {
        let [b2, b4, b6, b8] = b_invariants(&a);
        let disc = -&b2 * &b2 * &b8 - BigInt::from(8) * &b4 * &b4 * &b4 - BigInt::from(27) * &b6 * &b6
            + BigInt::from(9) * &b2 * &b4 * &b6;
        if disc.is_zero() {
            return Err(Error::SingularCurve);
        }
        let mut reductions = Vec::new();
        for p in prime_divisors(&disc)? {
            reductions.push(tate_reduce(&a, &p)?);
        }
        Ok(EllipticCurveQ { a, discriminant: disc, reductions })
    }

    pub fn from_ints(a: [i64; 5]) -> Result<Self> {
        Self::new(a.map(BigInt::from))
    }

    /// Parses a bracketed 5-tuple such as `"[0,0,1,-1,0]"`; rational
    /// entries must be integers.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| Error::parse("curve", "expected a bracketed list [a1,a2,a3,a4,a6]"))?;
        let parts: Vec<&str> = inner.split(',').collect();
        if parts.len() != 5 {
            return Err(Error::parse("curve", format!("expected 5 coefficients, got {}", parts.len())));
        }
        let mut a: Vec<BigInt> = Vec::with_capacity(5);
        for p in parts {
            let r = parse_rational(p).map_err(|e| Error::parse("curve", e.to_string()))?;
            if !r.is_integer() {
                return Err(Error::parse("curve", format!("coefficient {} is not an integer", format_rational(&r))));
            }
            a.push(r.to_integer());
        }
        Self::new([a[0].clone(), a[1].clone(), a[2].clone(), a[3].clone(), a[4].clone()])
    }

    pub fn coefficients(&self) -> &[BigInt; 5] {
        &self.a
    }

    fn ar(&self, i: usize) -> BigRational {
        BigRational::from_integer(self.a[i].clone())
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }

    pub fn c4(&self) -> BigInt {
        let [b2, b4, _, _] = b_invariants(&self.a);
        &b2 * &b2 - BigInt::from(24) * b4
    }

    pub fn bad_primes(&self) -> Vec<BigInt> {
        self.reductions.iter().map(|r| r.prime.clone()).collect()
    }

    /// Reduction data at `p`; good reduction away from the discriminant.
    /// Additive types are rejected.
    pub fn reduction(&self, p: &BigInt) -> Result<ReductionData> {
        match self.reductions.iter().find(|r| &r.prime == p) {
            Some(r) => {
                r.check_supported()?;
                Ok(r.clone())
            }
            None => Ok(ReductionData::good(p.clone())),
        }
    }

    /// All bad-prime data, including unsupported types.
    pub fn reductions(&self) -> &[ReductionData] {
        &self.reductions
    }

    pub fn to_complex(&self) -> Result<WeierstrassCurveC> {
        WeierstrassCurveC::from_real(self.a.clone().map(|c| to_f64(&BigRational::from_integer(c))))
    }

    pub fn contains(&self, p: &RationalPoint) -> bool {
        match p {
            RationalPoint::Infinity => true,
            RationalPoint::Affine { x, y } => self.equation(x, y).is_zero(),
        }
    }

    /// `F(x, y) = y² + a1·xy + a3·y − (x³ + a2·x² + a4·x + a6)`.
    pub fn equation(&self, x: &BigRational, y: &BigRational) -> BigRational {
        y * y + self.ar(0) * x * y + self.ar(2) * y - ((x + self.ar(1)) * x + self.ar(3)) * x - self.ar(4)
    }

    /// `2y + a1·x + a3`.
    pub fn psi2(&self, x: &BigRational, y: &BigRational) -> BigRational {
        y + y + self.ar(0) * x + self.ar(2)
    }

    /// `3x² + 2a2·x + a4 − a1·y`, the negative of `∂F/∂x`.
    pub fn dfdx_neg(&self, x: &BigRational, y: &BigRational) -> BigRational {
        BigRational::from_integer(3.into()) * x * x + self.ar(1) * x * BigRational::from_integer(2.into()) + self.ar(3)
            - self.ar(0) * y
    }

    pub fn require(&self, p: &RationalPoint) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::NotOnCurve(p.to_string()))
        }
    }

    pub fn neg(&self, p: &RationalPoint) -> RationalPoint {
        match p {
            RationalPoint::Infinity => RationalPoint::Infinity,
            RationalPoint::Affine { x, y } => {
                RationalPoint::Affine { x: x.clone(), y: -y - self.ar(0) * x - self.ar(2) }
            }
        }
    }

    pub fn add(&self, p: &RationalPoint, q: &RationalPoint) -> RationalPoint {
        let (x1, y1, x2, y2) = match (p, q) {
            (RationalPoint::Infinity, _) => return q.clone(),
            (_, RationalPoint::Infinity) => return p.clone(),
            (RationalPoint::Affine { x: x1, y: y1 }, RationalPoint::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let (a1, a2, a3, a4, a6) = (self.ar(0), self.ar(1), self.ar(2), self.ar(3), self.ar(4));
        let (lambda, nu) = if x1 == x2 {
            let d = self.psi2(x1, y1);
            if (y1 + y2 + &a1 * x2 + &a3).is_zero() || d.is_zero() {
                return RationalPoint::Infinity;
            }
            let l = self.dfdx_neg(x1, y1) / &d;
            let n = (-(x1 * x1 * x1) + &a4 * x1 + BigRational::from_integer(2.into()) * &a6 - &a3 * y1) / &d;
            (l, n)
        } else {
            let dx = x2 - x1;
            ((y2 - y1) / &dx, (y1 * x2 - y2 * x1) / &dx)
        };
        let x3 = &lambda * &lambda + &a1 * &lambda - &a2 - x1 - x2;
        let y3 = -(&lambda + &a1) * &x3 - nu - a3;
        RationalPoint::Affine { x: x3, y: y3 }
    }

    pub fn sub(&self, p: &RationalPoint, q: &RationalPoint) -> RationalPoint {
        self.add(p, &self.neg(q))
    }

    pub fn multiply(&self, p: &RationalPoint, n: i64) -> RationalPoint {
        let mut base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = RationalPoint::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base);
            }
            base = self.add(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// Order of a torsion point (at most 12 over Q), or `None`.
    pub fn torsion_order(&self, p: &RationalPoint) -> Option<u32> {
        let mut q = p.clone();
        for n in 1..=12 {
            if q.is_infinity() {
                return Some(n);
            }
            q = self.add(&q, p);
        }
        None
    }

    /// Laurent expansions `(x(s), y(s))` in a local parameter `s` at `p`:
    /// `s = −x/y` at infinity, `s = x − x(p)` where `2y + a1·x + a3 ≠ 0`,
    /// and `s = y − y(p)` at the points of order two.
    pub fn local_expansion(&self, p: &RationalPoint, prec: i64) -> Result<(Laurent, Laurent)> {
        self.require(p)?;
        let (a1, a2, a3, a4, a6) = (self.ar(0), self.ar(1), self.ar(2), self.ar(3), self.ar(4));
        let one = BigRational::one();
        let work = prec + 8;
        let constant = |c: &BigRational| Laurent::constant(c.clone(), work);
        let s = Laurent::variable(work);
        match p {
            RationalPoint::Infinity => {
                // w = −1/y satisfies w = s³ + a1·s·w + a2·s²·w + a3·w² + a4·s·w² + a6·w³
                let mut w = Laurent::zero(work);
                let s2 = s.mul(&s);
                let s3 = s2.mul(&s);
                for _ in 0..work + 2 {
                    let w2 = w.mul(&w);
                    w = s3
                        .add(&s.mul(&w).scale(&a1))
                        .add(&s2.mul(&w).scale(&a2))
                        .add(&w2.scale(&a3))
                        .add(&s.mul(&w2).scale(&a4))
                        .add(&w2.mul(&w).scale(&a6));
                }
                let winv = w.inv()?;
                Ok((s.mul(&winv).truncate(prec), winv.neg().truncate(prec)))
            }
            RationalPoint::Affine { x: x0, y: y0 } => {
                let f = |x: &Laurent, y: &Laurent| -> Laurent {
                    y.mul(y)
                        .add(&x.mul(y).scale(&a1))
                        .add(&y.scale(&a3))
                        .sub(&x.mul(x).mul(x))
                        .sub(&x.mul(x).scale(&a2))
                        .sub(&x.scale(&a4))
                        .sub(&Laurent::constant(a6.clone(), work))
                };
                let fy = self.psi2(x0, y0);
                if !fy.is_zero() {
                    let x = constant(x0).add(&s);
                    let mut y = constant(y0);
                    let inv = &one / &fy;
                    for _ in 0..work + 2 {
                        y = y.sub(&f(&x, &y).scale(&inv));
                    }
                    Ok((x.truncate(prec), y.truncate(prec)))
                } else {
                    let fx = -self.dfdx_neg(x0, y0);
                    if fx.is_zero() {
                        return Err(Error::SingularCurve);
                    }
                    let y = constant(y0).add(&s);
                    let mut x = constant(x0);
                    let inv = &one / &fx;
                    for _ in 0..work + 2 {
                        x = x.sub(&f(&x, &y).scale(&inv));
                    }
                    Ok((x.truncate(prec), y.truncate(prec)))
                }
            }
        }
    }

    /// Series of a rational function in the local parameter at `p`.
    pub fn function_series(&self, f: &RationalFunction, p: &RationalPoint, prec: i64) -> Result<Laurent> {
        let (x, y) = self.local_expansion(p, prec)?;
        f.eval_series(&x, &y)
    }

    /// `du/ω` at a zero of `u`, where `ω = dx/(2y + a1·x + a3)`. Errors when
    /// `u` does not vanish to order exactly one at `p`.
    pub fn cotangent_ratio(&self, u: &RationalFunction, p: &RationalPoint, name: &str) -> Result<BigRational> {
        let prec = 12;
        let (x, y) = self.local_expansion(p, prec)?;
        let us = u.eval_series(&x, &y)?;
        let order = us.order().unwrap_or(prec);
        if order != 1 {
            return Err(Error::BadLocalCoordinate { name: name.into(), order });
        }
        let w = y.scale(&BigRational::from_integer(2.into())).add(&x.scale(&self.ar(0))).add(&Laurent::constant(
            self.ar(2),
            x.precision(),
        ));
        let ratio = us.derivative().mul(&w).div(&x.derivative())?;
        match ratio.order() {
            Some(0) => Ok(ratio.coeff(0).expect("order zero coefficient")),
            other => Err(Error::BadLocalCoordinate { name: name.into(), order: other.unwrap_or(prec) }),
        }
    }

    /// Leading coefficient and order of `f` in the local coordinate `u` at
    /// `p` (`u` vanishing to order one there).
    pub fn leading_in(&self, f: &RationalFunction, u: &RationalFunction, p: &RationalPoint) -> Result<(i64, BigRational)> {
        let prec = 12;
        let (x, y) = self.local_expansion(p, prec)?;
        let fs = f.eval_series(&x, &y)?;
        let us = u.eval_series(&x, &y)?;
        if us.order() != Some(1) {
            return Err(Error::BadLocalCoordinate { name: "u".into(), order: us.order().unwrap_or(prec) });
        }
        let k = fs.order().ok_or_else(|| Error::InvalidInput("function vanishes to full precision".into()))?;
        let ratio = fs.div(&us.pow(k)?)?;
        let c = ratio.coeff(0).filter(|c| !c.is_zero()).ok_or_else(|| Error::InvalidInput("leading coefficient".into()))?;
        Ok((k, c))
    }

    /// Points with `|numerator|, denominator ≤ bound` on the x-line
    /// (x = n/d² form), sorted by naive height.
    pub fn search_points(&self, bound: i64) -> Vec<RationalPoint> {
        let mut out = Vec::new();
        let (a1, a3) = (self.ar(0), self.ar(2));
        for d in 1..=bound.max(1).min(12) {
            let d2 = BigRational::from_integer((d * d).into());
            for n in -bound..=bound {
                if d > 1 && num_integer::Integer::gcd(&n, &d) != 1 {
                    continue;
                }
                let x = BigRational::from_integer(n.into()) / &d2;
                // y² + (a1 x + a3) y − g(x) = 0
                let bb = &a1 * &x + &a3;
                let g = ((&x + self.ar(1)) * &x + self.ar(3)) * &x + self.ar(4);
                let disc = &bb * &bb + BigRational::from_integer(4.into()) * &g;
                if let Some(r) = rational_sqrt(&disc) {
                    let two = BigRational::from_integer(2.into());
                    for sgn in [1, -1] {
                        let y = (-&bb + &r * BigRational::from_integer(sgn.into())) / &two;
                        let pt = RationalPoint::new(x.clone(), y);
                        if !out.contains(&pt) {
                            out.push(pt);
                        }
                        if r.is_zero() {
                            break;
                        }
                    }
                }
            }
        }
        out.sort_by(|p, q| naive_height(p).total_cmp(&naive_height(q)));
        out
    }
}

pub(crate) fn b_invariants(a: &[BigInt; 5]) -> [BigInt; 4] {
    let [a1, a2, a3, a4, a6] = a;
    let b2 = a1 * a1 + BigInt::from(4) * a2;
    let b4 = BigInt::from(2) * a4 + a1 * a3;
    let b6 = a3 * a3 + BigInt::from(4) * a6;
    let b8 = a1 * a1 * a6 + BigInt::from(4) * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4;
    [b2, b4, b6, b8]
}

/// `log max(|num x|, den x)` of the x-coordinate; 0 at infinity.
pub fn naive_height(p: &RationalPoint) -> f64 {
    match p {
        RationalPoint::Infinity => 0.0,
        RationalPoint::Affine { x, .. } => {
            let n = crate::arith::ln_abs_int(x.numer());
            let d = crate::arith::ln_abs_int(x.denom());
            n.max(d)
        }
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    if &(&n * &n) == r.numer() && &(&d * &d) == r.denom() {
        Some(BigRational::new(n, d))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn e37() -> EllipticCurveQ {
        EllipticCurveQ::from_ints([0, 0, 1, -1, 0]).unwrap()
    }

    #[test]
    fn discriminant_and_group_law() {
        let e = e37();
        assert_eq!(e.discriminant(), &BigInt::from(37));
        let p = RationalPoint::from_ints(0, 0);
        let multiples: Vec<RationalPoint> = (1..=5).map(|n| e.multiply(&p, n)).collect();
        assert_eq!(multiples[1], RationalPoint::from_ints(1, 0));
        assert_eq!(multiples[2], RationalPoint::from_ints(-1, -1));
        assert_eq!(multiples[3], RationalPoint::from_ints(2, -3));
        assert_eq!(multiples[4], RationalPoint::new(rat(1) / rat(4), rat(-5) / rat(8)));
        for m in &multiples {
            assert!(e.contains(m));
        }
        assert_eq!(e.add(&p, &e.neg(&p)), RationalPoint::Infinity);
        assert_eq!(e.torsion_order(&p), None);
    }

    #[test]
    fn torsion_detection() {
        // y² = x³ − x has full rational 2-torsion
        let e = EllipticCurveQ::from_ints([0, 0, 0, -1, 0]).unwrap();
        assert_eq!(e.torsion_order(&RationalPoint::from_ints(1, 0)), Some(2));
    }

    #[test]
    fn expansions_satisfy_the_equation() {
        let e = EllipticCurveQ::from_ints([1, -1, 1, -3, 3]).unwrap();
        for p in [RationalPoint::Infinity, RationalPoint::from_ints(1, 0)] {
            let (x, y) = e.local_expansion(&p, 10).unwrap();
            let (a1, a2, a3, a4, a6) = (e.ar(0), e.ar(1), e.ar(2), e.ar(3), e.ar(4));
            let f = y
                .mul(&y)
                .add(&x.mul(&y).scale(&a1))
                .add(&y.scale(&a3))
                .sub(&x.mul(&x).mul(&x))
                .sub(&x.mul(&x).scale(&a2))
                .sub(&x.scale(&a4))
                .sub(&Laurent::constant(a6, 10));
            assert!(f.order().is_none_or(|o| o >= f.precision()), "{p}: {f}");
        }
    }

    #[test]
    fn cotangent_ratio_examples() {
        let e = e37();
        let p = RationalPoint::from_ints(0, 0);
        // at (0,0): w = 1, so d(x)/ω = w = 1
        assert_eq!(e.cotangent_ratio(&RationalFunction::x(), &p, "u").unwrap(), rat(1));
        let three_x = RationalFunction::parse("3*x").unwrap();
        assert_eq!(e.cotangent_ratio(&three_x, &p, "u").unwrap(), rat(3));
        // at infinity −x/y is the formal-group parameter, ω = (1 + …)ds
        let z = RationalFunction::parse("-x/y").unwrap();
        assert_eq!(e.cotangent_ratio(&z, &RationalPoint::Infinity, "v").unwrap(), rat(1));
        let sq = RationalFunction::parse("x^2").unwrap();
        assert!(matches!(e.cotangent_ratio(&sq, &p, "u"), Err(Error::BadLocalCoordinate { order: 2, .. })));
    }

    #[test]
    fn parsing() {
        assert!(EllipticCurveQ::parse("[0,0,1,-1,0]").is_ok());
        assert!(matches!(EllipticCurveQ::parse("[0,0,1,-1]"), Err(Error::Parse { .. })));
        assert!(matches!(EllipticCurveQ::parse("[0,0,1/2,-1,0]"), Err(Error::Parse { .. })));
        assert!(matches!(EllipticCurveQ::parse("[0,0,0,0,0]"), Err(Error::SingularCurve)));
        assert_eq!(RationalPoint::parse("inf").unwrap(), RationalPoint::Infinity);
        assert_eq!(RationalPoint::parse("1/4,-5/8").unwrap().to_string(), "1/4,-5/8");
        assert!(RationalPoint::parse("1").is_err());
    }

    #[test]
    fn point_search_finds_small_points() {
        let pts = e37().search_points(3);
        assert!(pts.contains(&RationalPoint::from_ints(0, 0)));
        assert!(pts.contains(&RationalPoint::from_ints(1, -1)));
    }
}
