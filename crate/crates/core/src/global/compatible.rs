//! Functions compatible with `(D, E, ξ)` for `D = E = P − Q`: `f` with a
//! simple pole at `P` of leading coefficient 1 in `u`, a simple zero at `Q`
//! of leading coefficient 1 in `v`, so that `E + div f` avoids `P` and `Q`.
//!
//! `f = c·f₀·(x − a)/(x − b)` where `f₀ = ℓ_{Q,R}/ℓ_{P,S}` is a quotient of
//! lines with `S = Q + R − P`, so `div f₀ = Q + R − P − S`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{Poly2, RationalFunction};
use crate::analytic::{archimedean_disjoint_pairing, CurvePoint, NumericOptions, PeriodLattice, WeierstrassCurveC, C64};
use crate::arith::{prime_divisors, to_f64, valuation, LogCombination};
use crate::error::{Error, Result};
use crate::estimate::Estimate;
use crate::nonarch::{component_labels, phi_solver, section_intersection, EllipticCurveQ, RationalPoint};

/// A point of the support of `div f`: a rational point or the pair of
/// points over a rational `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum SupportPoint {
    Point(RationalPoint),
    Fiber(BigRational),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompatibleOptions {
    pub seed: u64,
    pub search_bound: i64,
    pub attempts: usize,
}

impl Default for CompatibleOptions {
    fn default() -> Self {
        CompatibleOptions { seed: 0, search_bound: 20, attempts: 64 }
    }
}

#[derive(Debug, Clone)]
pub struct CompatibleFunction {
    pub f: RationalFunction,
    pub p: RationalPoint,
    pub q: RationalPoint,
    pub r: RationalPoint,
    pub s: RationalPoint,
    pub a: BigRational,
    pub b: BigRational,
    pub scale: BigRational,
    /// `div f = Q + R − P − S + [x = a] − [x = b]`.
    pub divisor: Vec<(SupportPoint, i64)>,
    /// `(order, leading coefficient)` of `f` in `u` at `P` and in `v` at `Q`.
    pub leading_at_p: (i64, BigRational),
    pub leading_at_q: (i64, BigRational),
}

/// The line through `a` and `b` (tangent when equal, vertical through the
/// origin): its divisor is `a + b + (−(a + b)) − 3·O`.
pub fn line_through(e: &EllipticCurveQ, a: &RationalPoint, b: &RationalPoint) -> Result<RationalFunction> {
    let vertical = |x0: &BigRational| {
        let mut p = Poly2::x();
        p.add_term(0, 0, -x0.clone());
        RationalFunction::from_poly(p)
    };
    let (xa, ya) = match (a, b) {
        (RationalPoint::Infinity, RationalPoint::Infinity) => {
            return Err(Error::InvalidInput("line through the origin twice".into()))
        }
        (RationalPoint::Infinity, RationalPoint::Affine { x, .. })
        | (RationalPoint::Affine { x, .. }, RationalPoint::Infinity) => return Ok(vertical(x)),
        (RationalPoint::Affine { x, y }, _) => (x, y),
    };
    let (xb, yb) = (b.x().expect("affine"), b.y().expect("affine"));
    let slope = if xa != xb {
        (yb - ya) / (xb - xa)
    } else if a == b && !e.psi2(xa, ya).is_zero() {
        e.dfdx_neg(xa, ya) / e.psi2(xa, ya)
    } else {
        return Ok(vertical(xa));
    };
    let mut p = Poly2::y();
    p.add_term(1, 0, -slope.clone());
    p.add_term(0, 0, &slope * xa - ya);
    Ok(RationalFunction::from_poly(p))
}

fn fiber_function(a: &BigRational, b: &BigRational) -> Result<RationalFunction> {
    let mut num = Poly2::x();
    num.add_term(0, 0, -a.clone());
    let mut den = Poly2::x();
    den.add_term(0, 0, -b.clone());
    RationalFunction::new(num, den)
}

/// `(x − a)/(x − b)` at a rational point (1 at the origin).
fn fiber_value(pt: &RationalPoint, a: &BigRational, b: &BigRational) -> BigRational {
    match pt.x() {
        None => BigRational::one(),
        Some(x) => (x - a) / (x - b),
    }
}

/// Whether the fiber of `x` over `x0` consists of two distinct points.
fn unramified(e: &EllipticCurveQ, x0: &BigRational) -> bool {
    let c = e.coefficients();
    let r = |n: &BigInt| BigRational::from_integer(n.clone());
    let bb = r(&c[0]) * x0 + r(&c[2]);
    let g = ((x0 + r(&c[1])) * x0 + r(&c[3])) * x0 + r(&c[4]);
    !(&bb * &bb + BigRational::from_integer(4.into()) * g).is_zero()
}

fn candidate_points(e: &EllipticCurveQ, p: &RationalPoint, q: &RationalPoint, bound: i64) -> Vec<RationalPoint> {
    let mut out: Vec<RationalPoint> = Vec::new();
    let mut push = |pt: RationalPoint| {
        if !pt.is_infinity() && !out.contains(&pt) {
            out.push(pt);
        }
    };
    for k in -3..=3i64 {
        push(e.multiply(p, k));
        push(e.add(&e.multiply(p, k), q));
        push(e.multiply(q, k));
    }
    for pt in e.search_points(bound) {
        push(pt);
    }
    out
}

/// Constructs a compatible function for `D = E = P − Q` and cotangent data
/// `du|_P ⊗ dv|_Q`. The auxiliary point `R` and the constant `b` are chosen
/// in a seeded order; different seeds give independent choices.
pub fn compatible_function(
    e: &EllipticCurveQ,
    p: &RationalPoint,
    q: &RationalPoint,
    u: &RationalFunction,
    v: &RationalFunction,
    options: &CompatibleOptions,
) -> Result<CompatibleFunction> {
    e.require(p)?;
    e.require(q)?;
    if p == q {
        return Err(Error::InvalidInput("P and Q must differ".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut candidates = candidate_points(e, p, q, options.search_bound);
    candidates.shuffle(&mut rng);
    let mut bs: Vec<i64> = (-40..=40).collect();
    bs.shuffle(&mut rng);
    for r in candidates.into_iter().take(options.attempts) {
        let s = e.sub(&e.add(q, &r), p);
        let support = [p, q, &r, &s];
        if s.is_infinity() || r == *p || r == *q || s == *p || s == *q || r == s {
            continue;
        }
        let f0 = line_through(e, q, &r)?.div(&line_through(e, p, &s)?)?;
        let (Ok((kp, a0)), Ok((kq, b0))) = (e.leading_in(&f0, u, p), e.leading_in(&f0, v, q)) else {
            continue;
        };
        if kp != -1 || kq != 1 {
            continue;
        }
        let xs: Vec<&BigRational> = support.iter().filter_map(|pt| pt.x()).collect();
        for &bi in bs.iter().take(options.attempts) {
            let b = BigRational::from_integer(bi.into());
            if xs.contains(&&b) || !unramified(e, &b) {
                continue;
            }
            // A0·g(P) = B0·g(Q) with g = (x − a)/(x − b), affine in a
            let side = |pt: &RationalPoint, k: &BigRational| -> (BigRational, BigRational) {
                match pt.x() {
                    None => (k.clone(), BigRational::zero()),
                    Some(x) => (k * x / (x - &b), -k / (x - &b)),
                }
            };
            let (c_p, l_p) = side(p, &a0);
            let (c_q, l_q) = side(q, &b0);
            let slope = &l_p - &l_q;
            if slope.is_zero() {
                continue;
            }
            let a = (&c_q - &c_p) / slope;
            if a == b || xs.contains(&&a) || !unramified(e, &a) {
                continue;
            }
            let g = fiber_function(&a, &b)?;
            let scale = BigRational::one() / (&a0 * fiber_value(p, &a, &b));
            let f = f0.mul(&g).scale(&scale);
            let leading_at_p = e.leading_in(&f, u, p)?;
            let leading_at_q = e.leading_in(&f, v, q)?;
            if leading_at_p != (-1, BigRational::one()) || leading_at_q != (1, BigRational::one()) {
                continue;
            }
            let divisor = vec![
                (SupportPoint::Point(q.clone()), 1),
                (SupportPoint::Point(r.clone()), 1),
                (SupportPoint::Point(p.clone()), -1),
                (SupportPoint::Point(s.clone()), -1),
                (SupportPoint::Fiber(a.clone()), 1),
                (SupportPoint::Fiber(b.clone()), -1),
            ];
            return Ok(CompatibleFunction {
                f,
                p: p.clone(),
                q: q.clone(),
                r,
                s,
                a,
                b,
                scale,
                divisor,
                leading_at_p,
                leading_at_q,
            });
        }
    }
    Err(Error::AuxiliarySearchFailed)
}

impl CompatibleFunction {
    /// `(x − a)/(x − b)`.
    pub fn fiber_factor(&self) -> Result<RationalFunction> {
        fiber_function(&self.a, &self.b)
    }

    /// `g(P)/g(Q)` for `g = (x − a)/(x − b)`; equals `f(D)` after the
    /// poles and zeros at `P`, `Q` are cancelled against `R − S`.
    pub fn fiber_ratio(&self) -> BigRational {
        fiber_value(&self.p, &self.a, &self.b) / fiber_value(&self.q, &self.a, &self.b)
    }

    /// The sum of `div f` in the group: the class of `Q + R − P − S`, which
    /// must be the origin.
    pub fn divisor_sum(&self, e: &EllipticCurveQ) -> RationalPoint {
        let mut acc = RationalPoint::Infinity;
        for (pt, m) in &self.divisor {
            if let SupportPoint::Point(pt) = pt {
                acc = e.add(&acc, &e.multiply(pt, *m));
            }
        }
        acc
    }

    /// `E + div f = R − S + [x = a] − [x = b]` as complex points.
    pub fn shifted_divisor(&self, curve: &WeierstrassCurveC) -> Vec<(CurvePoint, i64)> {
        let mut out = vec![(self.r.to_complex(), 1), (self.s.to_complex(), -1)];
        for (x0, m) in [(&self.a, 1), (&self.b, -1)] {
            for pt in curve.points_above(C64::new(to_f64(x0), 0.0)) {
                out.push((pt, m));
            }
        }
        out
    }

    /// Primes outside of which the non-Archimedean pairing with `E + div f`
    /// vanishes.
    pub fn relevant_primes(&self, e: &EllipticCurveQ) -> Result<Vec<BigInt>> {
        let mut out = e.bad_primes();
        let mut add = |n: &BigInt| -> Result<()> {
            for p in prime_divisors(n)? {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
            Ok(())
        };
        for (x, y) in [(&self.p, &self.r), (&self.p, &self.s), (&self.q, &self.r), (&self.q, &self.s)] {
            if let Some(d) = e.sub(x, y).x() {
                add(d.denom())?;
            }
        }
        let ratio = self.fiber_ratio();
        add(ratio.numer())?;
        add(ratio.denom())?;
        out.sort();
        Ok(out)
    }

    /// `⟨D, E + div f⟩_p / log p = −ι_p(𝒟, R̄ − S̄) − v_p(g(P)/g(Q))`.
    pub fn nonarch_coefficient(&self, e: &EllipticCurveQ, prime: &BigInt) -> Result<BigRational> {
        let rd = e.reduction(prime)?;
        let pts = [self.p.clone(), self.q.clone(), self.r.clone(), self.s.clone()];
        let labels = component_labels(e, &pts, prime)?;
        let phi = phi_solver(&rd, labels[0], labels[1])?;
        let i = |a: &RationalPoint, b: &RationalPoint| section_intersection(e, a, b, prime);
        let horizontal = i(&self.p, &self.r)? - i(&self.p, &self.s)? - i(&self.q, &self.r)? + i(&self.q, &self.s)?;
        let c = &phi.coefficients;
        let vertical = &c[labels[2] as usize] - &c[labels[3] as usize];
        let v = valuation(&self.fiber_ratio(), prime)?;
        Ok(-(BigRational::from_integer((horizontal + v).into()) + vertical))
    }

    /// The finite part `Σ_p ⟨D, E + div f⟩_p` as an exact combination.
    pub fn nonarch_total(&self, e: &EllipticCurveQ) -> Result<LogCombination> {
        let mut out = LogCombination::new();
        for p in self.relevant_primes(e)? {
            let c = self.nonarch_coefficient(e, &p)?;
            out.add_term(p, c);
        }
        Ok(out)
    }

    /// `⟨D, E + div f⟩_∞`.
    pub fn archimedean(&self, curve: &WeierstrassCurveC, lattice: &PeriodLattice, options: NumericOptions) -> Result<Estimate> {
        let d = vec![(self.p.to_complex(), 1), (self.q.to_complex(), -1)];
        archimedean_disjoint_pairing(curve, lattice, &d, &self.shifted_divisor(curve), options)
    }
}
