//! Tate's algorithm: Kodaira types at a prime and the component data of
//! the supported fibers (good and multiplicative reduction).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::curve::b_invariants;
use crate::arith::{bigint_string, valuation_int};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Kodaira {
    I0,
    I(u32),
    II,
    III,
    IV,
    I0Star,
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl fmt::Display for Kodaira {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kodaira::I0 => write!(f, "I0"),
            Kodaira::I(n) => write!(f, "I{n}"),
            Kodaira::II => write!(f, "II"),
            Kodaira::III => write!(f, "III"),
            Kodaira::IV => write!(f, "IV"),
            Kodaira::I0Star => write!(f, "I0*"),
            Kodaira::IStar(n) => write!(f, "I{n}*"),
            Kodaira::IVStar => write!(f, "IV*"),
            Kodaira::IIIStar => write!(f, "III*"),
            Kodaira::IIStar => write!(f, "II*"),
        }
    }
}

/// Special-fiber data at one prime.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionData {
    #[serde(with = "bigint_string")]
    pub prime: BigInt,
    pub kodaira: Kodaira,
    /// `v_p(Δ)`.
    pub discriminant_valuation: i64,
    /// Split flag for multiplicative reduction.
    pub split: Option<bool>,
}

impl ReductionData {
    pub fn good(prime: BigInt) -> Self {
        ReductionData { prime, kodaira: Kodaira::I0, discriminant_valuation: 0, split: None }
    }

    pub fn is_supported(&self) -> bool {
        matches!(self.kodaira, Kodaira::I0 | Kodaira::I(_))
    }

    pub fn check_supported(&self) -> Result<()> {
        if self.is_supported() {
            Ok(())
        } else {
            Err(Error::UnsupportedReduction { prime: self.prime.to_string(), kind: self.kodaira.to_string() })
        }
    }

    /// Number of components of the special fiber of the minimal regular
    /// model (supported types only).
    pub fn components(&self) -> usize {
        match self.kodaira {
            Kodaira::I(n) => n as usize,
            _ => 1,
        }
    }

    /// Intersection matrix of the fiber components: a single vertex with
    /// self-intersection 0, or the cycle graph for `I_n`.
    pub fn intersection_matrix(&self) -> Vec<Vec<i64>> {
        let m = self.components();
        let mut out = vec![vec![0i64; m]; m];
        if m == 1 {
            return out;
        }
        for (i, row) in out.iter_mut().enumerate() {
            row[i] -= 2;
            row[(i + 1) % m] += 1;
            row[(i + m - 1) % m] += 1;
        }
        out
    }
}

fn md(a: &BigInt, p: &BigInt) -> BigInt {
    a.mod_floor(p)
}

fn divides(p: &BigInt, a: &BigInt) -> bool {
    a.mod_floor(p).is_zero()
}

fn val(a: &BigInt, p: &BigInt) -> i64 {
    if a.is_zero() {
        i64::MAX
    } else {
        valuation_int(a, p).expect("nonzero")
    }
}

fn inv_mod(a: &BigInt, p: &BigInt) -> Result<BigInt> {
    let e = md(a, p).extended_gcd(p);
    if !e.gcd.is_one() {
        return Err(Error::InvalidInput(format!("{a} is not invertible modulo {p}")));
    }
    Ok(md(&e.x, p))
}

fn exact_div(a: &BigInt, d: &BigInt) -> Result<BigInt> {
    let (q, r) = a.div_rem(d);
    if !r.is_zero() {
        return Err(Error::InvalidInput(format!("Tate's algorithm: {d} does not divide {a}")));
    }
    Ok(q)
}

/// Whether `a·T² + b·T + c` has a root modulo `p`.
fn quad_roots(a: &BigInt, b: &BigInt, c: &BigInt, p: &BigInt) -> bool {
    let (a, b, c) = (md(a, p), md(b, p), md(c, p));
    if p == &BigInt::from(2) {
        return c.is_zero() || md(&(&a + &b + &c), p).is_zero();
    }
    if a.is_zero() {
        return !b.is_zero() || c.is_zero();
    }
    let disc = md(&(&b * &b - BigInt::from(4) * &a * &c), p);
    if disc.is_zero() {
        return true;
    }
    let e = (p - BigInt::one()) / BigInt::from(2);
    disc.modpow(&e, p).is_one()
}

/// `(r, s, t)` change of variables with `u = 1`.
fn rst(a: &mut [BigInt; 5], r: &BigInt, s: &BigInt, t: &BigInt) {
    let [a1, a2, a3, a4, a6] = a.clone();
    let two = BigInt::from(2);
    let three = BigInt::from(3);
    a[0] = &a1 + &two * s;
    a[1] = &a2 - s * &a1 + &three * r - s * s;
    a[2] = &a3 + r * &a1 + &two * t;
    a[3] = &a4 - s * &a3 + &two * r * &a2 - (t + r * s) * &a1 + &three * r * r - &two * s * t;
    a[4] = &a6 + r * &a4 + r * r * &a2 + r * r * r - t * &a3 - t * t - r * t * &a1;
}

fn c_invariants(a: &[BigInt; 5]) -> (BigInt, BigInt, BigInt) {
    let [b2, b4, b6, b8] = b_invariants(a);
    let c4 = &b2 * &b2 - BigInt::from(24) * &b4;
    let c6 = -&b2 * &b2 * &b2 + BigInt::from(36) * &b2 * &b4 - BigInt::from(216) * &b6;
    let disc = -&b2 * &b2 * &b8 - BigInt::from(8) * &b4 * &b4 * &b4 - BigInt::from(27) * &b6 * &b6
        + BigInt::from(9) * &b2 * &b4 * &b6;
    (c4, c6, disc)
}

/// Kodaira type and split flag at `p`; errors if the model is not minimal.
pub fn tate_reduce(a_in: &[BigInt; 5], p: &BigInt) -> Result<ReductionData> {
    let two = BigInt::from(2);
    let three = BigInt::from(3);
    let zero = BigInt::zero();
    let is2 = p == &two;
    let is3 = p == &three;
    let mut a = a_in.clone();
    let (_, _, disc0) = c_invariants(&a);
    let n0 = val(&disc0, p);
    let done = |kodaira: Kodaira, split: Option<bool>| {
        Ok(ReductionData { prime: p.clone(), kodaira, discriminant_valuation: n0, split })
    };
    if n0 == 0 {
        return done(Kodaira::I0, None);
    }
    let [b2, b4, b6, _] = b_invariants(&a);
    let (c4, c6, _) = c_invariants(&a);
    // move the singular point of the reduction to (0, 0)
    let (r, t) = if is2 {
        if divides(p, &b2) {
            let r = md(&a[3], p);
            let t = md(&(((&r + &a[1]) * &r + &a[3]) * &r + &a[4]), p);
            (r, t)
        } else {
            let r = md(&a[2], p);
            let t = md(&(&r * &r + &a[3]), p);
            (r, t)
        }
    } else if is3 {
        let r = if divides(p, &b2) { md(&-&b6, p) } else { md(&(-&b4 * inv_mod(&b2, p)?), p) };
        let t = md(&(&a[0] * &r + &a[2]), p);
        (r, t)
    } else {
        let r = if divides(p, &c4) {
            md(&(-inv_mod(&BigInt::from(12), p)? * &b2), p)
        } else {
            md(&(-inv_mod(&(BigInt::from(12) * &c4), p)? * (&c6 + &b2 * &c4)), p)
        };
        let t = md(&(-inv_mod(&two, p)? * (&a[0] * &r + &a[2])), p);
        (r, t)
    };
    rst(&mut a, &r, &zero, &t);
    if !(divides(p, &a[2]) && divides(p, &a[3]) && divides(p, &a[4])) {
        return Err(Error::InvalidInput(format!("Tate's algorithm could not locate the singular point mod {p}")));
    }
    if !divides(p, &c4) {
        let split = quad_roots(&BigInt::one(), &a[0], &-&a[1], p);
        return done(Kodaira::I(n0 as u32), Some(split));
    }
    if val(&a[4], p) < 2 {
        return done(Kodaira::II, None);
    }
    let [_, _, b6, b8] = b_invariants(&a);
    if val(&b8, p) < 3 {
        return done(Kodaira::III, None);
    }
    if val(&b6, p) < 3 {
        return done(Kodaira::IV, None);
    }
    // arrange p | a1, a2; p² | a3, a4; p³ | a6
    let (s, t) = if is2 {
        (md(&a[1], p), p * md(&exact_div(&a[4], &(p * p))?, p))
    } else if is3 {
        (a[0].clone(), a[2].clone())
    } else {
        let h = inv_mod(&two, p)?;
        (md(&(-&a[0] * &h), p), p * md(&(-exact_div(&a[2], p)? * &h), p))
    };
    rst(&mut a, &zero, &s, &t);
    let p2 = p * p;
    let p3 = &p2 * p;
    let b = exact_div(&a[1], p)?;
    let c = exact_div(&a[3], &p2)?;
    let d = exact_div(&a[4], &p3)?;
    let w = BigInt::from(27) * &d * &d - &b * &b * &c * &c + BigInt::from(4) * &b * &b * &b * &d
        - BigInt::from(18) * &b * &c * &d
        + BigInt::from(4) * &c * &c * &c;
    let x = BigInt::from(3) * &c - &b * &b;
    if !divides(p, &w) {
        return done(Kodaira::I0Star, None);
    }
    if !divides(p, &x) {
        // double root: move it to T = 0 and count the chain length
        let r = if is2 {
            md(&c, p)
        } else if is3 {
            md(&(&c * inv_mod(&b, p)?), p)
        } else {
            md(&((&b * &c - BigInt::from(9) * &d) * inv_mod(&(&two * &x), p)?), p)
        };
        rst(&mut a, &(p * r), &zero, &zero);
        let (mut ix, mut iy) = (3i64, 3i64);
        let (mut mx, mut my) = (p2.clone(), p2.clone());
        loop {
            let a3t = exact_div(&a[2], &my)?;
            let a6t = exact_div(&a[4], &(&mx * &my))?;
            if !divides(p, &(&a3t * &a3t + BigInt::from(4) * &a6t)) {
                break;
            }
            let t = if is2 { &my * md(&a6t, p) } else { &my * md(&(-&a3t * inv_mod(&two, p)?), p) };
            rst(&mut a, &zero, &zero, &t);
            my = &my * p;
            iy += 1;
            let a2t2 = exact_div(&a[1], p)?;
            let a4t = exact_div(&a[3], &(p * &mx))?;
            let a6t = exact_div(&a[4], &(&mx * &my))?;
            if !divides(p, &(&a4t * &a4t - BigInt::from(4) * &a6t * &a2t2)) {
                break;
            }
            let r = if is2 {
                &mx * md(&(&a6t * inv_mod(&a2t2, p)?), p)
            } else {
                &mx * md(&(-&a4t * inv_mod(&(&two * &a2t2), p)?), p)
            };
            rst(&mut a, &r, &zero, &zero);
            mx = &mx * p;
            ix += 1;
        }
        return done(Kodaira::IStar((ix + iy - 5) as u32), None);
    }
    // triple root
    let r = if is2 {
        md(&b, p)
    } else if is3 {
        md(&-&d, p)
    } else {
        md(&(-&b * inv_mod(&three, p)?), p)
    };
    rst(&mut a, &(p * r), &zero, &zero);
    let x3t = exact_div(&a[2], &p2)?;
    let x6t = exact_div(&a[4], &(&p2 * &p2))?;
    if !divides(p, &(&x3t * &x3t + BigInt::from(4) * &x6t)) {
        return done(Kodaira::IVStar, None);
    }
    let t = if is2 { md(&x6t, p) } else { md(&(-&x3t * inv_mod(&two, p)?), p) };
    rst(&mut a, &zero, &zero, &(&p2 * t));
    if val(&a[3], p) < 4 {
        return done(Kodaira::IIIStar, None);
    }
    if val(&a[4], p) < 6 {
        return done(Kodaira::IIStar, None);
    }
    Err(Error::NonMinimal(p.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reduce(a: [i64; 5], p: i64) -> Result<ReductionData> {
        tate_reduce(&a.map(BigInt::from), &BigInt::from(p))
    }

    #[test]
    fn conductor_37() {
        let r = reduce([0, 0, 1, -1, 0], 37).unwrap();
        assert_eq!(r.kodaira, Kodaira::I(1));
        assert_eq!(r.components(), 1);
        assert_eq!(reduce([0, 0, 1, -1, 0], 2).unwrap().kodaira, Kodaira::I0);
    }

    #[test]
    fn multiplicative_and_split() {
        // 11a1: y² + y = x³ − x² − 10x − 20, split I5 at 11
        let r = reduce([0, -1, 1, -10, -20], 11).unwrap();
        assert_eq!(r.kodaira, Kodaira::I(5));
        assert_eq!(r.split, Some(true));
        // 14a1: y² + xy + y = x³ + 4x − 6: I6 at 2, I3 at 7
        assert_eq!(reduce([1, 0, 1, 4, -6], 2).unwrap().kodaira, Kodaira::I(6));
        assert_eq!(reduce([1, 0, 1, 4, -6], 7).unwrap().kodaira, Kodaira::I(3));
    }

    #[test]
    fn additive_types() {
        // 27a1: y² + y = x³ − 7, type IV* at 3
        assert_eq!(reduce([0, 0, 1, 0, -7], 3).unwrap().kodaira, Kodaira::IVStar);
        // y² = x³ + p: type II at p ≥ 5
        assert_eq!(reduce([0, 0, 0, 0, 5], 5).unwrap().kodaira, Kodaira::II);
        // y² = x³ + p·x: type III
        assert_eq!(reduce([0, 0, 0, 5, 0], 5).unwrap().kodaira, Kodaira::III);
        // y² = x³ + p²: type IV
        assert_eq!(reduce([0, 0, 0, 0, 25], 5).unwrap().kodaira, Kodaira::IV);
        // y² = x³ − p²·x: I0*
        assert_eq!(reduce([0, 0, 0, -25, 0], 5).unwrap().kodaira, Kodaira::I0Star);
        // y² = x³ + p·x² + p³·x + p⁴: I_n*
        assert!(matches!(reduce([0, 5, 0, 125, 625], 5).unwrap().kodaira, Kodaira::IStar(_)));
        // y² = x³ + p³·x: III*
        assert_eq!(reduce([0, 0, 0, 125, 0], 5).unwrap().kodaira, Kodaira::IIIStar);
        // y² = x³ + p⁵: II*
        assert_eq!(reduce([0, 0, 0, 0, 3125], 5).unwrap().kodaira, Kodaira::IIStar);
        assert!(matches!(reduce([0, 0, 0, 0, 5i64.pow(6)], 5), Err(Error::NonMinimal(_))));
        assert!(reduce([0, 0, 0, 0, 5], 5).unwrap().check_supported().is_err());
    }

    #[test]
    fn cycle_matrix_annihilates_fiber() {
        for n in 1..8 {
            let r = ReductionData { kodaira: Kodaira::I(n), ..ReductionData::good(BigInt::from(7)) };
            let m = r.intersection_matrix();
            assert_eq!(m.len(), n as usize);
            for row in &m {
                assert_eq!(row.iter().sum::<i64>(), 0);
            }
            // negative semi-definite: x·Mx = −Σ (x_i − x_{i+1})² for the cycle
            let x: Vec<i64> = (0..n as i64).map(|i| i * i - 3).collect();
            let q: i64 = (0..m.len()).map(|i| (0..m.len()).map(|j| x[i] * m[i][j] * x[j]).sum::<i64>()).sum();
            assert!(q <= 0);
        }
    }
}
