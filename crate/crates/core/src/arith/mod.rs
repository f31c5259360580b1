//! Exact rational arithmetic, factorization and p-adic valuations.
//!
//! Everything non-Archimedean in the crate is computed with
//! [`BigRational`]; floating point enters only when an exact multiplicity
//! is multiplied by `log p` for reporting.

mod logcomb;
mod primes;

pub use logcomb::LogCombination;
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
pub use primes::{factorize, is_prime, is_prime_u64, prime_divisors, PrimePower};

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Shorthand for the rational `n / 1`.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Shorthand for the rational `n / d`.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Exponent of the prime `p` in the nonzero integer `n`.
pub fn valuation_int(n: &BigInt, p: &BigInt) -> Result<i64> {
    if n.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(p);
        if !r.is_zero() {
            return Ok(v);
        }
        m = q;
        v += 1;
    }
}

/// Exponent of the prime `p` in the nonzero rational `r`.
pub fn valuation(r: &BigRational, p: &BigInt) -> Result<i64> {
    if r.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    Ok(valuation_int(r.numer(), p)? - valuation_int(r.denom(), p)?)
}

/// Valuation that maps zero to `None` instead of an error.
pub fn valuation_or_inf(r: &BigRational, p: &BigInt) -> Option<i64> {
    valuation(r, p).ok()
}

/// Natural logarithm of |n| for a nonzero integer of any size.
pub fn ln_abs_int(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.abs().to_f64().map(f64::ln).unwrap_or(f64::NAN);
    }
    let shift = bits - 60;
    let top = (n.abs() >> shift).to_f64().unwrap_or(f64::NAN);
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural logarithm of |r| for a nonzero rational.
pub fn ln_abs(r: &BigRational) -> f64 {
    ln_abs_int(r.numer()) - ln_abs_int(r.denom())
}

/// `log Nm(p)`, which over Q is the natural logarithm of p.
pub fn log_norm(p: &BigInt) -> f64 {
    debug_assert!(is_prime(p));
    ln_abs_int(p)
}

/// Nearest double to a rational.
pub fn to_f64(r: &BigRational) -> f64 {
    match r.to_f64() {
        Some(v) if v.is_finite() => v,
        _ => {
            let sign = if r.is_negative() { -1.0 } else { 1.0 };
            sign * ln_abs(r).exp()
        }
    }
}

/// Formats a rational as `num/den` (or `num` for integers).
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `a`, `a/b`, or a terminating decimal such as `-1.25`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::parse("rational", format!("cannot parse {t:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::parse("rational", "zero denominator"));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.trim_start().starts_with('-');
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let ip_val: BigInt = match ip.trim() {
            "" | "-" | "+" => BigInt::zero(),
            other => other.parse().map_err(|_| bad())?,
        };
        let frac: BigInt = fp.parse().map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), fp.len());
        let mag = ip_val.abs() * &scale + frac;
        let num = if neg { -mag } else { mag };
        return Ok(BigRational::new(num, scale));
    }
    let n: BigInt = t.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Serde adapter writing rationals as `"num/den"` strings.
pub mod rational_string {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigRational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(D::Error::custom)
    }
}

/// Serde adapter writing big integers as decimal strings.
pub mod bigint_string {
    use super::*;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&n.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}
