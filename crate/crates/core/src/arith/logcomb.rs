use std::collections::BTreeMap;
use std::ops::{Add, AddAssign, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{format_rational, log_norm, parse_rational};

/// A formal sum `Σ q_p log p` with rational coefficients, kept exact so
/// that regroupings of finite-place terms can be compared without rounding.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LogCombination {
    terms: BTreeMap<BigInt, BigRational>,
}

impl LogCombination {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(p: BigInt, coefficient: BigRational) -> Self {
        let mut c = Self::new();
        c.add_term(p, coefficient);
        c
    }

    pub fn add_term(&mut self, p: BigInt, coefficient: BigRational) {
        if coefficient.is_zero() {
            return;
        }
        let entry = self.terms.entry(p.clone()).or_insert_with(BigRational::zero);
        *entry += coefficient;
        if entry.is_zero() {
            self.terms.remove(&p);
        }
    }

    pub fn coefficient(&self, p: &BigInt) -> BigRational {
        self.terms.get(p).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigInt, &BigRational)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        let mut out = Self::new();
        for (p, q) in &self.terms {
            out.add_term(p.clone(), q * k);
        }
        out
    }

    /// Real value `Σ q_p log p`.
    pub fn value(&self) -> f64 {
        self.terms.iter().fold(0.0, |acc, (p, q)| acc + super::to_f64(q) * log_norm(p))
    }
}

impl AddAssign<&LogCombination> for LogCombination {
    fn add_assign(&mut self, rhs: &LogCombination) {
        for (p, q) in &rhs.terms {
            self.add_term(p.clone(), q.clone());
        }
    }
}

impl Add for LogCombination {
    type Output = LogCombination;
    fn add(mut self, rhs: LogCombination) -> LogCombination {
        self += &rhs;
        self
    }
}

impl Neg for LogCombination {
    type Output = LogCombination;
    fn neg(self) -> LogCombination {
        let mut out = LogCombination::new();
        for (p, q) in self.terms {
            out.add_term(p, -q);
        }
        out
    }
}

impl Sub for LogCombination {
    type Output = LogCombination;
    fn sub(self, rhs: LogCombination) -> LogCombination {
        self + (-rhs)
    }
}

impl Serialize for LogCombination {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let map: BTreeMap<String, String> =
            self.terms.iter().map(|(p, q)| (p.to_string(), format_rational(q))).collect();
        map.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LogCombination {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let map = BTreeMap::<String, String>::deserialize(d)?;
        let mut out = LogCombination::new();
        for (p, q) in map {
            let p: BigInt = p.parse().map_err(D::Error::custom)?;
            out.add_term(p, parse_rational(&q).map_err(D::Error::custom)?);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::ratio;

    #[test]
    fn cancellation_removes_terms() {
        let mut c = LogCombination::single(BigInt::from(5), ratio(4, 5));
        c.add_term(BigInt::from(5), ratio(-4, 5));
        assert!(c.is_zero());
    }

    #[test]
    fn regrouping_is_exact() {
        let a = LogCombination::single(BigInt::from(2), ratio(1, 3));
        let b = LogCombination::single(BigInt::from(7), ratio(-3, 4));
        let c = LogCombination::single(BigInt::from(2), ratio(2, 3));
        let left = (a.clone() + b.clone()) + c.clone();
        let right = a + (c + b);
        assert_eq!(left, right);
        assert!((left.value() - (2f64.ln() - 0.75 * 7f64.ln())).abs() < 1e-15);
    }

    #[test]
    fn serde_round_trip() {
        let c = LogCombination::single(BigInt::from(37), ratio(-2, 3));
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"37":"-2/3"}"#);
        let back: LogCombination = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
