//! Truncated Laurent series with exact rational coefficients.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::arith::format_rational;
use crate::error::{Error, Result};

/// `Σ c_i τ^(val+i) + O(τ^prec)`.
///
/// Leading zeros are stripped so `val` is the true order whenever the
/// series is not known to vanish to its full precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Laurent {
    val: i64,
    coeffs: Vec<BigRational>,
    prec: i64,
}

impl Laurent {
    fn normalized(mut val: i64, mut coeffs: Vec<BigRational>, prec: i64) -> Self {
        coeffs.truncate((prec - val).max(0) as usize);
        let lead = coeffs.iter().take_while(|c| c.is_zero()).count();
        coeffs.drain(..lead);
        val += lead as i64;
        if coeffs.is_empty() {
            val = prec;
        }
        Laurent { val, coeffs, prec }
    }

    pub fn zero(prec: i64) -> Self {
        Laurent { val: prec, coeffs: Vec::new(), prec }
    }

    pub fn constant(c: BigRational, prec: i64) -> Self {
        Self::from_coeffs(0, vec![c], prec)
    }

    /// The local parameter τ itself.
    pub fn variable(prec: i64) -> Self {
        Self::from_coeffs(1, vec![BigRational::one()], prec)
    }

    pub fn from_coeffs(val: i64, coeffs: Vec<BigRational>, prec: i64) -> Self {
        let mut c = coeffs;
        let needed = (prec - val).max(0) as usize;
        c.resize(needed.max(c.len()), BigRational::zero());
        Self::normalized(val, c, prec)
    }

    fn with_prec(mut self, prec: i64) -> Self {
        if prec < self.prec {
            let keep = (prec - self.val).max(0) as usize;
            self.coeffs.truncate(keep);
            self.prec = prec;
            if self.coeffs.is_empty() {
                self.val = prec;
            }
        }
        self
    }

    pub fn truncate(self, prec: i64) -> Self {
        self.with_prec(prec)
    }

    /// Order of vanishing, or `None` if the series is zero to its precision.
    pub fn order(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.val)
        }
    }

    pub fn precision(&self) -> i64 {
        self.prec
    }

    pub fn leading(&self) -> Option<(i64, &BigRational)> {
        self.coeffs.first().map(|c| (self.val, c))
    }

    /// Coefficient of τ^k, or `None` if it lies beyond the precision.
    pub fn coeff(&self, k: i64) -> Option<BigRational> {
        if k >= self.prec {
            None
        } else if k < self.val {
            Some(BigRational::zero())
        } else {
            Some(self.coeffs[(k - self.val) as usize].clone())
        }
    }

    pub fn add(&self, other: &Laurent) -> Laurent {
        let prec = self.prec.min(other.prec);
        let val = self.val.min(other.val).min(prec);
        let n = (prec - val).max(0) as usize;
        let mut c = vec![BigRational::zero(); n];
        for s in [self, other] {
            for (i, x) in s.coeffs.iter().enumerate() {
                let k = (s.val + i as i64 - val) as usize;
                if k < n {
                    c[k] += x;
                }
            }
        }
        Self::normalized(val, c, prec)
    }

    pub fn neg(&self) -> Laurent {
        Laurent { val: self.val, coeffs: self.coeffs.iter().map(|c| -c).collect(), prec: self.prec }
    }

    pub fn sub(&self, other: &Laurent) -> Laurent {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigRational) -> Laurent {
        Self::normalized(self.val, self.coeffs.iter().map(|c| c * k).collect(), self.prec)
    }

    pub fn mul(&self, other: &Laurent) -> Laurent {
        let val = self.val + other.val;
        let prec = (self.val + other.prec).min(other.val + self.prec);
        let n = (prec - val).max(0) as usize;
        let mut c = vec![BigRational::zero(); n];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n - i) {
                c[i + j] += a * b;
            }
        }
        Self::normalized(val, c, prec)
    }

    /// Multiplicative inverse; fails when the series is zero to its precision.
    pub fn inv(&self) -> Result<Laurent> {
        let (v, lead) = match self.leading() {
            Some((v, c)) => (v, c.clone()),
            None => return Err(Error::InvalidInput("inverse of a series with unknown order".into())),
        };
        let n = self.coeffs.len();
        let inv_lead = BigRational::one() / &lead;
        let mut out: Vec<BigRational> = Vec::with_capacity(n);
        out.push(inv_lead.clone());
        for k in 1..n {
            let mut acc = BigRational::zero();
            for j in 1..=k {
                acc += &self.coeffs[j] * &out[k - j];
            }
            out.push(-acc * &inv_lead);
        }
        Ok(Self::normalized(-v, out, -v + n as i64))
    }

    pub fn div(&self, other: &Laurent) -> Result<Laurent> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, e: i64) -> Result<Laurent> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut acc = Laurent::constant(BigRational::one(), base.relative_precision().max(1) + 64);
        let mut b = base;
        let mut k = e.unsigned_abs();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        Ok(acc)
    }

    fn relative_precision(&self) -> i64 {
        self.prec - self.val
    }

    /// Formal derivative d/dτ.
    pub fn derivative(&self) -> Laurent {
        let c: Vec<BigRational> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, x)| x * BigRational::from_integer((self.val + i as i64).into()))
            .collect();
        Self::normalized(self.val - 1, c, self.prec - 1)
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})*t^{}", format_rational(c), self.val + i as i64)?;
        }
        if !first {
            write!(f, " + ")?;
        }
        write!(f, "O(t^{})", self.prec)
    }
}
