//! Rational functions in `x`, `y` with rational coefficients.
//!
//! Coordinate functions `u`, `v` enter the pipelines in this form: parsed
//! from strings such as `"(x-1)/y"`, evaluated exactly at rational points,
//! numerically at complex points, and expanded as Laurent series in a
//! local parameter.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::series::Laurent;
use crate::arith::{format_rational, parse_rational, to_f64};
use crate::error::{Error, Result};

/// Polynomial in `x`, `y`; monomial `(i, j)` is `x^i y^j`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), BigRational>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Self::zero();
        p.add_term(0, 0, c);
        p
    }

    pub fn x() -> Self {
        let mut p = Self::zero();
        p.add_term(1, 0, BigRational::one());
        p
    }

    pub fn y() -> Self {
        let mut p = Self::zero();
        p.add_term(0, 1, BigRational::one());
        p
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((i, j)).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &BigRational)> {
        self.terms.iter()
    }

    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    pub fn add(&self, other: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly2 {
        Poly2 { terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect() }
    }

    pub fn sub(&self, other: &Poly2) -> Poly2 {
        self.add(&other.neg())
    }

    pub fn scale(&self, k: &BigRational) -> Poly2 {
        let mut out = Poly2::zero();
        for (&(i, j), c) in &self.terms {
            out.add_term(i, j, c * k);
        }
        out
    }

    pub fn mul(&self, other: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &other.terms {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly2 {
        let mut acc = Poly2::constant(BigRational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn eval(&self, x: &BigRational, y: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (&(i, j), c) in &self.terms {
            acc += c * num_traits::pow(x.clone(), i as usize) * num_traits::pow(y.clone(), j as usize);
        }
        acc
    }

    pub fn eval_complex(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| to_f64(c) * x.powu(i) * y.powu(j))
            .sum()
    }

    pub fn eval_series(&self, x: &Laurent, y: &Laurent) -> Result<Laurent> {
        let prec = x.precision().min(y.precision()) + 64;
        let mut acc = Laurent::zero(prec);
        let mut xp: Vec<Laurent> = vec![Laurent::constant(BigRational::one(), prec)];
        let mut yp: Vec<Laurent> = vec![Laurent::constant(BigRational::one(), prec)];
        for (&(i, j), c) in &self.terms {
            while xp.len() <= i as usize {
                let next = xp.last().unwrap().mul(x);
                xp.push(next);
            }
            while yp.len() <= j as usize {
                let next = yp.last().unwrap().mul(y);
                yp.push(next);
            }
            acc = acc.add(&xp[i as usize].mul(&yp[j as usize]).scale(c));
        }
        Ok(acc)
    }

    /// Formal partial derivatives `(∂/∂x, ∂/∂y)`.
    pub fn gradient(&self) -> (Poly2, Poly2) {
        let mut dx = Poly2::zero();
        let mut dy = Poly2::zero();
        for (&(i, j), c) in &self.terms {
            if i > 0 {
                dx.add_term(i - 1, j, c * BigRational::from_integer(i.into()));
            }
            if j > 0 {
                dy.add_term(i, j - 1, c * BigRational::from_integer(j.into()));
            }
        }
        (dx, dy)
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(i, j), c) in self.terms.iter().rev() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let mut parts: Vec<String> = Vec::new();
            if !mag.is_one() || (i == 0 && j == 0) {
                let s = format_rational(&mag);
                parts.push(if mag.denom().is_one() { s } else { format!("({s})") });
            }
            match i {
                0 => {}
                1 => parts.push("x".into()),
                _ => parts.push(format!("x^{i}")),
            }
            match j {
                0 => {}
                1 => parts.push("y".into()),
                _ => parts.push(format!("y^{j}")),
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// Quotient of two polynomials in `x`, `y` (not reduced).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalFunction {
    num: Poly2,
    den: Poly2,
}

impl RationalFunction {
    pub fn new(num: Poly2, den: Poly2) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        let mut r = RationalFunction { num, den };
        r.normalize();
        Ok(r)
    }

    pub fn from_poly(p: Poly2) -> Self {
        RationalFunction { num: p, den: Poly2::constant(BigRational::one()) }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_poly(Poly2::constant(c))
    }

    pub fn x() -> Self {
        Self::from_poly(Poly2::x())
    }

    pub fn y() -> Self {
        Self::from_poly(Poly2::y())
    }

    pub fn numerator(&self) -> &Poly2 {
        &self.num
    }

    pub fn denominator(&self) -> &Poly2 {
        &self.den
    }

    fn normalize(&mut self) {
        if let Some(c) = self.den.as_constant() {
            if !c.is_one() {
                let k = BigRational::one() / c;
                self.num = self.num.scale(&k);
                self.den = Poly2::constant(BigRational::one());
            }
        }
        if self.num == self.den {
            self.num = Poly2::constant(BigRational::one());
            self.den = Poly2::constant(BigRational::one());
        }
    }

    pub fn add(&self, o: &RationalFunction) -> RationalFunction {
        let mut r = if self.den == o.den {
            RationalFunction { num: self.num.add(&o.num), den: self.den.clone() }
        } else {
            RationalFunction {
                num: self.num.mul(&o.den).add(&o.num.mul(&self.den)),
                den: self.den.mul(&o.den),
            }
        };
        r.normalize();
        r
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &RationalFunction) -> RationalFunction {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RationalFunction) -> RationalFunction {
        let mut r = RationalFunction { num: self.num.mul(&o.num), den: self.den.mul(&o.den) };
        r.normalize();
        r
    }

    pub fn inv(&self) -> Result<RationalFunction> {
        RationalFunction::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, o: &RationalFunction) -> Result<RationalFunction> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn powi(&self, e: i64) -> Result<RationalFunction> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let k = e.unsigned_abs() as u32;
        let mut r = RationalFunction { num: base.num.pow(k), den: base.den.pow(k) };
        r.normalize();
        Ok(r)
    }

    pub fn scale(&self, k: &BigRational) -> RationalFunction {
        RationalFunction { num: self.num.scale(k), den: self.den.clone() }
    }

    /// Exact value at a rational point; `None` when the denominator vanishes.
    pub fn eval(&self, x: &BigRational, y: &BigRational) -> Option<BigRational> {
        let d = self.den.eval(x, y);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(x, y) / d)
        }
    }

    pub fn eval_complex(&self, x: Complex64, y: Complex64) -> Complex64 {
        self.num.eval_complex(x, y) / self.den.eval_complex(x, y)
    }

    pub fn eval_series(&self, x: &Laurent, y: &Laurent) -> Result<Laurent> {
        self.num.eval_series(x, y)?.div(&self.den.eval_series(x, y)?)
    }

    /// Parses an expression in `x`, `y` with `+ - * / ^`, parentheses,
    /// integer or decimal literals and implicit multiplication.
    pub fn parse(s: &str) -> Result<RationalFunction> {
        let mut p = Parser { chars: s.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0, src: s };
        let r = p.expr()?;
        if p.pos != p.chars.len() {
            return Err(p.error(format!("unexpected {:?}", p.chars[p.pos])));
        }
        Ok(r)
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.den.as_constant() {
            Some(c) if c.is_one() => write!(f, "{}", self.num),
            _ => write!(f, "({})/({})", self.num, self.den),
        }
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn error(&self, msg: String) -> Error {
        Error::parse("coordinate function", format!("{msg} in {:?}", self.src))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RationalFunction> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                '-' => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalFunction> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some('/') => {
                    self.pos += 1;
                    let d = self.unary()?;
                    acc = acc.div(&d).map_err(|_| self.error("division by zero".into()))?;
                }
                Some(c) if c == '(' || c == 'x' || c == 'y' || c.is_ascii_digit() => {
                    acc = acc.mul(&self.power()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RationalFunction> {
        let base = self.primary()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.exponent()?;
            return base.powi(e).map_err(|_| self.error("negative power of zero".into()));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<i64> {
        let paren = self.peek() == Some('(');
        if paren {
            self.pos += 1;
        }
        let neg = match self.peek() {
            Some('-') => {
                self.pos += 1;
                true
            }
            Some('+') => {
                self.pos += 1;
                false
            }
            _ => false,
        };
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer exponent".into()));
        }
        let digits: String = self.chars[start..self.pos].iter().collect();
        let mut e: i64 = digits.parse().map_err(|_| self.error("exponent too large".into()))?;
        if e > 64 {
            return Err(self.error("exponent too large".into()));
        }
        if neg {
            e = -e;
        }
        if paren {
            if self.peek() != Some(')') {
                return Err(self.error("expected ')'".into()));
            }
            self.pos += 1;
        }
        Ok(e)
    }

    fn primary(&mut self) -> Result<RationalFunction> {
        match self.peek() {
            Some('x') => {
                self.pos += 1;
                Ok(RationalFunction::x())
            }
            Some('y') => {
                self.pos += 1;
                Ok(RationalFunction::y())
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'".into()));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
                    self.pos += 1;
                }
                let lit: String = self.chars[start..self.pos].iter().collect();
                let v = parse_rational(&lit).map_err(|_| self.error(format!("bad number {lit:?}")))?;
                Ok(RationalFunction::constant(v))
            }
            Some(c) => Err(self.error(format!("unexpected {c:?}"))),
            None => Err(self.error("unexpected end of input".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{rat, ratio};

    #[test]
    fn parse_and_evaluate() {
        let f = RationalFunction::parse("(x - 1)/(2y) + 3/4").unwrap();
        assert_eq!(f.eval(&rat(3), &rat(2)).unwrap(), ratio(5, 4));
        let g = RationalFunction::parse("x^2y^-1").unwrap();
        assert_eq!(g.eval(&rat(2), &rat(8)).unwrap(), ratio(1, 2));
        let h = RationalFunction::parse("-x^(2) + 0.5").unwrap();
        assert_eq!(h.eval(&rat(1), &rat(0)).unwrap(), ratio(-1, 2));
    }

    #[test]
    fn parse_errors_name_the_field() {
        for bad in ["x +", "x/0", "(x", "z", "x^y", ""] {
            match RationalFunction::parse(bad) {
                Err(Error::Parse { field, .. }) => assert_eq!(field, "coordinate function"),
                other => panic!("{bad:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn display_round_trips() {
        for s in ["x", "x/y", "(x-1)/(y+2)", "3x^2 - y/5", "-x"] {
            let f = RationalFunction::parse(s).unwrap();
            let g = RationalFunction::parse(&f.to_string()).unwrap();
            for (a, b) in [(2, 3), (-1, 7), (5, -2)] {
                assert_eq!(f.eval(&rat(a), &rat(b)), g.eval(&rat(a), &rat(b)), "{s} -> {f}");
            }
        }
    }

    #[test]
    fn gradient_of_monomials() {
        let p = Poly2::x().pow(3).mul(&Poly2::y().pow(2));
        let (dx, dy) = p.gradient();
        assert_eq!(dx.eval(&rat(1), &rat(1)), rat(3));
        assert_eq!(dy.eval(&rat(1), &rat(1)), rat(2));
    }
}
