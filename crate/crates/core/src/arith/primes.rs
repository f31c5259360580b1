//! Primality testing and integer factorization.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// A prime together with an exponent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimePower {
    #[serde(with = "crate::arith::bigint_string")]
    pub prime: BigInt,
    pub exponent: i64,
}

impl PrimePower {
    pub fn new(prime: BigInt, exponent: i64) -> Self {
        PrimePower { prime, exponent }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn is_prime_big(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    for &p in &WITNESSES {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let s = n1.trailing_zeros().unwrap_or(0);
    let d = &n1 >> s;
    'outer: for &a in &WITNESSES {
        let mut x = BigUint::from(a).modpow(&d, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = (&x * &x) % n;
            if x == n1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Primality of a signed integer; negative numbers and 0, 1 are not prime.
pub fn is_prime(n: &BigInt) -> bool {
    match n.to_biguint() {
        Some(u) => is_prime_big(&u),
        None => false,
    }
}

fn pollard_rho_u64(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

fn pollard_rho_big(n: &BigUint) -> BigUint {
    if n.is_even() {
        return BigUint::from(2u32);
    }
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut d = BigUint::one();
        while d.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            d = diff.gcd(n);
        }
        if &d != n {
            return d;
        }
        c += 1u32;
    }
}

fn split_into(n: BigUint, out: &mut Vec<BigUint>) {
    if n.is_one() {
        return;
    }
    if is_prime_big(&n) {
        out.push(n);
        return;
    }
    let d = match n.to_u64() {
        Some(small) => BigUint::from(pollard_rho_u64(small)),
        None => pollard_rho_big(&n),
    };
    let q = &n / &d;
    split_into(d, out);
    split_into(q, out);
}

/// Factorization of |n| into prime powers with strictly increasing primes.
pub fn factorize(n: &BigInt) -> Result<Vec<PrimePower>> {
    if n.is_zero() {
        return Err(Error::FactorizeZero);
    }
    let mut m = n.magnitude().clone();
    let mut primes: Vec<BigUint> = Vec::new();
    for p in 2u32..1000 {
        let bp = BigUint::from(p);
        if &bp * &bp > m {
            break;
        }
        while (&m % p).is_zero() {
            primes.push(bp.clone());
            m /= p;
        }
    }
    split_into(m, &mut primes);
    primes.sort();
    let mut out: Vec<PrimePower> = Vec::new();
    for p in primes {
        let p = BigInt::from(p);
        match out.last_mut() {
            Some(last) if last.prime == p => last.exponent += 1,
            _ => out.push(PrimePower::new(p, 1)),
        }
    }
    Ok(out)
}

/// The distinct primes dividing n (empty for n = ±1).
pub fn prime_divisors(n: &BigInt) -> Result<Vec<BigInt>> {
    Ok(factorize(n)?.into_iter().map(|pp| pp.prime).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fac(n: i64) -> Vec<(i64, i64)> {
        factorize(&BigInt::from(n))
            .unwrap()
            .into_iter()
            .map(|pp| (pp.prime.to_i64().unwrap(), pp.exponent))
            .collect()
    }

    #[test]
    fn small_factorizations() {
        assert_eq!(fac(12), vec![(2, 2), (3, 1)]);
        assert_eq!(fac(1), vec![]);
        assert_eq!(fac(-37), vec![(37, 1)]);
        assert_eq!(fac(-26875), vec![(5, 4), (43, 1)]);
        assert!(factorize(&BigInt::zero()).is_err());
    }

    #[test]
    fn large_semiprime() {
        let p = 1_000_000_007i64;
        let q = 998_244_353i64;
        let n = BigInt::from(p) * BigInt::from(q) * BigInt::from(q);
        let f = factorize(&n).unwrap();
        assert_eq!(f.len(), 2);
        assert_eq!(f[0], PrimePower::new(BigInt::from(q), 2));
        assert_eq!(f[1], PrimePower::new(BigInt::from(p), 1));
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let n = 5000usize;
        let mut sieve = vec![true; n];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..n {
            if sieve[i] {
                for j in (i * i..n).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for (i, &is_p) in sieve.iter().enumerate() {
            assert_eq!(is_prime_u64(i as u64), is_p, "{i}");
        }
        // strong pseudoprimes to several small bases
        assert!(!is_prime_u64(3_215_031_751));
        assert!(!is_prime_u64(3_825_123_056_546_413_051));
        assert!(is_prime_u64(18_446_744_073_709_551_557));
    }

    #[test]
    fn big_primality() {
        let m127 = (BigInt::one() << 127) - 1;
        assert!(is_prime(&m127));
        assert!(!is_prime(&(&m127 * BigInt::from(3))));
    }
}
