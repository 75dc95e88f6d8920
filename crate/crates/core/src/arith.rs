//! Elementary integer arithmetic: primality, factorization, valuations and
//! square classes. Inputs here are desk-scale, so trial division is enough.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    if p % 2 == 0 {
        return p == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

pub fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p.to_string()))
    }
}

/// Prime factorization of |n| as (prime, exponent) pairs, ascending.
/// Zero and units factor as the empty list.
pub fn factorize(n: &BigInt) -> Vec<(u64, u32)> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut d = 2u64;
    loop {
        let dd = BigInt::from(d);
        if &dd * &dd > n {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = n.div_rem(&dd);
            if !r.is_zero() {
                break;
            }
            n = q;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if !n.is_one() {
        let p = n
            .to_u64()
            .expect("cofactor after trial division exceeds u64; input is not desk-scale");
        out.push((p, 1));
    }
    out
}

pub fn prime_divisors(n: &BigInt) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// p-adic valuation of a nonzero integer.
pub fn ord_int(a: &BigInt, p: u64) -> Result<i64> {
    if a.is_zero() {
        return Err(Error::ZeroValuation);
    }
    let p = BigInt::from(p);
    let mut a = a.clone();
    let mut v = 0;
    loop {
        let (q, r) = a.div_rem(&p);
        if !r.is_zero() {
            return Ok(v);
        }
        a = q;
        v += 1;
    }
}

/// Additive p-adic valuation of a nonzero rational.
pub fn ord_p(a: &BigRational, p: u64) -> Result<i64> {
    check_prime(p)?;
    if a.is_zero() {
        return Err(Error::ZeroValuation);
    }
    Ok(ord_int(a.numer(), p)? - ord_int(a.denom(), p)?)
}

/// Splits a nonzero integer as p^v * u with p not dividing u.
pub fn split_p(a: &BigInt, p: u64) -> (i64, BigInt) {
    debug_assert!(!a.is_zero());
    let pb = BigInt::from(p);
    let mut a = a.clone();
    let mut v = 0;
    loop {
        let (q, r) = a.div_rem(&pb);
        if !r.is_zero() {
            return (v, a);
        }
        a = q;
        v += 1;
    }
}

/// Squarefree representative of the square class of a nonzero rational,
/// sign retained.
pub fn squarefree_class(a: &BigRational) -> BigInt {
    assert!(!a.is_zero(), "square class of zero");
    // n/d and n*d differ by the square d^2
    let prod = a.numer() * a.denom();
    squarefree_part(&prod)
}

pub fn squarefree_part(n: &BigInt) -> BigInt {
    assert!(!n.is_zero(), "square class of zero");
    let mut out = BigInt::one();
    for (p, e) in factorize(n) {
        if e % 2 == 1 {
            out *= p;
        }
    }
    if n.sign() == Sign::Minus {
        -out
    } else {
        out
    }
}

/// Legendre symbol (a / p) for odd prime p, with value 0 when p | a.
pub fn legendre(a: &BigInt, p: u64) -> i32 {
    let pb = BigInt::from(p);
    let a = a.mod_floor(&pb);
    if a.is_zero() {
        return 0;
    }
    let r = a.modpow(&BigInt::from((p - 1) / 2), &pb);
    if r.is_one() {
        1
    } else {
        -1
    }
}

pub fn pow_u64(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Inverse of `a` modulo `m` when gcd(a, m) = 1.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if !g.gcd.is_one() {
        return None;
    }
    Some(g.x.mod_floor(m))
}

/// Reduces a p-integral rational modulo `modulus` (a power of p).
pub fn reduce_p_integral(a: &BigRational, modulus: &BigInt) -> BigInt {
    let inv = mod_inverse(&a.denom().mod_floor(modulus), modulus)
        .expect("denominator must be prime to p");
    (a.numer() * inv).mod_floor(modulus)
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn int_rat(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}
