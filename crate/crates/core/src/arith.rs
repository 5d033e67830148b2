//! Small integer helpers: primality, sieving, factoring and `p`-adic
//! valuations of integers and rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::numfield::Rational;

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut q = 3u64;
    while q.saturating_mul(q) <= n {
        if n % q == 0 {
            return false;
        }
        q += 2;
    }
    true
}

/// Primes `<= limit` by the sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        out.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    out
}

/// Distinct prime divisors of `|n|` by trial division.
pub fn prime_divisors(n: &BigInt) -> Vec<u64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut q = 2u64;
    loop {
        let qb = BigInt::from(q);
        if &qb * &qb > n {
            break;
        }
        if (&n % &qb).is_zero() {
            out.push(q);
            while (&n % &qb).is_zero() {
                n /= &qb;
            }
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > BigInt::one() {
        out.push(n.to_u64().expect("prime cofactor exceeds u64"));
    }
    out
}

/// `v_p(n)`; `n` must be nonzero.
pub fn vp_int(n: &BigInt, p: u64) -> u64 {
    debug_assert!(!n.is_zero());
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// `v_p(r)` for a nonzero rational.
pub fn vp_rational(r: &Rational, p: u64) -> i64 {
    vp_int(r.numer(), p) as i64 - vp_int(r.denom(), p) as i64
}

pub fn pow_big(p: u64, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut q = 2u64;
    while q * q <= m {
        if m % q == 0 {
            while m % q == 0 {
                m /= q;
            }
            result -= result / q;
        }
        q += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Reduces a rational with denominator prime to `p` into `Z / modulus`.
/// Returns `None` when `p` divides the denominator.
pub fn rational_mod(r: &Rational, p: u64, modulus: &BigInt) -> Option<BigInt> {
    if (r.denom() % BigInt::from(p)).is_zero() {
        return None;
    }
    let inv = mod_inverse(r.denom(), modulus)?;
    Some((r.numer() * inv).mod_floor(modulus))
}

pub fn mod_inverse(a: &BigInt, modulus: &BigInt) -> Option<BigInt> {
    let e = a.mod_floor(modulus).extended_gcd(modulus);
    if !e.gcd.is_one() {
        return None;
    }
    Some(e.x.mod_floor(modulus))
}
