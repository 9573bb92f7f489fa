//! Integer and rational scalar utilities used across the crate.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// gcd of a slice, zero for the empty slice or all-zero input.
pub fn gcd_all(values: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for v in values {
        g = g.gcd(v);
    }
    g
}

/// lcm of a slice of nonzero values; one for the empty slice.
pub fn lcm_all(values: &[BigInt]) -> BigInt {
    let mut l = BigInt::one();
    for v in values {
        l = l.lcm(v);
    }
    l
}

/// Square-free decomposition `n = u * nu^2` with `nu > 0` and `u` square-free
/// carrying the sign of `n`.
///
/// Strategy is trial division, which is fine at the scales this crate works
/// at; inputs with `|n| >= 2^63` are rejected rather than silently slow.
pub fn squarefree_decompose(n: &BigInt) -> Result<(BigInt, BigInt)> {
    if n.is_zero() {
        return Err(Error::IsotropicVector);
    }
    let mag = n.abs().to_u64().ok_or_else(|| {
        Error::ValueTooLarge(format!("|{n}| >= 2^63; square-free factorization capped"))
    })?;
    let mut u: u64 = 1;
    let mut nu: u64 = 1;
    let mut rest = mag;
    let mut d: u64 = 2;
    while d.saturating_mul(d) <= rest {
        if rest % d == 0 {
            let mut exp = 0u32;
            while rest % d == 0 {
                rest /= d;
                exp += 1;
            }
            nu *= d.pow(exp / 2);
            if exp % 2 == 1 {
                u *= d;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    // Whatever remains is prime (or 1) and appears to the first power.
    u *= rest;
    let mut u = BigInt::from(u);
    if n.sign() == Sign::Minus {
        u = -u;
    }
    Ok((u, BigInt::from(nu)))
}

/// Legendre symbol (a/p) for odd prime p, via Euler's criterion.
pub fn legendre(a: &BigInt, p: u64) -> i8 {
    debug_assert!(p > 2 && is_prime_u64(p));
    let pb = BigInt::from(p);
    let r = a.mod_floor(&pb);
    if r.is_zero() {
        return 0;
    }
    let r = r.to_u64().unwrap();
    let e = pow_mod_u64(r, (p - 1) / 2, p);
    if e == 1 {
        1
    } else {
        debug_assert_eq!(e, p - 1);
        -1
    }
}

/// `base^exp mod m` on u64 operands.
pub fn pow_mod_u64(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut b: u128 = (base % m) as u128;
    let m128 = m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Deterministic Miller-Rabin for u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = ((x as u128 * x as u128) % n as u128) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization of a positive u64 by trial division.
pub fn factorize_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1);
    let mut out = Vec::new();
    let mut d: u64 = 2;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut e = 0u32;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// True iff |n| is square-free (n != 0).
pub fn is_squarefree(n: &BigInt) -> Result<bool> {
    let (_, nu) = squarefree_decompose(n)?;
    Ok(nu.is_one())
}

/// `p^e` as an exact rational, for any integer exponent.
pub fn rational_prime_power(p: u64, e: i64) -> BigRational {
    let mag = BigInt::from(p).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(mag)
    } else {
        BigRational::new(BigInt::one(), mag)
    }
}

/// `n^e` for a BigInt base and u32 exponent.
pub fn big_pow(n: &BigInt, e: u32) -> BigInt {
    n.pow(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn squarefree_small() {
        let (u, nu) = squarefree_decompose(&BigInt::from(12)).unwrap();
        assert_eq!((u, nu), (BigInt::from(3), BigInt::from(2)));
        let (u, nu) = squarefree_decompose(&BigInt::from(-18)).unwrap();
        assert_eq!((u, nu), (BigInt::from(-2), BigInt::from(3)));
        let (u, nu) = squarefree_decompose(&BigInt::from(1)).unwrap();
        assert_eq!((u, nu), (BigInt::from(1), BigInt::from(1)));
        assert!(squarefree_decompose(&BigInt::zero()).is_err());
    }

    #[test]
    fn squarefree_cap() {
        let big = BigInt::from(u64::MAX) * 4;
        assert!(matches!(
            squarefree_decompose(&big),
            Err(Error::ValueTooLarge(_))
        ));
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre(&BigInt::from(1), 7), 1);
        assert_eq!(legendre(&BigInt::from(3), 3), 0);
        assert_eq!(legendre(&BigInt::from(2), 5), -1);
        // -1 is a residue mod p iff p = 1 mod 4
        assert_eq!(legendre(&BigInt::from(-1), 5), 1);
        assert_eq!(legendre(&BigInt::from(-1), 7), -1);
    }

    #[test]
    fn primality() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(3));
        assert!(is_prime_u64(7919));
        assert!(!is_prime_u64(1));
        assert!(!is_prime_u64(561)); // Carmichael
        assert!(is_prime_u64(2_147_483_647));
    }

    #[test]
    fn factorization_roundtrip() {
        for n in [1u64, 2, 12, 9973, 10_000] {
            let f = factorize_u64(n);
            let back: u64 = f.iter().map(|(p, e)| p.pow(*e)).product();
            assert_eq!(back, n);
        }
    }
}
