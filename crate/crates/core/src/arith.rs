//! Small number-theoretic helpers shared across the crate: primality for
//! machine-word integers, modular exponentiation, and factorial valuations.

use num_bigint::BigInt;
use num_traits::One;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PrimeError {
    #[error("{0} is not a prime number")]
    NotPrime(u64),
}

/// A `u64` that has been checked to be prime at construction time.
///
/// Valuations, Newton polygons, and finite-field factorization are only
/// meaningful at primes, so the prime check happens once at the boundary
/// instead of inside every algorithm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime(u64);

impl Prime {
    pub fn new(value: u64) -> Result<Self, PrimeError> {
        if is_prime_u64(value) {
            Ok(Prime(value))
        } else {
            Err(PrimeError::NotPrime(value))
        }
    }

    pub fn get(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Deterministic Miller-Rabin primality test, exact for all `u64` inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // This witness set decides primality for every integer below 3.3 * 10^24.
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// ord_p(n!) by Legendre's formula: sum of floor(n / p^i) over i >= 1.
pub fn factorial_valuation(n: u64, p: u64) -> u64 {
    debug_assert!(p >= 2);
    let mut total = 0;
    let mut q = n / p;
    while q > 0 {
        total += q;
        q /= p;
    }
    total
}

/// `base^exp` as a big integer, by repeated squaring.
pub fn big_pow(base: &BigInt, mut exp: u64) -> BigInt {
    let mut acc = BigInt::one();
    let mut sq = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            acc = &acc * &sq;
        }
        exp >>= 1;
        if exp > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

/// `p^exp` for a machine-word base, as a big integer.
pub fn big_prime_power(p: u64, exp: u64) -> BigInt {
    big_pow(&BigInt::from(p), exp)
}

/// Binomial coefficient for small arguments.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for t in 0..k {
        acc = acc * BigInt::from(n - t) / BigInt::from(t + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime_u64(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
    }

    #[test]
    fn primality_larger() {
        assert!(is_prime_u64(1_000_000_007));
        assert!(is_prime_u64((1 << 61) - 1));
        assert!(!is_prime_u64(1_000_000_007u64 * 3));
        assert!(!is_prime_u64(u64::MAX));
    }

    #[test]
    fn prime_newtype_rejects_composites() {
        assert!(Prime::new(7).is_ok());
        assert_eq!(Prime::new(9), Err(PrimeError::NotPrime(9)));
        assert_eq!(Prime::new(1), Err(PrimeError::NotPrime(1)));
    }

    #[test]
    fn factorial_valuations() {
        // ord_2(10!) = 8, ord_3(10!) = 4, ord_5(10!) = 2, ord_7(10!) = 1.
        assert_eq!(factorial_valuation(10, 2), 8);
        assert_eq!(factorial_valuation(10, 3), 4);
        assert_eq!(factorial_valuation(10, 5), 2);
        assert_eq!(factorial_valuation(10, 7), 1);
        assert_eq!(factorial_valuation(0, 3), 0);
    }

    #[test]
    fn big_pow_matches_u128() {
        assert_eq!(big_pow(&BigInt::from(3), 0), BigInt::from(1));
        assert_eq!(big_pow(&BigInt::from(3), 13), BigInt::from(3u128.pow(13)));
        assert_eq!(big_prime_power(5, 9), BigInt::from(5u128.pow(9)));
    }

    #[test]
    fn binomial_row() {
        let row: Vec<BigInt> = (0..=5).map(|k| binomial(5, k)).collect();
        let want: Vec<BigInt> = [1, 5, 10, 10, 5, 1].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(row, want);
    }
}
