//! Exact coefficient fields and dense univariate polynomials.

mod field;
pub mod linalg;
mod poly;
mod resultant;

pub use field::{Elem, Field, FieldKind, Fraction};
pub use poly::Poly;
pub use resultant::resultant;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary precision rational in lowest terms with positive denominator.
pub type Rat = num_rational::BigRational;

/// Failures of the exact arithmetic layer.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("operands belong to different coefficient fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("modulus of `{0}` is reducible: found a zero divisor")]
    ZeroDivisor(alloc::string::String),
    #[error("{0} is not prime")]
    NotPrime(u32),
}

/// Builds the rational `n/d`. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Exponent of `p` in a nonzero integer.
pub fn int_ord(n: &BigInt, p: u32) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut k = 0;
    loop {
        let (q, r) = num_integer::Integer::div_rem(&n, &p);
        if !r.is_zero() {
            return k;
        }
        n = q;
        k += 1;
    }
}

/// Exponent of `p` in a nonzero rational.
pub fn rat_ord(x: &Rat, p: u32) -> i64 {
    int_ord(x.numer(), p) - int_ord(x.denom(), p)
}

pub fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= p as u64 {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Exponent of `p` in a positive integer.
pub fn ord_u64(mut n: u64, p: u64) -> u32 {
    let mut k = 0;
    while n % p == 0 && n > 0 {
        n /= p;
        k += 1;
    }
    k
}

/// `n` with every factor `p` removed.
pub fn prime_to_part(mut n: u64, p: u64) -> u64 {
    if p < 2 {
        return n;
    }
    while n % p == 0 && n > 0 {
        n /= p;
    }
    n
}

/// Binomial coefficient as a big integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= BigInt::from(n - i);
        acc /= BigInt::from(i + 1);
    }
    acc
}
