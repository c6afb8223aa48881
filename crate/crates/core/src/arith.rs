//! Big-integer helpers shared by the exact modules.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// `k^e` for a nonnegative exponent.
pub fn kpow(k: u64, e: u64) -> BigInt {
    let e = u32::try_from(e).expect("exponent exceeds u32");
    BigInt::from(k).pow(e)
}

/// Largest `j` with `k^j <= x`, for `x >= 1`.
pub fn ilog(k: u64, x: &BigInt) -> u64 {
    assert!(k >= 2, "base must be at least 2");
    assert!(x.is_positive(), "ilog of a nonpositive value");
    // Start from the bit-length estimate and correct.
    let bits = x.bits();
    let kbits = 64 - u64::from((k).leading_zeros()); // k in [2^(kbits-1), 2^kbits)
    let mut j = (bits - 1) / kbits;
    let mut p = kpow(k, j);
    while &p > x {
        j -= 1;
        p /= k;
    }
    loop {
        let next = &p * k;
        if &next > x {
            return j;
        }
        p = next;
        j += 1;
    }
}

/// Floor of the `n`-th root of a nonnegative integer.
pub fn floor_root(x: &BigInt, n: u32) -> BigInt {
    assert!(!x.is_negative(), "root of a negative value");
    assert!(n >= 1);
    if n == 1 {
        return x.clone();
    }
    x.nth_root(n)
}

/// Exact `n`-th root if `x` is a perfect `n`-th power.
pub fn exact_root(x: &BigInt, n: u32) -> Option<BigInt> {
    let r = floor_root(x, n);
    (r.pow(n) == *x).then_some(r)
}

pub fn floor_ratio(num: &BigInt, den: &BigInt) -> BigInt {
    num.div_floor(den)
}

pub fn rational_floor(x: &BigRational) -> BigInt {
    x.floor().to_integer()
}

/// Compare `k^e * lhs` against `rhs` for any integer exponent `e` and nonnegative operands.
pub fn cmp_scaled(k: u64, e: i64, lhs: &BigInt, rhs: &BigInt) -> Ordering {
    if e >= 0 {
        (kpow(k, e as u64) * lhs).cmp(rhs)
    } else {
        lhs.cmp(&(kpow(k, e.unsigned_abs()) * rhs))
    }
}

/// Base-`k` digits of a nonnegative integer, least significant first.
pub fn digits_lsb(k: u64, n: &BigUint) -> Vec<u32> {
    if n.is_zero() {
        return Vec::new();
    }
    let mut out = n.to_radix_le(k as u32);
    while out.last() == Some(&0) {
        out.pop();
    }
    out.into_iter().map(u32::from).collect()
}

pub fn to_i64(x: &BigInt) -> Option<i64> {
    x.to_i64()
}

pub fn is_unit(x: &BigInt) -> bool {
    x.is_one() || (x.sign() == Sign::Minus && x.magnitude().is_one())
}
