//! Closed-form quantities: the match-probability lower bound and the
//! nice-case count.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `1 + 2^-(uv) - 2^-u - 2^-v`, exactly.
///
/// Lower bound on the probability that tables of `u` logs base `g` and `v`
/// logs base `b` share a prime.
pub fn prob_lower_bound(u: u32, v: u32) -> Result<BigRational> {
    if u == 0 || v == 0 {
        return Err(Error::invalid(format!("table sizes must be at least 1, got ({u}, {v})")));
    }
    let inv_pow2 = |e: u64| BigRational::new(BigInt::one(), BigInt::one() << e);
    Ok(BigRational::one() + inv_pow2(u as u64 * v as u64) - inv_pow2(u as u64) - inv_pow2(v as u64))
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// `sum_{i=1..k} sum_{j=1..k-i} sum_{m=1..k-i} C(k,i) C(k-i,j) C(k-i,m)`.
pub fn nice_case_count(k: u64) -> Result<BigUint> {
    if k == 0 {
        return Err(Error::invalid("factor base size must be at least 1"));
    }
    let mut total = BigUint::zero();
    for i in 1..=k {
        let rest = k - i;
        // the j and m sums are independent: (2^rest - 1)^2
        let inner: BigUint = (1..=rest).map(|j| binomial(rest, j)).sum();
        total += binomial(k, i) * &inner * &inner;
    }
    Ok(total)
}

/// Decimal expansion of `r` when it terminates, e.g. `"0.5"` or `"-1.25"`.
pub fn exact_decimal(r: &BigRational) -> Option<String> {
    let mut den = r.denom().magnitude().clone();
    let (mut twos, mut fives) = (0u64, 0u64);
    let two = BigUint::from(2u32);
    let five = BigUint::from(5u32);
    while den.is_multiple_of(&two) {
        den /= &two;
        twos += 1;
    }
    while den.is_multiple_of(&five) {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let digits = twos.max(fives);
    let scale = BigUint::from(10u32).pow(digits as u32);
    let scaled = r.numer().magnitude() * &scale / r.denom().magnitude();
    let (int, frac) = scaled.div_rem(&scale);
    let sign = if r.numer().sign() == num_bigint::Sign::Minus { "-" } else { "" };
    if digits == 0 {
        return Some(format!("{sign}{int}"));
    }
    Some(format!("{sign}{int}.{frac:0>width$}", width = digits as usize))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Three standard deviations of a binomial proportion with success
/// probability `prob` over `trials` draws.
pub fn three_sigma_margin(prob: f64, trials: u64) -> f64 {
    3.0 * (prob * (1.0 - prob) / trials as f64).sqrt()
}
