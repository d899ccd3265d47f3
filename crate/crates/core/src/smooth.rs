//! Factor bases, smoothness bounds and relation collection.
//!
//! A relation for a base element `a` is an exponent `t` such that
//! `a^t mod p` factors completely over the factor base. Candidates are tested
//! by trial division only; [`RelationSearch`] is the single place a faster
//! smoothness test would plug in.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::modmath::{self, FixedBase, Montgomery};

/// Default cap on candidates tested by one [`collect_relations`] call.
pub const DEFAULT_CANDIDATE_CAP: u64 = 10_000_000;

/// Exact division test by an odd prime via its inverse modulo `2^64`.
#[derive(Debug, Clone, Copy)]
struct OddDivisor {
    inv: u64,
    limit: u64,
}

impl OddDivisor {
    fn new(p: u64) -> Self {
        let mut inv = p;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(p.wrapping_mul(inv)));
        }
        OddDivisor { inv, limit: u64::MAX / p }
    }

    /// `Some(m / p)` when `p | m`.
    #[inline]
    fn divide(&self, m: u64) -> Option<u64> {
        let q = m.wrapping_mul(self.inv);
        (q <= self.limit).then_some(q)
    }
}

/// All primes up to a smoothness bound, ascending.
#[derive(Debug, Clone)]
pub struct FactorBase {
    bound: u64,
    primes: Vec<u64>,
    divisors: Vec<OddDivisor>,
}

impl FactorBase {
    pub fn new(bound: u64) -> Result<Self> {
        if bound < 2 {
            return Err(Error::invalid(format!("smoothness bound must be at least 2, got {bound}")));
        }
        let primes = sieve(bound);
        let divisors =
            primes.iter().map(|&p| if p == 2 { OddDivisor { inv: 0, limit: 0 } } else { OddDivisor::new(p) }).collect();
        Ok(FactorBase { bound, primes, divisors })
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Number of primes `k`.
    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn index_of(&self, prime: u64) -> Option<usize> {
        self.primes.binary_search(&prime).ok()
    }

    /// Exponent vector of `m` over the base, or `None` if `m` is not smooth.
    /// `m` must be nonzero.
    pub fn factor(&self, m: u64) -> Option<Vec<u32>> {
        debug_assert!(m != 0);
        let mut exps = vec![0u32; self.primes.len()];
        let tz = m.trailing_zeros();
        exps[0] = tz;
        let mut m = m >> tz;
        for (i, (&p, div)) in self.primes.iter().zip(&self.divisors).enumerate().skip(1) {
            if m < p.saturating_mul(p) {
                // what is left is 1 or a single prime
                break;
            }
            while let Some(q) = div.divide(m) {
                m = q;
                exps[i] += 1;
            }
        }
        if m == 1 {
            return Some(exps);
        }
        let i = self.index_of(m)?;
        exps[i] += 1;
        Some(exps)
    }
}

fn sieve(bound: u64) -> Vec<u64> {
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

pub fn build_factor_base(bound: u64) -> Result<FactorBase> {
    FactorBase::new(bound)
}

/// `Some(exponents)` when `m` is B-smooth for the given base.
pub fn factor_over_base(m: u64, base: &FactorBase) -> Result<Option<Vec<u32>>> {
    if m == 0 {
        return Err(Error::invalid("0 has no factorization"));
    }
    Ok(base.factor(m))
}

/// Closed-form smoothness bound family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundFormula {
    /// `exp(sqrt(ln p * ln ln p / 2))`
    SqrtHalf,
    /// `exp(sqrt(ln p * ln ln p) / 2)`
    HalfSqrt,
}

impl BoundFormula {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundFormula::SqrtHalf => "sqrt-half",
            BoundFormula::HalfSqrt => "half-sqrt",
        }
    }

    pub fn evaluate(&self, p: u128) -> f64 {
        let ln_p = (p as f64).ln();
        let t = ln_p * ln_p.ln();
        match self {
            BoundFormula::SqrtHalf => (t / 2.0).sqrt().exp(),
            BoundFormula::HalfSqrt => (t.sqrt() / 2.0).exp(),
        }
    }
}

impl fmt::Display for BoundFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sqrt-half" => Ok(BoundFormula::SqrtHalf),
            "half-sqrt" => Ok(BoundFormula::HalfSqrt),
            other => Err(Error::invalid(format!("unknown bound formula `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSpec {
    pub formula: BoundFormula,
    pub multiplier: f64,
}

impl BoundSpec {
    pub fn new(formula: BoundFormula, multiplier: f64) -> Result<Self> {
        if !(multiplier > 0.0 && multiplier.is_finite()) {
            return Err(Error::invalid(format!("bound multiplier must be positive, got {multiplier}")));
        }
        Ok(BoundSpec { formula, multiplier })
    }
}

/// `multiplier * F(p)` before rounding.
pub fn smoothness_bound_raw(p: u128, spec: &BoundSpec) -> f64 {
    spec.multiplier * spec.formula.evaluate(p)
}

/// The bound rounded half-up and clamped to at least 2.
pub fn smoothness_bound(p: u128, spec: &BoundSpec) -> u64 {
    let b = (smoothness_bound_raw(p, spec) + 0.5).floor();
    if b < 2.0 {
        2
    } else {
        b as u64
    }
}

/// `base_elem^t mod p = prod p_i^{e_i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    pub t: u64,
    pub exponents: Vec<u32>,
}

impl Relation {
    /// Multiplies the factorization back out modulo `p`.
    pub fn value(&self, base: &FactorBase, p: u64) -> u64 {
        let p = p as u128;
        self.exponents
            .iter()
            .zip(base.primes())
            .filter(|(&e, _)| e > 0)
            .fold(1u128, |acc, (&e, &q)| modmath::mul_mod(acc, modmath::pow_unchecked(q as u128, e as u128, p), p))
            as u64
    }
}

/// Stateful search for relations of one base element, with a candidate cap
/// spanning every call.
#[derive(Debug, Clone)]
pub struct RelationSearch<'a> {
    p: u64,
    base: &'a FactorBase,
    powers: FixedBase,
    mont: Montgomery,
    /// Montgomery form of the cofactor `c` in `c * base_elem^t`.
    cofactor: Option<u64>,
    tested: u64,
    found: u64,
    cap: u64,
}

impl<'a> RelationSearch<'a> {
    pub fn new(base_elem: u64, p: u64, base: &'a FactorBase, cap: u64) -> Result<Self> {
        if p < 5 {
            return Err(Error::invalid(format!("prime modulus too small: {p}")));
        }
        if !(2..p).contains(&base_elem) {
            return Err(Error::invalid(format!("base element {base_elem} outside [2, {p})")));
        }
        let mont = Montgomery::new(p)?;
        Ok(RelationSearch {
            p,
            base,
            powers: FixedBase::new(base_elem, mont),
            mont,
            cofactor: None,
            tested: 0,
            found: 0,
            cap,
        })
    }

    /// Searches for `t` with `cofactor * base_elem^t mod p` smooth instead.
    pub fn with_cofactor(mut self, cofactor: u64) -> Self {
        self.cofactor = Some(self.mont.to_mont(cofactor));
        self
    }

    pub fn candidates_tested(&self) -> u64 {
        self.tested
    }

    pub fn relations_found(&self) -> u64 {
        self.found
    }

    /// Draws `t` uniformly from `[1, p - 2]` until a smooth value appears.
    pub fn next_relation<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<Relation> {
        loop {
            if self.tested >= self.cap {
                return Err(Error::BudgetExceeded { candidates: self.tested, rounds: 0 });
            }
            self.tested += 1;
            let t = rng.gen_range(1..=self.p - 2);
            let mut value = self.powers.pow(t);
            if let Some(c) = self.cofactor {
                value = self.mont.mul(self.mont.to_mont(value), c);
                value = self.mont.from_mont(value);
            }
            if let Some(exponents) = self.base.factor(value) {
                self.found += 1;
                return Ok(Relation { t, exponents });
            }
        }
    }

    pub fn collect<R: Rng + ?Sized>(&mut self, count: usize, rng: &mut R) -> Result<Vec<Relation>> {
        (0..count).map(|_| self.next_relation(rng)).collect()
    }
}

/// Relations together with the number of candidates examined.
#[derive(Debug, Clone)]
pub struct RelationBatch {
    pub relations: Vec<Relation>,
    pub candidates_tested: u64,
}

/// Collects exactly `count` relations for `base_elem` with the default
/// candidate cap.
pub fn collect_relations<R: Rng + ?Sized>(
    base_elem: u64,
    p: u64,
    base: &FactorBase,
    count: usize,
    rng: &mut R,
) -> Result<RelationBatch> {
    collect_relations_capped(base_elem, p, base, count, DEFAULT_CANDIDATE_CAP, rng)
}

pub fn collect_relations_capped<R: Rng + ?Sized>(
    base_elem: u64,
    p: u64,
    base: &FactorBase,
    count: usize,
    cap: u64,
    rng: &mut R,
) -> Result<RelationBatch> {
    if count == 0 {
        return Err(Error::invalid("relation count must be at least 1"));
    }
    let mut search = RelationSearch::new(base_elem, p, base, cap)?;
    let relations = search.collect(count, rng)?;
    Ok(RelationBatch { relations, candidates_tested: search.candidates_tested() })
}
