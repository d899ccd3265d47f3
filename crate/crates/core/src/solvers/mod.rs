//! Discrete logarithm solvers.
//!
//! | tag   | algorithm |
//! |-------|-----------|
//! | `dic` | double index calculus: log tables for both `g` and `b`, stop at the first shared prime |
//! | `ic`  | classic index calculus: all factor-base logs base `g`, then one relation for `b * g^t` |
//! | `bsgs`| baby-step giant-step |
//! | `rho` | Pollard rho with a 3-way partition and Floyd cycle detection |
//! | `ph`  | Pohlig-Hellman over the factorization of the order of `g` |
//!
//! Every solver checks `g^x = b (mod p)` before returning and reports the
//! smallest nonnegative such `x`.
//!
//! Logarithms to a base `a` are only defined modulo the order of `a`, so
//! relation systems for `a` are solved modulo `ord(a)` (which is `p - 1`
//! when `a` generates the field). This is what lets double index calculus
//! run with a base that is not a generator.

mod double;
mod generic;
mod index_calculus;
mod pipeline;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

pub use double::{
    match_at_table_sizes, solve_double_index_calculus, solve_double_index_calculus_traced, RoundSnapshot,
};
pub use generic::{discrete_log_bounded, solve_bsgs, solve_pohlig_hellman, solve_pollard_rho};
pub use index_calculus::solve_index_calculus;

use crate::error::{Error, Result};
use crate::modmath::{self, Factorization, Montgomery};
use crate::rng::{rng_from_seed, stream_seed};
use crate::smooth::{self, BoundSpec};

/// Largest modulus (exclusive) the solvers accept.
pub const MAX_MODULUS: u64 = 1 << 63;

/// Above this many congruence solutions, [`derive_x_from_match`] switches
/// from enumeration to a baby-step giant-step search over the progression.
const ENUMERATION_LIMIT: u128 = 1 << 16;

/// `g^x = b (mod p)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DlpInstance {
    pub p: u64,
    pub g: u64,
    pub b: u64,
    pub expected_x: Option<u64>,
}

impl DlpInstance {
    pub fn new(p: u64, g: u64, b: u64) -> Result<Self> {
        if p >= MAX_MODULUS {
            return Err(Error::invalid(format!("p = {p} is above the supported 2^63")));
        }
        if !modmath::is_probable_prime(p as u128) || p < 3 {
            return Err(Error::invalid(format!("p = {p} is not an odd prime")));
        }
        if !(2..p).contains(&g) {
            return Err(Error::invalid(format!("g = {g} outside [2, p)")));
        }
        if !(1..p).contains(&b) {
            return Err(Error::invalid(format!("b = {b} outside [1, p)")));
        }
        Ok(DlpInstance { p, g, b, expected_x: None })
    }

    pub fn with_expected(mut self, x: u64) -> Self {
        self.expected_x = Some(x);
        self
    }
}

/// `true` iff `g^x = b (mod p)`.
pub fn verify_solution(inst: &DlpInstance, x: u64) -> bool {
    modmath::pow_unchecked(inst.g as u128, x as u128, inst.p as u128) == inst.b as u128
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    DoubleIndexCalculus,
    DoubleIndexCalculusParallel,
    IndexCalculus,
    BabyStepGiantStep,
    PollardRho,
    PohligHellman,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::DoubleIndexCalculus,
        Algorithm::DoubleIndexCalculusParallel,
        Algorithm::IndexCalculus,
        Algorithm::BabyStepGiantStep,
        Algorithm::PollardRho,
        Algorithm::PohligHellman,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::DoubleIndexCalculus => "dic",
            Algorithm::DoubleIndexCalculusParallel => "dic-parallel",
            Algorithm::IndexCalculus => "ic",
            Algorithm::BabyStepGiantStep => "bsgs",
            Algorithm::PollardRho => "rho",
            Algorithm::PohligHellman => "ph",
        }
    }

    /// Whether the algorithm takes a smoothness bound.
    pub fn uses_factor_base(&self) -> bool {
        matches!(
            self,
            Algorithm::DoubleIndexCalculus | Algorithm::DoubleIndexCalculusParallel | Algorithm::IndexCalculus
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown algorithm `{s}`")))
    }
}

/// Caps that keep the randomized solvers from running forever.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Smoothness candidates per base element.
    pub max_candidates: u64,
    pub max_rounds: u32,
    /// Pollard rho restarts.
    pub max_restarts: u32,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_candidates: 10_000_000, max_rounds: 50, max_restarts: 64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counters {
    pub candidates_tested: u64,
    pub smooth_found: u64,
    pub rounds: u32,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub x: u64,
    pub algorithm: Algorithm,
    pub counters: Counters,
    /// The shared prime used by double index calculus.
    pub matched_prime: Option<u64>,
}

/// Verified logarithms of factor-base primes to one base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialLogTable {
    pub base_elem: u64,
    /// prime to `l` with `base_elem^l = prime (mod p)`
    pub entries: BTreeMap<u64, u64>,
}

impl PartialLogTable {
    pub fn new(base_elem: u64) -> Self {
        PartialLogTable { base_elem, entries: BTreeMap::new() }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, prime: u64) -> Option<u64> {
        self.entries.get(&prime).copied()
    }

    /// Primes present in both tables, ascending.
    pub fn intersection(&self, other: &PartialLogTable) -> Vec<u64> {
        self.entries.keys().filter(|q| other.entries.contains_key(q)).copied().collect()
    }

    /// Re-checks every entry by exponentiation.
    pub fn verify(&self, p: u64) -> bool {
        self.entries
            .iter()
            .all(|(&q, &l)| modmath::pow_unchecked(self.base_elem as u128, l as u128, p as u128) == q as u128)
    }
}

/// Recovers `x` from `g^alpha = b^beta (mod p)`, i.e. `beta x = alpha (mod n)`
/// where `n` is a multiple of `ord(g)`. Returns the smallest solution in
/// `[0, n)` that passes [`verify_solution`].
pub fn derive_x_from_match(alpha: u64, beta: u64, n: u64, inst: &DlpInstance) -> Option<u64> {
    let sols = modmath::linear_congruence(beta as u128, alpha as u128, n as u128)?;
    if sols.count <= ENUMERATION_LIMIT {
        return sols.iter().map(|x| x as u64).find(|&x| verify_solution(inst, x));
    }
    // x = first + i * stride: find the smallest i with (g^stride)^i = b / g^first
    let p = inst.p as u128;
    let step = modmath::pow_unchecked(inst.g as u128, sols.stride, p) as u64;
    let offset = modmath::pow_unchecked(inst.g as u128, sols.first, p);
    let target = modmath::mul_mod(inst.b as u128, modmath::mod_inv(offset, p)?, p) as u64;
    let i = generic::bsgs_smallest(step, target, sols.count as u64, inst.p)?;
    let x = sols.first + i as u128 * sols.stride;
    let x = x as u64;
    verify_solution(inst, x).then_some(x)
}

/// Field data shared by one solve: `p - 1` factored and Montgomery constants.
#[derive(Debug, Clone)]
pub(crate) struct Field {
    pub p: u64,
    pub p_minus_1: Factorization,
    pub mont: Montgomery,
}

impl Field {
    pub fn new(p: u64) -> Result<Self> {
        Ok(Field { p, p_minus_1: modmath::factor_integer(p as u128 - 1)?, mont: Montgomery::new(p)? })
    }

    pub fn order(&self, a: u64) -> u64 {
        modmath::multiplicative_order(a as u128, self.p as u128, &self.p_minus_1) as u64
    }

    pub fn order_factorization(&self, order: u64) -> Factorization {
        self.p_minus_1.of_divisor(order as u128)
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        self.mont.pow(a, e)
    }

    /// `b` lies in the subgroup generated by `g`.
    pub fn in_subgroup(&self, b: u64, order_g: u64) -> bool {
        self.pow(b, order_g) == 1
    }
}

/// Smoothness bound selection for the index-calculus family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundChoice {
    Fixed(u64),
    Formula(BoundSpec),
}

impl BoundChoice {
    pub fn resolve(&self, p: u64) -> u64 {
        match self {
            BoundChoice::Fixed(b) => *b,
            BoundChoice::Formula(spec) => smooth::smoothness_bound(p as u128, spec),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub bound: BoundChoice,
    pub budget: Budget,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            bound: BoundChoice::Formula(BoundSpec { formula: smooth::BoundFormula::SqrtHalf, multiplier: 0.5 }),
            budget: Budget::default(),
        }
    }
}

/// Runs `algorithm` with randomness derived from `seed`. Double index
/// calculus uses streams 0 (base `g`) and 1 (base `b`) of the seed; the other
/// randomized solvers use the seed directly.
pub fn solve(inst: &DlpInstance, algorithm: Algorithm, options: &SolveOptions, seed: u64) -> Result<SolveResult> {
    let bound = options.bound.resolve(inst.p);
    match algorithm {
        Algorithm::DoubleIndexCalculus | Algorithm::DoubleIndexCalculusParallel => {
            let mut rng_g = rng_from_seed(stream_seed(seed, 0));
            let mut rng_b = rng_from_seed(stream_seed(seed, 1));
            let parallel = algorithm == Algorithm::DoubleIndexCalculusParallel;
            solve_double_index_calculus(inst, bound, parallel, &options.budget, &mut rng_g, &mut rng_b)
        }
        Algorithm::IndexCalculus => solve_index_calculus(inst, bound, &options.budget, &mut rng_from_seed(seed)),
        Algorithm::BabyStepGiantStep => solve_bsgs(inst, None),
        Algorithm::PollardRho => solve_pollard_rho(inst, &options.budget, &mut rng_from_seed(seed)),
        Algorithm::PohligHellman => solve_pohlig_hellman(inst),
    }
}
