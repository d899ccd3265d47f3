//! Modular arithmetic and elementary number theory.
//!
//! Generic routines operate on `u128`. When the modulus fits in 64 bits the
//! product of two residues is formed exactly in `u128`; above that a
//! double-and-add loop is used, which is slow but only needed when factoring
//! the occasional large cofactor.
//!
//! [`Montgomery`] and [`FixedBase`] are the hot-path types used by the
//! solvers for odd moduli below `2^63`.

use num_integer::Integer;
use rand::Rng;

use crate::error::{Error, Result};
use crate::rng::{derive_seed, rng_from_seed};

/// Largest input accepted by [`factor_integer`], in bits.
pub const FACTOR_CEILING_BITS: u32 = 80;

const TRIAL_DIVISION_LIMIT: u64 = 1_000_000;

/// Deterministic Miller-Rabin witnesses, sufficient for every `n < 2^64`.
const MR_BASES_64: [u128; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Extra random rounds used above `2^64`.
const MR_RANDOM_ROUNDS: usize = 40;

#[inline]
fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    debug_assert!(a < m && b < m);
    if a >= m - b {
        a - (m - b)
    } else {
        a + b
    }
}

#[inline]
fn sub_mod(a: u128, b: u128, m: u128) -> u128 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

/// `a * b mod m` for `m >= 1`.
#[inline]
pub fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    if m <= u64::MAX as u128 {
        return ((a % m) * (b % m)) % m;
    }
    let mut a = a % m;
    let mut b = b % m;
    let mut acc = 0u128;
    while b > 0 {
        if b & 1 == 1 {
            acc = add_mod(acc, a, m);
        }
        a = add_mod(a, a, m);
        b >>= 1;
    }
    acc
}

/// `base^exponent mod modulus`, with `0^0 = 1`.
pub fn mod_pow(base: u128, exponent: u128, modulus: u128) -> Result<u128> {
    if modulus < 2 {
        return Err(Error::invalid(format!("modulus must be at least 2, got {modulus}")));
    }
    Ok(pow_unchecked(base, exponent, modulus))
}

pub(crate) fn pow_unchecked(base: u128, mut exponent: u128, modulus: u128) -> u128 {
    let mut acc = 1 % modulus;
    let mut sq = base % modulus;
    while exponent > 0 {
        if exponent & 1 == 1 {
            acc = mul_mod(acc, sq, modulus);
        }
        sq = mul_mod(sq, sq, modulus);
        exponent >>= 1;
    }
    acc
}

pub fn gcd(a: u128, b: u128) -> u128 {
    a.gcd(&b)
}

/// Inverse of `a` modulo `n`, if `gcd(a, n) = 1`.
pub fn mod_inv(a: u128, n: u128) -> Option<u128> {
    if n < 2 {
        return None;
    }
    // extended Euclid with the Bezout coefficient kept reduced mod n
    let (mut r0, mut r1) = (n, a % n);
    let (mut s0, mut s1) = (0u128, 1u128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        let next = sub_mod(s0, mul_mod(q % n, s1, n), n);
        (s0, s1) = (s1, next);
    }
    (r0 == 1).then_some(s0)
}

/// The unique `x` in `[0, prod(moduli))` matching every residue.
pub fn crt_combine(residues: &[u128], moduli: &[u128]) -> Result<u128> {
    if residues.len() != moduli.len() {
        return Err(Error::invalid("residues and moduli differ in length"));
    }
    if moduli.is_empty() {
        return Err(Error::invalid("at least one congruence is required"));
    }
    let mut x = 0u128;
    let mut modulus = 1u128;
    for (&r, &m) in residues.iter().zip(moduli) {
        if m < 2 {
            return Err(Error::invalid(format!("modulus {m} is below 2")));
        }
        if gcd(modulus, m) != 1 {
            return Err(Error::invalid(format!("modulus {m} is not coprime to the others")));
        }
        let inv = mod_inv(modulus % m, m).expect("coprime moduli");
        let r = r % m;
        let t = mul_mod(sub_mod(r, x % m, m), inv, m);
        let next = modulus.checked_mul(m).ok_or_else(|| Error::invalid("product of moduli overflows 128 bits"))?;
        x += modulus * t;
        modulus = next;
    }
    Ok(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoprimeSplit {
    /// `n = first * second` with the two parts coprime and both above 1.
    Split(u128, u128),
    /// Every prime of `n` divides the witness.
    NoSplit,
}

/// Splits `n` into coprime parts using only gcds.
///
/// The first part collects every prime-power component of `n` whose prime
/// divides `gcd(witness, n)`.
pub fn coprime_split(n: u128, witness: u128) -> Result<CoprimeSplit> {
    let g = gcd(witness, n);
    if g <= 1 || g >= n {
        return Err(Error::invalid(format!("gcd({witness}, {n}) = {g} is not a proper divisor")));
    }
    let mut first = 1u128;
    let mut rest = n;
    loop {
        let h = gcd(rest, g);
        if h == 1 {
            break;
        }
        first *= h;
        rest /= h;
    }
    if rest == 1 {
        Ok(CoprimeSplit::NoSplit)
    } else {
        Ok(CoprimeSplit::Split(first, rest))
    }
}

/// Solutions of `a x = c (mod n)` as an arithmetic progression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CongruenceSolutions {
    pub first: u128,
    pub stride: u128,
    pub count: u128,
}

impl CongruenceSolutions {
    pub fn iter(&self) -> impl Iterator<Item = u128> + '_ {
        (0..self.count).map(move |i| self.first + i * self.stride)
    }
}

/// Describes the solution set of `a x = c (mod n)` without materialising it;
/// `None` when there is no solution.
pub fn linear_congruence(a: u128, c: u128, n: u128) -> Option<CongruenceSolutions> {
    if n < 2 {
        return None;
    }
    let a = a % n;
    let c = c % n;
    let d = gcd(a, n);
    if !c.is_multiple_of(d) {
        return None;
    }
    let stride = n / d;
    let first = if stride == 1 {
        0
    } else {
        let inv = mod_inv((a / d) % stride, stride).expect("a/d is a unit mod n/d");
        mul_mod(c / d, inv, stride)
    };
    Some(CongruenceSolutions { first, stride, count: d })
}

/// All `x` in `[0, n)` with `a x = c (mod n)`, ascending.
pub fn solve_linear_congruence(a: u128, c: u128, n: u128) -> Vec<u128> {
    linear_congruence(a, c, n).map(|s| s.iter().collect()).unwrap_or_default()
}

fn miller_rabin_round(n: u128, d: u128, s: u32, a: u128) -> bool {
    let a = a % n;
    if a == 0 {
        return true;
    }
    let mut x = pow_unchecked(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Miller-Rabin. Exact below `2^64`; above that the fixed bases are followed
/// by 40 rounds with bases drawn from a stream seeded by `n` itself, so the
/// answer is reproducible.
pub fn is_probable_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    if !MR_BASES_64.iter().all(|&a| miller_rabin_round(n, d, s, a)) {
        return false;
    }
    if n <= u64::MAX as u128 {
        return true;
    }
    let mut rng = rng_from_seed(derive_seed(&[n as u64, (n >> 64) as u64]));
    (0..MR_RANDOM_ROUNDS).all(|_| {
        let a = rng.gen_range(2..n - 1);
        miller_rabin_round(n, d, s, a)
    })
}

/// A prime with exactly `bits` bits, determined by `seed`.
pub fn random_prime(bits: u32, seed: u64) -> Result<u128> {
    if !(3..=127).contains(&bits) {
        return Err(Error::invalid(format!("bit length must be in 3..=127, got {bits}")));
    }
    let mut rng = rng_from_seed(seed);
    let top = 1u128 << (bits - 1);
    let mask = (top << 1) - 1;
    loop {
        let candidate = (rng.gen::<u128>() & mask) | top | 1;
        if is_probable_prime(candidate) {
            return Ok(candidate);
        }
    }
}

/// Prime factorization with primes strictly ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub value: u128,
    pub factors: Vec<(u128, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u128> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Prime-power components `q^e`.
    pub fn prime_powers(&self) -> impl Iterator<Item = u128> + '_ {
        self.factors.iter().map(|&(p, e)| p.pow(e))
    }

    pub fn product(&self) -> u128 {
        self.factors.iter().map(|&(p, e)| p.pow(e)).product()
    }

    /// Factorization of a divisor `d` of `self.value`.
    pub fn of_divisor(&self, d: u128) -> Factorization {
        let mut rest = d;
        let mut factors = Vec::new();
        for &(p, _) in &self.factors {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            if e > 0 {
                factors.push((p, e));
            }
        }
        debug_assert_eq!(rest, 1, "{d} does not divide {}", self.value);
        Factorization { value: d, factors }
    }
}

fn brent_rho(n: u128, c: u128, start: u128) -> Option<u128> {
    let f = |y: u128| add_mod(mul_mod(y, y, n), c, n);
    let m = 128u64;
    let (mut y, mut r, mut q, mut g) = (start, 1u64, 1u128, 1u128);
    let mut x = y;
    let mut ys = y;
    while g == 1 {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            for _ in 0..m.min(r - k) {
                y = f(y);
                q = mul_mod(q, x.abs_diff(y), n);
            }
            g = gcd(q, n);
            k += m;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = gcd(x.abs_diff(ys), n);
            if g > 1 {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

fn find_factor(n: u128) -> u128 {
    let mut rng = rng_from_seed(derive_seed(&[n as u64, (n >> 64) as u64, 0xfac7]));
    loop {
        let c = rng.gen_range(1..n);
        let start = rng.gen_range(0..n);
        if let Some(d) = brent_rho(n, c, start) {
            return d;
        }
    }
}

fn split_into(n: u128, out: &mut Vec<u128>) {
    if n == 1 {
        return;
    }
    if is_probable_prime(n) {
        out.push(n);
        return;
    }
    let d = find_factor(n);
    split_into(d, out);
    split_into(n / d, out);
}

/// Complete factorization: trial division below `10^6`, then Brent's
/// variant of Pollard rho on the cofactor.
pub fn factor_integer(n: u128) -> Result<Factorization> {
    if n < 2 {
        return Err(Error::invalid(format!("cannot factor {n}")));
    }
    let bits = 128 - n.leading_zeros();
    if bits > FACTOR_CEILING_BITS {
        return Err(Error::SizeCeiling { bits, ceiling: FACTOR_CEILING_BITS });
    }
    let mut primes = Vec::new();
    let mut rest = n;
    let mut d = 2u128;
    while d < TRIAL_DIVISION_LIMIT as u128 && d * d <= rest {
        while rest.is_multiple_of(d) {
            primes.push(d);
            rest /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    split_into(rest, &mut primes);
    primes.sort_unstable();
    let mut factors: Vec<(u128, u32)> = Vec::new();
    for p in primes {
        match factors.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => factors.push((p, 1)),
        }
    }
    Ok(Factorization { value: n, factors })
}

/// Multiplicative order of `a` modulo the prime `p`, given `p - 1` factored.
pub fn multiplicative_order(a: u128, p: u128, p_minus_1: &Factorization) -> u128 {
    let mut order = p - 1;
    for q in p_minus_1.primes() {
        while order.is_multiple_of(q) && pow_unchecked(a, order / q, p) == 1 {
            order /= q;
        }
    }
    order
}

/// Smallest generator of `(Z/p)^*`.
pub fn find_generator(p: u128, p_minus_1: &Factorization) -> Result<u128> {
    if p < 3 {
        return Err(Error::invalid(format!("no generator search for p = {p}")));
    }
    if p_minus_1.value != p - 1 || p_minus_1.product() != p - 1 {
        return Err(Error::invalid("factorization does not describe p - 1"));
    }
    (2..p)
        .find(|&g| p_minus_1.primes().all(|q| pow_unchecked(g, (p - 1) / q, p) != 1))
        .ok_or_else(|| Error::invalid(format!("{p} has no generator; is it prime?")))
}

/// Montgomery arithmetic modulo an odd `n < 2^63`, with `R = 2^64`.
#[derive(Debug, Clone, Copy)]
pub struct Montgomery {
    n: u64,
    /// `-n^{-1} mod 2^64`
    neg_inv: u64,
    /// `R^2 mod n`
    r2: u64,
}

impl Montgomery {
    pub fn new(n: u64) -> Result<Self> {
        if n.is_multiple_of(2) || !(3..1 << 63).contains(&n) {
            return Err(Error::invalid(format!("Montgomery modulus must be odd and in [3, 2^63), got {n}")));
        }
        let mut inv = n;
        for _ in 0..5 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(n.wrapping_mul(inv)));
        }
        let r1 = ((1u128 << 64) % n as u128) as u64;
        let r2 = ((r1 as u128 * r1 as u128) % n as u128) as u64;
        Ok(Montgomery { n, neg_inv: inv.wrapping_neg(), r2 })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.n
    }

    #[inline]
    fn redc(&self, t: u128) -> u64 {
        let m = (t as u64).wrapping_mul(self.neg_inv);
        let u = ((t + m as u128 * self.n as u128) >> 64) as u64;
        if u >= self.n {
            u - self.n
        } else {
            u
        }
    }

    #[inline]
    pub fn to_mont(&self, a: u64) -> u64 {
        self.redc((a % self.n) as u128 * self.r2 as u128)
    }

    #[inline]
    pub fn from_mont(&self, a: u64) -> u64 {
        self.redc(a as u128)
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        self.redc(a as u128 * b as u128)
    }

    #[inline]
    pub fn one(&self) -> u64 {
        self.to_mont(1)
    }

    /// Plain-domain exponentiation.
    pub fn pow(&self, base: u64, mut exp: u64) -> u64 {
        let mut acc = self.one();
        let mut sq = self.to_mont(base);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, sq);
            }
            sq = self.mul(sq, sq);
            exp >>= 1;
        }
        self.from_mont(acc)
    }
}

/// Windowed table of powers of one base, for repeated `base^t mod p`.
#[derive(Debug, Clone)]
pub struct FixedBase {
    mont: Montgomery,
    /// `table[w][d] = base^(d * 256^w)` in Montgomery form
    table: Vec<[u64; 256]>,
}

impl FixedBase {
    pub fn new(base: u64, mont: Montgomery) -> Self {
        let windows = (64 - mont.modulus().leading_zeros()).div_ceil(8).max(1) as usize;
        let mut table = Vec::with_capacity(windows);
        let mut g = mont.to_mont(base);
        for _ in 0..windows {
            let mut row = [0u64; 256];
            row[0] = mont.one();
            for d in 1..256 {
                row[d] = mont.mul(row[d - 1], g);
            }
            g = mont.mul(row[255], g);
            table.push(row);
        }
        FixedBase { mont, table }
    }

    /// `base^exp mod p` for `exp < p`.
    #[inline]
    pub fn pow(&self, mut exp: u64) -> u64 {
        let mut acc = self.mont.one();
        for row in &self.table {
            if exp == 0 {
                break;
            }
            let digit = (exp & 0xff) as usize;
            if digit != 0 {
                acc = self.mont.mul(acc, row[digit]);
            }
            exp >>= 8;
        }
        debug_assert_eq!(exp, 0, "exponent wider than the table");
        self.mont.from_mont(acc)
    }
}
