//! Generic-group baselines.

use std::collections::HashMap;
use std::time::Instant;

use rand::Rng;

use super::{
    derive_x_from_match, verify_solution, Algorithm, Budget, Counters, DlpInstance, Field, SolveResult,
    ENUMERATION_LIMIT,
};
use crate::error::{Error, Result};
use crate::modmath::{self, mul_mod};

/// Orders up to this are searched exhaustively by [`solve_pollard_rho`].
const SMALL_ORDER: u64 = 1 << 10;

fn mul(a: u64, b: u64, p: u64) -> u64 {
    mul_mod(a as u128, b as u128, p as u128) as u64
}

/// Smallest `x` in `[0, n)` with `g^x = target (mod p)`.
pub(crate) fn bsgs_smallest(g: u64, target: u64, n: u64, p: u64) -> Option<u64> {
    if n == 0 {
        return None;
    }
    let m = (n as f64).sqrt().ceil() as u64;
    let m = m.max(1);
    let mut baby: HashMap<u64, u64> = HashMap::with_capacity(m as usize);
    let mut cur = 1u64 % p;
    for j in 0..m {
        baby.entry(cur).or_insert(j);
        cur = mul(cur, g, p);
    }
    // cur = g^m
    let giant = modmath::mod_inv(cur as u128, p as u128)? as u64;
    let mut gamma = target % p;
    let mut i = 0u64;
    while i * m < n {
        if let Some(&j) = baby.get(&gamma) {
            let x = i * m + j;
            return (x < n).then_some(x);
        }
        gamma = mul(gamma, giant, p);
        i += 1;
    }
    None
}

/// Smallest `x` in `[0, n)` with `g^x = b (mod p)`, by baby-step giant-step.
pub fn discrete_log_bounded(g: u64, b: u64, p: u64, n: u64) -> Result<Option<u64>> {
    if p < 2 {
        return Err(Error::invalid(format!("modulus {p} below 2")));
    }
    if n > 1 << 62 {
        return Err(Error::invalid(format!("search range {n} too large")));
    }
    Ok(bsgs_smallest(g % p, b % p, n, p))
}

fn finish(x: u64, algorithm: Algorithm, counters: Counters, inst: &DlpInstance) -> Result<SolveResult> {
    if !verify_solution(inst, x) {
        return Err(Error::NoSolution);
    }
    Ok(SolveResult { x, algorithm, counters, matched_prime: None })
}

fn elapsed_only(start: Instant) -> Counters {
    Counters { elapsed: start.elapsed(), ..Default::default() }
}

/// Baby-step giant-step over `[0, ord g)`, or over `[0, order_hint)` when a
/// multiple of the order is already known.
pub fn solve_bsgs(inst: &DlpInstance, order_hint: Option<u64>) -> Result<SolveResult> {
    let start = Instant::now();
    if inst.b == 1 {
        return finish(0, Algorithm::BabyStepGiantStep, elapsed_only(start), inst);
    }
    let n = match order_hint {
        Some(n) if n >= 1 => n,
        Some(_) => return Err(Error::invalid("order hint must be positive")),
        None => Field::new(inst.p)?.order(inst.g),
    };
    let x = bsgs_smallest(inst.g, inst.b, n, inst.p).ok_or(Error::NoSolution)?;
    finish(x, Algorithm::BabyStepGiantStep, elapsed_only(start), inst)
}

#[derive(Clone, Copy)]
struct Walk {
    y: u64,
    a: u64,
    c: u64,
}

impl Walk {
    /// 3-way partition on `y mod 3`.
    fn step(&mut self, inst: &DlpInstance, n: u64) {
        let p = inst.p;
        match self.y % 3 {
            0 => {
                self.y = mul(self.y, inst.b, p);
                self.c = (self.c + 1) % n;
            }
            1 => {
                self.y = mul(self.y, self.y, p);
                self.a = ((self.a as u128 * 2) % n as u128) as u64;
                self.c = ((self.c as u128 * 2) % n as u128) as u64;
            }
            _ => {
                self.y = mul(self.y, inst.g, p);
                self.a = (self.a + 1) % n;
            }
        }
    }
}

/// Pollard rho with Floyd cycle detection.
///
/// A collision `g^a1 b^c1 = g^a2 b^c2` gives `(c1 - c2) x = a2 - a1 (mod ord g)`.
/// Walks restart from a fresh random point when the collision is degenerate
/// or leaves more than 2^16 candidate solutions.
pub fn solve_pollard_rho<R: Rng + ?Sized>(inst: &DlpInstance, budget: &Budget, rng: &mut R) -> Result<SolveResult> {
    let start = Instant::now();
    if inst.b == 1 {
        return finish(0, Algorithm::PollardRho, elapsed_only(start), inst);
    }
    let field = Field::new(inst.p)?;
    let n = field.order(inst.g);
    if !field.in_subgroup(inst.b, n) {
        return Err(Error::NoSolution);
    }
    if n <= SMALL_ORDER {
        // the walk degenerates in tiny groups
        let x = bsgs_smallest(inst.g, inst.b, n, inst.p).ok_or(Error::NoSolution)?;
        return finish(x, Algorithm::PollardRho, elapsed_only(start), inst);
    }
    let mut steps = 0u64;
    for restart in 0..=budget.max_restarts {
        let a = rng.gen_range(0..n);
        let c = rng.gen_range(0..n);
        let y = mul(field.pow(inst.g, a), field.pow(inst.b, c), inst.p);
        let mut tortoise = Walk { y, a, c };
        let mut hare = tortoise;
        loop {
            if steps >= budget.max_candidates {
                return Err(Error::BudgetExceeded { candidates: steps, rounds: restart });
            }
            steps += 1;
            tortoise.step(inst, n);
            hare.step(inst, n);
            hare.step(inst, n);
            if tortoise.y == hare.y {
                break;
            }
        }
        let beta = (tortoise.c + n - hare.c) % n;
        let alpha = (hare.a + n - tortoise.a) % n;
        let Some(sols) = modmath::linear_congruence(beta as u128, alpha as u128, n as u128) else {
            continue;
        };
        if beta == 0 || sols.count > ENUMERATION_LIMIT {
            continue;
        }
        if let Some(x) = derive_x_from_match(alpha, beta, n, inst) {
            let counters =
                Counters { candidates_tested: steps, rounds: restart, elapsed: start.elapsed(), ..Default::default() };
            return finish(x, Algorithm::PollardRho, counters, inst);
        }
    }
    Err(Error::BudgetExceeded { candidates: steps, rounds: budget.max_restarts })
}

/// Pohlig-Hellman: the log modulo each prime power `q^e` of `ord g` is built
/// digit by digit with baby-step giant-step in the order-`q` subgroup, then the
/// pieces are joined by CRT.
pub fn solve_pohlig_hellman(inst: &DlpInstance) -> Result<SolveResult> {
    let start = Instant::now();
    if inst.b == 1 {
        return finish(0, Algorithm::PohligHellman, elapsed_only(start), inst);
    }
    let field = Field::new(inst.p)?;
    let n = field.order(inst.g);
    if !field.in_subgroup(inst.b, n) {
        return Err(Error::NoSolution);
    }
    let p = inst.p;
    let mut residues = Vec::new();
    let mut moduli = Vec::new();
    for &(q, e) in &field.order_factorization(n).factors {
        let q = q as u64;
        let gamma = field.pow(inst.g, n / q);
        let g_inv = modmath::mod_inv(inst.g as u128, p as u128).ok_or(Error::NoSolution)? as u64;
        let mut x_k = 0u64;
        let mut q_k = 1u64;
        for _ in 0..e {
            let shifted = mul(field.pow(g_inv, x_k), inst.b, p);
            let h = field.pow(shifted, n / (q_k * q));
            let d = bsgs_smallest(gamma, h, q, p).ok_or(Error::NoSolution)?;
            x_k += d * q_k;
            q_k *= q;
        }
        residues.push(x_k as u128);
        moduli.push(q_k as u128);
    }
    let x = modmath::crt_combine(&residues, &moduli)? as u64;
    let counters = Counters { elapsed: start.elapsed(), ..Default::default() };
    finish(x, Algorithm::PohligHellman, counters, inst)
}
