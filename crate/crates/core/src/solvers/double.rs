use std::time::Instant;

use rand::Rng;

use super::pipeline::LogPipeline;
use super::{derive_x_from_match, verify_solution, Algorithm, Budget, Counters, DlpInstance, Field, SolveResult};
use crate::error::{Error, Result};
use crate::modmath;
use crate::smooth::FactorBase;

/// State after one round of double index calculus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundSnapshot {
    pub round: u32,
    /// factor base size
    pub k: usize,
    pub table_g: usize,
    pub table_b: usize,
    /// primes with logs in both tables, ascending
    pub shared: Vec<u64>,
}

/// Double index calculus.
///
/// Each round adds `k` relations for `g` and `k` for `b`, re-solves both
/// systems and verifies the candidate logs. As soon as a prime appears in
/// both tables with `g^alpha = prime = b^beta`, `x` follows from
/// `alpha = x beta (mod ord g)`. Shared primes are tried smallest first.
///
/// With `parallel` set the two per-base rounds run concurrently. Each
/// pipeline only touches its own generator, so the result does not depend on
/// the mode.
pub fn solve_double_index_calculus<R: Rng + Send + ?Sized>(
    inst: &DlpInstance,
    bound: u64,
    parallel: bool,
    budget: &Budget,
    rng_g: &mut R,
    rng_b: &mut R,
) -> Result<SolveResult> {
    solve_double_index_calculus_traced(inst, bound, parallel, budget, rng_g, rng_b, |_| {})
}

/// [`solve_double_index_calculus`] with a callback after every round.
pub fn solve_double_index_calculus_traced<R, F>(
    inst: &DlpInstance,
    bound: u64,
    parallel: bool,
    budget: &Budget,
    rng_g: &mut R,
    rng_b: &mut R,
    mut observe: F,
) -> Result<SolveResult>
where
    R: Rng + Send + ?Sized,
    F: FnMut(&RoundSnapshot),
{
    let start = Instant::now();
    let algorithm = if parallel { Algorithm::DoubleIndexCalculusParallel } else { Algorithm::DoubleIndexCalculus };
    if inst.b == 1 {
        return Ok(SolveResult {
            x: 0,
            algorithm,
            counters: Counters { elapsed: start.elapsed(), ..Default::default() },
            matched_prime: None,
        });
    }
    let field = Field::new(inst.p)?;
    let order_g = field.order(inst.g);
    if !field.in_subgroup(inst.b, order_g) {
        return Err(Error::NoSolution);
    }
    let fb = FactorBase::new(bound)?;
    let k = fb.len();
    let (target, shift) = matchable_target(&field, inst, order_g, &fb, budget, rng_b)?;
    let shifted = DlpInstance { b: target, ..*inst };
    let order_b = field.order(target);
    let mut pg = LogPipeline::new(inst.g, order_g, &field, &fb, budget.max_candidates, rng_g)?;
    let mut pb = LogPipeline::new(target, order_b, &field, &fb, budget.max_candidates, rng_b)?;

    let counters = |pg: &LogPipeline<R>, pb: &LogPipeline<R>| Counters {
        candidates_tested: pg.candidates_tested() + pb.candidates_tested(),
        smooth_found: pg.relations_found() + pb.relations_found(),
        rounds: pg.rounds,
        elapsed: start.elapsed(),
    };

    for round in 1..=budget.max_rounds {
        let (rg, rb) = if parallel {
            rayon::join(|| pg.round(k), || pb.round(k))
        } else {
            let rg = pg.round(k);
            let rb = if rg.is_ok() { pb.round(k) } else { Ok(()) };
            (rg, rb)
        };
        if let Err(e) = rg.and(rb) {
            let c = counters(&pg, &pb);
            return Err(match e {
                Error::BudgetExceeded { .. } => {
                    Error::BudgetExceeded { candidates: c.candidates_tested, rounds: round }
                }
                other => other,
            });
        }
        let shared = pg.table.intersection(&pb.table);
        observe(&RoundSnapshot { round, k, table_g: pg.table.len(), table_b: pb.table.len(), shared: shared.clone() });
        for prime in shared {
            let alpha = pg.table.entries[&prime];
            let beta = pb.table.entries[&prime];
            if let Some(x) = derive_x_from_match(alpha, beta, order_g, &shifted) {
                let x = (x + order_g - shift) % order_g;
                if verify_solution(inst, x) {
                    return Ok(SolveResult { x, algorithm, counters: counters(&pg, &pb), matched_prime: Some(prime) });
                }
            }
        }
    }
    let c = counters(&pg, &pb);
    Err(Error::BudgetExceeded { candidates: c.candidates_tested, rounds: budget.max_rounds })
}

/// Some factor-base prime lies in the subgroup of order `order`.
fn has_prime_in(field: &Field, fb: &FactorBase, order: u64) -> bool {
    fb.primes().iter().any(|&q| q < field.p && field.pow(q, order) == 1)
}

/// A target `b g^s` whose subgroup contains at least one factor-base prime,
/// together with `s`. Without such a prime no log base `b` can ever match.
/// If `b` already qualifies it is returned unchanged with `s = 0`.
fn matchable_target<R: Rng + ?Sized>(
    field: &Field,
    inst: &DlpInstance,
    order_g: u64,
    fb: &FactorBase,
    budget: &Budget,
    rng: &mut R,
) -> Result<(u64, u64)> {
    if has_prime_in(field, fb, field.order(inst.b)) {
        return Ok((inst.b, 0));
    }
    for _ in 0..=budget.max_restarts {
        let s = rng.gen_range(1..order_g);
        let target = modmath::mul_mod(inst.b as u128, field.pow(inst.g, s) as u128, field.p as u128) as u64;
        if target != 1 && has_prime_in(field, fb, field.order(target)) {
            return Ok((target, s));
        }
    }
    Err(Error::GeneralityFailure { base: inst.g, prime: fb.primes().first().copied().unwrap_or(2) })
}

/// Adds relations one at a time until the table holds at least `size` logs.
fn grow_to<R: Rng + ?Sized>(pipeline: &mut LogPipeline<R>, size: usize, max_relations: usize) -> Result<()> {
    for _ in 0..max_relations {
        if pipeline.table.len() >= size {
            return Ok(());
        }
        pipeline.collect(1)?;
        pipeline.solve()?;
    }
    if pipeline.table.len() >= size {
        return Ok(());
    }
    Err(Error::BudgetExceeded { candidates: pipeline.candidates_tested(), rounds: 0 })
}

fn primes_in_subgroup(field: &Field, fb: &FactorBase, order: u64) -> usize {
    fb.primes().iter().filter(|&&q| q < field.p && field.pow(q, order) == 1).count()
}

/// Grows the log tables for `g` and `b` one relation at a time, stops each
/// the moment it first holds at least `u` (resp. `v`) verified logs, and
/// reports whether the two tables share a prime at that point.
///
/// Returns `None` when a subgroup contains fewer than `u` (resp. `v`)
/// factor-base primes, so tables of that size can never exist.
///
/// This is the event whose probability [`crate::analysis::prob_lower_bound`]
/// bounds from below.
pub fn match_at_table_sizes<R: Rng + ?Sized>(
    inst: &DlpInstance,
    bound: u64,
    u: usize,
    v: usize,
    budget: &Budget,
    rng_g: &mut R,
    rng_b: &mut R,
) -> Result<Option<bool>> {
    let field = Field::new(inst.p)?;
    let fb = FactorBase::new(bound)?;
    if u == 0 || v == 0 || u > fb.len() || v > fb.len() {
        return Err(Error::invalid(format!("table sizes ({u}, {v}) must lie in [1, {}]", fb.len())));
    }
    let (order_g, order_b) = (field.order(inst.g), field.order(inst.b));
    if primes_in_subgroup(&field, &fb, order_g) < u || primes_in_subgroup(&field, &fb, order_b) < v {
        return Ok(None);
    }
    let max_relations = budget.max_rounds as usize * fb.len();
    let mut pg = LogPipeline::new(inst.g, order_g, &field, &fb, budget.max_candidates, rng_g)?;
    grow_to(&mut pg, u, max_relations)?;
    let mut pb = LogPipeline::new(inst.b, order_b, &field, &fb, budget.max_candidates, rng_b)?;
    grow_to(&mut pb, v, max_relations)?;
    Ok(Some(!pg.table.intersection(&pb.table).is_empty()))
}
