use std::time::Instant;

use rand::Rng;

use super::pipeline::LogPipeline;
use super::{verify_solution, Algorithm, Budget, Counters, DlpInstance, Field, SolveResult};
use crate::error::{Error, Result};
use crate::smooth::{FactorBase, RelationSearch};

/// Classic index calculus.
///
/// Phase one collects relations for `g` in rounds of `k` until every
/// factor-base prime has a verified log. Phase two searches for `t` with
/// `b g^t mod p` smooth and returns `x = sum e_i log p_i - t`.
///
/// A round is only solved once every prime has appeared in some relation;
/// before that the table cannot be complete.
///
/// When `g` does not generate the field, some primes may have no log at all.
/// Their unique solutions then fail verification in every round, and once
/// the round cap is hit the solver reports [`Error::GeneralityFailure`].
pub fn solve_index_calculus<R: Rng + ?Sized>(
    inst: &DlpInstance,
    bound: u64,
    budget: &Budget,
    rng: &mut R,
) -> Result<SolveResult> {
    let start = Instant::now();
    if inst.b == 1 {
        return Ok(trivial(start));
    }
    let field = Field::new(inst.p)?;
    let order = field.order(inst.g);
    if !field.in_subgroup(inst.b, order) {
        return Err(Error::NoSolution);
    }
    let fb = FactorBase::new(bound)?;
    let k = fb.len();
    let mut pipeline = LogPipeline::new(inst.g, order, &field, &fb, budget.max_candidates, rng)?;

    while pipeline.table.len() < k {
        if pipeline.rounds >= budget.max_rounds {
            return Err(match pipeline.failed_verification.keys().next() {
                Some(&prime) => Error::GeneralityFailure { base: inst.g, prime },
                None => Error::BudgetExceeded { candidates: pipeline.candidates_tested(), rounds: pipeline.rounds },
            });
        }
        pipeline.collect(k).map_err(|e| with_rounds(e, pipeline.rounds))?;
        pipeline.rounds += 1;
        if pipeline.covers_all_columns() {
            pipeline.solve()?;
        }
    }

    let logs: Vec<u64> = fb.primes().iter().map(|&q| pipeline.table.entries[&q]).collect();
    let rounds = pipeline.rounds;
    let mut tested = pipeline.candidates_tested();
    let mut smooth = pipeline.relations_found();
    drop(pipeline);

    let remaining = budget.max_candidates.saturating_sub(tested);
    let mut search = RelationSearch::new(inst.g, inst.p, &fb, remaining)?.with_cofactor(inst.b);
    loop {
        let rel = search
            .next_relation(rng)
            .map_err(|_| Error::BudgetExceeded { candidates: tested + search.candidates_tested(), rounds })?;
        let sum =
            rel.exponents.iter().zip(&logs).fold(0u128, |acc, (&e, &l)| (acc + e as u128 * l as u128) % order as u128);
        let x = ((sum + order as u128 - (rel.t % order) as u128) % order as u128) as u64;
        if verify_solution(inst, x) {
            tested += search.candidates_tested();
            smooth += search.relations_found();
            return Ok(SolveResult {
                x,
                algorithm: Algorithm::IndexCalculus,
                counters: Counters {
                    candidates_tested: tested,
                    smooth_found: smooth,
                    rounds,
                    elapsed: start.elapsed(),
                },
                matched_prime: None,
            });
        }
    }
}

fn with_rounds(e: Error, rounds: u32) -> Error {
    match e {
        Error::BudgetExceeded { candidates, .. } => Error::BudgetExceeded { candidates, rounds },
        other => other,
    }
}

fn trivial(start: Instant) -> SolveResult {
    SolveResult {
        x: 0,
        algorithm: Algorithm::IndexCalculus,
        counters: Counters { elapsed: start.elapsed(), ..Default::default() },
        matched_prime: None,
    }
}
