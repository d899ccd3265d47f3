use std::collections::BTreeMap;

use rand::Rng;

use super::{derive_x_from_match, DlpInstance, Field, PartialLogTable};
use crate::error::Result;
use crate::linsys::{self, EquationSystem};
use crate::modmath::Factorization;
use crate::smooth::{FactorBase, RelationSearch};

/// Relation collection, solving and verification for one base element `a`.
///
/// Rows accumulate across rounds and the whole system is re-solved after
/// each round. With `h = (p - 1) / ord(a)`, each relation `a^t = prod q^e` is
/// entered as `h t = sum e Y_q (mod ord a)` where `Y_q = log_a(q^h)`. The
/// power `q^h` always lies in the subgroup generated by `a`, so the system
/// is consistent whether or not `a` generates the field. A determined `Y_q`
/// yields `log_a q` (when it exists) from `h l = Y_q (mod ord a)` plus an
/// exponentiation check. For a generator `h = 1` and `Y_q` is the log itself.
pub(crate) struct LogPipeline<'a, R: ?Sized> {
    base_elem: u64,
    field: &'a Field,
    factor_base: &'a FactorBase,
    order: u64,
    index: u64,
    order_factorization: Factorization,
    search: RelationSearch<'a>,
    system: EquationSystem,
    /// how many rows mention each column
    column_hits: Vec<u32>,
    pub table: PartialLogTable,
    /// primes whose determined value failed the exponentiation check
    pub failed_verification: BTreeMap<u64, u32>,
    pub rounds: u32,
    rng: &'a mut R,
}

impl<'a, R: Rng + ?Sized> LogPipeline<'a, R> {
    pub fn new(
        base_elem: u64,
        order: u64,
        field: &'a Field,
        factor_base: &'a FactorBase,
        candidate_cap: u64,
        rng: &'a mut R,
    ) -> Result<Self> {
        let order = order.max(2);
        Ok(LogPipeline {
            base_elem,
            field,
            factor_base,
            order,
            index: (field.p - 1) / order,
            order_factorization: field.order_factorization(order),
            search: RelationSearch::new(base_elem, field.p, factor_base, candidate_cap)?,
            system: EquationSystem::new(order, factor_base.len())?,
            column_hits: vec![0; factor_base.len()],
            table: PartialLogTable::new(base_elem),
            failed_verification: BTreeMap::new(),
            rounds: 0,
            rng,
        })
    }

    pub fn candidates_tested(&self) -> u64 {
        self.search.candidates_tested()
    }

    pub fn relations_found(&self) -> u64 {
        self.search.relations_found()
    }

    /// Every unknown occurs in at least one row.
    pub fn covers_all_columns(&self) -> bool {
        self.column_hits.iter().all(|&h| h > 0)
    }

    /// Collects `count` relations and appends them to the system.
    pub fn collect(&mut self, count: usize) -> Result<()> {
        for _ in 0..count {
            let rel = self.search.next_relation(&mut *self.rng)?;
            for (h, &e) in self.column_hits.iter_mut().zip(&rel.exponents) {
                if e > 0 {
                    *h += 1;
                }
            }
            let coeffs: Vec<u64> = rel.exponents.iter().map(|&e| e as u64).collect();
            let rhs = (self.index as u128 * rel.t as u128 % self.order as u128) as u64;
            self.system.push(&coeffs, rhs)?;
        }
        Ok(())
    }

    /// Solves the accumulated system and moves verified logs into the table.
    pub fn solve(&mut self) -> Result<()> {
        if self.system.is_empty() {
            return Ok(());
        }
        let sol = linsys::solve_partial_factored(&self.system, &self.order_factorization)?;
        for (col, y) in sol.determined {
            let prime = self.factor_base.primes()[col];
            if self.table.entries.contains_key(&prime) {
                continue;
            }
            match self.log_from_power(prime, y) {
                Some(l) => {
                    self.table.entries.insert(prime, l);
                }
                None => *self.failed_verification.entry(prime).or_default() += 1,
            }
        }
        Ok(())
    }

    /// `l` with `h l = y (mod ord)` and `a^l = prime`, if any.
    fn log_from_power(&self, prime: u64, y: u64) -> Option<u64> {
        if prime >= self.field.p {
            return None;
        }
        if self.index == 1 {
            return (self.field.pow(self.base_elem, y) == prime).then_some(y);
        }
        let as_instance = DlpInstance { p: self.field.p, g: self.base_elem, b: prime, expected_x: None };
        derive_x_from_match(y, self.index % self.order, self.order, &as_instance)
    }

    /// One round: `count` relations, then a re-solve.
    pub fn round(&mut self, count: usize) -> Result<()> {
        self.collect(count)?;
        self.rounds += 1;
        self.solve()
    }
}
