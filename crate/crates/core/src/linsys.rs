//! Partial solutions of `M L = X (mod n)` for composite `n`.
//!
//! The modulus is split into pairwise coprime components, either by full
//! factorization or lazily by gcd splitting on non-unit pivots. Each
//! component is brought to Howell form: echelon form whose rows, together
//! with their annihilator multiples, span the row module, so that span
//! membership can be decided by greedy reduction. Unknown `L_j` is uniquely
//! determined exactly when the unit vector `e_j` lies in the row span, and
//! its value is then the matching combination of right-hand sides.
//!
//! Columns are eliminated from last to first. For relation matrices the last
//! columns belong to the largest primes and are the sparsest, which keeps
//! fill-in low.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::modmath::{self, CoprimeSplit, Factorization};
use crate::smooth::Relation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub coeffs: Vec<u64>,
    pub rhs: u64,
}

/// Rows over `Z_n`, all of the same width, entries reduced into `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationSystem {
    modulus: u64,
    columns: usize,
    rows: Vec<Equation>,
}

impl EquationSystem {
    pub fn new(modulus: u64, columns: usize) -> Result<Self> {
        if modulus < 2 {
            return Err(Error::invalid(format!("modulus must be at least 2, got {modulus}")));
        }
        Ok(EquationSystem { modulus, columns, rows: Vec::new() })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn rows(&self) -> &[Equation] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push(&mut self, coeffs: &[u64], rhs: u64) -> Result<()> {
        if coeffs.len() != self.columns {
            return Err(Error::invalid(format!(
                "row has {} coefficients, system has {} columns",
                coeffs.len(),
                self.columns
            )));
        }
        let n = self.modulus;
        self.rows.push(Equation { coeffs: coeffs.iter().map(|c| c % n).collect(), rhs: rhs % n });
        Ok(())
    }

    /// Adds `t = sum e_i L_i`.
    pub fn push_relation(&mut self, relation: &Relation) -> Result<()> {
        let coeffs: Vec<u64> = relation.exponents.iter().map(|&e| e as u64).collect();
        self.push(&coeffs, relation.t)
    }
}

/// How the modulus is broken into coprime components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Decomposition {
    /// Factor `n` completely and solve over each prime power.
    #[default]
    Factor,
    /// Start from `n` and split with a gcd whenever a column has no unit
    /// pivot. No factorization is computed.
    GcdSplit,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PartialSolution {
    /// Column index to its unique value in `[0, n)`.
    pub determined: BTreeMap<usize, u64>,
    /// Fewest pivot rows found over any component.
    pub rank: usize,
    /// Set when the system has no solution at all; `determined` is then empty.
    pub inconsistent: bool,
}

pub fn solve_partial(system: &EquationSystem) -> Result<PartialSolution> {
    solve_partial_with(system, Decomposition::Factor)
}

pub fn solve_partial_with(system: &EquationSystem, decomposition: Decomposition) -> Result<PartialSolution> {
    if system.columns == 0 {
        return Err(Error::invalid("system has no unknowns"));
    }
    match decomposition {
        Decomposition::Factor => {
            let f = modmath::factor_integer(system.modulus as u128)?;
            solve_partial_factored(system, &f)
        }
        Decomposition::GcdSplit => {
            let mut queue = VecDeque::from([system.modulus]);
            let mut parts = Vec::new();
            while let Some(m) = queue.pop_front() {
                match solve_component(system, m, true) {
                    Component::Split(a, b) => {
                        queue.push_back(a);
                        queue.push_back(b);
                    }
                    other => parts.push((m, other)),
                }
            }
            Ok(combine(system.columns, parts))
        }
    }
}

/// Like [`solve_partial`] with the factorization of the modulus supplied.
pub fn solve_partial_factored(system: &EquationSystem, modulus: &Factorization) -> Result<PartialSolution> {
    if system.columns == 0 {
        return Err(Error::invalid("system has no unknowns"));
    }
    if modulus.value != system.modulus as u128 {
        return Err(Error::invalid("factorization does not match the modulus"));
    }
    let parts = modulus
        .prime_powers()
        .map(|q| {
            let q = q as u64;
            (q, solve_component(system, q, false))
        })
        .collect();
    Ok(combine(system.columns, parts))
}

fn combine(columns: usize, parts: Vec<(u64, Component)>) -> PartialSolution {
    let mut solved = Vec::with_capacity(parts.len());
    for (m, part) in parts {
        match part {
            Component::Solved { values, pivots } => solved.push((m, values, pivots)),
            Component::Inconsistent => {
                return PartialSolution { inconsistent: true, ..Default::default() };
            }
            Component::Split(..) => unreachable!("splits are resolved by the caller"),
        }
    }
    let rank = solved.iter().map(|(_, _, r)| *r).min().unwrap_or(0);
    let moduli: Vec<u128> = solved.iter().map(|(m, _, _)| *m as u128).collect();
    let mut determined = BTreeMap::new();
    for col in 0..columns {
        let residues: Option<Vec<u128>> = solved.iter().map(|(_, v, _)| v[col].map(u128::from)).collect();
        if let Some(r) = residues {
            let x = modmath::crt_combine(&r, &moduli).expect("components are coprime");
            determined.insert(col, x as u64);
        }
    }
    PartialSolution { determined, rank, inconsistent: false }
}

enum Component {
    Solved { values: Vec<Option<u64>>, pivots: usize },
    Inconsistent,
    Split(u64, u64),
}

#[inline]
fn mul(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `row[from..] = row * f`
fn scale(row: &mut [u64], from: usize, f: u64, m: u64) {
    for x in &mut row[from..] {
        if *x != 0 {
            *x = mul(*x, f, m);
        }
    }
}

/// `dst[from..] -= f * src[from..]`
fn sub_multiple(dst: &mut [u64], src: &[u64], from: usize, f: u64, m: u64) {
    if f == 0 {
        return;
    }
    let neg = m - f;
    for (d, &s) in dst[from..].iter_mut().zip(&src[from..]) {
        if s != 0 {
            let t = *d as u128 + s as u128 * neg as u128;
            *d = (t % m as u128) as u64;
        }
    }
}

fn reduce_i128(x: i128, m: u64) -> u64 {
    x.rem_euclid(m as i128) as u64
}

/// `(g, s, t)` with `s a + t b = g = gcd(a, b)`.
fn ext_gcd(a: u64, b: u64) -> (u64, i128, i128) {
    let (mut r0, mut r1) = (a as i128, b as i128);
    let (mut s0, mut s1) = (1i128, 0i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 as u64, s0, t0)
}

fn solve_component(system: &EquationSystem, m: u64, allow_split: bool) -> Component {
    let k = system.columns;
    let width = k + 1;
    let mut work: Vec<Vec<u64>> = system
        .rows
        .iter()
        .map(|eq| {
            let mut row = vec![0u64; width];
            for (j, &c) in eq.coeffs.iter().enumerate() {
                row[k - 1 - j] = c % m;
            }
            row[k] = eq.rhs % m;
            row
        })
        .filter(|r| r.iter().any(|&x| x != 0))
        .collect();

    let mut pivots: Vec<(usize, Vec<u64>)> = Vec::new();
    for col in 0..width {
        let (mut active, rest): (Vec<_>, Vec<_>) = work.into_iter().partition(|r| r[col] != 0);
        work = rest;
        if active.is_empty() {
            continue;
        }
        let pivot = if let Some(pos) = active.iter().position(|r| modmath::gcd(r[col] as u128, m as u128) == 1) {
            let mut r = active.swap_remove(pos);
            let inv = modmath::mod_inv(r[col] as u128, m as u128).expect("unit") as u64;
            scale(&mut r, col, inv, m);
            for mut a in active {
                let f = a[col];
                sub_multiple(&mut a, &r, col, f, m);
                work.push(a);
            }
            r
        } else {
            if allow_split {
                if let Ok(CoprimeSplit::Split(a, b)) = modmath::coprime_split(m as u128, active[0][col] as u128) {
                    return Component::Split(a as u64, b as u64);
                }
            }
            let mut r = active.pop().expect("nonempty");
            for a in active {
                let (g, s, t) = ext_gcd(r[col], a[col]);
                let u = r[col] / g;
                let v = a[col] / g;
                let (s, t) = (reduce_i128(s, m), reduce_i128(t, m));
                let mut combined = vec![0u64; width];
                let mut other = vec![0u64; width];
                for j in col..width {
                    combined[j] = ((mul(s, r[j], m) as u128 + mul(t, a[j], m) as u128) % m as u128) as u64;
                    other[j] = ((mul(u, a[j], m) as u128 + (m - mul(v, r[j], m)) as u128) % m as u128) as u64;
                }
                debug_assert_eq!(other[col], 0);
                r = combined;
                work.push(other);
            }
            let d = modmath::gcd(r[col] as u128, m as u128) as u64;
            if d == 1 {
                let inv = modmath::mod_inv(r[col] as u128, m as u128).expect("unit") as u64;
                scale(&mut r, col, inv, m);
            } else {
                let mut ann = r.clone();
                scale(&mut ann, col, m / d, m);
                work.push(ann);
            }
            r
        };
        pivots.push((col, pivot));
        work.retain(|r| r.iter().any(|&x| x != 0));
    }

    if pivots.last().is_some_and(|(c, _)| *c == k) {
        return Component::Inconsistent;
    }

    let mut pivot_at: Vec<Option<usize>> = vec![None; width];
    for (i, (c, _)) in pivots.iter().enumerate() {
        pivot_at[*c] = Some(i);
    }

    let mut values = vec![None; k];
    let mut v = vec![0u64; width];
    for (c, row) in &pivots {
        if row[*c] != 1 {
            continue;
        }
        // reduce e_c - row against the later pivots
        for j in *c..width {
            v[j] = if row[j] == 0 { 0 } else { m - row[j] };
        }
        v[*c] = 0;
        let mut in_span = true;
        for j in c + 1..k {
            if v[j] == 0 {
                continue;
            }
            let Some(pi) = pivot_at[j] else {
                in_span = false;
                break;
            };
            let prow = &pivots[pi].1;
            let f = if prow[j] == 1 {
                v[j]
            } else {
                match modmath::linear_congruence(prow[j] as u128, v[j] as u128, m as u128) {
                    Some(s) => s.first as u64,
                    None => {
                        in_span = false;
                        break;
                    }
                }
            };
            sub_multiple(&mut v, prow, j, f, m);
        }
        if in_span {
            values[k - 1 - c] = Some((m - v[k]) % m);
        }
    }
    Component::Solved { values, pivots: pivots.len() }
}
