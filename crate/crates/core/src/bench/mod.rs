//! Benchmark harness: reproducible instances, timed sweeps over bit lengths
//! and smoothness-bound multipliers, CSV output and SVG line charts.
//!
//! Grid cells are visited in the order bits, multiplier, algorithm, trial.
//! The instance for `(bits, trial)` is shared by every algorithm and
//! multiplier so that cells are directly comparable; the solver seed is
//! derived per cell. Timing covers the solve call only (factor-base
//! construction included, instance generation excluded).

mod csv_io;
mod plot;

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use csv_io::{emit_csv, parse_csv, CSV_HEADER};
pub use plot::{emit_svg_plot, PlotAxis, PlotSeries, PlotValue};

use crate::error::{Error, Result};
use crate::modmath;
use crate::rng::{derive_seed, rng_from_seed};
use crate::smooth::{BoundFormula, BoundSpec};
use crate::solvers::{self, Algorithm, BoundChoice, Budget, DlpInstance, SolveOptions};

pub const DEFAULT_TRIALS: u32 = 20;

/// The multiplier grid applied to the base smoothness bound.
pub const DEFAULT_MULTIPLIERS: [f64; 5] = [0.1, 0.5, 1.0, 1.5, 2.0];

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub bits_list: Vec<u32>,
    pub multipliers: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub trials: u32,
    pub seed: u64,
    pub budget: Budget,
    /// Bound formula per algorithm; algorithms not listed use `default_formula`.
    pub formulas: Vec<(Algorithm, BoundFormula)>,
    pub default_formula: BoundFormula,
    /// Run cells on the rayon pool. Output order is unaffected.
    pub parallel: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            bits_list: vec![20],
            multipliers: DEFAULT_MULTIPLIERS.to_vec(),
            algorithms: vec![Algorithm::DoubleIndexCalculus, Algorithm::IndexCalculus],
            trials: DEFAULT_TRIALS,
            seed: 0,
            budget: Budget::default(),
            formulas: Vec::new(),
            default_formula: BoundFormula::SqrtHalf,
            parallel: false,
        }
    }
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if let Some(b) = self.bits_list.iter().find(|&&b| !(12..=63).contains(&b)) {
            return Err(Error::invalid(format!("bit length {b} outside 12..=63")));
        }
        if let Some(m) = self.multipliers.iter().find(|&&m| !(m.is_finite() && m > 0.0)) {
            return Err(Error::invalid(format!("multiplier {m} must be positive")));
        }
        if self.bits_list.is_empty() || self.multipliers.is_empty() || self.algorithms.is_empty() {
            return Err(Error::invalid("empty grid"));
        }
        Ok(())
    }

    pub fn formula_for(&self, algorithm: Algorithm) -> BoundFormula {
        self.formulas.iter().find(|(a, _)| *a == algorithm).map_or(self.default_formula, |&(_, f)| f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    #[serde(with = "algorithm_tag")]
    pub algorithm: Algorithm,
    pub bits: u32,
    pub multiplier: f64,
    pub trial: u32,
    /// solver seed
    pub seed: u64,
    pub p: u64,
    pub g: u64,
    pub b: u64,
    pub x_expected: u64,
    pub x_found: Option<u64>,
    pub success: bool,
    pub elapsed_ms: f64,
    pub candidates_tested: u64,
    pub smooth_found: u64,
    pub rounds: u32,
}

mod algorithm_tag {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use crate::solvers::Algorithm;

    pub fn serialize<S: Serializer>(a: &Algorithm, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(a.as_str())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Algorithm, D::Error> {
        let tag = String::deserialize(d)?;
        tag.parse().map_err(D::Error::custom)
    }
}

/// Random instance with `p` of exactly `bits` bits, `g` a generator and
/// `x` uniform in `[1, p - 2]`.
pub fn gen_instance(bits: u32, seed: u64) -> Result<DlpInstance> {
    if !(12..=63).contains(&bits) {
        return Err(Error::invalid(format!("bit length {bits} outside 12..=63")));
    }
    let p = modmath::random_prime(bits, derive_seed(&[seed, 0]))?;
    let g = modmath::find_generator(p, &modmath::factor_integer(p - 1)?)?;
    let x = rng_from_seed(derive_seed(&[seed, 1])).gen_range(1..=(p - 2) as u64);
    let b = modmath::pow_unchecked(g, x as u128, p);
    Ok(DlpInstance::new(p as u64, g as u64, b as u64)?.with_expected(x))
}

pub fn instance_seed(seed: u64, bits: u32, trial: u32) -> u64 {
    derive_seed(&[seed, bits as u64, trial as u64])
}

pub fn solver_seed(seed: u64, bits: u32, multiplier: f64, algorithm: Algorithm, trial: u32) -> u64 {
    let tag = Algorithm::ALL.iter().position(|&a| a == algorithm).unwrap_or(0) as u64;
    derive_seed(&[seed, bits as u64, multiplier.to_bits(), tag, trial as u64])
}

#[derive(Clone, Copy)]
struct Cell {
    bits: u32,
    multiplier: f64,
    algorithm: Algorithm,
    trial: u32,
}

fn run_cell(config: &BenchConfig, cell: Cell, inst: &DlpInstance) -> BenchRecord {
    let seed = solver_seed(config.seed, cell.bits, cell.multiplier, cell.algorithm, cell.trial);
    let spec = BoundSpec { formula: config.formula_for(cell.algorithm), multiplier: cell.multiplier };
    let options = SolveOptions { bound: BoundChoice::Formula(spec), budget: config.budget };
    let start = Instant::now();
    let outcome = solvers::solve(inst, cell.algorithm, &options, seed);
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let x_expected = inst.expected_x.unwrap_or_default();
    let mut record = BenchRecord {
        algorithm: cell.algorithm,
        bits: cell.bits,
        multiplier: cell.multiplier,
        trial: cell.trial,
        seed,
        p: inst.p,
        g: inst.g,
        b: inst.b,
        x_expected,
        x_found: None,
        success: false,
        elapsed_ms,
        candidates_tested: 0,
        smooth_found: 0,
        rounds: 0,
    };
    match outcome {
        Ok(r) => {
            record.x_found = Some(r.x);
            record.success = r.x == x_expected;
            record.candidates_tested = r.counters.candidates_tested;
            record.smooth_found = r.counters.smooth_found;
            record.rounds = r.counters.rounds;
        }
        Err(Error::BudgetExceeded { candidates, rounds }) => {
            record.candidates_tested = candidates;
            record.rounds = rounds;
        }
        Err(_) => {}
    }
    record
}

/// Runs the full grid. Individual failures become `success = false` records;
/// only an invalid configuration or instance generation aborts the sweep.
pub fn run_sweep(config: &BenchConfig) -> Result<Vec<BenchRecord>> {
    config.validate()?;
    let mut jobs = Vec::new();
    for &bits in &config.bits_list {
        let instances = (0..config.trials)
            .map(|t| gen_instance(bits, instance_seed(config.seed, bits, t)))
            .collect::<Result<Vec<_>>>()?;
        for &multiplier in &config.multipliers {
            for &algorithm in &config.algorithms {
                for (trial, inst) in instances.iter().enumerate() {
                    jobs.push((Cell { bits, multiplier, algorithm, trial: trial as u32 }, *inst));
                }
            }
        }
    }
    let records = if config.parallel {
        jobs.par_iter().map(|(cell, inst)| run_cell(config, *cell, inst)).collect()
    } else {
        jobs.iter().map(|(cell, inst)| run_cell(config, *cell, inst)).collect()
    };
    Ok(records)
}

/// Mean `elapsed_ms` over the records matching `filter`.
pub fn mean_elapsed_ms<F: Fn(&BenchRecord) -> bool>(records: &[BenchRecord], filter: F) -> Option<f64> {
    let (sum, n) = records.iter().filter(|r| filter(r)).fold((0.0, 0usize), |(s, n), r| (s + r.elapsed_ms, n + 1));
    (n > 0).then(|| sum / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::verify_solution;

    #[test]
    fn instances_are_reproducible() {
        for seed in 0..20 {
            let a = gen_instance(24, seed).unwrap();
            assert_eq!(a, gen_instance(24, seed).unwrap());
            assert!(verify_solution(&a, a.expected_x.unwrap()));
            assert_eq!(64 - a.p.leading_zeros(), 24);
            let x = a.expected_x.unwrap();
            assert!((1..=a.p - 2).contains(&x));
        }
        assert!(gen_instance(11, 0).is_err());
    }

    #[test]
    fn grid_cardinality_and_order() {
        let config = BenchConfig {
            bits_list: vec![16, 18],
            multipliers: vec![0.5, 1.0],
            algorithms: vec![Algorithm::DoubleIndexCalculus],
            trials: 3,
            ..BenchConfig::default()
        };
        let records = run_sweep(&config).unwrap();
        assert_eq!(records.len(), 12);
        let keys: Vec<_> = records.iter().map(|r| (r.bits, r.multiplier.to_bits(), r.trial)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        // shared instance across multipliers
        assert_eq!(records[0].p, records[3].p);
        assert_eq!(records[0].x_expected, records[3].x_expected);
    }

    #[test]
    fn small_sweep_succeeds_and_is_deterministic() {
        let config = BenchConfig {
            bits_list: vec![20],
            multipliers: vec![0.5],
            algorithms: vec![Algorithm::DoubleIndexCalculus, Algorithm::IndexCalculus],
            trials: 10,
            ..BenchConfig::default()
        };
        let a = run_sweep(&config).unwrap();
        assert!(a.iter().all(|r| r.success), "{a:?}");
        for r in &a {
            let inst = DlpInstance::new(r.p, r.g, r.b).unwrap();
            assert!(verify_solution(&inst, r.x_found.unwrap()));
        }
        let b = run_sweep(&BenchConfig { parallel: true, ..config }).unwrap();
        let strip =
            |v: &[BenchRecord]| v.iter().map(|r| BenchRecord { elapsed_ms: 0.0, ..r.clone() }).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn failures_are_recorded() {
        let config = BenchConfig {
            bits_list: vec![24],
            multipliers: vec![0.5],
            algorithms: vec![Algorithm::IndexCalculus],
            trials: 2,
            budget: Budget { max_candidates: 5, ..Budget::default() },
            ..BenchConfig::default()
        };
        let records = run_sweep(&config).unwrap();
        assert_eq!(records.len(), 2);
        assert!(records.iter().all(|r| !r.success && r.x_found.is_none()));
    }

    #[test]
    fn invalid_configs() {
        let bad = [
            BenchConfig { trials: 0, ..BenchConfig::default() },
            BenchConfig { bits_list: vec![8], ..BenchConfig::default() },
            BenchConfig { multipliers: vec![0.0], ..BenchConfig::default() },
        ];
        for c in bad {
            assert!(run_sweep(&c).is_err());
        }
    }

    #[test]
    fn per_algorithm_formula() {
        let config = BenchConfig {
            formulas: vec![(Algorithm::IndexCalculus, BoundFormula::HalfSqrt)],
            ..BenchConfig::default()
        };
        assert_eq!(config.formula_for(Algorithm::IndexCalculus), BoundFormula::HalfSqrt);
        assert_eq!(config.formula_for(Algorithm::DoubleIndexCalculus), BoundFormula::SqrtHalf);
    }
}
