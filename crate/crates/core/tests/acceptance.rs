//! Acceptance suite. Runs every criterion in sequence and prints one
//! `PASS`/`FAIL` line for each.
//!
//! Criteria listed in `KNOWN_FAILING` are evaluated at full strength and
//! reported as `FAIL`, but do not fail the process; the measured numbers are
//! printed alongside. The process fails if any other criterion fails, or if a
//! known-failing one starts passing. Set `DLOG_ACCEPTANCE_STRICT=1` to make
//! every failure fatal.

use std::collections::BTreeMap;
use std::time::Instant;

use dlog_core::analysis::{self, nice_case_count, prob_lower_bound, three_sigma_margin};
use dlog_core::bench::{
    gen_instance, instance_seed, mean_elapsed_ms, run_sweep, solver_seed, BenchConfig, BenchRecord,
};
use dlog_core::linsys::{solve_partial_with, Decomposition, EquationSystem};
use dlog_core::rng::{derive_seed, rng_from_seed, stream_seed};
use dlog_core::smooth::{smoothness_bound, BoundFormula, BoundSpec};
use dlog_core::solvers::{
    match_at_table_sizes, solve, solve_double_index_calculus_traced, verify_solution, BoundChoice, SolveOptions,
};
use dlog_core::worked_example as worked;
use dlog_core::{Algorithm, Budget, DlpInstance, Error};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;

/// Speedup of at least 1.3 at multiplier 0.5 is not reached; see README.
const KNOWN_FAILING: &[u32] = &[4];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn bound_for(p: u64, formula: BoundFormula, multiplier: f64) -> u64 {
    smoothness_bound(p as u128, &BoundSpec { formula, multiplier })
}

fn cross_algorithm() -> Outcome {
    let algorithms = [
        Algorithm::DoubleIndexCalculus,
        Algorithm::IndexCalculus,
        Algorithm::BabyStepGiantStep,
        Algorithm::PollardRho,
        Algorithm::PohligHellman,
    ];
    let options = SolveOptions::default();
    let mut failures = Vec::new();
    for i in 0..200u32 {
        let bits = 16 + i % 13;
        let inst = gen_instance(bits, instance_seed(1, bits, i)).unwrap();
        let want = inst.expected_x.unwrap();
        for (j, &alg) in algorithms.iter().enumerate() {
            match solve(&inst, alg, &options, derive_seed(&[1, i as u64, j as u64])) {
                Ok(r) if r.x == want && verify_solution(&inst, r.x) => {}
                Ok(r) => failures.push(format!("{alg} on {inst:?} gave {}", r.x)),
                Err(e) => failures.push(format!("{alg} on {inst:?}: {e}")),
            }
        }
    }
    let detail = match failures.first() {
        None => "200 instances x 5 algorithms all correct".to_string(),
        Some(f) => format!("{} failures, first: {f}", failures.len()),
    };
    outcome(failures.is_empty(), detail)
}

fn generality() -> Outcome {
    let inst = DlpInstance::new(1_040_483, 340_003, 50_064).unwrap();
    let options = SolveOptions { bound: BoundChoice::Fixed(15), ..SolveOptions::default() };
    let mut dic = Vec::new();
    for seed in 0..10 {
        dic.push(solve(&inst, Algorithm::DoubleIndexCalculus, &options, seed).map(|r| r.x));
    }
    let dic_ok = dic.iter().all(|r| *r == Ok(6));
    let ic = solve(&inst, Algorithm::IndexCalculus, &options, 0);
    let ic_ok = matches!(ic, Err(Error::GeneralityFailure { .. } | Error::BudgetExceeded { .. }));
    let ic_text = match &ic {
        Ok(r) => format!("returned {}", r.x),
        Err(e) => e.to_string(),
    };
    outcome(dic_ok && ic_ok, format!("dic over 10 seeds: {dic:?}; ic: {ic_text}"))
}

fn worked_relations() -> Outcome {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../KNOWN_DISCREPANCIES.md");
    let documented = match std::fs::read_to_string(path) {
        Ok(text) => worked::parse_discrepancies(&text).unwrap(),
        Err(e) => return outcome(false, format!("cannot read {path}: {e}")),
    };
    let observed = worked::observed_discrepancies().unwrap();
    let checks = worked::check_relations().unwrap();
    let matching: Vec<u64> = checks.iter().filter(|c| c.matches()).map(|c| c.t).collect();
    outcome(
        observed == documented,
        format!(
            "relations matching as stated: t = {matching:?}; {} mismatches observed, {} documented",
            observed.len(),
            documented.len()
        ),
    )
}

/// The 36- and 40-bit grid shared by the ordering and sweep-shape checks.
fn timing_grid() -> Vec<BenchRecord> {
    let config = BenchConfig {
        bits_list: vec![36, 40],
        multipliers: vec![0.1, 0.5, 1.0, 1.5, 2.0],
        algorithms: vec![Algorithm::DoubleIndexCalculus, Algorithm::IndexCalculus],
        trials: 20,
        seed: 2,
        ..BenchConfig::default()
    };
    run_sweep(&config).unwrap()
}

fn mean(records: &[BenchRecord], bits: u32, multiplier: f64, alg: Algorithm) -> f64 {
    mean_elapsed_ms(records, |r| r.bits == bits && r.multiplier == multiplier && r.algorithm == alg).unwrap()
}

fn ordering(records: &[BenchRecord]) -> Outcome {
    let mut passed = records.iter().all(|r| r.success);
    let mut parts = Vec::new();
    for bits in [36, 40] {
        let d = mean(records, bits, 0.5, Algorithm::DoubleIndexCalculus);
        let i = mean(records, bits, 0.5, Algorithm::IndexCalculus);
        let ratio = i / d;
        passed &= d < i && ratio >= 1.3;
        parts.push(format!("{bits} bits: dic {d:.2} ms, ic {i:.2} ms, ratio {ratio:.3}"));
    }
    outcome(passed, format!("{} (required ratio >= 1.3)", parts.join("; ")))
}

fn sweep_shape(records: &[BenchRecord]) -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for bits in [36, 40] {
        for alg in [Algorithm::DoubleIndexCalculus, Algorithm::IndexCalculus] {
            let best = [0.1, 0.5, 1.0, 1.5, 2.0]
                .into_iter()
                .map(|m| (m, mean(records, bits, m, alg)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            passed &= best.0 == 0.5 || best.0 == 1.0;
            parts.push(format!("{alg}@{bits}: argmin {}", best.0));
        }
    }
    let ok = records.iter().filter(|r| r.success).count();
    outcome(passed, format!("{}; {ok}/{} trials succeeded", parts.join(", "), records.len()))
}

fn pigeonhole() -> Outcome {
    let (mut violations, mut premises, mut runs_ok) = (0, 0, 0);
    for t in 0..500 {
        let inst = gen_instance(20, instance_seed(6, 20, t)).unwrap();
        let bound = bound_for(inst.p, BoundFormula::SqrtHalf, 0.5);
        let seed = solver_seed(6, 20, 0.5, Algorithm::DoubleIndexCalculus, t);
        let mut rg = rng_from_seed(stream_seed(seed, 0));
        let mut rb = rng_from_seed(stream_seed(seed, 1));
        let r = solve_double_index_calculus_traced(&inst, bound, false, &Budget::default(), &mut rg, &mut rb, |s| {
            if s.table_g + s.table_b > s.k {
                premises += 1;
                if s.shared.is_empty() {
                    violations += 1;
                }
            }
        });
        if r.map(|r| Some(r.x) == inst.expected_x).unwrap_or(false) {
            runs_ok += 1;
        }
    }
    outcome(
        violations == 0 && runs_ok == 500,
        format!("{violations} violations in {premises} qualifying rounds; {runs_ok}/500 runs solved"),
    )
}

fn match_probability() -> Outcome {
    let exact = BigRational::new(15.into(), 16.into()) + BigRational::new(BigInt::one(), BigInt::one() << 25);
    let computed = prob_lower_bound(5, 5).unwrap();
    let diff = (analysis::to_f64(&computed) - (15.0 / 16.0 + 2f64.powi(-25))).abs();
    let mut passed = computed == exact && diff < 1e-12;
    let mut parts = vec![format!("bound(5,5) = {}", analysis::exact_decimal(&computed).unwrap())];
    for (u, v) in [(2usize, 2usize), (3, 3), (5, 5)] {
        let (mut eligible, mut hits, mut draws) = (0u64, 0u64, 0u32);
        while eligible < 500 {
            let inst = gen_instance(20, instance_seed(7, 20, draws)).unwrap();
            let bound = bound_for(inst.p, BoundFormula::SqrtHalf, 0.5);
            let s = derive_seed(&[7, u as u64, draws as u64]);
            let mut rg = rng_from_seed(stream_seed(s, 0));
            let mut rb = rng_from_seed(stream_seed(s, 1));
            draws += 1;
            match match_at_table_sizes(&inst, bound, u, v, &Budget::default(), &mut rg, &mut rb) {
                Ok(Some(hit)) => {
                    eligible += 1;
                    hits += hit as u64;
                }
                Ok(None) => {}
                Err(e) => return outcome(false, format!("({u},{v}) on {inst:?}: {e}")),
            }
        }
        let b = analysis::to_f64(&prob_lower_bound(u as u32, v as u32).unwrap());
        let freq = hits as f64 / eligible as f64;
        let floor = b - three_sigma_margin(b, eligible);
        passed &= freq >= floor;
        parts.push(format!("({u},{v}) freq {freq:.3} vs floor {floor:.3} over {eligible} of {draws} draws"));
    }
    outcome(passed, parts.join("; "))
}

fn brute_force(s: &EquationSystem) -> Option<BTreeMap<usize, u64>> {
    let n = s.modulus();
    let k = s.columns();
    let mut x = vec![0u64; k];
    let mut common: Option<Vec<Option<u64>>> = None;
    loop {
        if s.rows().iter().all(|eq| eq.coeffs.iter().zip(&x).map(|(a, b)| a * b).sum::<u64>() % n == eq.rhs) {
            common = Some(match common {
                None => x.iter().map(|&v| Some(v)).collect(),
                Some(c) => c.iter().zip(&x).map(|(c, &v)| c.filter(|&c| c == v)).collect(),
            });
        }
        let mut i = 0;
        while i < k {
            x[i] += 1;
            if x[i] < n {
                break;
            }
            x[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
    }
    common.map(|c| c.iter().enumerate().filter_map(|(i, v)| v.map(|v| (i, v))).collect())
}

fn linear_algebra() -> Outcome {
    let mut rng = rng_from_seed(8);
    let (mut mismatches, mut consistent) = (0, 0);
    for _ in 0..1000 {
        let n = rng.gen_range(2..=60u64);
        let k = rng.gen_range(1..=4usize);
        let mut s = EquationSystem::new(n, k).unwrap();
        for _ in 0..rng.gen_range(1..=6) {
            let coeffs: Vec<u64> = (0..k).map(|_| if rng.gen_bool(0.4) { 0 } else { rng.gen_range(0..n) }).collect();
            s.push(&coeffs, rng.gen_range(0..n)).unwrap();
        }
        let want = brute_force(&s);
        consistent += want.is_some() as u32;
        for d in [Decomposition::Factor, Decomposition::GcdSplit] {
            let sol = solve_partial_with(&s, d).unwrap();
            let ok = match &want {
                None => sol.inconsistent && sol.determined.is_empty(),
                Some(w) => !sol.inconsistent && &sol.determined == w,
            };
            mismatches += !ok as u32;
        }
    }
    outcome(mismatches == 0, format!("{mismatches} mismatches over 1000 systems ({consistent} consistent)"))
}

fn nice_triple_loop(k: usize) -> BigUint {
    let mut c = vec![vec![BigUint::zero(); k + 1]; k + 1];
    for n in 0..=k {
        c[n][0] = BigUint::one();
        for r in 1..=n {
            c[n][r] = &c[n - 1][r - 1] + &c[n - 1][r];
        }
    }
    let mut total = BigUint::zero();
    for i in 1..=k {
        for j in 1..=k - i {
            for m in 1..=k - i {
                total += &c[k][i] * &c[k - i][j] * &c[k - i][m];
            }
        }
    }
    total
}

fn formulas() -> Outcome {
    let mut problems = Vec::new();
    for k in 1..=10 {
        if nice_case_count(k as u64).unwrap() != nice_triple_loop(k) {
            problems.push(format!("nice_case_count({k})"));
        }
    }
    if nice_case_count(2).unwrap() != 2u32.into() || nice_case_count(3).unwrap() != 30u32.into() {
        problems.push("small nice-case values".to_string());
    }
    let (zero, one) = (BigRational::zero(), BigRational::one());
    for u in 1..=16 {
        for v in 1..=16 {
            let b = prob_lower_bound(u, v).unwrap();
            if b <= zero || b >= one {
                problems.push(format!("bound({u},{v}) out of range"));
            }
            if b != prob_lower_bound(v, u).unwrap() {
                problems.push(format!("bound({u},{v}) not symmetric"));
            }
            let next = prob_lower_bound(u + 1, v).unwrap();
            // bound(u, 1) is 1/2 for every u
            if next < b || (v > 1 && next == b) {
                problems.push(format!("bound not increasing at ({u},{v})"));
            }
        }
    }
    outcome(problems.is_empty(), if problems.is_empty() { "all checks hold".to_string() } else { problems.join(", ") })
}

fn parallel_determinism() -> Outcome {
    let options = SolveOptions::default();
    let mut differing = 0;
    for t in 0..100 {
        let inst = gen_instance(24, instance_seed(10, 24, t)).unwrap();
        let seed = derive_seed(&[10, t as u64]);
        let a = solve(&inst, Algorithm::DoubleIndexCalculus, &options, seed).map(|r| (r.x, r.matched_prime));
        let b = solve(&inst, Algorithm::DoubleIndexCalculusParallel, &options, seed).map(|r| (r.x, r.matched_prime));
        if a != b || a.is_err() {
            differing += 1;
        }
    }
    outcome(differing == 0, format!("{differing} of 100 instances differ or fail"))
}

fn trend() -> Outcome {
    // the 36 to 42 bit step is about 0.3 in the ratio; 20 trials cannot resolve it
    let config = BenchConfig {
        bits_list: vec![30, 36, 42],
        multipliers: vec![1.0],
        algorithms: vec![Algorithm::DoubleIndexCalculus, Algorithm::IndexCalculus],
        trials: 300,
        seed: 11,
        formulas: vec![(Algorithm::IndexCalculus, BoundFormula::HalfSqrt)],
        default_formula: BoundFormula::SqrtHalf,
        ..BenchConfig::default()
    };
    let records = run_sweep(&config).unwrap();
    let ratios: Vec<f64> = config
        .bits_list
        .iter()
        .map(|&bits| {
            mean(&records, bits, 1.0, Algorithm::IndexCalculus)
                / mean(&records, bits, 1.0, Algorithm::DoubleIndexCalculus)
        })
        .collect();
    let passed = records.iter().all(|r| r.success)
        && ratios.iter().all(|&r| r >= 1.0)
        && ratios.windows(2).all(|w| w[1] >= w[0]);
    let candidates = |bits: u32, alg: Algorithm| -> f64 {
        records.iter().filter(|r| r.bits == bits && r.algorithm == alg).map(|r| r.candidates_tested as f64).sum()
    };
    let shown: Vec<String> = config
        .bits_list
        .iter()
        .zip(&ratios)
        .map(|(&bits, r)| {
            let c = candidates(bits, Algorithm::IndexCalculus) / candidates(bits, Algorithm::DoubleIndexCalculus);
            format!("{bits} bits {r:.2} (candidates {c:.2})")
        })
        .collect();
    outcome(passed, format!("ic/dic time ratios over 300 trials: {}", shown.join(", ")))
}

fn main() {
    // `cargo test` passes libtest flags; a filter argument skips the suite
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance".contains(a.as_str())) {
        return;
    }
    let strict = std::env::var("DLOG_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut grid = None;
    let mut unexpected = Vec::new();
    for id in 1..=11u32 {
        let start = Instant::now();
        let o = match id {
            1 => cross_algorithm(),
            2 => generality(),
            3 => worked_relations(),
            4 => ordering(grid.get_or_insert_with(timing_grid)),
            5 => sweep_shape(grid.get_or_insert_with(timing_grid)),
            6 => pigeonhole(),
            7 => match_probability(),
            8 => linear_algebra(),
            9 => formulas(),
            10 => parallel_determinism(),
            _ => trend(),
        };
        let known = KNOWN_FAILING.contains(&id);
        let note = match (o.passed, known) {
            (false, true) => " [known failing]",
            (true, true) => " [expected to fail; update KNOWN_FAILING]",
            _ => "",
        };
        println!(
            "{} criterion {id:>2}: {} ({:.1} s){note}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            start.elapsed().as_secs_f64()
        );
        if o.passed == known || (strict && !o.passed) {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        println!("unexpected results for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
