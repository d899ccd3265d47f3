//! Argument handling for the `dlog` binary.
//!
//! [`run`] takes the full argv and two output streams and returns the
//! process exit code: 0 on success, 1 when a solve fails or runs out of
//! budget, 2 on usage errors.

use std::fs;
use std::hash::{BuildHasher, RandomState};
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use dlog_core::analysis;
use dlog_core::bench::{self, BenchConfig, PlotAxis, PlotSeries, PlotValue};
use dlog_core::smooth::{BoundFormula, BoundSpec};
use dlog_core::solvers::{self, BoundChoice, SolveOptions};
use dlog_core::{Algorithm, Budget, DlpInstance, Error};
use serde_json::json;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "dlog", version, about = "Discrete logarithms in prime fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve g^x = b (mod p)
    Solve(SolveArgs),
    /// Time solvers over a grid of bit lengths and bound multipliers
    Sweep(SweepArgs),
    /// Evaluate the closed-form probability bound or nice-case count
    Analyze(AnalyzeArgs),
    /// Render sweep CSV as an SVG line chart
    Plot(PlotArgs),
    /// Check the built-in worked examples
    Selftest,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    /// Smoothness candidates allowed per base
    #[arg(long)]
    max_candidates: Option<u64>,
    /// Collection rounds allowed
    #[arg(long)]
    max_rounds: Option<u32>,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        let mut b = Budget::default();
        if let Some(c) = self.max_candidates {
            b.max_candidates = c;
        }
        if let Some(r) = self.max_rounds {
            b.max_rounds = r;
        }
        b
    }
}

#[derive(Debug, Args)]
struct SolveArgs {
    #[arg(long)]
    p: u64,
    #[arg(long)]
    g: u64,
    #[arg(long)]
    b: u64,
    #[arg(long, default_value = "dic", value_parser = parse_algorithm)]
    algorithm: Algorithm,
    /// Fixed smoothness bound
    #[arg(long, conflicts_with = "bound_multiplier")]
    bound: Option<u64>,
    /// Multiplier on the bound formula, decimal or `a/b`
    #[arg(long, value_parser = parse_ratio)]
    bound_multiplier: Option<f64>,
    #[arg(long, default_value = "sqrt-half", value_parser = parse_formula)]
    bound_formula: BoundFormula,
    /// Run the two double-IC pipelines concurrently
    #[arg(long)]
    parallel: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Bit lengths, e.g. `36,40` or `30-42:6`
    #[arg(long, value_parser = parse_bit_list)]
    bits: Vec<BitList>,
    #[arg(long, value_delimiter = ',', value_parser = parse_ratio)]
    multipliers: Vec<f64>,
    #[arg(long, value_delimiter = ',', value_parser = parse_algorithm)]
    algorithms: Vec<Algorithm>,
    #[arg(long, default_value_t = bench::DEFAULT_TRIALS)]
    trials: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bound formula for every algorithm unless overridden
    #[arg(long, default_value = "sqrt-half", value_parser = parse_formula)]
    bound_formula: BoundFormula,
    /// Per-algorithm override, e.g. `ic=half-sqrt`
    #[arg(long = "formula", value_parser = parse_formula_override)]
    formulas: Vec<(Algorithm, BoundFormula)>,
    /// Run trials on all cores
    #[arg(long)]
    parallel: bool,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct AnalyzeArgs {
    /// Table sizes `u,v`
    #[arg(long, value_parser = parse_pair)]
    prob: Option<(u32, u32)>,
    /// Factor base size
    #[arg(long)]
    nice_cases: Option<u64>,
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value = "bits", value_parser = parse_with::<PlotAxis>)]
    x: PlotAxis,
    #[arg(long, default_value = "mean_elapsed", value_parser = parse_with::<PlotValue>)]
    y: PlotValue,
    #[arg(long, default_value = "algorithm", value_parser = parse_with::<PlotSeries>)]
    series: PlotSeries,
    #[arg(long)]
    logy: bool,
}

fn parse_with<T: std::str::FromStr<Err = Error>>(s: &str) -> Result<T, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    parse_with(s)
}

fn parse_formula(s: &str) -> Result<BoundFormula, String> {
    parse_with(s)
}

fn parse_formula_override(s: &str) -> Result<(Algorithm, BoundFormula), String> {
    let (a, f) = s.split_once('=').ok_or_else(|| format!("expected <algorithm>=<formula>, got `{s}`"))?;
    Ok((parse_algorithm(a)?, parse_formula(f)?))
}

/// `0.5`, `1`, or `1/2`.
pub fn parse_ratio(s: &str) -> Result<f64, String> {
    let v = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| format!("bad numerator in `{s}`"))?;
            let d: f64 = d.trim().parse().map_err(|_| format!("bad denominator in `{s}`"))?;
            n / d
        }
        None => s.trim().parse().map_err(|_| format!("not a number: `{s}`"))?,
    };
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got `{s}`"))
    }
}

fn parse_pair(s: &str) -> Result<(u32, u32), String> {
    let (u, v) = s.split_once(',').ok_or_else(|| format!("expected u,v, got `{s}`"))?;
    let u = u.trim().parse().map_err(|_| format!("bad u in `{s}`"))?;
    let v = v.trim().parse().map_err(|_| format!("bad v in `{s}`"))?;
    Ok((u, v))
}

#[derive(Debug, Clone)]
struct BitList(Vec<u32>);

fn parse_bit_list(s: &str) -> Result<BitList, String> {
    parse_bits(s).map(BitList)
}

/// Comma-separated items, each `n`, `a-b` or `a-b:step` (inclusive).
pub fn parse_bits(s: &str) -> Result<Vec<u32>, String> {
    let num = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("bad bit length `{t}` in `{s}`"));
    let mut out = Vec::new();
    for item in s.split(',') {
        let (range, step) = match item.split_once(':') {
            Some((r, st)) => (r, num(st)?),
            None => (item, 1),
        };
        if step == 0 {
            return Err(format!("zero step in `{s}`"));
        }
        match range.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(format!("empty range `{range}`"));
                }
                out.extend((a..=b).step_by(step as usize));
            }
            None => out.push(num(range)?),
        }
    }
    Ok(out)
}

fn random_seed() -> u64 {
    RandomState::new().hash_one(Instant::now())
}

/// Runs `dlog` with `args` (including the program name).
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a, out, err),
        Command::Sweep(a) => sweep(a, out),
        Command::Analyze(a) => analyze(a, out),
        Command::Plot(a) => plot(a),
        Command::Selftest => selftest(out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Run(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_FAILURE
        }
    }
}

enum Failure {
    Usage(String),
    Run(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(m) => Failure::Usage(m),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn io_failure(path: &std::path::Path, e: impl std::fmt::Display) -> Failure {
    Failure::Run(format!("{}: {e}", path.display()))
}

fn solve(a: SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let inst = DlpInstance::new(a.p, a.g, a.b)?;
    let algorithm = match (a.algorithm, a.parallel) {
        (Algorithm::DoubleIndexCalculus, true) => Algorithm::DoubleIndexCalculusParallel,
        (alg, _) => alg,
    };
    let bound = match a.bound {
        Some(b) => BoundChoice::Fixed(b),
        None => BoundChoice::Formula(BoundSpec::new(a.bound_formula, a.bound_multiplier.unwrap_or(0.5))?),
    };
    let options = SolveOptions { bound, budget: a.budget.budget() };
    let seed = a.seed.unwrap_or_else(|| {
        let s = random_seed();
        let _ = writeln!(err, "seed: {s}");
        s
    });
    match solvers::solve(&inst, algorithm, &options, seed) {
        Ok(r) => {
            if a.json {
                let v = json!({
                    "x": r.x,
                    "algorithm": r.algorithm.as_str(),
                    "success": true,
                    "candidates_tested": r.counters.candidates_tested,
                    "smooth_found": r.counters.smooth_found,
                    "rounds": r.counters.rounds,
                    "elapsed_ms": r.counters.elapsed.as_secs_f64() * 1e3,
                    "matched_prime": r.matched_prime,
                });
                let _ = writeln!(out, "{v}");
            } else {
                let _ = writeln!(out, "{}", r.x);
            }
            Ok(EXIT_OK)
        }
        Err(Error::InvalidArgument(m)) => Err(Failure::Usage(m)),
        Err(e) => {
            if a.json {
                let (candidates, rounds) = match e {
                    Error::BudgetExceeded { candidates, rounds } => (candidates, rounds),
                    _ => (0, 0),
                };
                let v = json!({
                    "x": null,
                    "algorithm": algorithm.as_str(),
                    "success": false,
                    "candidates_tested": candidates,
                    "smooth_found": 0,
                    "rounds": rounds,
                    "elapsed_ms": 0.0,
                    "matched_prime": null,
                    "error": e.to_string(),
                });
                let _ = writeln!(out, "{v}");
            }
            Err(Failure::Run(e.to_string()))
        }
    }
}

fn sweep(a: SweepArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let defaults = BenchConfig::default();
    let config = BenchConfig {
        bits_list: if a.bits.is_empty() { defaults.bits_list } else { a.bits.into_iter().flat_map(|b| b.0).collect() },
        multipliers: if a.multipliers.is_empty() { defaults.multipliers } else { a.multipliers },
        algorithms: if a.algorithms.is_empty() { defaults.algorithms } else { a.algorithms },
        trials: a.trials,
        seed: a.seed,
        budget: a.budget.budget(),
        formulas: a.formulas,
        default_formula: a.bound_formula,
        parallel: a.parallel,
    };
    config.validate()?;
    let records = bench::run_sweep(&config)?;
    let bytes = bench::emit_csv(&records)?;
    fs::write(&a.out, bytes).map_err(|e| io_failure(&a.out, e))?;
    let ok = records.iter().filter(|r| r.success).count();
    let _ = writeln!(out, "wrote {} records ({ok} successful) to {}", records.len(), a.out.display());
    Ok(EXIT_OK)
}

fn analyze(a: AnalyzeArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if let Some((u, v)) = a.prob {
        let r = analysis::prob_lower_bound(u, v)?;
        let text = analysis::exact_decimal(&r).unwrap_or_else(|| r.to_string());
        let _ = writeln!(out, "{text}");
    }
    if let Some(k) = a.nice_cases {
        let _ = writeln!(out, "{}", analysis::nice_case_count(k)?);
    }
    Ok(EXIT_OK)
}

fn plot(a: PlotArgs) -> Result<i32, Failure> {
    let bytes = fs::read(&a.input).map_err(|e| io_failure(&a.input, e))?;
    let records = bench::parse_csv(&bytes)?;
    let svg = bench::emit_svg_plot(&records, a.x, a.y, a.series, a.logy)?;
    fs::write(&a.out, svg).map_err(|e| io_failure(&a.out, e))?;
    Ok(EXIT_OK)
}

/// One named check of the self-test suite.
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

const DISCREPANCIES: &str = include_str!("../../../KNOWN_DISCREPANCIES.md");

fn check(name: &'static str, f: impl FnOnce() -> dlog_core::Result<(bool, String)>) -> Check {
    match f() {
        Ok((passed, detail)) => Check { name, passed, detail },
        Err(e) => Check { name, passed: false, detail: e.to_string() },
    }
}

fn solved(inst: &DlpInstance, alg: Algorithm, bound: Option<u64>, seed: u64, want: u64) -> (bool, String) {
    let options = SolveOptions {
        bound: bound.map_or(SolveOptions::default().bound, BoundChoice::Fixed),
        ..SolveOptions::default()
    };
    match solvers::solve(inst, alg, &options, seed) {
        Ok(r) => (r.x == want, format!("x = {}", r.x)),
        Err(e) => (false, e.to_string()),
    }
}

/// The checks behind `dlog selftest`.
pub fn selftest_checks() -> Vec<Check> {
    use dlog_core::worked_example as w;
    vec![
        check("worked example relations match documented discrepancies", || {
            let documented = w::parse_discrepancies(DISCREPANCIES)?;
            let observed = w::observed_discrepancies()?;
            Ok((observed == documented, format!("{} mismatched relations", observed.len())))
        }),
        check("worked example solved by dic", || {
            Ok(solved(&DlpInstance::new(w::P, w::G, w::B)?, Algorithm::DoubleIndexCalculus, Some(w::BOUND), 1, w::X))
        }),
        check("worked example solved by ic", || {
            Ok(solved(&DlpInstance::new(w::P, w::G, w::B)?, Algorithm::IndexCalculus, Some(w::BOUND), 1, w::X))
        }),
        check("generality instance solved by dic", || {
            Ok(solved(&DlpInstance::new(1_040_483, 340_003, 50_064)?, Algorithm::DoubleIndexCalculus, Some(15), 7, 6))
        }),
        check("generality instance defeats ic", || {
            let inst = DlpInstance::new(1_040_483, 340_003, 50_064)?;
            let options = SolveOptions { bound: BoundChoice::Fixed(15), ..SolveOptions::default() };
            Ok(match solvers::solve(&inst, Algorithm::IndexCalculus, &options, 7) {
                Err(e @ (Error::GeneralityFailure { .. } | Error::BudgetExceeded { .. })) => (true, e.to_string()),
                Err(e) => (false, e.to_string()),
                Ok(r) => (false, format!("unexpectedly returned x = {}", r.x)),
            })
        }),
        check("2^x = 9 mod 11 by bsgs", || {
            Ok(solved(&DlpInstance::new(11, 2, 9)?, Algorithm::BabyStepGiantStep, None, 0, 6))
        }),
        check("probability bound at (5,5)", || {
            let text = analysis::exact_decimal(&analysis::prob_lower_bound(5, 5)?).unwrap_or_default();
            Ok((text == "0.9375000298023223876953125", text))
        }),
        check("nice-case counts for k = 2, 3", || {
            let (a, b) = (analysis::nice_case_count(2)?, analysis::nice_case_count(3)?);
            Ok((a == 2u32.into() && b == 30u32.into(), format!("{a}, {b}")))
        }),
    ]
}

fn selftest(out: &mut dyn Write) -> Result<i32, Failure> {
    let checks = selftest_checks();
    for c in &checks {
        let _ = writeln!(out, "{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(out, "{} of {} checks passed", checks.len() - failed, checks.len());
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
}
