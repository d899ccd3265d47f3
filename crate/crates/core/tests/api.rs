use dlog_core::bench::{emit_csv, gen_instance, parse_csv, run_sweep, BenchConfig};
use dlog_core::solvers::{solve, SolveOptions};
use dlog_core::{Algorithm, DlpInstance, Error};
use proptest::prelude::*;

#[test]
fn worked_example_all_algorithms() {
    let inst = DlpInstance::new(227, 17, 103).unwrap();
    for alg in Algorithm::ALL {
        assert_eq!(solve(&inst, alg, &SolveOptions::default(), 3).unwrap().x, 10, "{alg}");
    }
}

#[test]
fn target_outside_subgroup() {
    // 4 generates the squares mod 11 and 2 is not a square
    let inst = DlpInstance::new(11, 4, 2).unwrap();
    for alg in Algorithm::ALL {
        assert_eq!(solve(&inst, alg, &SolveOptions::default(), 0).unwrap_err(), Error::NoSolution, "{alg}");
    }
}

#[test]
fn sweep_csv_round_trip() {
    let config = BenchConfig {
        bits_list: vec![18],
        multipliers: vec![0.5, 1.0],
        algorithms: vec![Algorithm::DoubleIndexCalculus, Algorithm::PohligHellman],
        trials: 3,
        ..BenchConfig::default()
    };
    let records = run_sweep(&config).unwrap();
    assert_eq!(records.len(), 12);
    assert!(records.iter().all(|r| r.success));
    assert_eq!(parse_csv(&emit_csv(&records).unwrap()).unwrap(), records);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn solvers_agree(bits in 16u32..=26, seed in any::<u64>()) {
        let inst = gen_instance(bits, seed).unwrap();
        let want = inst.expected_x.unwrap();
        for alg in [Algorithm::DoubleIndexCalculus, Algorithm::IndexCalculus, Algorithm::PohligHellman] {
            prop_assert_eq!(solve(&inst, alg, &SolveOptions::default(), seed).unwrap().x, want);
        }
    }
}
