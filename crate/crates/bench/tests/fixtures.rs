use dlog_bench::fixture_instances;
use dlog_core::solvers::verify_solution;

#[test]
fn fixtures_are_reproducible_and_valid() {
    let a = fixture_instances(24, 5, 9);
    assert_eq!(a, fixture_instances(24, 5, 9));
    assert_ne!(a, fixture_instances(24, 5, 10));
    for inst in &a {
        assert_eq!(64 - inst.p.leading_zeros(), 24);
        assert!(verify_solution(inst, inst.expected_x.unwrap()));
    }
}
