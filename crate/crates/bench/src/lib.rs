//! Fixtures shared by the criterion benchmarks.

use dlog_core::bench::{gen_instance, instance_seed};
use dlog_core::DlpInstance;

/// `count` reproducible instances of `bits` bits.
pub fn fixture_instances(bits: u32, count: u32, seed: u64) -> Vec<DlpInstance> {
    (0..count).map(|t| gen_instance(bits, instance_seed(seed, bits, t)).expect("instance generation")).collect()
}
