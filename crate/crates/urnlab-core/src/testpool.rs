//! Deterministic pools of tenable specs used by tests across modules.

#![doc(hidden)]

use crate::urn::{validate, UrnSpec};

/// Every tenable spec with a, b, s <= 5 and a handful of initial compositions.
/// Deterministic order; used to drive property-style tests.
pub fn tenable_pool() -> Vec<UrnSpec> {
    let mut pool = Vec::new();
    for a in 1..=5u64 {
        for b in 1..=5u64 {
            for s in 1..=5u64 {
                for (m1, m2) in [(1, 0), (1, 1), (2, 1)] {
                    let spec = UrnSpec::new(a, b, s, a * m1, b * m2);
                    if validate(&spec).is_ok() {
                        pool.push(spec);
                    }
                }
            }
        }
    }
    pool
}

/// A short diverse selection for more expensive tests.
pub fn small_pool() -> Vec<UrnSpec> {
    vec![
        UrnSpec::two_three_tree(),
        UrnSpec::pentagonal(),
        UrnSpec::new(1, 1, 1, 1, 0),
        UrnSpec::new(1, 3, 2, 2, 3),
        UrnSpec::new(3, 1, 2, 3, 0),
    ]
}
