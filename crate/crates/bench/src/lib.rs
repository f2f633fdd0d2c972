//! Shared fixtures for the criterion benchmarks.

use lre_core::bench::{ghz_mirror, random_mirror};
use lre_core::Circuit;

/// `(chunks, degree)` pairs spanning small to large sample matrices.
pub const INTERPOLATION_CASES: [(usize, u32); 5] = [(2, 1), (4, 2), (8, 2), (12, 2), (4, 3)];

pub fn ghz_fixtures() -> Vec<(usize, Circuit)> {
    [2, 4, 6, 8].into_iter().map(|n| (n, ghz_mirror(n))).collect()
}

pub fn random_fixture(n: usize) -> Circuit {
    random_mirror(n, 4, 0.9, 17)
}
