//! Minimum finding by repeated threshold search.

use crate::transforms::{boyer_search_budgeted, Oracle};
use rand::Rng;
use serde::Serialize;

/// Outcome of [`min_find`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinFindResult {
    /// Final pivot.
    pub index: usize,
    /// Grover iterations spent over the whole run.
    pub grover_iterations: u64,
    /// Number of inner searches.
    pub searches: u64,
    /// How often the pivot moved to a strictly smaller key.
    pub improvements: u64,
}

/// Iteration budget `T = 22.5·√N + 1.4·log₂²N`.
pub fn min_find_budget(n: usize) -> u64 {
    let nf = n as f64;
    (22.5 * nf.sqrt() + 1.4 * nf.log2().powi(2)).floor() as u64
}

/// Index of the smallest key.
///
/// A random pivot `j` is drawn, then each inner search looks for any `i`
/// with `F(i) ≤ F(j)`; since the comparison is reflexive the pivot itself is
/// always a solution. A strictly smaller hit replaces the pivot, a tie keeps
/// it. The run ends once the budget `T` is exhausted, and the last pivot is
/// returned. The list is padded to a power of two with entries that are
/// never marked. Incomparable keys (such as NaN) are never marked either.
pub fn min_find<T: PartialOrd, R: Rng + ?Sized>(values: &[T], rng: &mut R) -> MinFindResult {
    let n = values.len();
    if n <= 1 {
        return MinFindResult { index: 0, grover_iterations: 0, searches: 0, improvements: 0 };
    }
    let bits = n.next_power_of_two().trailing_zeros() as usize;
    let budget = min_find_budget(n);
    let mut pivot = rng.random_range(0..n);
    let mut used = 0u64;
    let mut searches = 0u64;
    let mut improvements = 0u64;
    // Rounds at j = 0 cost no iterations; bound them separately so a run
    // cannot spin forever.
    let max_searches = 50 * budget.max(1);
    while used < budget && searches < max_searches {
        let o = Oracle::from_predicate(bits, |i| i < n && values[i] <= values[pivot]).expect("width within range");
        let out = boyer_search_budgeted(&o, Some(budget - used), rng);
        used += out.grover_iterations;
        searches += 1;
        if let Some(y) = out.found {
            if values[y] < values[pivot] {
                pivot = y;
                improvements += 1;
            }
        }
    }
    MinFindResult { index: pivot, grover_iterations: used, searches, improvements }
}
