//! Breadth-first layering of a graph with neighbor discovery by quantum
//! search.

use crate::error::{Error, Result};
use crate::transforms::{boyer_search, Oracle};
use rand::Rng;
use serde::Serialize;
use std::collections::VecDeque;

/// Layer of a vertex that cannot be reached from the source.
pub const UNREACHED: usize = usize::MAX;

/// Outcome of [`layered_partition`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LayeredResult {
    /// BFS distance per vertex, [`UNREACHED`] where there is none.
    pub layers: Vec<usize>,
    /// Vertices left at [`UNREACHED`].
    pub unreached: Vec<usize>,
    pub grover_iterations: u64,
    pub searches: u64,
}

/// Independent empty searches needed before a vertex is declared to have
/// no undiscovered neighbors. Each search misses an existing solution with
/// small probability, so repeating it drives the error down geometrically.
const CONFIRMATIONS: usize = 3;

fn check_adjacency(adj: &[Vec<bool>], source: usize) -> Result<usize> {
    let n = adj.len();
    if n == 0 {
        return Err(Error::Invalid("graph has no vertices".into()));
    }
    if n > 16 {
        return Err(Error::TooLarge(format!("{n} vertices (at most 16)")));
    }
    if let Some(row) = adj.iter().find(|r| r.len() != n) {
        return Err(Error::Dimension { expected: n, got: row.len() });
    }
    if source >= n {
        return Err(Error::Invalid(format!("source {source} is not a vertex")));
    }
    Ok(n)
}

/// Classical breadth-first distances, the reference for [`layered_partition`].
pub fn bfs_layers(adj: &[Vec<bool>], source: usize) -> Result<Vec<usize>> {
    let n = check_adjacency(adj, source)?;
    let mut l = vec![UNREACHED; n];
    l[source] = 0;
    let mut q = VecDeque::from([source]);
    while let Some(x) = q.pop_front() {
        for y in 0..n {
            if adj[x][y] && l[y] == UNREACHED {
                l[y] = l[x] + 1;
                q.push_back(y);
            }
        }
    }
    Ok(l)
}

/// Layers the graph from `source`. For each vertex `x` of the current
/// layer the neighbors of `x` that are still unlabeled are found one at a
/// time by searching over an oracle that marks `{y : adj(x, y) ∧ L[y] = ∞}`.
pub fn layered_partition<R: Rng + ?Sized>(adj: &[Vec<bool>], source: usize, rng: &mut R) -> Result<LayeredResult> {
    let n = check_adjacency(adj, source)?;
    let bits = (n.next_power_of_two().trailing_zeros() as usize).max(1);
    let mut l = vec![UNREACHED; n];
    l[source] = 0;
    let mut frontier = vec![source];
    let mut iters = 0u64;
    let mut searches = 0u64;
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for &x in &frontier {
            let mut misses = 0;
            while misses < CONFIRMATIONS {
                let o = Oracle::from_predicate(bits, |y| y < n && adj[x][y] && l[y] == UNREACHED)?;
                let out = boyer_search(&o, rng);
                iters += out.grover_iterations;
                searches += 1;
                match out.found {
                    Some(y) => {
                        l[y] = l[x] + 1;
                        next.push(y);
                        misses = 0;
                    }
                    None => misses += 1,
                }
            }
        }
        frontier = next;
    }
    let unreached = (0..n).filter(|&v| l[v] == UNREACHED).collect();
    Ok(LayeredResult { layers: l, unreached, grover_iterations: iters, searches })
}
