use crate::circuit::{exact_distribution, Circuit, ShotHistogram};
use crate::error::{Error, Result};
use crate::gates::permutation_gate;
use crate::qstate::StateVector;
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeMap;

/// Discrete-time walk on a cycle of `2^k` nodes.
///
/// Qubits `0..k` hold the node (qubit 0 most significant) and qubit `k` the
/// coin. One step applies the coin `H` and then the shift
/// `S|x, c⟩ = |x + 2c − 1 mod N, c ⊕ 1⟩`: coin 1 steps right, coin 0 steps
/// left, and the coin is flipped.
pub fn walk_circuit(n_nodes: usize, steps: usize) -> Result<Circuit> {
    if n_nodes < 2 || !n_nodes.is_power_of_two() {
        return Err(Error::Invalid(format!("cycle length {n_nodes} must be a power of two ≥ 2")));
    }
    let k = n_nodes.trailing_zeros() as usize;
    let perm: Vec<usize> = (0..2 * n_nodes)
        .map(|i| {
            let (x, c) = (i >> 1, i & 1);
            let nx = if c == 1 { (x + 1) % n_nodes } else { (x + n_nodes - 1) % n_nodes };
            (nx << 1) | (c ^ 1)
        })
        .collect();
    let shift = permutation_gate(&perm, "shift")?;
    let all: Vec<usize> = (0..=k).collect();
    let mut c = Circuit::new(k + 1, k + 1);
    for _ in 0..steps {
        c.h(k);
        c.push_gate(shift.clone(), &all)?;
    }
    Ok(c)
}

/// Walk outcome: exact probabilities keyed by `node bits + coin bit`, and
/// an optional sampled histogram.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkResult {
    pub probabilities: BTreeMap<String, f64>,
    pub histogram: Option<ShotHistogram>,
}

/// Runs `steps` walk steps from `|start, 0⟩`.
pub fn quantum_walk_cycle<R: Rng + ?Sized>(
    n_nodes: usize,
    steps: usize,
    start: usize,
    shots: Option<u64>,
    rng: &mut R,
) -> Result<WalkResult> {
    let c = walk_circuit(n_nodes, steps)?;
    if start >= n_nodes {
        return Err(Error::Invalid(format!("start node {start} outside the cycle")));
    }
    let n = c.n_qubits();
    let init = StateVector::basis(n, start << 1);
    let s = c.run_statevector_from(&init)?;
    let probabilities = exact_distribution(&s, &(0..n).collect::<Vec<_>>());
    let histogram = match shots {
        None => None,
        Some(k) => {
            let mut full = Circuit::new(n, n);
            for q in 0..n {
                if (start << 1) >> (n - 1 - q) & 1 == 1 {
                    full.x(q);
                }
            }
            full.append(&c)?;
            full.measure_all()?;
            Some(full.sample(k, None, rng)?)
        }
    };
    Ok(WalkResult { probabilities, histogram })
}
