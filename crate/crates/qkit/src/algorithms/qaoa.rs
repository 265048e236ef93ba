//! QAOA for MaxCut.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gates::{apply_in_place, param};
use crate::qstate::{qubit_value, sample_index, StateVector};
use crate::scalar::{c64, C64};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Undirected graph for MaxCut.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaxCutInstance {
    pub n_nodes: usize,
    pub edges: Vec<(usize, usize)>,
}

impl MaxCutInstance {
    pub fn new(n_nodes: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut seen = std::collections::BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(Error::Invalid(format!("self-loop on node {a}")));
            }
            if a >= n_nodes || b >= n_nodes {
                return Err(Error::QubitOutOfRange { index: a.max(b), n: n_nodes });
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::Invalid(format!("duplicate edge ({a}, {b})")));
            }
        }
        if n_nodes > 20 {
            return Err(Error::TooLarge(format!("{n_nodes} nodes (at most 20)")));
        }
        Ok(MaxCutInstance { n_nodes, edges: edges.to_vec() })
    }

    pub fn single_edge() -> Self {
        MaxCutInstance::new(2, &[(0, 1)]).expect("static graph")
    }

    pub fn triangle() -> Self {
        MaxCutInstance::new(3, &[(0, 1), (1, 2), (0, 2)]).expect("static graph")
    }

    /// A triangle with a pendant edge (maximum cut 3).
    pub fn triangle_plus_edge() -> Self {
        MaxCutInstance::new(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]).expect("static graph")
    }

    /// Cut size of every basis state (node `i` ↔ qubit `i`).
    pub fn cut_values(&self) -> Vec<usize> {
        let n = self.n_nodes;
        (0..1usize << n)
            .map(|z| self.edges.iter().filter(|&&(a, b)| qubit_value(z, n, a) != qubit_value(z, n, b)).count())
            .collect()
    }

    /// Maximum cut by enumeration.
    pub fn max_cut(&self) -> usize {
        self.cut_values().into_iter().max().unwrap_or(0)
    }
}

/// `r` rounds of angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QaoaParams {
    pub gamma: Vec<f64>,
    pub beta: Vec<f64>,
}

impl QaoaParams {
    pub fn new(gamma: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if gamma.is_empty() || gamma.len() != beta.len() {
            return Err(Error::Invalid("gamma and beta need the same non-zero length".into()));
        }
        Ok(QaoaParams { gamma, beta })
    }

    pub fn rounds(&self) -> usize {
        self.gamma.len()
    }
}

/// QAOA circuit: `H` on every qubit, then per round the edge phases
/// `e^{−iγ C_ij}` (as CX · P(−γ) · CX, i.e. `diag(1, e^{−iγ}, e^{−iγ}, 1)`)
/// and the mixer `e^{−iβX} = R_x(2β)` on every qubit.
pub fn qaoa_circuit(g: &MaxCutInstance, p: &QaoaParams) -> Circuit {
    let n = g.n_nodes;
    let mut c = Circuit::new(n, n);
    for q in 0..n {
        c.h(q);
    }
    for (gamma, beta) in p.gamma.iter().zip(&p.beta) {
        for &(a, b) in &g.edges {
            c.cx(a, b).g("p", &[-gamma], &[b]).cx(a, b);
        }
        for q in 0..n {
            c.g("rx", &[2.0 * beta], &[q]);
        }
    }
    c
}

/// Final state computed from the diagonal cost and per-qubit mixers
/// (identical to running [`qaoa_circuit`], but cheaper).
pub fn qaoa_state(g: &MaxCutInstance, p: &QaoaParams) -> StateVector {
    let cuts = g.cut_values();
    evolve(g.n_nodes, &cuts, p)
}

fn evolve(n: usize, cuts: &[usize], p: &QaoaParams) -> StateVector {
    let d = 1usize << n;
    let mut amps = vec![c64(1.0 / (d as f64).sqrt(), 0.0); d];
    for (gamma, beta) in p.gamma.iter().zip(&p.beta) {
        for (a, &cv) in amps.iter_mut().zip(cuts) {
            *a *= C64::from_polar(1.0, -gamma * cv as f64);
        }
        let rx = param("rx", &[2.0 * beta]);
        for q in 0..n {
            apply_in_place(&mut amps, n, &rx, &[q]).expect("valid target");
        }
    }
    StateVector::normalized(amps).expect("unitary evolution")
}

/// Exact QAOA statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QaoaResult {
    pub expected_cut: f64,
    pub prob_max_cut: f64,
    pub max_cut: usize,
    /// Probability of each cut size.
    pub cut_distribution: BTreeMap<usize, f64>,
}

fn summarize(probs: &[f64], cuts: &[usize]) -> QaoaResult {
    let max_cut = cuts.iter().copied().max().unwrap_or(0);
    let mut dist = BTreeMap::new();
    let mut exp = 0.0;
    for (&p, &c) in probs.iter().zip(cuts) {
        exp += p * c as f64;
        *dist.entry(c).or_insert(0.0) += p;
    }
    QaoaResult { expected_cut: exp, prob_max_cut: dist.get(&max_cut).copied().unwrap_or(0.0), max_cut, cut_distribution: dist }
}

/// Expected cut, probability of a maximum cut and the cut distribution from
/// the exact final state.
pub fn qaoa_maxcut(g: &MaxCutInstance, p: &QaoaParams) -> Result<QaoaResult> {
    if g.edges.is_empty() {
        return Err(Error::Invalid("graph has no edges".into()));
    }
    let cuts = g.cut_values();
    Ok(summarize(&evolve(g.n_nodes, &cuts, p).probabilities(), &cuts))
}

/// Sampled estimate of the same statistics from `shots` measurements.
pub fn qaoa_sampled<R: Rng + ?Sized>(g: &MaxCutInstance, p: &QaoaParams, shots: u64, rng: &mut R) -> Result<QaoaResult> {
    if g.edges.is_empty() {
        return Err(Error::Invalid("graph has no edges".into()));
    }
    if shots == 0 {
        return Err(Error::Invalid("shots must be positive".into()));
    }
    let cuts = g.cut_values();
    let probs = evolve(g.n_nodes, &cuts, p).probabilities();
    let mut freq = vec![0.0; probs.len()];
    for _ in 0..shots {
        freq[sample_index(&probs, rng)] += 1.0 / shots as f64;
    }
    Ok(summarize(&freq, &cuts))
}

/// Exhaustive grid search over `γ ∈ [0, 2π)^r`, `β ∈ [0, π)^r` with step
/// `π / steps_per_pi`. The first maximum in lexicographic order
/// `(γ₁…γ_r, β₁…β_r)` wins. Grids above 10⁷ points are refused.
pub fn qaoa_grid_search(g: &MaxCutInstance, r: usize, steps_per_pi: usize) -> Result<(QaoaParams, QaoaResult)> {
    if r == 0 || steps_per_pi == 0 {
        return Err(Error::Invalid("rounds and resolution must be positive".into()));
    }
    if g.edges.is_empty() {
        return Err(Error::Invalid("graph has no edges".into()));
    }
    let ng = 2 * steps_per_pi;
    let nb = steps_per_pi;
    let total = (ng as f64 * nb as f64).powi(r as i32);
    if total > 1e7 {
        return Err(Error::TooLarge(format!("{total} grid points")));
    }
    let cuts = g.cut_values();
    let step = PI / steps_per_pi as f64;
    let mut best: Option<(f64, QaoaParams)> = None;
    let mut idx = vec![0usize; 2 * r];
    loop {
        let p = QaoaParams {
            gamma: idx[..r].iter().map(|&i| i as f64 * step).collect(),
            beta: idx[r..].iter().map(|&i| i as f64 * step).collect(),
        };
        let probs = evolve(g.n_nodes, &cuts, &p).probabilities();
        let e: f64 = probs.iter().zip(&cuts).map(|(p, &c)| p * c as f64).sum();
        if best.as_ref().is_none_or(|(b, _)| e > b + 1e-12) {
            best = Some((e, p));
        }
        // Odometer over (γ…, β…), last index fastest.
        let mut k = 2 * r;
        loop {
            if k == 0 {
                let (_, p) = best.expect("grid is non-empty");
                let res = summarize(&evolve(g.n_nodes, &cuts, &p).probabilities(), &cuts);
                return Ok((p, res));
            }
            k -= 1;
            let lim = if k < r { ng } else { nb };
            idx[k] += 1;
            if idx[k] < lim {
                break;
            }
            idx[k] = 0;
        }
    }
}
