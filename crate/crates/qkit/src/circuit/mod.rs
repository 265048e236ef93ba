//! Circuits: construction, exact execution, shot sampling, metrics, a QASM
//! text format, topology-aware CNOT rewriting and a trajectory noise model.

mod noise;
mod qasm;
mod topology;

pub use noise::{gate_generator, idle_decoherence_experiment, CoherenceReport, NoiseModel};
pub(crate) use noise::{noisy_final_state, Generators};
pub use qasm::{emit_qasm, parse_qasm, reverse_key};
pub use topology::{reroute_for_topology, Topology};

use crate::error::{Error, Result};
use crate::gates::{self, apply_in_place, Gate, GateApplication};
use crate::linalg::CMatrix;
use crate::qstate::{qubit_value, sample_index, StateVector};
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeMap;

/// One circuit instruction.
#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    Gate(GateApplication),
    Measure { qubit: usize, clbit: usize },
    Barrier(Vec<usize>),
    Reset(usize),
}

/// Ordered instruction list over flat qubit and classical-bit indices.
///
/// Register names are kept only for the QASM round trip; register `k` covers
/// a contiguous index range following the registers declared before it.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    n_clbits: usize,
    ops: Vec<Op>,
    qregs: Vec<(String, usize)>,
    cregs: Vec<(String, usize)>,
}

/// Gate count, CNOT count and depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Metrics {
    pub gate_count: usize,
    pub cnot_count: usize,
    pub depth: usize,
}

/// Outcome counts keyed by classical bit string (clbit 0 leftmost).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShotHistogram {
    pub counts: BTreeMap<String, u64>,
    pub shots: u64,
}

impl ShotHistogram {
    /// Empirical frequency of `key` (0 when absent).
    pub fn frequency(&self, key: &str) -> f64 {
        self.counts.get(key).copied().unwrap_or(0) as f64 / self.shots as f64
    }

    /// Total-variation distance to an exact distribution given as
    /// `(key, probability)` pairs.
    pub fn tvd(&self, exact: &BTreeMap<String, f64>) -> f64 {
        let mut keys: Vec<&String> = self.counts.keys().chain(exact.keys()).collect();
        keys.sort();
        keys.dedup();
        0.5 * keys.iter().map(|k| (self.frequency(k) - exact.get(*k).copied().unwrap_or(0.0)).abs()).sum::<f64>()
    }
}

impl Circuit {
    /// Empty circuit with registers `q[n_qubits]` and `c[n_clbits]`.
    pub fn new(n_qubits: usize, n_clbits: usize) -> Self {
        let qregs = if n_qubits > 0 { vec![("q".to_string(), n_qubits)] } else { Vec::new() };
        let cregs = if n_clbits > 0 { vec![("c".to_string(), n_clbits)] } else { Vec::new() };
        Circuit { n_qubits, n_clbits, ops: Vec::new(), qregs, cregs }
    }

    pub(crate) fn with_registers(qregs: Vec<(String, usize)>, cregs: Vec<(String, usize)>) -> Self {
        let n_qubits = qregs.iter().map(|r| r.1).sum();
        let n_clbits = cregs.iter().map(|r| r.1).sum();
        Circuit { n_qubits, n_clbits, ops: Vec::new(), qregs, cregs }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_clbits(&self) -> usize {
        self.n_clbits
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn qregs(&self) -> &[(String, usize)] {
        &self.qregs
    }

    pub fn cregs(&self) -> &[(String, usize)] {
        &self.cregs
    }

    /// Appends a gate at the given targets (controls first).
    pub fn push_gate(&mut self, gate: Gate, targets: &[usize]) -> Result<&mut Self> {
        for &q in targets {
            if q >= self.n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n: self.n_qubits });
            }
        }
        self.ops.push(Op::Gate(GateApplication::new(gate, targets.to_vec())?));
        Ok(self)
    }

    /// Appends a named standard gate.
    pub fn add(&mut self, name: &str, params: &[f64], targets: &[usize]) -> Result<&mut Self> {
        let g = gates::standard_gate(name, params)?;
        self.push_gate(g, targets)
    }

    /// Panicking shorthand of [`Circuit::add`] for builders with fixed,
    /// known-valid arguments.
    pub fn g(&mut self, name: &str, params: &[f64], targets: &[usize]) -> &mut Self {
        self.add(name, params, targets).expect("valid gate application");
        self
    }

    pub fn h(&mut self, q: usize) -> &mut Self {
        self.g("h", &[], &[q])
    }

    pub fn x(&mut self, q: usize) -> &mut Self {
        self.g("x", &[], &[q])
    }

    pub fn cx(&mut self, c: usize, t: usize) -> &mut Self {
        self.g("cx", &[], &[c, t])
    }

    /// Appends `measure q → c`.
    pub fn measure(&mut self, qubit: usize, clbit: usize) -> Result<&mut Self> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitOutOfRange { index: qubit, n: self.n_qubits });
        }
        if clbit >= self.n_clbits {
            return Err(Error::Invalid(format!("clbit {clbit} out of range for {} bits", self.n_clbits)));
        }
        self.ops.push(Op::Measure { qubit, clbit });
        Ok(self)
    }

    /// Measures qubit `i` into clbit `i` for every qubit (classical register
    /// must be at least as wide).
    pub fn measure_all(&mut self) -> Result<&mut Self> {
        for q in 0..self.n_qubits {
            self.measure(q, q)?;
        }
        Ok(self)
    }

    pub fn barrier(&mut self, qubits: &[usize]) -> &mut Self {
        let qs = if qubits.is_empty() { (0..self.n_qubits).collect() } else { qubits.to_vec() };
        self.ops.push(Op::Barrier(qs));
        self
    }

    pub fn reset(&mut self, q: usize) -> Result<&mut Self> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n: self.n_qubits });
        }
        self.ops.push(Op::Reset(q));
        Ok(self)
    }

    pub(crate) fn push_op(&mut self, op: Op) {
        self.ops.push(op);
    }

    /// Appends every op of `other`, with its qubit `i` mapped to `qubit_map[i]`.
    pub fn append_mapped(&mut self, other: &Circuit, qubit_map: &[usize]) -> Result<&mut Self> {
        if qubit_map.len() != other.n_qubits {
            return Err(Error::Dimension { expected: other.n_qubits, got: qubit_map.len() });
        }
        for op in &other.ops {
            match op {
                Op::Gate(app) => {
                    let t: Vec<usize> = app.targets.iter().map(|&q| qubit_map[q]).collect();
                    self.push_gate(app.gate.clone(), &t)?;
                }
                Op::Measure { qubit, clbit } => {
                    self.measure(qubit_map[*qubit], *clbit)?;
                }
                Op::Barrier(qs) => {
                    let qs: Vec<usize> = qs.iter().map(|&q| qubit_map[q]).collect();
                    self.barrier(&qs);
                }
                Op::Reset(q) => {
                    self.reset(qubit_map[*q])?;
                }
            }
        }
        Ok(self)
    }

    /// Appends `other` acting on the same qubit indices.
    pub fn append(&mut self, other: &Circuit) -> Result<&mut Self> {
        let map: Vec<usize> = (0..other.n_qubits).collect();
        self.append_mapped(other, &map)
    }

    /// The gate-only inverse circuit (measurements are not invertible).
    pub fn inverse(&self) -> Result<Circuit> {
        let mut out = Circuit::new(self.n_qubits, self.n_clbits);
        for op in self.ops.iter().rev() {
            match op {
                Op::Gate(app) => {
                    out.push_gate(invert_gate(&app.gate), &app.targets)?;
                }
                Op::Barrier(qs) => {
                    out.barrier(qs);
                }
                _ => return Err(Error::Invalid("cannot invert a circuit with measurements or resets".into())),
            }
        }
        Ok(out)
    }

    /// Number of gate applications.
    pub fn gate_count(&self) -> usize {
        self.ops.iter().filter(|o| matches!(o, Op::Gate(_))).count()
    }

    /// Number of CNOT gates.
    pub fn cnot_count(&self) -> usize {
        self.ops.iter().filter(|o| matches!(o, Op::Gate(a) if a.gate.name() == "cx")).count()
    }

    /// Gate count, CNOT count and depth. Depth is the longest chain of ops
    /// sharing qubits: gates and measurements cost one layer, barriers
    /// synchronize their qubits at no cost.
    pub fn metrics(&self) -> Metrics {
        let mut level = vec![0usize; self.n_qubits];
        for op in &self.ops {
            let qs: Vec<usize> = match op {
                Op::Gate(a) => a.targets.clone(),
                Op::Measure { qubit, .. } => vec![*qubit],
                Op::Reset(q) => vec![*q],
                Op::Barrier(qs) => {
                    let m = qs.iter().map(|&q| level[q]).max().unwrap_or(0);
                    for &q in qs {
                        level[q] = m;
                    }
                    continue;
                }
            };
            let m = qs.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for q in qs {
                level[q] = m;
            }
        }
        Metrics {
            gate_count: self.gate_count(),
            cnot_count: self.cnot_count(),
            depth: level.into_iter().max().unwrap_or(0),
        }
    }

    /// True when some gate or reset acts on a qubit after it was measured.
    pub fn has_mid_circuit_measurement(&self) -> bool {
        let mut measured = vec![false; self.n_qubits];
        for op in &self.ops {
            match op {
                Op::Measure { qubit, .. } => measured[*qubit] = true,
                Op::Gate(a) => {
                    if a.targets.iter().any(|&q| measured[q]) {
                        return true;
                    }
                }
                Op::Reset(q) => {
                    if measured[*q] {
                        return true;
                    }
                }
                Op::Barrier(_) => {}
            }
        }
        false
    }

    /// Exact final state from `|0…0⟩`. Terminal measurements are ignored;
    /// mid-circuit measurements are an error.
    pub fn run_statevector(&self) -> Result<StateVector> {
        self.run_statevector_from(&StateVector::zero(self.n_qubits))
    }

    /// Exact final state from a given initial state.
    pub fn run_statevector_from(&self, init: &StateVector) -> Result<StateVector> {
        if init.n_qubits() != self.n_qubits {
            return Err(Error::Dimension { expected: self.n_qubits, got: init.n_qubits() });
        }
        if self.has_mid_circuit_measurement() {
            return Err(Error::Execution("measurement before the end of the circuit".into()));
        }
        let mut s = init.clone();
        for op in &self.ops {
            match op {
                Op::Gate(app) => apply_in_place(s.amps_mut(), self.n_qubits, &app.gate, &app.targets)?,
                Op::Reset(q) => {
                    let p1 = s.subset_probability(&[*q], 1);
                    if p1 > 1e-12 {
                        return Err(Error::Execution(format!("reset of qubit {q} in superposition needs sampling")));
                    }
                }
                Op::Measure { .. } | Op::Barrier(_) => {}
            }
        }
        Ok(s)
    }

    /// Full circuit unitary (gates only), built column by column. For small
    /// registers only.
    pub fn unitary(&self) -> Result<CMatrix> {
        let dim = 1usize << self.n_qubits;
        let mut u = CMatrix::zeros(dim, dim);
        for col in 0..dim {
            let s = self.run_statevector_from(&StateVector::basis(self.n_qubits, col))?;
            for (row, a) in s.amps().iter().enumerate() {
                u[(row, col)] = *a;
            }
        }
        Ok(u)
    }

    /// Measured `(qubit, clbit)` pairs in program order.
    pub fn measurements(&self) -> Vec<(usize, usize)> {
        self.ops
            .iter()
            .filter_map(|o| match o {
                Op::Measure { qubit, clbit } => Some((*qubit, *clbit)),
                _ => None,
            })
            .collect()
    }

    /// Samples `shots` independent runs.
    ///
    /// Without noise and without mid-circuit measurement the final state is
    /// computed once and outcomes are drawn from it. Otherwise every shot is
    /// an independent trajectory. A circuit with no measurement is treated as
    /// measuring every qubit (keys then have one character per qubit).
    pub fn sample<R: Rng + ?Sized>(&self, shots: u64, noise: Option<&NoiseModel>, rng: &mut R) -> Result<ShotHistogram> {
        if shots == 0 {
            return Err(Error::Invalid("shots must be positive".into()));
        }
        let mut meas = self.measurements();
        let mut width = self.n_clbits;
        let implicit = meas.is_empty();
        if implicit {
            meas = (0..self.n_qubits).map(|q| (q, q)).collect();
            width = self.n_qubits;
        }
        let noisy = noise.is_some_and(|n| !n.is_noiseless());
        let mut counts = BTreeMap::new();
        if !noisy && !self.has_mid_circuit_measurement() && !self.ops.iter().any(|o| matches!(o, Op::Reset(_))) {
            let s = self.run_statevector()?;
            let qubits: Vec<usize> = meas.iter().map(|m| m.0).collect();
            let dist = s.marginal(&qubits);
            let cdf: Vec<f64> = dist
                .iter()
                .scan(0.0, |acc, p| {
                    *acc += p;
                    Some(*acc)
                })
                .collect();
            let total = *cdf.last().unwrap_or(&1.0);
            let mut tally = vec![0u64; dist.len()];
            for _ in 0..shots {
                let r = rng.random::<f64>() * total;
                let mut o = cdf.partition_point(|&c| c <= r);
                if o >= dist.len() {
                    o = dist.len() - 1;
                }
                while dist[o] == 0.0 && o > 0 {
                    o -= 1;
                }
                tally[o] += 1;
            }
            for (o, &c) in tally.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let mut bits = vec!['0'; width];
                for (j, &(_, cl)) in meas.iter().enumerate() {
                    if (o >> (meas.len() - 1 - j)) & 1 == 1 {
                        bits[cl] = '1';
                    } else {
                        bits[cl] = '0';
                    }
                }
                *counts.entry(bits.into_iter().collect()).or_insert(0) += c;
            }
        } else {
            let model = noise.cloned().unwrap_or_default();
            let gens = noise::Generators::for_circuit(self);
            for _ in 0..shots {
                let bits = noise::run_trajectory(self, &model, &gens, &meas, width, implicit, rng)?;
                *counts.entry(bits).or_insert(0) += 1;
            }
        }
        Ok(ShotHistogram { counts, shots })
    }
}

/// Inverse of a gate, keeping a standard name where one exists.
pub fn invert_gate(g: &Gate) -> Gate {
    let p = g.params();
    let neg = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<_>>();
    let std = match g.name() {
        "id" | "x" | "y" | "z" | "h" | "cx" | "cy" | "cz" | "ch" | "swap" | "ccx" | "cswap" => Some(gates::named(g.name())),
        "s" => Some(gates::named("sdg")),
        "sdg" => Some(gates::named("s")),
        "t" => Some(gates::named("tdg")),
        "tdg" => Some(gates::named("t")),
        "u1" | "p" | "r" | "rx" | "ry" | "rz" | "cp" | "cu1" | "crz" | "cry" if p.len() == 1 => {
            Some(gates::param(g.name(), &neg(p)))
        }
        "u3" if p.len() == 3 => Some(gates::param("u3", &[-p[0], -p[2], -p[1]])),
        "u2" if p.len() == 2 => Some(gates::param("u3", &[-std::f64::consts::FRAC_PI_2, -p[1], -p[0]])),
        _ => None,
    };
    std.unwrap_or_else(|| g.dagger())
}

/// Distribution of a state's measurement over `qubits` keyed by bit string.
pub fn exact_distribution(s: &StateVector, qubits: &[usize]) -> BTreeMap<String, f64> {
    let dist = s.marginal(qubits);
    dist.iter()
        .enumerate()
        .filter(|(_, &p)| p > 1e-15)
        .map(|(o, &p)| (crate::qstate::index_to_bits(o, qubits.len()), p))
        .collect()
}

/// Samples one basis index from a state (convenience for algorithms).
pub fn sample_state<R: Rng + ?Sized>(s: &StateVector, rng: &mut R) -> usize {
    sample_index(&s.probabilities(), rng)
}

/// Value of qubit `q` in basis index `idx` (re-exported for callers that
/// post-process sampled indices).
pub fn bit_of(idx: usize, n: usize, q: usize) -> usize {
    qubit_value(idx, n, q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn bell() -> Circuit {
        let mut c = Circuit::new(2, 2);
        c.h(0).cx(0, 1);
        c
    }

    #[test]
    fn bell_statevector() {
        let s = bell().run_statevector().unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.amp(0) - c64(h, 0.0)).norm() < 1e-15 && (s.amp(3) - c64(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn empty_circuit() {
        let c = Circuit::new(3, 0);
        assert_eq!(c.run_statevector().unwrap(), StateVector::zero(3));
        assert_eq!(c.metrics(), Metrics { gate_count: 0, cnot_count: 0, depth: 0 });
    }

    #[test]
    fn ghz_circuit() {
        let mut c = Circuit::new(3, 0);
        c.h(0).cx(0, 1).cx(1, 2);
        let s = c.run_statevector().unwrap();
        assert!((s.amp(0).norm_sqr() - 0.5).abs() < 1e-15 && (s.amp(7).norm_sqr() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn bell_metrics() {
        assert_eq!(bell().metrics(), Metrics { gate_count: 2, cnot_count: 1, depth: 2 });
    }

    #[test]
    fn barrier_synchronizes_without_cost() {
        let mut c = Circuit::new(2, 0);
        c.h(0).h(0).barrier(&[]).h(1);
        assert_eq!(c.metrics().depth, 3);
    }

    #[test]
    fn mid_circuit_measurement_rejected() {
        let mut c = Circuit::new(1, 1);
        c.h(0).measure(0, 0).unwrap();
        c.h(0);
        assert!(c.run_statevector().is_err());
    }

    #[test]
    fn bell_sampling_never_odd_parity() {
        let mut c = bell();
        c.measure_all().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let h = c.sample(1000, None, &mut rng).unwrap();
        assert_eq!(h.counts.get("01"), None);
        assert_eq!(h.counts.get("10"), None);
        assert_eq!(h.counts.values().sum::<u64>(), 1000);
        assert!((h.frequency("00") - 0.5).abs() < 0.06);
    }

    #[test]
    fn zero_measure_always_zero() {
        let mut c = Circuit::new(1, 1);
        c.measure(0, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = c.sample(50, None, &mut rng).unwrap();
        assert_eq!(h.counts.get("0"), Some(&50));
        assert!(c.sample(0, None, &mut rng).is_err());
    }

    #[test]
    fn inverse_composes_to_identity() {
        let mut c = Circuit::new(2, 0);
        c.g("u3", &[0.3, 0.2, 0.9], &[0]).g("u2", &[0.1, 1.4], &[1]).cx(0, 1).g("t", &[], &[1]).g("cp", &[0.7], &[1, 0]);
        let mut full = c.clone();
        full.append(&c.inverse().unwrap()).unwrap();
        let u = full.unitary().unwrap();
        assert!(crate::linalg::max_abs_diff(&u, &crate::linalg::identity(4)) < 1e-12);
    }

    #[test]
    fn clbit_mapping_in_keys() {
        // Qubit 0 in |1⟩ measured into clbit 1.
        let mut c = Circuit::new(2, 2);
        c.x(0).measure(0, 1).unwrap();
        c.measure(1, 0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = c.sample(10, None, &mut rng).unwrap();
        assert_eq!(h.counts.get("01"), Some(&10));
    }
}
