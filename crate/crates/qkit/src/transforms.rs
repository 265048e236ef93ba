//! Reusable algorithmic building blocks: the quantum Fourier transform,
//! phase estimation, the Hadamard test, Grover's operator, amplitude
//! amplification and search with an unknown number of solutions.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gates::{apply_in_place, controlled, gate_from_matrix, permutation_gate, Gate};
use crate::linalg::CMatrix;
use crate::qstate::{index_to_bits, sample_index, StateVector};
use crate::scalar::{c64, C64};
use rand::Rng;
use serde::Serialize;
use std::f64::consts::PI;

// ---------------------------------------------------------------------------
// Fourier transform

/// The `2^n`-point DFT matrix `W_{jk} = ω^{jk}/√N`, `ω = e^{2πi/N}`.
pub fn dft_matrix(n: usize) -> CMatrix {
    let d = 1usize << n;
    let s = 1.0 / (d as f64).sqrt();
    CMatrix::from_fn(d, d, |j, k| C64::from_polar(s, 2.0 * PI * ((j * k) % d) as f64 / d as f64))
}

/// QFT circuit whose unitary is exactly [`dft_matrix`].
///
/// For each qubit `j` it applies `H` and then `CP(π/2^{k−j})` controlled by
/// every later qubit `k`. The trailing swap network undoes the bit reversal;
/// pass `swaps = false` to keep the reversed output order.
pub fn qft_circuit_opts(n: usize, swaps: bool) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::Invalid("QFT needs at least one qubit".into()));
    }
    let mut c = Circuit::new(n, 0);
    for j in 0..n {
        c.h(j);
        for k in j + 1..n {
            c.g("cp", &[PI / (1u64 << (k - j)) as f64], &[k, j]);
        }
    }
    if swaps {
        for j in 0..n / 2 {
            c.g("swap", &[], &[j, n - 1 - j]);
        }
    }
    Ok(c)
}

/// QFT with the swap network (unitary equals [`dft_matrix`]).
pub fn qft_circuit(n: usize) -> Result<Circuit> {
    qft_circuit_opts(n, true)
}

/// Inverse QFT.
pub fn inverse_qft_circuit(n: usize) -> Result<Circuit> {
    qft_circuit(n)?.inverse()
}

// ---------------------------------------------------------------------------
// Phase estimation

/// Result of phase estimation: `phase = int(bits) / 2^t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseEstimate {
    pub bits: String,
    pub phase: f64,
    pub t: usize,
}

impl PhaseEstimate {
    fn from_index(j: usize, t: usize) -> Self {
        PhaseEstimate { bits: index_to_bits(j, t), phase: j as f64 / (1u64 << t) as f64, t }
    }
}

/// Phase estimation circuit on `t + k` qubits (ancillas first).
///
/// Ancilla `i` controls `U^{2^{t−1−i}}`, so ancilla 0 carries the most
/// significant bit of the phase. An inverse QFT (with swaps) finishes the
/// circuit; the system register is left in whatever state the caller
/// prepares.
pub fn phase_estimation_circuit(u: &Gate, t: usize) -> Result<Circuit> {
    let powers: Vec<Gate> = (0..t).map(|i| u.pow(1u64 << (t - 1 - i))).collect();
    phase_estimation_with_powers(&powers, u.arity())
}

/// As [`phase_estimation_circuit`] but with caller-supplied `U^{2^{t−1−i}}`
/// gates (index `i` belongs to ancilla `i`), for when the powers have a
/// cheaper direct construction.
pub fn phase_estimation_with_powers(powers: &[Gate], k: usize) -> Result<Circuit> {
    let t = powers.len();
    if t == 0 {
        return Err(Error::Invalid("phase estimation needs at least one ancilla".into()));
    }
    let mut c = Circuit::new(t + k, t);
    for i in 0..t {
        c.h(i);
    }
    let sys: Vec<usize> = (t..t + k).collect();
    for (i, p) in powers.iter().enumerate() {
        if p.arity() != k {
            return Err(Error::Dimension { expected: k, got: p.arity() });
        }
        let mut q = vec![i];
        q.extend(&sys);
        c.push_gate(controlled(p), &q)?;
    }
    let iqft = inverse_qft_circuit(t)?;
    c.append_mapped(&iqft, &(0..t).collect::<Vec<_>>())?;
    Ok(c)
}

/// Exact distribution of the `t`-bit phase register.
pub fn phase_distribution(u: &Gate, eigenstate: &StateVector, t: usize) -> Result<Vec<f64>> {
    if eigenstate.n_qubits() != u.arity() {
        return Err(Error::Dimension { expected: u.arity(), got: eigenstate.n_qubits() });
    }
    let c = phase_estimation_circuit(u, t)?;
    let init = StateVector::zero(t).tensor(eigenstate);
    let s = c.run_statevector_from(&init)?;
    Ok(s.marginal(&(0..t).collect::<Vec<_>>()))
}

/// Runs phase estimation once and measures the ancillas.
pub fn phase_estimate<R: Rng + ?Sized>(u: &Gate, eigenstate: &StateVector, t: usize, rng: &mut R) -> Result<PhaseEstimate> {
    let dist = phase_distribution(u, eigenstate, t)?;
    Ok(PhaseEstimate::from_index(sample_index(&dist, rng), t))
}

// ---------------------------------------------------------------------------
// Hadamard test

/// Which component of `⟨ψ|U|ψ⟩` to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    Real,
    Imaginary,
}

/// Ancilla statistics of a Hadamard test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HadamardTest {
    /// Probability (or frequency) of reading the ancilla as 0.
    pub p0: f64,
    /// `2·p0 − 1`.
    pub estimate: f64,
}

/// Hadamard test circuit: ancilla (qubit 0) in `|+⟩`, or `(|0⟩ − i|1⟩)/√2`
/// for the imaginary part, then controlled-`U` on the system and a final `H`.
pub fn hadamard_test_circuit(u: &Gate, part: Part) -> Result<Circuit> {
    let k = u.arity();
    let mut c = Circuit::new(k + 1, 1);
    c.h(0);
    if part == Part::Imaginary {
        c.g("sdg", &[], &[0]);
    }
    let q: Vec<usize> = (0..=k).collect();
    c.push_gate(controlled(u), &q)?;
    c.h(0);
    c.measure(0, 0)?;
    Ok(c)
}

/// Estimates `Re⟨ψ|U|ψ⟩` or `Im⟨ψ|U|ψ⟩` as `2P₀ − 1`. With `shots = None`
/// `P₀` comes from the exact amplitudes.
pub fn hadamard_test<R: Rng + ?Sized>(
    u: &Gate,
    psi: &StateVector,
    part: Part,
    shots: Option<u64>,
    rng: &mut R,
) -> Result<HadamardTest> {
    if psi.n_qubits() != u.arity() {
        return Err(Error::Dimension { expected: u.arity(), got: psi.n_qubits() });
    }
    let c = hadamard_test_circuit(u, part)?;
    let init = StateVector::zero(1).tensor(psi);
    let s = c.run_statevector_from(&init)?;
    let exact = s.subset_probability(&[0], 0);
    let p0 = match shots {
        None => exact,
        Some(0) => return Err(Error::Invalid("shots must be positive".into())),
        Some(n) => (0..n).filter(|_| rng.random::<f64>() < exact).count() as f64 / n as f64,
    };
    Ok(HadamardTest { p0, estimate: 2.0 * p0 - 1.0 })
}

// ---------------------------------------------------------------------------
// Oracles and Grover search

/// Black-box Boolean function on `n` input bits.
///
/// The realized gate acts on `n + 1` qubits (inputs first, output last) as
/// `|x⟩|q⟩ ↦ |x⟩|q ⊕ f(x)⟩`.
#[derive(Debug, Clone)]
pub struct Oracle {
    n_inputs: usize,
    table: Vec<bool>,
}

impl Oracle {
    pub fn from_predicate(n_inputs: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        if n_inputs == 0 || n_inputs > 24 {
            return Err(Error::Invalid(format!("oracle width {n_inputs} outside 1..=24")));
        }
        Ok(Oracle { n_inputs, table: (0..1usize << n_inputs).map(f).collect() })
    }

    pub fn from_marked(n_inputs: usize, marked: &[usize]) -> Result<Self> {
        if let Some(&m) = marked.iter().find(|&&m| m >> n_inputs != 0) {
            return Err(Error::Invalid(format!("marked item {m} does not fit in {n_inputs} bits")));
        }
        Oracle::from_predicate(n_inputs, |x| marked.contains(&x))
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn is_marked(&self, x: usize) -> bool {
        self.table.get(x).copied().unwrap_or(false)
    }

    pub fn marked_count(&self) -> usize {
        self.table.iter().filter(|&&b| b).count()
    }

    /// `Σ_x |x⟩⟨x| ⊗ X^{f(x)}` as a permutation gate named `oracle`.
    pub fn realized_gate(&self) -> Gate {
        let perm: Vec<usize> = (0..2usize << self.n_inputs).map(|i| i ^ usize::from(self.table[i >> 1])).collect();
        permutation_gate(&perm, "oracle").expect("xor with a function is a permutation")
    }

    /// Sign flip of marked amplitudes: the oracle's action on `|x⟩|−⟩`
    /// restricted to the input register (phase kickback).
    pub fn apply_phase(&self, amps: &mut [C64]) {
        for (a, &m) in amps.iter_mut().zip(&self.table) {
            if m {
                *a = -*a;
            }
        }
    }
}

/// `2|s⟩⟨s| − I` on `n` qubits, `|s⟩` the uniform superposition.
pub fn diffusion_gate(n: usize) -> Gate {
    let d = 1usize << n;
    let m = CMatrix::from_fn(d, d, |i, j| c64(2.0 / d as f64 - if i == j { 1.0 } else { 0.0 }, 0.0));
    gate_from_matrix(&m, "diffusion").expect("reflection is unitary")
}

/// Grover's operator `G = (D ⊗ I)·O` on the `n + 1` oracle qubits.
pub fn grover_operator(o: &Oracle) -> Result<Gate> {
    let n = o.n_inputs;
    let d = diffusion_gate(n).kron(&crate::gates::named("id"));
    d.compose(&o.realized_gate()).map(|g| g.renamed("grover"))
}

/// Inversion about the mean, `a_i ↦ 2⟨a⟩ − a_i`.
fn invert_about_mean(amps: &mut [C64]) {
    let mean: C64 = amps.iter().sum::<C64>() / c64(amps.len() as f64, 0.0);
    for a in amps.iter_mut() {
        *a = mean * 2.0 - *a;
    }
}

/// Input-register state after `k` Grover iterations from `H^{⊗n}|0⟩`.
///
/// With the output qubit in `|−⟩` the oracle acts as a sign flip on the
/// input register, so the simulation tracks only the `2^n` input amplitudes.
pub fn grover_state(o: &Oracle, k: usize) -> StateVector {
    let d = 1usize << o.n_inputs;
    let mut amps = vec![c64(1.0 / (d as f64).sqrt(), 0.0); d];
    for _ in 0..k {
        o.apply_phase(&mut amps);
        invert_about_mean(&mut amps);
    }
    StateVector::normalized(amps).expect("unitary evolution keeps the norm")
}

/// Full `n + 1`-qubit Grover circuit with the realized oracle gate, `k`
/// iterations and measurement of the inputs.
pub fn grover_circuit(o: &Oracle, k: usize) -> Result<Circuit> {
    let n = o.n_inputs;
    let mut c = Circuit::new(n + 1, n);
    c.x(n).h(n);
    for q in 0..n {
        c.h(q);
    }
    let og = o.realized_gate();
    let dg = diffusion_gate(n);
    let all: Vec<usize> = (0..=n).collect();
    let inputs: Vec<usize> = (0..n).collect();
    for _ in 0..k {
        c.push_gate(og.clone(), &all)?;
        c.push_gate(dg.clone(), &inputs)?;
    }
    for q in 0..n {
        c.measure(q, q)?;
    }
    Ok(c)
}

/// Probability of measuring a marked item after `k` iterations.
pub fn grover_success_probability(o: &Oracle, k: usize) -> f64 {
    grover_state(o, k).probabilities().iter().enumerate().filter(|(x, _)| o.is_marked(*x)).map(|(_, p)| p).sum()
}

/// `round(π/(4θ) − 1/2)` with `sin θ = √(M/N)`, at least 1. This maximizes
/// `sin²((2k+1)θ)`.
pub fn grover_iterations(n_items: usize, n_marked: usize) -> usize {
    if n_marked == 0 || n_marked >= n_items {
        return 1;
    }
    let theta = (n_marked as f64 / n_items as f64).sqrt().asin();
    ((PI / (4.0 * theta) - 0.5).round() as usize).max(1)
}

/// The cruder count `⌈π√N/4⌉`, kept for comparison. For `N = 4` it gives 2,
/// which overshoots the optimum of 1.
pub fn grover_iterations_ceil(n_items: usize) -> usize {
    ((PI * (n_items as f64).sqrt() / 4.0).ceil() as usize).max(1)
}

// ---------------------------------------------------------------------------
// Amplitude amplification

/// Outcome of [`amplitude_amplify`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Amplified {
    pub outcome: usize,
    pub bits: String,
    pub marked: bool,
    /// Exact probability that a measurement returns a marked item.
    pub success_probability: f64,
}

/// Applies `G_U = U(2|0⟩⟨0| − I)U†·O` `iterations` times to `U|0…0⟩` and
/// measures.
pub fn amplitude_amplify<R: Rng + ?Sized>(prep: &Gate, o: &Oracle, iterations: usize, rng: &mut R) -> Result<Amplified> {
    let n = o.n_inputs;
    if prep.arity() != n {
        return Err(Error::Dimension { expected: n, got: prep.arity() });
    }
    let targets: Vec<usize> = (0..n).collect();
    let inv = prep.dagger();
    let mut s = StateVector::zero(n);
    apply_in_place(s.amps_mut(), n, prep, &targets)?;
    for _ in 0..iterations {
        o.apply_phase(s.amps_mut());
        apply_in_place(s.amps_mut(), n, &inv, &targets)?;
        for a in s.amps_mut().iter_mut().skip(1) {
            *a = -*a;
        }
        apply_in_place(s.amps_mut(), n, prep, &targets)?;
    }
    let probs = s.probabilities();
    let success_probability = probs.iter().enumerate().filter(|(x, _)| o.is_marked(*x)).map(|(_, p)| p).sum();
    let outcome = sample_index(&probs, rng);
    Ok(Amplified { outcome, bits: index_to_bits(outcome, n), marked: o.is_marked(outcome), success_probability })
}

// ---------------------------------------------------------------------------
// Search with an unknown number of solutions

/// Outcome of [`boyer_search`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    pub found: Option<usize>,
    /// Grover iterations (oracle calls inside the amplification) used.
    pub grover_iterations: u64,
    /// Measure-and-check rounds performed.
    pub rounds: u64,
}

/// Search for a marked item without knowing how many there are.
///
/// Starting from `m = 1`, each round runs `j` Grover iterations with `j`
/// uniform in `[0, m)`, measures and checks the result classically. After a
/// failure `m ← min(⌈6m/5⌉, ⌈√N⌉)`. The search gives up after three
/// consecutive failed rounds at the cap `m = ⌈√N⌉`.
pub fn boyer_search<R: Rng + ?Sized>(o: &Oracle, rng: &mut R) -> SearchOutcome {
    boyer_search_budgeted(o, None, rng)
}

/// As [`boyer_search`], but stops once `budget` Grover iterations have been
/// spent; the iteration count of the last round is truncated to fit.
pub fn boyer_search_budgeted<R: Rng + ?Sized>(o: &Oracle, budget: Option<u64>, rng: &mut R) -> SearchOutcome {
    let n_items = 1usize << o.n_inputs;
    let cap = (n_items as f64).sqrt().ceil();
    let mut m = 1.0_f64;
    let mut used = 0u64;
    let mut rounds = 0u64;
    let mut at_cap = 0;
    loop {
        let mut j = rng.random_range(0..m as u64);
        if let Some(b) = budget {
            if used >= b && rounds > 0 {
                return SearchOutcome { found: None, grover_iterations: used, rounds };
            }
            j = j.min(b.saturating_sub(used));
        }
        used += j;
        rounds += 1;
        let s = grover_state(o, j as usize);
        let x = sample_index(&s.probabilities(), rng);
        if o.is_marked(x) {
            return SearchOutcome { found: Some(x), grover_iterations: used, rounds };
        }
        if m >= cap {
            at_cap += 1;
            if at_cap >= 3 {
                return SearchOutcome { found: None, grover_iterations: used, rounds };
            }
        }
        m = (1.2 * m).ceil().min(cap);
    }
}
