//! Three-qubit repetition encoding checked by majority vote on readout.
//!
//! Two experiments are compared. The unencoded one rotates a single qubit
//! into `|+⟩`, idles it through a chain of `T` gates that multiplies to the
//! identity and rotates it back. The encoded one does the same with the
//! GHZ state `(|000⟩ − |111⟩)/√2`. Independent bit flips are suppressed by
//! the vote; a rotation error common to the whole logical qubit flips all
//! three bits at once and is not.

use crate::circuit::{noisy_final_state, Circuit, Generators, NoiseModel};
use crate::error::{Error, Result};
use crate::qstate::{index_to_bits, sample_index, StateVector};
use crate::scalar::C64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Noise applied in the error-correction experiments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct QecNoise {
    /// Gate-level noise on every gate of the circuits.
    pub gate: NoiseModel,
    /// Independent flip probability of each qubit at readout.
    pub readout_flip_p: f64,
    /// Standard deviation of the common angle `δ` in `e^{−iδ X_L}`, where
    /// `X_L` is `X` on the bare qubit and `XXX` on the encoded one.
    pub correlated_sigma: f64,
}

impl QecNoise {
    pub fn bitflip(p: f64) -> Self {
        QecNoise { readout_flip_p: p, ..Default::default() }
    }

    pub fn rotation(sigma: f64) -> Self {
        QecNoise { correlated_sigma: sigma, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        self.gate.validate()?;
        if !(0.0..=1.0).contains(&self.readout_flip_p) {
            return Err(Error::Invalid(format!("flip probability {} outside [0, 1]", self.readout_flip_p)));
        }
        if !(self.correlated_sigma >= 0.0 && self.correlated_sigma.is_finite()) {
            return Err(Error::Invalid(format!("rotation sigma {} must be finite and non-negative", self.correlated_sigma)));
        }
        Ok(())
    }
}

/// Outcome of [`run_ghz_test`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QecReport {
    /// Wrong-answer rate of the single-qubit experiment.
    pub p_unencoded: f64,
    /// Rate of readouts the vote decodes as `1`.
    pub p_encoded: f64,
    /// Frequency of each 3-bit readout.
    pub outcome_breakdown: BTreeMap<String, f64>,
    pub shots: u64,
}

/// Majority value of a 3-bit readout.
pub fn majority_decode(bits: &str) -> Result<u8> {
    if bits.len() != 3 || !bits.chars().all(|c| c == '0' || c == '1') {
        return Err(Error::Invalid(format!("'{bits}' is not a 3-bit string")));
    }
    Ok(u8::from(bits.chars().filter(|&c| c == '1').count() >= 2))
}

fn check_idle(idle_gates: usize) -> Result<()> {
    if !idle_gates.is_multiple_of(8) {
        return Err(Error::Invalid(format!("{idle_gates} T gates do not multiply to the identity")));
    }
    Ok(())
}

/// `H`, `idle_gates` T gates, `H` on one qubit (no measurement).
pub fn single_qubit_test_circuit(idle_gates: usize) -> Result<Circuit> {
    check_idle(idle_gates)?;
    let mut c = Circuit::new(1, 0);
    c.h(0);
    for _ in 0..idle_gates {
        c.g("t", &[], &[0]);
    }
    c.h(0);
    Ok(c)
}

/// Prepares `(|000⟩ − |111⟩)/√2`, spreads the T gates round-robin over the
/// three qubits and undoes the preparation (no measurement). Only the total
/// T count matters because the state lives on `|000⟩` and `|111⟩`.
pub fn ghz_test_circuit(idle_gates: usize) -> Result<Circuit> {
    check_idle(idle_gates)?;
    let mut c = Circuit::new(3, 0);
    c.x(0).h(0).cx(0, 1).cx(0, 2);
    for k in 0..idle_gates {
        c.g("t", &[], &[k % 3]);
    }
    c.cx(0, 2).cx(0, 1).h(0).x(0);
    Ok(c)
}

/// Shot loop shared by both experiments; returns readout counts.
fn run_shots<R: Rng + ?Sized>(c: &Circuit, noise: &QecNoise, shots: u64, rng: &mut R) -> Result<Vec<u64>> {
    noise.validate()?;
    if shots == 0 {
        return Err(Error::Invalid("shots must be positive".into()));
    }
    let n = c.n_qubits();
    let d = 1usize << n;
    let all = d - 1;
    let clean = noise.gate.is_noiseless();
    let base = if clean { Some(c.run_statevector()?) } else { None };
    let gens = Generators::for_circuit(c);
    let normal = if noise.correlated_sigma > 0.0 {
        Some(Normal::new(0.0, noise.correlated_sigma).map_err(|e| Error::Invalid(e.to_string()))?)
    } else {
        None
    };
    let base_probs = base.as_ref().map(StateVector::probabilities);
    let mut counts = vec![0u64; d];
    for _ in 0..shots {
        let state;
        let s = match &base {
            Some(s) => s,
            None => {
                state = noisy_final_state(c, &noise.gate, &gens, rng)?;
                &state
            }
        };
        let mut z = match (&normal, &base_probs) {
            (None, Some(p)) => sample_index(p, rng),
            (None, None) => sample_index(&s.probabilities(), rng),
            (Some(dist), _) => {
                let delta: f64 = dist.sample(rng);
                let (cs, sn) = (delta.cos(), delta.sin());
                let a = s.amps();
                let p: Vec<f64> = (0..d).map(|i| (a[i] * cs - C64::new(0.0, sn) * a[i ^ all]).norm_sqr()).collect();
                sample_index(&p, rng)
            }
        };
        if noise.readout_flip_p > 0.0 {
            for q in 0..n {
                if rng.random::<f64>() < noise.readout_flip_p {
                    z ^= 1 << (n - 1 - q);
                }
            }
        }
        counts[z] += 1;
    }
    Ok(counts)
}

/// Fraction of single-qubit runs that read `1` instead of `0`.
pub fn run_single_qubit_test<R: Rng + ?Sized>(idle_gates: usize, noise: &QecNoise, shots: u64, rng: &mut R) -> Result<f64> {
    let counts = run_shots(&single_qubit_test_circuit(idle_gates)?, noise, shots, rng)?;
    Ok(counts[1] as f64 / shots as f64)
}

/// Runs the single-qubit and the encoded experiment with the same noise and
/// shot count. `p_encoded = P₁₁₀ + P₁₀₁ + P₀₁₁ + P₁₁₁`.
pub fn run_ghz_test<R: Rng + ?Sized>(idle_gates: usize, noise: &QecNoise, shots: u64, rng: &mut R) -> Result<QecReport> {
    let p_unencoded = run_single_qubit_test(idle_gates, noise, shots, rng)?;
    let counts = run_shots(&ghz_test_circuit(idle_gates)?, noise, shots, rng)?;
    let mut outcome_breakdown = BTreeMap::new();
    let mut wrong = 0u64;
    for (z, &k) in counts.iter().enumerate() {
        let bits = index_to_bits(z, 3);
        if majority_decode(&bits)? == 1 {
            wrong += k;
        }
        outcome_breakdown.insert(bits, k as f64 / shots as f64);
    }
    Ok(QecReport { p_unencoded, p_encoded: wrong as f64 / shots as f64, outcome_breakdown, shots })
}
