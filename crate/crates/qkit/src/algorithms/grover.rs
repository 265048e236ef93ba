use crate::error::{Error, Result};
use crate::qstate::{index_to_bits, sample_index};
use crate::transforms::{grover_iterations, grover_state, Oracle};
use rand::Rng;
use serde::Serialize;

/// One Grover search.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroverRun {
    pub outcome: String,
    pub iterations: usize,
    /// Probability of the returned string in the final state.
    pub probability: f64,
    /// Measure-and-check attempts needed.
    pub attempts: usize,
}

/// Grover search for a single marked string.
///
/// Runs the optimal number of iterations for one marked item out of `2^n`,
/// measures and checks the answer with one classical query. Up to three
/// attempts are made; if none returns a marked item the predicate is
/// reported as marking nothing.
pub fn grover_search<R: Rng + ?Sized>(o: &Oracle, rng: &mut R) -> Result<GroverRun> {
    let n = o.n_inputs();
    let k = grover_iterations(1 << n, 1);
    let s = grover_state(o, k);
    let probs = s.probabilities();
    for attempt in 1..=3 {
        let x = sample_index(&probs, rng);
        if o.is_marked(x) {
            return Ok(GroverRun { outcome: index_to_bits(x, n), iterations: k, probability: probs[x], attempts: attempt });
        }
    }
    Err(Error::Execution("no marked item found in three attempts".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::exact_distribution;
    use crate::transforms::grover_circuit;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn toffoli_oracle_two_qubits() {
        let o = Oracle::from_marked(2, &[3]).unwrap();
        let c = grover_circuit(&o, 1).unwrap();
        let d = exact_distribution(&c.run_statevector().unwrap(), &[0, 1]);
        assert!((d["11"] - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            assert_eq!(grover_search(&o, &mut rng).unwrap().outcome, "11");
        }
    }

    #[test]
    fn small_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let o = Oracle::from_marked(1, &[1]).unwrap();
        let r = grover_search(&o, &mut rng).unwrap();
        assert_eq!((r.outcome.as_str(), r.iterations), ("1", 1));
        let o = Oracle::from_marked(3, &[5]).unwrap();
        let r = grover_search(&o, &mut rng).unwrap();
        assert_eq!(r.iterations, 2);
        assert_eq!(r.outcome, "101");
        assert!((r.probability - 0.9453125).abs() < 1e-12);
        assert!(grover_search(&Oracle::from_marked(3, &[]).unwrap(), &mut rng).is_err());
    }
}
