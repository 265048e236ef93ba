use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::qstate::{bits_to_index, index_to_bits, sample_index};
use crate::transforms::Oracle;
use rand::Rng;
use serde::Serialize;

/// Oracle for `f_s(x) = s·x mod 2`.
pub fn bv_oracle(s: &str) -> Result<Oracle> {
    if s.is_empty() {
        return Err(Error::Invalid("hidden string must be non-empty".into()));
    }
    let sv = bits_to_index(s)?;
    Oracle::from_predicate(s.len(), |x| (x & sv).count_ones() % 2 == 1)
}

/// Bernstein–Vazirani circuit: ancilla (last qubit) in `|−⟩`, Hadamards on
/// the inputs, a single oracle call, Hadamards again and measurement of the
/// inputs.
pub fn bv_circuit(o: &Oracle) -> Result<Circuit> {
    let n = o.n_inputs();
    let mut c = Circuit::new(n + 1, n);
    c.x(n).h(n);
    for q in 0..n {
        c.h(q);
    }
    c.push_gate(o.realized_gate(), &(0..=n).collect::<Vec<_>>())?;
    for q in 0..n {
        c.h(q);
    }
    for q in 0..n {
        c.measure(q, q)?;
    }
    Ok(c)
}

/// Result of one Bernstein–Vazirani run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BvRun {
    pub bits: String,
    /// Exact probability of the returned string.
    pub probability: f64,
    pub oracle_calls: usize,
}

/// Recovers the hidden string with one oracle query.
pub fn bv_hidden_string<R: Rng + ?Sized>(o: &Oracle, rng: &mut R) -> Result<BvRun> {
    let n = o.n_inputs();
    let c = bv_circuit(o)?;
    let oracle_calls = c
        .ops()
        .iter()
        .filter(|op| matches!(op, crate::circuit::Op::Gate(a) if a.gate.name() == "oracle"))
        .count();
    let s = c.run_statevector()?;
    let dist = s.marginal(&(0..n).collect::<Vec<_>>());
    let x = sample_index(&dist, rng);
    Ok(BvRun { bits: index_to_bits(x, n), probability: dist[x], oracle_calls })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for s in ["01", "00", "111", "1011"] {
            let r = bv_hidden_string(&bv_oracle(s).unwrap(), &mut rng).unwrap();
            assert_eq!(r.bits, s);
            assert!((r.probability - 1.0).abs() < 1e-12);
            assert_eq!(r.oracle_calls, 1);
        }
        assert!(bv_oracle("").is_err());
        assert!(bv_oracle("12").is_err());
    }
}
