//! Split-operator evolution of a particle on a `2^n`-point grid.
//!
//! One step is `QFT · X₀ · K(φ) · X₀ · QFT⁻¹`-style kinetic propagation in
//! momentum space followed by a diagonal potential phase in position space.
//! The `X` on qubit 0 swaps the two halves of the momentum register so that
//! index `m` encodes the centered momentum `k = m − N/2`, and the kinetic
//! phase is `e^{−iφ k²}`. Since `k²` is an integer, `φ = 2π` acts as the
//! identity and `φ = π` translates the wave function by half the grid.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gates::diagonal_phase_gate;
use crate::qstate::StateVector;
use crate::transforms::{inverse_qft_circuit, qft_circuit};

/// Circuit for a single step. `potential[x]` is the phase `V(x)Δt`
/// accumulated at grid point `x`; it is applied as `e^{−i V(x)Δt}`.
pub fn schrodinger_step_circuit(n: usize, potential: &[f64], phi: f64) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::Invalid("the grid needs at least one qubit".into()));
    }
    let d = 1usize << n;
    if potential.len() != d {
        return Err(Error::Dimension { expected: d, got: potential.len() });
    }
    if !phi.is_finite() || potential.iter().any(|v| !v.is_finite()) {
        return Err(Error::Invalid("phases must be finite".into()));
    }
    let all: Vec<usize> = (0..n).collect();
    let mut c = Circuit::new(n, 0);
    c.append(&qft_circuit(n)?)?;
    c.x(0);
    let half = (d / 2) as f64;
    let kinetic: Vec<f64> = (0..d).map(|m| -phi * (m as f64 - half).powi(2)).collect();
    c.push_gate(diagonal_phase_gate(&kinetic, "kinetic")?, &all)?;
    c.x(0);
    c.append(&inverse_qft_circuit(n)?)?;
    if potential.iter().any(|&v| v != 0.0) {
        let pot: Vec<f64> = potential.iter().map(|v| -v).collect();
        c.push_gate(diagonal_phase_gate(&pot, "potential")?, &all)?;
    }
    Ok(c)
}

/// Applies `steps` split-operator steps to `initial`.
pub fn schrodinger_evolve(initial: &StateVector, potential: &[f64], phi: f64, steps: usize) -> Result<StateVector> {
    let c = schrodinger_step_circuit(initial.n_qubits(), potential, phi)?;
    let mut s = initial.clone();
    for _ in 0..steps {
        s = c.run_statevector_from(&s)?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c64;
    use std::f64::consts::PI;

    fn box_state() -> StateVector {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        StateVector::new(vec![c64(0.0, 0.0), c64(h, 0.0), c64(h, 0.0), c64(0.0, 0.0)]).unwrap()
    }

    #[test]
    fn free_particle_at_zero_phase_is_unchanged() {
        let p = schrodinger_evolve(&box_state(), &[0.0; 4], 0.0, 1).unwrap().probabilities();
        for (a, b) in p.iter().zip([0.0, 0.5, 0.5, 0.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn half_cycle_moves_weight_to_the_ends() {
        let p = schrodinger_evolve(&box_state(), &[0.0; 4], PI, 1).unwrap().probabilities();
        assert!(p[0] + p[3] > p[1] + p[2]);
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[3] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn full_cycle_and_norm() {
        let p = schrodinger_evolve(&box_state(), &[0.0; 4], 2.0 * PI, 1).unwrap().probabilities();
        assert!((p[1] - 0.5).abs() < 1e-9);
        let v = [0.1, 0.3, 0.2, 0.7];
        let s = schrodinger_evolve(&box_state(), &v, 0.4, 100).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        assert!(schrodinger_step_circuit(2, &[0.0; 3], 0.1).is_err());
    }
}
