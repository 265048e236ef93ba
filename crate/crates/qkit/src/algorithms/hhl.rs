//! Two-by-two HHL linear solver with eigenvalues `{1, 2}`.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gates::{controlled, exp_hermitian_gate};
use crate::linalg::{self, CMatrix};
use crate::qstate::sample_index;
use crate::scalar::{c64, C64};
use crate::stateprep::prep_single;
use crate::transforms::{inverse_qft_circuit, qft_circuit};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Pauli observable measured on the solution qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    fn matrix(self) -> CMatrix {
        linalg::pauli(match self {
            PauliAxis::X => 'X',
            PauliAxis::Y => 'Y',
            PauliAxis::Z => 'Z',
        })
    }
}

/// `A x = b` with `A` a real symmetric 2×2 matrix whose eigenvalues are 1
/// and 2.
#[derive(Debug, Clone, PartialEq)]
pub struct HhlProblem {
    a: CMatrix,
    b: [C64; 2],
}

impl HhlProblem {
    pub fn new(a: [[f64; 2]; 2], b: [C64; 2]) -> Result<Self> {
        let m = linalg::from_real(2, 2, &[a[0][0], a[0][1], a[1][0], a[1][1]]);
        let dev = linalg::hermiticity_deviation(&m);
        if dev > 1e-12 {
            return Err(Error::NotHermitian(dev));
        }
        let (vals, _) = linalg::eigh_desc(&m);
        if (vals[0] - 2.0).abs() > 1e-9 || (vals[1] - 1.0).abs() > 1e-9 {
            return Err(Error::Invalid(format!("eigenvalues {vals:?} are not {{1, 2}}")));
        }
        let norm = (b[0].norm_sqr() + b[1].norm_sqr()).sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(HhlProblem { a: m, b })
    }

    /// `A = [[1.5, 0.5], [0.5, 1.5]]` with the given right-hand side.
    pub fn standard(b: [C64; 2]) -> Result<Self> {
        HhlProblem::new([[1.5, 0.5], [0.5, 1.5]], b)
    }
}

/// `⟨x|O|x⟩` for `|x⟩ ∝ A⁻¹|b⟩`, computed directly.
pub fn hhl_classical(p: &HhlProblem, obs: PauliAxis) -> f64 {
    let inv = p.a.clone().try_inverse().expect("eigenvalues are nonzero");
    let x = inv * CMatrix::from_column_slice(2, 1, &p.b);
    let n = x.norm_squared();
    ((x.adjoint() * obs.matrix() * &x)[(0, 0)].re) / n
}

/// HHL circuit on four qubits: ancilla (0), clock `c₀ c₁` (1, 2, `c₀` most
/// significant) and the solution qubit (3).
///
/// With `U = e^{iAπ/2}` an eigenvalue `λ` has phase `λ/4`, so phase
/// estimation writes `λ = 1` as `|01⟩` and `λ = 2` as `|10⟩`. The ancilla is
/// rotated by `R_y(2·arcsin(C/λ))` with `C = 1`: `R_y(π)` controlled on
/// `c₁` and `R_y(π/3)` controlled on `c₀`. The clock is then uncomputed.
pub fn hhl_circuit(p: &HhlProblem) -> Result<Circuit> {
    let mut c = Circuit::new(4, 0);
    let prep = prep_single(p.b[0], p.b[1])?;
    c.append_mapped(&prep.circuit, &[3])?;
    // exp_hermitian_gate(h, t) = e^{−iht}; e^{iAπ/2} is h = −A.
    let u = exp_hermitian_gate(&(-&p.a), PI / 2.0)?;
    let cu2 = controlled(&u.pow(2));
    let cu1 = controlled(&u);
    c.h(1).h(2);
    c.push_gate(cu2.clone(), &[1, 3])?;
    c.push_gate(cu1.clone(), &[2, 3])?;
    c.append_mapped(&inverse_qft_circuit(2)?, &[1, 2])?;
    c.g("cry", &[PI], &[2, 0]);
    c.g("cry", &[PI / 3.0], &[1, 0]);
    c.append_mapped(&qft_circuit(2)?, &[1, 2])?;
    c.push_gate(cu1.dagger(), &[2, 3])?;
    c.push_gate(cu2.dagger(), &[1, 3])?;
    c.h(1).h(2);
    Ok(c)
}

/// Result of [`hhl_solve`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HhlResult {
    pub expectation: f64,
    /// Probability that the ancilla reads 1.
    pub postselect_probability: f64,
    /// Post-selected shots used (0 in exact mode).
    pub accepted_shots: u64,
    /// Raw shots drawn (0 in exact mode).
    pub raw_shots: u64,
}

/// Runs HHL and returns `⟨x|O|x⟩` on the post-selected solution qubit.
///
/// Exact mode (`shots = None`) projects the ancilla onto `|1⟩`. Sampled mode
/// rotates the solution qubit into the eigenbasis of `O` and draws shots
/// until `shots` of them pass post-selection, so the estimate always rests
/// on the requested sample size.
pub fn hhl_solve<R: Rng + ?Sized>(p: &HhlProblem, obs: PauliAxis, shots: Option<u64>, rng: &mut R) -> Result<HhlResult> {
    let c = hhl_circuit(p)?;
    let s = c.run_statevector()?;
    let p1 = s.subset_probability(&[0], 1);
    if p1 < 1e-12 {
        return Err(Error::Execution("post-selection probability is zero".into()));
    }
    match shots {
        None => {
            let (_, post) = s.project(&[0], 1)?;
            let m = linalg::kron(&linalg::identity(8), &obs.matrix());
            let psi = post.to_column();
            let e = (psi.adjoint() * m * &psi)[(0, 0)].re;
            Ok(HhlResult { expectation: e, postselect_probability: p1, accepted_shots: 0, raw_shots: 0 })
        }
        Some(0) => Err(Error::Invalid("shots must be positive".into())),
        Some(n) => {
            let mut rc = c.clone();
            match obs {
                PauliAxis::X => {
                    rc.h(3);
                }
                PauliAxis::Y => {
                    rc.g("sdg", &[], &[3]).h(3);
                }
                PauliAxis::Z => {}
            }
            let probs = rc.run_statevector()?.marginal(&[0, 3]);
            let (mut accepted, mut raw, mut plus) = (0u64, 0u64, 0u64);
            let limit = n.saturating_mul(10_000);
            while accepted < n {
                raw += 1;
                if raw > limit {
                    return Err(Error::Execution("post-selection yielded too few shots".into()));
                }
                let o = sample_index(&probs, rng);
                if o >> 1 == 1 {
                    accepted += 1;
                    if o & 1 == 0 {
                        plus += 1;
                    }
                }
            }
            let e = (2.0 * plus as f64 - n as f64) / n as f64;
            Ok(HhlResult { expectation: e, postselect_probability: p1, accepted_shots: n, raw_shots: raw })
        }
    }
}

/// `|0⟩`, `|1⟩`, `|+⟩` or `|−⟩` as a right-hand side.
pub fn named_rhs(name: &str) -> Result<[C64; 2]> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Ok(match name {
        "0" => [c64(1.0, 0.0), c64(0.0, 0.0)],
        "1" => [c64(0.0, 0.0), c64(1.0, 0.0)],
        "+" | "plus" => [c64(h, 0.0), c64(h, 0.0)],
        "-" | "minus" => [c64(h, 0.0), c64(-h, 0.0)],
        _ => return Err(Error::Invalid(format!("unknown right-hand side '{name}'"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_mode_matches_classical() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let table = [("0", [-0.6, 0.0, 0.8]), ("+", [1.0, 0.0, 0.0]), ("-", [-1.0, 0.0, 0.0])];
        for (b, expect) in table {
            let p = HhlProblem::standard(named_rhs(b).unwrap()).unwrap();
            for (axis, e) in [PauliAxis::X, PauliAxis::Y, PauliAxis::Z].into_iter().zip(expect) {
                let r = hhl_solve(&p, axis, None, &mut rng).unwrap();
                assert!((r.expectation - e).abs() < 1e-9, "{b} {axis:?}: {}", r.expectation);
                assert!((hhl_classical(&p, axis) - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn clock_is_uncomputed() {
        let p = HhlProblem::standard(named_rhs("0").unwrap()).unwrap();
        let s = hhl_circuit(&p).unwrap().run_statevector().unwrap();
        let (_, post) = s.project(&[0], 1).unwrap();
        assert!(post.subset_probability(&[1, 2], 0) > 1.0 - 1e-12);
    }

    #[test]
    fn sampled_mode_close() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = HhlProblem::standard(named_rhs("0").unwrap()).unwrap();
        let r = hhl_solve(&p, PauliAxis::Z, Some(4096), &mut rng).unwrap();
        assert_eq!(r.accepted_shots, 4096);
        assert!((r.expectation - 0.8).abs() < 0.05);
    }

    #[test]
    fn validation() {
        assert!(HhlProblem::new([[1.0, 0.0], [0.0, 3.0]], named_rhs("0").unwrap()).is_err());
        assert!(HhlProblem::new([[1.5, 0.5], [0.4, 1.5]], named_rhs("0").unwrap()).is_err());
        assert!(HhlProblem::standard([c64(1.0, 0.0), c64(1.0, 0.0)]).is_err());
    }
}
