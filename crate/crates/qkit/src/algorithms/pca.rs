//! Principal components of two features from the purity of the normalized
//! covariance matrix.
//!
//! For a 2×2 density matrix `ρ = Σ/Tr Σ` the eigenvalues follow from the
//! purity alone: `λ± = (1 ± √(2P − 1))/2` with `P = Tr ρ²`. The purity is
//! measured with a swap test on two copies of a purification of `ρ`.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::qstate::{purify, DensityMatrix};
use crate::scalar::c64;
use crate::stateprep::prep_two_qubit;
use rand::Rng;
use serde::Serialize;

/// Outcome of [`qpca_two_feature`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcaResult {
    /// Sample covariance (normalized by `N − 1`).
    pub covariance: [[f64; 2]; 2],
    /// Estimated `Tr ρ²`.
    pub purity: f64,
    /// Eigenvalues of the covariance, largest first.
    pub eigenvalues: [f64; 2],
}

/// Sample covariance of two equally long feature lists.
pub fn covariance(x1: &[f64], x2: &[f64]) -> Result<[[f64; 2]; 2]> {
    if x1.len() != x2.len() {
        return Err(Error::Dimension { expected: x1.len(), got: x2.len() });
    }
    if x1.len() < 2 {
        return Err(Error::Invalid("need at least two samples".into()));
    }
    if x1.iter().chain(x2).any(|v| !v.is_finite()) {
        return Err(Error::Invalid("features must be finite".into()));
    }
    let n = x1.len() as f64;
    let m1 = x1.iter().sum::<f64>() / n;
    let m2 = x2.iter().sum::<f64>() / n;
    let cov = |a: &[f64], ma: f64, b: &[f64], mb: f64| a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).sum::<f64>() / (n - 1.0);
    let c12 = cov(x1, m1, x2, m2);
    Ok([[cov(x1, m1, x1, m1), c12], [c12, cov(x2, m2, x2, m2)]])
}

/// Swap-test circuit: ancilla 0, copy A on (1, 2), copy B on (3, 4), each
/// copy a purification of `ρ` with the system qubit first. `P(0) = (1 + Tr ρ²)/2`.
pub fn purity_circuit(rho: &DensityMatrix) -> Result<Circuit> {
    if rho.n_qubits() != 1 {
        return Err(Error::Dimension { expected: 2, got: rho.dim() });
    }
    let prep = prep_two_qubit(purify(rho).amps())?.circuit;
    let mut c = Circuit::new(5, 1);
    c.h(0);
    c.append_mapped(&prep, &[1, 2])?;
    c.append_mapped(&prep, &[3, 4])?;
    c.add("cswap", &[], &[0, 1, 3])?;
    c.h(0);
    c.measure(0, 0)?;
    Ok(c)
}

/// Runs the purity-based PCA. With `shots = None` the ancilla statistics
/// come from the exact statevector.
pub fn qpca_two_feature<R: Rng + ?Sized>(x1: &[f64], x2: &[f64], shots: Option<u64>, rng: &mut R) -> Result<PcaResult> {
    let cov = covariance(x1, x2)?;
    let tr = cov[0][0] + cov[1][1];
    if tr <= 0.0 {
        return Err(Error::Invalid("covariance has zero trace".into()));
    }
    let rho = DensityMatrix::new(crate::linalg::from_rows(&[
        vec![c64(cov[0][0] / tr, 0.0), c64(cov[0][1] / tr, 0.0)],
        vec![c64(cov[1][0] / tr, 0.0), c64(cov[1][1] / tr, 0.0)],
    ]))?;
    let c = purity_circuit(&rho)?;
    let p0 = match shots {
        None => c.run_statevector()?.subset_probability(&[0], 0),
        Some(0) => return Err(Error::Invalid("shots must be positive".into())),
        Some(s) => c.sample(s, None, rng)?.frequency("0"),
    };
    let purity = 2.0 * p0 - 1.0;
    let root = (2.0 * purity - 1.0).max(0.0).sqrt();
    Ok(PcaResult { covariance: cov, purity, eigenvalues: [tr * (1.0 + root) / 2.0, tr * (1.0 - root) / 2.0] })
}
