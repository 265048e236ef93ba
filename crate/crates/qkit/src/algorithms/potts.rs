//! Potts partition function by enumeration, plus the two-qubit Fourier
//! step used on the cocyclic code of the triangle example.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::scalar::c64;
use crate::qstate::StateVector;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

/// `H(σ) = −Σ_{(i,j)} J_ij δ(σ_i, σ_j)` on `n_vertices` sites with `q`
/// states each, at inverse temperature `beta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PottsModel {
    pub n_vertices: usize,
    pub edges: Vec<(usize, usize, f64)>,
    pub q: usize,
    pub beta: f64,
}

impl PottsModel {
    pub fn new(n_vertices: usize, edges: Vec<(usize, usize, f64)>, q: usize, beta: f64) -> Result<Self> {
        if q < 2 {
            return Err(Error::Invalid("q must be at least 2".into()));
        }
        if !beta.is_finite() {
            return Err(Error::Invalid("beta must be finite".into()));
        }
        for &(a, b, j) in &edges {
            if a >= n_vertices || b >= n_vertices {
                return Err(Error::Invalid(format!("edge ({a}, {b}) leaves the graph")));
            }
            if !j.is_finite() {
                return Err(Error::Invalid("weights must be finite".into()));
            }
        }
        Ok(PottsModel { n_vertices, edges, q, beta })
    }

    /// Unit-weight triangle.
    pub fn triangle(q: usize, beta: f64) -> Result<Self> {
        PottsModel::new(3, vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)], q, beta)
    }

    pub fn energy(&self, sigma: &[usize]) -> f64 {
        -self.edges.iter().filter(|&&(a, b, _)| sigma[a] == sigma[b]).map(|e| e.2).sum::<f64>()
    }
}

/// `Z = Σ_σ e^{−βH(σ)}` over all `q^n` configurations (at most 10⁶).
pub fn potts_partition(m: &PottsModel) -> Result<f64> {
    let total = (m.q as f64).powi(m.n_vertices as i32);
    if total > 1e6 {
        return Err(Error::TooLarge(format!("{total} configurations")));
    }
    let mut sigma = vec![0usize; m.n_vertices];
    let mut z = 0.0;
    loop {
        z += (-m.beta * m.energy(&sigma)).exp();
        // Odometer over configurations.
        let mut k = 0;
        loop {
            if k == sigma.len() {
                return Ok(z);
            }
            sigma[k] += 1;
            if sigma[k] < m.q {
                break;
            }
            sigma[k] = 0;
            k += 1;
        }
    }
}

/// Two-qubit Fourier step on `|+⟩ ⊗ |−⟩`, without the final swap: `H` on
/// qubit 1, controlled phase `π/2`, `H` on qubit 0.
pub fn potts_qft2_circuit() -> Circuit {
    let mut c = Circuit::new(2, 2);
    c.h(0);
    c.x(1);
    c.h(1);
    c.barrier(&[0, 1]);
    c.h(1);
    c.g("cp", &[FRAC_PI_2], &[0, 1]);
    c.h(0);
    c.measure_all().expect("two clbits");
    c
}

/// Distribution of `γ ∈ {0, 1, 2, 3}` after [`potts_qft2_circuit`].
///
/// The Fourier output comes out bit reversed, so `γ` takes qubit 0 as its
/// most significant bit when read in register order. With `shots = None`
/// the probabilities are exact.
pub fn potts_qft2_fragment<R: Rng + ?Sized>(shots: Option<u64>, rng: &mut R) -> Result<[f64; 4]> {
    let c = potts_qft2_circuit();
    let s = c.run_statevector_from(&StateVector::new(vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)])?)?;
    let exact = s.probabilities();
    let mut out = [0.0; 4];
    match shots {
        None => out.copy_from_slice(&exact),
        Some(0) => return Err(Error::Invalid("shots must be positive".into())),
        Some(n) => {
            let h = c.sample(n, None, rng)?;
            for (g, o) in out.iter_mut().enumerate() {
                *o = h.frequency(&crate::qstate::index_to_bits(g, 2));
            }
        }
    }
    Ok(out)
}
