use super::{qubit_value, StateVector};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::scalar::{c64, C64};

/// A mixed state: a trace-one Hermitian positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    elems: CMatrix,
}

impl DensityMatrix {
    /// Validates trace, Hermiticity (both within `1e-10`) and eigenvalues
    /// (all at least `−1e-9`).
    pub fn new(elems: CMatrix) -> Result<Self> {
        let d = elems.nrows();
        if !elems.is_square() || d == 0 || !d.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(d));
        }
        let herm = linalg::hermiticity_deviation(&elems);
        if herm > 1e-10 {
            return Err(Error::NotHermitian(herm));
        }
        let tr = linalg::trace(&elems);
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(Error::Invalid(format!("trace is {tr}, expected 1")));
        }
        let (vals, _) = linalg::eigh_desc(&elems);
        if let Some(&min) = vals.last() {
            if min < -1e-9 {
                return Err(Error::Invalid(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(DensityMatrix { n_qubits: d.trailing_zeros() as usize, elems })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn pure(s: &StateVector) -> Self {
        DensityMatrix { n_qubits: s.n_qubits(), elems: s.outer(s) }
    }

    /// The maximally mixed state `I/2^n`.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let d = 1 << n_qubits;
        DensityMatrix { n_qubits, elems: linalg::identity(d).scale(1.0 / d as f64) }
    }

    pub(crate) fn from_raw(elems: CMatrix) -> Self {
        DensityMatrix { n_qubits: elems.nrows().trailing_zeros() as usize, elems }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.elems.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.elems
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        (&self.elems * &self.elems).trace().re
    }

    /// `Tr(Oρ)`.
    pub fn expectation(&self, o: &CMatrix) -> f64 {
        (o * &self.elems).trace().re
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with_pure(&self, s: &StateVector) -> f64 {
        let v = s.to_column();
        (v.adjoint() * &self.elems * &v)[(0, 0)].re
    }

    /// Eigenvalues (descending) with phase-fixed eigenvectors as states.
    pub fn spectrum(&self) -> Vec<(f64, StateVector)> {
        let (vals, vecs) = linalg::eigh_desc(&self.elems);
        vals.into_iter()
            .enumerate()
            .map(|(k, l)| {
                let amps: Vec<C64> = vecs.column(k).iter().copied().collect();
                (l, StateVector::from_raw(self.n_qubits, amps))
            })
            .collect()
    }

    /// Tensor product `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Self {
        DensityMatrix { n_qubits: self.n_qubits + other.n_qubits, elems: linalg::kron(&self.elems, &other.elems) }
    }
}

/// `ρ = Σ p_i |ψ_i⟩⟨ψ_i|` from a probability-weighted ensemble.
pub fn density_from_ensemble(pairs: &[(f64, StateVector)]) -> Result<DensityMatrix> {
    let first = pairs.first().ok_or_else(|| Error::Invalid("empty ensemble".into()))?;
    let d = first.1.dim();
    let total: f64 = pairs.iter().map(|(p, _)| *p).sum();
    if pairs.iter().any(|(p, _)| *p < 0.0 || !p.is_finite()) || (total - 1.0).abs() > 1e-9 {
        return Err(Error::Invalid("ensemble probabilities must be non-negative and sum to 1".into()));
    }
    let mut rho = CMatrix::zeros(d, d);
    for (p, s) in pairs {
        if s.dim() != d {
            return Err(Error::Dimension { expected: d, got: s.dim() });
        }
        rho += s.outer(s).scale(*p);
    }
    // Remove rounding asymmetry so the Hermitian check is exact.
    let rho = (&rho + rho.adjoint()).scale(0.5);
    DensityMatrix::new(rho)
}

/// Reduced state on the qubits in `keep`, in the listed order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    super::validate_qubits(keep, n)?;
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let k = keep.len();
    let dk = 1usize << k;
    let split = |idx: usize| -> (usize, usize) {
        let kept = keep.iter().fold(0, |acc, &q| (acc << 1) | qubit_value(idx, n, q));
        let rest = traced.iter().fold(0, |acc, &q| (acc << 1) | qubit_value(idx, n, q));
        (kept, rest)
    };
    let parts: Vec<(usize, usize)> = (0..rho.dim()).map(split).collect();
    let mut out = CMatrix::zeros(dk, dk);
    let m = rho.matrix();
    for i in 0..rho.dim() {
        let (ki, ri) = parts[i];
        for j in 0..rho.dim() {
            let (kj, rj) = parts[j];
            if ri == rj {
                out[(ki, kj)] += m[(i, j)];
            }
        }
    }
    Ok(DensityMatrix::from_raw(out))
}

/// Purification `Σ √p_i |ψ_i⟩|i⟩` of an `n`-qubit density matrix, giving a
/// `2n`-qubit pure state whose partial trace over the second half is `ρ`.
pub fn purify(rho: &DensityMatrix) -> StateVector {
    let n = rho.n_qubits();
    let d = rho.dim();
    let (vals, vecs) = linalg::eigh_desc(rho.matrix());
    let mut amps = vec![c64(0.0, 0.0); d * d];
    for (i, &p) in vals.iter().enumerate() {
        let w = p.max(0.0).sqrt();
        for x in 0..d {
            amps[x * d + i] += vecs[(x, i)] * w;
        }
    }
    StateVector::normalized(amps).inspect(|s| {
        debug_assert_eq!(s.n_qubits(), 2 * n);
    })
    .expect("a density matrix has positive trace")
}
