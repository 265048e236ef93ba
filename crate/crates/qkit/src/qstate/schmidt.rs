use super::StateVector;
use crate::error::{Error, Result};
use crate::linalg::{fix_global_phase, CMatrix};
use crate::scalar::{c64, C64};

/// Bipartite form `Σ λ_i |ξ_i⟩|φ_i⟩` of a pure state.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    /// Non-negative coefficients in descending order.
    pub coefficients: Vec<f64>,
    /// Orthonormal states on the first `cut` qubits.
    pub left_basis: Vec<StateVector>,
    /// Orthonormal states on the remaining qubits.
    pub right_basis: Vec<StateVector>,
}

impl SchmidtForm {
    /// Rebuilds the full state from the decomposition.
    pub fn reconstruct(&self) -> StateVector {
        let dl = self.left_basis[0].dim();
        let dr = self.right_basis[0].dim();
        let mut amps = vec![c64(0.0, 0.0); dl * dr];
        for ((l, xi), phi) in self.coefficients.iter().zip(&self.left_basis).zip(&self.right_basis) {
            for x in 0..dl {
                for y in 0..dr {
                    amps[x * dr + y] += xi.amp(x) * phi.amp(y) * *l;
                }
            }
        }
        StateVector::from_raw((dl * dr).trailing_zeros() as usize, amps)
    }
}

/// Reshapes amplitudes into the `2^cut × 2^(n−cut)` coefficient matrix whose
/// rows index the left qubits.
pub(crate) fn coefficient_matrix(s: &StateVector, cut: usize) -> CMatrix {
    let dl = 1 << cut;
    let dr = s.dim() / dl;
    CMatrix::from_fn(dl, dr, |x, y| s.amp(x * dr + y))
}

/// Schmidt decomposition across the cut after the first `cut` qubits.
///
/// Computed as the SVD of the coefficient matrix. Each left vector has its
/// global phase fixed (first nonzero component real positive) and the
/// compensating phase is moved onto the right vector.
pub fn schmidt_decompose(s: &StateVector, cut: usize) -> Result<SchmidtForm> {
    let n = s.n_qubits();
    if cut == 0 || cut >= n {
        return Err(Error::Invalid(format!("cut must satisfy 0 < cut < {n}")));
    }
    let a = coefficient_matrix(s, cut);
    let svd = a.svd(true, true);
    let u = svd.u.expect("requested U");
    let vt = svd.v_t.expect("requested V†");
    let k = svd.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].partial_cmp(&svd.singular_values[i]).unwrap());
    let mut coefficients = Vec::with_capacity(k);
    let mut left_basis = Vec::with_capacity(k);
    let mut right_basis = Vec::with_capacity(k);
    for &i in &order {
        let mut xi: Vec<C64> = u.column(i).iter().copied().collect();
        let before = xi.iter().find(|z| z.norm() > 1e-12).copied().unwrap_or(c64(1.0, 0.0));
        fix_global_phase(&mut xi);
        // xi was multiplied by conj(before)/|before|; undo it on the right factor.
        let comp = before / before.norm();
        let phi: Vec<C64> = vt.row(i).iter().map(|z| *z * comp).collect();
        coefficients.push(svd.singular_values[i]);
        left_basis.push(StateVector::from_raw(cut, xi));
        right_basis.push(StateVector::from_raw(n - cut, phi));
    }
    Ok(SchmidtForm { coefficients, left_basis, right_basis })
}

#[cfg(test)]
mod tests {
    use super::*;
    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn bell_coefficients() {
        let bell = StateVector::new(vec![c64(H, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(H, 0.0)]).unwrap();
        let f = schmidt_decompose(&bell, 1).unwrap();
        assert!((f.coefficients[0] - H).abs() < 1e-12 && (f.coefficients[1] - H).abs() < 1e-12);
    }

    #[test]
    fn product_has_one_term() {
        let s = StateVector::new(vec![c64(0.6, 0.0), c64(0.0, 0.8)]).unwrap().tensor(&StateVector::from_bits("10").unwrap());
        for cut in 1..3 {
            let f = schmidt_decompose(&s, cut).unwrap();
            assert!((f.coefficients[0] - 1.0).abs() < 1e-12);
            assert!(f.coefficients[1..].iter().all(|&l| l.abs() < 1e-12));
        }
    }

    #[test]
    fn reconstructs_complex_state() {
        let amps: Vec<C64> = (0..16).map(|k| c64((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos())).collect();
        let s = StateVector::normalized(amps).unwrap();
        let f = schmidt_decompose(&s, 2).unwrap();
        let r = f.reconstruct();
        let err = s.amps().iter().zip(r.amps()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10);
        let total: f64 = f.coefficients.iter().map(|l| l * l).sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_cut() {
        assert!(schmidt_decompose(&StateVector::zero(2), 0).is_err());
        assert!(schmidt_decompose(&StateVector::zero(2), 2).is_err());
    }
}
