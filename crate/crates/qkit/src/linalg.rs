//! Dense complex linear algebra helpers in double precision.

use crate::scalar::{c64, C64};
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// Dense complex matrix.
pub type CMatrix = DMatrix<C64>;

/// Identity matrix of dimension `d`.
pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Builds a matrix from row-major nested slices.
pub fn from_rows(rows: &[Vec<C64>]) -> CMatrix {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(n, m, |i, j| rows[i][j])
}

/// Builds a real-valued complex matrix from row-major data.
pub fn from_real(n: usize, m: usize, data: &[f64]) -> CMatrix {
    CMatrix::from_fn(n, m, |i, j| c64(data[i * m + j], 0.0))
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Largest absolute entry of `m·m† − I`.
pub fn unitarity_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let p = m * m.adjoint();
    max_abs_diff(&p, &identity(m.nrows()))
}

/// Largest absolute entry of `m − m†`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(m, &m.adjoint())
}

/// Largest entrywise modulus of `a − b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Phase-insensitive distance `1 − |Tr(A†B)| / d` between two unitaries.
pub fn phase_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape(), "shape mismatch");
    let d = a.nrows() as f64;
    let tr: C64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
    (1.0 - tr.norm() / d).max(0.0)
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order.
///
/// Column `k` of the returned matrix is the eigenvector of the `k`-th value,
/// normalized so its first non-negligible component is real and positive.
pub fn eigh_desc(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let herm = (m + m.adjoint()).scale(0.5);
    let eig = herm.symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap_or(std::cmp::Ordering::Equal));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col: Vec<C64> = eig.eigenvectors.column(src).iter().copied().collect();
        fix_global_phase(&mut col);
        for (r, z) in col.into_iter().enumerate() {
            vecs[(r, dst)] = z;
        }
    }
    (vals, vecs)
}

/// Rotates a vector's global phase so that its first component with modulus
/// above `1e-12` is real and positive.
pub fn fix_global_phase(v: &mut [C64]) {
    if let Some(z) = v.iter().find(|z| z.norm() > 1e-12).copied() {
        let ph = z.conj() / z.norm();
        for x in v.iter_mut() {
            *x *= ph;
        }
    }
}

/// `e^{−i·h·t}` for Hermitian `h`, computed by eigendecomposition.
pub fn expm_herm(h: &CMatrix, t: f64) -> CMatrix {
    let (vals, vecs) = eigh_desc(h);
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        vals.len(),
        vals.iter().map(|&l| C64::from_polar(1.0, -l * t)),
    ));
    &vecs * d * vecs.adjoint()
}

/// Eigendecomposition of a unitary matrix into phases `θ_k ∈ (−π, π]` and an
/// orthonormal eigenbasis.
///
/// A unitary is normal, so its Hermitian and anti-Hermitian parts commute and
/// share eigenvectors. A generic real combination of the two separates the
/// eigenvalues on the unit circle.
pub fn eig_unitary(u: &CMatrix) -> (Vec<f64>, CMatrix) {
    let re = (u + u.adjoint()).scale(0.5);
    let im = (u - u.adjoint()) * c64(0.0, -0.5);
    let mix = &re + im.scale(std::f64::consts::SQRT_2 * 0.713_271);
    let (_, vecs) = eigh_desc(&mix);
    let n = u.nrows();
    let phases = (0..n)
        .map(|k| {
            let v = vecs.column(k);
            let z = (v.adjoint() * u * v)[(0, 0)];
            z.arg()
        })
        .collect();
    (phases, vecs)
}

/// Standard complex normal sample (independent real and imaginary parts).
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unitary of dimension `d` (QR of a Ginibre matrix with the
/// diagonal phases of `R` absorbed).
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| complex_normal(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let z = r[(j, j)];
        let ph = if z.norm() > 0.0 { z / z.norm() } else { c64(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| complex_normal(rng));
    (&g + g.adjoint()).scale(0.5)
}

/// Trace of a square matrix.
pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

/// Matrix of a Pauli string such as `"XZI"` (leftmost factor acts on qubit 0).
pub fn pauli_string(s: &str) -> CMatrix {
    let mut acc = identity(1);
    for ch in s.chars() {
        acc = kron(&acc, &pauli(ch));
    }
    acc
}

/// Single-qubit Pauli matrix by letter (`I`, `X`, `Y`, `Z`).
pub fn pauli(ch: char) -> CMatrix {
    let z = c64(0.0, 0.0);
    let o = c64(1.0, 0.0);
    let i = c64(0.0, 1.0);
    match ch.to_ascii_uppercase() {
        'I' => from_rows(&[vec![o, z], vec![z, o]]),
        'X' => from_rows(&[vec![z, o], vec![o, z]]),
        'Y' => from_rows(&[vec![z, -i], vec![i, z]]),
        'Z' => from_rows(&[vec![o, z], vec![z, -o]]),
        other => panic!("unknown Pauli letter {other}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn haar_is_unitary() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for d in [2, 4, 8] {
            assert!(unitarity_deviation(&haar_unitary(d, &mut rng)) < 1e-12);
        }
    }

    #[test]
    fn expm_of_pauli_x() {
        let b = 0.37;
        let u = expm_herm(&pauli('X'), b);
        assert!((u[(0, 0)] - c64(b.cos(), 0.0)).norm() < 1e-12);
        assert!((u[(0, 1)] - c64(0.0, -b.sin())).norm() < 1e-12);
    }

    #[test]
    fn unitary_eigen_reconstructs() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let u = haar_unitary(4, &mut rng);
        let (ph, v) = eig_unitary(&u);
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(4, ph.iter().map(|&p| C64::from_polar(1.0, p))));
        assert!(max_abs_diff(&(&v * d * v.adjoint()), &u) < 1e-9);
    }

    #[test]
    fn phase_distance_ignores_global_phase() {
        let x = pauli('X');
        assert!(phase_distance(&x, &(x.clone() * c64(0.0, 1.0))) < 1e-15);
        assert!(phase_distance(&x, &pauli('Z')) > 0.5);
    }
}
