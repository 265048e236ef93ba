//! Pure and mixed quantum states.
//!
//! Basis indices follow a single convention everywhere in the toolkit: in a
//! ket `|q0 q1 … q(n−1)⟩` the leftmost symbol is qubit 0 and is the most
//! significant bit of the basis-state integer. So on three qubits `|001⟩` is
//! index 1 and `|100⟩` is index 4.

mod density;
mod observable;
mod schmidt;

pub use density::{density_from_ensemble, partial_trace, purify, DensityMatrix};
pub use observable::Observable;
pub use schmidt::{schmidt_decompose, SchmidtForm};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::scalar::{Cplx, Real, C64};
use num_traits::{One, Zero};
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Tolerance on `Σ|a|² = 1` when constructing a state from raw amplitudes.
pub const NORM_TOL: f64 = 1e-10;
/// Tolerance used after renormalizing a post-measurement state.
pub const POST_MEASURE_TOL: f64 = 1e-9;

/// Bit position (from the least significant end) of qubit `q` in an
/// `n`-qubit basis index.
#[inline]
pub fn bit_pos(n: usize, q: usize) -> usize {
    n - 1 - q
}

/// Value of qubit `q` in basis index `idx` of an `n`-qubit register.
#[inline]
pub fn qubit_value(idx: usize, n: usize, q: usize) -> usize {
    (idx >> bit_pos(n, q)) & 1
}

/// Parses a bit string such as `"0110"` into a basis index, leftmost
/// character most significant.
pub fn bits_to_index(bits: &str) -> Result<usize> {
    bits.chars().try_fold(0usize, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        other => Err(Error::Invalid(format!("bad bit character '{other}'"))),
    })
}

/// Formats a basis index as an `n`-character bit string.
pub fn index_to_bits(idx: usize, n: usize) -> String {
    (0..n).map(|q| if qubit_value(idx, n, q) == 1 { '1' } else { '0' }).collect()
}

/// A normalized pure state of `n` qubits stored as `2^n` dense amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T: Real = f64> {
    n_qubits: usize,
    amps: Vec<Cplx<T>>,
}

/// Result of a projective measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementOutcome<T: Real = f64> {
    /// Observed bits, one character per measured qubit in request order.
    pub bits: String,
    /// Probability of this outcome before the measurement.
    pub probability: f64,
    /// Renormalized state after the measurement.
    pub post_state: StateVector<T>,
}

fn tol_for<T: Real>() -> f64 {
    // Single precision cannot hold a norm to 1e-10.
    if std::mem::size_of::<T>() < 8 {
        1e-5
    } else {
        NORM_TOL
    }
}

impl<T: Real> StateVector<T> {
    /// Wraps amplitudes, checking length `2^n` and unit norm.
    pub fn new(amps: Vec<Cplx<T>>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let s = StateVector { n_qubits: len.trailing_zeros() as usize, amps };
        let n2 = s.norm_sqr();
        if (n2 - 1.0).abs() > tol_for::<T>() {
            return Err(Error::NotNormalized(n2));
        }
        Ok(s)
    }

    /// Scales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amps: Vec<Cplx<T>>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(len));
        }
        let n2: f64 = amps.iter().map(|a| a.norm_sqr().to_f64_lossy()).sum();
        if n2 <= 0.0 || !n2.is_finite() {
            return Err(Error::NotNormalized(n2));
        }
        let k = T::of(1.0 / n2.sqrt());
        let amps = amps.into_iter().map(|a| a * k).collect();
        Ok(StateVector { n_qubits: len.trailing_zeros() as usize, amps })
    }

    /// Internal constructor for amplitudes already known to be normalized.
    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<Cplx<T>>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        StateVector { n_qubits, amps }
    }

    /// The all-zeros state `|0…0⟩`.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    /// Computational basis state with integer label `index`.
    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![Cplx::<T>::zero(); 1 << n_qubits];
        amps[index] = Cplx::one();
        StateVector { n_qubits, amps }
    }

    /// Computational basis state from a bit string like `"101"`.
    pub fn from_bits(bits: &str) -> Result<Self> {
        Ok(Self::basis(bits.len(), bits_to_index(bits)?))
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Cplx<T>] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Cplx<T>] {
        &mut self.amps
    }

    pub fn into_amps(self) -> Vec<Cplx<T>> {
        self.amps
    }

    /// Amplitude of the basis state `index`.
    pub fn amp(&self, index: usize) -> Cplx<T> {
        self.amps[index]
    }

    /// `Σ |a_b|²` accumulated in double precision.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr().to_f64_lossy()).sum()
    }

    /// Outcome probabilities `|a_b|²` for every basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr().to_f64_lossy()).collect()
    }

    /// Converts to another float width.
    pub fn cast<U: Real>(&self) -> StateVector<U> {
        StateVector { n_qubits: self.n_qubits, amps: self.amps.iter().map(|&a| crate::scalar::cast_c(a)).collect() }
    }

    /// Kronecker product `self ⊗ other`; amplitude at `(x, y)` is `a[x]·b[y]`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for &a in &self.amps {
            for &b in &other.amps {
                amps.push(a * b);
            }
        }
        StateVector { n_qubits: self.n_qubits + other.n_qubits, amps }
    }

    /// `⟨self|other⟩ = Σ conj(self[i])·other[i]`.
    pub fn inner(&self, other: &Self) -> Result<Cplx<T>> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: other.dim() });
        }
        Ok(self.amps.iter().zip(&other.amps).fold(Cplx::zero(), |acc, (a, b)| acc + a.conj() * b))
    }

    /// Probability that measuring `qubits` yields `outcome` (bits in list order).
    pub fn subset_probability(&self, qubits: &[usize], outcome: usize) -> f64 {
        let n = self.n_qubits;
        let k = qubits.len();
        self.amps
            .iter()
            .enumerate()
            .filter(|(idx, _)| {
                qubits.iter().enumerate().all(|(j, &q)| qubit_value(*idx, n, q) == (outcome >> (k - 1 - j)) & 1)
            })
            .map(|(_, a)| a.norm_sqr().to_f64_lossy())
            .sum()
    }

    /// Marginal distribution of `qubits` (index = outcome with the first
    /// listed qubit most significant).
    pub fn marginal(&self, qubits: &[usize]) -> Vec<f64> {
        let n = self.n_qubits;
        let k = qubits.len();
        let mut out = vec![0.0; 1 << k];
        for (idx, a) in self.amps.iter().enumerate() {
            let mut o = 0;
            for &q in qubits {
                o = (o << 1) | qubit_value(idx, n, q);
            }
            out[o] += a.norm_sqr().to_f64_lossy();
        }
        let _ = k;
        out
    }

    /// Projects `qubits` onto `outcome` and renormalizes. Returns the
    /// probability and the post-measurement state.
    pub fn project(&self, qubits: &[usize], outcome: usize) -> Result<(f64, Self)> {
        let n = self.n_qubits;
        let k = qubits.len();
        let mut amps = self.amps.clone();
        for (idx, a) in amps.iter_mut().enumerate() {
            let keep = qubits.iter().enumerate().all(|(j, &q)| qubit_value(idx, n, q) == (outcome >> (k - 1 - j)) & 1);
            if !keep {
                *a = Cplx::zero();
            }
        }
        let p: f64 = amps.iter().map(|a| a.norm_sqr().to_f64_lossy()).sum();
        if p <= 0.0 {
            return Err(Error::Execution("projection onto a zero-probability outcome".into()));
        }
        let k = T::of(1.0 / p.sqrt());
        for a in amps.iter_mut() {
            *a = *a * k;
        }
        let post = StateVector { n_qubits: n, amps };
        debug_assert!((post.norm_sqr() - 1.0).abs() < POST_MEASURE_TOL.max(tol_for::<T>()));
        Ok((p, post))
    }

    /// Measures every qubit, sampling basis state `b` with probability `|a_b|²`.
    pub fn measure_all<R: Rng + ?Sized>(&self, rng: &mut R) -> MeasurementOutcome<T> {
        let probs = self.probabilities();
        let b = sample_index(&probs, rng);
        MeasurementOutcome {
            bits: index_to_bits(b, self.n_qubits),
            probability: probs[b],
            post_state: Self::basis(self.n_qubits, b),
        }
    }

    /// Measures the listed qubits only. The unmeasured qubits keep their
    /// (renormalized) conditional amplitudes.
    pub fn measure_subset<R: Rng + ?Sized>(&self, qubits: &[usize], rng: &mut R) -> Result<MeasurementOutcome<T>> {
        validate_qubits(qubits, self.n_qubits)?;
        if qubits.is_empty() {
            return Err(Error::Invalid("empty qubit list".into()));
        }
        let dist = self.marginal(qubits);
        let o = sample_index(&dist, rng);
        let (p, post) = self.project(qubits, o)?;
        Ok(MeasurementOutcome { bits: index_to_bits(o, qubits.len()), probability: p, post_state: post })
    }
}

impl StateVector<f64> {
    /// Builds a state from `(re, im)` pairs.
    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        Self::new(pairs.iter().map(|p| C64::new(p[0], p[1])).collect())
    }

    /// Amplitudes as `[re, im]` pairs (the JSON wire format).
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.amps.iter().map(|a| [a.re, a.im]).collect()
    }

    /// Column vector view as a dense matrix.
    pub fn to_column(&self) -> CMatrix {
        CMatrix::from_column_slice(self.dim(), 1, &self.amps)
    }

    /// `|a⟩⟨b|`, entry `(i, j)` equal to `a[i]·conj(b[j])`.
    pub fn outer(&self, other: &Self) -> CMatrix {
        CMatrix::from_fn(self.dim(), other.dim(), |i, j| self.amps[i] * other.amps[j].conj())
    }

    /// `⟨s|O|s⟩`. The imaginary part is checked to be below `1e-9` and dropped.
    pub fn expectation(&self, o: &Observable) -> Result<f64> {
        if o.matrix().nrows() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: o.matrix().nrows() });
        }
        let v = self.to_column();
        let z = (v.adjoint() * o.matrix() * &v)[(0, 0)];
        if z.im.abs() > 1e-9 {
            return Err(Error::NotHermitian(z.im.abs()));
        }
        Ok(z.re)
    }

    /// Applies an arbitrary matrix of matching dimension and returns the
    /// resulting (not necessarily normalized) amplitudes.
    pub fn mul_matrix(&self, m: &CMatrix) -> Vec<C64> {
        (m * self.to_column()).iter().copied().collect()
    }

    /// Measures in an orthonormal basis `{|Φ_j⟩}`: outcome `j` occurs with
    /// probability `|⟨Φ_j|ψ⟩|²`. The outcome bits encode `j`.
    pub fn basis_change_measure<R: Rng + ?Sized>(&self, basis: &[StateVector], rng: &mut R) -> Result<MeasurementOutcome> {
        if basis.len() != self.dim() {
            return Err(Error::Dimension { expected: self.dim(), got: basis.len() });
        }
        let mut u = CMatrix::zeros(self.dim(), self.dim());
        for (i, phi) in basis.iter().enumerate() {
            if phi.dim() != self.dim() {
                return Err(Error::Dimension { expected: self.dim(), got: phi.dim() });
            }
            for j in 0..self.dim() {
                u[(i, j)] = phi.amps[j].conj();
            }
        }
        let dev = crate::linalg::unitarity_deviation(&u);
        if dev > 1e-8 {
            return Err(Error::Invalid(format!("basis is not orthonormal (Gram deviation {dev:e})")));
        }
        let rotated = StateVector::normalized(self.mul_matrix(&u))?;
        Ok(rotated.measure_all(rng))
    }
}

impl Serialize for StateVector<f64> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for StateVector<f64> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<[f64; 2]> = Vec::deserialize(d)?;
        StateVector::from_pairs(&pairs).map_err(serde::de::Error::custom)
    }
}

/// Free-function form of [`StateVector::tensor`].
pub fn tensor_product<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> StateVector<T> {
    a.tensor(b)
}

/// Free-function form of [`StateVector::inner`].
pub fn inner_product<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<Cplx<T>> {
    a.inner(b)
}

/// Free-function form of [`StateVector::outer`].
pub fn outer_product(a: &StateVector, b: &StateVector) -> CMatrix {
    a.outer(b)
}

/// Checks qubit indices are in range and distinct.
pub fn validate_qubits(qubits: &[usize], n: usize) -> Result<()> {
    for (i, &q) in qubits.iter().enumerate() {
        if q >= n {
            return Err(Error::QubitOutOfRange { index: q, n });
        }
        if qubits[..i].contains(&q) {
            return Err(Error::DuplicateQubit(q));
        }
    }
    Ok(())
}

/// Draws an index from a discrete distribution (weights need not be
/// exactly normalized).
pub fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let mut r = rng.random::<f64>() * total;
    let mut last = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            last = i;
            if r < p {
                return i;
            }
            r -= p;
        }
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn ghz3() -> StateVector {
        let mut a = vec![c64(0.0, 0.0); 8];
        a[0] = c64(H, 0.0);
        a[7] = c64(H, 0.0);
        StateVector::new(a).unwrap()
    }

    #[test]
    fn tensor_of_zeros() {
        let z = StateVector::<f64>::zero(1);
        assert_eq!(z.tensor(&z), StateVector::zero(2));
    }

    #[test]
    fn tensor_plus_zero() {
        let plus = StateVector::new(vec![c64(H, 0.0), c64(H, 0.0)]).unwrap();
        let s = plus.tensor(&StateVector::zero(1));
        assert!((s.amp(0).re - H).abs() < 1e-15 && (s.amp(2).re - H).abs() < 1e-15);
        assert_eq!(s.amp(1).norm(), 0.0);
    }

    #[test]
    fn three_qubit_product_amplitude() {
        let q = |a: f64| StateVector::new(vec![c64(a.cos(), 0.0), c64(0.0, a.sin())]).unwrap();
        let (q1, q2, q3) = (q(0.2), q(0.9), q(1.3));
        let s = q1.tensor(&q2).tensor(&q3);
        let expect = q1.amp(0) * q2.amp(0) * q3.amp(1);
        assert!((s.amp(1) - expect).norm() < 1e-15);
        let basis = StateVector::from_bits("001").unwrap();
        assert!((basis.inner(&s).unwrap() - expect).norm() < 1e-15);
    }

    #[test]
    fn inner_picks_alpha() {
        let phi = StateVector::new(vec![c64(0.6, 0.0), c64(0.0, 0.8)]).unwrap();
        assert!((StateVector::zero(1).inner(&phi).unwrap() - c64(0.6, 0.0)).norm() < 1e-15);
        assert!((phi.inner(&phi).unwrap() - c64(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn inner_dimension_mismatch() {
        assert!(StateVector::<f64>::zero(1).inner(&StateVector::zero(2)).is_err());
    }

    #[test]
    fn outer_products() {
        let m = StateVector::<f64>::basis(1, 0).outer(&StateVector::basis(1, 1));
        assert_eq!(m[(0, 1)], c64(1.0, 0.0));
        assert_eq!(m[(1, 0)], c64(0.0, 0.0));
        let psi = StateVector::new(vec![c64(0.6, 0.0), c64(0.0, 0.8)]).unwrap();
        let phi = StateVector::new(vec![c64(0.0, H), c64(H, 0.0)]).unwrap();
        let o = psi.outer(&phi);
        assert!((o[(1, 0)] - psi.amp(1) * phi.amp(0).conj()).norm() < 1e-15);
        let plus = StateVector::new(vec![c64(H, 0.0), c64(H, 0.0)]).unwrap();
        let minus = StateVector::new(vec![c64(H, 0.0), c64(-H, 0.0)]).unwrap();
        let id = plus.outer(&plus) + minus.outer(&minus);
        assert!(crate::linalg::max_abs_diff(&id, &crate::linalg::identity(2)) < 1e-15);
    }

    #[test]
    fn measure_zero_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let o = StateVector::<f64>::zero(1).measure_all(&mut rng);
            assert_eq!(o.bits, "0");
            assert_eq!(o.probability, 1.0);
        }
    }

    #[test]
    fn ghz_measurement_outcomes() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = ghz3();
        let mut zeros = 0;
        for _ in 0..2000 {
            let o = s.measure_all(&mut rng);
            assert!(o.bits == "000" || o.bits == "111");
            zeros += (o.bits == "000") as usize;
        }
        // Binomial(2000, 0.5) has standard deviation ≈ 22.4.
        assert!((zeros as f64 - 1000.0).abs() < 5.0 * 22.4);
    }

    #[test]
    fn ghz_partial_measurement() {
        let (p, post) = ghz3().project(&[0], 0).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert_eq!(post, StateVector::zero(3));
    }

    #[test]
    fn w_state_partial_measurement() {
        let t = 1.0 / 3f64.sqrt();
        let mut a = vec![c64(0.0, 0.0); 8];
        a[1] = c64(t, 0.0);
        a[2] = c64(t, 0.0);
        a[4] = c64(t, 0.0);
        let w = StateVector::new(a).unwrap();
        let (p, post) = w.project(&[0], 0).unwrap();
        assert!((p - 2.0 / 3.0).abs() < 1e-12);
        assert!((post.amp(1).re - H).abs() < 1e-12 && (post.amp(2).re - H).abs() < 1e-12);
        assert_eq!(post.amp(4).norm(), 0.0);
    }

    #[test]
    fn product_state_partial_measurement_keeps_rest() {
        let psi = StateVector::new(vec![c64(0.6, 0.0), c64(0.0, 0.8)]).unwrap();
        let s = StateVector::zero(1).tensor(&psi);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let o = s.measure_subset(&[0], &mut rng).unwrap();
        assert_eq!(o.bits, "0");
        assert!((o.probability - 1.0).abs() < 1e-12);
        assert_eq!(o.post_state, s);
    }

    #[test]
    fn measure_subset_rejects_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(StateVector::<f64>::zero(2).measure_subset(&[], &mut rng).is_err());
    }

    #[test]
    fn expectation_z_and_x() {
        let phi = StateVector::new(vec![c64(0.6, 0.0), c64(0.0, 0.8)]).unwrap();
        let z = phi.expectation(&Observable::pauli("Z")).unwrap();
        assert!((z - (0.36 - 0.64)).abs() < 1e-15);
        let plus = StateVector::new(vec![c64(H, 0.0), c64(H, 0.0)]).unwrap();
        assert!((plus.expectation(&Observable::pauli("X")).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn basis_change_measurements() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let plus = StateVector::new(vec![c64(H, 0.0), c64(H, 0.0)]).unwrap();
        let minus = StateVector::new(vec![c64(H, 0.0), c64(-H, 0.0)]).unwrap();
        let pm = vec![plus.clone(), minus.clone()];
        let o = plus.basis_change_measure(&pm, &mut rng).unwrap();
        assert_eq!(o.bits, "0");
        assert!((o.probability - 1.0).abs() < 1e-12);
        let o = StateVector::zero(1).basis_change_measure(&pm, &mut rng).unwrap();
        assert!((o.probability - 0.5).abs() < 1e-12);
        let comp = vec![StateVector::basis(1, 0), StateVector::basis(1, 1)];
        let o = StateVector::basis(1, 1).basis_change_measure(&comp, &mut rng).unwrap();
        assert_eq!(o.bits, "1");
        let bad = vec![plus.clone(), plus];
        assert!(StateVector::zero(1).basis_change_measure(&bad, &mut rng).is_err());
    }

    #[test]
    fn construction_checks() {
        assert!(StateVector::new(vec![c64(1.0, 0.0), c64(1.0, 0.0)]).is_err());
        assert!(StateVector::new(vec![c64(1.0, 0.0); 3]).is_err());
        assert!(StateVector::<f64>::normalized(vec![c64(1.0, 0.0), c64(1.0, 0.0)]).is_ok());
    }

    #[test]
    fn json_round_trip_pairs() {
        let s = ghz3();
        let back = StateVector::from_pairs(&s.to_pairs()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn single_precision_state() {
        let s = StateVector::<f32>::zero(2);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-6);
        let d: StateVector<f64> = s.cast();
        assert_eq!(d, StateVector::zero(2));
    }
}
