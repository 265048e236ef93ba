//! State tomography from measurement frequencies.
//!
//! Measurements are grouped into bases. Each basis is a complete set of
//! projectors, so its outcome frequencies sum to one. Three estimators are
//! offered: plain linear inversion, its projection onto density matrices,
//! and maximum likelihood by projected gradient ascent.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qstate::{index_to_bits, sample_index, DensityMatrix, StateVector};
use crate::scalar::{c64, C64};
use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;
use std::collections::BTreeMap;

/// One measurement setting: projectors summing to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    pub name: String,
    pub labels: Vec<String>,
    pub projectors: Vec<CMatrix>,
}

/// A collection of measurement bases on a `2^n`-dimensional system.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    bases: Vec<Basis>,
    dim: usize,
}

fn axis_states(axis: char) -> Result<[[C64; 2]; 2]> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Ok(match axis {
        'z' => [[c64(1.0, 0.0), c64(0.0, 0.0)], [c64(0.0, 0.0), c64(1.0, 0.0)]],
        'x' => [[c64(h, 0.0), c64(h, 0.0)], [c64(h, 0.0), c64(-h, 0.0)]],
        'y' => [[c64(h, 0.0), c64(0.0, h)], [c64(h, 0.0), c64(0.0, -h)]],
        other => return Err(Error::Invalid(format!("unknown basis axis '{other}'"))),
    })
}

impl Povm {
    /// Validates every basis: projectors Hermitian PSD of a common
    /// power-of-two dimension, summing to `I` within `1e-9`.
    pub fn new(bases: Vec<Basis>) -> Result<Self> {
        let dim = bases
            .first()
            .and_then(|b| b.projectors.first())
            .map(|p| p.nrows())
            .ok_or_else(|| Error::Invalid("POVM has no projectors".into()))?;
        if !dim.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(dim));
        }
        for b in &bases {
            if b.labels.len() != b.projectors.len() {
                return Err(Error::Dimension { expected: b.projectors.len(), got: b.labels.len() });
            }
            let mut sum = CMatrix::zeros(dim, dim);
            for p in &b.projectors {
                if p.nrows() != dim || p.ncols() != dim {
                    return Err(Error::Dimension { expected: dim, got: p.nrows() });
                }
                let herm = linalg::hermiticity_deviation(p);
                if herm > 1e-9 {
                    return Err(Error::NotHermitian(herm));
                }
                let (vals, _) = linalg::eigh_desc(p);
                if vals.last().is_some_and(|&v| v < -1e-9) {
                    return Err(Error::Invalid(format!("projector in basis '{}' is not PSD", b.name)));
                }
                sum += p;
            }
            let dev = linalg::max_abs_diff(&sum, &linalg::identity(dim));
            if dev > 1e-9 {
                return Err(Error::Invalid(format!("basis '{}' sums to I only within {dev:e}", b.name)));
            }
        }
        Ok(Povm { bases, dim })
    }

    /// Product Pauli bases named by strings over `{x, y, z}`, one letter per
    /// qubit, e.g. `["zz", "xx"]`. Outcome labels are bit strings; `0` is
    /// the `+1` eigenstate of each axis.
    pub fn pauli(names: &[&str]) -> Result<Self> {
        let n = names.first().map(|s| s.len()).ok_or_else(|| Error::Invalid("no bases given".into()))?;
        if n == 0 || names.iter().any(|s| s.len() != n) {
            return Err(Error::Invalid("basis names must share a nonzero length".into()));
        }
        let mut bases = Vec::new();
        for name in names {
            let axes: Vec<[[C64; 2]; 2]> = name.chars().map(axis_states).collect::<Result<_>>()?;
            let mut projectors = Vec::new();
            let mut labels = Vec::new();
            for k in 0..1usize << n {
                let mut v = vec![c64(1.0, 0.0)];
                for (q, ax) in axes.iter().enumerate() {
                    let s = &ax[(k >> (n - 1 - q)) & 1];
                    v = v.iter().flat_map(|a| s.iter().map(move |b| a * b)).collect();
                }
                let col = CMatrix::from_column_slice(v.len(), 1, &v);
                projectors.push(&col * col.adjoint());
                labels.push(index_to_bits(k, n));
            }
            bases.push(Basis { name: name.to_string(), labels, projectors });
        }
        Povm::new(bases)
    }

    /// `{z, y, x}` on one qubit.
    pub fn single_qubit() -> Self {
        Povm::pauli(&["z", "y", "x"]).expect("valid names")
    }

    /// `{zz, yy, xx, zx, yz}`, the two-qubit set used for the Bell pair. It
    /// fixes the pair's stabilizers but is not informationally complete.
    pub fn bell_quorum() -> Self {
        Povm::pauli(&["zz", "yy", "xx", "zx", "yz"]).expect("valid names")
    }

    /// All `3^n` product Pauli bases.
    pub fn all_products(n: usize) -> Result<Self> {
        let mut names = vec![String::new()];
        for _ in 0..n {
            names = names.iter().flat_map(|s| ["z", "y", "x"].map(|a| format!("{s}{a}"))).collect();
        }
        Povm::pauli(&names.iter().map(String::as_str).collect::<Vec<_>>())
    }

    pub fn bases(&self) -> &[Basis] {
        &self.bases
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Outcome statistics per basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementRecord {
    /// Raw counts `m_i`; absent for exact-frequency records.
    pub counts: Option<Vec<Vec<u64>>>,
    /// `ω_i = m_i / m` per basis.
    pub frequencies: Vec<Vec<f64>>,
    /// Shots per basis `m` (zero for exact records).
    pub shots: u64,
}

impl MeasurementRecord {
    /// Builds a record from raw counts, one row per basis.
    pub fn from_counts(counts: Vec<Vec<u64>>) -> Result<Self> {
        let shots = counts.first().map(|r| r.iter().sum::<u64>()).unwrap_or(0);
        if shots == 0 || counts.iter().any(|r| r.iter().sum::<u64>() != shots) {
            return Err(Error::Invalid("every basis needs the same positive shot count".into()));
        }
        let frequencies = counts.iter().map(|r| r.iter().map(|&c| c as f64 / shots as f64).collect()).collect();
        Ok(MeasurementRecord { counts: Some(counts), frequencies, shots })
    }

    /// `{basis → {label → count}}` (or frequency, for exact records).
    pub fn to_map(&self, povm: &Povm) -> BTreeMap<String, BTreeMap<String, f64>> {
        povm.bases
            .iter()
            .enumerate()
            .map(|(b, basis)| {
                let row = basis
                    .labels
                    .iter()
                    .enumerate()
                    .map(|(i, l)| {
                        let v = match &self.counts {
                            Some(c) => c[b][i] as f64,
                            None => self.frequencies[b][i],
                        };
                        (l.clone(), v)
                    })
                    .collect();
                (basis.name.clone(), row)
            })
            .collect()
    }

    fn check(&self, povm: &Povm) -> Result<()> {
        if self.frequencies.len() != povm.bases.len() {
            return Err(Error::Dimension { expected: povm.bases.len(), got: self.frequencies.len() });
        }
        for (f, b) in self.frequencies.iter().zip(&povm.bases) {
            if f.len() != b.projectors.len() {
                return Err(Error::Dimension { expected: b.projectors.len(), got: f.len() });
            }
        }
        Ok(())
    }
}

fn born(rho: &CMatrix, p: &CMatrix) -> f64 {
    (p * rho).trace().re
}

/// Measures `rho` in every basis of `povm`. With `shots = None` the record
/// holds the exact Born probabilities `Tr(P_i ρ)`; otherwise each basis gets
/// `shots` multinomial draws.
pub fn simulate_povm<R: Rng + ?Sized>(rho: &DensityMatrix, povm: &Povm, shots: Option<u64>, rng: &mut R) -> Result<MeasurementRecord> {
    if rho.dim() != povm.dim {
        return Err(Error::Dimension { expected: povm.dim, got: rho.dim() });
    }
    let probs: Vec<Vec<f64>> =
        povm.bases.iter().map(|b| b.projectors.iter().map(|p| born(rho.matrix(), p).max(0.0)).collect()).collect();
    match shots {
        None => Ok(MeasurementRecord { counts: None, frequencies: probs, shots: 0 }),
        Some(0) => Err(Error::Invalid("shots must be positive".into())),
        Some(m) => {
            let counts = probs
                .iter()
                .map(|p| {
                    let mut c = vec![0u64; p.len()];
                    for _ in 0..m {
                        c[sample_index(p, rng)] += 1;
                    }
                    c
                })
                .collect();
            MeasurementRecord::from_counts(counts)
        }
    }
}

/// [`simulate_povm`] for a pure state.
pub fn simulate_povm_pure<R: Rng + ?Sized>(s: &StateVector, povm: &Povm, shots: Option<u64>, rng: &mut R) -> Result<MeasurementRecord> {
    simulate_povm(&DensityMatrix::pure(s), povm, shots, rng)
}

/// Non-identity Pauli strings on `n` qubits, as matrices.
fn pauli_basis(n: usize) -> Vec<CMatrix> {
    let mut labels = vec![String::new()];
    for _ in 0..n {
        labels = labels.iter().flat_map(|s| ['I', 'X', 'Y', 'Z'].map(|c| format!("{s}{c}"))).collect();
    }
    labels.iter().skip(1).map(|l| linalg::pauli_string(l)).collect()
}

/// Linear inversion `Tr(P_i ρ) = ω_i`.
///
/// `ρ` is written as `(I + Σ_k c_k σ_k)/d` over the non-identity Pauli
/// strings, which pins the trace to 1, and the real coefficients are the
/// least-squares solution. The result may have negative eigenvalues.
/// Fails when the projectors do not determine every coefficient.
pub fn linear_inversion(rec: &MeasurementRecord, povm: &Povm) -> Result<CMatrix> {
    rec.check(povm)?;
    let d = povm.dim;
    let sigmas = pauli_basis(d.trailing_zeros() as usize);
    let projs: Vec<(&CMatrix, f64)> =
        povm.bases.iter().zip(&rec.frequencies).flat_map(|(b, f)| b.projectors.iter().zip(f.iter().copied())).collect();
    let a = DMatrix::from_fn(projs.len(), sigmas.len(), |i, k| born(&sigmas[k], projs[i].0) / d as f64);
    let y = nalgebra::DVector::from_iterator(projs.len(), projs.iter().map(|(p, w)| w - p.trace().re / d as f64));
    let svd = a.svd(true, true);
    let smax = svd.singular_values.max();
    let rank = svd.singular_values.iter().filter(|&&s| s > 1e-10 * smax.max(1e-300)).count();
    if rank < sigmas.len() {
        return Err(Error::Invalid(format!(
            "measurements are not informationally complete (rank {rank} of {})",
            sigmas.len()
        )));
    }
    let c = svd.solve(&y, 1e-12).map_err(|e| Error::Execution(e.to_string()))?;
    let mut rho = linalg::identity(d);
    for (k, s) in sigmas.iter().enumerate() {
        rho += s * c64(c[k], 0.0);
    }
    Ok(rho / c64(d as f64, 0.0))
}

/// Euclidean projection of a vector onto the probability simplex.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.total_cmp(a));
    let mut cum = 0.0;
    let mut tau = 0.0;
    for (j, &x) in u.iter().enumerate() {
        cum += x;
        let t = (cum - 1.0) / (j + 1) as f64;
        if x - t > 0.0 {
            tau = t;
        }
    }
    v.iter().map(|x| (x - tau).max(0.0)).collect()
}

fn project_unchecked(m: &CMatrix) -> CMatrix {
    let herm = (m + m.adjoint()) * c64(0.5, 0.0);
    let (vals, vecs) = linalg::eigh_desc(&herm);
    let p = project_simplex(&vals);
    let diag = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(p.len(), p.iter().map(|&x| c64(x, 0.0))));
    &vecs * diag * vecs.adjoint()
}

/// Nearest (Frobenius) density matrix to a Hermitian, trace-1 matrix: the
/// eigenvalues are projected onto the simplex, the eigenvectors kept.
pub fn psd_project(m: &CMatrix) -> Result<DensityMatrix> {
    if !m.is_square() || !m.nrows().is_power_of_two() {
        return Err(Error::NotPowerOfTwo(m.nrows()));
    }
    let herm = linalg::hermiticity_deviation(m);
    if herm > 1e-9 {
        return Err(Error::NotHermitian(herm));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > 1e-6 || tr.im.abs() > 1e-6 {
        return Err(Error::Invalid(format!("trace is {tr}, expected 1")));
    }
    Ok(DensityMatrix::from_raw(project_unchecked(m)))
}

/// Settings for [`ml_estimate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MlConfig {
    pub max_iters: usize,
    /// Stop once an accepted step gains less than this.
    pub tol: f64,
}

impl Default for MlConfig {
    fn default() -> Self {
        MlConfig { max_iters: 5000, tol: 1e-10 }
    }
}

/// Outcome of [`ml_estimate`].
#[derive(Debug, Clone, PartialEq)]
pub struct MlEstimate {
    pub rho: DensityMatrix,
    /// Log-likelihood after each accepted step, starting from `I/d`.
    pub objective: Vec<f64>,
    pub iterations: usize,
}

/// `Σ ω_i ln Tr(P_i ρ)`, skipping outcomes with `ω_i = 0`.
pub fn log_likelihood(rho: &CMatrix, rec: &MeasurementRecord, povm: &Povm) -> f64 {
    let mut l = 0.0;
    for (b, f) in povm.bases.iter().zip(&rec.frequencies) {
        for (p, &w) in b.projectors.iter().zip(f) {
            if w > 0.0 {
                let pr = born(rho, p);
                l += if pr > 0.0 { w * pr.ln() } else { f64::NEG_INFINITY };
            }
        }
    }
    l
}

/// Maximum-likelihood estimate by projected gradient ascent.
///
/// The gradient `Σ (ω_i / Tr(P_i ρ))·P_i` is made traceless, a step is taken
/// and the result projected back onto density matrices. Steps start at
/// `0.5/L` with `L = Σ_i ‖P_i‖²_F`, halve until the likelihood does not
/// decrease, and double again after each accepted step.
pub fn ml_estimate(rec: &MeasurementRecord, povm: &Povm, cfg: &MlConfig) -> Result<MlEstimate> {
    rec.check(povm)?;
    for f in &rec.frequencies {
        let s: f64 = f.iter().sum();
        if (s - 1.0).abs() > 1e-9 || f.iter().any(|&w| w < 0.0) {
            return Err(Error::Invalid("frequencies of a basis must be a distribution".into()));
        }
    }
    let d = povm.dim;
    let lip: f64 = povm.bases.iter().flat_map(|b| &b.projectors).map(|p| p.norm_squared()).sum();
    let t0 = 0.5 / lip;
    let mut rho = linalg::identity(d) / c64(d as f64, 0.0);
    let mut obj = log_likelihood(&rho, rec, povm);
    let mut trace = vec![obj];
    let mut t = t0;
    let mut it = 0;
    while it < cfg.max_iters {
        it += 1;
        let mut g = CMatrix::zeros(d, d);
        for (b, f) in povm.bases.iter().zip(&rec.frequencies) {
            for (p, &w) in b.projectors.iter().zip(f) {
                if w > 0.0 {
                    g += p * c64(w / born(&rho, p).max(1e-300), 0.0);
                }
            }
        }
        let gt = g.trace() / c64(d as f64, 0.0);
        g -= linalg::identity(d) * gt;
        let mut accepted = None;
        while t > 1e-15 {
            let cand = project_unchecked(&(&rho + &g * c64(t, 0.0)));
            let l = log_likelihood(&cand, rec, povm);
            if l >= obj {
                accepted = Some((cand, l));
                break;
            }
            t /= 2.0;
        }
        let Some((cand, l)) = accepted else { break };
        let gain = l - obj;
        rho = cand;
        obj = l;
        trace.push(obj);
        t *= 2.0;
        if gain < cfg.tol {
            break;
        }
    }
    Ok(MlEstimate { rho: DensityMatrix::from_raw(rho), objective: trace, iterations: it })
}

/// Eigenvalues in descending order with eigenvectors whose first nonzero
/// component is real and positive.
pub fn spectral_report(rho: &DensityMatrix) -> Vec<(f64, StateVector)> {
    let (vals, vecs) = linalg::eigh_desc(rho.matrix());
    vals.into_iter()
        .enumerate()
        .map(|(k, l)| {
            let mut v: Vec<C64> = vecs.column(k).iter().copied().collect();
            linalg::fix_global_phase(&mut v);
            (l, StateVector::normalized(v).expect("unit eigenvector"))
        })
        .collect()
}
