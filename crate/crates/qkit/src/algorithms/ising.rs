//! Transverse-field Ising chain: exact ground energy and a variational
//! solver with gradient relaxation.

use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::qstate::{qubit_value, sample_index};
use crate::scalar::{c64, C64};
use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// `H = −Σ_i Z_i Z_{i+1} − h Σ_i X_i`.
///
/// Bonds run over `i = 0…n−2`, plus `(n−1, 0)` when periodic. For `n = 2`
/// the periodic chain therefore counts the single pair twice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsingModel {
    pub n_spins: usize,
    pub h: f64,
    pub periodic: bool,
}

impl IsingModel {
    pub fn new(n_spins: usize, h: f64, periodic: bool) -> Result<Self> {
        if n_spins < 2 {
            return Err(Error::Invalid("the chain needs at least two spins".into()));
        }
        if n_spins > 16 {
            return Err(Error::TooLarge(format!("{} spins", n_spins)));
        }
        if !h.is_finite() {
            return Err(Error::Invalid("field must be finite".into()));
        }
        Ok(IsingModel { n_spins, h, periodic })
    }

    fn bonds(&self) -> Vec<(usize, usize)> {
        let n = self.n_spins;
        let mut b: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        if self.periodic {
            b.push((n - 1, 0));
        }
        b
    }

    /// Diagonal `−Σ Z_i Z_j` part for every basis state.
    fn zz_diagonal(&self) -> Vec<f64> {
        let n = self.n_spins;
        let bonds = self.bonds();
        (0..1usize << n)
            .map(|z| {
                -bonds
                    .iter()
                    .map(|&(a, b)| if qubit_value(z, n, a) == qubit_value(z, n, b) { 1.0 } else { -1.0 })
                    .sum::<f64>()
            })
            .collect()
    }

    /// `H·ψ` without forming `H`.
    fn apply(&self, diag: &[f64], psi: &[C64], out: &mut [C64]) {
        let n = self.n_spins;
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = psi[i] * diag[i];
            for q in 0..n {
                acc -= psi[i ^ (1 << (n - 1 - q))] * self.h;
            }
            *o = acc;
        }
    }
}

/// Dense Hamiltonian (for small chains and tests).
pub fn ising_hamiltonian(m: &IsingModel) -> CMatrix {
    let n = m.n_spins;
    let d = 1usize << n;
    let diag = m.zz_diagonal();
    CMatrix::from_fn(d, d, |i, j| {
        if i == j {
            c64(diag[i], 0.0)
        } else if (i ^ j).count_ones() == 1 {
            c64(-m.h, 0.0)
        } else {
            c64(0.0, 0.0)
        }
    })
}

/// Lowest eigenvalue of `H`.
///
/// `H` is real symmetric. Up to 8 spins it is diagonalized densely; larger
/// chains (up to 12) use a Lanczos iteration with full reorthogonalization.
pub fn exact_ising_ground(m: &IsingModel) -> Result<f64> {
    let n = m.n_spins;
    if n > 12 {
        return Err(Error::TooLarge(format!("{} spins", n)));
    }
    let d = 1usize << n;
    let diag = m.zz_diagonal();
    if n <= 8 {
        let h = DMatrix::from_fn(d, d, |i, j| {
            if i == j {
                diag[i]
            } else if (i ^ j).count_ones() == 1 {
                -m.h
            } else {
                0.0
            }
        });
        return Ok(h.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min));
    }
    let steps = d.min(160);
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(steps);
    // A start vector with weight on every basis state.
    let mut v: Vec<C64> = (0..d).map(|i| c64(1.0 + 0.01 * ((i * 7919) % 101) as f64, 0.0)).collect();
    let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= nv);
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    let mut w = vec![c64(0.0, 0.0); d];
    for k in 0..steps {
        m.apply(&diag, &v, &mut w);
        let a: f64 = v.iter().zip(&w).map(|(x, y)| (x.conj() * y).re).sum();
        alpha.push(a);
        basis.push(v.clone());
        for b in &basis {
            let proj: C64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
            w.iter_mut().zip(b).for_each(|(y, x)| *y -= x * proj);
        }
        let bn = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if bn < 1e-12 || k + 1 == steps {
            break;
        }
        beta.push(bn);
        v = w.iter().map(|z| z / bn).collect();
    }
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j || j + 1 == i {
            beta[i.min(j)]
        } else {
            0.0
        }
    });
    Ok(t.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Variational form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnsatzKind {
    /// `⊗_i R_y(θ_i)|0⟩`.
    Product,
    /// `cos(θ₀/2)|P⟩ + e^{iφ₀} sin(θ₀/2) X^{⊗n}|P⟩` with `|P⟩` the product
    /// state, normalized. Mixing a product state with its globally flipped
    /// copy captures the cat-like correlations of the ordered phase.
    Entangled,
}

/// Optimizer settings for [`vqe_ising`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VqeConfig {
    /// Initial relaxation step `τ₀`.
    pub tau0: f64,
    /// Central-difference step.
    pub fd_step: f64,
    /// Convergence threshold on `max |∂E/∂θ|`.
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Independent random starts; the best result is kept.
    pub restarts: usize,
}

impl Default for VqeConfig {
    fn default() -> Self {
        VqeConfig { tau0: 0.1, fd_step: 1e-3, grad_tol: 1e-4, max_iters: 5000, restarts: 6 }
    }
}

/// Result of [`vqe_ising`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VqeResult {
    pub energy: f64,
    /// `θ₁…θ_n`, followed by `θ₀, φ₀` for the entangled form.
    pub params: Vec<f64>,
    /// Mean `⟨X_i⟩`.
    pub magnetization_x: f64,
    /// Mean `|⟨Z_i⟩|`.
    pub magnetization_z: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Energies of the accepted steps of the winning run.
    pub trace: Vec<f64>,
    /// Shot-based energy estimate at the optimum, if requested.
    pub sampled_energy: Option<f64>,
}

/// Normalized ansatz state.
pub fn ansatz_state(n: usize, kind: AnsatzKind, params: &[f64]) -> Vec<C64> {
    let d = 1usize << n;
    let prod: Vec<C64> = (0..d)
        .map(|z| {
            let mut a = 1.0;
            for (q, t) in params.iter().take(n).enumerate() {
                a *= if qubit_value(z, n, q) == 1 { (t / 2.0).sin() } else { (t / 2.0).cos() };
            }
            c64(a, 0.0)
        })
        .collect();
    match kind {
        AnsatzKind::Product => prod,
        AnsatzKind::Entangled => {
            let (t0, p0) = (params[n], params[n + 1]);
            let (c, s) = ((t0 / 2.0).cos(), C64::from_polar((t0 / 2.0).sin(), p0));
            let mut v: Vec<C64> = (0..d).map(|z| prod[z] * c + prod[(d - 1) ^ z] * s).collect();
            let nv = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|z| *z /= nv);
            v
        }
    }
}

fn energy_of(m: &IsingModel, diag: &[f64], psi: &[C64]) -> f64 {
    let mut w = vec![c64(0.0, 0.0); psi.len()];
    m.apply(diag, psi, &mut w);
    psi.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum()
}

/// Shot-based energy: a Z-basis run gives each `⟨Z_iZ_j⟩` from
/// `P(q_i = q_j) − P(q_i ≠ q_j)`, an X-basis run gives each `⟨X_i⟩` from
/// `P(q_i = 0) − P(q_i = 1)`.
pub fn sampled_energy<R: Rng + ?Sized>(m: &IsingModel, psi: &[C64], shots: u64, rng: &mut R) -> f64 {
    let n = m.n_spins;
    let pz: Vec<f64> = psi.iter().map(|a| a.norm_sqr()).collect();
    let mut xs = psi.to_vec();
    let h = crate::gates::named("h");
    for q in 0..n {
        crate::gates::apply_in_place(&mut xs, n, &h, &[q]).expect("valid target");
    }
    let px: Vec<f64> = xs.iter().map(|a| a.norm_sqr()).collect();
    let bonds = m.bonds();
    let mut ezz = 0.0;
    let mut ex = 0.0;
    for _ in 0..shots {
        let z = sample_index(&pz, rng);
        ezz += bonds.iter().map(|&(a, b)| if qubit_value(z, n, a) == qubit_value(z, n, b) { 1.0 } else { -1.0 }).sum::<f64>();
        let x = sample_index(&px, rng);
        ex += (0..n).map(|q| if qubit_value(x, n, q) == 0 { 1.0 } else { -1.0 }).sum::<f64>();
    }
    -(ezz + m.h * ex) / shots as f64
}

/// Variational ground state by gradient relaxation `θ ← θ − τ∇E`.
///
/// The gradient is taken by central differences. A step that raises the
/// energy is rejected and halves `τ`; an accepted step lets `τ` recover by
/// 10 % up to `τ₀`. The run stops when `max |∂E/∂θ| < grad_tol`.
pub fn vqe_ising<R: Rng + ?Sized>(
    m: &IsingModel,
    kind: AnsatzKind,
    cfg: &VqeConfig,
    shots: Option<u64>,
    rng: &mut R,
) -> Result<VqeResult> {
    if m.n_spins > 12 {
        return Err(Error::TooLarge(format!("{} spins", m.n_spins)));
    }
    if cfg.tau0 <= 0.0 || cfg.fd_step <= 0.0 || cfg.restarts == 0 {
        return Err(Error::Invalid("optimizer settings must be positive".into()));
    }
    let n = m.n_spins;
    let diag = m.zz_diagonal();
    let np = match kind {
        AnsatzKind::Product => n,
        AnsatzKind::Entangled => n + 2,
    };
    let energy = |p: &[f64]| energy_of(m, &diag, &ansatz_state(n, kind, p));
    let mut best: Option<VqeResult> = None;
    for _ in 0..cfg.restarts {
        let mut p: Vec<f64> = (0..np).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect();
        let mut e = energy(&p);
        let mut trace = vec![e];
        let mut tau = cfg.tau0;
        let mut converged = false;
        let mut it = 0;
        while it < cfg.max_iters {
            it += 1;
            let grad: Vec<f64> = (0..np)
                .map(|k| {
                    let mut a = p.clone();
                    let mut b = p.clone();
                    a[k] += cfg.fd_step;
                    b[k] -= cfg.fd_step;
                    (energy(&a) - energy(&b)) / (2.0 * cfg.fd_step)
                })
                .collect();
            if grad.iter().fold(0.0_f64, |acc, g| acc.max(g.abs())) < cfg.grad_tol {
                converged = true;
                break;
            }
            loop {
                let trial: Vec<f64> = p.iter().zip(&grad).map(|(x, g)| x - tau * g).collect();
                let et = energy(&trial);
                if et <= e {
                    p = trial;
                    e = et;
                    trace.push(e);
                    tau = (tau * 1.1).min(cfg.tau0);
                    break;
                }
                tau /= 2.0;
                if tau < 1e-12 {
                    break;
                }
            }
            if tau < 1e-12 {
                converged = true;
                break;
            }
        }
        if best.as_ref().is_none_or(|b| e < b.energy) {
            let psi = ansatz_state(n, kind, &p);
            let mx = (0..n)
                .map(|q| {
                    (0..psi.len()).map(|z| (psi[z].conj() * psi[z ^ (1 << (n - 1 - q))]).re).sum::<f64>()
                })
                .sum::<f64>()
                / n as f64;
            let mz = (0..n)
                .map(|q| {
                    psi.iter().enumerate().map(|(z, a)| a.norm_sqr() * if qubit_value(z, n, q) == 0 { 1.0 } else { -1.0 }).sum::<f64>().abs()
                })
                .sum::<f64>()
                / n as f64;
            best = Some(VqeResult {
                energy: e,
                params: p,
                magnetization_x: mx,
                magnetization_z: mz,
                iterations: it,
                converged,
                trace,
                sampled_energy: None,
            });
        }
    }
    let mut r = best.expect("at least one restart");
    if let Some(s) = shots {
        if s == 0 {
            return Err(Error::Invalid("shots must be positive".into()));
        }
        let psi = ansatz_state(n, kind, &r.params);
        r.sampled_energy = Some(sampled_energy(m, &psi, s, rng));
    }
    Ok(r)
}
