use super::{Circuit, Op};
use crate::error::{Error, Result};
use crate::gates::{apply_in_place, gate_from_matrix, Gate, GateApplication};
use crate::linalg::{self, CMatrix};
use crate::qstate::{qubit_value, StateVector};
use crate::scalar::{c64, C64};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

/// Trajectory noise parameters.
///
/// * `over_rotation_sigma`: every gate `U` is followed by `e^{−iδφ·G}` with
///   `δφ ~ N(0, σ)` and `G` the gate's own rotation generator (see
///   [`gate_generator`]).
/// * `bitflip_p`: after every gate each touched qubit flips with this
///   probability.
/// * `idle_flip_p`: each `id` gate (an explicit idle timestep) flips its
///   qubit with this probability.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    pub over_rotation_sigma: f64,
    pub bitflip_p: f64,
    pub idle_flip_p: f64,
}

impl NoiseModel {
    pub fn new(over_rotation_sigma: f64, bitflip_p: f64, idle_flip_p: f64) -> Result<Self> {
        let m = NoiseModel { over_rotation_sigma, bitflip_p, idle_flip_p };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let prob_ok = |p: f64| (0.0..=1.0).contains(&p);
        if !(self.over_rotation_sigma >= 0.0 && self.over_rotation_sigma.is_finite()) {
            return Err(Error::Invalid("over_rotation_sigma must be a finite non-negative number".into()));
        }
        if !prob_ok(self.bitflip_p) || !prob_ok(self.idle_flip_p) {
            return Err(Error::Invalid("noise probabilities must lie in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn is_noiseless(&self) -> bool {
        self.over_rotation_sigma == 0.0 && self.bitflip_p == 0.0 && self.idle_flip_p == 0.0
    }
}

/// Rotation generator `G` of a gate, scaled so its eigenvalues span `[−1, 1]`.
///
/// Writing `U = e^{iA}` with the eigenphases of `U` unwrapped onto the shortest
/// arc of the unit circle, `G = (A − c)/(w/2)` where `c` is the arc midpoint and
/// `w` its width. For a phase gate this is `±Z`, for `X` or `H` it is the gate
/// itself, and for a controlled gate it acts only in the control-active block.
/// An over-rotation `e^{−iδφ·G}` thus turns a Pauli-like gate by an extra
/// angle `δφ`, so a basis-changing gate errs with probability `sin²δφ ≈ δφ²`.
/// The identity has no axis of its own; it is assigned `Z` on its first qubit.
pub fn gate_generator(g: &Gate) -> CMatrix {
    let u = g.matrix();
    let d = u.nrows();
    let (phases, vecs) = linalg::eig_unitary(&u);
    let mut sorted = phases.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Place the branch cut in the largest gap between neighbouring phases.
    let tau = std::f64::consts::TAU;
    let mut cut_after = sorted.len() - 1;
    let mut best_gap = sorted[0] + tau - sorted[sorted.len() - 1];
    for i in 0..sorted.len() - 1 {
        let gap = sorted[i + 1] - sorted[i];
        if gap > best_gap {
            best_gap = gap;
            cut_after = i;
        }
    }
    let start = sorted[(cut_after + 1) % sorted.len()];
    let unwrap = |p: f64| {
        let mut q = p;
        while q < start - 1e-12 {
            q += tau;
        }
        q
    };
    let un: Vec<f64> = phases.iter().map(|&p| unwrap(p)).collect();
    let lo = un.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = un.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = hi - lo;
    if width < 1e-9 {
        let mut zpart = linalg::pauli('Z');
        for _ in 1..g.arity() {
            zpart = linalg::kron(&zpart, &linalg::identity(2));
        }
        return zpart;
    }
    let mid = 0.5 * (hi + lo);
    let diag = nalgebra::DVector::from_iterator(d, un.iter().map(|&p| c64((p - mid) / (0.5 * width), 0.0)));
    let gm = &vecs * CMatrix::from_diagonal(&diag) * vecs.adjoint();
    (&gm + gm.adjoint()).scale(0.5)
}

/// Per-op generator cache so each trajectory only exponentiates.
pub(crate) struct Generators {
    per_op: Vec<Option<(Vec<f64>, CMatrix)>>,
}

impl Generators {
    pub(crate) fn for_circuit(c: &Circuit) -> Self {
        let per_op = c
            .ops()
            .iter()
            .map(|op| match op {
                Op::Gate(app) => {
                    let gm = gate_generator(&app.gate);
                    let (vals, vecs) = linalg::eigh_desc(&gm);
                    Some((vals, vecs))
                }
                _ => None,
            })
            .collect();
        Generators { per_op }
    }

    fn over_rotation(&self, op_index: usize, delta: f64) -> Option<Gate> {
        let (vals, vecs) = self.per_op[op_index].as_ref()?;
        let diag = nalgebra::DVector::from_iterator(vals.len(), vals.iter().map(|&l| C64::from_polar(1.0, -l * delta)));
        let u = vecs * CMatrix::from_diagonal(&diag) * vecs.adjoint();
        gate_from_matrix(&u, "over_rotation").ok()
    }
}

fn flip(s: &mut StateVector, q: usize) {
    let n = s.n_qubits();
    let mask = 1usize << (n - 1 - q);
    let amps = s.amps_mut();
    for i in 0..amps.len() {
        if i & mask == 0 {
            amps.swap(i, i | mask);
        }
    }
}

fn collapse<R: Rng + ?Sized>(s: &mut StateVector, q: usize, rng: &mut R) -> Result<usize> {
    let p1 = s.subset_probability(&[q], 1);
    let bit = usize::from(rng.random::<f64>() < p1);
    let (_, post) = s.project(&[q], bit)?;
    *s = post;
    Ok(bit)
}

/// Applies gate `k` of a circuit followed by its noise channels.
fn noisy_gate<R: Rng + ?Sized>(
    s: &mut StateVector,
    k: usize,
    app: &GateApplication,
    model: &NoiseModel,
    gens: &Generators,
    normal: Option<&Normal<f64>>,
    rng: &mut R,
) -> Result<()> {
    let n = s.n_qubits();
    apply_in_place(s.amps_mut(), n, &app.gate, &app.targets)?;
    if let Some(dist) = normal {
        let delta = dist.sample(rng);
        if let Some(err) = gens.over_rotation(k, delta) {
            apply_in_place(s.amps_mut(), n, &err, &app.targets)?;
        }
    }
    if app.gate.name() == "id" && model.idle_flip_p > 0.0 {
        for &q in &app.targets {
            if rng.random::<f64>() < model.idle_flip_p {
                flip(s, q);
            }
        }
    }
    if model.bitflip_p > 0.0 {
        for &q in &app.targets {
            if rng.random::<f64>() < model.bitflip_p {
                flip(s, q);
            }
        }
    }
    Ok(())
}

fn normal_for(model: &NoiseModel) -> Result<Option<Normal<f64>>> {
    if model.over_rotation_sigma > 0.0 {
        Ok(Some(Normal::new(0.0, model.over_rotation_sigma).map_err(|e| Error::Invalid(e.to_string()))?))
    } else {
        Ok(None)
    }
}

/// Final state of one noisy run of a circuit made of gates and barriers.
pub(crate) fn noisy_final_state<R: Rng + ?Sized>(
    c: &Circuit,
    model: &NoiseModel,
    gens: &Generators,
    rng: &mut R,
) -> Result<StateVector> {
    let mut s = StateVector::zero(c.n_qubits());
    let normal = normal_for(model)?;
    for (k, op) in c.ops().iter().enumerate() {
        match op {
            Op::Gate(app) => noisy_gate(&mut s, k, app, model, gens, normal.as_ref(), rng)?,
            Op::Barrier(_) => {}
            _ => return Err(Error::Invalid("expected a circuit without measurement or reset".into())),
        }
    }
    Ok(s)
}

/// Runs one noisy shot and returns the classical bit string.
pub(crate) fn run_trajectory<R: Rng + ?Sized>(
    c: &Circuit,
    model: &NoiseModel,
    gens: &Generators,
    meas: &[(usize, usize)],
    width: usize,
    implicit: bool,
    rng: &mut R,
) -> Result<String> {
    let n = c.n_qubits();
    let mut s = StateVector::zero(n);
    let mut bits = vec!['0'; width];
    let normal = normal_for(model)?;
    for (k, op) in c.ops().iter().enumerate() {
        match op {
            Op::Gate(app) => noisy_gate(&mut s, k, app, model, gens, normal.as_ref(), rng)?,
            Op::Measure { qubit, clbit } => {
                let b = collapse(&mut s, *qubit, rng)?;
                bits[*clbit] = if b == 1 { '1' } else { '0' };
            }
            Op::Reset(q) => {
                if collapse(&mut s, *q, rng)? == 1 {
                    flip(&mut s, *q);
                }
            }
            Op::Barrier(_) => {}
        }
    }
    if implicit {
        let idx = crate::qstate::sample_index(&s.probabilities(), rng);
        for (q, cl) in meas {
            bits[*cl] = if qubit_value(idx, n, *q) == 1 { '1' } else { '0' };
        }
    }
    Ok(bits.into_iter().collect())
}

/// Result of [`idle_decoherence_experiment`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceReport {
    /// Fraction of shots in which each qubit still reads 1.
    pub per_qubit: Vec<f64>,
    /// Fraction of shots in which every qubit still reads 1.
    pub combined: f64,
}

/// Prepares every qubit in `|1⟩`, idles for `idle_steps` timesteps (one `id`
/// gate per qubit per step) and measures.
pub fn idle_decoherence_experiment<R: Rng + ?Sized>(
    n_qubits: usize,
    idle_steps: usize,
    noise: &NoiseModel,
    shots: u64,
    rng: &mut R,
) -> Result<CoherenceReport> {
    noise.validate()?;
    let mut c = Circuit::new(n_qubits, n_qubits);
    for q in 0..n_qubits {
        c.x(q);
    }
    for _ in 0..idle_steps {
        for q in 0..n_qubits {
            c.g("id", &[], &[q]);
        }
    }
    c.measure_all()?;
    // Preparation and readout are taken as ideal so only idling decoheres.
    let idle_only = NoiseModel { idle_flip_p: noise.idle_flip_p, ..Default::default() };
    let gens = Generators { per_op: vec![None; c.ops().len()] };
    let meas = c.measurements();
    let mut ones = vec![0u64; n_qubits];
    let mut all = 0u64;
    for _ in 0..shots {
        let bits = run_trajectory(&c, &idle_only, &gens, &meas, n_qubits, false, rng)?;
        let mut every = true;
        for (q, ch) in bits.chars().enumerate() {
            if ch == '1' {
                ones[q] += 1;
            } else {
                every = false;
            }
        }
        all += every as u64;
    }
    Ok(CoherenceReport {
        per_qubit: ones.iter().map(|&k| k as f64 / shots as f64).collect(),
        combined: all as f64 / shots as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{named, param};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: &CMatrix, b: &CMatrix) -> bool {
        linalg::max_abs_diff(a, b) < 1e-9 || linalg::max_abs_diff(a, &(-b)) < 1e-9
    }

    #[test]
    fn generators_of_standard_gates() {
        assert!(close(&gate_generator(&named("x")), &linalg::pauli('X')));
        assert!(close(&gate_generator(&named("z")), &linalg::pauli('Z')));
        assert!(close(&gate_generator(&named("t")), &linalg::pauli('Z')));
        assert!(close(&gate_generator(&param("u1", &[0.3])), &linalg::pauli('Z')));
        assert!(close(&gate_generator(&named("h")), &named("h").matrix()));
        assert!(close(&gate_generator(&named("id")), &linalg::pauli('Z')));
        // A phase arc straddling ±π must not be unwrapped the long way round.
        let g = gate_generator(&param("rz", &[std::f64::consts::PI * 0.98]));
        assert!(close(&g, &linalg::pauli('Z')));
    }

    #[test]
    fn cnot_generator_lives_in_control_block() {
        let g = gate_generator(&named("cx"));
        let p0 = linalg::kron(&linalg::from_real(2, 2, &[1., 0., 0., 0.]), &linalg::identity(2));
        // Restricted to control |0⟩ the generator is a multiple of identity.
        let block = &p0 * &g * &p0;
        assert!((block[(0, 1)]).norm() < 1e-9 && (block[(0, 0)] - block[(1, 1)]).norm() < 1e-9);
    }

    #[test]
    fn idle_noise_off_keeps_ones() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = idle_decoherence_experiment(3, 5, &NoiseModel::default(), 200, &mut rng).unwrap();
        assert!(r.per_qubit.iter().all(|&f| f == 1.0));
        assert_eq!(r.combined, 1.0);
    }

    #[test]
    fn validation() {
        assert!(NoiseModel::new(-0.1, 0.0, 0.0).is_err());
        assert!(NoiseModel::new(0.0, 1.5, 0.0).is_err());
        assert!(NoiseModel::new(0.1, 0.2, 0.3).is_ok());
    }

    #[test]
    fn bitflip_noise_leaks_into_odd_parity() {
        let mut c = Circuit::new(2, 2);
        c.h(0).cx(0, 1).measure_all().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let noise = NoiseModel::new(0.0, 0.05, 0.0).unwrap();
        let h = c.sample(4000, Some(&noise), &mut rng).unwrap();
        let odd = h.frequency("01") + h.frequency("10");
        assert!(odd > 0.05, "odd-parity mass {odd}");
    }
}
