//! Gate algebra: named gates, controlled construction, Hamiltonian
//! exponentials, and the strided kernel that applies a `k`-qubit gate to
//! arbitrary qubits of an `n`-qubit state.

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::qstate::{validate_qubits, StateVector};
use crate::scalar::{c64, cast_c, Cplx, Real, C64};
use num_traits::Zero;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

/// A `k`-qubit unitary with a display name.
///
/// The matrix is stored row-major. Within the matrix the first target qubit
/// is the most significant bit of the local index, so a controlled gate has
/// the block form `|0⟩⟨0|⊗I + |1⟩⟨1|⊗U` with its control listed first.
#[derive(Debug, Clone, PartialEq)]
pub struct Gate<T: Real = f64> {
    arity: usize,
    matrix: Vec<Cplx<T>>,
    name: String,
    params: Vec<f64>,
}

/// A gate bound to concrete target qubits (controls first).
#[derive(Debug, Clone, PartialEq)]
pub struct GateApplication<T: Real = f64> {
    pub gate: Gate<T>,
    pub targets: Vec<usize>,
}

impl<T: Real> GateApplication<T> {
    pub fn new(gate: Gate<T>, targets: Vec<usize>) -> Result<Self> {
        if targets.len() != gate.arity() {
            return Err(Error::Invalid(format!(
                "gate '{}' acts on {} qubits but {} targets were given",
                gate.name(),
                gate.arity(),
                targets.len()
            )));
        }
        validate_qubits(&targets, usize::MAX)?;
        Ok(GateApplication { gate, targets })
    }
}

impl<T: Real> Gate<T> {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Parameters the gate was built with (radians), empty for fixed gates.
    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Row-major matrix entries.
    pub fn data(&self) -> &[Cplx<T>] {
        &self.matrix
    }

    /// Converts to another float width.
    pub fn cast<U: Real>(&self) -> Gate<U> {
        Gate {
            arity: self.arity,
            matrix: self.matrix.iter().map(|&z| cast_c(z)).collect(),
            name: self.name.clone(),
            params: self.params.clone(),
        }
    }

    /// Returns a copy with a different display name.
    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }
}

impl Gate<f64> {
    /// Dense matrix view.
    pub fn matrix(&self) -> CMatrix {
        let d = self.dim();
        CMatrix::from_row_slice(d, d, &self.matrix)
    }

    fn from_parts(m: &CMatrix, name: &str, params: Vec<f64>) -> Self {
        let d = m.nrows();
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                data.push(m[(i, j)]);
            }
        }
        Gate { arity: d.trailing_zeros() as usize, matrix: data, name: name.to_string(), params }
    }

    /// `U†`.
    pub fn dagger(&self) -> Self {
        let name = match self.name.as_str() {
            "s" => "sdg".to_string(),
            "sdg" => "s".to_string(),
            "t" => "tdg".to_string(),
            "tdg" => "t".to_string(),
            n if n.ends_with("_dg") => n.trim_end_matches("_dg").to_string(),
            n => format!("{n}_dg"),
        };
        Gate::from_parts(&self.matrix().adjoint(), &name, Vec::new())
    }

    /// Matrix product `self · other` (apply `other` first).
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.arity != other.arity {
            return Err(Error::Dimension { expected: self.dim(), got: other.dim() });
        }
        Ok(Gate::from_parts(&(self.matrix() * other.matrix()), &format!("{}·{}", self.name, other.name), Vec::new()))
    }

    /// `U^k` for a non-negative integer power.
    pub fn pow(&self, k: u64) -> Self {
        let mut acc = linalg::identity(self.dim());
        let mut base = self.matrix();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        Gate::from_parts(&acc, &format!("{}^{k}", self.name), Vec::new())
    }

    /// `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        Gate::from_parts(&linalg::kron(&self.matrix(), &other.matrix()), &format!("{}⊗{}", self.name, other.name), Vec::new())
    }

    /// Equality up to a global phase, using `1 − |Tr(A†B)|/2^k < 1e-8`.
    pub fn equiv(&self, other: &Self) -> bool {
        self.arity == other.arity && linalg::phase_distance(&self.matrix(), &other.matrix()) < 1e-8
    }
}

/// Validates a matrix as unitary (within `1e-8`) with power-of-two dimension.
pub fn gate_from_matrix(m: &CMatrix, name: &str) -> Result<Gate> {
    let d = m.nrows();
    if !m.is_square() || d == 0 || !d.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(d));
    }
    let dev = linalg::unitarity_deviation(m);
    if dev > 1e-8 {
        return Err(Error::NotUnitary(dev));
    }
    Ok(Gate::from_parts(m, name, Vec::new()))
}

/// Permutation gate sending basis state `j` to `perm[j]`.
pub fn permutation_gate(perm: &[usize], name: &str) -> Result<Gate> {
    let d = perm.len();
    let mut seen = vec![false; d];
    for &p in perm {
        if p >= d || seen[p] {
            return Err(Error::Invalid("not a permutation".into()));
        }
        seen[p] = true;
    }
    let mut m = CMatrix::zeros(d, d);
    for (j, &p) in perm.iter().enumerate() {
        m[(p, j)] = c64(1.0, 0.0);
    }
    gate_from_matrix(&m, name)
}

/// Diagonal gate `diag(e^{iθ_0}, …)`.
pub fn diagonal_phase_gate(phases: &[f64], name: &str) -> Result<Gate> {
    let d = phases.len();
    let m = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d, phases.iter().map(|&p| C64::from_polar(1.0, p))));
    gate_from_matrix(&m, name)
}

/// `|0⟩⟨0|⊗I + |1⟩⟨1|⊗U`, one extra (leading) control qubit.
pub fn controlled(u: &Gate) -> Gate {
    let d = u.dim();
    let mut m = CMatrix::identity(2 * d, 2 * d);
    let um = u.matrix();
    for i in 0..d {
        for j in 0..d {
            m[(d + i, d + j)] = um[(i, j)];
        }
    }
    Gate::from_parts(&m, &format!("c{}", u.name()), u.params().to_vec())
}

/// `e^{−i·h·t}` for a Hermitian `h` of power-of-two dimension.
pub fn exp_hermitian_gate(h: &CMatrix, t: f64) -> Result<Gate> {
    let dev = linalg::hermiticity_deviation(h);
    if dev > 1e-10 {
        return Err(Error::NotHermitian(dev));
    }
    let u = linalg::expm_herm(h, t);
    gate_from_matrix(&u, "exp").map(|g| Gate { params: vec![t], ..g })
}

fn m2(a: C64, b: C64, c: C64, d: C64) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[a, b, c, d])
}

fn u3_matrix(theta: f64, phi: f64, lambda: f64) -> CMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    m2(
        c64(c, 0.0),
        -C64::from_polar(s, lambda),
        C64::from_polar(s, phi),
        C64::from_polar(c, phi + lambda),
    )
}

/// Names accepted by [`standard_gate`], with their parameter counts.
pub const STANDARD_GATES: &[(&str, usize)] = &[
    ("id", 0),
    ("x", 0),
    ("y", 0),
    ("z", 0),
    ("h", 0),
    ("s", 0),
    ("sdg", 0),
    ("t", 0),
    ("tdg", 0),
    ("sx", 0),
    ("u1", 1),
    ("p", 1),
    ("r", 1),
    ("u2", 2),
    ("u3", 3),
    ("rx", 1),
    ("ry", 1),
    ("rz", 1),
    ("cx", 0),
    ("cy", 0),
    ("cz", 0),
    ("ch", 0),
    ("cp", 1),
    ("cu1", 1),
    ("crz", 1),
    ("cry", 1),
    ("swap", 0),
    ("ccx", 0),
    ("cswap", 0),
];

/// Builds a named gate.
///
/// Parameterized single-qubit gates follow the IBM convention
/// `u3(θ, φ, λ) = [[cos θ/2, −e^{iλ} sin θ/2], [e^{iφ} sin θ/2, e^{i(φ+λ)} cos θ/2]]`,
/// with `u2(φ, λ) = u3(π/2, φ, λ)` and `u1(λ) = diag(1, e^{iλ})`. Rotations
/// are `r_a(θ) = e^{−iθσ_a/2}`.
pub fn standard_gate(name: &str, params: &[f64]) -> Result<Gate> {
    let lname = name.to_ascii_lowercase();
    let expected = STANDARD_GATES
        .iter()
        .find(|(n, _)| *n == lname)
        .map(|(_, k)| *k)
        .ok_or_else(|| Error::UnknownGate(name.to_string()))?;
    if params.len() != expected {
        return Err(Error::ParamCount { name: lname, expected, got: params.len() });
    }
    let o = c64(1.0, 0.0);
    let z = c64(0.0, 0.0);
    let i = c64(0.0, 1.0);
    let r = c64(FRAC_1_SQRT_2, 0.0);
    let m = match lname.as_str() {
        "id" => linalg::identity(2),
        "x" => m2(z, o, o, z),
        "y" => m2(z, -i, i, z),
        "z" => m2(o, z, z, -o),
        "h" => m2(r, r, r, -r),
        "s" => m2(o, z, z, i),
        "sdg" => m2(o, z, z, -i),
        "t" => m2(o, z, z, C64::from_polar(1.0, FRAC_PI_4)),
        "tdg" => m2(o, z, z, C64::from_polar(1.0, -FRAC_PI_4)),
        "sx" => m2(c64(0.5, 0.5), c64(0.5, -0.5), c64(0.5, -0.5), c64(0.5, 0.5)),
        "u1" | "p" | "r" => m2(o, z, z, C64::from_polar(1.0, params[0])),
        "u2" => u3_matrix(FRAC_PI_2, params[0], params[1]),
        "u3" => u3_matrix(params[0], params[1], params[2]),
        "rx" => {
            let (c, s) = ((params[0] / 2.0).cos(), (params[0] / 2.0).sin());
            m2(c64(c, 0.0), c64(0.0, -s), c64(0.0, -s), c64(c, 0.0))
        }
        "ry" => {
            let (c, s) = ((params[0] / 2.0).cos(), (params[0] / 2.0).sin());
            m2(c64(c, 0.0), c64(-s, 0.0), c64(s, 0.0), c64(c, 0.0))
        }
        "rz" => m2(C64::from_polar(1.0, -params[0] / 2.0), z, z, C64::from_polar(1.0, params[0] / 2.0)),
        "cx" => return Ok(controlled(&standard_gate("x", &[])?).renamed("cx")),
        "cy" => return Ok(controlled(&standard_gate("y", &[])?).renamed("cy")),
        "cz" => return Ok(controlled(&standard_gate("z", &[])?).renamed("cz")),
        "ch" => return Ok(controlled(&standard_gate("h", &[])?).renamed("ch")),
        "cp" | "cu1" => return Ok(controlled(&standard_gate("p", params)?).renamed(lname)),
        "crz" => return Ok(controlled(&standard_gate("rz", params)?).renamed("crz")),
        "cry" => return Ok(controlled(&standard_gate("ry", params)?).renamed("cry")),
        "swap" => {
            let mut m = CMatrix::zeros(4, 4);
            m[(0, 0)] = o;
            m[(1, 2)] = o;
            m[(2, 1)] = o;
            m[(3, 3)] = o;
            m
        }
        "ccx" => return Ok(controlled(&standard_gate("cx", &[])?).renamed("ccx")),
        "cswap" => return Ok(controlled(&standard_gate("swap", &[])?).renamed("cswap")),
        _ => unreachable!("name validated above"),
    };
    Ok(Gate::from_parts(&m, &lname, params.to_vec()))
}

/// Shorthand for fixed gates whose name is known to be valid.
pub fn named(name: &str) -> Gate {
    standard_gate(name, &[]).expect("known fixed gate")
}

/// Shorthand for parameterized gates whose name and arity are known valid.
pub fn param(name: &str, params: &[f64]) -> Gate {
    standard_gate(name, params).expect("known parameterized gate")
}

/// Applies `gate` to `targets` of `amps` (an `n`-qubit register) in place.
///
/// The kernel enumerates every assignment of the non-target bits, gathers the
/// `2^k` amplitudes that differ only in target bits, multiplies by the gate
/// matrix and scatters the result back. The full `2^n` operator is never
/// formed.
pub fn apply_in_place<T: Real>(amps: &mut [Cplx<T>], n: usize, gate: &Gate<T>, targets: &[usize]) -> Result<()> {
    let k = gate.arity();
    if targets.len() != k {
        return Err(Error::Invalid(format!("gate '{}' needs {k} targets, got {}", gate.name(), targets.len())));
    }
    validate_qubits(targets, n)?;
    if amps.len() != 1 << n {
        return Err(Error::Dimension { expected: 1 << n, got: amps.len() });
    }
    let d = 1usize << k;
    // Offset of each local basis state: target[0] is the most significant
    // local bit.
    let offsets: Vec<usize> = (0..d)
        .map(|l| {
            targets
                .iter()
                .enumerate()
                .filter(|(j, _)| (l >> (k - 1 - j)) & 1 == 1)
                .map(|(_, &q)| 1usize << (n - 1 - q))
                .sum()
        })
        .collect();
    let mut positions: Vec<usize> = targets.iter().map(|&q| n - 1 - q).collect();
    positions.sort_unstable();
    let m = gate.data();
    let mut buf = vec![Cplx::<T>::zero(); d];
    for r in 0..(1usize << (n - k)) {
        // Spread r over the non-target bit positions.
        let mut base = r;
        for &p in &positions {
            let low = base & ((1 << p) - 1);
            base = ((base >> p) << (p + 1)) | low;
        }
        for (b, &off) in buf.iter_mut().zip(&offsets) {
            *b = amps[base + off];
        }
        for (row, &off) in offsets.iter().enumerate() {
            let mrow = &m[row * d..(row + 1) * d];
            let mut acc = Cplx::<T>::zero();
            for (x, y) in mrow.iter().zip(&buf) {
                acc = acc + *x * *y;
            }
            amps[base + off] = acc;
        }
    }
    Ok(())
}

/// Returns `U|ψ⟩` with `U` embedded at the application's targets.
pub fn apply<T: Real>(s: &StateVector<T>, app: &GateApplication<T>) -> Result<StateVector<T>> {
    let mut out = s.clone();
    apply_in_place(out.amps_mut(), s.n_qubits(), &app.gate, &app.targets)?;
    Ok(out)
}

/// Builds the full `2^n` operator of a gate placed at `targets` by explicit
/// Kronecker embedding. Intended as a reference oracle for small `n`.
pub fn embed(gate: &Gate, targets: &[usize], n: usize) -> Result<CMatrix> {
    validate_qubits(targets, n)?;
    let dim = 1usize << n;
    let mut full = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut amps = vec![c64(0.0, 0.0); dim];
        amps[col] = c64(1.0, 0.0);
        apply_in_place(&mut amps, n, gate, targets)?;
        for (row, a) in amps.into_iter().enumerate() {
            full[(row, col)] = a;
        }
    }
    Ok(full)
}
