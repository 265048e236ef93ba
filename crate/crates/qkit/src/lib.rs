//! `qkit`: a gate-based quantum computing toolkit.
//!
//! The crate is organized bottom-up:
//!
//! * [`qstate`]: state vectors, density matrices, observables and Schmidt
//!   decomposition.
//! * [`gates`]: the gate algebra and the kernel that applies a gate to chosen
//!   qubits of a register.
//! * [`circuit`]: circuits, exact execution, sampling, a QASM subset,
//!   topology-aware CNOT rewriting and a trajectory noise model.
//! * [`transforms`]: QFT, phase estimation, the Hadamard test, Grover's
//!   operator, amplitude amplification and search with an unknown number of
//!   solutions.
//! * [`algorithms`]: end-to-end algorithms built on the above.
//! * [`stateprep`], [`tomography`] and [`qec`]: state synthesis, state
//!   estimation and repetition-code experiments.
//!
//! # Conventions
//!
//! Qubit 0 is the leftmost symbol of a ket and the most significant bit of a
//! basis index, so `|q₀q₁…⟩` has index `q₀·2^{n−1} + … + q_{n−1}`. Within a
//! multi-qubit gate matrix the first listed target is likewise the most
//! significant, and controls are listed first. Classical bit strings in
//! histograms put clbit 0 on the left; [`circuit::reverse_key`] converts to
//! the right-to-left order used by QASM toolchains.
//!
//! The state vector, gates and the application kernel are generic over the
//! real scalar ([`scalar::Real`]); everything above them uses `f64`.

pub mod algorithms;
pub mod circuit;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod qec;
pub mod qstate;
pub mod scalar;
pub mod stateprep;
pub mod tomography;
pub mod transforms;

pub use circuit::{Circuit, Metrics, NoiseModel, Op, ShotHistogram};
pub use error::{Error, Result};
pub use gates::{Gate, GateApplication};
pub use linalg::CMatrix;
pub use qstate::{DensityMatrix, Observable, StateVector};
pub use scalar::{c64, Real, C64};

/// Version of the toolkit, embedded in machine-readable reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Deterministic random generator used throughout the crate.
pub type Rng = rand_chacha::ChaCha8Rng;

/// A generator seeded from a 64-bit integer.
pub fn seeded(seed: u64) -> Rng {
    use rand::SeedableRng;
    Rng::seed_from_u64(seed)
}
