use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};

/// A Hermitian operator with a display label.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
    label: String,
}

impl Observable {
    /// Wraps a matrix after checking `M = M†` within `1e-10`.
    pub fn new(matrix: CMatrix, label: impl Into<String>) -> Result<Self> {
        let dev = linalg::hermiticity_deviation(&matrix);
        if dev > 1e-10 {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Observable { matrix, label: label.into() })
    }

    /// Tensor product of Pauli operators, e.g. `"ZZI"`.
    pub fn pauli(s: &str) -> Self {
        Observable { matrix: linalg::pauli_string(s), label: s.to_string() }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}
