//! Finite groups given by composition tables, their regular representation
//! and matrix elements estimated with the Hadamard test.

use crate::error::{Error, Result};
use crate::gates::{permutation_gate, Gate};
use crate::qstate::StateVector;
use crate::transforms::{hadamard_test, Part};
use rand::Rng;
use serde::Serialize;

/// A group of order `N` with elements `0…N−1` and `table[a][b] = a·b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
}

impl FiniteGroup {
    /// Checks closure, associativity, a two-sided identity and inverses.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::Invalid("a group has at least one element".into()));
        }
        for row in &table {
            if row.len() != n {
                return Err(Error::Dimension { expected: n, got: row.len() });
            }
            if let Some(&v) = row.iter().find(|&&v| v >= n) {
                return Err(Error::Invalid(format!("product {v} is not an element (closure)")));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::Invalid(format!("({a}·{b})·{c} ≠ {a}·({b}·{c})")));
                    }
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
            .ok_or_else(|| Error::Invalid("no identity element".into()))?;
        for a in 0..n {
            if !(0..n).any(|b| table[a][b] == identity && table[b][a] == identity) {
                return Err(Error::Invalid(format!("element {a} has no inverse")));
            }
        }
        Ok(FiniteGroup { table, identity })
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn compose(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order()).find(|&b| self.table[a][b] == self.identity).expect("validated group")
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }
}

/// Cyclic group `A_n`: elements `0…n−1` under addition mod `n`.
pub fn a_n(n: usize) -> Result<FiniteGroup> {
    FiniteGroup::new((0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect())
}

/// The six permutations of three symbols, ordered
/// `[123], [231], [312], [213], [132], [321]`.
pub const S3_ELEMENTS: [[usize; 3]; 6] = [[1, 2, 3], [2, 3, 1], [3, 1, 2], [2, 1, 3], [1, 3, 2], [3, 2, 1]];

/// Symmetric group `S₃` with the ordering of [`S3_ELEMENTS`] and product
/// `(a·b)[i] = b[a[i]]`.
pub fn s3() -> FiniteGroup {
    let idx = |p: [usize; 3]| S3_ELEMENTS.iter().position(|&q| q == p).expect("all permutations listed");
    let table = S3_ELEMENTS
        .iter()
        .map(|a| S3_ELEMENTS.iter().map(|b| idx([b[a[0] - 1], b[a[1] - 1], b[a[2] - 1]])).collect())
        .collect();
    FiniteGroup::new(table).expect("S3 is a group")
}

/// Regular representation `R_ij(g_k) = [g_i = g_k·g_j]` as a permutation
/// gate. The dimension is padded to a power of two (at least 2) and the
/// extra basis states are left fixed.
pub fn regular_representation(g: &FiniteGroup, element: usize) -> Result<Gate> {
    let n = g.order();
    if element >= n {
        return Err(Error::Invalid(format!("element {element} not in a group of order {n}")));
    }
    let d = n.next_power_of_two().max(2);
    // The gate maps column j to row g_k·g_j.
    let perm: Vec<usize> = (0..d).map(|j| if j < n { g.compose(element, j) } else { j }).collect();
    permutation_gate(&perm, &format!("R{element}"))
}

/// Estimates the chosen part of `⟨ψ|R(g_k)|ψ⟩` with a Hadamard test.
pub fn rep_matrix_element<R: Rng + ?Sized>(
    g: &FiniteGroup,
    element: usize,
    psi: &StateVector,
    part: Part,
    shots: Option<u64>,
    rng: &mut R,
) -> Result<f64> {
    let u = regular_representation(g, element)?;
    Ok(hadamard_test(&u, psi, part, shots, rng)?.estimate)
}
