use super::{Circuit, Op};
use crate::error::{Error, Result};
use crate::gates::Gate;
use crate::stateprep::{synth_two_qubit_gate, zyz};
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

/// Directed CNOT connectivity of a device.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    n_qubits: usize,
    cnot_edges: BTreeSet<(usize, usize)>,
}

impl Topology {
    /// Edges are `(control, target)` pairs on which a native CNOT exists.
    pub fn new(n_qubits: usize, edges: &[(usize, usize)]) -> Result<Self> {
        for &(a, b) in edges {
            if a >= n_qubits || b >= n_qubits {
                return Err(Error::QubitOutOfRange { index: a.max(b), n: n_qubits });
            }
            if a == b {
                return Err(Error::Invalid(format!("self-loop on qubit {a}")));
            }
        }
        Ok(Topology { n_qubits, cnot_edges: edges.iter().copied().collect() })
    }

    /// The five-qubit IBM QX4 layout.
    pub fn ibmqx4() -> Self {
        Topology::new(5, &[(1, 0), (2, 0), (2, 1), (3, 2), (3, 4), (2, 4)]).expect("static layout")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn edges(&self) -> impl Iterator<Item = &(usize, usize)> {
        self.cnot_edges.iter()
    }

    pub fn allows(&self, control: usize, target: usize) -> bool {
        self.cnot_edges.contains(&(control, target))
    }

    fn linked(&self, a: usize, b: usize) -> bool {
        self.allows(a, b) || self.allows(b, a)
    }
}

struct Out {
    c: Circuit,
}

impl Out {
    fn one(&mut self, name: &str, params: &[f64], q: usize) -> Result<()> {
        self.c.add(name, params, &[q])?;
        Ok(())
    }

    /// A CNOT over a direct link, flipped with Hadamards when only the
    /// reverse direction exists.
    fn cx_adjacent(&mut self, t: &Topology, a: usize, b: usize) -> Result<()> {
        if t.allows(a, b) {
            self.c.add("cx", &[], &[a, b])?;
        } else {
            for q in [a, b] {
                self.one("h", &[], q)?;
            }
            self.c.add("cx", &[], &[b, a])?;
            for q in [a, b] {
                self.one("h", &[], q)?;
            }
        }
        Ok(())
    }

    fn cx(&mut self, t: &Topology, a: usize, b: usize) -> Result<()> {
        if t.linked(a, b) {
            return self.cx_adjacent(t, a, b);
        }
        let mid = (0..t.n_qubits)
            .find(|&k| k != a && k != b && t.linked(a, k) && t.linked(k, b))
            .ok_or(Error::Unroutable(a, b))?;
        // CX(a,k) CX(k,b) CX(a,k) CX(k,b) acts as CX(a,b) and leaves k intact.
        for (x, y) in [(a, mid), (mid, b), (a, mid), (mid, b)] {
            self.cx_adjacent(t, x, y)?;
        }
        Ok(())
    }

    /// Controlled-U via `A·X·B·X·C` with a phase on the control.
    fn controlled_u(&mut self, t: &Topology, g: &Gate, ctl: usize, tgt: usize) -> Result<()> {
        let m = g.matrix();
        let u = m.view((2, 2), (2, 2)).into_owned();
        let (alpha, beta, gamma, delta) = zyz(&u);
        self.one("rz", &[(delta - beta) / 2.0], tgt)?;
        self.cx(t, ctl, tgt)?;
        self.one("rz", &[-(delta + beta) / 2.0], tgt)?;
        self.one("ry", &[-gamma / 2.0], tgt)?;
        self.cx(t, ctl, tgt)?;
        self.one("ry", &[gamma / 2.0], tgt)?;
        self.one("rz", &[beta], tgt)?;
        self.one("p", &[alpha], ctl)?;
        Ok(())
    }

    fn ccx(&mut self, t: &Topology, a: usize, b: usize, c: usize) -> Result<()> {
        self.one("h", &[], c)?;
        self.cx(t, b, c)?;
        self.one("tdg", &[], c)?;
        self.cx(t, a, c)?;
        self.one("t", &[], c)?;
        self.cx(t, b, c)?;
        self.one("tdg", &[], c)?;
        self.cx(t, a, c)?;
        self.one("t", &[], b)?;
        self.one("t", &[], c)?;
        self.one("h", &[], c)?;
        self.cx(t, a, b)?;
        self.one("t", &[], a)?;
        self.one("tdg", &[], b)?;
        self.cx(t, a, b)?;
        Ok(())
    }
}

/// Rewrites a circuit so every CNOT runs on a native edge of `t`.
///
/// * A CNOT whose direction is missing is conjugated by Hadamards on both
///   qubits.
/// * A CNOT between qubits two links apart becomes a four-CNOT chain through
///   the intermediate qubit.
/// * Other two-qubit gates are first lowered to CNOTs and single-qubit gates
///   (controlled gates via the A·X·B·X·C form, SWAP as three CNOTs, anything
///   else by three-CNOT synthesis); Toffoli and Fredkin use their standard
///   six- and eight-CNOT networks.
///
/// Pairs further apart than two links give [`Error::Unroutable`]. The result
/// has the same unitary as the input up to a global phase.
pub fn reroute_for_topology(c: &Circuit, t: &Topology) -> Result<Circuit> {
    if c.n_qubits() > t.n_qubits() {
        return Err(Error::Dimension { expected: t.n_qubits(), got: c.n_qubits() });
    }
    let mut out = Out { c: Circuit::with_registers(c.qregs().to_vec(), c.cregs().to_vec()) };
    for op in c.ops() {
        let app = match op {
            Op::Gate(app) => app,
            other => {
                out.c.push_op(other.clone());
                continue;
            }
        };
        let g = &app.gate;
        let q = &app.targets;
        match (g.arity(), g.name()) {
            (1, _) => {
                out.c.push_gate(g.clone(), q)?;
            }
            (2, "cx") => out.cx(t, q[0], q[1])?,
            (2, "swap") => {
                out.cx(t, q[0], q[1])?;
                out.cx(t, q[1], q[0])?;
                out.cx(t, q[0], q[1])?;
            }
            (2, "cy" | "cz" | "ch" | "cp" | "cu1" | "crz" | "cry") => out.controlled_u(t, g, q[0], q[1])?,
            (2, _) => {
                let sub = synth_two_qubit_gate(&g.matrix())?.circuit;
                for sop in sub.ops() {
                    if let Op::Gate(sa) = sop {
                        let mapped: Vec<usize> = sa.targets.iter().map(|&k| q[k]).collect();
                        if sa.gate.name() == "cx" {
                            out.cx(t, mapped[0], mapped[1])?;
                        } else {
                            out.c.push_gate(sa.gate.clone(), &mapped)?;
                        }
                    }
                }
            }
            (3, "ccx") => out.ccx(t, q[0], q[1], q[2])?,
            (3, "cswap") => {
                out.cx(t, q[2], q[1])?;
                out.ccx(t, q[0], q[1], q[2])?;
                out.cx(t, q[2], q[1])?;
            }
            (k, name) => {
                return Err(Error::Invalid(format!("cannot lower {k}-qubit gate '{name}' to CNOTs")));
            }
        }
    }
    Ok(out.c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::phase_distance;

    fn legal(c: &Circuit, t: &Topology) -> bool {
        c.ops().iter().all(|op| match op {
            Op::Gate(a) if a.gate.arity() >= 2 => a.gate.name() == "cx" && t.allows(a.targets[0], a.targets[1]),
            _ => true,
        })
    }

    #[test]
    fn reversed_cnot_uses_hadamards() {
        let t = Topology::new(2, &[(1, 0)]).unwrap();
        let mut c = Circuit::new(2, 0);
        c.cx(0, 1);
        let r = reroute_for_topology(&c, &t).unwrap();
        let mut expect = Circuit::new(2, 0);
        expect.h(0).h(1).cx(1, 0).h(0).h(1);
        assert_eq!(r, expect);
        assert!(phase_distance(&r.unitary().unwrap(), &c.unitary().unwrap()) < 1e-9);
    }

    #[test]
    fn distance_two_cnot_chain() {
        let t = Topology::new(3, &[(0, 1), (1, 2)]).unwrap();
        let mut c = Circuit::new(3, 0);
        c.cx(0, 2);
        let r = reroute_for_topology(&c, &t).unwrap();
        assert_eq!(r.cnot_count(), 4);
        assert_eq!(r.gate_count(), 4);
        assert!(legal(&r, &t));
        assert!(phase_distance(&r.unitary().unwrap(), &c.unitary().unwrap()) < 1e-9);
    }

    #[test]
    fn legal_circuit_unchanged() {
        let t = Topology::ibmqx4();
        let mut c = Circuit::new(5, 5);
        c.h(2).cx(2, 1).cx(3, 4).g("t", &[], &[0]).measure_all().unwrap();
        assert_eq!(reroute_for_topology(&c, &t).unwrap(), c);
    }

    #[test]
    fn unroutable_pair() {
        let t = Topology::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        let mut c = Circuit::new(4, 0);
        c.cx(0, 3);
        assert!(matches!(reroute_for_topology(&c, &t), Err(Error::Unroutable(0, 3))));
    }

    #[test]
    fn composite_gates_preserve_unitary() {
        let t = Topology::ibmqx4();
        let mut c = Circuit::new(5, 0);
        c.g("cz", &[], &[0, 4])
            .g("cp", &[0.4], &[1, 3])
            .g("swap", &[], &[0, 2])
            .g("ccx", &[], &[0, 1, 2])
            .g("cswap", &[], &[4, 2, 3])
            .g("ch", &[], &[3, 0])
            .g("cry", &[1.1], &[2, 3]);
        let r = reroute_for_topology(&c, &t).unwrap();
        assert!(legal(&r, &t));
        assert!(phase_distance(&r.unitary().unwrap(), &c.unitary().unwrap()) < 1e-9);
    }

    #[test]
    fn bad_topology() {
        assert!(Topology::new(2, &[(0, 0)]).is_err());
        assert!(Topology::new(2, &[(0, 2)]).is_err());
    }
}
