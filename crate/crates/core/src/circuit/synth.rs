//! Exponentials of single Pauli strings.

use serde::{Deserialize, Serialize};

use super::{Circuit, Gate, Partition};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, Phase};

/// How the parity of the rotated qubits is gathered onto the pivot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Every qubit CNOTs directly into the last one.
    #[default]
    PivotLadder,
    /// `C(a1,a2) C(a2,a3) ... C(a_{n-1},a_n)`.
    ChainLadder,
    /// Pairwise reduction tree, logarithmic depth.
    BalancedTree,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [
        Strategy::PivotLadder,
        Strategy::ChainLadder,
        Strategy::BalancedTree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::PivotLadder => "pivot_ladder",
            Strategy::ChainLadder => "chain_ladder",
            Strategy::BalancedTree => "balanced_tree",
        }
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pivot_ladder" | "pivot" => Ok(Strategy::PivotLadder),
            "chain_ladder" | "chain" => Ok(Strategy::ChainLadder),
            "balanced_tree" | "tree" => Ok(Strategy::BalancedTree),
            _ => Err(Error::InvalidArgument(format!("unknown strategy `{s}`"))),
        }
    }
}

/// CNOTs that leave the parity of `qubits` on the last of them (the pivot).
pub fn parity_ladder(qubits: &[usize], strategy: Strategy) -> Vec<Gate> {
    let n = qubits.len();
    let mut gates = Vec::new();
    if n < 2 {
        return gates;
    }
    match strategy {
        Strategy::PivotLadder => {
            let pivot = qubits[n - 1];
            for &q in &qubits[..n - 1] {
                gates.push(Gate::cnot(q, pivot));
            }
        }
        Strategy::ChainLadder => {
            for w in qubits.windows(2) {
                gates.push(Gate::cnot(w[0], w[1]));
            }
        }
        Strategy::BalancedTree => {
            let mut active = qubits.to_vec();
            while active.len() > 1 {
                let mut next = Vec::with_capacity(active.len().div_ceil(2));
                let mut i = active.len();
                while i >= 2 {
                    gates.push(Gate::cnot(active[i - 2], active[i - 1]));
                    next.push(active[i - 1]);
                    i -= 2;
                }
                if i == 1 {
                    next.push(active[0]);
                }
                next.reverse();
                active = next;
            }
        }
    }
    gates
}

fn basis_in(q: usize, p: Pauli, out: &mut Vec<Gate>) {
    match p {
        Pauli::X => out.push(Gate::H(q)),
        Pauli::Y => {
            out.push(Gate::Sdg(q));
            out.push(Gate::H(q));
        }
        Pauli::Z => {}
    }
}

fn basis_out(q: usize, p: Pauli, out: &mut Vec<Gate>) {
    match p {
        Pauli::X => out.push(Gate::H(q)),
        Pauli::Y => {
            out.push(Gate::H(q));
            out.push(Gate::S(q));
        }
        Pauli::Z => {}
    }
}

/// Gate list for `exp(-iθP)`; the pivot is the highest qubit of `P`.
pub fn pauli_rotation_gates(p: &PauliString, theta: f64, strategy: Strategy) -> Result<Vec<Gate>> {
    let sign = match p.phase() {
        Phase::ONE => 1.0,
        Phase::MINUS_ONE => -1.0,
        ph => return Err(Error::NonHermitian(ph.to_string())),
    };
    if p.weight() == 0 {
        return Err(Error::InvalidArgument(
            "rotation about the identity is a global phase".into(),
        ));
    }
    let qubits: Vec<usize> = p.support().collect();
    let pivot = *qubits.last().unwrap();
    let ladder = parity_ladder(&qubits, strategy);
    let mut gates = Vec::with_capacity(2 * ladder.len() + 2 * qubits.len() + 1);
    for (&q, &l) in p.letters() {
        basis_in(q, l, &mut gates);
    }
    gates.extend(ladder.iter().copied());
    gates.push(Gate::rz(pivot, 2.0 * sign * theta));
    gates.extend(ladder.iter().rev().copied());
    for (&q, &l) in p.letters() {
        basis_out(q, l, &mut gates);
    }
    Ok(gates)
}

/// Circuit for `exp(-iθP)` on the smallest register containing `P`.
pub fn pauli_rotation(p: &PauliString, theta: f64, strategy: Strategy) -> Result<Circuit> {
    let gates = pauli_rotation_gates(p, theta, strategy)?;
    let n = p.max_qubit().map_or(0, |q| q + 1);
    Ok(Circuit::from_parts(Partition::plain(n), gates))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_one_z_is_single_rz() {
        let c = pauli_rotation(&PauliString::single(0, Pauli::Z), 0.7, Strategy::PivotLadder).unwrap();
        assert_eq!(c.gates(), &[Gate::rz(0, 1.4)]);
    }

    #[test]
    fn tree_parity_half_for_weight_eight() {
        let qs: Vec<usize> = (0..8).collect();
        let ladder = parity_ladder(&qs, Strategy::BalancedTree);
        assert_eq!(ladder.len(), 7);
        let c = Circuit::from_parts(Partition::plain(8), ladder);
        assert_eq!(c.depth(), 3);
    }

    #[test]
    fn pivot_ladder_serializes() {
        for k in 2..9 {
            let qs: Vec<usize> = (0..k).collect();
            let c = Circuit::from_parts(Partition::plain(k), parity_ladder(&qs, Strategy::PivotLadder));
            assert_eq!(c.depth(), k - 1);
        }
    }

    #[test]
    fn rejects_imaginary_phase() {
        let p = PauliString::single(0, Pauli::X).with_phase(Phase::I);
        assert!(pauli_rotation(&p, 0.1, Strategy::ChainLadder).is_err());
    }
}
