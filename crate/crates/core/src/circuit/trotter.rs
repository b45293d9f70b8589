//! First-order Trotter steps with optional sharing of CNOT ladders between
//! consecutive rotations.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::synth::pauli_rotation_gates;
use super::{Circuit, Gate, Strategy};
use crate::boson::centered_qft_circuit;
use crate::compiled::CompiledHamiltonian;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Policy {
    /// Z letters of consecutive terms are folded onto a shared pivot, and
    /// only the CNOTs that differ between neighbours are emitted.
    #[default]
    Fused,
    /// Every rotation synthesized on its own.
    Naive,
}

impl Policy {
    pub fn name(self) -> &'static str {
        match self {
            Policy::Fused => "fused",
            Policy::Naive => "naive",
        }
    }
}

impl std::str::FromStr for Policy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fused" => Ok(Policy::Fused),
            "naive" => Ok(Policy::Naive),
            _ => Err(Error::InvalidArgument(format!("unknown policy `{s}`"))),
        }
    }
}

fn z_qubits(p: &PauliString) -> Vec<usize> {
    p.letters()
        .iter()
        .filter(|(_, &l)| l == Pauli::Z)
        .map(|(&q, _)| q)
        .collect()
}

/// Emits `Π_k exp(−iθ_k P_k)` in order, sharing Z-parity CNOTs.
///
/// For a term whose Z letters are `Z_f` and pivot `p ∈ Z_f`,
/// `exp(−iθ Z_O Z_p R) = C_O exp(−iθ Z_p R) C_O` with `O = Z_f \ {p}` and
/// `C_O = Π_{q∈O} CNOT(q, p)`. All these CNOTs share a target and commute,
/// so between two terms on the same pivot only `C_{O₁ Δ O₂}` is needed.
struct Fuser {
    pivot: Option<usize>,
    outer: BTreeSet<usize>,
}

impl Fuser {
    fn close(&mut self, out: &mut Vec<Gate>) {
        if let Some(p) = self.pivot.take() {
            for &q in self.outer.iter().rev() {
                out.push(Gate::cnot(q, p));
            }
        }
        self.outer.clear();
    }

    fn emit(
        &mut self,
        terms: &[(f64, &PauliString)],
        zsets: &[Vec<usize>],
        index: usize,
        strategy: Strategy,
        out: &mut Vec<Gate>,
    ) -> Result<()> {
        let (theta, p) = terms[index];
        let zs = &zsets[index];
        if zs.is_empty() {
            self.close(out);
            out.extend(pauli_rotation_gates(p, theta, strategy)?);
            return Ok(());
        }
        let pivot = match self.pivot {
            Some(cur) if zs.binary_search(&cur).is_ok() => cur,
            _ => choose_pivot(zsets, index),
        };
        if self.pivot != Some(pivot) {
            self.close(out);
            self.pivot = Some(pivot);
        }
        let new_outer: BTreeSet<usize> = zs.iter().copied().filter(|&q| q != pivot).collect();
        for &q in self.outer.symmetric_difference(&new_outer) {
            out.push(Gate::cnot(q, pivot));
        }
        self.outer = new_outer;
        let inner = p.remap(|q| (!self.outer.contains(&q)).then_some(q));
        out.extend(pauli_rotation_gates(&inner, theta, strategy)?);
        Ok(())
    }
}

/// Z qubit of term `index` shared by the longest run of following terms;
/// ties go to the highest qubit.
fn choose_pivot(zsets: &[Vec<usize>], index: usize) -> usize {
    let mut best = (0usize, 0usize);
    for &q in &zsets[index] {
        let run = zsets[index..]
            .iter()
            .take_while(|z| z.binary_search(&q).is_ok())
            .count();
        if (run, q) > best {
            best = (run, q);
        }
    }
    best.1
}

/// Appends rotations `exp(−i·scale·c·P)` for every non-identity term.
fn emit_rotations(
    sum: &PauliSum,
    scale: f64,
    policy: Policy,
    strategy: Strategy,
    out: &mut Vec<Gate>,
) -> Result<()> {
    let terms: Vec<(f64, &PauliString)> = sum
        .terms()
        .iter()
        .filter(|(_, s)| !s.is_identity_word())
        .map(|(c, s)| (scale * c, s))
        .collect();
    match policy {
        Policy::Naive => {
            for (theta, p) in terms {
                out.extend(pauli_rotation_gates(p, theta, strategy)?);
            }
        }
        Policy::Fused => {
            let zsets: Vec<Vec<usize>> = terms.iter().map(|(_, p)| z_qubits(p)).collect();
            let mut f = Fuser {
                pivot: None,
                outer: BTreeSet::new(),
            };
            for i in 0..terms.len() {
                f.emit(&terms, &zsets, i, strategy, out)?;
            }
            f.close(out);
        }
    }
    Ok(())
}

/// One first-order step `≈ exp(−iεH)`, in execution order: coordinate-basis
/// groups, the centered Fourier transform, kinetic rotations, its inverse.
/// Identity components are omitted (global phase).
pub fn trotter_step(h: &CompiledHamiltonian, epsilon: f64, policy: Policy, strategy: Strategy) -> Result<Circuit> {
    let mut gates = Vec::new();
    let mut coord = PauliSum::new();
    for g in &h.groups {
        coord.extend(&g.terms);
    }
    emit_rotations(&coord, epsilon, policy, strategy, &mut gates)?;
    let mut circuit = Circuit::new(h.partition);
    circuit.extend_gates(gates);

    let kinetic: Vec<_> = h
        .kinetic
        .terms()
        .iter()
        .filter(|(_, s)| !s.is_identity_word())
        .collect();
    if !kinetic.is_empty() {
        let f = centered_qft_circuit(&h.bosons, h.partition);
        let mut kin = Vec::new();
        emit_rotations(&h.kinetic, epsilon, policy, strategy, &mut kin)?;
        circuit.append(&f);
        circuit.extend_gates(kin);
        circuit.append(&f.inverse());
    }
    Ok(circuit)
}
