//! Block encoding by linear combination of Pauli unitaries.
//!
//! The ancilla index register sits after the system qubits. Ancilla value
//! `i` selects term `i`: potential terms first, then kinetic terms, whose
//! unitaries act between a Fourier transform and its inverse. Unused values
//! act as the identity.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boson::{centered_qft_circuit, BosonRegister};
use crate::circuit::{Circuit, Gate, Partition};
use crate::compiled::CompiledHamiltonian;
use crate::error::{Error, Result};
use crate::oracle::{apply_gate, DenseOperator, Oracle};
use crate::pauli::{Pauli, PauliString, PauliSum, Phase};

#[derive(Debug, Clone, PartialEq)]
pub struct LcuTerm {
    pub alpha: f64,
    /// Sign of the coefficient is carried as a `−1` phase.
    pub unitary: PauliString,
    /// Acts in the momentum basis.
    pub fourier: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcuForm {
    pub terms: Vec<LcuTerm>,
    pub lambda: f64,
    pub ancilla_width: usize,
}

impl LcuForm {
    /// From a coordinate-basis sum and a momentum-basis sum (either may be
    /// empty, not both).
    pub fn from_sums(potential: &PauliSum, kinetic: &PauliSum) -> Result<LcuForm> {
        let mut terms = Vec::new();
        for (sum, fourier) in [(potential, false), (kinetic, true)] {
            for (c, s) in sum.canonicalize()?.terms() {
                let unitary = if *c < 0.0 {
                    s.clone().with_phase(Phase::MINUS_ONE)
                } else {
                    s.clone()
                };
                terms.push(LcuTerm {
                    alpha: c.abs(),
                    unitary,
                    fourier,
                });
            }
        }
        if terms.is_empty() {
            return Err(Error::InvalidArgument("empty Hamiltonian has no block encoding".into()));
        }
        let lambda = terms.iter().map(|t| t.alpha).sum();
        let ancilla_width = ceil_log2(terms.len());
        Ok(LcuForm {
            terms,
            lambda,
            ancilla_width,
        })
    }

    pub fn max_pauli_weight(&self) -> usize {
        self.terms.iter().map(|t| t.unitary.weight()).max().unwrap_or(0)
    }
}

fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Canonical LCU form of a compiled Hamiltonian, identity terms included.
pub fn normalize_lcu(h: &CompiledHamiltonian) -> Result<LcuForm> {
    LcuForm::from_sums(&h.coordinate_sum(), &h.kinetic)
}

/// Ancilla-controlled single-qubit operation on the system register.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum McOp {
    X(usize),
    Z(usize),
    /// Multiplies by `e^{iφ}` (a phase kicked back onto the index register).
    Phase(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelectStep {
    /// `op` applied when the ancilla register holds `value`.
    Controlled { value: usize, op: McOp },
    /// Uncontrolled gates on the full register.
    Gates(Circuit),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockEncoding {
    pub lcu: LcuForm,
    pub system_qubits: usize,
    /// Real nonnegative amplitudes `√(α_i/λ)`, zero-padded to `2^w`.
    pub prepare_vector: Vec<f64>,
    pub select: Vec<SelectStep>,
    /// Amplitude-loading circuit mapping `|0⟩` to `|G⟩` on the ancillas.
    pub prepare: Circuit,
    /// Dense target `H` built independently of the select circuit.
    target: (PauliSum, PauliSum, BosonRegister),
}

fn controlled_pauli(value: usize, p: &PauliString, out: &mut Vec<SelectStep>) {
    let ny = p.letters().values().filter(|&&l| l == Pauli::Y).count() as u8;
    // Y = i·X·Z: apply Z, then X, and collect one factor of i per Y.
    let phase = p.phase() * Phase::from_power(ny);
    if phase != Phase::ONE {
        let angle = std::f64::consts::FRAC_PI_2 * phase.power() as f64;
        out.push(SelectStep::Controlled {
            value,
            op: McOp::Phase(angle),
        });
    }
    for (&q, &l) in p.letters() {
        match l {
            Pauli::X => out.push(SelectStep::Controlled { value, op: McOp::X(q) }),
            Pauli::Z => out.push(SelectStep::Controlled { value, op: McOp::Z(q) }),
            Pauli::Y => {
                out.push(SelectStep::Controlled { value, op: McOp::Z(q) });
                out.push(SelectStep::Controlled { value, op: McOp::X(q) });
            }
        }
    }
}

/// Uniformly controlled `R_y`: angle `thetas[v]` on `target` when the
/// `controls` (least significant first) hold `v`.
fn uniformly_controlled_ry(thetas: &[f64], controls: &[usize], target: usize, out: &mut Vec<Gate>) {
    if controls.is_empty() {
        ry(target, thetas[0], out);
        return;
    }
    let half = thetas.len() / 2;
    let top = *controls.last().unwrap();
    let rest = &controls[..controls.len() - 1];
    let a: Vec<f64> = (0..half).map(|i| (thetas[i] + thetas[i + half]) / 2.0).collect();
    let b: Vec<f64> = (0..half).map(|i| (thetas[i] - thetas[i + half]) / 2.0).collect();
    uniformly_controlled_ry(&a, rest, target, out);
    out.push(Gate::cnot(top, target));
    uniformly_controlled_ry(&b, rest, target, out);
    out.push(Gate::cnot(top, target));
}

/// `R_y(θ) = S·H·R_z(θ)·H·S†`.
fn ry(q: usize, theta: f64, out: &mut Vec<Gate>) {
    if theta == 0.0 {
        return;
    }
    out.extend([Gate::Sdg(q), Gate::H(q), Gate::rz(q, theta), Gate::H(q), Gate::S(q)]);
}

/// Loads real nonnegative `amps` (length `2^w`) onto `qubits` (least
/// significant first), most significant qubit first.
pub fn amplitude_loading(amps: &[f64], qubits: &[usize], partition: Partition) -> Circuit {
    let w = qubits.len();
    let mut gates = Vec::new();
    for level in 0..w {
        let target_bit = w - 1 - level;
        let prefixes = 1usize << level;
        let thetas: Vec<f64> = (0..prefixes)
            .map(|v| {
                // Amplitude mass of states whose top `level` bits equal v and
                // whose target bit is 0 or 1.
                let mass = |bit: usize| -> f64 {
                    let start = (v << (target_bit + 1)) | (bit << target_bit);
                    amps[start..start + (1 << target_bit)].iter().map(|a| a * a).sum()
                };
                let (m0, m1) = (mass(0), mass(1));
                if m0 + m1 == 0.0 {
                    0.0
                } else {
                    2.0 * m1.sqrt().atan2(m0.sqrt())
                }
            })
            .collect();
        let controls: Vec<usize> = qubits[target_bit + 1..].to_vec();
        uniformly_controlled_ry(&thetas, &controls, qubits[target_bit], &mut gates);
    }
    let mut c = Circuit::new(partition);
    c.extend_gates(gates);
    c
}

/// Builds prepare vector, select steps and prepare circuit. `reg` supplies
/// the Fourier transform for kinetic terms; `system_qubits` is the size of
/// the register the terms act on.
pub fn assemble(lcu: &LcuForm, reg: &BosonRegister, system_qubits: usize) -> Result<BlockEncoding> {
    if let Some(q) = lcu.terms.iter().filter_map(|t| t.unitary.max_qubit()).max() {
        if q >= system_qubits {
            return Err(Error::IndexOutOfRange {
                what: "qubit",
                index: q,
                limit: system_qubits,
            });
        }
    }
    let w = lcu.ancilla_width;
    let partition = Partition {
        boson: reg.num_qubits(),
        fermion: system_qubits - reg.num_qubits(),
        auxiliary: 0,
        ancilla: w,
    };
    let mut amps = vec![0.0; 1 << w];
    for (i, t) in lcu.terms.iter().enumerate() {
        amps[i] = (t.alpha / lcu.lambda).sqrt();
    }

    let mut select = Vec::new();
    for (i, t) in lcu.terms.iter().enumerate().filter(|(_, t)| !t.fourier) {
        controlled_pauli(i, &t.unitary, &mut select);
    }
    if lcu.terms.iter().any(|t| t.fourier) {
        let f = centered_qft_circuit(reg, partition);
        select.push(SelectStep::Gates(f.clone()));
        for (i, t) in lcu.terms.iter().enumerate().filter(|(_, t)| t.fourier) {
            controlled_pauli(i, &t.unitary, &mut select);
        }
        select.push(SelectStep::Gates(f.inverse()));
    }

    let anc: Vec<usize> = (system_qubits..system_qubits + w).collect();
    let prepare = amplitude_loading(&amps, &anc, partition);

    let mut pot = PauliSum::new();
    let mut kin = PauliSum::new();
    for t in &lcu.terms {
        let target = if t.fourier { &mut kin } else { &mut pot };
        target.push(t.alpha, t.unitary.clone());
    }
    Ok(BlockEncoding {
        lcu: lcu.clone(),
        system_qubits,
        prepare_vector: amps,
        select,
        prepare,
        target: (pot, kin, *reg),
    })
}

/// Convenience: normalize and assemble a compiled Hamiltonian.
pub fn block_encode(h: &CompiledHamiltonian) -> Result<BlockEncoding> {
    assemble(&normalize_lcu(h)?, &h.bosons, h.num_qubits())
}

fn apply_select(steps: &[SelectStep], n_sys: usize, state: &mut [Complex64]) {
    for step in steps {
        match step {
            SelectStep::Gates(c) => {
                for g in c.gates() {
                    apply_gate(g, state);
                }
            }
            SelectStep::Controlled { value, op } => match *op {
                McOp::Phase(phi) => {
                    let ph = Complex64::from_polar(1.0, phi);
                    for (k, s) in state.iter_mut().enumerate() {
                        if k >> n_sys == *value {
                            *s *= ph;
                        }
                    }
                }
                McOp::Z(q) => {
                    for (k, s) in state.iter_mut().enumerate() {
                        if k >> n_sys == *value && k >> q & 1 == 1 {
                            *s = -*s;
                        }
                    }
                }
                McOp::X(q) => {
                    let b = 1usize << q;
                    for k in 0..state.len() {
                        if k >> n_sys == *value && k & b == 0 {
                            state.swap(k, k | b);
                        }
                    }
                }
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub lambda: f64,
    pub term_count: usize,
    pub ancilla_width: usize,
    pub max_pauli_weight: usize,
    pub verify_deviation: Option<f64>,
}

impl BlockEncoding {
    pub fn total_qubits(&self) -> usize {
        self.system_qubits + self.lcu.ancilla_width
    }

    /// Dense `U` (select with Fourier dressing) on system + ancilla.
    pub fn select_matrix(&self, oracle: &Oracle) -> Result<DenseOperator> {
        let n = oracle.check(self.total_qubits())?;
        let dim = 1usize << n;
        let mut m = nalgebra::DMatrix::<Complex64>::identity(dim, dim);
        use rayon::prelude::*;
        m.as_mut_slice()
            .par_chunks_mut(dim)
            .for_each(|col| apply_select(&self.select, self.system_qubits, col));
        DenseOperator::from_matrix(m)
    }

    /// `(⟨G|⊗I) U (|G⟩⊗I)` on the system register.
    pub fn block_matrix(&self, oracle: &Oracle) -> Result<DenseOperator> {
        let n = oracle.check(self.total_qubits())?;
        let ns = self.system_qubits;
        let dsys = 1usize << ns;
        let dim = 1usize << n;
        let g = &self.prepare_vector;
        use rayon::prelude::*;
        let cols: Vec<Vec<Complex64>> = (0..dsys)
            .into_par_iter()
            .map(|s| {
                let mut v = vec![Complex64::new(0.0, 0.0); dim];
                for (i, &a) in g.iter().enumerate() {
                    v[(i << ns) | s] = Complex64::new(a, 0.0);
                }
                apply_select(&self.select, ns, &mut v);
                (0..dsys)
                    .map(|r| {
                        g.iter()
                            .enumerate()
                            .map(|(i, &a)| v[(i << ns) | r] * a)
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let m = nalgebra::DMatrix::from_fn(dsys, dsys, |r, c| cols[c][r]);
        DenseOperator::from_matrix(m)
    }

    /// Dense `H` from the LCU terms, with the kinetic part conjugated by the
    /// formula-level DFT.
    pub fn target_matrix(&self, oracle: &Oracle) -> Result<DenseOperator> {
        let (pot, kin, reg) = &self.target;
        let n = self.system_qubits;
        let mut h = oracle.pauli_sum_matrix(pot, n)?;
        if !kin.is_empty() {
            let f = oracle.centered_dft(reg, n)?;
            h = h.add(&f.adjoint().matmul(&oracle.pauli_sum_matrix(kin, n)?).matmul(&f));
        }
        Ok(h)
    }

    /// `max |(⟨G|⊗I)U(|G⟩⊗I) − H/λ|`.
    pub fn verify_block(&self, oracle: &Oracle) -> Result<f64> {
        let block = self.block_matrix(oracle)?;
        let target = self
            .target_matrix(oracle)?
            .scale(Complex64::new(1.0 / self.lcu.lambda, 0.0));
        Ok(block.max_abs_diff(&target))
    }

    /// `max | prepare|0⟩ − |G⟩ |` on the ancilla register.
    pub fn verify_prepare(&self, oracle: &Oracle) -> Result<f64> {
        let n = oracle.check(self.total_qubits())?;
        let mut v = crate::oracle::basis_state(1 << n, 0);
        oracle.apply_circuit(&self.prepare, &mut v)?;
        let ns = self.system_qubits;
        let mut dev: f64 = 0.0;
        for (k, z) in v.iter().enumerate() {
            let expect = if k & ((1 << ns) - 1) == 0 {
                self.prepare_vector[k >> ns]
            } else {
                0.0
            };
            dev = dev.max((z - Complex64::new(expect, 0.0)).norm());
        }
        Ok(dev)
    }

    pub fn report(&self, verify_deviation: Option<f64>) -> BlockReport {
        BlockReport {
            lambda: self.lcu.lambda,
            term_count: self.lcu.terms.len(),
            ancilla_width: self.lcu.ancilla_width,
            max_pauli_weight: self.lcu.max_pauli_weight(),
            verify_deviation,
        }
    }
}
