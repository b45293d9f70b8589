//! Truncated bosons: grids, coordinate and momentum operators, the centered
//! Fourier transform and polynomial potentials.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circuit::{global_phase_gates, Circuit, Gate, Partition};
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

/// `num_bosons` bosons of `qubits_per_boson` qubits each, on the box
/// `[-R, R]`. Qubit `j` (1-based) of boson `b` is global qubit
/// `qubit_offset + b*Q + j - 1`; qubit 1 is the least significant bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BosonRegister {
    pub num_bosons: usize,
    pub qubits_per_boson: usize,
    pub box_radius: f64,
    pub qubit_offset: usize,
}

impl BosonRegister {
    pub fn new(num_bosons: usize, qubits_per_boson: usize, box_radius: f64) -> Result<Self> {
        if qubits_per_boson == 0 || qubits_per_boson > 30 {
            return Err(Error::InvalidArgument(format!(
                "qubits per boson must be in 1..=30, got {qubits_per_boson}"
            )));
        }
        if !(box_radius > 0.0 && box_radius.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "box radius must be positive, got {box_radius}"
            )));
        }
        Ok(BosonRegister {
            num_bosons,
            qubits_per_boson,
            box_radius,
            qubit_offset: 0,
        })
    }

    pub fn with_offset(mut self, offset: usize) -> Self {
        self.qubit_offset = offset;
        self
    }

    /// Truncation level `Λ = 2^Q`.
    pub fn levels(&self) -> usize {
        1 << self.qubits_per_boson
    }

    pub fn delta_x(&self) -> f64 {
        2.0 * self.box_radius / self.levels() as f64
    }

    pub fn delta_p(&self) -> f64 {
        PI / self.box_radius
    }

    pub fn num_qubits(&self) -> usize {
        self.num_bosons * self.qubits_per_boson
    }

    /// Global qubit of bit `j` (0-based) of boson `b`.
    pub fn qubit(&self, b: usize, j: usize) -> usize {
        self.qubit_offset + b * self.qubits_per_boson + j
    }

    fn check(&self, b: usize) -> Result<()> {
        if b >= self.num_bosons {
            return Err(Error::IndexOutOfRange {
                what: "boson",
                index: b,
                limit: self.num_bosons,
            });
        }
        Ok(())
    }

    /// Grid `{(k + 1/2 - Λ/2)·step}` for `k = 0..Λ`, ascending.
    fn grid(&self, step: f64) -> Vec<f64> {
        let lam = self.levels() as f64;
        (0..self.levels())
            .map(|k| step * (k as f64 + 0.5 - lam / 2.0))
            .collect()
    }

    /// Coordinate eigenvalue of basis index `k`.
    pub fn coordinate_grid(&self) -> Vec<f64> {
        self.grid(self.delta_x())
    }

    pub fn momentum_grid(&self) -> Vec<f64> {
        self.grid(self.delta_p())
    }

    fn z_sum(&self, b: usize, step: f64) -> Result<PauliSum> {
        self.check(b)?;
        let mut s = PauliSum::new();
        for j in 0..self.qubits_per_boson {
            let c = -step * (1u64 << j) as f64 / 2.0;
            s.push(c, PauliString::z_string([self.qubit(b, j)]));
        }
        Ok(s)
    }
}

/// `x̂_b = -δx Σ_j 2^{j-1} Z_j / 2` in the coordinate basis.
pub fn position_operator(b: usize, reg: &BosonRegister) -> Result<PauliSum> {
    reg.z_sum(b, reg.delta_x())
}

/// `p̂_b`, same Z-sum with `δp`; diagonal in the momentum basis.
pub fn momentum_operator(b: usize, reg: &BosonRegister) -> Result<PauliSum> {
    reg.z_sum(b, reg.delta_p())
}

fn expand_product(coeff: f64, factors: &[PauliSum]) -> PauliSum {
    let mut acc: Vec<(f64, PauliString)> = vec![(coeff, PauliString::identity())];
    for f in factors {
        let mut next = Vec::with_capacity(acc.len() * f.len());
        for (a, sa) in &acc {
            for (b, sb) in f.terms() {
                next.push((a * b, sa.mul(sb)));
            }
        }
        acc = next;
    }
    PauliSum::from_terms(acc)
}

/// Raw (uncanonicalized) expansion of `coeff · x̂_{a1} ⋯ x̂_{an}`: `Q^n` terms.
pub fn expand_monomial_raw(coeff: f64, bosons: &[usize], reg: &BosonRegister) -> Result<PauliSum> {
    if bosons.is_empty() {
        return Err(Error::InvalidArgument("empty boson monomial".into()));
    }
    let factors = bosons
        .iter()
        .map(|&b| position_operator(b, reg))
        .collect::<Result<Vec<_>>>()?;
    Ok(expand_product(coeff, &factors))
}

/// Canonical Pauli sum of `coeff · x̂_{a1} ⋯ x̂_{an}`.
pub fn expand_monomial(coeff: f64, bosons: &[usize], reg: &BosonRegister) -> Result<PauliSum> {
    expand_monomial_raw(coeff, bosons, reg)?.canonicalize()
}

/// `Σ_b p̂_b² / 2` as a Z-sum acting in the momentum basis.
pub fn kinetic_operator(reg: &BosonRegister) -> Result<PauliSum> {
    let mut s = PauliSum::new();
    for b in 0..reg.num_bosons {
        let p = momentum_operator(b, reg)?;
        s.extend(&expand_product(0.5, &[p.clone(), p]));
    }
    s.canonicalize()
}

/// Textbook QFT gates on `qs` (index 0 least significant), mapping
/// `|m⟩ → Λ^{-1/2} Σ_k e^{2πi km/Λ} |k⟩`.
fn qft_gates(qs: &[usize], out: &mut Vec<Gate>) {
    let q = qs.len();
    for i in (0..q).rev() {
        out.push(Gate::H(qs[i]));
        for l in (0..i).rev() {
            let theta = 2.0 * PI / (1u64 << (i - l + 1)) as f64;
            out.push(Gate::cphase(qs[l], qs[i], theta));
        }
    }
    for i in 0..q / 2 {
        out.push(Gate::Swap(qs[i], qs[q - 1 - i]));
    }
}

/// Centered DFT on every boson in parallel, `⟨p_k|x_m⟩ = e^{i p_k x_m}/√Λ`.
///
/// With `c = (Λ-1)/2` the kernel factors as
/// `e^{2πi c²/Λ} D F D`, `D = diag(e^{-2πi c m/Λ})`. Each `D` is a layer of
/// `Rz` gates, which adds a known global phase that is removed together with
/// `e^{2πi c²/Λ}` by a small phase gadget on each boson.
pub fn centered_qft_circuit(reg: &BosonRegister, partition: Partition) -> Circuit {
    let q = reg.qubits_per_boson;
    let lam = reg.levels() as f64;
    let c = (lam - 1.0) / 2.0;
    let betas: Vec<f64> = (0..q)
        .map(|j| -2.0 * PI * c * (1u64 << j) as f64 / lam)
        .collect();
    let beta_sum: f64 = betas.iter().sum();
    // Two Rz layers contribute e^{-iΣβ}; we need e^{2πic²/Λ} in total.
    let phi = 2.0 * PI * c * c / lam + beta_sum;
    let phi = phi.rem_euclid(2.0 * PI);

    let mut circuit = Circuit::new(partition);
    for b in 0..reg.num_bosons {
        let qs: Vec<usize> = (0..q).map(|j| reg.qubit(b, j)).collect();
        let mut g = Vec::new();
        for (j, &beta) in betas.iter().enumerate() {
            g.push(Gate::rz(qs[j], beta));
        }
        qft_gates(&qs, &mut g);
        for (j, &beta) in betas.iter().enumerate() {
            g.push(Gate::rz(qs[j], beta));
        }
        g.extend(global_phase_gates(phi, &qs));
        circuit.extend_gates(g);
    }
    circuit
}
