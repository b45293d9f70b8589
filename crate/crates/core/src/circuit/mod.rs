//! Gate-level circuit IR over a partitioned register.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod peephole;
pub mod synth;
pub mod trotter;

pub use peephole::peephole_cancel;
pub use synth::{pauli_rotation, Strategy};
pub use trotter::{trotter_step, Policy};

/// Elementary gate. `Rz(θ) = exp(-iθZ/2)`, `CPhase(θ) = diag(1, 1, 1, e^{iθ})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Cnot { control: usize, target: usize },
    H(usize),
    S(usize),
    Sdg(usize),
    Rz { qubit: usize, theta: f64 },
    CPhase { a: usize, b: usize, theta: f64 },
    Swap(usize, usize),
}

impl Gate {
    pub fn cnot(control: usize, target: usize) -> Gate {
        Gate::Cnot { control, target }
    }

    pub fn rz(qubit: usize, theta: f64) -> Gate {
        Gate::Rz { qubit, theta }
    }

    pub fn cphase(a: usize, b: usize, theta: f64) -> Gate {
        Gate::CPhase { a, b, theta }
    }

    /// Qubits touched, in argument order.
    pub fn qubits(&self) -> ([usize; 2], usize) {
        match *self {
            Gate::Cnot { control, target } => ([control, target], 2),
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::Rz { qubit: q, .. } => ([q, q], 1),
            Gate::CPhase { a, b, .. } => ([a, b], 2),
            Gate::Swap(a, b) => ([a, b], 2),
        }
    }

    pub fn qubit_list(&self) -> Vec<usize> {
        let (qs, n) = self.qubits();
        qs[..n].to_vec()
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            Gate::Rz { qubit, theta } => Gate::Rz { qubit, theta: -theta },
            Gate::CPhase { a, b, theta } => Gate::CPhase { a, b, theta: -theta },
            g => g,
        }
    }

    fn remap(&self, f: impl Fn(usize) -> usize) -> Gate {
        match *self {
            Gate::Cnot { control, target } => Gate::cnot(f(control), f(target)),
            Gate::H(q) => Gate::H(f(q)),
            Gate::S(q) => Gate::S(f(q)),
            Gate::Sdg(q) => Gate::Sdg(f(q)),
            Gate::Rz { qubit, theta } => Gate::rz(f(qubit), theta),
            Gate::CPhase { a, b, theta } => Gate::cphase(f(a), f(b), theta),
            Gate::Swap(a, b) => Gate::Swap(f(a), f(b)),
        }
    }
}

/// Register sizes. Qubits are laid out boson first, then fermion (with any
/// auxiliary qubits interleaved per site), then ancilla.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Partition {
    pub boson: usize,
    pub fermion: usize,
    pub auxiliary: usize,
    pub ancilla: usize,
}

impl Partition {
    pub fn total(&self) -> usize {
        self.boson + self.fermion + self.auxiliary + self.ancilla
    }

    pub fn plain(n: usize) -> Self {
        Partition {
            fermion: n,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Circuit {
    partition: Partition,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(partition: Partition) -> Self {
        Circuit {
            partition,
            gates: Vec::new(),
        }
    }

    /// Circuit on `n` qubits with no partition labels beyond a single block.
    pub fn with_qubits(n: usize) -> Self {
        Self::new(Partition::plain(n))
    }

    pub fn partition(&self) -> Partition {
        self.partition
    }

    pub fn num_qubits(&self) -> usize {
        self.partition.total()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Appends a gate, panicking on an out-of-range or degenerate index. Gate
    /// construction is internal, so a bad index is a bug rather than input.
    pub fn push(&mut self, gate: Gate) {
        let n = self.num_qubits();
        let (qs, k) = gate.qubits();
        for &q in &qs[..k] {
            assert!(q < n, "gate {gate:?} outside {n}-qubit register");
        }
        if k == 2 {
            assert_ne!(qs[0], qs[1], "two-qubit gate on one qubit: {gate:?}");
        }
        self.gates.push(gate);
    }

    /// Appends all gates of `other`, which must fit in this register.
    pub fn append(&mut self, other: &Circuit) {
        for g in &other.gates {
            self.push(*g);
        }
    }

    pub fn extend_gates<I: IntoIterator<Item = Gate>>(&mut self, gates: I) {
        for g in gates {
            self.push(g);
        }
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            partition: self.partition,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }

    /// Same gates on a larger register, qubit `q` mapped to `map(q)`.
    pub fn embed(&self, partition: Partition, map: impl Fn(usize) -> usize) -> Circuit {
        let mut c = Circuit::new(partition);
        for g in &self.gates {
            c.push(g.remap(&map));
        }
        c
    }

    pub(crate) fn from_parts(partition: Partition, gates: Vec<Gate>) -> Circuit {
        Circuit { partition, gates }
    }

    /// ASAP layer count: each gate sits one layer above the latest gate on
    /// any of its qubits.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.num_qubits()];
        let mut depth = 0;
        for g in &self.gates {
            let qs = g.qubit_list();
            let l = qs.iter().map(|&q| level[q]).max().unwrap_or(0) + 1;
            for q in qs {
                level[q] = l;
            }
            depth = depth.max(l);
        }
        depth
    }

    pub fn count_cnot(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Cnot { .. }))
            .count()
    }

    /// Text export. Angles are printed with 17 significant digits so that
    /// import reproduces them bit for bit.
    pub fn to_text(&self) -> String {
        let p = self.partition;
        let mut out = String::new();
        let _ = writeln!(out, "qubits {}", p.total());
        let _ = writeln!(
            out,
            "# partition boson={} fermion={} auxiliary={} ancilla={}",
            p.boson, p.fermion, p.auxiliary, p.ancilla
        );
        for g in &self.gates {
            let _ = match *g {
                Gate::Cnot { control, target } => writeln!(out, "cx {control} {target}"),
                Gate::H(q) => writeln!(out, "h {q}"),
                Gate::S(q) => writeln!(out, "s {q}"),
                Gate::Sdg(q) => writeln!(out, "sdg {q}"),
                Gate::Rz { qubit, theta } => writeln!(out, "rz {theta:.16e} {qubit}"),
                Gate::CPhase { a, b, theta } => writeln!(out, "cp {theta:.16e} {a} {b}"),
                Gate::Swap(a, b) => writeln!(out, "swap {a} {b}"),
            };
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Circuit> {
        let mut lines = text.lines().enumerate();
        let (n, partition) = loop {
            let Some((i, line)) = lines.next() else {
                return Err(Error::Parse {
                    line: 0,
                    msg: "missing `qubits` header".into(),
                });
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let rest = line.strip_prefix("qubits ").ok_or_else(|| Error::Parse {
                line: i + 1,
                msg: "expected `qubits <N>`".into(),
            })?;
            let n: usize = rest.trim().parse().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("bad qubit count `{rest}`"),
            })?;
            break (n, Partition::plain(n));
        };
        let mut partition = partition;
        let mut gates = Vec::new();
        for (i, raw) in lines {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: i + 1, msg };
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(p) = parse_partition(rest) {
                    if p.total() != n {
                        return Err(err(format!("partition sums to {}, not {n}", p.total())));
                    }
                    partition = p;
                }
                continue;
            }
            let tok: Vec<&str> = line.split_whitespace().collect();
            let q = |s: &str| -> Result<usize> {
                let v: usize = s.parse().map_err(|_| err(format!("bad qubit `{s}`")))?;
                if v >= n {
                    return Err(err(format!("qubit {v} outside register of {n}")));
                }
                Ok(v)
            };
            let angle = |s: &str| -> Result<f64> {
                s.parse::<f64>().map_err(|_| err(format!("bad angle `{s}`")))
            };
            let gate = match tok.as_slice() {
                ["cx", c, t] => Gate::cnot(q(c)?, q(t)?),
                ["h", a] => Gate::H(q(a)?),
                ["s", a] => Gate::S(q(a)?),
                ["sdg", a] => Gate::Sdg(q(a)?),
                ["rz", th, a] => Gate::rz(q(a)?, angle(th)?),
                ["cp", th, a, b] => Gate::cphase(q(a)?, q(b)?, angle(th)?),
                ["swap", a, b] => Gate::Swap(q(a)?, q(b)?),
                _ => return Err(err(format!("unrecognized gate line `{line}`"))),
            };
            let (qs, k) = gate.qubits();
            if k == 2 && qs[0] == qs[1] {
                return Err(err("two-qubit gate on a single qubit".into()));
            }
            gates.push(gate);
        }
        Ok(Circuit { partition, gates })
    }
}

fn parse_partition(comment: &str) -> Option<Partition> {
    let rest = comment.trim().strip_prefix("partition")?;
    let mut p = Partition::default();
    for field in rest.split_whitespace() {
        let (k, v) = field.split_once('=')?;
        let v: usize = v.parse().ok()?;
        match k {
            "boson" => p.boson = v,
            "fermion" => p.fermion = v,
            "auxiliary" => p.auxiliary = v,
            "ancilla" => p.ancilla = v,
            _ => return None,
        }
    }
    Some(p)
}

/// Gates realizing the global phase `e^{iφ}` on the given qubits (one or two
/// are needed; the gate set has no bare phase gate).
pub fn global_phase_gates(phi: f64, qubits: &[usize]) -> Vec<Gate> {
    use std::f64::consts::FRAC_PI_4;
    let k = phi / FRAC_PI_4;
    let kr = k.round();
    let mut gates = Vec::new();
    if (k - kr).abs() < 1e-12 {
        // S^k = e^{ikπ/4} Rz(kπ/2); undo the rotation part.
        let q = qubits[0];
        let kk = kr as i64;
        for _ in 0..kk.rem_euclid(4) {
            gates.push(Gate::S(q));
        }
        let theta = -(kk as f64) * std::f64::consts::FRAC_PI_2;
        if theta != 0.0 {
            gates.push(Gate::rz(q, theta));
        }
        return gates;
    }
    assert!(qubits.len() >= 2, "generic global phase needs two qubits");
    let (a, b) = (qubits[0], qubits[1]);
    // CPhase(4β) = e^{iβ} Rz_a(2β) Rz_b(2β) exp(iβ Z_a Z_b).
    let beta = phi;
    gates.push(Gate::cnot(a, b));
    gates.push(Gate::rz(b, 2.0 * beta));
    gates.push(Gate::cnot(a, b));
    gates.push(Gate::rz(a, -2.0 * beta));
    gates.push(Gate::rz(b, -2.0 * beta));
    gates.push(Gate::cphase(a, b, 4.0 * beta));
    gates
}
