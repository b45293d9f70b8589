//! CNOT-pair cancellation with a small set of sound commutation rules.

use super::{Circuit, Gate};

/// May `g` be moved across `CNOT(c, t)` (neither being the partner CNOT)?
fn commutes_with_cnot(c: usize, t: usize, g: &Gate) -> bool {
    match *g {
        Gate::Rz { qubit, .. } | Gate::S(qubit) | Gate::Sdg(qubit) => qubit != t,
        Gate::Cnot { control, target } => {
            if control == c {
                target != c
            } else if target == t {
                control != t
            } else {
                control != t && target != c && control != c && target != t
            }
        }
        _ => {
            let (qs, k) = g.qubits();
            qs[..k].iter().all(|&q| q != c && q != t)
        }
    }
}

/// Removes zero-angle rotations and pairs of identical CNOTs that become
/// adjacent once gates are commuted past them by the rules in
/// [`commutes_with_cnot`]; repeats until nothing changes.
pub fn peephole_cancel(circuit: &Circuit) -> Circuit {
    let gates: Vec<Gate> = circuit
        .gates()
        .iter()
        .copied()
        .filter(|g| match *g {
            Gate::Rz { theta, .. } | Gate::CPhase { theta, .. } => theta != 0.0,
            _ => true,
        })
        .collect();
    let n = circuit.num_qubits();
    let mut alive = vec![true; gates.len()];

    // Per-wire gate indices and each gate's position on its wires.
    let mut wires: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut pos: Vec<[usize; 2]> = vec![[0; 2]; gates.len()];
    for (i, g) in gates.iter().enumerate() {
        let (qs, k) = g.qubits();
        for s in 0..k {
            pos[i][s] = wires[qs[s]].len();
            wires[qs[s]].push(i);
        }
    }

    loop {
        let mut changed = false;
        for i in 0..gates.len() {
            if !alive[i] {
                continue;
            }
            let Gate::Cnot { control: c, target: t } = gates[i] else {
                continue;
            };
            let wc = &wires[c];
            let wt = &wires[t];
            let (mut a, mut b) = (pos[i][0] + 1, pos[i][1] + 1);
            // Merge the two wires in program order, skipping dead gates.
            loop {
                let next_a = wc.get(a).copied();
                let next_b = wt.get(b).copied();
                let j = match (next_a, next_b) {
                    (None, None) => break,
                    (Some(x), None) => x,
                    (None, Some(y)) => y,
                    (Some(x), Some(y)) => x.min(y),
                };
                if next_a == Some(j) {
                    a += 1;
                }
                if next_b == Some(j) {
                    b += 1;
                }
                if !alive[j] {
                    continue;
                }
                if gates[j] == gates[i] {
                    alive[i] = false;
                    alive[j] = false;
                    changed = true;
                    break;
                }
                if !commutes_with_cnot(c, t, &gates[j]) {
                    break;
                }
            }
        }
        if !changed {
            break;
        }
    }

    let kept = gates
        .into_iter()
        .zip(alive)
        .filter_map(|(g, a)| a.then_some(g))
        .collect();
    Circuit::from_parts(circuit.partition(), kept)
}
