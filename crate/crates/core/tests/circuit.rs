use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qsynth::boson::BosonRegister;
use qsynth::circuit::synth::{parity_ladder, pauli_rotation_gates};
use qsynth::circuit::{peephole_cancel, pauli_rotation, trotter_step, Circuit, Gate, Policy, Strategy};
use qsynth::compiled::{compile, Encoding};
use qsynth::lattice::{Boundary, LatticeGeometry, Ordering};
use qsynth::model::{build_preset, HoppingTerm, ModelBuilder, PresetParams};
use qsynth::oracle::{DenseOperator, Oracle};
use qsynth::{Pauli, PauliString, Phase};

fn exp_rotation(o: &Oracle, p: &PauliString, theta: f64, n: usize) -> DenseOperator {
    DenseOperator::identity(n)
        .scale(Complex64::new(theta.cos(), 0.0))
        .add(&o.pauli_string_matrix(p, n).unwrap().scale(Complex64::new(0.0, -theta.sin())))
}

fn on(n: usize, gates: Vec<Gate>) -> Circuit {
    let mut c = Circuit::with_qubits(n);
    c.extend_gates(gates);
    c
}

#[test]
fn single_z_is_one_rz() {
    let c = pauli_rotation(&PauliString::single(0, Pauli::Z), 0.7, Strategy::PivotLadder).unwrap();
    assert_eq!(c.gates(), &[Gate::rz(0, 1.4)]);
}

#[test]
fn xyz_rotation_matches_exponential() {
    let o = Oracle::default();
    let p = PauliString::from_letters([(0, Pauli::X), (1, Pauli::Y), (2, Pauli::Z)]);
    for s in Strategy::ALL {
        let c = on(3, pauli_rotation_gates(&p, 0.3, s).unwrap());
        let d = o.circuit_matrix(&c).unwrap().distance(&exp_rotation(&o, &p, 0.3, 3));
        assert!(d < 1e-12, "{s:?}: {d}");
    }
}

#[test]
fn negative_strings_rotate_backwards() {
    let o = Oracle::default();
    let p = PauliString::from_letters([(0, Pauli::Y), (2, Pauli::X)]).with_phase(Phase::MINUS_ONE);
    let c = on(3, pauli_rotation_gates(&p, -1.1, Strategy::ChainLadder).unwrap());
    assert!(o.circuit_matrix(&c).unwrap().distance(&exp_rotation(&o, &p, -1.1, 3)) < 1e-12);
}

#[test]
fn identity_and_imaginary_strings_rejected() {
    assert!(pauli_rotation_gates(&PauliString::identity(), 0.1, Strategy::PivotLadder).is_err());
    let p = PauliString::single(0, Pauli::X).with_phase(Phase::I);
    assert!(pauli_rotation_gates(&p, 0.1, Strategy::PivotLadder).is_err());
}

#[test]
fn ladder_depths() {
    for k in 2..=12usize {
        let qs: Vec<usize> = (0..k).collect();
        let pivot = on(k, parity_ladder(&qs, Strategy::PivotLadder));
        assert_eq!((pivot.count_cnot(), pivot.depth()), (k - 1, k - 1));
        let chain = on(k, parity_ladder(&qs, Strategy::ChainLadder));
        assert_eq!(chain.count_cnot(), k - 1);
        let tree = on(k, parity_ladder(&qs, Strategy::BalancedTree));
        assert_eq!(tree.count_cnot(), k - 1);
        assert_eq!(tree.depth(), (k as f64).log2().ceil() as usize, "K={k}");
    }
}

#[test]
fn weight_eight_tree_totals() {
    let c = on(8, pauli_rotation_gates(&PauliString::z_string(0..8), 0.2, Strategy::BalancedTree).unwrap());
    assert_eq!(c.count_cnot(), 14);
    assert_eq!(c.gates().iter().filter(|g| matches!(g, Gate::Rz { .. })).count(), 1);
}

#[test]
fn depth_examples() {
    let c = on(3, vec![Gate::H(0), Gate::H(1), Gate::H(2)]);
    assert_eq!(c.depth(), 1);
    assert_eq!(Circuit::with_qubits(2).depth(), 0);
}

fn random_string(rng: &mut StdRng, n: usize) -> PauliString {
    loop {
        let letters: Vec<(usize, Pauli)> = (0..n)
            .filter_map(|q| {
                let c = rng.gen_range(0..4);
                (c > 0).then(|| (q, Pauli::ALL[c - 1]))
            })
            .collect();
        if !letters.is_empty() {
            return PauliString::from_letters(letters);
        }
    }
}

#[test]
fn strategies_agree() {
    let o = Oracle::default();
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..60 {
        let p = random_string(&mut rng, 5);
        let theta = rng.gen_range(-3.0..3.0);
        let mats: Vec<DenseOperator> = Strategy::ALL
            .iter()
            .map(|&s| o.circuit_matrix(&on(5, pauli_rotation_gates(&p, theta, s).unwrap())).unwrap())
            .collect();
        assert!(mats[0].distance(&mats[1]) < 1e-10);
        assert!(mats[0].distance(&mats[2]) < 1e-10);
    }
}

fn random_gate(rng: &mut StdRng, n: usize) -> Gate {
    let a = rng.gen_range(0..n);
    let mut b = rng.gen_range(0..n - 1);
    if b >= a {
        b += 1;
    }
    // Small pools of angles and wires so that cancellations actually occur.
    let theta = [0.0, 0.4, -1.3][rng.gen_range(0..3)];
    match rng.gen_range(0..8) {
        0..=2 => Gate::cnot(a, b),
        3 => Gate::H(a),
        4 => Gate::S(a),
        5 => Gate::Sdg(a),
        6 => Gate::rz(a, theta),
        _ => Gate::cphase(a, b, theta),
    }
}

#[test]
fn peephole_preserves_unitary() {
    let o = Oracle::default();
    let mut rng = StdRng::seed_from_u64(11);
    let mut removed = 0;
    for _ in 0..200 {
        let n = rng.gen_range(2..=4);
        let len = rng.gen_range(0..40);
        let c = on(n, (0..len).map(|_| random_gate(&mut rng, n)).collect());
        let p = peephole_cancel(&c);
        assert!(p.len() <= c.len());
        removed += c.len() - p.len();
        let d = o.circuit_matrix(&c).unwrap().max_abs_diff(&o.circuit_matrix(&p).unwrap());
        assert!(d < 1e-12, "{d}\n{}", c.to_text());
    }
    assert!(removed > 0);
}

#[test]
fn peephole_examples() {
    let c = on(4, vec![Gate::cnot(1, 3), Gate::cnot(1, 3)]);
    assert!(peephole_cancel(&c).is_empty());
    let c = on(4, vec![Gate::cnot(1, 3), Gate::rz(1, 0.3), Gate::cnot(1, 3)]);
    assert_eq!(peephole_cancel(&c).gates(), &[Gate::rz(1, 0.3)]);
    let c = on(4, vec![Gate::cnot(1, 3), Gate::rz(3, 0.3), Gate::cnot(1, 3)]);
    assert_eq!(peephole_cancel(&c).gates(), c.gates());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn text_format_round_trips(seed in any::<u64>(), len in 0usize..30) {
        let mut rng = StdRng::seed_from_u64(seed);
        let c = on(5, (0..len).map(|_| random_gate(&mut rng, 5)).collect());
        let text = c.to_text();
        let back = Circuit::from_text(&text).unwrap();
        prop_assert_eq!(&back, &c);
        prop_assert_eq!(back.to_text(), text);
    }
}

#[test]
fn inverse_undoes_circuit() {
    let o = Oracle::default();
    let mut rng = StdRng::seed_from_u64(3);
    let c = on(4, (0..30).map(|_| random_gate(&mut rng, 4)).collect());
    let mut both = c.clone();
    both.append(&c.inverse());
    assert!(o.circuit_matrix(&both).unwrap().distance(&DenseOperator::identity(4)) < 1e-12);
}

fn hopping_chain(l: usize) -> qsynth::model::HamiltonianModel {
    let g = LatticeGeometry::new(1, l, Boundary::Open, Ordering::RowMajorLex).unwrap();
    let mut b = ModelBuilder::new(g, BosonRegister::new(0, 1, 1.0).unwrap(), 1);
    for link in g.classify_links() {
        b = b.hopping(HoppingTerm::hop(link.lower, 1, link.upper, 1, 0.8));
    }
    b.build().unwrap()
}

#[test]
fn fused_matches_naive_with_fewer_cnots() {
    let o = Oracle::default();
    let h = compile(&hopping_chain(3), Encoding::Jw).unwrap();
    for s in Strategy::ALL {
        let f = trotter_step(&h, 0.3, Policy::Fused, s).unwrap();
        let n = trotter_step(&h, 0.3, Policy::Naive, s).unwrap();
        assert!(o.circuit_matrix(&f).unwrap().distance(&o.circuit_matrix(&n).unwrap()) < 1e-10);
        assert!(f.count_cnot() <= n.count_cnot());
    }
}

#[test]
fn red_link_fusion_saves_a_factor_of_l() {
    let ratio = |l: usize| {
        let p = PresetParams::new(2, l, Boundary::Open, Ordering::RowMajorLex, 1, 1.0).set("coupling", 0.0);
        let mut h = compile(&build_preset("hopping_toy", &p).unwrap(), Encoding::Jw).unwrap();
        h.groups.retain(|g| g.label == "axis2");
        assert_eq!(h.groups.len(), 1);
        h.kinetic = qsynth::PauliSum::new();
        let f = trotter_step(&h, 0.1, Policy::Fused, Strategy::PivotLadder).unwrap().count_cnot();
        let n = trotter_step(&h, 0.1, Policy::Naive, Strategy::PivotLadder).unwrap().count_cnot();
        f as f64 / n as f64
    };
    let base = 3.0 * ratio(3);
    for l in [4, 5] {
        let scaled = l as f64 * ratio(l) / base;
        assert!((0.7..=1.3).contains(&scaled), "L={l}: {scaled}");
    }
}

#[test]
fn zero_step_is_identity() {
    let o = Oracle::default();
    let p = PresetParams::new(1, 2, Boundary::Open, Ordering::RowMajorLex, 2, 1.5);
    let h = compile(&build_preset("hopping_toy", &p).unwrap(), Encoding::Jw).unwrap();
    let c = trotter_step(&h, 0.0, Policy::Fused, Strategy::BalancedTree).unwrap();
    let id = DenseOperator::identity(h.num_qubits());
    assert!(o.circuit_matrix(&c).unwrap().distance(&id) < 1e-10);
    let p = peephole_cancel(&c);
    assert!(p.gates().iter().all(|g| !matches!(g, Gate::Rz { theta, .. } if *theta == 0.0)));
    assert!(o.circuit_matrix(&p).unwrap().distance(&id) < 1e-10);
}

#[test]
fn trotter_error_is_second_order() {
    let o = Oracle::default();
    let p = PresetParams::new(1, 2, Boundary::Open, Ordering::RowMajorLex, 1, 1.0);
    let h = compile(&build_preset("hopping_toy", &p).unwrap(), Encoding::Jw).unwrap();
    for s in Strategy::ALL {
        let e1 = o.trotter_error(&h, 0.2, Policy::Naive, s).unwrap();
        let e2 = o.trotter_error(&h, 0.1, Policy::Naive, s).unwrap();
        assert!((3.2..=4.8).contains(&(e1 / e2)), "{}", e1 / e2);
    }
    assert!(o.trotter_error(&h, 0.0, Policy::Fused, Strategy::PivotLadder).unwrap() < 1e-12);
}
