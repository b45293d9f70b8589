use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qsynth::circuit::{trotter_step, Circuit, Gate, Policy, Strategy};
use qsynth::compiled::{compile, Encoding};
use qsynth::lattice::{Boundary, Ordering};
use qsynth::model::{build_preset, PresetParams};
use qsynth::oracle::{basis_state, DenseOperator, Oracle, ORACLE_LIMIT_ENV};
use qsynth::{Error, Pauli, PauliString, PauliSum};

const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn random_circuit(rng: &mut StdRng, n: usize, len: usize) -> Circuit {
    let mut c = Circuit::with_qubits(n);
    for _ in 0..len {
        let a = rng.gen_range(0..n);
        let b = (a + rng.gen_range(1..n)) % n;
        let th = rng.gen_range(-3.0..3.0);
        c.push(match rng.gen_range(0..7) {
            0 => Gate::cnot(a, b),
            1 => Gate::H(a),
            2 => Gate::S(a),
            3 => Gate::Sdg(a),
            4 => Gate::rz(a, th),
            5 => Gate::cphase(a, b, th),
            _ => Gate::Swap(a, b),
        });
    }
    c
}

#[test]
fn circuit_matrix_is_multiplicative_and_unitary() {
    let o = Oracle::default();
    let mut rng = StdRng::seed_from_u64(2);
    for _ in 0..30 {
        let a = random_circuit(&mut rng, 4, 25);
        let b = random_circuit(&mut rng, 4, 25);
        let mut ab = a.clone();
        ab.append(&b);
        let (ma, mb) = (o.circuit_matrix(&a).unwrap(), o.circuit_matrix(&b).unwrap());
        // Execution order: a first, so U = U_b U_a.
        assert!(o.circuit_matrix(&ab).unwrap().max_abs_diff(&mb.matmul(&ma)) < 1e-12);
        assert!(ma.unitarity_deviation() < 1e-12);
    }
}

#[test]
fn gate_examples() {
    let o = Oracle::default();
    let mut c = Circuit::with_qubits(2);
    c.push(Gate::cnot(0, 1));
    // |10⟩ with qubit 0 set is basis index 1; the result sets qubit 1 too.
    let mut v = basis_state(4, 1);
    o.apply_circuit(&c, &mut v).unwrap();
    assert_eq!(v, basis_state(4, 3));

    let mut hh = Circuit::with_qubits(1);
    hh.push(Gate::H(0));
    hh.push(Gate::H(0));
    assert!(o.circuit_matrix(&hh).unwrap().max_abs_diff(&DenseOperator::identity(1)) < 1e-15);

    let z = o.pauli_string_matrix(&PauliString::single(0, Pauli::Z), 1).unwrap();
    assert_eq!((z.get(0, 0), z.get(1, 1)), (ONE, -ONE));
    let zz = o.pauli_string_matrix(&PauliString::z_string([0, 1]), 2).unwrap();
    let diag: Vec<f64> = (0..4).map(|k| zz.get(k, k).re).collect();
    assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
    assert!(o.apply_circuit(&c, &mut basis_state(8, 0)).is_err());
}

#[test]
fn sum_matrix_respects_canonical_form() {
    let o = Oracle::default();
    let mut rng = StdRng::seed_from_u64(9);
    for _ in 0..40 {
        let mut s = PauliSum::new();
        for _ in 0..6 {
            let letters: Vec<(usize, Pauli)> = (0..3)
                .filter_map(|q| {
                    let c = rng.gen_range(0..4);
                    (c > 0).then(|| (q, Pauli::ALL[c - 1]))
                })
                .collect();
            s.push(rng.gen_range(-1.0..1.0), PauliString::from_letters(letters));
        }
        let a = o.pauli_sum_matrix(&s, 3).unwrap();
        let b = o.pauli_sum_matrix(&s.canonicalize().unwrap(), 3).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-12);
        assert!(a.hermiticity_deviation() < 1e-12);
    }
}

#[test]
fn expm_examples() {
    let o = Oracle::default();
    let z = o.pauli_string_matrix(&PauliString::single(0, Pauli::Z), 1).unwrap();
    let u = z.expm_hermitian(0.4).unwrap();
    assert!((u.get(0, 0) - Complex64::from_polar(1.0, -0.4)).norm() < 1e-14);
    assert!((u.get(1, 1) - Complex64::from_polar(1.0, 0.4)).norm() < 1e-14);
    assert!(z.expm_hermitian(0.0).unwrap().max_abs_diff(&DenseOperator::identity(1)) < 1e-14);

    let x = o.pauli_string_matrix(&PauliString::single(0, Pauli::X), 1).unwrap();
    let u = x.expm_hermitian(std::f64::consts::FRAC_PI_2).unwrap();
    // e^{-iπX/2} = -iX
    assert!(u.max_abs_diff(&x.scale(Complex64::new(0.0, -1.0))) < 1e-14);
}

#[test]
fn trotter_error_limits() {
    let o = Oracle::default();
    let p = PresetParams::new(1, 2, Boundary::Open, Ordering::RowMajorLex, 1, 1.0);
    let h = compile(&build_preset("hopping_toy", &p).unwrap(), Encoding::Jw).unwrap();
    for s in Strategy::ALL {
        assert!(o.trotter_error(&h, 0.0, Policy::Fused, s).unwrap() < 1e-12);
    }

    // A purely diagonal Hamiltonian: every group commutes, so one step is exact.
    let mut diag = h.clone();
    diag.kinetic = PauliSum::new();
    for g in &mut diag.groups {
        let kept: Vec<(f64, PauliString)> = g
            .terms
            .terms()
            .iter()
            .filter(|(_, s)| s.letters().values().all(|&l| l == Pauli::Z))
            .cloned()
            .collect();
        g.terms = PauliSum::from_terms(kept);
    }
    assert!(!diag.coordinate_sum().is_empty());
    for eps in [0.1, 0.7] {
        assert!(o.trotter_error(&diag, eps, Policy::Naive, Strategy::ChainLadder).unwrap() < 1e-12);
    }
    let c = trotter_step(&h, 0.3, Policy::Fused, Strategy::PivotLadder).unwrap();
    assert!(o.circuit_matrix(&c).unwrap().unitarity_deviation() < 1e-12);
}

#[test]
fn oracle_limit() {
    let o = Oracle::new(3);
    assert!(matches!(
        o.pauli_string_matrix(&PauliString::single(0, Pauli::Z), 4),
        Err(Error::OracleLimit { qubits: 4, limit: 3 })
    ));
    assert!(o.circuit_matrix(&Circuit::with_qubits(3)).is_ok());
    assert!(o.circuit_matrix(&Circuit::with_qubits(4)).is_err());
    assert!(o.pauli_string_matrix(&PauliString::single(3, Pauli::Z), 3).is_err());

    // Only this test touches the variable.
    std::env::set_var(ORACLE_LIMIT_ENV, "5");
    let o = Oracle::from_env().unwrap();
    assert!(o.check(5).is_ok() && o.check(6).is_err());
    std::env::set_var(ORACLE_LIMIT_ENV, "21");
    assert!(matches!(Oracle::from_env(), Err(Error::Config(_))));
    std::env::set_var(ORACLE_LIMIT_ENV, "many");
    assert!(matches!(Oracle::from_env(), Err(Error::Config(_))));
    std::env::remove_var(ORACLE_LIMIT_ENV);
    assert!(Oracle::from_env().unwrap().check(14).is_ok());
}
