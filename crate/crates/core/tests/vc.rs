use qsynth::boson::BosonRegister;
use qsynth::compiled::{compile, Encoding};
use qsynth::lattice::{Boundary, LatticeGeometry, Ordering};
use qsynth::model::{build_preset, HamiltonianModel, HoppingTerm, ModelBuilder, PresetParams};
use qsynth::oracle::{DenseOperator, Oracle};
use qsynth::vc::{penalty_hamiltonian, physical_projector, projector_onto, vc_transform};
use qsynth::{Error, PauliString};

/// Mode-diagonal hopping on every link plus a site-dependent mass.
fn fermions(d: usize, l: usize, m: usize) -> HamiltonianModel {
    let g = LatticeGeometry::new(d, l, Boundary::Open, Ordering::Snake).unwrap();
    let mut b = ModelBuilder::new(g, BosonRegister::new(0, 1, 1.0).unwrap(), m);
    for n in 1..=g.num_sites() {
        for a in 1..=m {
            b = b.hopping(HoppingTerm::hop(n, a, n, a, 0.2 * n as f64 - 0.3 * a as f64));
        }
    }
    for (i, link) in g.classify_links().iter().enumerate() {
        for a in 1..=m {
            b = b.hopping(HoppingTerm::hop(link.lower, a, link.upper, a, 0.6 + 0.15 * (i + a) as f64));
        }
    }
    b.build().unwrap()
}

#[test]
fn layout_and_dressed_links_on_the_square() {
    let vc = vc_transform(&fermions(2, 2, 1)).unwrap();
    assert_eq!(vc.compiled.num_qubits(), 4 * (1 + 1));
    let pairs: Vec<(usize, usize)> =
        vc.augmentation.paired_links.iter().map(|p| (p.link.lower, p.link.upper)).collect();
    assert_eq!(pairs, vec![(1, 4), (2, 3)]);

    // Site n occupies qubits 2(n-1) and 2(n-1)+1.
    let block = |q: usize| q / 2 + 1;
    let axis2 = &vc.compiled.group("axis2").unwrap().terms;
    let from_14: Vec<&PauliString> = axis2
        .terms()
        .iter()
        .map(|t| &t.1)
        .filter(|s| s.support().any(|q| block(q) == 1))
        .collect();
    assert!(!from_14.is_empty());
    for s in from_14 {
        assert!(s.support().all(|q| block(q) == 1 || block(q) == 4), "{s}");
    }
}

#[test]
fn axis_one_terms_match_plain_jw_without_auxiliaries() {
    let model = fermions(2, 3, 2);
    let vc = vc_transform(&model).unwrap();
    let jw = compile(&model, Encoding::Jw).unwrap();
    let lay = vc.compiled.layout;
    let m = model.modes_per_site;
    let strip = |s: &PauliString| {
        s.remap(|q| {
            if lay.is_aux_qubit(q) {
                None
            } else {
                let w = lay.block_width();
                Some(q / w * m + q % w)
            }
        })
    };
    let vc_terms: Vec<(f64, PauliString)> = vc
        .compiled
        .group("axis1")
        .unwrap()
        .terms
        .terms()
        .iter()
        .map(|(c, s)| (*c, strip(s)))
        .collect();
    assert_eq!(vc_terms, jw.group("axis1").unwrap().terms.terms());
}

#[test]
fn stabilizers_commute_with_everything() {
    let o = Oracle::default();
    for (d, l, m) in [(2, 2, 1), (2, 3, 1), (2, 4, 1), (2, 3, 2), (3, 2, 1), (3, 3, 1)] {
        let vc = vc_transform(&fermions(d, l, m)).unwrap();
        let h = vc.compiled.coordinate_sum();
        let st = &vc.stabilizers;
        let all: Vec<&PauliString> =
            st.full_set.iter().chain(&st.local_generators).chain(&st.spectators).collect();
        for s in &all {
            assert!(s.is_hermitian());
            assert!(h.terms().iter().all(|(_, t)| t.commutes(s)), "d={d} L={l}: {s}");
            assert!(all.iter().all(|t| t.commutes(s)));
        }
        if vc.compiled.num_qubits() <= 8 {
            let n = vc.compiled.num_qubits();
            let hm = o.pauli_sum_matrix(&h, n).unwrap();
            for s in &all {
                let sm = o.pauli_string_matrix(s, n).unwrap();
                assert!(hm.commutator(&sm).max_abs() < 1e-12);
            }
        }
    }
}

#[test]
fn locality_is_independent_of_l() {
    for m in [1, 2] {
        let w: Vec<usize> = [2, 3, 4]
            .iter()
            .map(|&l| vc_transform(&fermions(2, l, m)).unwrap().compiled.max_weight())
            .collect();
        assert!(w.iter().all(|&x| x == w[0]), "m={m}: {w:?}");
    }
    let w: Vec<usize> =
        [2, 3].iter().map(|&l| vc_transform(&fermions(3, l, 1)).unwrap().compiled.max_weight()).collect();
    assert_eq!(w[0], w[1]);
}

#[test]
fn penalty_on_the_square() {
    let o = Oracle::default();
    let vc = vc_transform(&fermions(2, 2, 1)).unwrap();
    let st = &vc.stabilizers;
    assert_eq!(st.local_generators.len(), 2);
    let block = vc.compiled.layout.block_width();
    assert!(st.local_generators.iter().all(|g| g.weight() <= 4 * block));

    // Turn link first, then the product of the two vertical link operators.
    let (s14, s23) = (&st.full_set[0], &st.full_set[1]);
    assert_eq!(&st.local_generators[0], s23);
    assert_eq!(st.local_generators[1], s14.mul(s23));

    let pen = penalty_hamiltonian(st, 1.0).unwrap();
    assert_eq!(pen.len(), 2);
    assert!(penalty_hamiltonian(st, 0.0).is_err());
    let n = vc.compiled.num_qubits();
    let pm = o.pauli_sum_matrix(&pen, n).unwrap();
    let (vals, vecs) = pm.eigh().unwrap();
    let ground: Vec<usize> = (0..vals.len()).filter(|&i| (vals[i] - vals[0]).abs() < 1e-9).collect();
    let basis = nalgebra::DMatrix::from_fn(vecs.nrows(), ground.len(), |r, c| vecs[(r, ground[c])]);
    let ground_proj = DenseOperator::from_matrix(&basis * basis.adjoint()).unwrap();
    let joint = projector_onto(&st.full_set, n, &o).unwrap();
    assert!(ground_proj.max_abs_diff(&joint) < 1e-10);
}

#[test]
fn physical_sector_reproduces_the_jw_spectrum() {
    let o = Oracle::default();
    let model = fermions(2, 2, 1);
    let vc = vc_transform(&model).unwrap();
    let n = vc.compiled.num_qubits();
    let proj = physical_projector(&vc.stabilizers, n, &o).unwrap();
    assert_eq!(proj.projector_rank().unwrap(), 16);
    assert!(proj.matmul(&proj).max_abs_diff(&proj) < 1e-12);
    let hm = o.pauli_sum_matrix(&vc.compiled.coordinate_sum(), n).unwrap();
    assert!(hm.commutator(&proj).max_abs() < 1e-12);
    for s in vc.stabilizers.full_set.iter().chain(&vc.stabilizers.spectators) {
        let sm = o.pauli_string_matrix(s, n).unwrap();
        assert!(proj.matmul(&sm).matmul(&proj).max_abs_diff(&proj) < 1e-12);
    }
    let vc_spec = hm.restricted_spectrum(&proj.range_basis().unwrap()).unwrap();
    let jw = compile(&model, Encoding::Jw).unwrap();
    let jw_spec = o
        .pauli_sum_matrix(&jw.coordinate_sum(), jw.num_qubits())
        .unwrap()
        .eigenvalues()
        .unwrap();
    assert_eq!(vc_spec.len(), jw_spec.len());
    for (a, b) in vc_spec.iter().zip(&jw_spec) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn one_dimension_adds_nothing() {
    let model = fermions(1, 4, 2);
    let vc = vc_transform(&model).unwrap();
    let jw = compile(&model, Encoding::Jw).unwrap();
    assert_eq!(vc.compiled.num_qubits(), jw.num_qubits());
    assert_eq!(vc.compiled.coordinate_sum(), jw.coordinate_sum());
    assert!(vc.stabilizers.full_set.is_empty());
}

#[test]
fn periodic_or_row_major_rejected() {
    let p = PresetParams::new(2, 3, Boundary::Periodic, Ordering::Snake, 1, 1.0);
    let m = build_preset("hopping_toy", &p).unwrap();
    assert!(matches!(vc_transform(&m), Err(Error::Config(_))));
    let p = PresetParams::new(2, 3, Boundary::Open, Ordering::RowMajorLex, 1, 1.0);
    let m = build_preset("hopping_toy", &p).unwrap();
    assert!(matches!(compile(&m, Encoding::Vc), Err(Error::Config(_))));
}
