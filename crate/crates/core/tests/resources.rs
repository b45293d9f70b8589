use std::collections::BTreeMap;

use qsynth::circuit::{trotter_step, Circuit, Policy, Strategy};
use qsynth::compiled::{compile, Encoding};
use qsynth::lattice::{Boundary, Ordering};
use qsynth::model::{build_preset, HamiltonianModel, PresetParams};
use qsynth::resources::{count, fit_exponent, qcd_estimate, scaling_fit, ReportMeta, DEFAULT_T_FACTOR};

fn toy(d: usize, l: usize) -> qsynth::Result<HamiltonianModel> {
    build_preset("hopping_toy", &PresetParams::new(d, l, Boundary::Open, Ordering::Snake, 1, 1.0))
}

/// Tallies gate mnemonics straight from the exported text.
fn recount(text: &str) -> BTreeMap<String, usize> {
    let mut m = BTreeMap::new();
    for line in text.lines().skip(1) {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        *m.entry(line.split_whitespace().next().unwrap().to_string()).or_insert(0) += 1;
    }
    m
}

#[test]
fn independent_recount() {
    let model = toy(2, 4).unwrap();
    let h = compile(&model, Encoding::Jw).unwrap();
    let c = trotter_step(&h, 0.1, Policy::Fused, Strategy::PivotLadder).unwrap();
    let r = count(&c, DEFAULT_T_FACTOR, ReportMeta::for_model(&model, Policy::Fused, Encoding::Jw));
    let m = recount(&c.to_text());
    let get = |k: &str| m.get(k).copied().unwrap_or(0);
    assert_eq!(r.cnot, get("cx"));
    assert_eq!(r.h, get("h"));
    assert_eq!(r.s, get("s"));
    assert_eq!(r.sdg, get("sdg"));
    assert_eq!(r.rz, get("rz"));
    assert_eq!(r.cphase, get("cp"));
    assert_eq!(r.swap, get("swap"));
    assert_eq!(r.rotations, get("rz") + get("cp"));
    assert!(r.cnot > 0 && r.depth > 0);

    let back = Circuit::from_text(&c.to_text()).unwrap();
    assert_eq!(count(&back, DEFAULT_T_FACTOR, r.meta.clone()), r);
}

#[test]
fn power_law_fit() {
    for k in [1.0, 2.0, 3.7] {
        let pts: Vec<(f64, f64)> = (2..=7).map(|l| (l as f64, 3.0 * (l as f64).powf(k))).collect();
        assert!((fit_exponent(&pts).unwrap() - k).abs() < 1e-6);
    }
    assert!(fit_exponent(&[(2.0, 1.0), (2.0, 2.0), (2.0, 3.0)]).is_err());
    assert!(fit_exponent(&[(2.0, 1.0), (3.0, 0.0), (4.0, 3.0)]).is_err());
}

#[test]
fn t_estimate_is_monotone() {
    let model = toy(1, 3).unwrap();
    let h = compile(&model, Encoding::Jw).unwrap();
    let c = trotter_step(&h, 0.1, Policy::Naive, Strategy::PivotLadder).unwrap();
    let meta = ReportMeta::default();
    let mut last = 0.0;
    for t in [10.0, 20.0, 30.0, 50.0] {
        let r = count(&c, t, meta.clone());
        assert_eq!(r.t_estimate, r.rotations as f64 * t);
        assert!(r.t_estimate > last);
        last = r.t_estimate;
    }
    assert_eq!(count(&c, 1.0, meta.clone()).t_estimate, count(&c, 10.0, meta.clone()).t_estimate);
    assert_eq!(count(&c, 99.0, meta.clone()).t_estimate, count(&c, 50.0, meta.clone()).t_estimate);

    let mut more = c.clone();
    more.append(&c);
    assert!(count(&more, 25.0, meta.clone()).t_estimate > count(&c, 25.0, meta).t_estimate);
}

#[test]
fn one_dimensional_chain_is_linear() {
    let fit = scaling_fit(|l| toy(1, l), &[4, 6, 8, 10, 12], Policy::Fused, Strategy::PivotLadder, Encoding::Jw)
        .unwrap();
    assert!((0.8..=1.2).contains(&fit.exponent), "{}", fit.exponent);
    assert_eq!(fit.reports.len(), 5);
    assert_eq!(fit.reports[2].meta.extent, 8);
    assert!(scaling_fit(|l| toy(1, l), &[4, 4, 6], Policy::Fused, Strategy::PivotLadder, Encoding::Jw).is_err());
}

#[test]
fn qcd_estimate_values() {
    let e = qcd_estimate(3, 2, 3, 2, 1, 25.0, Policy::Fused).unwrap();
    assert_eq!(e.real_modes_per_site, 48);
    assert_eq!(e.fermion_qubits_per_site, 24);
    assert_eq!(e.boson_qubits_per_site, 2 * 3 * 9);
    assert_eq!(e.aux_qubits_per_site, 2);
    assert_eq!(e.total_qubits, 8 * (24 + 54 + 2));
    assert_eq!(e.total.cnot, 8 * e.per_site.cnot);
    assert_eq!(e.total.rotations, 8 * e.per_site.rotations);
    assert!((e.total.t_estimate - 8.0 * e.per_site.t_estimate).abs() < 1e-9);
    assert_eq!(e.total.meta.encoding, "vc");

    // Per-site cost does not depend on L.
    let big = qcd_estimate(3, 2, 3, 4, 1, 25.0, Policy::Fused).unwrap();
    assert_eq!(big.per_site.cnot, e.per_site.cnot);
    assert_eq!(big.total.cnot, 64 * e.per_site.cnot);
    assert!(qcd_estimate(0, 2, 3, 2, 1, 25.0, Policy::Fused).is_err());
}

#[test]
fn report_json_fields() {
    let model = toy(1, 2).unwrap();
    let h = compile(&model, Encoding::Jw).unwrap();
    let c = trotter_step(&h, 0.1, Policy::Fused, Strategy::PivotLadder).unwrap();
    let r = count(&c, 25.0, ReportMeta::for_model(&model, Policy::Fused, Encoding::Jw));
    let line = r.to_json_line();
    assert!(!line.contains('\n'));
    let v: serde_json::Value = serde_json::from_str(&line).unwrap();
    for k in ["cnot", "h", "s", "sdg", "rz", "cphase", "swap", "rotations", "depth", "t_estimate"] {
        assert!(v.get(k).is_some(), "{k}");
    }
    let meta = &v["meta"];
    for k in ["model_hash", "policy", "L", "d", "Q", "encoding"] {
        assert!(meta.get(k).is_some(), "{k}");
    }
    assert_eq!(meta["policy"], "fused");
    assert_eq!(meta["L"], 2);
}
