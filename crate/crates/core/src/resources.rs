//! Gate tallies, T-count estimates and scaling fits.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::circuit::{trotter_step, Circuit, Gate, Policy, Strategy};
use crate::compiled::{compile, Encoding};
use crate::error::{Error, Result};
use crate::lattice::{Boundary, Ordering};
use crate::model::{build_preset, HamiltonianModel, PresetParams};

pub const DEFAULT_T_FACTOR: f64 = 25.0;
pub const T_FACTOR_RANGE: (f64, f64) = (10.0, 50.0);

/// T gates per arbitrary-angle rotation, clamped to the supported range.
pub fn clamp_t_factor(t: f64) -> f64 {
    let (lo, hi) = T_FACTOR_RANGE;
    if t.is_nan() {
        log::warn!("t_factor is NaN, using default {DEFAULT_T_FACTOR}");
        return DEFAULT_T_FACTOR;
    }
    if !(lo..=hi).contains(&t) {
        let c = t.clamp(lo, hi);
        log::warn!("t_factor {t} outside [{lo}, {hi}], clamped to {c}");
        return c;
    }
    t
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReportMeta {
    pub model_hash: String,
    pub policy: String,
    #[serde(rename = "L")]
    pub extent: usize,
    pub d: usize,
    #[serde(rename = "Q")]
    pub q: usize,
    pub encoding: String,
}

impl ReportMeta {
    pub fn for_model(model: &HamiltonianModel, policy: Policy, encoding: Encoding) -> Self {
        ReportMeta {
            model_hash: model.content_hash(),
            policy: policy.name().to_string(),
            extent: model.geometry.extent,
            d: model.geometry.dims,
            q: model.bosons.qubits_per_boson,
            encoding: encoding.name().to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ResourceReport {
    pub cnot: usize,
    pub h: usize,
    pub s: usize,
    pub sdg: usize,
    pub rz: usize,
    pub cphase: usize,
    pub swap: usize,
    /// Arbitrary-angle rotations: `rz + cphase`.
    pub rotations: usize,
    pub depth: usize,
    pub t_estimate: f64,
    pub meta: ReportMeta,
}

impl ResourceReport {
    /// One JSON line.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

/// Exact tallies of `c`.
pub fn count(c: &Circuit, t_factor: f64, meta: ReportMeta) -> ResourceReport {
    let mut r = ResourceReport {
        meta,
        ..Default::default()
    };
    for g in c.gates() {
        match g {
            Gate::Cnot { .. } => r.cnot += 1,
            Gate::H(_) => r.h += 1,
            Gate::S(_) => r.s += 1,
            Gate::Sdg(_) => r.sdg += 1,
            Gate::Rz { .. } => r.rz += 1,
            Gate::CPhase { .. } => r.cphase += 1,
            Gate::Swap(..) => r.swap += 1,
        }
    }
    r.rotations = r.rz + r.cphase;
    r.depth = c.depth();
    r.t_estimate = r.rotations as f64 * clamp_t_factor(t_factor);
    r
}

/// Least-squares slope of `log y` against `log x`.
pub fn fit_exponent(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "scaling fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(Error::InvalidArgument("scaling fit needs positive values".into()));
    }
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = points.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("scaling fit needs distinct L values".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub exponent: f64,
    pub reports: Vec<ResourceReport>,
}

/// Synthesizes one Trotter step per `L` from `template` and fits the CNOT
/// exponent. Per-`L` jobs run in parallel; results keep the input order.
pub fn scaling_fit<F>(
    template: F,
    extents: &[usize],
    policy: Policy,
    strategy: Strategy,
    encoding: Encoding,
) -> Result<ScalingFit>
where
    F: Fn(usize) -> Result<HamiltonianModel> + Sync,
{
    use rayon::prelude::*;
    let mut uniq = extents.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    if uniq.len() < 3 {
        return Err(Error::InvalidArgument(
            "scaling fit needs at least 3 distinct L values".into(),
        ));
    }
    let reports = extents
        .par_iter()
        .map(|&l| {
            let model = template(l)?;
            let h = compile(&model, encoding)?;
            let c = trotter_step(&h, 0.1, policy, strategy)?;
            Ok(count(&c, DEFAULT_T_FACTOR, ReportMeta::for_model(&model, policy, encoding)))
        })
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = extents
        .iter()
        .zip(&reports)
        .map(|(&l, r)| (l as f64, r.cnot as f64))
        .collect();
    Ok(ScalingFit {
        exponent: fit_exponent(&pts)?,
        reports,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcdEstimate {
    pub n_c: usize,
    pub n_f: usize,
    pub real_modes_per_site: usize,
    pub fermion_qubits_per_site: usize,
    pub boson_qubits_per_site: usize,
    pub aux_qubits_per_site: usize,
    pub total_qubits: usize,
    /// Tallies for one site: its on-site terms, its `d` forward links, the
    /// kinetic rotations and Fourier transforms of its link bosons.
    pub per_site: ResourceReport,
    /// `per_site` scaled by `L^d`; depth is the serial upper bound.
    pub total: ResourceReport,
}

/// Formula-level estimate for a lattice with `4·Nc·Nf` complex fermion
/// modes and `2·d·Nc²` link bosons per site, encoded with auxiliary fermions
/// so that every term has `L`-independent weight.
///
/// The per-site constants come from synthesizing the unit cell of the
/// `qcd_layout` preset on a small open snake lattice: the terms of one
/// interior site (on-site terms and the links to its forward neighbours).
pub fn qcd_estimate(
    n_c: usize,
    n_f: usize,
    d: usize,
    extent: usize,
    q: usize,
    t_factor: f64,
    policy: Policy,
) -> Result<QcdEstimate> {
    if n_c == 0 || n_f == 0 || d == 0 || extent == 0 || q == 0 {
        return Err(Error::InvalidArgument("qcd_estimate parameters must be >= 1".into()));
    }
    let cell = unit_cell_circuit(n_c, n_f, d, q, policy)?;
    let m = 4 * n_c * n_f;
    let sites = extent
        .checked_pow(d as u32)
        .ok_or_else(|| Error::InvalidArgument("lattice too large".into()))?;
    let boson_q = 2 * d * n_c * n_c * q;
    let aux = d - 1;
    let mut hasher = Sha256::new();
    hasher.update(format!("qcd_layout Nc={n_c} Nf={n_f} d={d} L={extent} Q={q}").as_bytes());
    let meta = ReportMeta {
        model_hash: hasher.finalize().iter().map(|b| format!("{b:02x}")).collect(),
        policy: policy.name().to_string(),
        extent,
        d,
        q,
        encoding: Encoding::Vc.name().to_string(),
    };
    let per_site = count(&cell, t_factor, meta.clone());
    let scale = |x: usize| x * sites;
    let total = ResourceReport {
        cnot: scale(per_site.cnot),
        h: scale(per_site.h),
        s: scale(per_site.s),
        sdg: scale(per_site.sdg),
        rz: scale(per_site.rz),
        cphase: scale(per_site.cphase),
        swap: scale(per_site.swap),
        rotations: scale(per_site.rotations),
        depth: scale(per_site.depth),
        t_estimate: per_site.t_estimate * sites as f64,
        meta,
    };
    Ok(QcdEstimate {
        n_c,
        n_f,
        real_modes_per_site: 2 * m,
        fermion_qubits_per_site: m,
        boson_qubits_per_site: boson_q,
        aux_qubits_per_site: aux,
        total_qubits: sites * (m + boson_q + aux),
        per_site: per_site.clone(),
        total,
    })
}

/// Circuit for one site's share of a Trotter step.
fn unit_cell_circuit(n_c: usize, n_f: usize, d: usize, q: usize, policy: Policy) -> Result<Circuit> {
    // L = 3 gives an interior site (2,..,2) with forward links on every axis.
    let params = PresetParams::new(d, 3, Boundary::Open, Ordering::Snake, q, 4.0)
        .set("Nc", n_c as f64)
        .set("Nf", n_f as f64);
    let full = build_preset("qcd_layout", &params)?;
    let site = full.geometry.site_index(&vec![2; d])?;
    let geo = full.geometry;
    let here = geo.site_coords(site)?;
    let mut cell = full.clone();
    cell.hopping.retain(|h| {
        if h.is_onsite() {
            return h.n == site;
        }
        let other = if h.n == site {
            h.nprime
        } else if h.nprime == site {
            h.n
        } else {
            return false;
        };
        let oc = geo.site_coords(other).expect("site in range");
        oc.iter().zip(&here).all(|(o, x)| o >= x)
    });
    let h = compile(&cell, Encoding::Vc)?;
    // Kinetic rotations and Fourier transforms only for this site's bosons.
    let per_site_bosons = 2 * d * n_c * n_c;
    let first = (site - 1) * per_site_bosons;
    let mut h = h;
    let keep = |qb: usize| {
        let b = qb / q;
        b >= first && b < first + per_site_bosons
    };
    let kin = crate::pauli::PauliSum::from_terms(
        h.kinetic
            .terms()
            .iter()
            .filter(|(_, s)| s.support().all(keep))
            .cloned()
            .collect(),
    );
    h.kinetic = kin;
    h.bosons = crate::boson::BosonRegister {
        num_bosons: per_site_bosons,
        qubit_offset: first * q,
        ..h.bosons
    };
    trotter_step(&h, 0.1, policy, Strategy::PivotLadder)
}
