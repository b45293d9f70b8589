//! Declarative lattice models `H = Σ p̂²/2 + V(x̂) + Σ (fermion bilinear)·(boson monomial)`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::boson::BosonRegister;
use crate::error::{Error, Result};
use crate::lattice::{Boundary, LatticeGeometry, Ordering};

/// Default cap on the total degree of a boson monomial attached to a
/// fermion bilinear.
pub const DEFAULT_MAX_MONOMIAL_DEGREE: usize = 4;

/// Fermionic qubit layout. Site `n` owns a contiguous block of
/// `modes_per_site + aux_per_site` qubits: its matter modes first, then its
/// auxiliary modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FermionLayout {
    pub geometry: LatticeGeometry,
    pub modes_per_site: usize,
    pub aux_per_site: usize,
    pub qubit_offset: usize,
}

impl FermionLayout {
    pub fn new(geometry: LatticeGeometry, modes_per_site: usize, qubit_offset: usize) -> Self {
        FermionLayout {
            geometry,
            modes_per_site,
            aux_per_site: 0,
            qubit_offset,
        }
    }

    pub fn with_aux(mut self, aux_per_site: usize) -> Self {
        self.aux_per_site = aux_per_site;
        self
    }

    pub fn block_width(&self) -> usize {
        self.modes_per_site + self.aux_per_site
    }

    /// Complex modes (= qubits) including auxiliaries.
    pub fn num_modes(&self) -> usize {
        self.geometry.num_sites() * self.block_width()
    }

    pub fn num_matter_modes(&self) -> usize {
        self.geometry.num_sites() * self.modes_per_site
    }

    pub fn num_majoranas(&self) -> usize {
        2 * self.num_modes()
    }

    fn check_site(&self, n: usize) -> Result<()> {
        let s = self.geometry.num_sites();
        if n == 0 || n > s {
            return Err(Error::IndexOutOfRange {
                what: "site",
                index: n,
                limit: s,
            });
        }
        Ok(())
    }

    /// 1-based global complex-mode index of matter mode `a` (1-based) at
    /// site `n`; equals `m(n-1) + a` without auxiliaries.
    pub fn matter_mode(&self, n: usize, a: usize) -> Result<usize> {
        self.check_site(n)?;
        if a == 0 || a > self.modes_per_site {
            return Err(Error::IndexOutOfRange {
                what: "mode",
                index: a,
                limit: self.modes_per_site,
            });
        }
        Ok((n - 1) * self.block_width() + a)
    }

    /// 1-based global complex-mode index of auxiliary mode `k` (0-based).
    pub fn aux_mode(&self, n: usize, k: usize) -> Result<usize> {
        self.check_site(n)?;
        if k >= self.aux_per_site {
            return Err(Error::IndexOutOfRange {
                what: "auxiliary mode",
                index: k,
                limit: self.aux_per_site,
            });
        }
        Ok((n - 1) * self.block_width() + self.modes_per_site + k + 1)
    }

    /// Global qubit carrying complex mode `j` (1-based).
    pub fn mode_qubit(&self, j: usize) -> usize {
        self.qubit_offset + j - 1
    }

    pub fn is_aux_qubit(&self, q: usize) -> bool {
        q >= self.qubit_offset
            && q < self.qubit_offset + self.num_modes()
            && (q - self.qubit_offset) % self.block_width() >= self.modes_per_site
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialTerm {
    pub coeff: f64,
    pub bosons: Vec<usize>,
}

/// `coeff · Ψ^{(†)}_{n,a} Ψ^{(†)}_{n',b} · Π x̂_boson^power`, plus its
/// Hermitian conjugate unless the product is already self-adjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct HoppingTerm {
    pub n: usize,
    pub nprime: usize,
    pub a: usize,
    pub b: usize,
    pub dagger: [bool; 2],
    pub coeff: Complex64,
    pub boson_monomial: Vec<(usize, u32)>,
}

impl HoppingTerm {
    /// `coeff · Ψ†_{n,a} Ψ_{n',b}` without boson factor.
    pub fn hop(n: usize, a: usize, nprime: usize, b: usize, coeff: f64) -> Self {
        HoppingTerm {
            n,
            nprime,
            a,
            b,
            dagger: [true, false],
            coeff: Complex64::new(coeff, 0.0),
            boson_monomial: Vec::new(),
        }
    }

    pub fn with_monomial(mut self, monomial: Vec<(usize, u32)>) -> Self {
        self.boson_monomial = monomial;
        self
    }

    pub fn is_onsite(&self) -> bool {
        self.n == self.nprime
    }

    /// Boson indices with repetition, e.g. `[(2, 2)]` → `[2, 2]`.
    pub fn monomial_factors(&self) -> Vec<usize> {
        self.boson_monomial
            .iter()
            .flat_map(|&(b, p)| std::iter::repeat_n(b, p as usize))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianModel {
    pub geometry: LatticeGeometry,
    pub bosons: BosonRegister,
    pub modes_per_site: usize,
    pub potential: Vec<PotentialTerm>,
    pub hopping: Vec<HoppingTerm>,
    pub max_monomial_degree: usize,
    pub preset: Option<PresetConfig>,
}

impl HamiltonianModel {
    pub fn num_boson_qubits(&self) -> usize {
        self.bosons.num_qubits()
    }

    /// Plain (auxiliary-free) fermion layout after the boson register.
    pub fn fermion_layout(&self) -> FermionLayout {
        FermionLayout::new(self.geometry, self.modes_per_site, self.num_boson_qubits())
    }

    /// Canonical JSON config with every term explicit.
    pub fn to_config(&self) -> ModelConfig {
        ModelConfig {
            dims: self.geometry.dims,
            extent: self.geometry.extent,
            boundary: self.geometry.boundary,
            ordering: self.geometry.ordering,
            boson: BosonConfig {
                num: self.bosons.num_bosons,
                q: self.bosons.qubits_per_boson,
                r: self.bosons.box_radius,
            },
            fermion: FermionConfig {
                modes_per_site: self.modes_per_site,
            },
            potential: self
                .potential
                .iter()
                .map(|p| PotentialConfig {
                    coeff: p.coeff,
                    bosons: p.bosons.clone(),
                })
                .collect(),
            hopping: self
                .hopping
                .iter()
                .map(|h| HoppingConfig {
                    n: h.n,
                    nprime: h.nprime,
                    a: h.a,
                    b: h.b,
                    dagger: h.dagger,
                    coeff: ComplexConfig {
                        re: h.coeff.re,
                        im: h.coeff.im,
                    },
                    boson_monomial: h
                        .boson_monomial
                        .iter()
                        .map(|&(boson, power)| MonomialFactor { boson, power })
                        .collect(),
                })
                .collect(),
            preset: None,
            max_monomial_degree: Some(self.max_monomial_degree),
        }
    }

    /// Hex SHA-256 of the canonical config.
    pub fn content_hash(&self) -> String {
        let json = serde_json::to_string(&self.to_config()).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ModelConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.build()
    }
}

/// Incremental model construction with validation in [`ModelBuilder::build`].
#[derive(Debug, Clone)]
pub struct ModelBuilder {
    model: HamiltonianModel,
}

impl ModelBuilder {
    pub fn new(geometry: LatticeGeometry, bosons: BosonRegister, modes_per_site: usize) -> Self {
        ModelBuilder {
            model: HamiltonianModel {
                geometry,
                bosons: bosons.with_offset(0),
                modes_per_site,
                potential: Vec::new(),
                hopping: Vec::new(),
                max_monomial_degree: DEFAULT_MAX_MONOMIAL_DEGREE,
                preset: None,
            },
        }
    }

    pub fn max_monomial_degree(mut self, degree: usize) -> Self {
        self.model.max_monomial_degree = degree;
        self
    }

    pub fn potential(mut self, coeff: f64, bosons: Vec<usize>) -> Self {
        self.model.potential.push(PotentialTerm { coeff, bosons });
        self
    }

    pub fn hopping(mut self, term: HoppingTerm) -> Self {
        self.model.hopping.push(term);
        self
    }

    fn preset(mut self, preset: PresetConfig) -> Self {
        self.model.preset = Some(preset);
        self
    }

    pub fn build(self) -> Result<HamiltonianModel> {
        let m = &self.model;
        let nb = m.bosons.num_bosons;
        let cfg = |msg: String| Err(Error::Config(msg));
        for (i, p) in m.potential.iter().enumerate() {
            if p.bosons.is_empty() {
                return cfg(format!("potential term {i} has no boson factors"));
            }
            if let Some(&b) = p.bosons.iter().find(|&&b| b >= nb) {
                return cfg(format!("potential term {i} uses boson {b}, only {nb} exist"));
            }
            if !p.coeff.is_finite() {
                return cfg(format!("potential term {i} has non-finite coefficient"));
            }
        }
        let sites = m.geometry.num_sites();
        for (i, h) in m.hopping.iter().enumerate() {
            for s in [h.n, h.nprime] {
                if s == 0 || s > sites {
                    return cfg(format!("hopping term {i}: site {s} outside 1..={sites}"));
                }
            }
            for a in [h.a, h.b] {
                if a == 0 || a > m.modes_per_site {
                    return cfg(format!(
                        "hopping term {i}: mode {a} outside 1..={}",
                        m.modes_per_site
                    ));
                }
            }
            if !h.is_onsite() && !m.geometry.are_neighbors(h.n, h.nprime)? {
                return cfg(format!(
                    "hopping term {i}: sites {} and {} are not nearest neighbours",
                    h.n, h.nprime
                ));
            }
            if h.is_onsite() && h.a == h.b && h.dagger[0] == h.dagger[1] {
                return cfg(format!("hopping term {i} squares a single mode and vanishes"));
            }
            let mut degree = 0usize;
            for &(b, p) in &h.boson_monomial {
                if b >= nb {
                    return cfg(format!("hopping term {i} uses boson {b}, only {nb} exist"));
                }
                if p == 0 {
                    return cfg(format!("hopping term {i} has a zero power"));
                }
                degree += p as usize;
            }
            if degree > m.max_monomial_degree {
                return cfg(format!(
                    "hopping term {i}: boson monomial degree {degree} exceeds {}",
                    m.max_monomial_degree
                ));
            }
            if !(h.coeff.re.is_finite() && h.coeff.im.is_finite()) {
                return cfg(format!("hopping term {i} has non-finite coefficient"));
            }
        }
        Ok(self.model)
    }
}

// ---------------------------------------------------------------------------
// JSON config

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BosonConfig {
    pub num: usize,
    #[serde(rename = "Q")]
    pub q: usize,
    #[serde(rename = "R")]
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FermionConfig {
    pub modes_per_site: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub coeff: f64,
    pub bosons: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexConfig {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialFactor {
    pub boson: usize,
    pub power: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoppingConfig {
    pub n: usize,
    pub nprime: usize,
    pub a: usize,
    pub b: usize,
    pub dagger: [bool; 2],
    pub coeff: ComplexConfig,
    #[serde(default)]
    pub boson_monomial: Vec<MonomialFactor>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetConfig {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
}

/// On-disk model description. When `preset` is set, the preset's terms are
/// generated on the given geometry and any explicit terms are appended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub dims: usize,
    pub extent: usize,
    pub boundary: Boundary,
    pub ordering: Ordering,
    pub boson: BosonConfig,
    pub fermion: FermionConfig,
    #[serde(default)]
    pub potential: Vec<PotentialConfig>,
    #[serde(default)]
    pub hopping: Vec<HoppingConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<PresetConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_monomial_degree: Option<usize>,
}

impl ModelConfig {
    pub fn build(&self) -> Result<HamiltonianModel> {
        let geometry = LatticeGeometry::new(self.dims, self.extent, self.boundary, self.ordering)
            .map_err(|e| Error::Config(e.to_string()))?;
        let mut builder = match &self.preset {
            Some(p) => {
                let base = build_preset(&p.name, &PresetParams::from_config(self, &p.params))?;
                if self.boson.num != 0 && self.boson.num != base.bosons.num_bosons {
                    return Err(Error::Config(format!(
                        "preset `{}` needs {} bosons, config says {}",
                        p.name, base.bosons.num_bosons, self.boson.num
                    )));
                }
                if self.fermion.modes_per_site != 0
                    && self.fermion.modes_per_site != base.modes_per_site
                {
                    return Err(Error::Config(format!(
                        "preset `{}` needs {} modes per site, config says {}",
                        p.name, base.modes_per_site, self.fermion.modes_per_site
                    )));
                }
                ModelBuilder { model: base }
            }
            None => {
                let reg = BosonRegister::new(self.boson.num, self.boson.q, self.boson.r)
                    .map_err(|e| Error::Config(e.to_string()))?;
                ModelBuilder::new(geometry, reg, self.fermion.modes_per_site)
            }
        };
        if let Some(d) = self.max_monomial_degree {
            builder = builder.max_monomial_degree(d);
        }
        for p in &self.potential {
            builder = builder.potential(p.coeff, p.bosons.clone());
        }
        for h in &self.hopping {
            builder = builder.hopping(HoppingTerm {
                n: h.n,
                nprime: h.nprime,
                a: h.a,
                b: h.b,
                dagger: h.dagger,
                coeff: Complex64::new(h.coeff.re, h.coeff.im),
                boson_monomial: h.boson_monomial.iter().map(|f| (f.boson, f.power)).collect(),
            });
        }
        builder.build()
    }
}

// ---------------------------------------------------------------------------
// Presets

/// Inputs shared by all presets plus named numeric parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PresetParams {
    pub dims: usize,
    pub extent: usize,
    pub boundary: Boundary,
    pub ordering: Ordering,
    pub qubits_per_boson: usize,
    pub box_radius: f64,
    pub values: BTreeMap<String, f64>,
}

impl PresetParams {
    pub fn new(dims: usize, extent: usize, boundary: Boundary, ordering: Ordering, q: usize, r: f64) -> Self {
        PresetParams {
            dims,
            extent,
            boundary,
            ordering,
            qubits_per_boson: q,
            box_radius: r,
            values: BTreeMap::new(),
        }
    }

    pub fn set(mut self, key: &str, value: f64) -> Self {
        self.values.insert(key.to_string(), value);
        self
    }

    fn from_config(cfg: &ModelConfig, values: &BTreeMap<String, f64>) -> Self {
        PresetParams {
            dims: cfg.dims,
            extent: cfg.extent,
            boundary: cfg.boundary,
            ordering: cfg.ordering,
            qubits_per_boson: cfg.boson.q,
            box_radius: cfg.boson.r,
            values: values.clone(),
        }
    }

    fn take(&self, allowed: &[(&str, f64)]) -> Result<BTreeMap<String, f64>> {
        for k in self.values.keys() {
            if !allowed.iter().any(|(a, _)| a == k) {
                return Err(Error::Config(format!("unknown preset parameter `{k}`")));
            }
        }
        Ok(allowed
            .iter()
            .map(|&(k, d)| (k.to_string(), self.values.get(k).copied().unwrap_or(d)))
            .collect())
    }

    fn geometry(&self) -> Result<LatticeGeometry> {
        LatticeGeometry::new(self.dims, self.extent, self.boundary, self.ordering)
            .map_err(|e| Error::Config(e.to_string()))
    }

    fn register(&self, num: usize) -> Result<BosonRegister> {
        BosonRegister::new(num, self.qubits_per_boson, self.box_radius)
            .map_err(|e| Error::Config(e.to_string()))
    }
}

pub const PRESETS: [&str; 4] = ["harmonic_chain", "quartic_oscillator", "hopping_toy", "qcd_layout"];

fn positive_count(v: f64, name: &str) -> Result<usize> {
    if v >= 1.0 && v.fract() == 0.0 && v <= 64.0 {
        Ok(v as usize)
    } else {
        Err(Error::Config(format!("parameter `{name}` must be a positive integer, got {v}")))
    }
}

/// Builds one of [`PRESETS`].
///
/// * `harmonic_chain` (`omega`, `kappa`): one boson per site,
///   `ω²/2 x_n² + κ/2 (x_n − x_n')²` on every link.
/// * `quartic_oscillator` (`omega`, `lambda`): one boson per site,
///   `ω²/2 x² + λ x⁴`.
/// * `hopping_toy` (`t`, `mass`, `omega`, `coupling`): one boson and one
///   complex fermion per site; `ω²/2 x_n²`, staggered mass
///   `mass·(−1)^n Ψ†_nΨ_n`, and `t·coupling·Ψ†_nΨ_n'·x̂_n` on every link
///   (`coupling = 0` drops the boson factor and keeps `t`).
/// * `qcd_layout` (`Nc`, `Nf`): `4·Nc·Nf` complex modes and `2·d·Nc²` link
///   bosons per site; unit mass per mode and mode-diagonal hopping on every
///   link, each dressed by one coordinate of the link boson.
pub fn build_preset(name: &str, params: &PresetParams) -> Result<HamiltonianModel> {
    let geometry = params.geometry()?;
    let sites = geometry.num_sites();
    let links = geometry.classify_links();
    let cfg = PresetConfig {
        name: name.to_string(),
        params: params.values.clone(),
    };
    let model = match name {
        "harmonic_chain" => {
            let v = params.take(&[("omega", 1.0), ("kappa", 0.5)])?;
            let (w, k) = (v["omega"], v["kappa"]);
            let mut b = ModelBuilder::new(geometry, params.register(sites)?, 0);
            for s in 0..sites {
                b = b.potential(w * w / 2.0, vec![s, s]);
            }
            for l in &links {
                let (x, y) = (l.lower - 1, l.upper - 1);
                b = b
                    .potential(k / 2.0, vec![x, x])
                    .potential(k / 2.0, vec![y, y])
                    .potential(-k, vec![x, y]);
            }
            b
        }
        "quartic_oscillator" => {
            let v = params.take(&[("omega", 1.0), ("lambda", 1.0)])?;
            let mut b = ModelBuilder::new(geometry, params.register(sites)?, 0);
            for s in 0..sites {
                b = b
                    .potential(v["omega"] * v["omega"] / 2.0, vec![s, s])
                    .potential(v["lambda"], vec![s, s, s, s]);
            }
            b
        }
        "hopping_toy" => {
            let v = params.take(&[("t", 1.0), ("mass", 1.0), ("omega", 1.0), ("coupling", 1.0)])?;
            let mut b = ModelBuilder::new(geometry, params.register(sites)?, 1);
            for s in 0..sites {
                b = b.potential(v["omega"] * v["omega"] / 2.0, vec![s, s]);
            }
            for n in 1..=sites {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                if v["mass"] != 0.0 {
                    b = b.hopping(HoppingTerm::hop(n, 1, n, 1, sign * v["mass"]));
                }
            }
            for l in &links {
                let term = if v["coupling"] != 0.0 {
                    HoppingTerm::hop(l.lower, 1, l.upper, 1, v["t"] * v["coupling"])
                        .with_monomial(vec![(l.lower - 1, 1)])
                } else {
                    HoppingTerm::hop(l.lower, 1, l.upper, 1, v["t"])
                };
                b = b.hopping(term);
            }
            b
        }
        "qcd_layout" => {
            let v = params.take(&[("Nc", 3.0), ("Nf", 2.0)])?;
            let nc = positive_count(v["Nc"], "Nc")?;
            let nf = positive_count(v["Nf"], "Nf")?;
            let m = 4 * nc * nf;
            let per_site = 2 * params.dims * nc * nc;
            let mut b = ModelBuilder::new(geometry, params.register(per_site * sites)?, m);
            for n in 1..=sites {
                for a in 1..=m {
                    b = b.hopping(HoppingTerm::hop(n, a, n, a, 1.0));
                }
            }
            for l in &links {
                let boson = (l.lower - 1) * per_site + (l.class.axis - 1) * 2 * nc * nc;
                for a in 1..=m {
                    b = b.hopping(
                        HoppingTerm::hop(l.lower, a, l.upper, a, 1.0).with_monomial(vec![(boson, 1)]),
                    );
                }
            }
            b
        }
        _ => {
            return Err(Error::Config(format!(
                "unknown preset `{name}` (expected one of {})",
                PRESETS.join(", ")
            )))
        }
    };
    model.preset(cfg).build()
}
