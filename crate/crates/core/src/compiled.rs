//! Models lowered to Pauli sums, grouped in Trotter order.

use serde::{Deserialize, Serialize};

use crate::boson::{expand_monomial, kinetic_operator, BosonRegister};
use crate::circuit::Partition;
use crate::error::{Error, Result};
use crate::jw::compile_hopping_with;
use crate::lattice::LinkClass;
use crate::model::{FermionLayout, HamiltonianModel, HoppingTerm};
use crate::pauli::{PauliString, PauliSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    #[default]
    Jw,
    Vc,
}

impl Encoding {
    pub fn name(self) -> &'static str {
        match self {
            Encoding::Jw => "jw",
            Encoding::Vc => "vc",
        }
    }
}

impl std::str::FromStr for Encoding {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "jw" => Ok(Encoding::Jw),
            "vc" => Ok(Encoding::Vc),
            _ => Err(Error::InvalidArgument(format!("unknown encoding `{s}`"))),
        }
    }
}

/// Terms that are emitted together. Strings keep the order in which they
/// were produced (term by term), so equal strings from different model terms
/// are not merged.
#[derive(Debug, Clone, PartialEq)]
pub struct TermGroup {
    pub label: String,
    pub terms: PauliSum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledHamiltonian {
    pub partition: Partition,
    pub bosons: BosonRegister,
    pub layout: FermionLayout,
    pub encoding: Encoding,
    /// Coordinate-basis terms: boson potential, on-site terms, then link
    /// classes by axis with interior links before wrap links.
    pub groups: Vec<TermGroup>,
    /// `Σ p̂²/2` as a Z-sum in the momentum basis.
    pub kinetic: PauliSum,
}

impl CompiledHamiltonian {
    pub fn num_qubits(&self) -> usize {
        self.partition.total()
    }

    /// Canonical sum of all coordinate-basis terms.
    pub fn coordinate_sum(&self) -> PauliSum {
        let mut s = PauliSum::new();
        for g in &self.groups {
            s.extend(&g.terms);
        }
        s.canonicalize().expect("compiled terms are Hermitian")
    }

    pub fn group(&self, label: &str) -> Option<&TermGroup> {
        self.groups.iter().find(|g| g.label == label)
    }

    pub fn max_weight(&self) -> usize {
        self.groups
            .iter()
            .map(|g| g.terms.max_weight())
            .chain([self.kinetic.max_weight()])
            .max()
            .unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.groups.iter().all(|g| g.terms.is_empty()) && self.kinetic.is_empty()
    }
}

/// Lowers `model` with the given fermion layout; `dress` may attach a
/// Hermitian string to each inter-site term before mapping.
pub(crate) fn assemble<F>(
    model: &HamiltonianModel,
    layout: FermionLayout,
    encoding: Encoding,
    mut dress: F,
) -> Result<CompiledHamiltonian>
where
    F: FnMut(&HoppingTerm, LinkClass) -> Result<Option<PauliString>>,
{
    let reg = model.bosons;
    let mut groups = Vec::new();

    let mut pot = PauliSum::new();
    for p in &model.potential {
        pot.extend(&expand_monomial(p.coeff, &p.bosons, &reg)?);
    }
    groups.push(TermGroup {
        label: "potential".into(),
        terms: pot.canonicalize()?,
    });

    let mut onsite: Vec<(usize, usize, usize, usize)> = Vec::new();
    let mut linked: Vec<(LinkClass, usize, usize, usize)> = Vec::new();
    for (i, h) in model.hopping.iter().enumerate() {
        if h.is_onsite() {
            onsite.push((h.n, h.a, h.b, i));
        } else {
            let class = model.geometry.link_class(h.n, h.nprime)?;
            linked.push((class, h.n.min(h.nprime), h.n.max(h.nprime), i));
        }
    }
    onsite.sort();
    linked.sort();

    let mut s = PauliSum::new();
    for &(_, _, _, i) in &onsite {
        s.extend(&compile_hopping_with(&model.hopping[i], &layout, &reg, None)?);
    }
    groups.push(TermGroup {
        label: "onsite".into(),
        terms: s,
    });

    let mut current: Option<(LinkClass, PauliSum)> = None;
    for &(class, _, _, i) in &linked {
        let term = &model.hopping[i];
        let d = dress(term, class)?;
        let compiled = compile_hopping_with(term, &layout, &reg, d.as_ref())?;
        match &mut current {
            Some((c, s)) if *c == class => s.extend(&compiled),
            _ => {
                if let Some((c, s)) = current.take() {
                    groups.push(TermGroup {
                        label: c.to_string(),
                        terms: s,
                    });
                }
                current = Some((class, compiled));
            }
        }
    }
    if let Some((c, s)) = current {
        groups.push(TermGroup {
            label: c.to_string(),
            terms: s,
        });
    }
    groups.retain(|g| !g.terms.is_empty());

    let fermion_qubits = layout.num_modes();
    let aux = layout.geometry.num_sites() * layout.aux_per_site;
    Ok(CompiledHamiltonian {
        partition: Partition {
            boson: reg.num_qubits(),
            fermion: fermion_qubits - aux,
            auxiliary: aux,
            ancilla: 0,
        },
        bosons: reg,
        layout,
        encoding,
        groups,
        kinetic: kinetic_operator(&reg)?,
    })
}

/// Jordan-Wigner compilation.
pub fn compile_jw(model: &HamiltonianModel) -> Result<CompiledHamiltonian> {
    assemble(model, model.fermion_layout(), Encoding::Jw, |_, _| Ok(None))
}

/// Compiles with the requested encoding.
pub fn compile(model: &HamiltonianModel, encoding: Encoding) -> Result<CompiledHamiltonian> {
    match encoding {
        Encoding::Jw => compile_jw(model),
        Encoding::Vc => Ok(crate::vc::vc_transform(model)?.compiled),
    }
}
