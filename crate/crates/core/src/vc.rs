//! Auxiliary-fermion (Verstraete-Cirac) encoding on snake-ordered lattices.
//!
//! Every site gets `d - 1` auxiliary complex modes placed right after its
//! matter modes. A link along axis `k >= 2` between sites `n < n'` is
//! multiplied by `i ρ^{(k)}_n χ^{(k)}_{n'}`, whose Jordan-Wigner chain cancels
//! the chain of the matter bilinear. These link operators are the
//! stabilizers; on their joint +1 eigenspace the dressed Hamiltonian acts as
//! the undressed one.

use std::collections::BTreeMap;

use crate::compiled::{assemble, CompiledHamiltonian, Encoding};
use crate::error::{Error, Result};
use crate::jw::majorana_string;
use crate::lattice::{Boundary, Link, Ordering};
use crate::model::{FermionLayout, HamiltonianModel};
use crate::oracle::{DenseOperator, Oracle};
use crate::pauli::{PauliString, PauliSum, Phase};

/// A dressed link and its stabilizer `i ρ_n χ_{n'}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedLink {
    pub link: Link,
    pub stabilizer: PauliString,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VcAugmentation {
    pub layout: FermionLayout,
    pub paired_links: Vec<PairedLink>,
}

impl VcAugmentation {
    pub fn dressing(&self, a: usize, b: usize) -> Option<&PauliString> {
        let (lo, hi) = (a.min(b), a.max(b));
        self.paired_links
            .iter()
            .find(|p| p.link.lower == lo && p.link.upper == hi)
            .map(|p| &p.stabilizer)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerSet {
    /// One operator per dressed link.
    pub full_set: Vec<PauliString>,
    /// Short generators: one turn link per group plus products of
    /// consecutive link operators.
    pub local_generators: Vec<PauliString>,
    /// Bilinears `i μ_a μ_b` pairing auxiliary Majoranas that no link uses,
    /// consecutive in Jordan-Wigner order. They commute with everything
    /// above and fix the remaining auxiliary freedom.
    pub spectators: Vec<PauliString>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VcOutput {
    pub compiled: CompiledHamiltonian,
    pub stabilizers: StabilizerSet,
    pub augmentation: VcAugmentation,
}

/// `i · a · b` for anticommuting Hermitian strings.
fn i_product(a: &PauliString, b: &PauliString) -> PauliString {
    PauliString::identity().with_phase(Phase::I).mul(a).mul(b)
}

fn rho(layout: &FermionLayout, n: usize, slot: usize) -> Result<(usize, PauliString)> {
    let k = 2 * layout.aux_mode(n, slot)? - 1;
    Ok((k, majorana_string(k, layout)?))
}

fn chi(layout: &FermionLayout, n: usize, slot: usize) -> Result<(usize, PauliString)> {
    let k = 2 * layout.aux_mode(n, slot)?;
    Ok((k, majorana_string(k, layout)?))
}

/// Auxiliary layout and dressed links for `model`'s geometry.
pub fn augmentation(model: &HamiltonianModel) -> Result<(VcAugmentation, StabilizerSet)> {
    let g = model.geometry;
    if g.boundary != Boundary::Open {
        return Err(Error::Config(
            "vc encoding requires open boundary conditions".into(),
        ));
    }
    if g.ordering != Ordering::Snake {
        return Err(Error::Config("vc encoding requires snake ordering".into()));
    }
    let layout = model.fermion_layout().with_aux(g.dims - 1);

    let mut paired = Vec::new();
    let mut used = std::collections::BTreeSet::new();
    for link in g.classify_links() {
        if link.class.axis < 2 {
            continue;
        }
        let slot = link.class.axis - 2;
        let (kr, r) = rho(&layout, link.lower, slot)?;
        let (kc, c) = chi(&layout, link.upper, slot)?;
        used.insert(kr);
        used.insert(kc);
        paired.push(PairedLink {
            link,
            stabilizer: i_product(&r, &c),
        });
    }

    // Group links sharing a stabilizer chain: same axis, same lower
    // coordinate along it, same coordinates on all later axes.
    let mut groups: BTreeMap<(usize, Vec<usize>), Vec<&PairedLink>> = BTreeMap::new();
    for p in &paired {
        let a = g.site_coords(p.link.lower)?;
        let b = g.site_coords(p.link.upper)?;
        let k = p.link.class.axis;
        let mut key = vec![a[k - 1].min(b[k - 1])];
        key.extend_from_slice(&a[k..]);
        groups.entry((k, key)).or_default().push(p);
    }
    let mut local = Vec::new();
    for links in groups.values_mut() {
        links.sort_by_key(|p| (p.link.lower, p.link.upper));
        let turn = links
            .iter()
            .min_by_key(|p| (p.link.upper - p.link.lower, p.link.lower))
            .expect("non-empty group");
        local.push(turn.stabilizer.clone());
        for w in links.windows(2) {
            local.push(w[0].stabilizer.mul(&w[1].stabilizer));
        }
    }

    let mut unused = Vec::new();
    for n in 1..=g.num_sites() {
        for slot in 0..layout.aux_per_site {
            for (k, s) in [rho(&layout, n, slot)?, chi(&layout, n, slot)?] {
                if !used.contains(&k) {
                    unused.push((k, s));
                }
            }
        }
    }
    unused.sort_by_key(|u| u.0);
    let spectators = unused
        .chunks_exact(2)
        .map(|pair| i_product(&pair[0].1, &pair[1].1))
        .collect();

    let stabilizers = StabilizerSet {
        full_set: paired.iter().map(|p| p.stabilizer.clone()).collect(),
        local_generators: local,
        spectators,
    };
    Ok((
        VcAugmentation {
            layout,
            paired_links: paired,
        },
        stabilizers,
    ))
}

/// Compiles `model` with auxiliary-fermion dressing of all links along
/// axes 2 and higher.
pub fn vc_transform(model: &HamiltonianModel) -> Result<VcOutput> {
    let (aug, stabilizers) = augmentation(model)?;
    let compiled = assemble(model, aug.layout, Encoding::Vc, |term, class| {
        if class.axis < 2 {
            return Ok(None);
        }
        Ok(aug.dressing(term.n, term.nprime).cloned())
    })?;
    Ok(VcOutput {
        compiled,
        stabilizers,
        augmentation: aug,
    })
}

/// `−g Σ` local generators.
pub fn penalty_hamiltonian(stab: &StabilizerSet, strength: f64) -> Result<PauliSum> {
    if !(strength > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "penalty strength must be positive, got {strength}"
        )));
    }
    let mut s = PauliSum::new();
    for gen in &stab.local_generators {
        s.push(-strength, gen.clone());
    }
    Ok(s)
}

/// Dense projector onto the joint +1 eigenspace of the given stabilizers.
pub fn projector_onto(stabs: &[PauliString], n: usize, oracle: &Oracle) -> Result<DenseOperator> {
    let mut p = DenseOperator::identity(oracle.check(n)?);
    for s in stabs {
        let mut half = PauliSum::new();
        half.push(0.5, PauliString::identity());
        half.push(0.5, s.clone());
        let m = oracle.pauli_sum_matrix(&half, n)?;
        p = p.matmul(&m);
    }
    Ok(p)
}

/// Projector onto the physical sector: link stabilizers and spectators.
pub fn physical_projector(stab: &StabilizerSet, n: usize, oracle: &Oracle) -> Result<DenseOperator> {
    let all: Vec<PauliString> = stab
        .full_set
        .iter()
        .chain(&stab.spectators)
        .cloned()
        .collect();
    projector_onto(&all, n, oracle)
}
