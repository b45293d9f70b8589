//! Jordan-Wigner strings for Majorana and complex modes.

use num_complex::Complex64;

use crate::boson::{expand_monomial, BosonRegister};
use crate::error::{Error, Result};
use crate::model::{FermionLayout, HoppingTerm};
use crate::pauli::{ComplexPauliSum, Pauli, PauliString, PauliSum};

/// Imaginary parts below this are treated as rounding noise when extracting
/// Hermitian sums.
const HERMITIAN_TOL: f64 = 1e-12;

/// `ψ_{2j-1} = Z⋯Z X_j`, `ψ_{2j} = Z⋯Z Y_j` over the layout's qubits
/// (`k` is 1-based).
pub fn majorana_string(k: usize, layout: &FermionLayout) -> Result<PauliString> {
    let total = layout.num_majoranas();
    if k == 0 || k > total {
        return Err(Error::IndexOutOfRange {
            what: "Majorana",
            index: k,
            limit: total,
        });
    }
    let j = k.div_ceil(2);
    let letter = if k % 2 == 1 { Pauli::X } else { Pauli::Y };
    let mut letters: Vec<(usize, Pauli)> = (1..j).map(|i| (layout.mode_qubit(i), Pauli::Z)).collect();
    letters.push((layout.mode_qubit(j), letter));
    Ok(PauliString::from_letters(letters))
}

/// `(Ψ_j, Ψ†_j) = (ψ_{2j-1} + iψ_{2j}, ψ_{2j-1} − iψ_{2j})`.
pub fn complex_mode(j: usize, layout: &FermionLayout) -> Result<(ComplexPauliSum, ComplexPauliSum)> {
    let odd = majorana_string(2 * j - 1, layout)?;
    let even = majorana_string(2 * j, layout)?;
    let mut ann = ComplexPauliSum::new();
    ann.push(Complex64::new(1.0, 0.0), odd.clone());
    ann.push(Complex64::new(0.0, 1.0), even.clone());
    let mut cre = ComplexPauliSum::new();
    cre.push(Complex64::new(1.0, 0.0), odd);
    cre.push(Complex64::new(0.0, -1.0), even);
    Ok((ann, cre))
}

/// `Ψ^{(†)}_{n,a} Ψ^{(†)}_{n',b}` as a complex Pauli sum.
pub fn fermion_bilinear(term: &HoppingTerm, layout: &FermionLayout) -> Result<ComplexPauliSum> {
    let j1 = layout.matter_mode(term.n, term.a)?;
    let j2 = layout.matter_mode(term.nprime, term.b)?;
    let (a1, c1) = complex_mode(j1, layout)?;
    let (a2, c2) = complex_mode(j2, layout)?;
    let f1 = if term.dagger[0] { c1 } else { a1 };
    let f2 = if term.dagger[1] { c2 } else { a2 };
    Ok(f1.mul(&f2))
}

/// The full operator `T` of a hopping term, optionally multiplied by a
/// Hermitian `dressing` string (used by the auxiliary-fermion encoding).
pub fn hopping_operator(
    term: &HoppingTerm,
    layout: &FermionLayout,
    reg: &BosonRegister,
    dressing: Option<&PauliString>,
) -> Result<ComplexPauliSum> {
    let mut op = fermion_bilinear(term, layout)?.scaled(term.coeff);
    if let Some(d) = dressing {
        op = op.mul_string(d);
    }
    let factors = term.monomial_factors();
    if !factors.is_empty() {
        let bos = expand_monomial(1.0, &factors, reg)?.to_complex();
        op = op.mul(&bos);
    }
    Ok(op)
}

/// Hermitian Pauli sum of `T + T†`, or of `T` alone when `T` is already
/// self-adjoint (on-site densities with real coefficients).
pub fn compile_hopping_with(
    term: &HoppingTerm,
    layout: &FermionLayout,
    reg: &BosonRegister,
    dressing: Option<&PauliString>,
) -> Result<PauliSum> {
    let t = hopping_operator(term, layout, reg, dressing)?;
    let diff = t.add(&t.adjoint().scaled(Complex64::new(-1.0, 0.0)));
    let full = if diff.is_empty() { t } else { t.add(&t.adjoint()) };
    full.to_pauli_sum(HERMITIAN_TOL)
}

pub fn compile_hopping(term: &HoppingTerm, layout: &FermionLayout, reg: &BosonRegister) -> Result<PauliSum> {
    compile_hopping_with(term, layout, reg, None)
}
