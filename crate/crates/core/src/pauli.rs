//! Phase-tracked Pauli strings and real-weighted Pauli sums.
//!
//! A [`PauliString`] is a sparse map from global qubit index to a non-identity
//! letter together with a phase in `{+1, +i, -1, -i}`. Identity letters are
//! never stored, so two strings are equal exactly when they are equal as
//! operators. [`PauliSum`] holds real coefficients on Hermitian strings and is
//! the representation every compiled Hamiltonian ends up in; the complex
//! variant [`ComplexPauliSum`] is the scratch space for fermion algebra before
//! the Hermitian part is extracted.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Coefficients below this magnitude are dropped by canonicalization.
pub const COEFF_EPS: f64 = 1e-14;

/// Single-qubit non-identity Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    /// Product `self * other` as `(power of i, letter or identity)`.
    fn product(self, other: Pauli) -> (u8, Option<Pauli>) {
        use Pauli::*;
        match (self, other) {
            (X, X) | (Y, Y) | (Z, Z) => (0, None),
            (X, Y) => (1, Some(Z)),
            (Y, Z) => (1, Some(X)),
            (Z, X) => (1, Some(Y)),
            (Y, X) => (3, Some(Z)),
            (Z, Y) => (3, Some(X)),
            (X, Z) => (3, Some(Y)),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Element of the phase group `{+1, +i, -1, -i}`, stored as a power of `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(power: u8) -> Self {
        Phase(power % 4)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0 % 2 == 0
    }

    pub fn conj(self) -> Self {
        Phase((4 - self.0) % 4)
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase((self.0 + rhs.0) % 4)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        })
    }
}

/// A Pauli word with an explicit phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PauliString {
    phase: Phase,
    letters: BTreeMap<usize, Pauli>,
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(qubit: usize, letter: Pauli) -> Self {
        let mut letters = BTreeMap::new();
        letters.insert(qubit, letter);
        PauliString {
            phase: Phase::ONE,
            letters,
        }
    }

    /// Builds a string from `(qubit, letter)` pairs. Repeated qubits are
    /// multiplied together left to right, so the phase stays exact.
    pub fn from_letters<I: IntoIterator<Item = (usize, Pauli)>>(letters: I) -> Self {
        let mut s = PauliString::identity();
        for (q, p) in letters {
            s = s.mul(&PauliString::single(q, p));
        }
        s
    }

    /// `Z` on every listed qubit.
    pub fn z_string<I: IntoIterator<Item = usize>>(qubits: I) -> Self {
        Self::from_letters(qubits.into_iter().map(|q| (q, Pauli::Z)))
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn letters(&self) -> &BTreeMap<usize, Pauli> {
        &self.letters
    }

    pub fn letter(&self, qubit: usize) -> Option<Pauli> {
        self.letters.get(&qubit).copied()
    }

    pub fn weight(&self) -> usize {
        self.letters.len()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.letters.keys().copied()
    }

    pub fn is_identity_word(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase.is_real()
    }

    /// Highest qubit index touched, if any.
    pub fn max_qubit(&self) -> Option<usize> {
        self.letters.keys().next_back().copied()
    }

    /// Same letters with phase +1.
    pub fn unsigned(&self) -> PauliString {
        PauliString {
            phase: Phase::ONE,
            letters: self.letters.clone(),
        }
    }

    pub fn adjoint(&self) -> PauliString {
        PauliString {
            phase: self.phase.conj(),
            letters: self.letters.clone(),
        }
    }

    /// Group product `self * other`.
    pub fn mul(&self, other: &PauliString) -> PauliString {
        let mut letters = self.letters.clone();
        let mut power = self.phase.power() + other.phase.power();
        for (&q, &b) in &other.letters {
            match letters.get(&q).copied() {
                None => {
                    letters.insert(q, b);
                }
                Some(a) => {
                    let (p, r) = a.product(b);
                    power += p;
                    match r {
                        Some(r) => {
                            letters.insert(q, r);
                        }
                        None => {
                            letters.remove(&q);
                        }
                    }
                }
            }
        }
        PauliString {
            phase: Phase::from_power(power),
            letters,
        }
    }

    /// True iff the two operators commute: an even number of qubits carry
    /// distinct letters.
    pub fn commutes(&self, other: &PauliString) -> bool {
        let (small, large) = if self.weight() <= other.weight() {
            (self, other)
        } else {
            (other, self)
        };
        let anti = small
            .letters
            .iter()
            .filter(|(q, a)| large.letters.get(q).is_some_and(|b| b != *a))
            .count();
        anti % 2 == 0
    }

    /// Relabels qubits through `map`; letters whose qubit maps to `None` are
    /// dropped.
    pub fn remap<F: Fn(usize) -> Option<usize>>(&self, map: F) -> PauliString {
        let letters = self
            .letters
            .iter()
            .filter_map(|(&q, &p)| map(q).map(|r| (r, p)))
            .collect();
        PauliString {
            phase: self.phase,
            letters,
        }
    }

    /// Letters only, e.g. `Z0 X3`; `I` for the identity word.
    pub fn word(&self) -> String {
        if self.letters.is_empty() {
            return "I".to_string();
        }
        self.letters
            .iter()
            .map(|(q, p)| format!("{}{}", p.symbol(), q))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.phase != Phase::ONE {
            write!(f, "({}) ", self.phase)?;
        }
        f.write_str(&self.word())
    }
}

/// Sort key for canonical ordering: letters compared lexicographically.
fn letters_key(s: &PauliString) -> Vec<(usize, Pauli)> {
    s.letters.iter().map(|(&q, &p)| (q, p)).collect()
}

/// Real linear combination of Hermitian Pauli strings.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PauliSum {
    terms: Vec<(f64, PauliString)>,
}

impl PauliSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: Vec<(f64, PauliString)>) -> Self {
        PauliSum { terms }
    }

    pub fn push(&mut self, coeff: f64, string: PauliString) {
        self.terms.push((coeff, string));
    }

    pub fn extend(&mut self, other: &PauliSum) {
        self.terms.extend(other.terms.iter().cloned());
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> PauliSum {
        PauliSum {
            terms: self
                .terms
                .iter()
                .map(|(c, s)| (c * factor, s.clone()))
                .collect(),
        }
    }

    /// Sum of absolute coefficients.
    pub fn one_norm(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    pub fn max_weight(&self) -> usize {
        self.terms.iter().map(|(_, s)| s.weight()).max().unwrap_or(0)
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.terms.iter().filter_map(|(_, s)| s.max_qubit()).max()
    }

    /// Coefficient of the identity word in canonical form.
    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .filter(|(_, s)| s.is_identity_word())
            .map(|(c, s)| if s.phase() == Phase::MINUS_ONE { -c } else { *c })
            .sum()
    }

    /// Folds `-1` phases into coefficients, merges equal words, drops
    /// near-zero terms and sorts by word.
    pub fn canonicalize(&self) -> Result<PauliSum> {
        let mut merged: BTreeMap<Vec<(usize, Pauli)>, (f64, PauliString)> = BTreeMap::new();
        for (c, s) in &self.terms {
            let sign = match s.phase() {
                Phase::ONE => 1.0,
                Phase::MINUS_ONE => -1.0,
                p => return Err(Error::NonHermitian(p.to_string())),
            };
            let entry = merged
                .entry(letters_key(s))
                .or_insert_with(|| (0.0, s.unsigned()));
            entry.0 += sign * c;
        }
        Ok(PauliSum {
            terms: merged
                .into_values()
                .filter(|(c, _)| c.abs() >= COEFF_EPS)
                .collect(),
        })
    }

    /// Canonical sum with the identity word removed.
    pub fn traceless(&self) -> Result<PauliSum> {
        let c = self.canonicalize()?;
        Ok(PauliSum {
            terms: c
                .terms
                .into_iter()
                .filter(|(_, s)| !s.is_identity_word())
                .collect(),
        })
    }

    pub fn to_complex(&self) -> ComplexPauliSum {
        let mut out = ComplexPauliSum::new();
        for (c, s) in &self.terms {
            out.push(Complex64::new(*c, 0.0), s.clone());
        }
        out
    }
}

impl fmt::Display for PauliSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, s) in &self.terms {
            let sign = if s.phase() == Phase::MINUS_ONE { -1.0 } else { 1.0 };
            writeln!(f, "{} {}", sign * c, s.unsigned().word())?;
        }
        Ok(())
    }
}

/// Complex linear combination of Pauli words; phases are folded into the
/// coefficients on insertion.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ComplexPauliSum {
    terms: Vec<(Complex64, PauliString)>,
}

impl ComplexPauliSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_string(coeff: Complex64, s: &PauliString) -> Self {
        let mut out = Self::new();
        out.push(coeff, s.clone());
        out
    }

    pub fn push(&mut self, coeff: Complex64, s: PauliString) {
        let c = coeff * s.phase().to_complex();
        self.terms.push((c, s.unsigned()));
    }

    pub fn terms(&self) -> &[(Complex64, PauliString)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &ComplexPauliSum) -> ComplexPauliSum {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        ComplexPauliSum { terms }.simplified()
    }

    pub fn scaled(&self, factor: Complex64) -> ComplexPauliSum {
        ComplexPauliSum {
            terms: self.terms.iter().map(|(c, s)| (c * factor, s.clone())).collect(),
        }
    }

    pub fn mul(&self, other: &ComplexPauliSum) -> ComplexPauliSum {
        let mut out = ComplexPauliSum::new();
        for (a, sa) in &self.terms {
            for (b, sb) in &other.terms {
                out.push(a * b, sa.mul(sb));
            }
        }
        out.simplified()
    }

    pub fn mul_string(&self, s: &PauliString) -> ComplexPauliSum {
        self.mul(&ComplexPauliSum::from_string(Complex64::new(1.0, 0.0), s))
    }

    pub fn adjoint(&self) -> ComplexPauliSum {
        ComplexPauliSum {
            terms: self.terms.iter().map(|(c, s)| (c.conj(), s.clone())).collect(),
        }
    }

    /// Merges equal words and drops near-zero coefficients.
    pub fn simplified(&self) -> ComplexPauliSum {
        let mut merged: BTreeMap<Vec<(usize, Pauli)>, (Complex64, PauliString)> = BTreeMap::new();
        for (c, s) in &self.terms {
            let entry = merged
                .entry(letters_key(s))
                .or_insert_with(|| (Complex64::new(0.0, 0.0), s.clone()));
            entry.0 += c;
        }
        ComplexPauliSum {
            terms: merged
                .into_values()
                .filter(|(c, _)| c.norm() >= COEFF_EPS)
                .collect(),
        }
    }

    /// True when the operator equals its adjoint up to `tol` per coefficient.
    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.simplified()
            .terms
            .iter()
            .all(|(c, _)| c.im.abs() <= tol)
    }

    /// Real Pauli sum, failing if any coefficient has an imaginary part above
    /// `tol`.
    pub fn to_pauli_sum(&self, tol: f64) -> Result<PauliSum> {
        let s = self.simplified();
        let mut out = PauliSum::new();
        for (c, w) in &s.terms {
            if c.im.abs() > tol {
                return Err(Error::NotHermitianMatrix(c.im.abs()));
            }
            out.push(c.re, w.clone());
        }
        out.canonicalize()
    }
}
