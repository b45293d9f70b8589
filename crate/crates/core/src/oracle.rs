//! Dense matrices for verification at small scale.
//!
//! Basis index bit `q` is the state of global qubit `q` (little-endian).

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::boson::BosonRegister;
use crate::circuit::{trotter_step, Circuit, Gate, Policy, Strategy};
use crate::compiled::CompiledHamiltonian;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

pub const DEFAULT_ORACLE_LIMIT: usize = 14;
pub const ORACLE_LIMIT_ENV: &str = "QSYNTH_ORACLE_LIMIT";

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Square complex matrix of dimension `2^n`, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator(DMatrix<Complex64>);

impl DenseOperator {
    pub fn identity(n: usize) -> Self {
        let d = 1usize << n;
        DenseOperator(DMatrix::identity(d, d))
    }

    pub fn zeros(n: usize) -> Self {
        let d = 1usize << n;
        DenseOperator(DMatrix::zeros(d, d))
    }

    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        let d = m.nrows();
        if d != m.ncols() || !d.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "dense operator must be square with power-of-two size, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(DenseOperator(m))
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn matmul(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator(&self.0 * &other.0)
    }

    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator(self.0.adjoint())
    }

    pub fn add(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator(&self.0 + &other.0)
    }

    pub fn sub(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator(&self.0 - &other.0)
    }

    pub fn scale(&self, c: Complex64) -> DenseOperator {
        DenseOperator(&self.0 * c)
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator(&self.0 * &other.0 + &other.0 * &self.0)
    }

    /// `AB − BA`.
    pub fn commutator(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator(&self.0 * &other.0 - &other.0 * &self.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        self.0
            .clone()
            .singular_values()
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    /// Spectral norm of `A − B` for dimensions up to 512, otherwise the
    /// Frobenius norm (an upper bound on it).
    pub fn distance(&self, other: &DenseOperator) -> f64 {
        let d = self.sub(other);
        if self.dim() <= 512 {
            d.spectral_norm()
        } else {
            d.frobenius()
        }
    }

    /// `max |A − A†|`.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `max |U†U − I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let p = self.0.adjoint() * &self.0;
        let id = DMatrix::<Complex64>::identity(self.dim(), self.dim());
        DenseOperator(p).max_abs_diff(&DenseOperator(id))
    }

    /// Hermitian eigendecomposition `(sorted eigenvalues, eigenvectors)`.
    pub fn eigh(&self) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
        let dev = self.hermiticity_deviation();
        if dev > 1e-9 * self.max_abs().max(1.0) {
            return Err(Error::NotHermitianMatrix(dev));
        }
        // Symmetrize so rounding noise cannot leak into the solver.
        let h = (&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = h.symmetric_eigen();
        let mut idx: Vec<usize> = (0..self.dim()).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vecs = DMatrix::from_fn(self.dim(), self.dim(), |r, c| eig.eigenvectors[(r, idx[c])]);
        Ok((vals, vecs))
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eigh()?.0)
    }

    /// `exp(−itA)` for Hermitian `A`, via the spectral decomposition.
    pub fn expm_hermitian(&self, t: f64) -> Result<DenseOperator> {
        let (vals, vecs) = self.eigh()?;
        let mut scaled = vecs.clone();
        for (c, &l) in vals.iter().enumerate() {
            let ph = Complex64::from_polar(1.0, -t * l);
            for z in scaled.column_mut(c).iter_mut() {
                *z *= ph;
            }
        }
        Ok(DenseOperator(scaled * vecs.adjoint()))
    }

    /// Eigenvectors with eigenvalue ≈ 1 of a Hermitian projector, as columns.
    pub fn range_basis(&self) -> Result<DMatrix<Complex64>> {
        let (vals, vecs) = self.eigh()?;
        let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] > 0.5).collect();
        Ok(DMatrix::from_fn(self.dim(), keep.len(), |r, c| vecs[(r, keep[c])]))
    }

    /// Numerical rank of a Hermitian projector.
    pub fn projector_rank(&self) -> Result<usize> {
        Ok(self.eigenvalues()?.iter().filter(|&&v| v > 0.5).count())
    }

    /// Sorted spectrum of `V†AV` for an isometry `V`.
    pub fn restricted_spectrum(&self, basis: &DMatrix<Complex64>) -> Result<Vec<f64>> {
        let r = basis.adjoint() * &self.0 * basis;
        let d = r.nrows();
        if d == 0 {
            return Ok(Vec::new());
        }
        let h = (&r + r.adjoint()) * Complex64::new(0.5, 0.0);
        let mut vals: Vec<f64> = h.symmetric_eigen().eigenvalues.iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        Ok(vals)
    }
}

/// Applies a Pauli string to basis state `k`: returns `(phase, image)`.
#[derive(Debug, Clone, Copy)]
struct PauliAction {
    xmask: usize,
    zmask: usize,
    base: Complex64,
}

impl PauliAction {
    fn new(s: &PauliString) -> Self {
        let mut xmask = 0usize;
        let mut zmask = 0usize;
        let mut ny = 0u8;
        for (&q, &l) in s.letters() {
            match l {
                Pauli::X => xmask |= 1 << q,
                Pauli::Y => {
                    xmask |= 1 << q;
                    zmask |= 1 << q;
                    ny += 1;
                }
                Pauli::Z => zmask |= 1 << q,
            }
        }
        let base = s.phase().to_complex() * crate::pauli::Phase::from_power(ny % 4).to_complex();
        PauliAction { xmask, zmask, base }
    }

    #[inline]
    fn apply(&self, k: usize) -> (Complex64, usize) {
        let sign = if (k & self.zmask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        (self.base * sign, k ^ self.xmask)
    }
}

/// Applies one gate to a state vector in place.
pub fn apply_gate(g: &Gate, state: &mut [Complex64]) {
    let dim = state.len();
    match *g {
        Gate::H(q) => {
            let b = 1 << q;
            let r = std::f64::consts::FRAC_1_SQRT_2;
            for i in 0..dim {
                if i & b == 0 {
                    let (x, y) = (state[i], state[i | b]);
                    state[i] = (x + y) * r;
                    state[i | b] = (x - y) * r;
                }
            }
        }
        Gate::S(q) | Gate::Sdg(q) => {
            let b = 1 << q;
            let ph = if matches!(g, Gate::S(_)) {
                Complex64::new(0.0, 1.0)
            } else {
                Complex64::new(0.0, -1.0)
            };
            for (i, s) in state.iter_mut().enumerate() {
                if i & b != 0 {
                    *s *= ph;
                }
            }
        }
        Gate::Rz { qubit, theta } => {
            let b = 1 << qubit;
            let p0 = Complex64::from_polar(1.0, -theta / 2.0);
            let p1 = Complex64::from_polar(1.0, theta / 2.0);
            for (i, s) in state.iter_mut().enumerate() {
                *s *= if i & b == 0 { p0 } else { p1 };
            }
        }
        Gate::CPhase { a, b, theta } => {
            let m = (1 << a) | (1 << b);
            let ph = Complex64::from_polar(1.0, theta);
            for (i, s) in state.iter_mut().enumerate() {
                if i & m == m {
                    *s *= ph;
                }
            }
        }
        Gate::Cnot { control, target } => {
            let (c, t) = (1 << control, 1 << target);
            for i in 0..dim {
                if i & c != 0 && i & t == 0 {
                    state.swap(i, i | t);
                }
            }
        }
        Gate::Swap(a, b) => {
            let (ba, bb) = (1 << a, 1 << b);
            for i in 0..dim {
                if i & ba != 0 && i & bb == 0 {
                    state.swap(i, (i & !ba) | bb);
                }
            }
        }
    }
}

/// Applies a `2^k × 2^k` matrix to the listed qubits (first listed qubit is
/// the least significant bit of the local index).
pub fn apply_local(matrix: &DMatrix<Complex64>, qubits: &[usize], state: &mut [Complex64]) {
    let k = qubits.len();
    let local = 1usize << k;
    let mask: usize = qubits.iter().map(|&q| 1 << q).sum();
    let offsets: Vec<usize> = (0..local)
        .map(|v| {
            qubits
                .iter()
                .enumerate()
                .filter(|(j, _)| v >> j & 1 == 1)
                .map(|(_, &q)| 1 << q)
                .sum()
        })
        .collect();
    let mut buf = vec![ZERO; local];
    for base in 0..state.len() {
        if base & mask != 0 {
            continue;
        }
        for (v, &o) in offsets.iter().enumerate() {
            buf[v] = state[base | o];
        }
        for (r, &o) in offsets.iter().enumerate() {
            let mut acc = ZERO;
            for (c, &b) in buf.iter().enumerate() {
                acc += matrix[(r, c)] * b;
            }
            state[base | o] = acc;
        }
    }
}

/// `Λ × Λ` centered DFT matrix `e^{i p_k x_m}/√Λ` of one boson.
pub fn centered_dft_matrix(reg: &BosonRegister) -> DMatrix<Complex64> {
    let x = reg.coordinate_grid();
    let p = reg.momentum_grid();
    let lam = reg.levels();
    let norm = 1.0 / (lam as f64).sqrt();
    DMatrix::from_fn(lam, lam, |k, m| Complex64::from_polar(norm, p[k] * x[m]))
}

/// Dense oracle with a qubit cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Oracle {
    pub limit: usize,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle {
            limit: DEFAULT_ORACLE_LIMIT,
        }
    }
}

impl Oracle {
    pub fn new(limit: usize) -> Self {
        Oracle { limit }
    }

    /// Limit from `QSYNTH_ORACLE_LIMIT`, falling back to the default.
    pub fn from_env() -> Result<Self> {
        match std::env::var(ORACLE_LIMIT_ENV) {
            Ok(v) => {
                let limit: usize = v.trim().parse().map_err(|_| {
                    Error::Config(format!("{ORACLE_LIMIT_ENV} must be an integer, got `{v}`"))
                })?;
                if limit > 20 {
                    return Err(Error::Config(format!(
                        "{ORACLE_LIMIT_ENV}={limit} exceeds the hard cap of 20"
                    )));
                }
                Ok(Oracle { limit })
            }
            Err(_) => Ok(Oracle::default()),
        }
    }

    pub fn check(&self, n: usize) -> Result<usize> {
        if n > self.limit {
            return Err(Error::OracleLimit {
                qubits: n,
                limit: self.limit,
            });
        }
        Ok(n)
    }

    pub fn pauli_string_matrix(&self, s: &PauliString, n: usize) -> Result<DenseOperator> {
        let mut sum = PauliSum::new();
        sum.push(1.0, s.clone());
        self.raw_sum_matrix(sum.terms().iter().map(|(c, s)| (Complex64::new(*c, 0.0), s)), n)
    }

    /// `Σ c_k P_k`, accepting any phases on the strings.
    pub fn pauli_sum_matrix(&self, s: &PauliSum, n: usize) -> Result<DenseOperator> {
        self.raw_sum_matrix(s.terms().iter().map(|(c, s)| (Complex64::new(*c, 0.0), s)), n)
    }

    pub fn complex_sum_matrix(&self, s: &crate::pauli::ComplexPauliSum, n: usize) -> Result<DenseOperator> {
        self.raw_sum_matrix(s.terms().iter().map(|(c, s)| (*c, s)), n)
    }

    fn raw_sum_matrix<'a, I>(&self, terms: I, n: usize) -> Result<DenseOperator>
    where
        I: Iterator<Item = (Complex64, &'a PauliString)>,
    {
        self.check(n)?;
        let dim = 1usize << n;
        let mut actions = Vec::new();
        for (c, s) in terms {
            if let Some(q) = s.max_qubit() {
                if q >= n {
                    return Err(Error::IndexOutOfRange {
                        what: "qubit",
                        index: q,
                        limit: n,
                    });
                }
            }
            actions.push((c, PauliAction::new(s)));
        }
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        m.as_mut_slice()
            .par_chunks_mut(dim)
            .enumerate()
            .for_each(|(col, column)| {
                for (c, a) in &actions {
                    let (ph, row) = a.apply(col);
                    column[row] += c * ph;
                }
            });
        Ok(DenseOperator(m))
    }

    /// Product of gate matrices in execution order.
    pub fn circuit_matrix(&self, c: &Circuit) -> Result<DenseOperator> {
        let n = self.check(c.num_qubits())?;
        let dim = 1usize << n;
        let mut m = DMatrix::<Complex64>::identity(dim, dim);
        m.as_mut_slice().par_chunks_mut(dim).for_each(|column| {
            for g in c.gates() {
                apply_gate(g, column);
            }
        });
        Ok(DenseOperator(m))
    }

    pub fn apply_circuit(&self, c: &Circuit, state: &mut [Complex64]) -> Result<()> {
        let n = self.check(c.num_qubits())?;
        if state.len() != 1 << n {
            return Err(Error::InvalidArgument(format!(
                "state of length {} on {n} qubits",
                state.len()
            )));
        }
        for g in c.gates() {
            apply_gate(g, state);
        }
        Ok(())
    }

    /// Centered DFT on every boson of `reg`, identity elsewhere, on `n` qubits.
    pub fn centered_dft(&self, reg: &BosonRegister, n: usize) -> Result<DenseOperator> {
        let n = self.check(n)?;
        let dim = 1usize << n;
        let f = centered_dft_matrix(reg);
        let mut m = DMatrix::<Complex64>::identity(dim, dim);
        m.as_mut_slice().par_chunks_mut(dim).for_each(|column| {
            for b in 0..reg.num_bosons {
                let qs: Vec<usize> = (0..reg.qubits_per_boson).map(|j| reg.qubit(b, j)).collect();
                apply_local(&f, &qs, column);
            }
        });
        Ok(DenseOperator(m))
    }

    /// Dense `H = H_coord + F† K F` with the kinetic part conjugated by the
    /// formula-level DFT; `traceless` drops identity components first.
    pub fn hamiltonian_matrix(&self, h: &CompiledHamiltonian, traceless: bool) -> Result<DenseOperator> {
        let n = self.check(h.num_qubits())?;
        let (coord, kin) = if traceless {
            (h.coordinate_sum().traceless()?, h.kinetic.traceless()?)
        } else {
            (h.coordinate_sum(), h.kinetic.canonicalize()?)
        };
        let mut total = self.pauli_sum_matrix(&coord, n)?;
        if !kin.is_empty() {
            let f = self.centered_dft(&h.bosons, n)?;
            let k = self.pauli_sum_matrix(&kin, n)?;
            total = total.add(&f.adjoint().matmul(&k).matmul(&f));
        }
        Ok(total)
    }

    /// `‖U_trotter(ε) − exp(−iεH')‖₂`, where `H'` is `H` without its identity
    /// component (identity terms are global phases and are not synthesized).
    pub fn trotter_error(
        &self,
        h: &CompiledHamiltonian,
        epsilon: f64,
        policy: Policy,
        strategy: Strategy,
    ) -> Result<f64> {
        let circ = trotter_step(h, epsilon, policy, strategy)?;
        let u = self.circuit_matrix(&circ)?;
        let exact = self.hamiltonian_matrix(h, true)?.expm_hermitian(epsilon)?;
        Ok(u.distance(&exact))
    }
}

/// Basis vector `|k⟩` of dimension `dim`.
pub fn basis_state(dim: usize, k: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; dim];
    v[k] = ONE;
    v
}
