//! Circuit synthesis and dense verification for lattice Hamiltonians built
//! from truncated bosons and lattice fermions.
//!
//! The pipeline is: a [`model::HamiltonianModel`] is compiled (Jordan-Wigner
//! or Verstraete-Cirac) into a [`compiled::CompiledHamiltonian`], which is
//! turned into Trotter-step circuits ([`circuit::trotter`]) or an LCU block
//! encoding ([`block`]). Everything at small scale can be checked against the
//! dense matrices in [`oracle`].

pub mod block;
pub mod boson;
pub mod circuit;
pub mod compiled;
pub mod error;
pub mod jw;
pub mod lattice;
pub mod model;
pub mod oracle;
pub mod pauli;
pub mod resources;
pub mod vc;

pub use error::{Error, Result};
pub use pauli::{ComplexPauliSum, Pauli, PauliString, PauliSum, Phase};
