//! Spectra, finite orthogonal polynomials and exact dynamics of two-mode
//! photon-conversion Hamiltonians with intensity-dependent coupling.
//!
//! The Hamiltonian conserves a charge that splits the two-mode Fock space
//! into finite sectors; on each sector the interaction part is a Jacobi
//! (tridiagonal) matrix. This crate builds those matrices
//! ([`hamiltonian`]), diagonalizes them ([`spectral`]), evaluates the
//! associated orthogonal polynomials and the nine exactly solvable families
//! ([`polynomials`]), evolves states ([`evolution`]) and lifts single-photon
//! models to multiphoton ones ([`lifting`]).
//!
//! ```
//! use convspec_core::{spectral_decomposition, Family, ModelSpec, SectorIndex};
//!
//! let model = ModelSpec::family(Family::Krawtchouk { p: 0.3 }).unwrap();
//! let s = spectral_decomposition(&model, &SectorIndex::simple(4)).unwrap();
//! assert!((s.eigenvalues[2] - 2.0).abs() < 1e-12);
//! ```

pub mod error;
pub mod evolution;
pub mod fock_sector;
pub mod hamiltonian;
pub mod lifting;
pub mod polynomials;
pub mod spectral;

pub use error::{Error, Result};
pub use evolution::{
    bracket, evolve_state, expectation, expectation_spectral, free_phases, heisenberg_element, propagator,
    Evolver, SectoredObservable, SectoredState,
};
pub use fock_sector::{charges, compose_state, decompose_state, Charges, FockState, SectorIndex};
pub use hamiltonian::{
    algebra_residual, cal_g, gauge_real, jacobi_operator, operator_matrices, Coupling, JacobiOperator, Limits,
    ModelSpec, OperatorMatrices, RealJacobi, SectorTable,
};
pub use lifting::{lift_model, w_factor, LiftSpec};
pub use polynomials::{Family, FamilyDescriptor};
pub use spectral::{
    decompose_jacobi, eigenvalues_bisection, eigenvalues_tridiagonal, spectral_decomposition,
    verify_dual_orthogonality, verify_orthonormality, SpectralData,
};
