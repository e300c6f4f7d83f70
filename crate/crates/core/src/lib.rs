//! Hamiltonian lattice method on a momentum lattice with a Breit-frame
//! admissibility cut.
//!
//! The crate enumerates the restricted Fock space of a scalar field whose
//! partons all carry strictly positive momentum components summing to the
//! hadron momentum `P = (N, .., N)`, assembles the second-quantized φ⁴ or φ³
//! Hamiltonian on that basis, diagonalizes it and derives invariant masses,
//! the critical line of the φ⁴ theory, scaling fits and parton distribution
//! functions.
//!
//! Everything here is `no_std` (with `alloc`); file formats, the CLI and
//! thread-parallel drivers live in the `breitham` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod basis;
pub mod critical;
pub mod eigen;
mod error;
pub mod model;
pub mod observables;
pub mod operator;
pub mod oracle;
pub mod reference;

pub use basis::{
    build_lattice, enumerate_basis, n_parity, satisfies_breit, state_index, Basis, FockState,
    LatticeSpec, Momentum, Parity,
};
pub use critical::{
    alpha_ratio, find_kappa_crit, find_kappa_crit_with, fit_scaling, ground_mass_points,
    scan_kappa, BracketSearch, CriticalEstimate, FitWindow, PhiFourSetup, ScalingFit, ScanOutcome,
    ScanRecord,
};
pub use eigen::{eig_sym, eig_sym_lowest, Spectrum};
pub use error::{Error, Result};
pub use model::{
    couplings_from_lattice_params, omega, tadpole_sigma, LatticeCouplings, ModeSet, ModelParams,
    Vertex,
};
pub use observables::{
    distribution, expected_particle_number, ground_distribution, invariant_mass_sq, mass_ratios,
    mass_spectrum, DistributionBin, DistributionTable, MassLevel,
};
pub use operator::{assemble, OperatorKernel, SymmetricOperator};
pub use oracle::matrix_element_oracle;
