//! Sample-based diagonalization: configuration recovery, spin-closed
//! subspaces, projected-Hamiltonian Davidson and the per-batch reaction field.

mod davidson;
mod driver;
mod hamiltonian;
mod rdm;
mod recovery;
mod reference;
mod scrf;
pub mod strings;
mod subspace;

pub use davidson::{davidson, DavidsonSettings, Eigenpair};
pub use driver::{run_sqd, BatchFailure, BatchResult, SQDConfig, SQDIteration, SQDResult};
pub use hamiltonian::{determinant_element, OneBody, ProjectedHamiltonian};
pub use rdm::{one_rdm, spin_rdm, update_occupations, SpinRdm};
pub use recovery::{correct_string, draw_batches, init_occupations, recover, OccupationDistribution, RecoveredSet};
pub use reference::{casci, reference_state, ReferenceKind, ReferenceState, CASCI_DIMENSION_LIMIT, TRUNCATED_LEVEL};
pub use scrf::{expectation, scrf_subspace_solve, ScrfSettings, SolventCoupling, SubspaceSolution};
pub use subspace::{build_subspace, SubspaceBasis};

use crate::error::{Error, Result};

/// Number of determinants C(n_orb, N_α)·C(n_orb, N_β).
pub fn hilbert_dimension(n_orb: usize, n_alpha: usize, n_beta: usize) -> Result<u128> {
    if n_alpha > n_orb || n_beta > n_orb {
        return Err(Error::Domain(format!("({n_alpha}, {n_beta}) electrons exceed {n_orb} orbitals")));
    }
    let a = strings::binomial(n_orb as u64, n_alpha as u64);
    let b = strings::binomial(n_orb as u64, n_beta as u64);
    a.zip(b)
        .and_then(|(a, b)| a.checked_mul(b))
        .ok_or(Error::Capacity { what: "Hilbert-space dimension", value: u128::MAX, limit: u128::MAX })
}
