//! Complete-space and truncated reference solutions.

use super::hamiltonian::{OneBody, ProjectedHamiltonian};
use super::scrf::{scrf_subspace_solve, ScrfSettings, SolventCoupling, SubspaceSolution};
use super::subspace::SubspaceBasis;
use super::hilbert_dimension;
use crate::active::ActiveHamiltonian;
use crate::error::{Error, Result};
use crate::sampling::{sample_exact, Configuration, SampleSet};

/// Largest determinant space diagonalized in full.
pub const CASCI_DIMENSION_LIMIT: u128 = 10_000_000;

/// Substitution level per spin string of the fallback reference.
pub const TRUNCATED_LEVEL: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ReferenceKind {
    Casci,
    /// Product space of strings within `level` substitutions of the aufbau string.
    TruncatedCi { level: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceState {
    pub kind: ReferenceKind,
    pub basis: SubspaceBasis,
    pub solution: SubspaceSolution,
}

impl ReferenceState {
    /// Exact samples of |c_I|² over the reference determinants.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<SampleSet> {
        let dets: Vec<Configuration> = self.basis.determinants().collect();
        let amps = self.solution.vector.as_slice();
        sample_exact(&dets, amps, self.basis.n_orb(), shots, seed)
    }
}

fn check_closed_shell(h: &ActiveHamiltonian) -> Result<()> {
    if h.n_alpha != h.n_beta {
        return Err(Error::Unsupported(format!(
            "only closed-shell targets are supported, got ({}, {}) electrons",
            h.n_alpha, h.n_beta
        )));
    }
    Ok(())
}

fn solve_in(
    h: &ActiveHamiltonian,
    basis: SubspaceBasis,
    kind: ReferenceKind,
    solvent: Option<&SolventCoupling>,
    settings: &ScrfSettings,
) -> Result<ReferenceState> {
    let ham = ProjectedHamiltonian::new(h, basis)?;
    let solution = scrf_subspace_solve(&ham, &OneBody::of(h), solvent, None, settings)?;
    Ok(ReferenceState { kind, basis: ham.basis().clone(), solution })
}

/// Diagonalization over the complete determinant space (gas or solvated).
pub fn casci(h: &ActiveHamiltonian, solvent: Option<&SolventCoupling>, settings: &ScrfSettings) -> Result<ReferenceState> {
    check_closed_shell(h)?;
    let dim = hilbert_dimension(h.n_orb, h.n_alpha, h.n_beta)?;
    if dim > CASCI_DIMENSION_LIMIT {
        return Err(Error::Capacity { what: "CASCI determinant space (use SQD instead)", value: dim, limit: CASCI_DIMENSION_LIMIT });
    }
    solve_in(h, SubspaceBasis::full(h.n_orb, h.n_alpha)?, ReferenceKind::Casci, solvent, settings)
}

/// The vector exact sampling draws from: CASCI when the complete space is
/// small enough, otherwise the truncated product space.
pub fn reference_state(h: &ActiveHamiltonian, solvent: Option<&SolventCoupling>, settings: &ScrfSettings) -> Result<ReferenceState> {
    check_closed_shell(h)?;
    if hilbert_dimension(h.n_orb, h.n_alpha, h.n_beta)? <= CASCI_DIMENSION_LIMIT {
        return casci(h, solvent, settings);
    }
    let basis = SubspaceBasis::truncated(h.n_orb, h.n_alpha, TRUNCATED_LEVEL)?;
    log::info!("reference vector: truncated CI over {} determinants", basis.dimension());
    solve_in(h, basis, ReferenceKind::TruncatedCi { level: TRUNCATED_LEVEL }, solvent, settings)
}
