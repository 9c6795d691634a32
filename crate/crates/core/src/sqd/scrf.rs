//! Self-consistent reaction field inside one determinant subspace.

use nalgebra::{DMatrix, DVector};

use super::davidson::{davidson, DavidsonSettings};
use super::hamiltonian::{OneBody, ProjectedHamiltonian};
use super::rdm::{spin_rdm, SpinRdm};
use crate::active::MOSpace;
use crate::error::{Error, Result};
use crate::pcm::{PcmContext, SurfaceChargeSolution};
use crate::scf::SCFResult;

/// Couples an active-space density to the continuum: frozen-core density and
/// active orbitals in the AO basis, plus the charges the loop starts from.
#[derive(Debug, Clone)]
pub struct SolventCoupling<'a> {
    context: &'a PcmContext,
    core_density: DMatrix<f64>,
    active: DMatrix<f64>,
    initial_charges: DVector<f64>,
}

impl<'a> SolventCoupling<'a> {
    pub fn new(context: &'a PcmContext, mos: &MOSpace, initial_charges: DVector<f64>) -> Result<Self> {
        if mos.coefficients.nrows() != context.n_ao() {
            return Err(Error::Domain("MO coefficients do not match the PCM basis".into()));
        }
        if initial_charges.len() != context.surface().len() {
            return Err(Error::Domain(format!(
                "{} initial charges for {} tesserae",
                initial_charges.len(),
                context.surface().len()
            )));
        }
        let c_core = mos.columns(&mos.core);
        Ok(Self {
            context,
            core_density: &c_core * c_core.transpose() * 2.0,
            active: mos.columns(&mos.active),
            initial_charges,
        })
    }

    /// Starts from the converged RHF-PCM surface charges of `scf`.
    pub fn from_scf(context: &'a PcmContext, mos: &MOSpace, scf: &SCFResult) -> Result<Self> {
        let q = match &scf.solvation {
            Some(s) => s.solution.charges.clone(),
            None => context.solve(&scf.density)?.charges,
        };
        Self::new(context, mos, q)
    }

    pub fn context(&self) -> &PcmContext {
        self.context
    }

    pub fn initial_charges(&self) -> &DVector<f64> {
        &self.initial_charges
    }

    /// Total AO density for an active 1-RDM.
    pub fn density(&self, gamma: &DMatrix<f64>) -> DMatrix<f64> {
        &self.core_density + &self.active * gamma * self.active.transpose()
    }

    pub fn response(&self, gamma: &DMatrix<f64>) -> Result<SurfaceChargeSolution> {
        self.context.solve(&self.density(gamma))
    }

    /// The gas-phase one-body part with the interaction of fixed charges folded in.
    pub fn embed(&self, gas: &OneBody, charges: &DVector<f64>) -> Result<OneBody> {
        let op = self.context.operator(charges)?;
        let dh = self.active.transpose() * &op.v * &self.active;
        let dh = (&dh + dh.transpose()) * 0.5;
        Ok(OneBody {
            h: &gas.h + dh,
            constant: gas.constant + self.core_density.component_mul(&op.v).sum() + op.nuclear,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScrfSettings {
    pub davidson: DavidsonSettings,
    /// Converged when successive free energies differ by less than this.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for ScrfSettings {
    fn default() -> Self {
        Self { davidson: DavidsonSettings::default(), tolerance: 1e-8, max_iterations: 30 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSolution {
    /// Free energy G (the plain ground-state energy in the gas phase).
    pub energy: f64,
    /// ½ q·φ at the final density; zero in the gas phase.
    pub solvation_energy: f64,
    pub vector: DVector<f64>,
    pub rdm: SpinRdm,
    pub macro_iterations: usize,
    pub converged: bool,
    /// G after every macro-iteration.
    pub trajectory: Vec<f64>,
    /// Final surface charges (solvated only).
    pub charges: Option<DVector<f64>>,
}

/// Ground state of the projected Hamiltonian, iterated with the reaction
/// field to self-consistency when `solvent` is given.
///
/// Each macro-iteration diagonalizes H⁰ + V(q), builds the density of the
/// ground state, solves new charges q' with potentials φ' and evaluates
/// G = E − q·φ' + ½ q'·φ', i.e. ⟨H⁰⟩ plus the polarization free energy of the
/// current state.
pub fn scrf_subspace_solve(
    ham: &ProjectedHamiltonian,
    gas: &OneBody,
    solvent: Option<&SolventCoupling>,
    guess: Option<&DVector<f64>>,
    settings: &ScrfSettings,
) -> Result<SubspaceSolution> {
    let solve = |one: &OneBody, guess: Option<&DVector<f64>>| {
        let diag = ham.diagonal(one);
        davidson(|x, y| ham.apply(one, &diag, x, y), &diag, guess, &settings.davidson)
    };
    let Some(solvent) = solvent else {
        let pair = solve(gas, guess)?;
        let rdm = spin_rdm(ham, &pair.vector);
        return Ok(SubspaceSolution {
            energy: pair.value,
            solvation_energy: 0.0,
            vector: pair.vector,
            rdm,
            macro_iterations: 1,
            converged: true,
            trajectory: vec![pair.value],
            charges: None,
        });
    };
    if settings.max_iterations == 0 {
        return Err(Error::Config("at least one reaction-field iteration is required".into()));
    }
    let mut q = solvent.initial_charges().clone();
    let mut vector = guess.cloned();
    let mut trajectory = Vec::new();
    let mut last = None;
    for it in 0..settings.max_iterations {
        let one = solvent.embed(gas, &q)?;
        let pair = solve(&one, vector.as_ref())?;
        let rdm = spin_rdm(ham, &pair.vector);
        let sol = solvent.response(&rdm.total())?;
        let g = pair.value - q.dot(&sol.potentials) + sol.polarization_energy;
        let converged = trajectory.last().is_some_and(|&prev: &f64| (g - prev).abs() < settings.tolerance);
        trajectory.push(g);
        log::debug!("reaction field iteration {}: G = {g:.12}", it + 1);
        let result = SubspaceSolution {
            energy: g,
            solvation_energy: sol.polarization_energy,
            vector: pair.vector.clone(),
            rdm,
            macro_iterations: it + 1,
            converged,
            trajectory: trajectory.clone(),
            charges: Some(sol.charges.clone()),
        };
        if converged {
            return Ok(result);
        }
        q = sol.charges;
        vector = Some(pair.vector);
        last = Some(result);
    }
    let mut result = last.expect("at least one iteration ran");
    result.trajectory = trajectory;
    log::warn!("reaction field not converged after {} iterations", settings.max_iterations);
    Ok(result)
}

/// ⟨ψ|H|ψ⟩ for a given one-body part.
pub fn expectation(ham: &ProjectedHamiltonian, one: &OneBody, psi: &DVector<f64>) -> f64 {
    let diag = ham.diagonal(one);
    let mut y = vec![0.0; psi.len()];
    ham.apply(one, &diag, psi.as_slice(), &mut y);
    psi.iter().zip(&y).map(|(a, b)| a * b).sum()
}
