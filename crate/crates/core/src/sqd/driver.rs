use nalgebra::DVector;
use rayon::prelude::*;

use super::hamiltonian::{OneBody, ProjectedHamiltonian};
use super::hilbert_dimension;
use super::rdm::{update_occupations, SpinRdm};
use super::recovery::{draw_batches, init_occupations, recover, OccupationDistribution};
use super::scrf::{scrf_subspace_solve, ScrfSettings, SolventCoupling};
use super::subspace::build_subspace;
use crate::active::ActiveHamiltonian;
use crate::error::{Error, Result};
use crate::sampling::rng::{child_seed, Purpose};
use crate::sampling::{Configuration, SampleSet};
use crate::units::hartree_to_kcal;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SQDConfig {
    /// Batches K per recovery iteration.
    pub batches: usize,
    /// Shots per batch.
    pub batch_size: usize,
    /// Recovery iterations.
    pub iterations: usize,
    pub davidson_tolerance: f64,
    pub scrf_tolerance: f64,
    pub max_macro_iterations: usize,
    pub seed: u64,
    /// Worker threads for batch execution; 0 uses every available core.
    pub workers: usize,
}

impl Default for SQDConfig {
    fn default() -> Self {
        Self {
            batches: 10,
            batch_size: 1000,
            iterations: 3,
            davidson_tolerance: 1e-8,
            scrf_tolerance: 1e-8,
            max_macro_iterations: 30,
            seed: 0,
            workers: 0,
        }
    }
}

impl SQDConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batches == 0 || self.batch_size == 0 || self.iterations == 0 {
            return Err(Error::Config("batches, batch_size and iterations must be at least 1".into()));
        }
        if !(self.davidson_tolerance > 0.0 && self.scrf_tolerance > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.max_macro_iterations == 0 {
            return Err(Error::Config("max_macro_iterations must be at least 1".into()));
        }
        Ok(())
    }

    pub fn scrf_settings(&self) -> ScrfSettings {
        let mut s = ScrfSettings { tolerance: self.scrf_tolerance, max_iterations: self.max_macro_iterations, ..Default::default() };
        s.davidson.tolerance = self.davidson_tolerance;
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchResult {
    pub batch: usize,
    /// E^(b): free energy in the solvated case.
    pub energy: f64,
    /// G_solv^(b) in hartree.
    pub solvation_energy: f64,
    pub strings: Vec<u64>,
    pub vector: DVector<f64>,
    pub rdm: SpinRdm,
    pub macro_iterations: usize,
    pub converged: bool,
    pub trajectory: Vec<f64>,
}

impl BatchResult {
    pub fn dimension(&self) -> usize {
        self.strings.len() * self.strings.len()
    }

    pub fn solvation_kcal(&self) -> f64 {
        hartree_to_kcal(self.solvation_energy)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchFailure {
    pub batch: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SQDIteration {
    /// Occupations the recovery of this iteration used.
    pub occupations: OccupationDistribution,
    pub recovered_shots: u64,
    pub corrected_shots: u64,
    pub batches: Vec<BatchResult>,
    pub failures: Vec<BatchFailure>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SQDResult {
    pub iterations: Vec<SQDIteration>,
    /// Lowest E^(b) of the last iteration.
    pub energy: f64,
    pub solvation_energy: f64,
    /// Position of the selected batch within the last iteration's `batches`.
    pub best: usize,
    pub converged: bool,
    pub hilbert_dimension: u128,
    pub n_orb: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    pub solvated: bool,
    pub config: SQDConfig,
}

impl SQDResult {
    pub fn best_batch(&self) -> &BatchResult {
        &self.iterations.last().expect("at least one iteration").batches[self.best]
    }

    pub fn solvation_kcal(&self) -> f64 {
        hartree_to_kcal(self.solvation_energy)
    }
}

fn solve_batch(
    h: &ActiveHamiltonian,
    gas: &OneBody,
    solvent: Option<&SolventCoupling>,
    batch: &[Configuration],
    index: usize,
    settings: &ScrfSettings,
) -> Result<BatchResult> {
    let basis = build_subspace(batch, h.n_orb, h.n_alpha, h.n_beta)?;
    let strings = basis.strings().to_vec();
    let ham = ProjectedHamiltonian::new(h, basis)?;
    let sol = scrf_subspace_solve(&ham, gas, solvent, None, settings)?;
    Ok(BatchResult {
        batch: index,
        energy: sol.energy,
        solvation_energy: sol.solvation_energy,
        strings,
        vector: sol.vector,
        rdm: sol.rdm,
        macro_iterations: sol.macro_iterations,
        converged: sol.converged,
        trajectory: sol.trajectory,
    })
}

/// Converged batches, or every successful one when none converged.
fn usable(batches: &[BatchResult]) -> Vec<usize> {
    let conv: Vec<usize> = batches.iter().enumerate().filter(|(_, b)| b.converged).map(|(i, _)| i).collect();
    if conv.is_empty() {
        (0..batches.len()).collect()
    } else {
        conv
    }
}

/// Recovery, batching and per-batch subspace solves repeated for the
/// configured number of iterations. The answer is the lowest batch energy of
/// the last iteration.
pub fn run_sqd(
    h: &ActiveHamiltonian,
    solvent: Option<&SolventCoupling>,
    samples: &SampleSet,
    config: &SQDConfig,
) -> Result<SQDResult> {
    config.validate()?;
    if h.n_alpha != h.n_beta {
        return Err(Error::Unsupported(format!(
            "only closed-shell targets are supported, got ({}, {}) electrons",
            h.n_alpha, h.n_beta
        )));
    }
    if samples.n_orb() != h.n_orb {
        return Err(Error::Domain(format!("samples cover {} orbitals, the active space {}", samples.n_orb(), h.n_orb)));
    }
    if samples.is_empty() {
        return Err(Error::Domain("sample set is empty".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let settings = config.scrf_settings();
    let gas = OneBody::of(h);
    let mut occ = init_occupations(samples, h.n_alpha, h.n_beta)?;
    let mut iterations = Vec::with_capacity(config.iterations);
    for it in 0..config.iterations {
        let iteration = pool.install(|| -> Result<SQDIteration> {
            let rec_seed = child_seed(config.seed, Purpose::Recovery, it as u64, 0);
            let recovered = recover(samples, &occ, h.n_alpha, h.n_beta, rec_seed)?;
            let batch_seed = child_seed(config.seed, Purpose::Batch, it as u64, 0);
            let batches = draw_batches(&recovered, config.batches, config.batch_size, batch_seed)?;
            let outcomes: Vec<Result<BatchResult>> = batches
                .par_iter()
                .enumerate()
                .map(|(b, batch)| solve_batch(h, &gas, solvent, batch, b, &settings))
                .collect();
            let mut ok = Vec::new();
            let mut failures = Vec::new();
            for (b, o) in outcomes.into_iter().enumerate() {
                match o {
                    Ok(r) => ok.push(r),
                    Err(e) => {
                        log::warn!("iteration {it} batch {b} failed: {e}");
                        failures.push(BatchFailure { batch: b, message: e.to_string() });
                    }
                }
            }
            Ok(SQDIteration {
                occupations: occ.clone(),
                recovered_shots: recovered.samples.total(),
                corrected_shots: recovered.n_corrected,
                batches: ok,
                failures,
            })
        })?;
        if iteration.batches.is_empty() {
            let msg = iteration.failures.first().map(|f| f.message.clone()).unwrap_or_default();
            return Err(Error::Domain(format!("every batch of iteration {it} failed: {msg}")));
        }
        let rdms: Vec<&SpinRdm> = usable(&iteration.batches).into_iter().map(|i| &iteration.batches[i].rdm).collect();
        occ = update_occupations(&rdms).expect("at least one batch");
        log::info!(
            "iteration {}: min batch energy {:.10}",
            it + 1,
            iteration.batches.iter().map(|b| b.energy).fold(f64::INFINITY, f64::min)
        );
        iterations.push(iteration);
    }
    let last = iterations.last().expect("iterations ≥ 1");
    let mut best = None::<usize>;
    for i in usable(&last.batches) {
        if best.is_none_or(|k| last.batches[i].energy < last.batches[k].energy) {
            best = Some(i);
        }
    }
    let best = best.expect("non-empty batch list");
    let chosen = &last.batches[best];
    Ok(SQDResult {
        energy: chosen.energy,
        solvation_energy: chosen.solvation_energy,
        best,
        converged: chosen.converged,
        hilbert_dimension: hilbert_dimension(h.n_orb, h.n_alpha, h.n_beta)?,
        n_orb: h.n_orb,
        n_alpha: h.n_alpha,
        n_beta: h.n_beta,
        solvated: solvent.is_some(),
        config: *config,
        iterations,
    })
}
