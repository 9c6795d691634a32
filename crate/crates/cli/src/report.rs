//! The JSON results document written once per run.

use std::collections::BTreeMap;

use serde::Serialize;
use solvaq::sqd::{BatchResult, OccupationDistribution, ReferenceKind, ReferenceState, SQDResult};
use solvaq::units::hartree_to_kcal;

use crate::config::RunConfig;

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub version: String,
    pub converged: bool,
    pub seeds: Seeds,
    pub molecule: MoleculeReport,
    pub scf: ScfReport,
    pub active_space: Option<ActiveSpaceReport>,
    pub samples: Option<SampleReport>,
    pub reference: Option<ReferenceReport>,
    pub sqd: Option<SqdReport>,
    pub sweep: Option<Vec<SweepRow>>,
    /// Wall times in seconds. The only field that differs between reruns.
    pub timings: BTreeMap<String, f64>,
    pub config: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Seeds {
    pub master: u64,
    pub sampler: u64,
    pub noise: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MoleculeReport {
    pub n_atoms: usize,
    pub n_basis: usize,
    pub n_electrons: usize,
    pub nuclear_repulsion_hartree: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScfReport {
    pub energy_hartree: f64,
    pub converged: bool,
    pub iterations: usize,
    pub last_energy_change: f64,
    pub last_diis_error: f64,
    pub polarization_hartree: Option<f64>,
    pub polarization_kcal: Option<f64>,
    pub tesserae: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ActiveSpaceReport {
    pub core: Vec<usize>,
    pub active: Vec<usize>,
    pub n_orb: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    pub frozen_energy_hartree: f64,
    /// D_AS, the full determinant count of the active space.
    pub hilbert_dimension: u128,
    pub avas_overlaps: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleReport {
    pub source: String,
    pub shots: u64,
    pub unique: usize,
    pub noise: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReferenceReport {
    #[serde(flatten)]
    pub kind: ReferenceKind,
    pub dimension: usize,
    pub energy_hartree: f64,
    pub solvation_hartree: f64,
    pub solvation_kcal: f64,
    pub macro_iterations: usize,
    pub converged: bool,
}

impl ReferenceReport {
    pub fn new(r: &ReferenceState) -> Self {
        let s = &r.solution;
        Self {
            kind: r.kind,
            dimension: r.basis.dimension(),
            energy_hartree: s.energy,
            solvation_hartree: s.solvation_energy,
            solvation_kcal: hartree_to_kcal(s.solvation_energy),
            macro_iterations: s.macro_iterations,
            converged: s.converged,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BatchReport {
    pub batch: usize,
    pub d: usize,
    pub energy_hartree: f64,
    pub solvation_hartree: f64,
    pub solvation_kcal: f64,
    pub macro_iterations: usize,
    pub converged: bool,
}

impl BatchReport {
    fn new(b: &BatchResult) -> Self {
        Self {
            batch: b.batch,
            d: b.dimension(),
            energy_hartree: b.energy,
            solvation_hartree: b.solvation_energy,
            solvation_kcal: b.solvation_kcal(),
            macro_iterations: b.macro_iterations,
            converged: b.converged,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FailureReport {
    pub batch: usize,
    pub message: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct IterationReport {
    pub occupations: OccupationDistribution,
    pub recovered_shots: u64,
    pub corrected_shots: u64,
    pub batches: Vec<BatchReport>,
    pub failures: Vec<FailureReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SqdReport {
    pub energy_hartree: f64,
    pub solvation_hartree: f64,
    pub solvation_kcal: f64,
    /// Index of the lowest-energy batch of the last iteration.
    pub best_batch: usize,
    pub d: usize,
    pub converged: bool,
    pub error_vs_reference_hartree: Option<f64>,
    pub error_vs_reference_kcal: Option<f64>,
    pub iterations: Vec<IterationReport>,
}

impl SqdReport {
    pub fn new(r: &SQDResult, reference: Option<f64>) -> Self {
        let err = reference.map(|e| r.energy - e);
        Self {
            energy_hartree: r.energy,
            solvation_hartree: r.solvation_energy,
            solvation_kcal: r.solvation_kcal(),
            best_batch: r.best,
            d: r.best_batch().dimension(),
            converged: r.converged,
            error_vs_reference_hartree: err,
            error_vs_reference_kcal: err.map(hartree_to_kcal),
            iterations: r
                .iterations
                .iter()
                .map(|it| IterationReport {
                    occupations: it.occupations.clone(),
                    recovered_shots: it.recovered_shots,
                    corrected_shots: it.corrected_shots,
                    batches: it.batches.iter().map(BatchReport::new).collect(),
                    failures: it
                        .failures
                        .iter()
                        .map(|f| FailureReport { batch: f.batch, message: f.message.clone() })
                        .collect(),
                })
                .collect(),
        }
    }
}

/// One row of the sweep table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub shots: usize,
    pub d: usize,
    #[serde(rename = "E_sqd_hartree")]
    pub e_sqd_hartree: f64,
    #[serde(rename = "E_ref_hartree")]
    pub e_ref_hartree: Option<f64>,
    #[serde(rename = "dE_kcal")]
    pub de_kcal: Option<f64>,
    pub gsolv_kcal: f64,
}

impl SweepRow {
    pub fn new(shots: usize, r: &SQDResult, reference: Option<f64>) -> Self {
        Self {
            shots,
            d: r.best_batch().dimension(),
            e_sqd_hartree: r.energy,
            e_ref_hartree: reference,
            de_kcal: reference.map(|e| hartree_to_kcal(r.energy - e)),
            gsolv_kcal: r.solvation_kcal(),
        }
    }
}

impl RunReport {
    /// Short human-readable summary for standard output.
    pub fn summary(&self) -> String {
        use std::fmt::Write;
        let mut s = String::new();
        let solvated = self.scf.polarization_hartree.is_some();
        let status = if self.converged { "converged" } else { "NOT CONVERGED" };
        let _ = writeln!(s, "solvaq {} ({status})", self.command);
        let scf = &self.scf;
        let _ = writeln!(s, "  SCF energy        {:>20.10} Eh  ({} iterations)", scf.energy_hartree, scf.iterations);
        if let (Some(h), Some(k)) = (scf.polarization_hartree, scf.polarization_kcal) {
            let _ = writeln!(s, "  SCF polarization  {h:>20.10} Eh  {k:>10.4} kcal/mol");
        }
        if let Some(a) = &self.active_space {
            let _ = writeln!(
                s,
                "  active space      ({}e, {}o), D_AS = {}",
                a.n_alpha + a.n_beta,
                a.n_orb,
                a.hilbert_dimension
            );
        }
        if let Some(smp) = &self.samples {
            let _ = writeln!(s, "  samples           {} shots, {} unique ({})", smp.shots, smp.unique, smp.source);
        }
        if let Some(r) = &self.reference {
            let kind = match r.kind {
                ReferenceKind::Casci => "CASCI".to_string(),
                ReferenceKind::TruncatedCi { level } => format!("truncated CI (level {level})"),
            };
            let _ = writeln!(s, "  reference         {kind}, d = {}", r.dimension);
            let _ = writeln!(s, "  reference energy  {:>20.10} Eh", r.energy_hartree);
            if solvated {
                let _ = writeln!(s, "  reference G_solv  {:>20.10} Eh  {:>10.4} kcal/mol", r.solvation_hartree, r.solvation_kcal);
            }
        }
        if let Some(q) = &self.sqd {
            let _ = writeln!(s, "  SQD energy        {:>20.10} Eh  (batch {}, d = {})", q.energy_hartree, q.best_batch, q.d);
            if solvated {
                let _ = writeln!(s, "  SQD G_solv        {:>20.10} Eh  {:>10.4} kcal/mol", q.solvation_hartree, q.solvation_kcal);
            }
            if let Some(k) = q.error_vs_reference_kcal {
                let _ = writeln!(s, "  SQD - reference   {k:>20.6} kcal/mol");
            }
            let failed: usize = q.iterations.iter().map(|i| i.failures.len()).sum();
            if failed > 0 {
                let _ = writeln!(s, "  failed batches    {failed}");
            }
        }
        if let Some(rows) = &self.sweep {
            let _ = writeln!(s, "  {:>10} {:>10} {:>18} {:>12}", "shots", "d", "E_sqd", "dE kcal");
            for r in rows {
                let de = r.de_kcal.map_or("-".to_string(), |v| format!("{v:.6}"));
                let _ = writeln!(s, "  {:>10} {:>10} {:>18.10} {:>12}", r.shots, r.d, r.e_sqd_hartree, de);
            }
        }
        s
    }
}
