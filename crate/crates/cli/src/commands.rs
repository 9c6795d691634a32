//! The four subcommands. Each returns an [`Outcome`]; writing files and
//! choosing the exit status is left to the caller.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use solvaq::active::{transform_integrals, ActiveHamiltonian, MOSpace};
use solvaq::chem::{AOBasis, BasisLibrary, Geometry, IntegralSet, DEFAULT_ERI_CAP};
use solvaq::pcm::{DielectricParams, PcmContext};
use solvaq::sampling::rng::{child_seed, Purpose};
use solvaq::sampling::{apply_noise, read_samples, NoiseModel, SampleSet};
use solvaq::scf::{run_rhf, SCFResult};
use solvaq::sqd::{casci, hilbert_dimension, reference_state, run_sqd, ReferenceKind, ReferenceState, SolventCoupling};
use solvaq::units::hartree_to_kcal;

use crate::config::{RunConfig, SampleSource};
use crate::report::{
    ActiveSpaceReport, MoleculeReport, ReferenceReport, RunReport, SampleReport, ScfReport, Seeds, SqdReport,
    SweepRow,
};
use crate::CliError;

/// Header of the sweep table.
pub const SWEEP_HEADER: &str = "shots,d,E_sqd_hartree,E_ref_hartree,dE_kcal,gsolv_kcal";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Scf,
    Casci,
    Sqd,
    Sweep,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Scf => "scf",
            Command::Casci => "casci",
            Command::Sqd => "sqd",
            Command::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.converged {
            crate::EXIT_OK
        } else {
            crate::EXIT_NOT_CONVERGED
        }
    }
}

pub fn run(command: Command, config: &RunConfig) -> Result<Outcome> {
    match command {
        Command::Scf => cmd_scf(config),
        Command::Casci => cmd_casci(config),
        Command::Sqd => cmd_sqd(config),
        Command::Sweep => cmd_sweep(config),
    }
}

#[derive(Default)]
struct Clock(BTreeMap<String, f64>);

impl Clock {
    fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.0.entry(stage.to_string()).or_default() += start.elapsed().as_secs_f64();
        out
    }
}

struct Prepared {
    geometry: Geometry,
    basis: AOBasis,
    integrals: IntegralSet,
    pcm: Option<PcmContext>,
    scf: SCFResult,
    n_electrons: usize,
}

fn prepare(config: &RunConfig, clock: &mut Clock) -> Result<Prepared> {
    config.validate()?;
    let m = &config.molecule;
    let geometry = Geometry::from_path(&m.geometry, m.unit)
        .with_context(|| format!("reading geometry {}", m.geometry.display()))?;
    let library = BasisLibrary::load(&m.basis).with_context(|| format!("loading basis {}", m.basis))?;
    let basis = AOBasis::build(&geometry, &library)?;
    let n_electrons = geometry.n_electrons(m.charge)?;
    if n_electrons % 2 != 0 {
        return Err(CliError::Config(format!("{n_electrons} electrons cannot form a closed-shell singlet")).into());
    }
    let integrals = clock.time("integrals", || IntegralSet::compute(&basis, &geometry, DEFAULT_ERI_CAP))?;
    let pcm = match config.solvent.cavity() {
        None => None,
        Some((cavity, eps)) => {
            let dielectric = DielectricParams::new(eps)?;
            Some(clock.time("cavity", || PcmContext::new(&geometry, &basis, &cavity, dielectric))?)
        }
    };
    let scf = clock.time("scf", || run_rhf(&integrals, n_electrons, &config.scf.to_config(), pcm.as_ref()))?;
    if scf.converged {
        log::info!("rhf converged in {} iterations: {:.10}", scf.iterations, scf.energy);
    } else {
        log::warn!("rhf did not converge after {} iterations", scf.iterations);
    }
    Ok(Prepared { geometry, basis, integrals, pcm, scf, n_electrons })
}

fn require_scf(p: &Prepared) -> Result<()> {
    if p.scf.converged {
        Ok(())
    } else {
        Err(CliError::NotConverged(format!(
            "SCF stopped after {} iterations (dE = {:e}, DIIS error = {:e})",
            p.scf.iterations, p.scf.last_energy_change, p.scf.last_diis_error
        ))
        .into())
    }
}

fn seeds(config: &RunConfig) -> Seeds {
    let master = config.run.seed;
    Seeds {
        master,
        sampler: child_seed(master, Purpose::Sample, 0, 0),
        noise: child_seed(master, Purpose::Noise, 0, 0),
    }
}

fn base_report(command: Command, config: &RunConfig, p: &Prepared) -> RunReport {
    let scf = &p.scf;
    let polarization = scf.solvation.as_ref().map(|s| s.polarization_energy);
    RunReport {
        command: command.name().into(),
        version: env!("CARGO_PKG_VERSION").into(),
        converged: scf.converged,
        seeds: seeds(config),
        molecule: MoleculeReport {
            n_atoms: p.geometry.len(),
            n_basis: p.basis.n_ao(),
            n_electrons: p.n_electrons,
            nuclear_repulsion_hartree: p.geometry.nuclear_repulsion(),
        },
        scf: ScfReport {
            energy_hartree: scf.energy,
            converged: scf.converged,
            iterations: scf.iterations,
            last_energy_change: scf.last_energy_change,
            last_diis_error: scf.last_diis_error,
            polarization_hartree: polarization,
            polarization_kcal: polarization.map(hartree_to_kcal),
            tesserae: p.pcm.as_ref().map(|c| c.surface().len()),
        },
        active_space: None,
        samples: None,
        reference: None,
        sqd: None,
        sweep: None,
        timings: BTreeMap::new(),
        config: config.clone(),
    }
}

struct Active {
    mos: MOSpace,
    hamiltonian: ActiveHamiltonian,
    report: ActiveSpaceReport,
}

fn active_space(config: &RunConfig, p: &Prepared, clock: &mut Clock) -> Result<Active> {
    let mos = config.active_space.spec().select(&p.scf, &p.basis, &p.integrals.overlap)?;
    let hamiltonian = clock.time("transform", || transform_integrals(&p.integrals, &mos, None))?;
    let report = ActiveSpaceReport {
        core: mos.core.clone(),
        active: mos.active.clone(),
        n_orb: hamiltonian.n_orb,
        n_alpha: hamiltonian.n_alpha,
        n_beta: hamiltonian.n_beta,
        frozen_energy_hartree: hamiltonian.e_frozen,
        hilbert_dimension: hilbert_dimension(hamiltonian.n_orb, hamiltonian.n_alpha, hamiltonian.n_beta)?,
        avas_overlaps: mos.avas_overlaps.clone(),
    };
    log::info!(
        "active space: ({}e, {}o), D_AS = {}",
        hamiltonian.n_alpha + hamiltonian.n_beta,
        hamiltonian.n_orb,
        report.hilbert_dimension
    );
    Ok(Active { mos, hamiltonian, report })
}

fn coupling<'a>(p: &'a Prepared, active: &Active) -> Result<Option<SolventCoupling<'a>>> {
    match &p.pcm {
        None => Ok(None),
        Some(ctx) => Ok(Some(SolventCoupling::from_scf(ctx, &active.mos, &p.scf)?)),
    }
}

fn not_converged(what: &str) -> CliError {
    CliError::NotConverged(what.into())
}

/// Restricted Hartree–Fock, with the reaction field when a solvent is set.
pub fn cmd_scf(config: &RunConfig) -> Result<Outcome> {
    let mut clock = Clock::default();
    let p = prepare(config, &mut clock)?;
    let mut report = base_report(Command::Scf, config, &p);
    report.timings = clock.0;
    Ok(Outcome { report })
}

/// Davidson over the complete determinant space of the active space.
pub fn cmd_casci(config: &RunConfig) -> Result<Outcome> {
    let mut clock = Clock::default();
    let p = prepare(config, &mut clock)?;
    require_scf(&p)?;
    let active = active_space(config, &p, &mut clock)?;
    let solvent = coupling(&p, &active)?;
    let settings = config.sqd_config().scrf_settings();
    let reference = clock
        .time("casci", || casci(&active.hamiltonian, solvent.as_ref(), &settings))
        .context("complete-space CI is limited to small active spaces; use the sqd command for larger ones")?;
    let mut report = base_report(Command::Casci, config, &p);
    report.converged &= reference.solution.converged;
    report.active_space = Some(active.report);
    report.reference = Some(ReferenceReport::new(&reference));
    report.timings = clock.0;
    Ok(Outcome { report })
}

struct Sampled<'a> {
    samples: SampleSet,
    reference: Option<ReferenceState>,
    solvent: Option<SolventCoupling<'a>>,
    report: SampleReport,
}

fn draw_samples<'a>(config: &RunConfig, p: &'a Prepared, active: &Active, clock: &mut Clock) -> Result<Sampled<'a>> {
    let solvent = coupling(p, active)?;
    let s = seeds(config);
    let h = &active.hamiltonian;
    let (raw, reference, source) = match config.sampler.source {
        SampleSource::Exact => {
            let settings = config.sqd_config().scrf_settings();
            let reference = clock.time("reference", || reference_state(h, solvent.as_ref(), &settings))?;
            if !reference.solution.converged {
                return Err(not_converged("reference state for the exact sampler").into());
            }
            let raw = clock.time("sampling", || reference.sample(config.sampler.shots, s.sampler))?;
            (raw, Some(reference), "exact".to_string())
        }
        SampleSource::File => {
            let path = config.sampler.path.as_deref().expect("validated");
            let raw = read_samples(path)?;
            (raw, None, path.display().to_string())
        }
    };
    let samples = if config.sampler.noise > 0.0 {
        let model = NoiseModel::new(config.sampler.noise, s.noise)?;
        clock.time("sampling", || apply_noise(&raw, &model))
    } else {
        raw
    };
    let report =
        SampleReport { source, shots: samples.total(), unique: samples.n_unique(), noise: config.sampler.noise };
    log::info!("{} shots, {} unique configurations", report.shots, report.unique);
    Ok(Sampled { samples, reference, solvent, report })
}

fn casci_energy(r: &Option<ReferenceState>) -> Option<f64> {
    r.as_ref().filter(|r| r.kind == ReferenceKind::Casci).map(|r| r.solution.energy)
}

/// Sample, recover, batch and diagonalize.
pub fn cmd_sqd(config: &RunConfig) -> Result<Outcome> {
    let mut clock = Clock::default();
    let p = prepare(config, &mut clock)?;
    require_scf(&p)?;
    let active = active_space(config, &p, &mut clock)?;
    let sampled = draw_samples(config, &p, &active, &mut clock)?;
    let result = clock.time("sqd", || {
        run_sqd(&active.hamiltonian, sampled.solvent.as_ref(), &sampled.samples, &config.sqd_config())
    })?;
    let mut report = base_report(Command::Sqd, config, &p);
    report.converged &= result.converged;
    report.sqd = Some(SqdReport::new(&result, casci_energy(&sampled.reference)));
    report.reference = sampled.reference.as_ref().map(ReferenceReport::new);
    report.active_space = Some(active.report);
    report.samples = Some(sampled.report);
    report.timings = clock.0;
    Ok(Outcome { report })
}

/// One SQD run per entry of `sweep.batch_sizes`, all on the same samples.
pub fn cmd_sweep(config: &RunConfig) -> Result<Outcome> {
    if config.sweep.batch_sizes.len() < 2 {
        return Err(CliError::Config("sweep.batch_sizes needs at least two entries".into()).into());
    }
    let mut clock = Clock::default();
    let p = prepare(config, &mut clock)?;
    require_scf(&p)?;
    let active = active_space(config, &p, &mut clock)?;
    let sampled = draw_samples(config, &p, &active, &mut clock)?;
    let e_ref = casci_energy(&sampled.reference);
    let mut rows = Vec::with_capacity(config.sweep.batch_sizes.len());
    let mut converged = true;
    for &size in &config.sweep.batch_sizes {
        let mut sqd = config.sqd_config();
        sqd.batch_size = size;
        let result = clock.time("sqd", || {
            run_sqd(&active.hamiltonian, sampled.solvent.as_ref(), &sampled.samples, &sqd)
        })?;
        converged &= result.converged;
        let row = SweepRow::new(size, &result, e_ref);
        log::info!("sweep shots {size}: d = {}, E = {:.10}", row.d, row.e_sqd_hartree);
        rows.push(row);
    }
    let mut report = base_report(Command::Sweep, config, &p);
    report.converged &= converged;
    report.reference = sampled.reference.as_ref().map(ReferenceReport::new);
    report.active_space = Some(active.report);
    report.samples = Some(sampled.report);
    report.sweep = Some(rows);
    report.timings = clock.0;
    Ok(Outcome { report })
}

/// Writes the sweep table with the fixed header. Missing reference values
/// are left empty.
pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `<command>.json`, plus `sweep.csv` for sweeps, into `dir`.
pub fn write_outputs(outcome: &Outcome, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("cannot create {}: {e}", dir.display())))?;
    let report = &outcome.report;
    let json = dir.join(format!("{}.json", report.command));
    let text = serde_json::to_string_pretty(report)?;
    std::fs::write(&json, text + "\n").with_context(|| format!("writing {}", json.display()))?;
    let mut written = vec![json];
    if let Some(rows) = &report.sweep {
        let path = dir.join("sweep.csv");
        let file = std::fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        write_sweep_csv(rows, file)?;
        written.push(path);
    }
    Ok(written)
}
