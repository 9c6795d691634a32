//! Restricted closed-shell Hartree–Fock with DIIS, optionally with the
//! continuum response recomputed from the density at every iteration.

mod diis;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::chem::{EriTensor, IntegralSet};
use crate::error::{Error, Result};
use crate::pcm::{PcmContext, SurfaceChargeSolution};

pub use diis::Diis;

/// Eigenvalues of S below this are dropped when building S^(−1/2).
pub const OVERLAP_CUTOFF: f64 = 1e-10;

/// Consecutive iterations the DIIS error must stay below tolerance.
const SETTLED_ITERATIONS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct SCFConfig {
    pub max_iterations: usize,
    pub energy_tolerance: f64,
    pub diis_tolerance: f64,
    pub diis_depth: usize,
    pub level_shift: f64,
}

impl Default for SCFConfig {
    fn default() -> Self {
        Self { max_iterations: 200, energy_tolerance: 1e-9, diis_tolerance: 1e-7, diis_depth: 8, level_shift: 0.0 }
    }
}

impl SCFConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.energy_tolerance > 0.0 && self.diis_tolerance > 0.0) {
            return Err(Error::Config("SCF tolerances must be positive".into()));
        }
        if self.diis_depth < 2 {
            return Err(Error::Config(format!("DIIS depth must be at least 2, got {}", self.diis_depth)));
        }
        if !(self.level_shift >= 0.0 && self.level_shift.is_finite()) {
            return Err(Error::Config(format!("level shift must be non-negative, got {}", self.level_shift)));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("SCF needs at least one iteration".into()));
        }
        Ok(())
    }
}

/// Converged continuum response of an SCF run.
#[derive(Debug, Clone)]
pub struct SolvationResult {
    /// ½ q·φ.
    pub polarization_energy: f64,
    pub solution: SurfaceChargeSolution,
}

#[derive(Debug, Clone)]
pub struct SCFResult {
    pub coefficients: DMatrix<f64>,
    pub orbital_energies: DVector<f64>,
    /// Closed-shell AO density, 2·C_occ C_occᵀ.
    pub density: DMatrix<f64>,
    pub fock: DMatrix<f64>,
    pub energy: f64,
    pub n_occupied: usize,
    pub converged: bool,
    pub iterations: usize,
    pub last_energy_change: f64,
    pub last_diis_error: f64,
    pub solvation: Option<SolvationResult>,
}

impl SCFResult {
    pub fn is_solvated(&self) -> bool {
        self.solvation.is_some()
    }
}

/// X with Xᵀ S X = 1. Symmetric S^(−1/2) when S is well conditioned,
/// otherwise canonical with the near-null directions removed.
pub fn orthogonalizer(overlap: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = SymmetricEigen::new(overlap.clone());
    if eig.eigenvalues.iter().any(|v| !v.is_finite()) {
        return Err(Error::LinearAlgebra("overlap matrix has non-finite eigenvalues".into()));
    }
    let keep: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&i| eig.eigenvalues[i] > OVERLAP_CUTOFF).collect();
    if keep.is_empty() {
        return Err(Error::LinearAlgebra("overlap matrix is singular".into()));
    }
    let n = overlap.nrows();
    let mut scaled = DMatrix::zeros(n, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        scaled.set_column(c, &(eig.eigenvectors.column(i) / eig.eigenvalues[i].sqrt()));
    }
    if keep.len() == n {
        let u = DMatrix::from_columns(&keep.iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>());
        Ok(scaled * u.transpose())
    } else {
        log::warn!("overlap has {} near-linear dependencies; using canonical orthogonalization", n - keep.len());
        Ok(scaled)
    }
}

/// Eigen-solution of F C = S C ε, columns sorted by ascending energy (stable in index).
pub fn solve_roothaan(fock: &DMatrix<f64>, x: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let fp = x.transpose() * fock * x;
    let fp = (&fp + fp.transpose()) * 0.5;
    let eig = SymmetricEigen::new(fp);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let energies = DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
    let cp = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>());
    (energies, x * cp)
}

fn closed_shell_density(c: &DMatrix<f64>, n_occ: usize) -> DMatrix<f64> {
    let occ = c.columns(0, n_occ);
    occ * occ.transpose() * 2.0
}

/// Density from the lowest eigenvectors of the core Hamiltonian.
pub fn core_guess(integrals: &IntegralSet, n_electrons: usize) -> Result<DMatrix<f64>> {
    let x = orthogonalizer(&integrals.overlap)?;
    let (_, c) = solve_roothaan(&integrals.core_hamiltonian(), &x);
    check_electrons(n_electrons, c.ncols())?;
    Ok(closed_shell_density(&c, n_electrons / 2))
}

fn check_electrons(n_electrons: usize, n_mo: usize) -> Result<()> {
    if n_electrons == 0 || !n_electrons.is_multiple_of(2) {
        return Err(Error::Domain(format!("closed-shell RHF needs a positive even electron count, got {n_electrons}")));
    }
    if n_electrons / 2 > n_mo {
        return Err(Error::Domain(format!("{n_electrons} electrons do not fit in {n_mo} orbitals")));
    }
    Ok(())
}

/// Coulomb and exchange matrices J_pq = Σ (pq|rs) P_rs, K_pq = Σ (pr|qs) P_rs.
pub fn coulomb_exchange(eri: &EriTensor, density: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = eri.n();
    let rows: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|p| {
            let mut j = vec![0.0; n];
            let mut k = vec![0.0; n];
            for q in 0..=p {
                let (mut jv, mut kv) = (0.0, 0.0);
                for r in 0..n {
                    for s in 0..n {
                        let d = density[(r, s)];
                        jv += eri.get(p, q, r, s) * d;
                        kv += eri.get(p, r, q, s) * d;
                    }
                }
                j[q] = jv;
                k[q] = kv;
            }
            (j, k)
        })
        .collect();
    let mut j = DMatrix::zeros(n, n);
    let mut k = DMatrix::zeros(n, n);
    for (p, (jr, kr)) in rows.into_iter().enumerate() {
        for q in 0..=p {
            j[(p, q)] = jr[q];
            j[(q, p)] = jr[q];
            k[(p, q)] = kr[q];
            k[(q, p)] = kr[q];
        }
    }
    (j, k)
}

struct Evaluation {
    fock: DMatrix<f64>,
    energy: f64,
    solvation: Option<SolvationResult>,
}

fn evaluate(integrals: &IntegralSet, h: &DMatrix<f64>, density: &DMatrix<f64>, pcm: Option<&PcmContext>) -> Result<Evaluation> {
    let (j, k) = coulomb_exchange(&integrals.eri, density);
    let g = j - k * 0.5;
    let mut fock = h + &g;
    let mut energy = density.component_mul(h).sum() + 0.5 * density.component_mul(&g).sum() + integrals.nuclear_repulsion;
    let mut solvation = None;
    if let Some(ctx) = pcm {
        let solution = ctx.solve(density)?;
        fock += &ctx.operator(&solution.charges)?.v;
        energy += solution.polarization_energy;
        solvation = Some(SolvationResult { polarization_energy: solution.polarization_energy, solution });
    }
    Ok(Evaluation { fock, energy, solvation })
}

/// Runs RHF from the core guess.
pub fn run_rhf(
    integrals: &IntegralSet,
    n_electrons: usize,
    config: &SCFConfig,
    pcm: Option<&PcmContext>,
) -> Result<SCFResult> {
    config.validate()?;
    if let Some(ctx) = pcm {
        if ctx.n_ao() != integrals.n_ao() {
            return Err(Error::Domain("PCM context was built for a different basis".into()));
        }
    }
    let x = orthogonalizer(&integrals.overlap)?;
    check_electrons(n_electrons, x.ncols())?;
    let n_occ = n_electrons / 2;
    let s = &integrals.overlap;
    let h = integrals.core_hamiltonian();
    let (_, c0) = solve_roothaan(&h, &x);
    let mut density = closed_shell_density(&c0, n_occ);

    let mut diis = Diis::new(config.diis_depth);
    let mut previous = f64::NAN;
    let mut settled = 0;
    let mut converged = false;
    let mut iterations = 0;
    let mut d_e = f64::INFINITY;
    let mut err_max = f64::INFINITY;

    for it in 1..=config.max_iterations {
        iterations = it;
        let ev = evaluate(integrals, &h, &density, pcm)?;
        let fds = &ev.fock * &density * s;
        let err = x.transpose() * (&fds - fds.transpose()) * &x;
        err_max = err.amax();
        d_e = (ev.energy - previous).abs();
        previous = ev.energy;
        log::debug!("scf iter {it:3}  E = {:.12}  dE = {d_e:.3e}  err = {err_max:.3e}", ev.energy);
        settled = if err_max < config.diis_tolerance { settled + 1 } else { 0 };
        if d_e < config.energy_tolerance && settled >= SETTLED_ITERATIONS {
            converged = true;
            break;
        }
        let mut f = diis.extrapolate(ev.fock, err);
        if config.level_shift > 0.0 {
            f += (s - s * &density * s * 0.5) * config.level_shift;
        }
        let (_, c) = solve_roothaan(&f, &x);
        density = closed_shell_density(&c, n_occ);
    }

    // final orbitals from the unextrapolated Fock of the last density
    let ev = evaluate(integrals, &h, &density, pcm)?;
    let (orbital_energies, coefficients) = solve_roothaan(&ev.fock, &x);
    let density = closed_shell_density(&coefficients, n_occ);
    let fin = evaluate(integrals, &h, &density, pcm)?;
    if !converged {
        log::warn!("RHF did not converge in {iterations} iterations (dE = {d_e:.3e}, DIIS error = {err_max:.3e})");
    }
    Ok(SCFResult {
        coefficients,
        orbital_energies,
        density,
        fock: fin.fock,
        energy: fin.energy,
        n_occupied: n_occ,
        converged,
        iterations,
        last_energy_change: d_e,
        last_diis_error: err_max,
        solvation: fin.solvation,
    })
}
