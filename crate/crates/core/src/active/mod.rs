//! Active-space selection, effective active Hamiltonians and FCIDUMP files.

mod avas;
mod fcidump;
mod transform;

use nalgebra::DMatrix;

use crate::chem::AOBasis;
use crate::error::{Error, Result};
use crate::scf::SCFResult;

pub use avas::{avas_select, DEFAULT_AVAS_THRESHOLD};
pub use fcidump::{fcidump_read, fcidump_write, read_fcidump_str, write_fcidump_string};
pub use transform::{transform_integrals, ActiveHamiltonian, MAX_ACTIVE_ORBITALS};

/// How the active orbitals are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum ActiveSpaceSpec {
    /// Explicit MO indices (ascending orbital energy order of the SCF).
    Manual { orbitals: Vec<usize> },
    /// Projection onto atomic orbitals such as `"O 2p"`.
    Avas { targets: Vec<String>, threshold: f64 },
}

impl ActiveSpaceSpec {
    /// `n_active` consecutive MOs after `n_core` doubly occupied ones.
    pub fn window(n_core: usize, n_active: usize) -> Self {
        ActiveSpaceSpec::Manual { orbitals: (n_core..n_core + n_active).collect() }
    }

    pub fn select(&self, scf: &SCFResult, basis: &AOBasis, overlap: &DMatrix<f64>) -> Result<MOSpace> {
        match self {
            ActiveSpaceSpec::Manual { orbitals } => MOSpace::manual(scf, orbitals),
            ActiveSpaceSpec::Avas { targets, threshold } => {
                let idx = basis.resolve_targets(targets)?;
                avas_select(scf, &idx, *threshold, overlap)
            }
        }
    }
}

/// MO coefficients split into frozen core, active and discarded virtual orbitals.
#[derive(Debug, Clone, PartialEq)]
pub struct MOSpace {
    pub coefficients: DMatrix<f64>,
    pub core: Vec<usize>,
    pub active: Vec<usize>,
    pub virtuals: Vec<usize>,
    pub n_active_electrons: usize,
    /// Projector eigenvalues of every MO in `coefficients` order (AVAS only).
    pub avas_overlaps: Option<Vec<f64>>,
}

impl MOSpace {
    pub fn manual(scf: &SCFResult, orbitals: &[usize]) -> Result<Self> {
        let n_mo = scf.coefficients.ncols();
        if orbitals.is_empty() {
            return Err(Error::Config("active space has no orbitals".into()));
        }
        let mut seen = vec![false; n_mo];
        for &o in orbitals {
            if o >= n_mo {
                return Err(Error::Config(format!("active orbital {o} out of range (n_mo = {n_mo})")));
            }
            if seen[o] {
                return Err(Error::Config(format!("active orbital {o} listed twice")));
            }
            seen[o] = true;
        }
        let n_occ = scf.n_occupied;
        let core: Vec<usize> = (0..n_occ).filter(|&i| !seen[i]).collect();
        let virtuals: Vec<usize> = (n_occ..n_mo).filter(|&i| !seen[i]).collect();
        let space = Self {
            coefficients: scf.coefficients.clone(),
            core,
            active: orbitals.to_vec(),
            virtuals,
            n_active_electrons: 2 * orbitals.iter().filter(|&&o| o < n_occ).count(),
            avas_overlaps: None,
        };
        Ok(space)
    }

    pub fn n_active(&self) -> usize {
        self.active.len()
    }

    pub fn columns(&self, idx: &[usize]) -> DMatrix<f64> {
        let n_ao = self.coefficients.nrows();
        let mut m = DMatrix::zeros(n_ao, idx.len());
        for (c, &i) in idx.iter().enumerate() {
            m.set_column(c, &self.coefficients.column(i));
        }
        m
    }

    /// Checks partition and orthonormality.
    pub fn validate(&self, overlap: &DMatrix<f64>) -> Result<()> {
        let n_mo = self.coefficients.ncols();
        let mut count = vec![0u8; n_mo];
        for &i in self.core.iter().chain(&self.active).chain(&self.virtuals) {
            if i >= n_mo {
                return Err(Error::Domain(format!("orbital {i} out of range")));
            }
            count[i] += 1;
        }
        if count.iter().any(|&c| c != 1) {
            return Err(Error::Domain("orbital partition is not disjoint and exhaustive".into()));
        }
        let c = &self.coefficients;
        let dev = (c.transpose() * overlap * c - DMatrix::identity(n_mo, n_mo)).amax();
        if dev > 1e-8 {
            return Err(Error::Domain(format!("MOs are not orthonormal (deviation {dev:e})")));
        }
        if self.n_active_electrons > 2 * self.active.len() {
            return Err(Error::Domain("more active electrons than active spin orbitals".into()));
        }
        Ok(())
    }
}
