#![allow(dead_code)]

use std::path::PathBuf;

use solvaq::active::{transform_integrals, ActiveHamiltonian, ActiveSpaceSpec, MOSpace};
use solvaq::chem::{AOBasis, BasisLibrary, Geometry, IntegralSet, LengthUnit, DEFAULT_ERI_CAP};
use solvaq::pcm::{CavityConfig, DielectricParams, PcmContext};
use solvaq::scf::{run_rhf, SCFConfig, SCFResult};

pub struct System {
    pub geometry: Geometry,
    pub basis: AOBasis,
    pub integrals: IntegralSet,
    pub scf: SCFResult,
    pub mos: MOSpace,
    pub hamiltonian: ActiveHamiltonian,
    pub pcm: Option<PcmContext>,
}

pub fn molecule_path(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../molecules").join(file)
}

/// RHF (or RHF-PCM when `epsilon` is given) followed by a window active space.
pub fn system(file: &str, unit: LengthUnit, n_core: usize, n_active: usize, epsilon: Option<f64>) -> System {
    let geometry = Geometry::from_path(&molecule_path(file), unit).unwrap();
    let basis = AOBasis::build(&geometry, &BasisLibrary::load("sto-3g").unwrap()).unwrap();
    let integrals = IntegralSet::compute(&basis, &geometry, DEFAULT_ERI_CAP).unwrap();
    let pcm = epsilon.map(|eps| {
        PcmContext::new(&geometry, &basis, &CavityConfig::default(), DielectricParams::new(eps).unwrap()).unwrap()
    });
    let n_el = geometry.n_electrons(0).unwrap();
    let scf = run_rhf(&integrals, n_el, &SCFConfig::default(), pcm.as_ref()).unwrap();
    assert!(scf.converged);
    let mos = ActiveSpaceSpec::window(n_core, n_active).select(&scf, &basis, &integrals.overlap).unwrap();
    let hamiltonian = transform_integrals(&integrals, &mos, None).unwrap();
    System { geometry, basis, integrals, scf, mos, hamiltonian, pcm }
}

pub fn h2(epsilon: Option<f64>) -> System {
    system("h2.xyz", LengthUnit::Bohr, 0, 2, epsilon)
}

/// Water STO-3G, oxygen 1s frozen, (8e, 6o).
pub fn water(epsilon: Option<f64>) -> System {
    system("water.xyz", LengthUnit::Angstrom, 1, 6, epsilon)
}

pub const WATER_EPSILON: f64 = 78.3553;
