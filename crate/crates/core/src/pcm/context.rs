use nalgebra::{DMatrix, DVector, Vector3};

use super::cavity::{build_cavity, CavityConfig, CavitySurface};
use super::operators::{assemble_operators, DielectricParams, PCMOperators, SurfaceChargeSolution, SurfaceSolver};
use crate::chem::{esp_integrals, esp_integrals_packed, pair_index, AOBasis, Geometry};
use crate::error::{Error, Result};

/// AO-basis solute–solvent interaction for a fixed set of surface charges.
#[derive(Debug, Clone, PartialEq)]
pub struct SolventOperator {
    /// V_μν = −Σ_i q_i ⟨μ|1/|r − s_i||ν⟩.
    pub v: DMatrix<f64>,
    /// Σ_i q_i Σ_A Z_A/|s_i − R_A|.
    pub nuclear: f64,
}

impl SolventOperator {
    pub fn zeros(n_ao: usize) -> Self {
        Self { v: DMatrix::zeros(n_ao, n_ao), nuclear: 0.0 }
    }
}

fn nuclear_potential(geometry: &Geometry, point: &Vector3<f64>) -> f64 {
    geometry
        .atoms()
        .iter()
        .map(|a| a.charge as f64 / (point - a.position).norm())
        .sum()
}

/// φ_i = Σ_A Z_A/|s_i − R_A| − Σ_μν P_μν ⟨μ|1/|r − s_i||ν⟩.
pub fn molecular_potential(
    density: &DMatrix<f64>,
    geometry: &Geometry,
    basis: &AOBasis,
    surface: &CavitySurface,
) -> DVector<f64> {
    DVector::from_iterator(
        surface.len(),
        surface.tesserae.iter().map(|t| {
            let v = esp_integrals(basis, &t.position);
            nuclear_potential(geometry, &t.position) - density.component_mul(&v).sum()
        }),
    )
}

pub fn fock_contribution(
    solution: &SurfaceChargeSolution,
    surface: &CavitySurface,
    basis: &AOBasis,
    geometry: &Geometry,
) -> SolventOperator {
    let sources: Vec<(f64, Vector3<f64>)> = surface
        .tesserae
        .iter()
        .zip(solution.charges.iter())
        .map(|(t, q)| (-q, t.position))
        .collect();
    let v = crate::chem::integrals::potential_matrix(basis, &sources);
    let nuclear = surface
        .tesserae
        .iter()
        .zip(solution.charges.iter())
        .map(|(t, q)| q * nuclear_potential(geometry, &t.position))
        .sum();
    SolventOperator { v, nuclear }
}

/// Everything needed to couple a density to the continuum repeatedly: the
/// surface, the factorized master equation and ESP integrals at every
/// tessera.
#[derive(Debug, Clone)]
pub struct PcmContext {
    surface: CavitySurface,
    operators: PCMOperators,
    dielectric: DielectricParams,
    solver: SurfaceSolver,
    esp: DMatrix<f64>,
    nuclear: DVector<f64>,
    n_ao: usize,
}

impl PcmContext {
    pub fn new(
        geometry: &Geometry,
        basis: &AOBasis,
        cavity: &CavityConfig,
        dielectric: DielectricParams,
    ) -> Result<Self> {
        let surface = build_cavity(geometry, cavity)?;
        let operators = assemble_operators(&surface)?;
        let solver = SurfaceSolver::new(&operators, dielectric)?;
        let points = surface.positions();
        let esp = esp_integrals_packed(basis, &points);
        let nuclear = DVector::from_iterator(points.len(), points.iter().map(|p| nuclear_potential(geometry, p)));
        log::debug!("pcm cavity: {} tesserae, area {:.4} bohr^2", surface.len(), surface.total_area());
        Ok(Self { surface, operators, dielectric, solver, esp, nuclear, n_ao: basis.n_ao() })
    }

    pub fn surface(&self) -> &CavitySurface {
        &self.surface
    }

    pub fn operators(&self) -> &PCMOperators {
        &self.operators
    }

    pub fn dielectric(&self) -> DielectricParams {
        self.dielectric
    }

    pub fn n_ao(&self) -> usize {
        self.n_ao
    }

    /// Nuclear part of the surface potential.
    pub fn nuclear_potential(&self) -> &DVector<f64> {
        &self.nuclear
    }

    fn check_density(&self, density: &DMatrix<f64>) -> Result<()> {
        if density.shape() != (self.n_ao, self.n_ao) {
            return Err(Error::Domain(format!(
                "density is {:?}, expected {n}×{n}",
                density.shape(),
                n = self.n_ao
            )));
        }
        Ok(())
    }

    /// Surface potential of nuclei plus the electron density.
    pub fn potential(&self, density: &DMatrix<f64>) -> Result<DVector<f64>> {
        self.check_density(density)?;
        let n = self.n_ao;
        let mut packed = DVector::zeros(n * (n + 1) / 2);
        for p in 0..n {
            for q in 0..p {
                packed[pair_index(p, q)] = density[(p, q)] + density[(q, p)];
            }
            packed[pair_index(p, p)] = density[(p, p)];
        }
        Ok(&self.nuclear - &self.esp * packed)
    }

    /// Charges induced by the given total AO density.
    pub fn solve(&self, density: &DMatrix<f64>) -> Result<SurfaceChargeSolution> {
        self.solver.solve(&self.potential(density)?)
    }

    pub fn solve_potential(&self, potentials: &DVector<f64>) -> Result<SurfaceChargeSolution> {
        self.solver.solve(potentials)
    }

    /// Interaction operator of fixed charges.
    pub fn operator(&self, charges: &DVector<f64>) -> Result<SolventOperator> {
        if charges.len() != self.surface.len() {
            return Err(Error::Domain(format!(
                "{} charges for {} tesserae",
                charges.len(),
                self.surface.len()
            )));
        }
        let packed = self.esp.tr_mul(charges);
        let n = self.n_ao;
        let mut v = DMatrix::zeros(n, n);
        for p in 0..n {
            for q in 0..=p {
                let x = -packed[pair_index(p, q)];
                v[(p, q)] = x;
                v[(q, p)] = x;
            }
        }
        Ok(SolventOperator { v, nuclear: charges.dot(&self.nuclear) })
    }
}
