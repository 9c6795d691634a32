//! IEF-PCM continuum solvation on a tessellated molecular cavity.
//!
//! The solvent is represented by apparent charges q_i on tesserae of a
//! union-of-spheres cavity. They solve
//!
//! ```text
//! [2π I − f D A] S q = −f (2π I − D A) φ,      f = (ε − 1)/(ε + 1)
//! ```
//!
//! with S the single-layer (Coulomb) operator, D the double-layer operator,
//! A the diagonal of tessera areas and φ the solute potential on the surface.
//! The polarization free energy is ½ q·φ.

mod cavity;
mod context;
mod lebedev;
mod operators;

pub use cavity::{build_cavity, CavityConfig, CavitySurface, Sphere, Tessera};
pub use context::{fock_contribution, molecular_potential, PcmContext, SolventOperator};
pub use lebedev::{lebedev_grid, SUPPORTED_GRIDS};
pub use operators::{
    assemble_operators, solve_surface_charge, DielectricParams, PCMOperators, SurfaceChargeSolution, SurfaceSolver,
    SELF_POTENTIAL_FACTOR,
};
