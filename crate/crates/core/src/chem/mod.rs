//! Molecular geometry, Gaussian basis sets and integrals.

pub mod basis;
pub mod boys;
pub mod elements;
pub mod geometry;
pub mod integrals;

pub use basis::{AOBasis, AoLabel, BasisLibrary, Shell, ShellTemplate};
pub use boys::boys;
pub use geometry::{Atom, Geometry, LengthUnit};
pub use integrals::{
    compute_eri, compute_one_electron, esp_integrals, esp_integrals_packed, pair_index, EriTensor, IntegralSet, OneElectron, DEFAULT_ERI_CAP,
};
