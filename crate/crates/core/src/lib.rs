//! Sample-based subspace diagonalization of molecular Hamiltonians with
//! IEF-PCM continuum solvation.
//!
//! The crate is organized bottom-up:
//!
//! * [`chem`]: geometries, Gaussian basis sets, one- and two-electron integrals.
//! * [`scf`]: restricted Hartree–Fock, optionally coupled to the continuum.
//! * [`pcm`]: cavity tessellation and the IEF-PCM surface-charge problem.
//! * [`active`]: active-space selection, integral transformation, FCIDUMP.
//! * [`sampling`]: configuration samples, a noisy classical sampler, sample files.
//! * [`sqd`]: configuration recovery, spin-closed subspaces, Davidson, and the
//!   self-consistent reaction-field loop per batch.

pub mod active;
pub mod chem;
pub mod error;
pub mod pcm;
pub mod sampling;
pub mod scf;
pub mod sqd;
pub mod units;

pub use error::{Error, Result};

// The guide's snippets run as doctests so the book stays in step with the API.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/scf.md")]
    mod scf {}
    #[doc = include_str!("../../../book/src/solvation.md")]
    mod solvation {}
    #[doc = include_str!("../../../book/src/active-space.md")]
    mod active_space {}
    #[doc = include_str!("../../../book/src/sampling.md")]
    mod sampling {}
    #[doc = include_str!("../../../book/src/subspace.md")]
    mod subspace {}
}
