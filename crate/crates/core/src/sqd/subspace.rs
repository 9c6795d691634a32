use crate::error::{Error, Result};
use crate::sampling::Configuration;

use super::strings::{all_strings, strings_within};

/// Determinant space U × U for a sorted set U of same-weight spin strings.
/// Determinant `(i, j)` (alpha string `U[i]`, beta string `U[j]`) has index
/// `i·|U| + j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubspaceBasis {
    n_orb: usize,
    n_electrons: usize,
    strings: Vec<u64>,
}

impl SubspaceBasis {
    pub fn from_strings(n_orb: usize, n_electrons: usize, mut strings: Vec<u64>) -> Result<Self> {
        if n_orb == 0 || n_orb > 64 {
            return Err(Error::Capacity { what: "orbitals per spin string", value: n_orb as u128, limit: 64 });
        }
        if strings.is_empty() {
            return Err(Error::Domain("subspace needs at least one string".into()));
        }
        let high = if n_orb == 64 { 0 } else { u64::MAX << n_orb };
        if let Some(s) = strings.iter().find(|s| s.count_ones() as usize != n_electrons || *s & high != 0) {
            return Err(Error::Domain(format!("string {s:#b} is not a weight-{n_electrons} word over {n_orb} orbitals")));
        }
        strings.sort_unstable();
        strings.dedup();
        Ok(Self { n_orb, n_electrons, strings })
    }

    /// Every string: the complete determinant space.
    pub fn full(n_orb: usize, n_electrons: usize) -> Result<Self> {
        Self::from_strings(n_orb, n_electrons, all_strings(n_orb, n_electrons))
    }

    /// Strings at most `level` substitutions away from the aufbau string.
    pub fn truncated(n_orb: usize, n_electrons: usize, level: usize) -> Result<Self> {
        Self::from_strings(n_orb, n_electrons, strings_within(n_orb, n_electrons, level))
    }

    pub fn n_orb(&self) -> usize {
        self.n_orb
    }

    /// Electrons per spin.
    pub fn n_electrons(&self) -> usize {
        self.n_electrons
    }

    pub fn strings(&self) -> &[u64] {
        &self.strings
    }

    pub fn n_strings(&self) -> usize {
        self.strings.len()
    }

    pub fn dimension(&self) -> usize {
        self.strings.len() * self.strings.len()
    }

    pub fn index_of(&self, s: u64) -> Option<usize> {
        self.strings.binary_search(&s).ok()
    }

    pub fn determinant(&self, k: usize) -> Configuration {
        let m = self.strings.len();
        Configuration::new(self.strings[k / m], self.strings[k % m])
    }

    pub fn determinants(&self) -> impl Iterator<Item = Configuration> + '_ {
        (0..self.dimension()).map(|k| self.determinant(k))
    }

    pub fn position(&self, c: &Configuration) -> Option<usize> {
        Some(self.index_of(c.alpha)? * self.strings.len() + self.index_of(c.beta)?)
    }

    pub fn contains(&self, c: &Configuration) -> bool {
        self.position(c).is_some()
    }
}

/// Union of all alpha and beta strings of the batch, closed under spin inversion.
pub fn build_subspace(batch: &[Configuration], n_orb: usize, n_alpha: usize, n_beta: usize) -> Result<SubspaceBasis> {
    if n_alpha != n_beta {
        return Err(Error::Unsupported(format!(
            "spin-closed subspaces need N_alpha = N_beta, got ({n_alpha}, {n_beta})"
        )));
    }
    if batch.is_empty() {
        return Err(Error::Domain("empty batch".into()));
    }
    let strings = batch.iter().flat_map(|c| [c.alpha, c.beta]).collect();
    SubspaceBasis::from_strings(n_orb, n_alpha, strings)
}
