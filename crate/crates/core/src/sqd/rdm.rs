use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use super::hamiltonian::ProjectedHamiltonian;
use super::recovery::OccupationDistribution;
use super::strings::occupied;

/// Spin-resolved one-particle density matrices γ^σ_pq = ⟨ψ|a†_pσ a_qσ|ψ⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinRdm {
    pub alpha: DMatrix<f64>,
    pub beta: DMatrix<f64>,
}

impl SpinRdm {
    pub fn total(&self) -> DMatrix<f64> {
        &self.alpha + &self.beta
    }

    pub fn occupations(&self) -> OccupationDistribution {
        OccupationDistribution {
            n_up: self.alpha.diagonal().iter().copied().collect(),
            n_down: self.beta.diagonal().iter().copied().collect(),
        }
    }
}

pub fn spin_rdm(ham: &ProjectedHamiltonian, psi: &DVector<f64>) -> SpinRdm {
    let n = ham.n_orb();
    let strings = ham.basis().strings();
    let m = strings.len();
    assert_eq!(psi.len(), m * m);
    let c = psi.as_slice();
    // one partial result per alpha row, summed in row order afterwards
    let rows: Vec<(DMatrix<f64>, DMatrix<f64>)> = (0..m)
        .into_par_iter()
        .map(|ia| {
            let mut ga = DMatrix::zeros(n, n);
            let mut gb = DMatrix::zeros(n, n);
            let row = &c[ia * m..(ia + 1) * m];
            let weight: f64 = row.iter().map(|v| v * v).sum();
            for k in occupied(strings[ia]) {
                ga[(k, k)] += weight;
            }
            for s in &ham.singles[ia] {
                let other = &c[s.j as usize * m..(s.j as usize + 1) * m];
                let ov: f64 = other.iter().zip(row).map(|(a, b)| a * b).sum();
                ga[(s.p as usize, s.q as usize)] += s.sign * ov;
            }
            for (ib, &cb) in row.iter().enumerate() {
                let w = cb * cb;
                for k in occupied(strings[ib]) {
                    gb[(k, k)] += w;
                }
                for s in &ham.singles[ib] {
                    gb[(s.p as usize, s.q as usize)] += s.sign * row[s.j as usize] * cb;
                }
            }
            (ga, gb)
        })
        .collect();
    let mut alpha = DMatrix::zeros(n, n);
    let mut beta = DMatrix::zeros(n, n);
    for (a, b) in rows {
        alpha += a;
        beta += b;
    }
    SpinRdm { alpha, beta }
}

/// Spin-summed active-space 1-RDM.
pub fn one_rdm(ham: &ProjectedHamiltonian, psi: &DVector<f64>) -> DMatrix<f64> {
    spin_rdm(ham, psi).total()
}

/// Mean of the per-batch spin-resolved occupations.
pub fn update_occupations(rdms: &[&SpinRdm]) -> Option<OccupationDistribution> {
    let first = rdms.first()?;
    let n = first.alpha.nrows();
    let mut up = vec![0.0; n];
    let mut down = vec![0.0; n];
    for r in rdms {
        for p in 0..n {
            up[p] += r.alpha[(p, p)];
            down[p] += r.beta[(p, p)];
        }
    }
    let k = rdms.len() as f64;
    let clamp = |v: f64| (v / k).clamp(0.0, 1.0);
    Some(OccupationDistribution { n_up: up.into_iter().map(clamp).collect(), n_down: down.into_iter().map(clamp).collect() })
}
