use nalgebra::DMatrix;
use rayon::prelude::*;

use super::MOSpace;
use crate::chem::{pair_index, EriTensor, IntegralSet};
use crate::error::{Error, Result};
use crate::pcm::SolventOperator;
use crate::scf::coulomb_exchange;

/// Largest active space handled by the dense transform.
pub const MAX_ACTIVE_ORBITALS: usize = 24;

/// Second-quantized Hamiltonian over the active orbitals.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveHamiltonian {
    pub n_orb: usize,
    pub n_alpha: usize,
    pub n_beta: usize,
    pub h_eff: DMatrix<f64>,
    pub eri: EriTensor,
    /// Nuclear repulsion plus frozen-core energy (plus frozen solvent terms).
    pub e_frozen: f64,
}

impl ActiveHamiltonian {
    pub fn new(n_alpha: usize, n_beta: usize, h_eff: DMatrix<f64>, eri: EriTensor, e_frozen: f64) -> Result<Self> {
        let n_orb = h_eff.nrows();
        if h_eff.ncols() != n_orb || eri.n() != n_orb {
            return Err(Error::Domain("one- and two-body integral dimensions disagree".into()));
        }
        if n_alpha > n_orb || n_beta > n_orb {
            return Err(Error::Domain(format!("({n_alpha}, {n_beta}) electrons exceed {n_orb} orbitals")));
        }
        if n_orb > 64 {
            return Err(Error::Capacity { what: "active orbitals", value: n_orb as u128, limit: 64 });
        }
        Ok(Self { n_orb, n_alpha, n_beta, h_eff, eri, e_frozen })
    }

    /// Energy of the determinant doubly occupying orbitals 0..n_beta and
    /// singly (alpha) occupying n_beta..n_alpha.
    pub fn aufbau_energy(&self) -> f64 {
        let (na, nb) = (self.n_alpha, self.n_beta);
        let mut e = self.e_frozen;
        for i in 0..na {
            e += self.h_eff[(i, i)];
        }
        for i in 0..nb {
            e += self.h_eff[(i, i)];
        }
        let g = |i: usize, j: usize| self.eri.get(i, i, j, j);
        let x = |i: usize, j: usize| self.eri.get(i, j, j, i);
        for (n_i, n_j, same) in [(na, na, true), (nb, nb, true), (na, nb, false)] {
            let scale = if same { 0.5 } else { 1.0 };
            for i in 0..n_i {
                for j in 0..n_j {
                    e += scale * g(i, j);
                    if same {
                        e -= scale * x(i, j);
                    }
                }
            }
        }
        e
    }
}

/// Two-sided transform of a packed AO tensor: (ij|kl) = Σ C_pi C_qj C_rk C_sl (pq|rs).
pub fn transform_eri(eri: &EriTensor, c: &DMatrix<f64>) -> EriTensor {
    let n_ao = eri.n();
    let m = c.ncols();
    let ao_pairs: Vec<(usize, usize)> = (0..n_ao).flat_map(|r| (0..=r).map(move |s| (r, s))).collect();
    let ct = c.transpose();
    // half[rs][ij] = Σ_pq C_pi C_qj (pq|rs)
    let half: Vec<DMatrix<f64>> = ao_pairs
        .par_iter()
        .map(|&(r, s)| {
            let block = DMatrix::from_fn(n_ao, n_ao, |p, q| eri.get(p, q, r, s));
            &ct * block * c
        })
        .collect();
    let act_pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
    let full: Vec<DMatrix<f64>> = act_pairs
        .par_iter()
        .map(|&(i, j)| {
            let mut block = DMatrix::zeros(n_ao, n_ao);
            for (k, &(r, s)) in ao_pairs.iter().enumerate() {
                let v = half[k][(i, j)];
                block[(r, s)] = v;
                block[(s, r)] = v;
            }
            &ct * block * c
        })
        .collect();
    let mut out = EriTensor::zeros(m);
    for (a, &(i, j)) in act_pairs.iter().enumerate() {
        for &(k, l) in &act_pairs[..=a] {
            out.set(i, j, k, l, full[a][(k, l)]);
        }
    }
    debug_assert!(act_pairs.iter().all(|&(i, j)| pair_index(i, j) < m * (m + 1) / 2));
    out
}

/// Frozen-core effective Hamiltonian over the active orbitals. A solvent
/// operator, if given, is split into its frozen-core energy and an active
/// one-body term.
pub fn transform_integrals(
    integrals: &IntegralSet,
    mos: &MOSpace,
    solvent: Option<&SolventOperator>,
) -> Result<ActiveHamiltonian> {
    let n_act = mos.n_active();
    if n_act > MAX_ACTIVE_ORBITALS {
        return Err(Error::Capacity {
            what: "active orbitals",
            value: n_act as u128,
            limit: MAX_ACTIVE_ORBITALS as u128,
        });
    }
    if mos.coefficients.nrows() != integrals.n_ao() {
        return Err(Error::Domain("MO coefficients do not match the integral basis".into()));
    }
    let h = integrals.core_hamiltonian();
    let c_core = mos.columns(&mos.core);
    let c_act = mos.columns(&mos.active);
    let p_core = &c_core * c_core.transpose() * 2.0;
    let mut f_core = h.clone();
    if !mos.core.is_empty() {
        let (j, k) = coulomb_exchange(&integrals.eri, &p_core);
        f_core += j - k * 0.5;
    }
    let mut e_frozen = integrals.nuclear_repulsion + 0.5 * p_core.component_mul(&(&h + &f_core)).sum();
    let mut h_eff = c_act.transpose() * &f_core * &c_act;
    if let Some(v) = solvent {
        if v.v.shape() != h.shape() {
            return Err(Error::Domain("solvent operator does not match the integral basis".into()));
        }
        h_eff += c_act.transpose() * &v.v * &c_act;
        e_frozen += p_core.component_mul(&v.v).sum() + v.nuclear;
    }
    let h_eff = (&h_eff + h_eff.transpose()) * 0.5;
    let eri = transform_eri(&integrals.eri, &c_act);
    let n_el = mos.n_active_electrons;
    ActiveHamiltonian::new(n_el / 2 + n_el % 2, n_el / 2, h_eff, eri, e_frozen)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_matches_index_by_index_oracle() {
        let n = 5;
        let eri = EriTensor::from_fn(n, |p, q, r, s| {
            let a = (p * 7 + q * 7 + 3) as f64;
            let b = (r * 5 + s * 5 + 1) as f64;
            1.0 / (1.0 + (a - b).abs()) + 0.01 * ((p * q) as f64 + (r * s) as f64)
        });
        let c = DMatrix::from_fn(n, 4, |i, j| ((i * 3 + j * 5) % 7) as f64 * 0.1 - 0.3);
        let t = transform_eri(&eri, &c);
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let mut v = 0.0;
                        for p in 0..n {
                            for q in 0..n {
                                for r in 0..n {
                                    for s in 0..n {
                                        v += c[(p, i)] * c[(q, j)] * c[(r, k)] * c[(s, l)] * eri.get(p, q, r, s);
                                    }
                                }
                            }
                        }
                        assert!((t.get(i, j, k, l) - v).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
