//! The active Hamiltonian projected onto a spin-closed determinant subspace.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::strings::{annihilation_sign, excite, occupied};
use super::subspace::SubspaceBasis;
use crate::active::ActiveHamiltonian;
use crate::chem::{pair_index, EriTensor};
use crate::error::{Error, Result};
use crate::sampling::Configuration;

/// The one-body part of a Hamiltonian plus its scalar offset. Swapping it lets
/// the reaction field change without rebuilding excitation tables.
#[derive(Debug, Clone, PartialEq)]
pub struct OneBody {
    pub h: DMatrix<f64>,
    pub constant: f64,
}

impl OneBody {
    pub fn of(h: &ActiveHamiltonian) -> Self {
        Self { h: h.h_eff.clone(), constant: h.e_frozen }
    }
}

/// `a†_p a_q |U_i⟩ = sign |U_j⟩`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Single {
    pub j: u32,
    pub p: u8,
    pub q: u8,
    pub pq: u16,
    pub sign: f64,
    /// Σ_{k ∈ U_i} [(pq|kk) − (pk|kq)].
    pub same: f64,
}

#[derive(Debug, Clone)]
pub struct ProjectedHamiltonian {
    basis: SubspaceBasis,
    n_orb: usize,
    n_alpha: usize,
    n_beta: usize,
    pub(crate) singles: Vec<Vec<Single>>,
    doubles: Vec<Vec<(u32, f64)>>,
    /// `coulomb[pq·m + i]` = Σ_{k ∈ U_i} (pq|kk).
    coulomb: Vec<f64>,
    /// `pair_eri[(pq, rs)]` over packed pair indices.
    pair_eri: DMatrix<f64>,
    /// Two-body part of every diagonal element.
    two_body_diagonal: Vec<f64>,
}

impl ProjectedHamiltonian {
    pub fn new(h: &ActiveHamiltonian, basis: SubspaceBasis) -> Result<Self> {
        let n = h.n_orb;
        if basis.n_orb() != n {
            return Err(Error::Domain(format!("subspace over {} orbitals, Hamiltonian over {n}", basis.n_orb())));
        }
        if h.n_alpha != h.n_beta || basis.n_electrons() != h.n_alpha {
            return Err(Error::Unsupported(format!(
                "subspace holds {} electrons per spin, Hamiltonian ({}, {})",
                basis.n_electrons(),
                h.n_alpha,
                h.n_beta
            )));
        }
        if basis.n_strings() > u32::MAX as usize {
            return Err(Error::Capacity { what: "strings", value: basis.n_strings() as u128, limit: u32::MAX as u128 });
        }
        let eri = &h.eri;
        let n_pair = n * (n + 1) / 2;
        let pair_eri = DMatrix::from_fn(n_pair, n_pair, |a, b| eri.get_packed(a, b));
        let strings = basis.strings();
        let m = strings.len();

        let tables: Vec<(Vec<Single>, Vec<(u32, f64)>)> = strings
            .par_iter()
            .map(|&s| (singles_of(s, n, eri, &basis), doubles_of(s, n, eri, &basis)))
            .collect();
        let (singles, doubles): (Vec<_>, Vec<_>) = tables.into_iter().unzip();

        let mut coulomb = vec![0.0; n_pair * m];
        for p in 0..n {
            for q in 0..=p {
                let pq = pair_index(p, q);
                for (i, &s) in strings.iter().enumerate() {
                    coulomb[pq * m + i] = occupied(s).map(|k| eri.get(p, q, k, k)).sum();
                }
            }
        }

        let same: Vec<f64> = strings
            .iter()
            .map(|&s| {
                let occ: Vec<usize> = occupied(s).collect();
                let mut e = 0.0;
                for (a, &i) in occ.iter().enumerate() {
                    for &j in &occ[..a] {
                        e += eri.get(i, i, j, j) - eri.get(i, j, j, i);
                    }
                }
                e
            })
            .collect();
        // jsum[i·n + l] = Σ_{k ∈ U_i} (kk|ll)
        let mut jsum = vec![0.0; m * n];
        for (i, &s) in strings.iter().enumerate() {
            for l in 0..n {
                jsum[i * n + l] = occupied(s).map(|k| eri.get(k, k, l, l)).sum();
            }
        }
        let mut two_body_diagonal = vec![0.0; m * m];
        two_body_diagonal.par_chunks_mut(m).enumerate().for_each(|(ia, row)| {
            for (ib, v) in row.iter_mut().enumerate() {
                let cross: f64 = occupied(strings[ib]).map(|l| jsum[ia * n + l]).sum();
                *v = same[ia] + same[ib] + cross;
            }
        });

        Ok(Self {
            n_orb: n,
            n_alpha: h.n_alpha,
            n_beta: h.n_beta,
            basis,
            singles,
            doubles,
            coulomb,
            pair_eri,
            two_body_diagonal,
        })
    }

    pub fn basis(&self) -> &SubspaceBasis {
        &self.basis
    }

    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    pub fn n_orb(&self) -> usize {
        self.n_orb
    }

    pub fn electrons(&self) -> (usize, usize) {
        (self.n_alpha, self.n_beta)
    }

    /// Diagonal elements for the given one-body part.
    pub fn diagonal(&self, one: &OneBody) -> Vec<f64> {
        let m = self.basis.n_strings();
        let hs: Vec<f64> = self.basis.strings().iter().map(|&s| occupied(s).map(|k| one.h[(k, k)]).sum()).collect();
        let mut d = self.two_body_diagonal.clone();
        d.par_chunks_mut(m).enumerate().for_each(|(ia, row)| {
            for (ib, v) in row.iter_mut().enumerate() {
                *v += one.constant + hs[ia] + hs[ib];
            }
        });
        d
    }

    /// y = H x. Rows (alpha strings) are computed independently in parallel,
    /// each in a fixed order.
    pub fn apply(&self, one: &OneBody, diagonal: &[f64], x: &[f64], y: &mut [f64]) {
        let m = self.basis.n_strings();
        assert_eq!(x.len(), m * m);
        assert_eq!(y.len(), m * m);
        let h1 = |s: &Single| one.h[(s.p as usize, s.q as usize)];
        y.par_chunks_mut(m).enumerate().for_each(|(ia, row)| {
            let base = ia * m;
            let xa = &x[base..base + m];
            for ib in 0..m {
                let mut acc = diagonal[base + ib] * xa[ib];
                // beta excitations, alpha string fixed
                for s in &self.singles[ib] {
                    let v = s.sign * (h1(s) + s.same + self.coulomb[s.pq as usize * m + ia]);
                    acc += v * xa[s.j as usize];
                }
                for &(j, v) in &self.doubles[ib] {
                    acc += v * xa[j as usize];
                }
                row[ib] = acc;
            }
            for s in &self.singles[ia] {
                let xj = &x[s.j as usize * m..(s.j as usize + 1) * m];
                let fixed = h1(s) + s.same;
                let w = &self.coulomb[s.pq as usize * m..(s.pq as usize + 1) * m];
                let eri_row = self.pair_eri.column(s.pq as usize);
                for ib in 0..m {
                    let mut acc = (fixed + w[ib]) * xj[ib];
                    for t in &self.singles[ib] {
                        acc += t.sign * eri_row[t.pq as usize] * xj[t.j as usize];
                    }
                    row[ib] += s.sign * acc;
                }
            }
            for &(j, v) in &self.doubles[ia] {
                let xj = &x[j as usize * m..(j as usize + 1) * m];
                for ib in 0..m {
                    row[ib] += v * xj[ib];
                }
            }
        });
    }

    /// Explicit matrix built element by element with Slater–Condon rules
    /// (independent of the excitation tables).
    pub fn dense(&self, h: &ActiveHamiltonian, one: &OneBody) -> DMatrix<f64> {
        let d = self.dimension();
        let dets: Vec<Configuration> = self.basis.determinants().collect();
        let mut out = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..=i {
                let v = determinant_element(&h.eri, one, &dets[i], &dets[j]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        out
    }
}

fn singles_of(s: u64, n: usize, eri: &EriTensor, basis: &SubspaceBasis) -> Vec<Single> {
    let mut out = Vec::new();
    for q in occupied(s) {
        for p in 0..n {
            if s >> p & 1 == 1 {
                continue;
            }
            let (t, sign) = excite(s, p, q);
            let Some(j) = basis.index_of(t) else { continue };
            let same = occupied(s).map(|k| eri.get(p, q, k, k) - eri.get(p, k, k, q)).sum();
            out.push(Single { j: j as u32, p: p as u8, q: q as u8, pq: pair_index(p, q) as u16, sign, same });
        }
    }
    out
}

fn doubles_of(s: u64, n: usize, eri: &EriTensor, basis: &SubspaceBasis) -> Vec<(u32, f64)> {
    let occ: Vec<usize> = occupied(s).collect();
    let vir: Vec<usize> = (0..n).filter(|&p| s >> p & 1 == 0).collect();
    let mut out = Vec::new();
    for (a, &q1) in occ.iter().enumerate() {
        for &q2 in &occ[a + 1..] {
            for (b, &p1) in vir.iter().enumerate() {
                for &p2 in &vir[b + 1..] {
                    let t = s ^ (1 << q1) ^ (1 << q2) ^ (1 << p1) ^ (1 << p2);
                    let Some(j) = basis.index_of(t) else { continue };
                    let sign = double_sign(s, p1, p2, q1, q2);
                    let v = sign * (eri.get(p1, q1, p2, q2) - eri.get(p1, q2, p2, q1));
                    if v != 0.0 {
                        out.push((j as u32, v));
                    }
                }
            }
        }
    }
    out
}

/// Sign of a†_p1 a†_p2 a_q2 a_q1 applied to `s`.
fn double_sign(s: u64, p1: usize, p2: usize, q1: usize, q2: usize) -> f64 {
    let mut w = s;
    let mut sign = annihilation_sign(w, q1);
    w &= !(1 << q1);
    sign *= annihilation_sign(w, q2);
    w &= !(1 << q2);
    sign *= annihilation_sign(w, p2);
    w |= 1 << p2;
    sign * annihilation_sign(w, p1)
}

/// ⟨a|H|b⟩ between two arbitrary determinants by Slater–Condon rules.
pub fn determinant_element(eri: &EriTensor, one: &OneBody, a: &Configuration, b: &Configuration) -> f64 {
    let da = (a.alpha ^ b.alpha).count_ones() / 2;
    let db = (a.beta ^ b.beta).count_ones() / 2;
    let h = &one.h;
    match (da, db) {
        (0, 0) => {
            let oa: Vec<usize> = occupied(a.alpha).collect();
            let ob: Vec<usize> = occupied(a.beta).collect();
            let mut e = one.constant;
            e += oa.iter().chain(&ob).map(|&k| h[(k, k)]).sum::<f64>();
            for occ in [&oa, &ob] {
                for &i in occ.iter() {
                    for &j in occ.iter() {
                        e += 0.5 * (eri.get(i, i, j, j) - eri.get(i, j, j, i));
                    }
                }
            }
            for &i in &oa {
                for &j in &ob {
                    e += eri.get(i, i, j, j);
                }
            }
            e
        }
        (1, 0) | (0, 1) => {
            let (sa, sb, other) = if da == 1 { (a.alpha, b.alpha, a.beta) } else { (a.beta, b.beta, a.alpha) };
            let p = (sa & !sb).trailing_zeros() as usize;
            let q = (sb & !sa).trailing_zeros() as usize;
            let (_, sign) = excite(sb, p, q);
            let mut v = h[(p, q)];
            v += occupied(sb).map(|k| eri.get(p, q, k, k) - eri.get(p, k, k, q)).sum::<f64>();
            v += occupied(other).map(|k| eri.get(p, q, k, k)).sum::<f64>();
            sign * v
        }
        (2, 0) | (0, 2) => {
            let (sa, sb) = if da == 2 { (a.alpha, b.alpha) } else { (a.beta, b.beta) };
            let ps: Vec<usize> = occupied(sa & !sb).collect();
            let qs: Vec<usize> = occupied(sb & !sa).collect();
            let sign = double_sign(sb, ps[0], ps[1], qs[0], qs[1]);
            sign * (eri.get(ps[0], qs[0], ps[1], qs[1]) - eri.get(ps[0], qs[1], ps[1], qs[0]))
        }
        (1, 1) => {
            let p = (a.alpha & !b.alpha).trailing_zeros() as usize;
            let q = (b.alpha & !a.alpha).trailing_zeros() as usize;
            let r = (a.beta & !b.beta).trailing_zeros() as usize;
            let s = (b.beta & !a.beta).trailing_zeros() as usize;
            excite(b.alpha, p, q).1 * excite(b.beta, r, s).1 * eri.get(p, q, r, s)
        }
        _ => 0.0,
    }
}
