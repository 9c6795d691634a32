//! One- and two-electron integrals over contracted spherical Gaussians by
//! McMurchie–Davidson Hermite expansion.
//!
//! Every routine works on Cartesian primitive blocks and transforms the
//! contracted block to spherical components at the end.

use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector3};
use rayon::prelude::*;

use super::basis::{cartesian_powers, spherical_transform, AOBasis, Shell};
use super::boys::boys_into;
use super::geometry::Geometry;
use crate::error::{Error, Result};

/// Primitive pairs whose contracted Gaussian-product prefactor falls below
/// this magnitude are skipped.
pub const PRIMITIVE_CUTOFF: f64 = 1e-14;

/// Default cap on the number of AOs for dense ERI construction.
pub const DEFAULT_ERI_CAP: usize = 64;

/// 1-D Hermite expansion coefficients E^{ij}_t for one primitive pair.
#[derive(Clone)]
struct HermiteE {
    li: usize,
    lj: usize,
    data: Vec<f64>,
}

impl HermiteE {
    fn new(li: usize, lj: usize, a: f64, b: f64, xa: f64, xb: f64) -> Self {
        let p = a + b;
        let mu = a * b / p;
        let xab = xa - xb;
        let px = (a * xa + b * xb) / p;
        let (xpa, xpb) = (px - xa, px - xb);
        let nt = li + lj + 1;
        let mut e = Self { li, lj, data: vec![0.0; (li + 1) * (lj + 1) * nt] };
        e.data[0] = (-mu * xab * xab).exp();
        let inv2p = 0.5 / p;
        for i in 0..=li {
            for j in 0..=lj {
                if i == 0 && j == 0 {
                    continue;
                }
                let (pi, pj, shift) = if i > 0 { (i - 1, j, xpa) } else { (i, j - 1, xpb) };
                for t in 0..=(i + j) {
                    let mut v = shift * e.get(pi, pj, t);
                    if t > 0 {
                        v += inv2p * e.get(pi, pj, t - 1);
                    }
                    v += (t + 1) as f64 * e.get(pi, pj, t + 1);
                    let idx = e.index(i, j, t);
                    e.data[idx] = v;
                }
            }
        }
        e
    }

    #[inline]
    fn index(&self, i: usize, j: usize, t: usize) -> usize {
        (i * (self.lj + 1) + j) * (self.li + self.lj + 1) + t
    }

    #[inline]
    fn get(&self, i: usize, j: usize, t: usize) -> f64 {
        if t > i + j {
            0.0
        } else {
            self.data[self.index(i, j, t)]
        }
    }
}

/// Hermite Coulomb integrals R^0_{tuv}(α, PC) for t+u+v ≤ l.
struct HermiteR {
    dim: usize,
    data: Vec<f64>,
}

impl HermiteR {
    fn new(l: usize, alpha: f64, pc: &Vector3<f64>) -> Self {
        let dim = l + 1;
        let size = dim * dim * dim;
        let mut f = [0.0; 17];
        boys_into(alpha * pc.norm_squared(), &mut f[..=l]);
        let idx = |t: usize, u: usize, v: usize| (t * dim + u) * dim + v;
        let mut cur = vec![0.0; size];
        let mut next = vec![0.0; size];
        let m2a = -2.0 * alpha;
        cur[0] = m2a.powi(l as i32) * f[l];
        for n in (0..l).rev() {
            let top = l - n;
            next[0] = m2a.powi(n as i32) * f[n];
            for t in 0..=top {
                for u in 0..=(top - t) {
                    for v in 0..=(top - t - u) {
                        if t + u + v == 0 {
                            continue;
                        }
                        let val = if t > 0 {
                            let mut r = pc.x * cur[idx(t - 1, u, v)];
                            if t > 1 {
                                r += (t - 1) as f64 * cur[idx(t - 2, u, v)];
                            }
                            r
                        } else if u > 0 {
                            let mut r = pc.y * cur[idx(t, u - 1, v)];
                            if u > 1 {
                                r += (u - 1) as f64 * cur[idx(t, u - 2, v)];
                            }
                            r
                        } else {
                            let mut r = pc.z * cur[idx(t, u, v - 1)];
                            if v > 1 {
                                r += (v - 1) as f64 * cur[idx(t, u, v - 2)];
                            }
                            r
                        };
                        next[idx(t, u, v)] = val;
                    }
                }
            }
            std::mem::swap(&mut cur, &mut next);
        }
        Self { dim, data: cur }
    }

    #[inline]
    fn get(&self, t: usize, u: usize, v: usize) -> f64 {
        self.data[(t * self.dim + u) * self.dim + v]
    }
}

/// Precomputed data for one primitive pair of a shell pair.
struct PrimPair {
    p: f64,
    b: f64,
    center: Vector3<f64>,
    coef: f64,
    e: [HermiteE; 3],
}

struct ShellPair {
    la: usize,
    lb: usize,
    prims: Vec<PrimPair>,
}

impl ShellPair {
    fn new(a: &Shell, b: &Shell, extra_b: usize) -> Self {
        let mut prims = Vec::new();
        for (&ea, &ca) in a.exponents.iter().zip(&a.coefficients) {
            for (&eb, &cb) in b.exponents.iter().zip(&b.coefficients) {
                let p = ea + eb;
                let e = [0, 1, 2].map(|d| HermiteE::new(a.l, b.l + extra_b, ea, eb, a.origin[d], b.origin[d]));
                let coef = ca * cb;
                if (coef * e[0].data[0] * e[1].data[0] * e[2].data[0]).abs() < PRIMITIVE_CUTOFF {
                    continue;
                }
                let center = (a.origin * ea + b.origin * eb) / p;
                prims.push(PrimPair { p, b: eb, center, coef, e });
            }
        }
        Self { la: a.l, lb: b.l, prims }
    }
}

/// Transforms a row-major Cartesian block (na_c × nb_c) to spherical (na_s × nb_s).
fn to_spherical_2(la: usize, lb: usize, cart: &DMatrix<f64>) -> DMatrix<f64> {
    spherical_transform(la) * cart * spherical_transform(lb).transpose()
}

fn one_electron_block<F>(a: &Shell, b: &Shell, extra_b: usize, kernel: F) -> DMatrix<f64>
where
    F: Fn(&PrimPair, [usize; 3], [usize; 3]) -> f64,
{
    let pair = ShellPair::new(a, b, extra_b);
    let ca = cartesian_powers(a.l);
    let cb = cartesian_powers(b.l);
    let mut cart = DMatrix::zeros(ca.len(), cb.len());
    for pp in &pair.prims {
        for (i, pa) in ca.iter().enumerate() {
            for (j, pb) in cb.iter().enumerate() {
                cart[(i, j)] += pp.coef * kernel(pp, *pa, *pb);
            }
        }
    }
    to_spherical_2(a.l, b.l, &cart)
}

fn fill_symmetric<F>(basis: &AOBasis, block: F) -> DMatrix<f64>
where
    F: Fn(&Shell, &Shell) -> DMatrix<f64> + Sync,
{
    let shells = basis.shells();
    let pairs: Vec<(usize, usize)> = (0..shells.len()).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
    let blocks: Vec<DMatrix<f64>> = pairs.par_iter().map(|&(i, j)| block(&shells[i], &shells[j])).collect();
    let n = basis.n_ao();
    let mut m = DMatrix::zeros(n, n);
    for (&(i, j), blk) in pairs.iter().zip(&blocks) {
        let (oi, oj) = (basis.offset(i), basis.offset(j));
        for r in 0..blk.nrows() {
            for c in 0..blk.ncols() {
                m[(oi + r, oj + c)] = blk[(r, c)];
                m[(oj + c, oi + r)] = blk[(r, c)];
            }
        }
    }
    m
}

fn overlap_kernel(pp: &PrimPair, a: [usize; 3], b: [usize; 3]) -> f64 {
    let s = (PI / pp.p).powf(1.5);
    s * pp.e[0].get(a[0], b[0], 0) * pp.e[1].get(a[1], b[1], 0) * pp.e[2].get(a[2], b[2], 0)
}

pub fn overlap_matrix(basis: &AOBasis) -> DMatrix<f64> {
    fill_symmetric(basis, |a, b| one_electron_block(a, b, 0, overlap_kernel))
}

pub fn kinetic_matrix(basis: &AOBasis) -> DMatrix<f64> {
    fill_symmetric(basis, |a, b| {
        // ket angular momentum raised by two for the Laplacian
        one_electron_block(a, b, 2, |pp, pa, pb| {
            let sq = (PI / pp.p).sqrt();
            let s1 = |d: usize, i: usize, j: isize| -> f64 {
                if j < 0 {
                    0.0
                } else {
                    pp.e[d].get(i, j as usize, 0) * sq
                }
            };
            let eb = pp.b;
            let ov = [0, 1, 2].map(|d| s1(d, pa[d], pb[d] as isize));
            let mut t = 0.0;
            for d in 0..3 {
                let jb = pb[d] as isize;
                let lap = (jb * (jb - 1)) as f64 * s1(d, pa[d], jb - 2)
                    - 2.0 * eb * (2 * jb + 1) as f64 * s1(d, pa[d], jb)
                    + 4.0 * eb * eb * s1(d, pa[d], jb + 2);
                let others: f64 = (0..3).filter(|&k| k != d).map(|k| ov[k]).product();
                t += lap * others;
            }
            -0.5 * t
        })
    })
}

/// Σ_C w_C ⟨μ| 1/|r − C| |ν⟩ over the given (weight, point) list.
pub fn potential_matrix(basis: &AOBasis, sources: &[(f64, Vector3<f64>)]) -> DMatrix<f64> {
    fill_symmetric(basis, |a, b| {
        let lsum = a.l + b.l;
        one_electron_block(a, b, 0, |pp, pa, pb| {
            let mut acc = 0.0;
            for (w, c) in sources {
                let r = HermiteR::new(lsum, pp.p, &(pp.center - c));
                let mut s = 0.0;
                for t in 0..=(pa[0] + pb[0]) {
                    let ex = pp.e[0].get(pa[0], pb[0], t);
                    for u in 0..=(pa[1] + pb[1]) {
                        let ey = pp.e[1].get(pa[1], pb[1], u);
                        for v in 0..=(pa[2] + pb[2]) {
                            s += ex * ey * pp.e[2].get(pa[2], pb[2], v) * r.get(t, u, v);
                        }
                    }
                }
                acc += w * s;
            }
            2.0 * PI / pp.p * acc
        })
    })
}

pub fn nuclear_attraction_matrix(basis: &AOBasis, geometry: &Geometry) -> DMatrix<f64> {
    let sources: Vec<(f64, Vector3<f64>)> =
        geometry.atoms().iter().map(|a| (-(a.charge as f64), a.position)).collect();
    potential_matrix(basis, &sources)
}

/// ⟨μ| 1/|r − point| |ν⟩.
pub fn esp_integrals(basis: &AOBasis, point: &Vector3<f64>) -> DMatrix<f64> {
    potential_matrix(basis, &[(1.0, *point)])
}

/// ESP integrals at many points, one row per point, columns indexed by
/// [`pair_index`] over the lower AO triangle.
pub fn esp_integrals_packed(basis: &AOBasis, points: &[Vector3<f64>]) -> DMatrix<f64> {
    let shells = basis.shells();
    let n = basis.n_ao();
    let pairs: Vec<(usize, usize, ShellPair)> = (0..shells.len())
        .flat_map(|i| (0..=i).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, ShellPair::new(&shells[i], &shells[j], 0)))
        .collect();
    let rows: Vec<Vec<f64>> = points
        .par_iter()
        .map(|c| {
            let mut row = vec![0.0; n * (n + 1) / 2];
            for (i, j, pair) in &pairs {
                let ca = cartesian_powers(pair.la);
                let cb = cartesian_powers(pair.lb);
                let mut cart = DMatrix::zeros(ca.len(), cb.len());
                for pp in &pair.prims {
                    let r = HermiteR::new(pair.la + pair.lb, pp.p, &(pp.center - c));
                    let pref = pp.coef * 2.0 * PI / pp.p;
                    for (x, pa) in ca.iter().enumerate() {
                        for (y, pb) in cb.iter().enumerate() {
                            let mut s = 0.0;
                            for t in 0..=(pa[0] + pb[0]) {
                                let ex = pp.e[0].get(pa[0], pb[0], t);
                                for u in 0..=(pa[1] + pb[1]) {
                                    let ey = pp.e[1].get(pa[1], pb[1], u);
                                    for v in 0..=(pa[2] + pb[2]) {
                                        s += ex * ey * pp.e[2].get(pa[2], pb[2], v) * r.get(t, u, v);
                                    }
                                }
                            }
                            cart[(x, y)] += pref * s;
                        }
                    }
                }
                let blk = to_spherical_2(pair.la, pair.lb, &cart);
                let (oi, oj) = (basis.offset(*i), basis.offset(*j));
                for r in 0..blk.nrows() {
                    for s in 0..blk.ncols() {
                        let (p, q) = (oi + r, oj + s);
                        if p >= q {
                            row[pair_index(p, q)] = blk[(r, s)];
                        }
                    }
                }
            }
            row
        })
        .collect();
    let mut m = DMatrix::zeros(points.len(), n * (n + 1) / 2);
    for (k, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            m[(k, c)] = *v;
        }
    }
    m
}

/// Packed ERI tensor with 8-fold permutational symmetry; (pq|rs) in chemists' notation.
#[derive(Debug, Clone, PartialEq)]
pub struct EriTensor {
    n: usize,
    data: Vec<f64>,
}

#[inline]
pub fn pair_index(i: usize, j: usize) -> usize {
    if i >= j {
        i * (i + 1) / 2 + j
    } else {
        j * (j + 1) / 2 + i
    }
}

impl EriTensor {
    pub fn zeros(n: usize) -> Self {
        let np = n * (n + 1) / 2;
        Self { n, data: vec![0.0; np * (np + 1) / 2] }
    }

    /// Builds a tensor from a function evaluated once per canonical quadruple.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> f64) -> Self {
        let mut t = Self::zeros(n);
        for p in 0..n {
            for q in 0..=p {
                for r in 0..n {
                    for s in 0..=r {
                        if pair_index(p, q) >= pair_index(r, s) {
                            t.set(p, q, r, s, f(p, q, r, s));
                        }
                    }
                }
            }
        }
        t
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        self.data[pair_index(pair_index(p, q), pair_index(r, s))]
    }

    #[inline]
    pub fn set(&mut self, p: usize, q: usize, r: usize, s: usize, v: f64) {
        let i = pair_index(pair_index(p, q), pair_index(r, s));
        self.data[i] = v;
    }

    /// Element addressed by two packed pair indices.
    #[inline]
    pub fn get_packed(&self, pq: usize, rs: usize) -> f64 {
        self.data[pair_index(pq, rs)]
    }
}

fn eri_shell_quartet(ab: &ShellPair, cd: &ShellPair) -> Vec<f64> {
    let (la, lb, lc, ld) = (ab.la, ab.lb, cd.la, cd.lb);
    let ca = cartesian_powers(la);
    let cb = cartesian_powers(lb);
    let cc = cartesian_powers(lc);
    let cdp = cartesian_powers(ld);
    let (na, nb, nc, nd) = (ca.len(), cb.len(), cc.len(), cdp.len());
    let lab = la + lb;
    let ltot = lab + lc + ld;
    let hdim = lab + 1;
    let hidx = |t: usize, u: usize, v: usize| (t * hdim + u) * hdim + v;
    let mut cart = vec![0.0; na * nb * nc * nd];
    let mut g = vec![0.0; nc * nd * hdim * hdim * hdim];

    for bra in &ab.prims {
        for ket in &cd.prims {
            let (p, q) = (bra.p, ket.p);
            let alpha = p * q / (p + q);
            let pref = 2.0 * PI.powf(2.5) / (p * q * (p + q).sqrt()) * bra.coef * ket.coef;
            let r = HermiteR::new(ltot, alpha, &(bra.center - ket.center));
            // contract the ket expansion against R first
            for (ic, pc) in cc.iter().enumerate() {
                for (id, pd) in cdp.iter().enumerate() {
                    let base = (ic * nd + id) * hdim * hdim * hdim;
                    for t in 0..=lab {
                        for u in 0..=(lab - t) {
                            for v in 0..=(lab - t - u) {
                                let mut s = 0.0;
                                for tau in 0..=(pc[0] + pd[0]) {
                                    let ex = ket.e[0].get(pc[0], pd[0], tau);
                                    if ex == 0.0 {
                                        continue;
                                    }
                                    for nu in 0..=(pc[1] + pd[1]) {
                                        let ey = ket.e[1].get(pc[1], pd[1], nu);
                                        if ey == 0.0 {
                                            continue;
                                        }
                                        for phi in 0..=(pc[2] + pd[2]) {
                                            let ez = ket.e[2].get(pc[2], pd[2], phi);
                                            let sign = if (tau + nu + phi) % 2 == 0 { 1.0 } else { -1.0 };
                                            s += sign * ex * ey * ez * r.get(t + tau, u + nu, v + phi);
                                        }
                                    }
                                }
                                g[base + hidx(t, u, v)] = s;
                            }
                        }
                    }
                }
            }
            for (ia, pa) in ca.iter().enumerate() {
                for (ib, pb) in cb.iter().enumerate() {
                    let mut herm = Vec::with_capacity(16);
                    for t in 0..=(pa[0] + pb[0]) {
                        let ex = bra.e[0].get(pa[0], pb[0], t);
                        for u in 0..=(pa[1] + pb[1]) {
                            let ey = bra.e[1].get(pa[1], pb[1], u);
                            for v in 0..=(pa[2] + pb[2]) {
                                let c = ex * ey * bra.e[2].get(pa[2], pb[2], v);
                                if c != 0.0 {
                                    herm.push((hidx(t, u, v), c));
                                }
                            }
                        }
                    }
                    for icd in 0..nc * nd {
                        let base = icd * hdim * hdim * hdim;
                        let s: f64 = herm.iter().map(|&(h, c)| c * g[base + h]).sum();
                        cart[(ia * nb + ib) * nc * nd + icd] += pref * s;
                    }
                }
            }
        }
    }
    transform_quartet(&cart, [la, lb, lc, ld])
}

/// Applies the Cartesian→spherical transform on each of the four indices.
fn transform_quartet(cart: &[f64], ls: [usize; 4]) -> Vec<f64> {
    let mut dims: [usize; 4] = ls.map(|l| (l + 1) * (l + 2) / 2);
    let mut cur = cart.to_vec();
    for axis in 0..4 {
        let t = spherical_transform(ls[axis]);
        let (ns, nc) = (t.nrows(), t.ncols());
        let outer: usize = dims[..axis].iter().product();
        let inner: usize = dims[axis + 1..].iter().product();
        let mut next = vec![0.0; outer * ns * inner];
        for o in 0..outer {
            for s in 0..ns {
                for c in 0..nc {
                    let w = t[(s, c)];
                    if w == 0.0 {
                        continue;
                    }
                    let src = (o * nc + c) * inner;
                    let dst = (o * ns + s) * inner;
                    for i in 0..inner {
                        next[dst + i] += w * cur[src + i];
                    }
                }
            }
        }
        dims[axis] = ns;
        cur = next;
    }
    cur
}

/// Dense ERI tensor over the spherical AO basis.
pub fn compute_eri(basis: &AOBasis, cap: usize) -> Result<EriTensor> {
    let n = basis.n_ao();
    if n > cap {
        return Err(Error::Capacity { what: "number of AOs for ERI", value: n as u128, limit: cap as u128 });
    }
    let shells = basis.shells();
    let ns = shells.len();
    let pairs: Vec<(usize, usize)> = (0..ns).flat_map(|i| (0..=i).map(move |j| (i, j))).collect();
    let pair_data: Vec<ShellPair> = pairs.par_iter().map(|&(i, j)| ShellPair::new(&shells[i], &shells[j], 0)).collect();
    let quartets: Vec<(usize, usize)> =
        (0..pairs.len()).flat_map(|ij| (0..=ij).map(move |kl| (ij, kl))).collect();
    let blocks: Vec<Vec<f64>> = quartets
        .par_iter()
        .map(|&(ij, kl)| eri_shell_quartet(&pair_data[ij], &pair_data[kl]))
        .collect();

    let mut eri = EriTensor::zeros(n);
    for (&(ij, kl), blk) in quartets.iter().zip(&blocks) {
        let (i, j) = pairs[ij];
        let (k, l) = pairs[kl];
        let (oi, oj, ok, ol) = (basis.offset(i), basis.offset(j), basis.offset(k), basis.offset(l));
        let (ni, nj, nk, nl) = (
            shells[i].n_spherical(),
            shells[j].n_spherical(),
            shells[k].n_spherical(),
            shells[l].n_spherical(),
        );
        let mut idx = 0;
        for a in 0..ni {
            for b in 0..nj {
                for c in 0..nk {
                    for d in 0..nl {
                        eri.set(oi + a, oj + b, ok + c, ol + d, blk[idx]);
                        idx += 1;
                    }
                }
            }
        }
    }
    Ok(eri)
}

/// Overlap, kinetic, nuclear attraction, ERIs and nuclear repulsion for one molecule.
#[derive(Debug, Clone)]
pub struct IntegralSet {
    pub overlap: DMatrix<f64>,
    pub kinetic: DMatrix<f64>,
    pub nuclear: DMatrix<f64>,
    pub eri: EriTensor,
    pub nuclear_repulsion: f64,
}

/// The one-electron part of an [`IntegralSet`].
#[derive(Debug, Clone)]
pub struct OneElectron {
    pub overlap: DMatrix<f64>,
    pub kinetic: DMatrix<f64>,
    pub nuclear: DMatrix<f64>,
    pub nuclear_repulsion: f64,
}

pub fn compute_one_electron(basis: &AOBasis, geometry: &Geometry) -> OneElectron {
    OneElectron {
        overlap: overlap_matrix(basis),
        kinetic: kinetic_matrix(basis),
        nuclear: nuclear_attraction_matrix(basis, geometry),
        nuclear_repulsion: geometry.nuclear_repulsion(),
    }
}

impl IntegralSet {
    pub fn compute(basis: &AOBasis, geometry: &Geometry, eri_cap: usize) -> Result<Self> {
        let eri = compute_eri(basis, eri_cap)?;
        let one = compute_one_electron(basis, geometry);
        Ok(Self {
            overlap: one.overlap,
            kinetic: one.kinetic,
            nuclear: one.nuclear,
            eri,
            nuclear_repulsion: one.nuclear_repulsion,
        })
    }

    pub fn n_ao(&self) -> usize {
        self.overlap.nrows()
    }

    pub fn core_hamiltonian(&self) -> DMatrix<f64> {
        &self.kinetic + &self.nuclear
    }
}
