//! Single-vector Davidson for the lowest eigenpair of a symmetric operator.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::sampling::rng::splitmix64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DavidsonSettings {
    /// Converged when ‖Hx − θx‖₂ falls to this value.
    pub tolerance: f64,
    /// Subspace size that triggers a restart from the current Ritz vector.
    pub max_subspace: usize,
    /// Expansions without a new smallest residual before giving up.
    pub stagnation_window: usize,
    pub max_expansions: usize,
}

impl Default for DavidsonSettings {
    fn default() -> Self {
        Self { tolerance: 1e-8, max_subspace: 20, stagnation_window: 50, max_expansions: 5000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub value: f64,
    pub vector: DVector<f64>,
    pub residual: f64,
    pub expansions: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Orthonormalizes `t` against `basis` (two Gram–Schmidt passes); returns the
/// norm left before normalization.
fn orthonormalize(basis: &[Vec<f64>], t: &mut [f64]) -> f64 {
    for _ in 0..2 {
        for v in basis {
            let c = dot(v, t);
            axpy(-c, v, t);
        }
    }
    let nrm = dot(t, t).sqrt();
    if nrm > 0.0 {
        t.iter_mut().for_each(|x| *x /= nrm);
    }
    nrm
}

const GUESS_SPREAD: f64 = 1e-3;

/// Lowest eigenpair of the operator `apply` (y ← A x) with diagonal `diag`.
/// Starts from `guess` when given, otherwise from the unit vector on the
/// smallest diagonal element plus a small fixed spread over every component,
/// so the start overlaps the ground state even when the matrix is block
/// diagonal by symmetry.
pub fn davidson<F>(apply: F, diag: &[f64], guess: Option<&DVector<f64>>, settings: &DavidsonSettings) -> Result<Eigenpair>
where
    F: Fn(&[f64], &mut [f64]),
{
    let d = diag.len();
    if d == 0 {
        return Err(Error::Domain("empty subspace".into()));
    }
    if settings.max_subspace < 2 {
        return Err(Error::Config("davidson needs room for at least two vectors".into()));
    }
    let lowest = || {
        let mut k = 0;
        for (i, &v) in diag.iter().enumerate() {
            if v < diag[k] {
                k = i;
            }
        }
        let mut e: Vec<f64> = (0..d as u64)
            .map(|i| GUESS_SPREAD * ((splitmix64(i) >> 11) as f64 / (1u64 << 52) as f64 - 1.0))
            .collect();
        e[k] = 1.0;
        e
    };
    let mut v0: Vec<f64> = match guess {
        Some(g) if g.len() == d && g.norm() > 1e-8 => g.iter().copied().collect(),
        Some(g) if g.len() != d => {
            return Err(Error::Domain(format!("guess has length {}, subspace {d}", g.len())));
        }
        _ => lowest(),
    };
    orthonormalize(&[], &mut v0);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(settings.max_subspace);
    let mut images: Vec<Vec<f64>> = Vec::with_capacity(settings.max_subspace);
    let push = |basis: &mut Vec<Vec<f64>>, images: &mut Vec<Vec<f64>>, v: Vec<f64>| {
        let mut av = vec![0.0; d];
        apply(&v, &mut av);
        basis.push(v);
        images.push(av);
    };
    push(&mut basis, &mut images, v0);

    let mut best = f64::INFINITY;
    let mut since_best = 0;
    let mut expansions = 0;
    loop {
        let k = basis.len();
        let t = DMatrix::from_fn(k, k, |i, j| 0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i])));
        let eig = SymmetricEigen::new(t);
        let mut lo = 0;
        for i in 1..k {
            if eig.eigenvalues[i] < eig.eigenvalues[lo] {
                lo = i;
            }
        }
        let theta = eig.eigenvalues[lo];
        let s = eig.eigenvectors.column(lo);
        let mut x = vec![0.0; d];
        let mut ax = vec![0.0; d];
        for i in 0..k {
            axpy(s[i], &basis[i], &mut x);
            axpy(s[i], &images[i], &mut ax);
        }
        let r: Vec<f64> = ax.iter().zip(&x).map(|(a, b)| a - theta * b).collect();
        let rnorm = dot(&r, &r).sqrt();
        let done = |x: Vec<f64>| {
            let nrm = dot(&x, &x).sqrt();
            Eigenpair {
                value: theta,
                vector: DVector::from_iterator(d, x.into_iter().map(|v| v / nrm)),
                residual: rnorm,
                expansions,
            }
        };
        // a basis spanning the whole space makes the Ritz pair exact
        if rnorm <= settings.tolerance || k >= d {
            return Ok(done(x));
        }
        if rnorm < best {
            best = rnorm;
            since_best = 0;
        } else {
            since_best += 1;
        }
        if since_best >= settings.stagnation_window || expansions >= settings.max_expansions {
            return Err(Error::Stagnation { iterations: expansions, residual: rnorm });
        }
        if k >= settings.max_subspace {
            let mut xr = x.clone();
            orthonormalize(&[], &mut xr);
            let mut axr = ax.clone();
            let nrm = dot(&x, &x).sqrt();
            axr.iter_mut().for_each(|v| *v /= nrm);
            basis.clear();
            images.clear();
            basis.push(xr);
            images.push(axr);
        }
        let mut t: Vec<f64> = r
            .iter()
            .zip(diag)
            .map(|(ri, di)| {
                let den = theta - di;
                let den = if den.abs() < 1e-8 { 1e-8_f64.copysign(den) } else { den };
                ri / den
            })
            .collect();
        if orthonormalize(&basis, &mut t) < 1e-10 {
            // preconditioned residual lies in the basis: fall back to the raw
            // residual, then to unit vectors in order of residual size
            t = r.clone();
            if orthonormalize(&basis, &mut t) < 1e-10 {
                let mut order: Vec<usize> = (0..d).collect();
                order.sort_by(|&a, &b| r[b].abs().total_cmp(&r[a].abs()));
                let mut found = false;
                for i in order {
                    t = vec![0.0; d];
                    t[i] = 1.0;
                    if orthonormalize(&basis, &mut t) > 1e-6 {
                        found = true;
                        break;
                    }
                }
                if !found {
                    return Ok(done(x));
                }
            }
        }
        push(&mut basis, &mut images, t);
        expansions += 1;
    }
}
