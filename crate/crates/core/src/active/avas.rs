use nalgebra::{DMatrix, SymmetricEigen};

use super::MOSpace;
use crate::error::{Error, Result};
use crate::scf::SCFResult;

pub const DEFAULT_AVAS_THRESHOLD: f64 = 0.2;

/// Eigenvalue gap below which two AVAS eigenvalues count as degenerate.
const DEGENERACY_GAP: f64 = 1e-6;

/// Rotates a block of MOs to diagonalize their overlap with the target span.
/// Returns (eigenvalues descending, rotated block).
fn rotate_block(block: &DMatrix<f64>, projector: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    if block.ncols() == 0 {
        return (vec![], block.clone());
    }
    let m = block.transpose() * projector * block;
    let eig = SymmetricEigen::new((&m + m.transpose()) * 0.5);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let u = DMatrix::from_columns(&order.iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>());
    (vals, block * u)
}

/// Number of leading (descending) eigenvalues above the threshold, extended
/// over degenerate partners of the last one.
fn n_selected(vals: &[f64], threshold: f64) -> usize {
    let mut n = vals.iter().take_while(|&&v| v > threshold).count();
    while n > 0 && n < vals.len() && (vals[n - 1] - vals[n]).abs() < DEGENERACY_GAP {
        n += 1;
    }
    n
}

/// Atomic valence active space: occupied and virtual MOs are rotated
/// separately; those with projector eigenvalue above `threshold` are active.
///
/// The resulting coefficient order is core, active occupied, active virtual,
/// remaining virtual.
pub fn avas_select(scf: &SCFResult, targets: &[usize], threshold: f64, overlap: &DMatrix<f64>) -> Result<MOSpace> {
    if targets.is_empty() {
        return Err(Error::Config("AVAS target set resolves to no basis functions".into()));
    }
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Config(format!("AVAS threshold must lie in (0, 1), got {threshold}")));
    }
    let n_ao = overlap.nrows();
    if let Some(&bad) = targets.iter().find(|&&t| t >= n_ao) {
        return Err(Error::Config(format!("AVAS target AO {bad} out of range")));
    }
    let nt = targets.len();
    let s_at = DMatrix::from_fn(n_ao, nt, |i, j| overlap[(i, targets[j])]);
    let s_tt = DMatrix::from_fn(nt, nt, |i, j| overlap[(targets[i], targets[j])]);
    let s_tt_inv = s_tt
        .cholesky()
        .ok_or_else(|| Error::LinearAlgebra("target AO overlap is not positive definite".into()))?
        .inverse();
    let projector = &s_at * s_tt_inv * s_at.transpose();

    let c = &scf.coefficients;
    let n_occ = scf.n_occupied;
    let n_mo = c.ncols();
    let (occ_vals, occ_rot) = rotate_block(&c.columns(0, n_occ).into_owned(), &projector);
    let (vir_vals, vir_rot) = rotate_block(&c.columns(n_occ, n_mo - n_occ).into_owned(), &projector);
    let n_act_occ = n_selected(&occ_vals, threshold);
    let n_act_vir = n_selected(&vir_vals, threshold);
    if n_act_occ + n_act_vir == 0 {
        return Err(Error::Config(format!("AVAS selected no orbitals at threshold {threshold}")));
    }

    // core orbitals in ascending projector weight
    let mut columns = Vec::with_capacity(n_mo);
    let mut overlaps = Vec::with_capacity(n_mo);
    for i in (n_act_occ..n_occ).rev() {
        columns.push(occ_rot.column(i).into_owned());
        overlaps.push(occ_vals[i]);
    }
    for i in 0..n_act_occ {
        columns.push(occ_rot.column(i).into_owned());
        overlaps.push(occ_vals[i]);
    }
    for i in 0..(n_mo - n_occ) {
        columns.push(vir_rot.column(i).into_owned());
        overlaps.push(vir_vals[i]);
    }
    let n_core = n_occ - n_act_occ;
    let n_act = n_act_occ + n_act_vir;
    log::info!(
        "AVAS: {n_act} active orbitals ({n_act_occ} occupied, {n_act_vir} virtual), {} active electrons",
        2 * n_act_occ
    );
    Ok(MOSpace {
        coefficients: DMatrix::from_columns(&columns),
        core: (0..n_core).collect(),
        active: (n_core..n_core + n_act).collect(),
        virtuals: (n_core + n_act..n_mo).collect(),
        n_active_electrons: 2 * n_act_occ,
        avas_overlaps: Some(overlaps),
    })
}
