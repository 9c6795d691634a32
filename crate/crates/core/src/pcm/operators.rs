use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, LU};
use rayon::prelude::*;

use super::cavity::CavitySurface;
use crate::error::{Error, Result};

/// Self-potential factor of a flat tessera approximated as a disc.
pub const SELF_POTENTIAL_FACTOR: f64 = 1.0694;

const MIN_TESSERA_DISTANCE: f64 = 1e-10;

/// Dielectric response of the solvent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DielectricParams {
    epsilon: f64,
}

impl Default for DielectricParams {
    fn default() -> Self {
        Self { epsilon: 78.3553 }
    }
}

impl DielectricParams {
    /// ε = 1 is accepted and produces no polarization.
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon >= 1.0 && epsilon.is_finite()) {
            return Err(Error::Config(format!("dielectric constant must be finite and ≥ 1, got {epsilon}")));
        }
        Ok(Self { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// f_ε = (ε − 1)/(ε + 1).
    pub fn f(&self) -> f64 {
        (self.epsilon - 1.0) / (self.epsilon + 1.0)
    }
}

/// Discretized single- and double-layer operators.
#[derive(Debug, Clone)]
pub struct PCMOperators {
    pub s: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub areas: DVector<f64>,
}

pub fn assemble_operators(surface: &CavitySurface) -> Result<PCMOperators> {
    let n = surface.len();
    if n == 0 {
        return Err(Error::Domain("cavity surface has no tesserae".into()));
    }
    let t = &surface.tesserae;
    let rows: Vec<Result<(Vec<f64>, Vec<f64>)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut s_row = vec![0.0; n];
            let mut d_row = vec![0.0; n];
            let mut sum = 0.0;
            for j in 0..n {
                if i == j {
                    continue;
                }
                let diff = t[i].position - t[j].position;
                let r = diff.norm();
                if r < MIN_TESSERA_DISTANCE {
                    return Err(Error::DegenerateSurface { first: i.min(j), second: i.max(j), distance: r });
                }
                s_row[j] = 1.0 / r;
                d_row[j] = t[j].normal.dot(&diff) / (r * r * r);
                sum += d_row[j] * t[j].area;
            }
            s_row[i] = SELF_POTENTIAL_FACTOR * (4.0 * PI / t[i].area).sqrt();
            d_row[i] = -(2.0 * PI + sum) / t[i].area;
            Ok((s_row, d_row))
        })
        .collect();
    let mut s = DMatrix::zeros(n, n);
    let mut d = DMatrix::zeros(n, n);
    for (i, row) in rows.into_iter().enumerate() {
        let (s_row, d_row) = row?;
        for j in 0..n {
            s[(i, j)] = s_row[j];
            d[(i, j)] = d_row[j];
        }
    }
    let areas = DVector::from_iterator(n, t.iter().map(|x| x.area));
    Ok(PCMOperators { s, d, areas })
}

/// Apparent surface charge and the potential that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceChargeSolution {
    /// q_i = σ_i a_i.
    pub charges: DVector<f64>,
    pub sigma: DVector<f64>,
    pub potentials: DVector<f64>,
    pub polarization_energy: f64,
}

/// LU-factorized IEF master equation for one surface and dielectric.
///
/// The equation is kept in the f-scaled form `[2πI − f·DA]·S·q = −f·(2πI − DA)·φ`,
/// which is regular down to f = 0.
#[derive(Debug, Clone)]
pub struct SurfaceSolver {
    lu: LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    rhs: DMatrix<f64>,
    areas: DVector<f64>,
}

impl SurfaceSolver {
    pub fn new(ops: &PCMOperators, dielectric: DielectricParams) -> Result<Self> {
        let n = ops.areas.len();
        let f = dielectric.f();
        let mut da = ops.d.clone();
        for j in 0..n {
            da.column_mut(j).scale_mut(ops.areas[j]);
        }
        let two_pi = DMatrix::<f64>::identity(n, n) * (2.0 * PI);
        let lhs = (&two_pi - &da * f) * &ops.s;
        let rhs = (&two_pi - &da) * (-f);
        let lu = lhs.lu();
        let diag = lu.u().diagonal().abs();
        let (lo, hi) = (diag.min(), diag.max());
        if !(lo > hi * 1e-14) || !hi.is_finite() {
            return Err(Error::SingularSystem { condition: if lo > 0.0 { hi / lo } else { f64::INFINITY } });
        }
        Ok(Self { lu, rhs, areas: ops.areas.clone() })
    }

    pub fn len(&self) -> usize {
        self.areas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.areas.is_empty()
    }

    pub fn solve(&self, potentials: &DVector<f64>) -> Result<SurfaceChargeSolution> {
        if potentials.len() != self.len() {
            return Err(Error::Domain(format!(
                "potential has {} entries but the surface has {} tesserae",
                potentials.len(),
                self.len()
            )));
        }
        let b = &self.rhs * potentials;
        let charges = self
            .lu
            .solve(&b)
            .ok_or(Error::SingularSystem { condition: f64::INFINITY })?;
        let sigma = charges.component_div(&self.areas);
        let polarization_energy = 0.5 * charges.dot(potentials);
        Ok(SurfaceChargeSolution { charges, sigma, potentials: potentials.clone(), polarization_energy })
    }
}

/// One-shot solve of the IEF master equation.
pub fn solve_surface_charge(
    ops: &PCMOperators,
    dielectric: DielectricParams,
    potentials: &DVector<f64>,
) -> Result<SurfaceChargeSolution> {
    SurfaceSolver::new(ops, dielectric)?.solve(potentials)
}

#[cfg(test)]
mod tests {
    use nalgebra::Vector3;

    use super::*;
    use crate::pcm::cavity::{Sphere, Tessera};

    fn surface(points: &[[f64; 3]], area: f64) -> CavitySurface {
        let tesserae = points
            .iter()
            .map(|p| {
                let v = Vector3::from(*p);
                Tessera { position: v, normal: v.normalize(), area, sphere: 0 }
            })
            .collect();
        CavitySurface { tesserae, spheres: vec![Sphere { center: Vector3::zeros(), radius: 1.0 }] }
    }

    #[test]
    fn dielectric_prefactor() {
        assert_eq!(DielectricParams::new(1.0).unwrap().f(), 0.0);
        assert!((DielectricParams::new(3.0).unwrap().f() - 0.5).abs() < 1e-15);
        assert!(DielectricParams::new(0.5).is_err());
        assert!(DielectricParams::new(f64::NAN).is_err());
        let f = DielectricParams::default().f();
        assert!(f > 0.0 && f < 1.0);
    }

    #[test]
    fn coulomb_kernel_and_self_term() {
        let ops = assemble_operators(&surface(&[[0.0, 0.0, 1.0], [0.0, 0.0, 2.0]], 0.1)).unwrap();
        assert_eq!(ops.s[(0, 1)], 1.0);
        assert_eq!(ops.s[(1, 0)], 1.0);

        let single = assemble_operators(&surface(&[[1.0, 0.0, 0.0]], 0.3)).unwrap();
        assert_eq!(single.s.shape(), (1, 1));
        assert!((single.s[(0, 0)] - 1.0694 * (4.0 * PI / 0.3).sqrt()).abs() < 1e-15);
        assert!((single.d[(0, 0)] + 2.0 * PI / 0.3).abs() < 1e-12);
    }

    #[test]
    fn coincident_tesserae_rejected() {
        let err = assemble_operators(&surface(&[[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]], 0.1)).unwrap_err();
        assert!(matches!(err, Error::DegenerateSurface { first: 0, second: 1, .. }));
        let empty = CavitySurface { tesserae: vec![], spheres: vec![] };
        assert!(assemble_operators(&empty).is_err());
    }

    #[test]
    fn vacuum_gives_zero_charge() {
        let ops = assemble_operators(&surface(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], 1.0)).unwrap();
        let phi = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let sol = solve_surface_charge(&ops, DielectricParams::new(1.0).unwrap(), &phi).unwrap();
        assert!(sol.charges.amax() == 0.0);
        assert!(solve_surface_charge(&ops, DielectricParams::default(), &DVector::zeros(2)).is_err());
    }
}
