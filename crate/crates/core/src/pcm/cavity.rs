use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::Write;

use nalgebra::Vector3;

use super::lebedev::{lebedev_grid, SUPPORTED_GRIDS};
use crate::chem::{elements, Geometry};
use crate::error::{Error, Result};
use crate::units::BOHR_PER_ANGSTROM;

/// How the solute cavity is built from atom-centered spheres.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityConfig {
    /// Per-element radii in bohr. Elements not listed fall back to Bondi radii.
    pub radii: BTreeMap<String, f64>,
    pub scale: f64,
    pub points_per_sphere: usize,
}

impl Default for CavityConfig {
    fn default() -> Self {
        Self { radii: BTreeMap::new(), scale: 1.2, points_per_sphere: 302 }
    }
}

impl CavityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::Config(format!("cavity scale must be positive, got {}", self.scale)));
        }
        if !SUPPORTED_GRIDS.contains(&self.points_per_sphere) {
            return Err(Error::Config(format!(
                "unsupported points per sphere {}; choose one of {SUPPORTED_GRIDS:?}",
                self.points_per_sphere
            )));
        }
        for (el, r) in &self.radii {
            if !(*r > 0.0 && r.is_finite()) {
                return Err(Error::Config(format!("radius for {el} must be positive, got {r}")));
            }
        }
        Ok(())
    }

    /// Unscaled radius in bohr.
    pub fn radius(&self, symbol: &str) -> Result<f64> {
        if let Some(r) = self.radii.get(symbol) {
            return Ok(*r);
        }
        elements::atomic_number(symbol)
            .and_then(elements::bondi_radius)
            .map(|r| r * BOHR_PER_ANGSTROM)
            .ok_or_else(|| Error::Config(format!("no cavity radius for element {symbol}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tessera {
    pub position: Vector3<f64>,
    pub normal: Vector3<f64>,
    pub area: f64,
    pub sphere: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sphere {
    pub center: Vector3<f64>,
    pub radius: f64,
}

/// Discretized cavity boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct CavitySurface {
    pub tesserae: Vec<Tessera>,
    pub spheres: Vec<Sphere>,
}

impl CavitySurface {
    pub fn len(&self) -> usize {
        self.tesserae.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tesserae.is_empty()
    }

    pub fn total_area(&self) -> f64 {
        self.tesserae.iter().map(|t| t.area).sum()
    }

    pub fn positions(&self) -> Vec<Vector3<f64>> {
        self.tesserae.iter().map(|t| t.position).collect()
    }

    /// Writes `x,y,z,nx,ny,nz,area,sphere` rows with a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "x,y,z,nx,ny,nz,area,sphere")?;
        for t in &self.tesserae {
            let (p, n) = (t.position, t.normal);
            writeln!(
                out,
                "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{}",
                p.x, p.y, p.z, n.x, n.y, n.z, t.area, t.sphere
            )?;
        }
        Ok(())
    }
}

/// Places an equal-area Lebedev grid on each atomic sphere and drops points
/// buried inside any other sphere.
pub fn build_cavity(geometry: &Geometry, config: &CavityConfig) -> Result<CavitySurface> {
    if geometry.is_empty() {
        return Err(Error::Domain("cannot build a cavity for an empty geometry".into()));
    }
    config.validate()?;
    let spheres = geometry
        .atoms()
        .iter()
        .map(|a| Ok(Sphere { center: a.position, radius: config.radius(&a.symbol)? * config.scale }))
        .collect::<Result<Vec<_>>>()?;
    let grid = lebedev_grid(config.points_per_sphere)?;
    let mut tesserae = Vec::new();
    for (k, sph) in spheres.iter().enumerate() {
        let area = 4.0 * PI * sph.radius * sph.radius / grid.len() as f64;
        for (u, _) in &grid {
            let p = sph.center + u * sph.radius;
            let buried = spheres
                .iter()
                .enumerate()
                .any(|(j, o)| j != k && (p - o.center).norm() < o.radius);
            if !buried {
                tesserae.push(Tessera { position: p, normal: *u, area, sphere: k });
            }
        }
    }
    Ok(CavitySurface { tesserae, spheres })
}
