use nalgebra::{Matrix3, Vector3};

use super::elements;
use crate::error::{Error, Result};
use crate::units::BOHR_PER_ANGSTROM;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthUnit {
    Angstrom,
    Bohr,
}

impl LengthUnit {
    fn to_bohr(self) -> f64 {
        match self {
            LengthUnit::Angstrom => BOHR_PER_ANGSTROM,
            LengthUnit::Bohr => 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Atom {
    pub symbol: String,
    pub charge: u32,
    /// Position in bohr.
    pub position: Vector3<f64>,
}

/// A validated set of nuclei. Positions are always stored in bohr.
#[derive(Debug, Clone, PartialEq)]
pub struct Geometry {
    atoms: Vec<Atom>,
}

impl Geometry {
    /// Builds a geometry, rejecting coincident nuclei and zero charges.
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        for (i, a) in atoms.iter().enumerate() {
            if a.charge < 1 {
                return Err(Error::Domain(format!("atom {i} has nuclear charge 0")));
            }
            for (j, b) in atoms.iter().enumerate().skip(i + 1) {
                if (a.position - b.position).norm() <= 0.0 {
                    return Err(Error::Domain(format!("atoms {i} and {j} coincide")));
                }
            }
        }
        Ok(Self { atoms })
    }

    /// Parses standard XYZ text: atom count, comment line, then `El x y z` rows.
    pub fn parse_xyz(text: &str, unit: LengthUnit) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, count_line) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing atom count line"))?;
        let count: usize = count_line
            .trim()
            .parse()
            .map_err(|_| Error::parse(1, format!("invalid atom count {:?}", count_line.trim())))?;
        if lines.next().is_none() && count > 0 {
            return Err(Error::parse(2, "missing comment line"));
        }

        let scale = unit.to_bohr();
        let mut atoms = Vec::with_capacity(count);
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            if atoms.len() == count {
                return Err(Error::parse(
                    lineno,
                    format!("atom count mismatch: header declares {count} atoms"),
                ));
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() < 4 {
                return Err(Error::parse(lineno, "expected element symbol and three coordinates"));
            }
            let charge = elements::atomic_number(fields[0])
                .ok_or_else(|| Error::parse(lineno, format!("unknown element {:?}", fields[0])))?;
            let mut xyz = [0.0; 3];
            for (k, f) in fields[1..4].iter().enumerate() {
                xyz[k] = f
                    .parse::<f64>()
                    .map_err(|_| Error::parse(lineno, format!("invalid coordinate {f:?}")))?;
            }
            atoms.push(Atom {
                symbol: elements::symbol(charge).unwrap().to_string(),
                charge,
                position: Vector3::from(xyz) * scale,
            });
        }
        if atoms.len() != count {
            return Err(Error::parse(
                text.lines().count(),
                format!("atom count mismatch: header declares {count}, found {}", atoms.len()),
            ));
        }
        Self::new(atoms)
    }

    pub fn from_path(path: &std::path::Path, unit: LengthUnit) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse_xyz(&text, unit)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn nuclear_repulsion(&self) -> f64 {
        let mut e = 0.0;
        for (i, a) in self.atoms.iter().enumerate() {
            for b in &self.atoms[..i] {
                e += (a.charge * b.charge) as f64 / (a.position - b.position).norm();
            }
        }
        e
    }

    /// Number of electrons for the given net molecular charge.
    pub fn n_electrons(&self, molecular_charge: i32) -> Result<usize> {
        let z: i64 = self.atoms.iter().map(|a| a.charge as i64).sum();
        let n = z - molecular_charge as i64;
        if n < 0 {
            return Err(Error::Domain(format!("charge {molecular_charge} leaves no electrons")));
        }
        Ok(n as usize)
    }

    pub fn translated(&self, shift: &Vector3<f64>) -> Self {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom { position: a.position + shift, ..a.clone() })
            .collect();
        Self { atoms }
    }

    pub fn rotated(&self, rotation: &Matrix3<f64>) -> Self {
        let atoms = self
            .atoms
            .iter()
            .map(|a| Atom { position: rotation * a.position, ..a.clone() })
            .collect();
        Self { atoms }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_hydrogen() {
        let g = Geometry::parse_xyz("1\n\nH 0 0 0", LengthUnit::Angstrom).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.atoms()[0].charge, 1);
        assert_eq!(g.atoms()[0].position, Vector3::zeros());
        assert_eq!(g.nuclear_repulsion(), 0.0);
    }

    #[test]
    fn angstrom_conversion() {
        let g = Geometry::parse_xyz("2\n\nH 0 0 0\nH 0 0 0.52917721", LengthUnit::Angstrom).unwrap();
        let d = (g.atoms()[0].position - g.atoms()[1].position).norm();
        assert!((d - 1.0).abs() < 1e-6, "{d}");
    }

    #[test]
    fn water_charges() {
        let text = "3\nwater\nO 0 0 0.1173\nH 0 0.7572 -0.4692\nH 0 -0.7572 -0.4692\n";
        let g = Geometry::parse_xyz(text, LengthUnit::Angstrom).unwrap();
        let z: Vec<u32> = g.atoms().iter().map(|a| a.charge).collect();
        assert_eq!(z, vec![8, 1, 1]);
        assert_eq!(g.n_electrons(0).unwrap(), 10);
    }

    #[test]
    fn errors_name_the_line() {
        let err = Geometry::parse_xyz("2\n\nH 0 0 0\nQq 0 0 1", LengthUnit::Bohr).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
        let err = Geometry::parse_xyz("2\n\nH 0 0 0\nH 0 zero 1", LengthUnit::Bohr).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
        let err = Geometry::parse_xyz("3\n\nH 0 0 0\nH 0 0 1", LengthUnit::Bohr).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");
        let err = Geometry::parse_xyz("1\n\nH 0 0 0\nH 0 0 1", LengthUnit::Bohr).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
    }

    #[test]
    fn coincident_atoms_rejected() {
        assert!(Geometry::parse_xyz("2\n\nH 0 0 0\nH 0 0 0", LengthUnit::Bohr).is_err());
    }
}
