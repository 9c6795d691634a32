//! Contracted Gaussian shells with spherical (2L+1)-component angular parts.
//!
//! Basis files are plain text. Each element block starts with the element
//! symbol on its own line, continues with one block per shell (`L n_prim`
//! followed by `n_prim` rows of `exponent coefficient`), and ends with `****`.
//! `L` is either an integer (0, 1, 2) or a letter (S, P, D). Coefficients refer
//! to individually normalized primitives, as in the usual basis-set libraries.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::{DMatrix, Vector3};

use super::elements;
use super::geometry::Geometry;
use crate::error::{Error, Result};

pub const MAX_L: usize = 2;

const STO_3G: &str = include_str!("../../data/basis/sto-3g.txt");
const CC_PVDZ: &str = include_str!("../../data/basis/cc-pvdz.txt");

/// One shell as read from a basis file, not yet placed on an atom.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellTemplate {
    pub l: usize,
    pub primitives: Vec<(f64, f64)>,
}

/// Per-element shell lists keyed by canonical element symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisLibrary {
    pub name: String,
    elements: BTreeMap<String, Vec<ShellTemplate>>,
}

impl BasisLibrary {
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut elements = BTreeMap::new();
        let mut current: Option<(String, Vec<ShellTemplate>)> = None;
        let mut lines = text.lines().enumerate().peekable();

        while let Some((idx, raw)) = lines.next() {
            let lineno = idx + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if line == "****" {
                let (sym, shells) = current
                    .take()
                    .ok_or_else(|| Error::parse(lineno, "`****` without an element block"))?;
                elements.insert(sym, shells);
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            match (&mut current, fields.len()) {
                (None, 1) => {
                    let z = elements::atomic_number(fields[0]).ok_or_else(|| {
                        Error::parse(lineno, format!("unknown element {:?}", fields[0]))
                    })?;
                    current = Some((elements::symbol(z).unwrap().to_string(), Vec::new()));
                }
                (None, _) => return Err(Error::parse(lineno, "expected an element symbol")),
                (Some((_, shells)), 2) => {
                    let l = parse_l(fields[0])
                        .ok_or_else(|| Error::parse(lineno, format!("invalid angular momentum {:?}", fields[0])))?;
                    let n: usize = fields[1]
                        .parse()
                        .ok()
                        .filter(|&n| n > 0)
                        .ok_or_else(|| Error::parse(lineno, format!("invalid primitive count {:?}", fields[1])))?;
                    let mut primitives = Vec::with_capacity(n);
                    for _ in 0..n {
                        let (pidx, praw) = lines
                            .next()
                            .ok_or_else(|| Error::parse(lineno, "unexpected end of shell block"))?;
                        let f: Vec<&str> = praw.split_whitespace().collect();
                        let parse = |s: &str| s.replace(['D', 'd'], "e").parse::<f64>().ok();
                        match (f.len(), f.first().and_then(|s| parse(s)), f.get(1).and_then(|s| parse(s))) {
                            (2, Some(e), Some(c)) if e > 0.0 => primitives.push((e, c)),
                            _ => {
                                return Err(Error::parse(
                                    pidx + 1,
                                    "expected `exponent coefficient` with a positive exponent",
                                ))
                            }
                        }
                    }
                    shells.push(ShellTemplate { l, primitives });
                }
                (Some(_), _) => return Err(Error::parse(lineno, "expected `L n_prim` or `****`")),
            }
        }
        if current.is_some() {
            return Err(Error::parse(text.lines().count(), "element block not terminated by `****`"));
        }
        Ok(Self { name: name.to_string(), elements })
    }

    /// A shipped basis (`sto-3g`, `cc-pvdz`) or a path to a basis file.
    pub fn load(name_or_path: &str) -> Result<Self> {
        match name_or_path.to_ascii_lowercase().as_str() {
            "sto-3g" | "sto3g" => Self::parse("sto-3g", STO_3G),
            "cc-pvdz" | "ccpvdz" => Self::parse("cc-pvdz", CC_PVDZ),
            _ => {
                let path = std::path::Path::new(name_or_path);
                let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
                Self::parse(name_or_path, &text)
            }
        }
    }

    pub fn shells_for(&self, symbol: &str) -> Option<&[ShellTemplate]> {
        self.elements.get(symbol).map(Vec::as_slice)
    }
}

fn parse_l(s: &str) -> Option<usize> {
    let l = match s.to_ascii_uppercase().as_str() {
        "S" => 0,
        "P" => 1,
        "D" => 2,
        other => other.parse().ok()?,
    };
    (l <= MAX_L).then_some(l)
}

/// Cartesian monomial exponents of degree `l` in lexicographic order
/// (xx, xy, xz, yy, yz, zz for d).
pub fn cartesian_powers(l: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::with_capacity((l + 1) * (l + 2) / 2);
    for i in (0..=l).rev() {
        for j in (0..=l - i).rev() {
            out.push([i, j, l - i - j]);
        }
    }
    out
}

/// Rows: real solid harmonics; columns: Cartesian monomials from [`cartesian_powers`].
///
/// d ordering is (xy, yz, z², xz, x²−y²). All components share the same
/// angular norm so one radial normalization serves the whole shell.
pub fn spherical_transform(l: usize) -> DMatrix<f64> {
    let s3 = 3f64.sqrt();
    match l {
        0 => DMatrix::from_element(1, 1, 1.0),
        1 => DMatrix::identity(3, 3),
        2 => DMatrix::from_row_slice(
            5,
            6,
            &[
                0.0, s3, 0.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 0.0, s3, 0.0, //
                -0.5, 0.0, 0.0, -0.5, 0.0, 1.0, //
                0.0, 0.0, s3, 0.0, 0.0, 0.0, //
                0.5 * s3, 0.0, 0.0, -0.5 * s3, 0.0, 0.0,
            ],
        ),
        _ => panic!("angular momentum {l} not supported"),
    }
}

fn double_factorial(n: i64) -> f64 {
    if n <= 0 {
        1.0
    } else {
        (n as f64) * double_factorial(n - 2)
    }
}

/// ∫ |S_lm(r)|² exp(-γ r²) d³r for a solid harmonic with the normalization above.
fn component_self_overlap(l: usize, gamma: f64) -> f64 {
    let angular = 4.0 * PI / (2 * l + 1) as f64;
    let radial = double_factorial(2 * l as i64 + 1) / (2f64.powi(l as i32 + 2) * gamma.powi(l as i32 + 1))
        * (PI / gamma).sqrt();
    angular * radial
}

/// A contracted shell placed on an atom.
#[derive(Debug, Clone, PartialEq)]
pub struct Shell {
    pub center: usize,
    pub origin: Vector3<f64>,
    pub l: usize,
    pub exponents: Vec<f64>,
    /// Coefficients multiplying unnormalized primitives `S_lm(r−A) exp(−α|r−A|²)`,
    /// scaled so each spherical component has unit self-overlap.
    pub coefficients: Vec<f64>,
}

impl Shell {
    pub fn new(center: usize, origin: Vector3<f64>, template: &ShellTemplate) -> Result<Self> {
        if template.l > MAX_L {
            return Err(Error::Unsupported(format!("shell with L = {}", template.l)));
        }
        if template.primitives.is_empty() {
            return Err(Error::Domain("shell without primitives".into()));
        }
        let l = template.l;
        let exponents: Vec<f64> = template.primitives.iter().map(|p| p.0).collect();
        if exponents.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::Domain("non-positive Gaussian exponent".into()));
        }
        let mut coefficients: Vec<f64> = template
            .primitives
            .iter()
            .map(|&(a, c)| c / component_self_overlap(l, 2.0 * a).sqrt())
            .collect();
        let mut norm = 0.0;
        for (i, &ai) in exponents.iter().enumerate() {
            for (j, &aj) in exponents.iter().enumerate() {
                norm += coefficients[i] * coefficients[j] * component_self_overlap(l, ai + aj);
            }
        }
        let scale = 1.0 / norm.sqrt();
        coefficients.iter_mut().for_each(|c| *c *= scale);
        Ok(Self { center, origin, l, exponents, coefficients })
    }

    pub fn n_spherical(&self) -> usize {
        2 * self.l + 1
    }

    pub fn n_cartesian(&self) -> usize {
        (self.l + 1) * (self.l + 2) / 2
    }
}

/// Identity of one spherical AO.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AoLabel {
    pub atom: usize,
    pub symbol: String,
    pub l: usize,
    pub m: usize,
    /// Shell name such as `1s`, `2p`, `3d`, counted per atom and angular momentum.
    pub shell_name: String,
}

impl std::fmt::Display for AoLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{} {}[{}]", self.symbol, self.atom, self.shell_name, self.m)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AOBasis {
    shells: Vec<Shell>,
    offsets: Vec<usize>,
    labels: Vec<AoLabel>,
}

impl AOBasis {
    pub fn build(geometry: &Geometry, library: &BasisLibrary) -> Result<Self> {
        let mut shells = Vec::new();
        let mut labels = Vec::new();
        for (ia, atom) in geometry.atoms().iter().enumerate() {
            let templates = library.shells_for(&atom.symbol).ok_or_else(|| {
                Error::Config(format!("basis {} has no entry for {}", library.name, atom.symbol))
            })?;
            let mut seen = [0usize; MAX_L + 1];
            for t in templates {
                let shell = Shell::new(ia, atom.position, t)?;
                let n = t.l + 1 + seen[t.l];
                seen[t.l] += 1;
                let name = format!("{}{}", n, ['s', 'p', 'd'][t.l]);
                for m in 0..shell.n_spherical() {
                    labels.push(AoLabel {
                        atom: ia,
                        symbol: atom.symbol.clone(),
                        l: t.l,
                        m,
                        shell_name: name.clone(),
                    });
                }
                shells.push(shell);
            }
        }
        Ok(Self::from_shells_with_labels(shells, labels))
    }

    /// Assembles a basis from explicit shells; labels are generated per center.
    pub fn from_shells(shells: Vec<Shell>) -> Self {
        let mut labels = Vec::new();
        let mut seen: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for s in &shells {
            let k = seen.entry((s.center, s.l)).or_insert(0);
            let name = format!("{}{}", s.l + 1 + *k, ['s', 'p', 'd'][s.l]);
            *k += 1;
            for m in 0..s.n_spherical() {
                labels.push(AoLabel { atom: s.center, symbol: "X".into(), l: s.l, m, shell_name: name.clone() });
            }
        }
        Self::from_shells_with_labels(shells, labels)
    }

    fn from_shells_with_labels(shells: Vec<Shell>, labels: Vec<AoLabel>) -> Self {
        let mut offsets = Vec::with_capacity(shells.len() + 1);
        let mut n = 0;
        for s in &shells {
            offsets.push(n);
            n += s.n_spherical();
        }
        offsets.push(n);
        Self { shells, offsets, labels }
    }

    pub fn n_ao(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn shells(&self) -> &[Shell] {
        &self.shells
    }

    /// First AO index of shell `i`.
    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    pub fn labels(&self) -> &[AoLabel] {
        &self.labels
    }

    /// Resolves labels like `"O 2p"` or `"H 1s"` to AO indices (all matching atoms).
    pub fn resolve_targets<S: AsRef<str>>(&self, targets: &[S]) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for t in targets {
            let t = t.as_ref();
            let mut parts = t.split_whitespace();
            let (Some(sym), Some(shell), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(Error::Config(format!("target AO label {t:?} must look like \"O 2p\"")));
            };
            for (i, lab) in self.labels.iter().enumerate() {
                if lab.symbol.eq_ignore_ascii_case(sym) && lab.shell_name.eq_ignore_ascii_case(shell) {
                    out.push(i);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Same basis with every shell center moved by `shift`.
    pub fn translated(&self, shift: &Vector3<f64>) -> Self {
        let mut b = self.clone();
        for s in &mut b.shells {
            s.origin += shift;
        }
        b
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chem::geometry::LengthUnit;

    #[test]
    fn shipped_libraries_parse() {
        for name in ["sto-3g", "cc-pvdz"] {
            let lib = BasisLibrary::load(name).unwrap();
            for el in ["H", "C", "N", "O"] {
                assert!(lib.shells_for(el).is_some(), "{name} {el}");
            }
        }
    }

    #[test]
    fn ao_counts() {
        let water = Geometry::parse_xyz(
            "3\n\nO 0 0 0.1173\nH 0 0.7572 -0.4692\nH 0 -0.7572 -0.4692",
            LengthUnit::Angstrom,
        )
        .unwrap();
        let sto = AOBasis::build(&water, &BasisLibrary::load("sto-3g").unwrap()).unwrap();
        assert_eq!(sto.n_ao(), 7);
        let dz = AOBasis::build(&water, &BasisLibrary::load("cc-pvdz").unwrap()).unwrap();
        // 14 on O (3s 2p 1d) + 5 per H (2s 1p)
        assert_eq!(dz.n_ao(), 24);
        let n: usize = dz.shells().iter().map(|s| 2 * s.l + 1).sum();
        assert_eq!(n, dz.n_ao());
        assert_eq!(sto.resolve_targets(&["O 2p"]).unwrap(), vec![2, 3, 4]);
        assert_eq!(sto.resolve_targets(&["H 1s", "O 2s"]).unwrap(), vec![1, 5, 6]);
        assert!(sto.resolve_targets(&["O"]).is_err());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let bad = "H\n0 2\n 1.0 0.5\n";
        let err = BasisLibrary::parse("x", bad).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let bad = "H\n0 1\n -1.0 0.5\n****\n";
        let err = BasisLibrary::parse("x", bad).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let bad = "H\n3 1\n 1.0 1.0\n****\n";
        assert!(BasisLibrary::parse("x", bad).is_err());
        let ok = "# comment\nH\nS 1\n 1.0D+00 1.0\n****\n";
        let lib = BasisLibrary::parse("x", ok).unwrap();
        assert_eq!(lib.shells_for("H").unwrap()[0].primitives, vec![(1.0, 1.0)]);
    }

    #[test]
    fn decimal_text_is_parsed_exactly() {
        let lib = BasisLibrary::parse("x", "O\n1 1\n 0.2709 1.0\n****\n").unwrap();
        assert_eq!(lib.shells_for("O").unwrap()[0].primitives[0].0, 0.2709);
    }

    #[test]
    fn cartesian_order() {
        assert_eq!(cartesian_powers(1), vec![[1, 0, 0], [0, 1, 0], [0, 0, 1]]);
        assert_eq!(cartesian_powers(2).len(), 6);
        assert_eq!(cartesian_powers(2)[1], [1, 1, 0]);
    }
}
