//! Run configuration: a sectioned TOML file. Every key has a default except
//! `molecule.geometry` and the active-space section.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use solvaq::active::{ActiveSpaceSpec, DEFAULT_AVAS_THRESHOLD};
use solvaq::chem::LengthUnit;
use solvaq::pcm::{CavityConfig, DielectricParams};
use solvaq::scf::SCFConfig;
use solvaq::sqd::SQDConfig;
use solvaq::units::BOHR_PER_ANGSTROM;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub molecule: MoleculeSection,
    #[serde(default)]
    pub scf: ScfSection,
    #[serde(default)]
    pub solvent: SolventSection,
    pub active_space: ActiveSpaceSection,
    #[serde(default)]
    pub sampler: SamplerSection,
    #[serde(default)]
    pub sqd: SqdSection,
    #[serde(default)]
    pub sweep: SweepSection,
    #[serde(default)]
    pub run: RunSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoleculeSection {
    /// XYZ file.
    pub geometry: PathBuf,
    #[serde(default = "default_unit")]
    pub unit: LengthUnit,
    /// Built-in basis name or path to a basis file.
    #[serde(default = "default_basis")]
    pub basis: String,
    #[serde(default)]
    pub charge: i32,
    #[serde(default = "default_multiplicity")]
    pub multiplicity: u32,
}

fn default_unit() -> LengthUnit {
    LengthUnit::Angstrom
}

fn default_basis() -> String {
    "sto-3g".into()
}

fn default_multiplicity() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScfSection {
    pub max_iterations: usize,
    pub energy_tolerance: f64,
    pub diis_tolerance: f64,
    pub diis_depth: usize,
    pub level_shift: f64,
}

impl Default for ScfSection {
    fn default() -> Self {
        let c = SCFConfig::default();
        Self {
            max_iterations: c.max_iterations,
            energy_tolerance: c.energy_tolerance,
            diis_tolerance: c.diis_tolerance,
            diis_depth: c.diis_depth,
            level_shift: c.level_shift,
        }
    }
}

impl ScfSection {
    pub fn to_config(&self) -> SCFConfig {
        SCFConfig {
            max_iterations: self.max_iterations,
            energy_tolerance: self.energy_tolerance,
            diis_tolerance: self.diis_tolerance,
            diis_depth: self.diis_depth,
            level_shift: self.level_shift,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SolventSection {
    #[default]
    None,
    IefPcm {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        /// Multiplier applied to every sphere radius.
        #[serde(default = "default_scale")]
        scale: f64,
        #[serde(default = "default_points")]
        points_per_sphere: usize,
        /// Unscaled radii in angstrom overriding the Bondi table.
        #[serde(default)]
        radii: BTreeMap<String, f64>,
    },
}

fn default_epsilon() -> f64 {
    DielectricParams::default().epsilon()
}

fn default_scale() -> f64 {
    CavityConfig::default().scale
}

fn default_points() -> usize {
    CavityConfig::default().points_per_sphere
}

impl SolventSection {
    pub fn is_solvated(&self) -> bool {
        !matches!(self, SolventSection::None)
    }

    pub fn cavity(&self) -> Option<(CavityConfig, f64)> {
        match self {
            SolventSection::None => None,
            SolventSection::IefPcm { epsilon, scale, points_per_sphere, radii } => Some((
                CavityConfig {
                    radii: radii.iter().map(|(k, v)| (k.clone(), v * BOHR_PER_ANGSTROM)).collect(),
                    scale: *scale,
                    points_per_sphere: *points_per_sphere,
                },
                *epsilon,
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ActiveSpaceSection {
    /// `n_active` orbitals after `n_core` doubly occupied ones.
    Window { n_core: usize, n_active: usize },
    /// Explicit zero-based MO indices.
    Manual { orbitals: Vec<usize> },
    Avas {
        targets: Vec<String>,
        #[serde(default = "default_threshold")]
        threshold: f64,
    },
}

fn default_threshold() -> f64 {
    DEFAULT_AVAS_THRESHOLD
}

impl ActiveSpaceSection {
    pub fn spec(&self) -> ActiveSpaceSpec {
        match self {
            ActiveSpaceSection::Window { n_core, n_active } => ActiveSpaceSpec::window(*n_core, *n_active),
            ActiveSpaceSection::Manual { orbitals } => ActiveSpaceSpec::Manual { orbitals: orbitals.clone() },
            ActiveSpaceSection::Avas { targets, threshold } => {
                ActiveSpaceSpec::Avas { targets: targets.clone(), threshold: *threshold }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SampleSource {
    /// Exact sampling from the engine's own reference vector.
    #[default]
    Exact,
    /// A samples file.
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSection {
    pub source: SampleSource,
    /// Samples file (source = "file").
    pub path: Option<PathBuf>,
    /// Shots drawn by the exact sampler.
    pub shots: u64,
    /// Bit-flip probability applied to every shot.
    pub noise: f64,
}

impl Default for SamplerSection {
    fn default() -> Self {
        Self { source: SampleSource::Exact, path: None, shots: 100_000, noise: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SqdSection {
    pub batches: usize,
    pub batch_size: usize,
    pub iterations: usize,
    pub davidson_tolerance: f64,
    pub scrf_tolerance: f64,
    pub max_macro_iterations: usize,
}

impl Default for SqdSection {
    fn default() -> Self {
        let c = SQDConfig::default();
        Self {
            batches: c.batches,
            batch_size: c.batch_size,
            iterations: c.iterations,
            davidson_tolerance: c.davidson_tolerance,
            scrf_tolerance: c.scrf_tolerance,
            max_macro_iterations: c.max_macro_iterations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// Per-batch shot counts, one output row each.
    pub batch_sizes: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    /// Worker threads; 0 uses every core.
    pub workers: usize,
    pub output: PathBuf,
}

impl Default for RunSection {
    fn default() -> Self {
        Self { seed: 0, workers: 0, output: PathBuf::from("solvaq-out") }
    }
}

const BUILTIN_BASES: [&str; 4] = ["sto-3g", "sto3g", "cc-pvdz", "ccpvdz"];

fn is_builtin_basis(name: &str) -> bool {
    BUILTIN_BASES.contains(&name.to_ascii_lowercase().as_str())
}

impl RunConfig {
    /// Parses a config file; relative paths inside it are resolved against
    /// the file's directory.
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let join = |p: &Path| if p.is_relative() { base.join(p) } else { p.to_path_buf() };
        self.molecule.geometry = join(&self.molecule.geometry);
        if let Some(p) = &self.sampler.path {
            self.sampler.path = Some(join(p));
        }
        if !is_builtin_basis(&self.molecule.basis) {
            self.molecule.basis = join(Path::new(&self.molecule.basis)).display().to_string();
        }
        self.run.output = join(&self.run.output);
    }

    pub fn sqd_config(&self) -> SQDConfig {
        SQDConfig {
            batches: self.sqd.batches,
            batch_size: self.sqd.batch_size,
            iterations: self.sqd.iterations,
            davidson_tolerance: self.sqd.davidson_tolerance,
            scrf_tolerance: self.sqd.scrf_tolerance,
            max_macro_iterations: self.sqd.max_macro_iterations,
            seed: self.run.seed,
            workers: self.run.workers,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !self.molecule.geometry.is_file() {
            return bad(format!("geometry file {} does not exist", self.molecule.geometry.display()));
        }
        if !is_builtin_basis(&self.molecule.basis) && !Path::new(&self.molecule.basis).is_file() {
            return bad(format!("basis file {} does not exist", self.molecule.basis));
        }
        if self.molecule.multiplicity != 1 {
            return bad(format!("only singlet targets are supported, got multiplicity {}", self.molecule.multiplicity));
        }
        self.scf.to_config().validate().map_err(|e| CliError::Config(e.to_string()))?;
        if let SolventSection::IefPcm { epsilon, scale, points_per_sphere, radii } = &self.solvent {
            DielectricParams::new(*epsilon).map_err(|e| CliError::Config(e.to_string()))?;
            CavityConfig { radii: radii.clone(), scale: *scale, points_per_sphere: *points_per_sphere }
                .validate()
                .map_err(|e| CliError::Config(e.to_string()))?;
        }
        match self.sampler.source {
            SampleSource::File => match &self.sampler.path {
                Some(p) if p.is_file() => {}
                Some(p) => return bad(format!("samples file {} does not exist", p.display())),
                None => return bad("sampler.source = \"file\" needs sampler.path".into()),
            },
            SampleSource::Exact => {
                if self.sampler.shots == 0 {
                    return bad("sampler.shots must be positive".into());
                }
            }
        }
        if !(0.0..1.0).contains(&self.sampler.noise) {
            return bad(format!("sampler.noise must lie in [0, 1), got {}", self.sampler.noise));
        }
        self.sqd_config().validate().map_err(|e| CliError::Config(e.to_string()))?;
        if self.sweep.batch_sizes.contains(&0) {
            return bad("sweep.batch_sizes must be positive".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[molecule]
geometry = "water.xyz"

[active_space]
method = "window"
n_core = 1
n_active = 6
"#;

    #[test]
    fn defaults_fill_every_section() {
        let c = RunConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(c.molecule.basis, "sto-3g");
        assert_eq!(c.molecule.unit, LengthUnit::Angstrom);
        assert_eq!(c.solvent, SolventSection::None);
        assert_eq!(c.sqd.batches, 10);
        assert_eq!(c.sqd.iterations, 3);
        assert_eq!(c.sampler.source, SampleSource::Exact);
        assert_eq!(c.active_space.spec(), ActiveSpaceSpec::window(1, 6));
    }

    #[test]
    fn solvent_and_avas_sections() {
        let text = format!(
            "{MINIMAL}\n[solvent]\nmodel = \"ief-pcm\"\nepsilon = 35.0\n[solvent.radii]\nO = 1.6\n"
        )
        .replace("method = \"window\"\nn_core = 1\nn_active = 6", "method = \"avas\"\ntargets = [\"O 2p\"]");
        let c = RunConfig::from_toml(&text).unwrap();
        let (cav, eps) = c.solvent.cavity().unwrap();
        assert_eq!(eps, 35.0);
        assert!((cav.radii["O"] - 1.6 * BOHR_PER_ANGSTROM).abs() < 1e-12);
        assert_eq!(cav.points_per_sphere, 302);
        match c.active_space {
            ActiveSpaceSection::Avas { threshold, .. } => assert_eq!(threshold, 0.2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{MINIMAL}\n[sqd]\nbatchs = 3\n");
        assert!(matches!(RunConfig::from_toml(&text), Err(CliError::Config(_))));
        assert!(RunConfig::from_toml("[molecule]\n").is_err());
    }

    #[test]
    fn validation_names_missing_files() {
        let mut c = RunConfig::from_toml(MINIMAL).unwrap();
        c.resolve_paths(Path::new("/nonexistent"));
        let err = c.validate().unwrap_err().to_string();
        assert!(err.contains("/nonexistent/water.xyz"), "{err}");
    }
}
