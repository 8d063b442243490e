//! The declarative run configuration: one JSON document, every field
//! defaulted, unknown keys rejected.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use operlab::hitchin::HitchinPoint;
use operlab::lie::{principal_triple_sln_with, CartanType, Normalization, PrincipalTriple};
use operlab::scaling::HolonomyConfig;
use operlab::solver::SolverConfig;
use operlab::surface::{
    build_mesh, build_mesh_subdivided, poincare_series_differential, read_mesh, DifferentialData, FuchsianSurface,
    SurfaceMesh,
};
use operlab::C64;

/// Environment variable that overrides `outputs`.
pub const OUTPUT_DIR_ENV: &str = "OPERLAB_OUTPUT_DIR";

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum Group {
    Sln(usize),
    Cartan(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SurfaceConfig {
    /// Each octagon triangle is split into `subdivision²` pieces.
    pub subdivision: usize,
    /// Target hyperbolic edge length; overrides `subdivision` when set.
    pub mesh_edge: Option<f64>,
    /// Mesh in the text format; overrides both of the above when set.
    pub mesh_file: Option<PathBuf>,
    /// Default Poincaré truncation (maximal word length) for differentials.
    pub truncation: usize,
}

impl Default for SurfaceConfig {
    fn default() -> Self {
        SurfaceConfig {
            subdivision: 12,
            mesh_edge: None,
            mesh_file: None,
            truncation: 2,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum DifferentialMode {
    Poincare,
    ConstantChart,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DifferentialSpec {
    pub order: usize,
    #[serde(default = "poincare")]
    pub mode: DifferentialMode,
    /// `[re, im]`.
    #[serde(default = "one")]
    pub amplitude: [f64; 2],
    /// Poincaré truncation; falls back to `surface.truncation`.
    #[serde(default)]
    pub truncation: Option<usize>,
}

fn poincare() -> DifferentialMode {
    DifferentialMode::Poincare
}

fn one() -> [f64; 2] {
    [1.0, 0.0]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub r_min: f64,
    pub r_max: f64,
    pub count: usize,
    pub log_spaced: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            r_min: 0.05,
            r_max: 0.4,
            count: 7,
            log_spaced: true,
        }
    }
}

/// Pass/fail thresholds used by the checking subcommands.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub algebra: f64,
    pub cocycle: f64,
    pub g_cocycle: f64,
    pub defect: f64,
    pub dictionary: f64,
    pub slope_target: f64,
    pub slope_tol: f64,
    /// Holonomy traces must agree within `trace * (1 + |tr|)`.
    pub trace: f64,
    pub gauge_identity: f64,
    pub gauge_invariance: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            algebra: 1e-12,
            cocycle: 1e-10,
            g_cocycle: 1e-9,
            defect: 1e-8,
            dictionary: 1e-9,
            slope_target: 4.0,
            slope_tol: 0.15,
            trace: 1e-6,
            gauge_identity: 1e-10,
            gauge_invariance: 1e-8,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub group: Group,
    pub surface: SurfaceConfig,
    pub u: Vec<DifferentialSpec>,
    /// `[re, im]`.
    pub hbar: [f64; 2],
    /// Radius for `solve`.
    pub r: f64,
    pub sweep: SweepConfig,
    pub solver: SolverConfig,
    pub holonomy: HolonomyConfig,
    /// Words in the generators (indices 0..8) for `holonomy`.
    pub loops: Vec<Vec<usize>>,
    /// Also recompute the limit-family traces after a smooth gauge change.
    pub gauge_perturbation: bool,
    /// Sample counts for the randomized checks.
    pub samples: usize,
    pub seed: u64,
    pub thresholds: Thresholds,
    pub outputs: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            group: Group::Sln(2),
            surface: SurfaceConfig::default(),
            u: vec![DifferentialSpec {
                order: 2,
                mode: DifferentialMode::Poincare,
                amplitude: [3.0, 0.0],
                truncation: None,
            }],
            hbar: [1.0, 0.0],
            r: 0.3,
            sweep: SweepConfig::default(),
            solver: SolverConfig::default(),
            holonomy: HolonomyConfig::default(),
            loops: vec![vec![0], vec![1], vec![2], vec![3]],
            gauge_perturbation: false,
            samples: 100,
            seed: 0,
            thresholds: Thresholds::default(),
            outputs: PathBuf::from("operlab-out"),
        }
    }
}

/// A configuration problem; the binary maps it to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

impl RunConfig {
    pub fn parse(text: &str) -> std::result::Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| ConfigError(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> std::result::Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| ConfigError(format!("{}: {}", path.display(), e.0)))
    }

    pub fn validate(&self) -> std::result::Result<(), ConfigError> {
        let err = |m: String| Err(ConfigError(m));
        match &self.group {
            Group::Sln(n) if *n < 2 => return err(format!("group.sln must be at least 2 (got {n})")),
            Group::Cartan(s) => {
                s.parse::<CartanType>()
                    .map_err(|e| ConfigError(format!("group.cartan: {e}")))?;
            }
            _ => {}
        }
        if let Group::Sln(n) = self.group {
            for d in &self.u {
                if d.order < 2 || d.order > n {
                    return err(format!("differential order {} is outside 2..={n}", d.order));
                }
            }
        }
        if self.surface.subdivision == 0 {
            return err("surface.subdivision must be positive".into());
        }
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return err(format!("r must be finite and non-negative (got {})", self.r));
        }
        if self.hbar == [0.0, 0.0] {
            return err("hbar must be nonzero".into());
        }
        self.solver
            .validate()
            .map_err(|e| ConfigError(format!("solver: {e}")))?;
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, excluding the output directory
    /// and the thread count.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.outputs = PathBuf::new();
        canonical.solver.threads = 0;
        let text = serde_json::to_string(&canonical).expect("config serializes");
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn hbar(&self) -> C64 {
        C64::new(self.hbar[0], self.hbar[1])
    }

    pub fn sln_rank(&self) -> Result<usize> {
        match self.group {
            Group::Sln(n) => Ok(n),
            Group::Cartan(ref t) => bail!("this subcommand needs group.sln (got cartan {t})"),
        }
    }

    pub fn triple(&self) -> Result<PrincipalTriple> {
        let n = self.sln_rank()?;
        Ok(principal_triple_sln_with(n, &Normalization::displayed(n))?)
    }

    pub fn hitchin_point(&self, surface: &FuchsianSurface) -> Result<HitchinPoint> {
        let n = self.sln_rank()?;
        let mut ds = Vec::new();
        for spec in &self.u {
            let amp = C64::new(spec.amplitude[0], spec.amplitude[1]);
            let d = match spec.mode {
                DifferentialMode::Poincare => {
                    let l = spec.truncation.unwrap_or(self.surface.truncation);
                    let mut d = poincare_series_differential(surface, spec.order, l)?;
                    d.amplitude = amp;
                    d
                }
                DifferentialMode::ConstantChart => DifferentialData::constant(spec.order, amp),
            };
            ds.push(d);
        }
        ds.sort_by_key(|d| d.order);
        Ok(HitchinPoint::new(n, ds)?)
    }

    pub fn mesh(&self, surface: &FuchsianSurface) -> Result<SurfaceMesh> {
        if let Some(path) = &self.surface.mesh_file {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading mesh {}", path.display()))?;
            return Ok(read_mesh(&text, surface)?);
        }
        Ok(match self.surface.mesh_edge {
            Some(edge) => build_mesh(surface, edge)?,
            None => build_mesh_subdivided(surface, self.surface.subdivision)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_default() {
        let c = RunConfig::parse("{}").unwrap();
        assert_eq!(c.hash(), RunConfig::default().hash());
        assert!(c.validate().is_ok());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = RunConfig::parse("{\"sweep\": {\"r_min\": 0.1, \"bogus\": 1}}").unwrap_err();
        assert!(e.0.contains("bogus") && e.0.contains("line"), "{}", e.0);
    }

    #[test]
    fn group_forms() {
        let c = RunConfig::parse("{\"group\": {\"cartan\": \"G2\"}}").unwrap();
        assert_eq!(c.group, Group::Cartan("G2".into()));
        assert!(RunConfig::parse("{\"group\": {\"cartan\": \"E8\"}}")
            .unwrap()
            .validate()
            .is_err());
        assert!(RunConfig::parse("{\"group\": {\"sln\": 1}}")
            .unwrap()
            .validate()
            .is_err());
    }

    #[test]
    fn hash_ignores_output_dir_and_threads_only() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.outputs = PathBuf::from("elsewhere");
        b.solver.threads = 7;
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn order_outside_group_is_rejected() {
        let c = RunConfig::parse("{\"u\": [{\"order\": 3}]}").unwrap();
        assert!(c.validate().is_err());
    }
}
