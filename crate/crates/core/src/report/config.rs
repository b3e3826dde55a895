use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::groups::{Group, GroupSpec, ParabolicMode};
use crate::hyperbolicity::SlimnessConfig;
use crate::relgraph::{GraphConfig, RelGraph};

pub const CONFIG_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Layers,
    Stabilization,
    Coding,
    Translators,
    Equivariance,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Layers,
        Suite::Stabilization,
        Suite::Coding,
        Suite::Translators,
        Suite::Equivariance,
    ];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Dot,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SlimnessSettings {
    pub exhaustive_radius: usize,
    pub ball_radius: usize,
    pub triangle_budget: usize,
}

impl Default for SlimnessSettings {
    fn default() -> Self {
        let d = SlimnessConfig::default();
        SlimnessSettings {
            exhaustive_radius: d.exhaustive_radius,
            ball_radius: d.ball_radius,
            triangle_budget: d.triangle_budget,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CodingSettings {
    /// Depth of the `Geo₁` window used for `C^η`.
    pub depth: usize,
    /// Largest `n` for which `s_n` is computed.
    pub max_n: usize,
    /// Largest `n` used in translator comparisons.
    pub translator_max_n: usize,
    /// Directions to code; empty means the first five suite directions.
    pub directions: Vec<String>,
    /// Elements `t` pairing `η` with `t·η`; empty means the bases.
    pub translators: Vec<String>,
    pub equivariance_samples: usize,
    pub equivariance_radius: usize,
}

impl Default for CodingSettings {
    fn default() -> Self {
        CodingSettings {
            depth: 16,
            max_n: 5,
            translator_max_n: 4,
            directions: Vec::new(),
            translators: Vec::new(),
            equivariance_samples: 1000,
            equivariance_radius: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Caps {
    pub vertex_cap: usize,
    pub core_budget: usize,
}

impl Default for Caps {
    fn default() -> Self {
        let g = GraphConfig::default();
        Caps {
            vertex_cap: g.vertex_cap,
            core_budget: g.core_budget,
        }
    }
}

/// Everything a `verify` run needs. Paths are relative to the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub format_version: u32,
    pub name: String,
    pub spec: PathBuf,
    pub suites: Vec<Suite>,
    /// Retained depth for the layer bound.
    pub radius: usize,
    /// Depths scanned for the symmetric difference.
    pub stabilization_radii: Vec<usize>,
    /// Horofunction window radius; derived from `ν̂` when absent.
    pub window: Option<usize>,
    /// Bundle margin; derived from `ν̂` when absent.
    pub margin: Option<usize>,
    pub seed: u64,
    pub slimness: SlimnessSettings,
    pub bases: Vec<String>,
    pub directions: Vec<String>,
    /// `(x, y)` pairs for the symmetric difference; empty means every base
    /// after the first paired with the first.
    pub pairs: Vec<[String; 2]>,
    pub coding: CodingSettings,
    pub caps: Caps,
    pub parabolic_mode: ParabolicMode,
    pub cache_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub formats: Vec<Format>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            format_version: CONFIG_FORMAT_VERSION,
            name: "run".into(),
            spec: PathBuf::new(),
            suites: Suite::ALL.to_vec(),
            radius: 10,
            stabilization_radii: vec![8, 9, 10, 11, 12],
            window: None,
            margin: None,
            seed: 0,
            slimness: SlimnessSettings::default(),
            bases: vec!["e".into()],
            directions: Vec::new(),
            pairs: Vec::new(),
            coding: CodingSettings::default(),
            caps: Caps::default(),
            parabolic_mode: ParabolicMode::Exact,
            cache_dir: None,
            out: None,
            formats: vec![Format::Json, Format::Csv],
            base_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_json(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.format_version != CONFIG_FORMAT_VERSION {
            return bad(&format!("unsupported format_version {}", self.format_version));
        }
        if self.radius == 0 || self.stabilization_radii.contains(&0) {
            return bad("radii must be positive");
        }
        if self.window == Some(0) {
            return bad("window must be positive");
        }
        if self.margin == Some(0) {
            return bad("margin must be at least 1");
        }
        if self.slimness.ball_radius == 0 || self.coding.depth == 0 {
            return bad("radii must be positive");
        }
        if self.bases.is_empty() {
            return bad("at least one base is required");
        }
        if self.directions.is_empty() {
            return bad("at least one direction is required");
        }
        if self.coding.translator_max_n > self.coding.max_n {
            return bad("coding.translator_max_n exceeds coding.max_n");
        }
        Ok(())
    }

    pub fn spec_path(&self) -> PathBuf {
        if self.spec.is_absolute() {
            self.spec.clone()
        } else {
            self.base_dir.join(&self.spec)
        }
    }

    pub fn graph(&self) -> Result<RelGraph> {
        let spec = GroupSpec::load(self.spec_path())?;
        RelGraph::new(
            Group::new(spec)?,
            GraphConfig {
                vertex_cap: self.caps.vertex_cap,
                core_budget: self.caps.core_budget,
                parabolic_mode: self.parabolic_mode,
            },
        )
    }

    pub fn slimness_config(&self) -> SlimnessConfig {
        SlimnessConfig {
            exhaustive_radius: self.slimness.exhaustive_radius,
            ball_radius: self.slimness.ball_radius,
            triangle_budget: self.slimness.triangle_budget,
            seed: self.seed,
        }
    }

    /// Hash of the settings that influence results. Output locations and the
    /// spec path are left out; the spec enters through its own hash.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.spec = PathBuf::new();
        c.cache_dir = None;
        c.out = None;
        c.formats.clear();
        let json = serde_json::to_string(&c).expect("config serializes");
        hex::encode(&Sha256::digest(json.as_bytes())[..16])
    }

    pub fn symdiff_pairs(&self) -> Vec<[String; 2]> {
        if !self.pairs.is_empty() {
            return self.pairs.clone();
        }
        self.bases[1..]
            .iter()
            .map(|y| [self.bases[0].clone(), y.clone()])
            .collect()
    }

    pub fn coding_directions(&self) -> Vec<String> {
        if !self.coding.directions.is_empty() {
            return self.coding.directions.clone();
        }
        self.directions.iter().take(5).cloned().collect()
    }

    pub fn translators(&self) -> Vec<String> {
        if !self.coding.translators.is_empty() {
            return self.coding.translators.clone();
        }
        self.bases.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_configs() {
        assert!(RunConfig::from_json(r#"{"directions":["(a)^inf"]}"#).is_ok());
        assert!(matches!(
            RunConfig::from_json(r#"{"directions":["(a)^inf"],"radius":0}"#),
            Err(Error::Config(_))
        ));
        assert!(RunConfig::from_json(r#"{"directions":["(a)^inf"],"margin":0}"#).is_err());
        assert!(RunConfig::from_json(r#"{"directions":["(a)^inf"],"bogus":1}"#).is_err());
        assert!(RunConfig::from_json(r#"{}"#).is_err());
    }

    #[test]
    fn hash_ignores_output_location() {
        let a = RunConfig::from_json(r#"{"directions":["(a)^inf"]}"#).unwrap();
        let mut b = a.clone();
        b.out = Some("elsewhere".into());
        assert_eq!(a.hash(), b.hash());
        b.seed = 7;
        assert_ne!(a.hash(), b.hash());
    }
}
