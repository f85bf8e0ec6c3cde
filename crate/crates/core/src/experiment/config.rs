use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::families::FamilySpec;
use crate::geometry::{generate_grid, generate_jittered, HomogeneityParams, PointSet};
use crate::incidence::Engine;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorSpec {
    Grid,
    Jittered { amplitude: f64, seed: u64 },
}

impl GeneratorSpec {
    /// Builds the `n^d` point set with `n = round(target^{1/d})`.
    pub fn generate(&self, target: usize, dim: usize) -> Result<PointSet> {
        let n = side_for(target, dim);
        match *self {
            GeneratorSpec::Grid => generate_grid(n, dim),
            GeneratorSpec::Jittered { amplitude, seed } => {
                generate_jittered(n, dim, amplitude, seed)
            }
        }
    }
}

pub fn side_for(target: usize, dim: usize) -> usize {
    ((target as f64).powf(1.0 / dim as f64).round() as usize).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineChoice {
    Brute,
    Grid,
    Both,
}

impl EngineChoice {
    pub fn label(self) -> &'static str {
        match self {
            EngineChoice::Brute => "brute",
            EngineChoice::Grid => "grid",
            EngineChoice::Both => "both",
        }
    }

    pub fn primary(self) -> Engine {
        match self {
            EngineChoice::Brute => Engine::Brute,
            EngineChoice::Grid | EngineChoice::Both => Engine::Grid,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ScanChoice {
    /// Exact scan while it fits the work limit, conservative beyond.
    #[default]
    Auto,
    Exact,
    Conservative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomogeneitySection {
    #[serde(default = "default_covering")]
    pub covering: f64,
    #[serde(default = "default_packing")]
    pub packing: f64,
    #[serde(default = "default_k0")]
    pub k0: usize,
    #[serde(default)]
    pub method: ScanChoice,
}

fn default_covering() -> f64 {
    3.0
}
fn default_packing() -> f64 {
    0.4
}
fn default_k0() -> usize {
    4
}

impl Default for HomogeneitySection {
    fn default() -> Self {
        Self {
            covering: default_covering(),
            packing: default_packing(),
            k0: default_k0(),
            method: ScanChoice::Auto,
        }
    }
}

impl HomogeneitySection {
    pub fn params(&self) -> Result<HomogeneityParams> {
        HomogeneityParams::new(self.covering, self.packing, self.k0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifySection {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_samples() -> usize {
    2000
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            samples: default_samples(),
            seed: 0,
        }
    }
}

/// One coefficient or several.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficients {
    One(f64),
    Many(Vec<f64>),
}

impl Default for Coefficients {
    fn default() -> Self {
        Coefficients::One(0.5)
    }
}

impl Coefficients {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Coefficients::One(c) => vec![*c],
            Coefficients::Many(cs) => cs.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dimension: usize,
    pub s: f64,
    #[serde(default)]
    pub delta_coefficient: Coefficients,
    pub n_list: Vec<usize>,
    pub engine: EngineChoice,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default = "default_slack")]
    pub slack: f64,
    /// Record wall-clock time per row. Off by default so reruns are byte-identical.
    #[serde(default)]
    pub timing: bool,
    pub generator: GeneratorSpec,
    pub family: FamilySpec,
    #[serde(default)]
    pub homogeneity: HomogeneitySection,
    #[serde(default)]
    pub verify: VerifySection,
}

fn default_slack() -> f64 {
    0.1
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        let d = self.dimension;
        if d < 2 {
            return bad(format!("dimension must be >= 2, got {d}"));
        }
        if !(self.s > 0.0 && self.s < d as f64) {
            return bad(format!("s must lie in (0, {d}), got {}", self.s));
        }
        let cs = self.delta_coefficient.values();
        if cs.is_empty() || cs.iter().any(|c| !(c.is_finite() && *c > 0.0)) {
            return bad("delta_coefficient must be positive".into());
        }
        if self.n_list.len() < 3 {
            return bad(format!(
                "n_list needs at least 3 entries, got {}",
                self.n_list.len()
            ));
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) || self.n_list[0] == 0 {
            return bad("n_list must be positive and strictly increasing".into());
        }
        let realized = self.realized_sizes();
        if realized.windows(2).any(|w| w[0] >= w[1]) {
            return bad(format!(
                "n_list collapses after rounding to n^{d} points: {realized:?}"
            ));
        }
        if !(self.slack.is_finite() && self.slack >= 0.0) {
            return bad(format!("slack must be >= 0, got {}", self.slack));
        }
        self.homogeneity
            .params()
            .map_err(|e| Error::Config(e.to_string()))?;
        self.family
            .build(d)
            .map_err(|e| Error::Config(e.to_string()))?;
        if let GeneratorSpec::Jittered { amplitude, .. } = self.generator {
            if !(0.0..0.5).contains(&amplitude) {
                return bad(format!(
                    "jitter amplitude must lie in [0, 0.5), got {amplitude}"
                ));
            }
        }
        if self.verify.samples == 0 {
            return bad("verify.samples must be >= 1".into());
        }
        Ok(())
    }

    /// Point counts actually generated for each `n_list` entry.
    pub fn realized_sizes(&self) -> Vec<usize> {
        self.n_list
            .iter()
            .map(|&t| side_for(t, self.dimension).pow(self.dimension as u32))
            .collect()
    }

    /// SHA-256 of the canonical TOML rendering, so formatting and comments
    /// in the source file do not change it.
    pub fn hash(&self) -> String {
        let canonical = toml::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}
