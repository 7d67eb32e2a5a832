//! Run configuration, read from TOML.
//!
//! ```toml
//! seed = 7
//! input = "networks"        # directory of edge lists, relative to this file
//! out = "out"
//! folds = 10
//! replicates = 1
//! feature_subsets = ["n,m,diam", "LCC", "close"]
//!
//! [[model]]
//! id = "2d"
//!
//! [[model]]
//! id = "min3"
//! d = 3
//! distance = "min(x0, max(x1, x2))"
//! topology = "torus"
//! weights = "degree"
//!
//! [self_test]
//! networks = 20
//! n = 1000
//! model = "2d"
//! ```
//!
//! A subset is a comma-separated list of feature keys; a bare distribution
//! name such as `LCC` stands for its mean (`LCC-mean`).

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::classifier::{default_c_grid, default_gamma_grid, ClassifierConfig, DEFAULT_FOLDS};
use crate::error::{Error, Result};
use crate::features::{FeatureVector, DISTRIBUTIONS};
use crate::fitting::{GirgModelConfig, ModelSpec, WeightMode};
use crate::geometry::{parse_distance_spec, Topology};

/// Feature subsets evaluated when none are configured.
pub const DEFAULT_SUBSETS: [&str; 12] = [
    "n,m,diam",
    "tau",
    "diam",
    "eff-diam",
    "k-core",
    "LCC",
    "Katz",
    "betw",
    "close",
    "degree",
    "LCC,close",
    "betw,close",
];

/// Models fitted when none are configured.
pub const DEFAULT_MODELS: [&str; 8] = ["ER", "BA", "CL", "CL-c", "1d", "2d", "2m", "1-23"];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelEntry {
    pub id: String,
    pub d: Option<usize>,
    pub distance: Option<String>,
    pub topology: Option<String>,
    pub weights: Option<String>,
}

impl ModelEntry {
    pub fn from_id(id: &str) -> Self {
        ModelEntry {
            id: id.to_string(),
            d: None,
            distance: None,
            topology: None,
            weights: None,
        }
    }

    pub fn to_spec(&self) -> Result<ModelSpec> {
        let Some(text) = &self.distance else {
            if self.d.is_some() || self.topology.is_some() || self.weights.is_some() {
                return Err(Error::Config(format!(
                    "model {}: d, topology and weights need a distance expression",
                    self.id
                )));
            }
            return ModelSpec::from_id(&self.id);
        };
        let d = self
            .d
            .ok_or_else(|| Error::Config(format!("model {}: distance given without d", self.id)))?;
        let spec = parse_distance_spec(text, d)?;
        let topology: Topology = self.topology.as_deref().unwrap_or("torus").parse()?;
        let weights: WeightMode = self.weights.as_deref().unwrap_or("power-law").parse()?;
        Ok(ModelSpec::girg(
            self.id.clone(),
            GirgModelConfig {
                spec,
                topology,
                weights,
            },
        ))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SelfTestConfig {
    #[serde(default = "SelfTestConfig::default_networks")]
    pub networks: usize,
    #[serde(default = "SelfTestConfig::default_n")]
    pub n: usize,
    #[serde(default = "SelfTestConfig::default_model")]
    pub model: String,
    #[serde(default = "SelfTestConfig::default_tau")]
    pub tau: f64,
    #[serde(default = "SelfTestConfig::default_alpha")]
    pub alpha: f64,
    #[serde(default = "SelfTestConfig::default_avg_degree")]
    pub avg_degree: f64,
}

impl SelfTestConfig {
    fn default_networks() -> usize {
        20
    }
    fn default_n() -> usize {
        1000
    }
    fn default_model() -> String {
        "2d".into()
    }
    fn default_tau() -> f64 {
        2.5
    }
    fn default_alpha() -> f64 {
        2.0
    }
    fn default_avg_degree() -> f64 {
        10.0
    }
}

impl Default for SelfTestConfig {
    fn default() -> Self {
        SelfTestConfig {
            networks: Self::default_networks(),
            n: Self::default_n(),
            model: Self::default_model(),
            tau: Self::default_tau(),
            alpha: Self::default_alpha(),
            avg_degree: Self::default_avg_degree(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    #[serde(default)]
    seed: u64,
    input: Option<PathBuf>,
    out: Option<PathBuf>,
    folds: Option<usize>,
    replicates: Option<usize>,
    feature_subsets: Option<Vec<String>>,
    #[serde(default)]
    model: Vec<ModelEntry>,
    c_grid: Option<Vec<f64>>,
    gamma_grid: Option<Vec<f64>>,
    self_test: Option<SelfTestConfig>,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub input: PathBuf,
    pub out: PathBuf,
    pub replicates: usize,
    /// Subset names as written, in evaluation order.
    pub feature_subsets: Vec<String>,
    pub models: Vec<ModelSpec>,
    pub classifier: ClassifierConfig,
    pub self_test: SelfTestConfig,
}

impl RunConfig {
    /// Defaults for everything; `input` and `out` are `networks` and `out`.
    pub fn new(seed: u64) -> Self {
        RunConfig {
            seed,
            input: "networks".into(),
            out: "out".into(),
            replicates: 1,
            feature_subsets: DEFAULT_SUBSETS.iter().map(|s| s.to_string()).collect(),
            models: DEFAULT_MODELS.iter().map(|id| ModelSpec::from_id(id).unwrap()).collect(),
            classifier: ClassifierConfig::default(),
            self_test: SelfTestConfig::default(),
        }
    }

    /// Relative paths are resolved against `base`.
    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut config = RunConfig::new(raw.seed);
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        config.input = resolve(raw.input.unwrap_or_else(|| "networks".into()));
        config.out = resolve(raw.out.unwrap_or_else(|| "out".into()));
        config.replicates = raw.replicates.unwrap_or(1);
        if let Some(s) = raw.feature_subsets {
            config.feature_subsets = s;
        }
        if !raw.model.is_empty() {
            config.models = raw.model.iter().map(ModelEntry::to_spec).collect::<Result<_>>()?;
        }
        config.classifier = ClassifierConfig {
            folds: raw.folds.unwrap_or(DEFAULT_FOLDS),
            c_grid: raw.c_grid.unwrap_or_else(default_c_grid),
            gamma_grid: raw.gamma_grid.unwrap_or_else(default_gamma_grid),
        };
        if let Some(st) = raw.self_test {
            config.self_test = st;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn set_models(&mut self, ids: &[String]) -> Result<()> {
        self.models = ids.iter().map(|id| ModelSpec::from_id(id)).collect::<Result<_>>()?;
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        let mut ids = HashSet::new();
        for m in &self.models {
            if !ids.insert(&m.id) {
                return Err(Error::Config(format!("duplicate model id {}", m.id)));
            }
            if m.id.is_empty() || m.id.contains(['/', '\\', ',']) || m.id.starts_with('.') {
                return Err(Error::Config(format!("model id {:?} is not usable as a file name", m.id)));
            }
        }
        if self.models.is_empty() {
            return Err(Error::Config("no models configured".into()));
        }
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be at least 1".into()));
        }
        if self.classifier.folds < 2 {
            return Err(Error::Config("folds must be at least 2".into()));
        }
        if self.classifier.c_grid.is_empty() || self.classifier.gamma_grid.is_empty() {
            return Err(Error::Config("empty classifier grid".into()));
        }
        for s in &self.feature_subsets {
            subset_keys(s)?;
        }
        Ok(())
    }
}

/// Feature keys named by a subset string.
pub fn subset_keys(subset: &str) -> Result<Vec<String>> {
    let known = FeatureVector::keys();
    let keys: Vec<String> = subset
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            if DISTRIBUTIONS.contains(&t) {
                format!("{t}-mean")
            } else {
                t.to_string()
            }
        })
        .collect();
    if keys.is_empty() {
        return Err(Error::Config(format!("empty feature subset {subset:?}")));
    }
    if let Some(k) = keys.iter().find(|k| !known.contains(k)) {
        return Err(Error::Config(format!("unknown feature {k:?} in subset {subset:?}")));
    }
    Ok(keys)
}
