use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::PipelineError;
use crate::corruption::{CorruptionParams, GroupEdges, Severity};
use crate::environment::GeneratorConfig;
use crate::refine::{FitMode, LogBase, RefinementConfig};
use crate::rfsim::{Granularity, NoiseSetting, PropagationModel};

/// Reference split sizes that the dataset scales down.
pub const REFERENCE_SPLIT: [usize; 3] = [8403, 596, 1000];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitConfig {
    /// Multiplier on the reference split sizes, ignored when `counts` is set.
    pub scale: f64,
    /// Explicit `[train, val, test]` sizes.
    pub counts: Option<[usize; 3]>,
}

impl Default for SplitConfig {
    fn default() -> Self {
        Self {
            scale: 0.01,
            counts: None,
        }
    }
}

impl SplitConfig {
    /// `[train, val, test]`; a scaled split keeps at least one environment per split.
    pub fn sizes(&self) -> [usize; 3] {
        self.counts.unwrap_or_else(|| {
            REFERENCE_SPLIT.map(|n| ((n as f64 * self.scale).round() as usize).max(1))
        })
    }
}

/// Corruption settings: a severity level, or explicit parameters which win.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorruptionConfig {
    /// "1", "1.5" or "2".
    pub severity: String,
    pub params: Option<CorruptionParams>,
    pub group_edges: GroupEdges,
}

impl Default for CorruptionConfig {
    fn default() -> Self {
        Self {
            severity: "1".into(),
            params: None,
            group_edges: GroupEdges::default(),
        }
    }
}

impl CorruptionConfig {
    pub fn resolved(&self) -> Result<CorruptionParams, PipelineError> {
        let p = match &self.params {
            Some(p) => p.clone(),
            None => self.severity.parse::<Severity>()?.params(),
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierConfig {
    pub fit_mode: FitMode,
    pub log_base: LogBase,
}

impl Default for ClassifierConfig {
    fn default() -> Self {
        Self {
            fit_mode: FitMode::TwoParameter,
            log_base: LogBase::Natural,
        }
    }
}

/// Everything a pipeline run depends on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub root: PathBuf,
    pub seed: u64,
    pub splits: SplitConfig,
    pub generator: GeneratorConfig,
    pub propagation: PropagationModel,
    pub corruption: CorruptionConfig,
    pub noise: NoiseSetting,
    pub granularity: Granularity,
    pub classifier: ClassifierConfig,
    pub refinement: RefinementConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            root: PathBuf::from("dataset"),
            seed: 0,
            splits: SplitConfig::default(),
            generator: GeneratorConfig::default(),
            propagation: PropagationModel::default(),
            corruption: CorruptionConfig::default(),
            noise: NoiseSetting::None,
            granularity: Granularity::R1,
            classifier: ClassifierConfig::default(),
            refinement: RefinementConfig::default(),
        }
    }
}

impl PipelineConfig {
    /// Reads TOML, or JSON when the extension is `.json`.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
        let cfg: Self = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| PipelineError::parse(path, e))?
        } else {
            toml::from_str(&text).map_err(|e| PipelineError::parse(path, e))?
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        self.generator.validate()?;
        self.corruption.resolved()?;
        self.corruption.group_edges.validate()?;
        self.refinement.validate()?;
        if !(self.splits.scale.is_finite() && self.splits.scale > 0.0) {
            return Err(PipelineError::Config(format!(
                "splits.scale must be > 0, got {}",
                self.splits.scale
            )));
        }
        if self.splits.sizes().iter().sum::<usize>() == 0 {
            return Err(PipelineError::Config("splits are all empty".into()));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_split_is_scaled_reference() {
        assert_eq!(SplitConfig::default().sizes(), [84, 6, 10]);
        let s = SplitConfig {
            scale: 1.0,
            counts: None,
        };
        assert_eq!(s.sizes(), REFERENCE_SPLIT);
        let s = SplitConfig {
            scale: 1.0,
            counts: Some([3, 0, 2]),
        };
        assert_eq!(s.sizes(), [3, 0, 2]);
    }

    #[test]
    fn toml_roundtrip_and_partial_files() {
        let cfg = PipelineConfig::default();
        let back: PipelineConfig = toml::from_str(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        let partial: PipelineConfig =
            toml::from_str("seed = 7\n[corruption]\nseverity = \"2\"\n").unwrap();
        assert_eq!(partial.seed, 7);
        assert_eq!(
            partial.corruption.resolved().unwrap().keep_probability,
            0.215
        );
    }

    #[test]
    fn unknown_fields_are_named() {
        let err = toml::from_str::<PipelineConfig>("[refinement]\nmax_iters = 3\n").unwrap_err();
        assert!(err.to_string().contains("max_iters"), "{err}");
        let bad = PipelineConfig {
            corruption: CorruptionConfig {
                severity: "3".into(),
                ..Default::default()
            },
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}
