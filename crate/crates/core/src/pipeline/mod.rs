//! Dataset-level orchestration: generation, RF synthesis, corruption,
//! refinement, evaluation, rendering and export over a directory tree
//! `<root>/<env_id>/{environment,rf,corrupted,refined}.json` plus
//! `<root>/index.json`.

mod config;
mod export;
mod render;
mod stages;
mod store;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::corruption::CorruptionError;
use crate::environment::EnvironmentError;
use crate::geometry::GeometryError;
use crate::metrics::MetricsError;
use crate::refine::RefineError;
use crate::rfsim::RfError;

pub use config::{
    ClassifierConfig, CorruptionConfig, PipelineConfig, SplitConfig, REFERENCE_SPLIT,
};
pub use export::{export_dataset, ExportRecord};
pub use render::{render_svg, RenderLayers};
pub use stages::{
    corrupt_dataset, evaluate, fit_curves, generate_dataset, load_map, pair_sequences,
    refine_dataset, refine_one, render_dataset, synthesize_dataset, LabelSource, MapSource,
    PredictedMap, RefinedDocument,
};
pub use store::{
    read_json, to_pretty_json, write_if_changed, Dataset, DatasetIndex, Split, CONFIG_FILE,
    CORRUPTED_FILE, CURVES_FILE, ENVIRONMENT_FILE, INDEX_FILE, REFINED_FILE, RF_FILE,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot parse {path}: {message}")]
    ConfigParse { path: PathBuf, message: String },
    #[error("missing {what}: {path} not found")]
    Missing { what: &'static str, path: PathBuf },
    #[error("malformed {path}: {message}")]
    Data { path: PathBuf, message: String },
    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Environment(#[from] EnvironmentError),
    #[error(transparent)]
    Corruption(#[from] CorruptionError),
    #[error(transparent)]
    Rf(#[from] RfError),
    #[error(transparent)]
    Refine(#[from] RefineError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("csv output failed: {0}")]
    Csv(#[from] csv::Error),
}

impl PipelineError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn parse(path: &Path, e: impl std::fmt::Display) -> Self {
        Self::ConfigParse {
            path: path.to_path_buf(),
            message: e.to_string(),
        }
    }

    /// Bad invocation or configuration, as opposed to bad or missing data.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Self::Config(_)
                | Self::ConfigParse { .. }
                | Self::Corruption(
                    CorruptionError::UnsupportedLevel(_) | CorruptionError::InvalidParams(_)
                )
                | Self::Refine(RefineError::Config(_))
                | Self::Environment(EnvironmentError::Config(_))
        )
    }
}
