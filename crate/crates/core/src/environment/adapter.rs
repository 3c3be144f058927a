use std::path::Path;

use super::{Environment, EnvironmentError};
use crate::rfsim::RfDocument;

/// Source of environments and their RF observations.
///
/// Implement this for an external dataset to feed it through the same
/// corruption, refinement and evaluation stages as synthetic data.
pub trait DatasetAdapter {
    fn load_environment(&self, dir: &Path) -> Result<Environment, EnvironmentError>;

    /// RF observations for the environment, when the source ships them.
    fn load_observations(&self, dir: &Path) -> Result<Option<RfDocument>, EnvironmentError>;
}

fn read(path: &Path) -> Result<String, EnvironmentError> {
    std::fs::read_to_string(path).map_err(|source| EnvironmentError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// This crate's own layout: `environment.json` and optional `rf.json`.
#[derive(Debug, Default, Clone, Copy)]
pub struct NativeAdapter;

impl DatasetAdapter for NativeAdapter {
    fn load_environment(&self, dir: &Path) -> Result<Environment, EnvironmentError> {
        Environment::from_json(&read(&dir.join("environment.json"))?)
    }

    fn load_observations(&self, dir: &Path) -> Result<Option<RfDocument>, EnvironmentError> {
        let path = dir.join("rf.json");
        if !path.exists() {
            return Ok(None);
        }
        Ok(Some(serde_json::from_str(&read(&path)?)?))
    }
}

/// Placeholder for WAIR-D exports.
///
/// The native WAIR-D file layout and coordinate conventions are not
/// documented here, so both methods report `Unsupported`. A concrete
/// implementation needs to map each scenario's building outlines into
/// [`Environment::buildings`] (meters, origin at the lower-left corner),
/// take the 5 BS and 30 UE positions from scenario 1, and convert per-path
/// AoA/AoD/ToA plus the five path-loss bands into an [`RfDocument`].
#[derive(Debug, Default, Clone, Copy)]
pub struct WairdAdapter;

impl DatasetAdapter for WairdAdapter {
    fn load_environment(&self, dir: &Path) -> Result<Environment, EnvironmentError> {
        Err(EnvironmentError::Unsupported(format!(
            "WAIR-D import is not implemented ({})",
            dir.display()
        )))
    }

    fn load_observations(&self, dir: &Path) -> Result<Option<RfDocument>, EnvironmentError> {
        Err(EnvironmentError::Unsupported(format!(
            "WAIR-D import is not implemented ({})",
            dir.display()
        )))
    }
}
