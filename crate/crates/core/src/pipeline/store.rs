use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::PipelineError;

pub const INDEX_FILE: &str = "index.json";
pub const CURVES_FILE: &str = "curves.json";
pub const CONFIG_FILE: &str = "config.toml";
pub const ENVIRONMENT_FILE: &str = "environment.json";
pub const RF_FILE: &str = "rf.json";
pub const CORRUPTED_FILE: &str = "corrupted.json";
pub const REFINED_FILE: &str = "refined.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

impl std::str::FromStr for Split {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            other => Err(PipelineError::Config(format!(
                "unknown split {other:?} (train, val, test)"
            ))),
        }
    }
}

/// Contents of `index.json`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetIndex {
    pub train: Vec<String>,
    pub val: Vec<String>,
    pub test: Vec<String>,
}

impl DatasetIndex {
    pub fn ids(&self, split: Split) -> &[String] {
        match split {
            Split::Train => &self.train,
            Split::Val => &self.val,
            Split::Test => &self.test,
        }
    }

    pub fn split_of(&self, id: &str) -> Option<Split> {
        [Split::Train, Split::Val, Split::Test]
            .into_iter()
            .find(|&s| self.ids(s).iter().any(|x| x == id))
    }

    /// Every id, train then val then test.
    pub fn all(&self) -> impl Iterator<Item = (Split, &String)> {
        let tag = |s: Split| move |id| (s, id);
        self.train
            .iter()
            .map(tag(Split::Train))
            .chain(self.val.iter().map(tag(Split::Val)))
            .chain(self.test.iter().map(tag(Split::Test)))
    }
}

/// On-disk layout rooted at the dataset directory.
#[derive(Debug, Clone)]
pub struct Dataset {
    root: PathBuf,
}

impl Dataset {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn env_file(&self, id: &str, name: &str) -> PathBuf {
        self.root.join(id).join(name)
    }

    pub fn index(&self) -> Result<DatasetIndex, PipelineError> {
        read_json(&self.file(INDEX_FILE), "dataset index (run `gen` first)")
    }
}

/// Reads and parses a JSON artifact; a missing file is named in the error.
pub fn read_json<T: DeserializeOwned>(path: &Path, what: &'static str) -> Result<T, PipelineError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(PipelineError::Missing {
                what,
                path: path.to_path_buf(),
            })
        }
        Err(e) => return Err(PipelineError::io(path, e)),
    };
    serde_json::from_str(&text).map_err(|e| PipelineError::Data {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Writes `contents` unless the file already holds exactly those bytes.
/// Returns whether anything was written.
pub fn write_if_changed(path: &Path, contents: &str) -> Result<bool, PipelineError> {
    if fs::read(path).is_ok_and(|old| old == contents.as_bytes()) {
        return Ok(false);
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(|e| PipelineError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| PipelineError::io(path, e))?;
    Ok(true)
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn idempotent_writes() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a/b.json");
        assert!(write_if_changed(&p, "{}\n").unwrap());
        assert!(!write_if_changed(&p, "{}\n").unwrap());
        assert!(write_if_changed(&p, "[]\n").unwrap());
        assert_eq!(fs::read_to_string(&p).unwrap(), "[]\n");
    }

    #[test]
    fn missing_and_malformed_files() {
        let dir = tempfile::tempdir().unwrap();
        let err =
            read_json::<DatasetIndex>(&dir.path().join("index.json"), "dataset index").unwrap_err();
        assert!(matches!(
            err,
            PipelineError::Missing {
                what: "dataset index",
                ..
            }
        ));
        let p = dir.path().join("bad.json");
        fs::write(&p, "{\"train\": []}").unwrap();
        let err = read_json::<DatasetIndex>(&p, "dataset index").unwrap_err();
        assert!(err.to_string().contains("val"), "{err}");
    }

    #[test]
    fn index_lookup() {
        let idx = DatasetIndex {
            train: vec!["a".into()],
            val: vec![],
            test: vec!["b".into()],
        };
        assert_eq!(idx.split_of("b"), Some(Split::Test));
        assert_eq!(idx.split_of("z"), None);
        assert_eq!(idx.all().count(), 2);
    }
}
