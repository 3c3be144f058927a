use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stages::{load_corrupted, load_environment, load_rf};
use super::store::{write_if_changed, Dataset, Split};
use super::{PipelineConfig, PipelineError};
use crate::corruption::{CorruptionRecord, TestGroupLabel};
use crate::environment::PAIR_COUNT;
use crate::geometry::{rasterize, BinaryMap, Point, Polygon};
use crate::rfsim::{Granularity, NoiseSetting};

/// One line of the JSON-lines export: an environment with one corruption instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportRecord {
    pub env_id: String,
    pub split: Split,
    pub side_length: f64,
    pub granularity: Granularity,
    pub noise: NoiseSetting,
    /// Lower bound for radio-token subsampling during training.
    pub min_radio_tokens: usize,
    pub truth: BinaryMap,
    pub corrupted: BinaryMap,
    /// One feature vector per UE-BS pair, pair order.
    pub features: Vec<Vec<f64>>,
    pub record: CorruptionRecord,
    pub group: Option<TestGroupLabel>,
    /// Uncorrupted polygons, for on-the-fly corruption.
    pub buildings: Vec<Polygon>,
    pub bs: Vec<Point>,
    pub ue: Vec<Point>,
}

/// Writes every environment of `splits` as one JSON line. Returns the record count.
pub fn export_dataset(
    cfg: &PipelineConfig,
    splits: &[Split],
    subset_min: usize,
    out: &Path,
) -> Result<usize, PipelineError> {
    if !(1..=PAIR_COUNT).contains(&subset_min) {
        return Err(PipelineError::Config(format!(
            "subset_min must be in 1..={PAIR_COUNT}, got {subset_min}"
        )));
    }
    let ds = Dataset::new(&cfg.root);
    let index = ds.index()?;
    let ids: Vec<(Split, String)> = index
        .all()
        .filter(|(s, _)| splits.contains(s))
        .map(|(s, id)| (s, id.clone()))
        .collect();
    let lines = ids
        .par_iter()
        .map(|(split, id)| {
            let env = load_environment(&ds, id)?;
            let rf = load_rf(&ds, id)?;
            let corrupted = load_corrupted(&ds, id)?;
            let rec = ExportRecord {
                env_id: id.clone(),
                split: *split,
                side_length: env.side_length,
                granularity: cfg.granularity,
                noise: cfg.noise,
                min_radio_tokens: subset_min,
                truth: rasterize(&env.buildings, env.side_length)?,
                corrupted: rasterize(&corrupted.buildings, corrupted.side_length)?,
                features: rf
                    .features(cfg.granularity, cfg.noise)
                    .into_iter()
                    .map(|f| f.values)
                    .collect(),
                record: corrupted.record,
                group: corrupted.group,
                buildings: env.buildings,
                bs: env.bs,
                ue: env.ue,
            };
            Ok(serde_json::to_string(&rec).expect("record serializes"))
        })
        .collect::<Result<Vec<String>, PipelineError>>()?;
    let mut text = lines.join("\n");
    if !text.is_empty() {
        text.push('\n');
    }
    write_if_changed(out, &text)?;
    Ok(lines.len())
}
