use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::store::*;
use super::{render_svg, PipelineConfig, PipelineError, RenderLayers};
use crate::corruption::{assign_group_with, corrupt, CorruptedDocument, CorruptionMode};
use crate::environment::{generate_environment, Environment};
use crate::geometry::{rasterize, BinaryMap, GRID_SIZE};
use crate::metrics::{aggregate, evaluate_sample, EvalReport};
use crate::refine::{
    classify_pair, refine_map, CurveSet, PairSequence, RefinementConfig, RefinementSummary,
};
use crate::rfsim::{synthesize_rf, LosLabel, RfDocument};
use crate::seed::derive_seed;

fn par_each<T, F>(ids: &[String], f: F) -> Result<Vec<T>, PipelineError>
where
    T: Send,
    F: Fn(&String) -> Result<T, PipelineError> + Sync + Send,
{
    ids.par_iter().map(f).collect()
}

pub(crate) fn load_environment(ds: &Dataset, id: &str) -> Result<Environment, PipelineError> {
    let env: Environment = read_json(
        &ds.env_file(id, ENVIRONMENT_FILE),
        "environment (run `gen`)",
    )?;
    env.validate()?;
    Ok(env)
}

pub(crate) fn load_rf(ds: &Dataset, id: &str) -> Result<RfDocument, PipelineError> {
    read_json(
        &ds.env_file(id, RF_FILE),
        "rf observations (run `synth-rf`)",
    )
}

pub(crate) fn load_corrupted(ds: &Dataset, id: &str) -> Result<CorruptedDocument, PipelineError> {
    read_json(
        &ds.env_file(id, CORRUPTED_FILE),
        "corrupted map (run `corrupt`)",
    )
}

fn all_ids(index: &DatasetIndex) -> Vec<String> {
    index.all().map(|(_, id)| id.clone()).collect()
}

/// Generates every environment and writes `index.json` and `config.toml`.
/// Ids are `env-00000`, ...; train, then val, then test.
pub fn generate_dataset(cfg: &PipelineConfig) -> Result<DatasetIndex, PipelineError> {
    cfg.validate()?;
    let ds = Dataset::new(&cfg.root);
    let [n_train, n_val, n_test] = cfg.splits.sizes();
    let ids: Vec<String> = (0..n_train + n_val + n_test)
        .map(|i| format!("env-{i:05}"))
        .collect();
    par_each(&ids, |id| {
        let mut gen = cfg.generator.clone();
        gen.seed = derive_seed(cfg.seed, id, "generate");
        let mut env = generate_environment(&gen)?;
        env.id = id.clone();
        write_if_changed(&ds.env_file(id, ENVIRONMENT_FILE), &env.to_json())?;
        Ok(())
    })?;
    let index = DatasetIndex {
        train: ids[..n_train].to_vec(),
        val: ids[n_train..n_train + n_val].to_vec(),
        test: ids[n_train + n_val..].to_vec(),
    };
    write_if_changed(&ds.file(INDEX_FILE), &to_pretty_json(&index))?;
    // The recorded config points at its own directory so copies stay valid.
    let recorded = PipelineConfig {
        root: ".".into(),
        ..cfg.clone()
    };
    write_if_changed(&ds.file(CONFIG_FILE), &recorded.to_toml())?;
    Ok(index)
}

/// Writes `rf.json` for every environment. Returns the count.
pub fn synthesize_dataset(cfg: &PipelineConfig) -> Result<usize, PipelineError> {
    let ds = Dataset::new(&cfg.root);
    let ids = all_ids(&ds.index()?);
    par_each(&ids, |id| {
        let env = load_environment(&ds, id)?;
        let rf = synthesize_rf(
            &env,
            &cfg.propagation,
            derive_seed(cfg.seed, id, "rf-noise"),
        )?;
        write_if_changed(&ds.env_file(id, RF_FILE), &rf.to_json())?;
        Ok(())
    })
    .map(|v| v.len())
}

/// Writes `corrupted.json` for every environment. The test split is always
/// corrupted in test mode and carries a group label.
pub fn corrupt_dataset(cfg: &PipelineConfig) -> Result<usize, PipelineError> {
    let params = cfg.corruption.resolved()?;
    let edges = &cfg.corruption.group_edges;
    let ds = Dataset::new(&cfg.root);
    let index = ds.index()?;
    let ids = all_ids(&index);
    par_each(&ids, |id| {
        let env = load_environment(&ds, id)?;
        let mode = match index.split_of(id) {
            Some(Split::Test) => CorruptionMode::Test,
            _ => params.mode,
        };
        let p = params.clone().with_mode(mode);
        let (buildings, record) = corrupt(&env, &p, derive_seed(cfg.seed, id, "corrupt"))?;
        let doc = CorruptedDocument {
            env_id: env.id.clone(),
            side_length: env.side_length,
            buildings,
            group: (mode == CorruptionMode::Test).then(|| assign_group_with(&record, edges)),
            record,
        };
        write_if_changed(&ds.env_file(id, CORRUPTED_FILE), &doc.to_json())?;
        Ok(())
    })
    .map(|v| v.len())
}

/// Fits the per-band LOS curves on ground-truth LOS pairs of the training
/// split and writes `curves.json`.
pub fn fit_curves(cfg: &PipelineConfig) -> Result<CurveSet, PipelineError> {
    let ds = Dataset::new(&cfg.root);
    let index = ds.index()?;
    let docs = par_each(&index.train, |id| load_rf(&ds, id))?;
    let samples: Vec<_> = docs
        .iter()
        .flat_map(|d| d.pairs.iter())
        .filter(|p| p.los == LosLabel::Los)
        .map(|p| (p.ue.distance(p.bs), p.path_loss))
        .collect();
    let curves = CurveSet::fit(&samples, cfg.classifier.fit_mode, cfg.classifier.log_base)?;
    write_if_changed(&ds.file(CURVES_FILE), &to_pretty_json(&curves))?;
    Ok(curves)
}

/// Where refinement takes its LOS/NLOS labels from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelSource {
    /// Classified from path loss with fitted curves.
    Classified,
    /// Ground-truth labels recorded in `rf.json`.
    Oracle,
}

impl FromStr for LabelSource {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "classified" => Ok(Self::Classified),
            "oracle" => Ok(Self::Oracle),
            other => Err(PipelineError::Config(format!(
                "unknown label source {other:?} (classified, oracle)"
            ))),
        }
    }
}

/// Labeled pair sequences of `rf` traced on `map`'s grid.
pub fn pair_sequences(
    rf: &RfDocument,
    map: &BinaryMap,
    labels: LabelSource,
    curves: Option<&CurveSet>,
) -> Result<Vec<PairSequence>, PipelineError> {
    let curves = match (labels, curves) {
        (LabelSource::Classified, None) => {
            return Err(PipelineError::Config(
                "classified labels need fitted curves".into(),
            ))
        }
        (_, c) => c,
    };
    if let Some(c) = curves {
        c.validate()?;
    }
    Ok(rf
        .pairs
        .iter()
        .map(|p| {
            let label = match (labels, curves) {
                (LabelSource::Classified, Some(c)) => {
                    classify_pair(&p.path_loss, c, p.ue.distance(p.bs))
                }
                _ => p.los,
            };
            PairSequence::new(p.ue, p.bs, label, map)
        })
        .collect())
}

/// A predicted map for one environment, the format `eval` reads.
/// Extra fields are ignored, so `refined.json` parses as one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictedMap {
    pub env_id: String,
    pub map: BinaryMap,
}

/// Contents of `refined.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinedDocument {
    pub env_id: String,
    pub side_length: f64,
    pub labels: LabelSource,
    pub summary: RefinementSummary,
    pub map: BinaryMap,
}

pub fn refine_one(
    corrupted: &CorruptedDocument,
    rf: &RfDocument,
    labels: LabelSource,
    curves: Option<&CurveSet>,
    rcfg: &RefinementConfig,
) -> Result<RefinedDocument, PipelineError> {
    if corrupted.env_id != rf.env_id {
        return Err(PipelineError::Inconsistent(format!(
            "corrupted map is for {:?} but rf observations are for {:?}",
            corrupted.env_id, rf.env_id
        )));
    }
    let input = rasterize(&corrupted.buildings, corrupted.side_length)?;
    let pairs = pair_sequences(rf, &input, labels, curves)?;
    let out = refine_map(&input, &pairs, rcfg)?;
    Ok(RefinedDocument {
        env_id: corrupted.env_id.clone(),
        side_length: corrupted.side_length,
        labels,
        summary: out.summary,
        map: out.map,
    })
}

/// Writes `refined.json` for every environment of `split`. Classified
/// labels refit the curves first.
pub fn refine_dataset(
    cfg: &PipelineConfig,
    labels: LabelSource,
    split: Split,
) -> Result<usize, PipelineError> {
    cfg.refinement.validate()?;
    let ds = Dataset::new(&cfg.root);
    let index = ds.index()?;
    let curves = match labels {
        LabelSource::Classified => Some(fit_curves(cfg)?),
        LabelSource::Oracle => None,
    };
    par_each(index.ids(split), |id| {
        let rcfg = RefinementConfig {
            seed: derive_seed(cfg.seed, id, &format!("refine-{}", cfg.refinement.seed)),
            ..cfg.refinement.clone()
        };
        let doc = refine_one(
            &load_corrupted(&ds, id)?,
            &load_rf(&ds, id)?,
            labels,
            curves.as_ref(),
            &rcfg,
        )?;
        write_if_changed(&ds.env_file(id, REFINED_FILE), &to_pretty_json(&doc))?;
        Ok(())
    })
    .map(|v| v.len())
}

/// A map provider for evaluation and rendering.
#[derive(Debug, Clone, PartialEq)]
pub enum MapSource {
    Truth,
    Corrupted,
    Refined,
    /// Directory of `<env_id>.json` predicted maps.
    Predictions(PathBuf),
}

impl FromStr for MapSource {
    type Err = PipelineError;

    /// `truth`, `corrupted`, `refined`, or a path to a predictions directory.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "truth" => Self::Truth,
            "corrupted" => Self::Corrupted,
            "refined" => Self::Refined,
            "" => return Err(PipelineError::Config("empty map source".into())),
            path => Self::Predictions(PathBuf::from(path)),
        })
    }
}

fn read_prediction(path: &Path, id: &str) -> Result<BinaryMap, PipelineError> {
    let p: PredictedMap = read_json(path, "predicted map")?;
    if p.env_id != id {
        return Err(PipelineError::Inconsistent(format!(
            "{} holds {:?}, expected {id:?}",
            path.display(),
            p.env_id
        )));
    }
    if p.map.width() != GRID_SIZE || p.map.height() != GRID_SIZE {
        return Err(PipelineError::Data {
            path: path.to_path_buf(),
            message: format!(
                "map is {}x{}, expected {GRID_SIZE}x{GRID_SIZE}",
                p.map.width(),
                p.map.height()
            ),
        });
    }
    Ok(p.map)
}

pub fn load_map(ds: &Dataset, source: &MapSource, id: &str) -> Result<BinaryMap, PipelineError> {
    match source {
        MapSource::Truth => {
            let env = load_environment(ds, id)?;
            Ok(rasterize(&env.buildings, env.side_length)?)
        }
        MapSource::Corrupted => {
            let doc = load_corrupted(ds, id)?;
            Ok(rasterize(&doc.buildings, doc.side_length)?)
        }
        MapSource::Refined => read_prediction(&ds.env_file(id, REFINED_FILE), id),
        MapSource::Predictions(dir) => read_prediction(&dir.join(format!("{id}.json")), id),
    }
}

/// Scores `pred` against `truth` on one split. Group labels come from
/// `corrupted.json` when present.
pub fn evaluate(
    cfg: &PipelineConfig,
    pred: &MapSource,
    truth: &MapSource,
    split: Split,
) -> Result<EvalReport, PipelineError> {
    let ds = Dataset::new(&cfg.root);
    let index = ds.index()?;
    let ids = index.ids(split);
    if ids.is_empty() {
        return Err(PipelineError::Config(format!("split {split:?} is empty")));
    }
    let samples = par_each(ids, |id| {
        let p = load_map(&ds, pred, id)?;
        let t = load_map(&ds, truth, id)?;
        let group = match load_corrupted(&ds, id) {
            Ok(doc) => doc.group,
            Err(PipelineError::Missing { .. }) => None,
            Err(e) => return Err(e),
        };
        Ok(evaluate_sample(id, &p, &t, group)?)
    })?;
    Ok(aggregate(samples, &cfg.corruption.group_edges)?)
}

/// Writes `<out>/<env_id>.svg` overlays for every environment of `split`.
pub fn render_dataset(
    cfg: &PipelineConfig,
    split: Split,
    prediction: &MapSource,
    out: &Path,
) -> Result<usize, PipelineError> {
    let ds = Dataset::new(&cfg.root);
    let index = ds.index()?;
    par_each(index.ids(split), |id| {
        let env = load_environment(&ds, id)?;
        let truth = rasterize(&env.buildings, env.side_length)?;
        let input = load_map(&ds, &MapSource::Corrupted, id)?;
        let pred = load_map(&ds, prediction, id)?;
        let svg = render_svg(
            &env,
            &RenderLayers {
                input: Some(&input),
                prediction: Some(&pred),
                truth: &truth,
            },
        );
        write_if_changed(&out.join(format!("{id}.svg")), &svg)?;
        Ok(())
    })
    .map(|v| v.len())
}
