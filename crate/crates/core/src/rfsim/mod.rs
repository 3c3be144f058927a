//! Synthetic RF observations per UE-BS pair: traced paths, five-band path
//! loss, LOS labels, angle noise and the R1/R2 feature encodings.

mod features;
mod loss;
mod noise;
mod paths;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::environment::Environment;
use crate::geometry::{rasterize, segment_pixels, BinaryMap, GeometryError, Point};
use crate::seed::derive_seed;

pub use features::{
    encode_r1, encode_r2, standardize_loss, Granularity, RadioFeature, LOSS_CAP_DB, LOSS_MEAN_DB,
    LOSS_STD_DB, R1_DIM, R2_DIM,
};
pub use loss::{fspl_db, PathLossTable, PropagationModel, BANDS_GHZ};
pub use noise::{add_angle_noise, wrap_angle, Carrier, NoiseProfile};
pub use paths::{candidate_paths, mirror, trace_paths, PathKind, PathRecord, Tracer, MAX_PATHS};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Error, PartialEq)]
pub enum RfError {
    #[error("UE and BS are co-located")]
    CoLocated,
    #[error("at most {MAX_PATHS} paths can be encoded, got {0}")]
    TooManyPaths(usize),
    #[error("path loss must be non-negative")]
    InvalidLoss,
    #[error("band index {0} out of range")]
    BadBand(usize),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LosLabel {
    Los,
    Nlos,
}

/// Which angle-noise variant of the R1 features to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum NoiseSetting {
    #[default]
    #[serde(rename = "none")]
    None,
    #[serde(rename = "28ghz")]
    Ghz28,
    #[serde(rename = "73ghz")]
    Ghz73,
}

/// LOS iff the supercover cells of ue->bs hold no building on `truth`.
pub fn los_label_on(truth: &BinaryMap, ue: Point, bs: Point) -> LosLabel {
    if segment_pixels(ue, bs, truth).intersects {
        LosLabel::Nlos
    } else {
        LosLabel::Los
    }
}

/// [`los_label_on`] against the environment's ground-truth raster.
pub fn los_label(env: &Environment, ue: Point, bs: Point) -> Result<LosLabel, RfError> {
    let truth = rasterize(&env.buildings, env.side_length)?;
    Ok(los_label_on(&truth, ue, bs))
}

/// Path loss in dB for band index `band` (see [`BANDS_GHZ`]).
pub fn path_loss(
    env: &Environment,
    ue: Point,
    bs: Point,
    band: usize,
    model: &PropagationModel,
) -> Result<f64, RfError> {
    if band >= BANDS_GHZ.len() {
        return Err(RfError::BadBand(band));
    }
    let paths = trace_paths(env, ue, bs)?;
    Ok(model.loss_from_paths(&paths, band))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct R1Vectors {
    pub clean: Vec<f64>,
    pub noisy_28ghz: Vec<f64>,
    pub noisy_73ghz: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairObservation {
    pub pair_index: usize,
    pub ue_index: usize,
    pub bs_index: usize,
    pub ue: Point,
    pub bs: Point,
    pub paths: Vec<PathRecord>,
    pub path_loss: PathLossTable,
    pub los: LosLabel,
    pub r1: R1Vectors,
    pub r2: Vec<f64>,
}

/// Contents of `rf.json`: observations for all UE-BS pairs of one environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RfDocument {
    pub env_id: String,
    pub side_length: f64,
    pub pairs: Vec<PairObservation>,
}

impl RfDocument {
    /// Feature vectors of every pair for the requested variant.
    pub fn features(&self, granularity: Granularity, noise: NoiseSetting) -> Vec<RadioFeature> {
        self.pairs
            .iter()
            .map(|p| {
                let values = match (granularity, noise) {
                    (Granularity::R2, _) => p.r2.clone(),
                    (Granularity::R1, NoiseSetting::None) => p.r1.clean.clone(),
                    (Granularity::R1, NoiseSetting::Ghz28) => p.r1.noisy_28ghz.clone(),
                    (Granularity::R1, NoiseSetting::Ghz73) => p.r1.noisy_73ghz.clone(),
                };
                RadioFeature {
                    granularity,
                    values,
                }
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("rf document serializes");
        s.push('\n');
        s
    }
}

/// Synthesizes observations for all 150 pairs of `env`.
///
/// Angle noise for pair `k` and carrier `c` is seeded from
/// `(noise_seed, env.id, "r1-noise-<c>-<k>")`.
pub fn synthesize_rf(
    env: &Environment,
    model: &PropagationModel,
    noise_seed: u64,
) -> Result<RfDocument, RfError> {
    let tracer = Tracer::new(env)?;
    let pairs: Vec<(usize, usize)> = env.pairs().collect();
    let pairs = pairs
        .par_iter()
        .enumerate()
        .map(|(pair_index, &(u, b))| {
            let (ue, bs) = (env.ue[u], env.bs[b]);
            let paths = tracer.trace(ue, bs)?;
            let noisy = |carrier: Carrier, tag: &str| {
                let seed =
                    derive_seed(noise_seed, &env.id, &format!("r1-noise-{tag}-{pair_index}"));
                let recs = add_angle_noise(&paths, &NoiseProfile::for_carrier(carrier), seed);
                encode_r1(&recs, ue, bs, env.side_length).map(|f| f.values)
            };
            let table = model.table_from_paths(&paths);
            Ok(PairObservation {
                pair_index,
                ue_index: u,
                bs_index: b,
                ue,
                bs,
                los: los_label_on(tracer.truth(), ue, bs),
                r1: R1Vectors {
                    clean: encode_r1(&paths, ue, bs, env.side_length)?.values,
                    noisy_28ghz: noisy(Carrier::Ghz28, "28ghz")?,
                    noisy_73ghz: noisy(Carrier::Ghz73, "73ghz")?,
                },
                r2: encode_r2(&table, ue, bs, env.side_length).values,
                path_loss: table,
                paths,
            })
        })
        .collect::<Result<Vec<_>, RfError>>()?;
    Ok(RfDocument {
        env_id: env.id.clone(),
        side_length: env.side_length,
        pairs,
    })
}
