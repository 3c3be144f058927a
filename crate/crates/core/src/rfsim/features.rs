use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{PathLossTable, PathRecord, RfError, MAX_PATHS, SPEED_OF_LIGHT};
use crate::geometry::Point;

pub const R1_DIM: usize = 3 * MAX_PATHS + 4;
pub const R2_DIM: usize = 5 + 4;

/// Loss cap applied before standardization, dB.
pub const LOSS_CAP_DB: f64 = 160.0;
pub const LOSS_MEAN_DB: f64 = 102.0;
pub const LOSS_STD_DB: f64 = 22.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Granularity {
    R1,
    R2,
}

impl Granularity {
    pub fn dim(self) -> usize {
        match self {
            Granularity::R1 => R1_DIM,
            Granularity::R2 => R2_DIM,
        }
    }
}

/// Normalized per-pair feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadioFeature {
    pub granularity: Granularity,
    pub values: Vec<f64>,
}

fn coords(ue: Point, bs: Point, side_length: f64) -> [f64; 4] {
    [ue.x, ue.y, bs.x, bs.y].map(|v| v / side_length)
}

/// Path-level encoding: per path `(aoa/pi, aod/pi, toa*c/side)`, zero-padded
/// to five paths, then UE and BS coordinates divided by the side length.
pub fn encode_r1(
    records: &[PathRecord],
    ue: Point,
    bs: Point,
    side_length: f64,
) -> Result<RadioFeature, RfError> {
    if records.len() > MAX_PATHS {
        return Err(RfError::TooManyPaths(records.len()));
    }
    let mut values = vec![0.0; R1_DIM];
    for (k, r) in records.iter().enumerate() {
        values[3 * k] = r.aoa / PI;
        values[3 * k + 1] = r.aod / PI;
        values[3 * k + 2] = r.toa * SPEED_OF_LIGHT / side_length;
    }
    values[3 * MAX_PATHS..].copy_from_slice(&coords(ue, bs, side_length));
    Ok(RadioFeature {
        granularity: Granularity::R1,
        values,
    })
}

/// Maps a loss to its standardized slot: capped at 160 dB, then `(x - 102) / 22`.
pub fn standardize_loss(loss_db: f64) -> f64 {
    (loss_db.min(LOSS_CAP_DB) - LOSS_MEAN_DB) / LOSS_STD_DB
}

/// Path-loss encoding: five standardized bands then normalized coordinates.
pub fn encode_r2(table: &PathLossTable, ue: Point, bs: Point, side_length: f64) -> RadioFeature {
    let mut values: Vec<f64> = table.loss_db.iter().map(|&l| standardize_loss(l)).collect();
    values.extend(coords(ue, bs, side_length));
    RadioFeature {
        granularity: Granularity::R2,
        values,
    }
}
