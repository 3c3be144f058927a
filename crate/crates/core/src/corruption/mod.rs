//! OSM-style map corruption: building removal, positional shift and
//! convex-hull simplification, plus test-set binning.

mod group;
mod shift;

use std::f64::consts::TAU;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::environment::Environment;
use crate::geometry::{convex_hull, Point, Polygon};
use crate::seed::rng_from_seed;

pub use group::{
    assign_group, assign_group_with, GroupEdges, RemovalBin, ShiftBin, TestGroupLabel, GROUP_COUNT,
};
pub use shift::{sample_shift, ShiftDistribution, REFERENCE_SHIFT_ANCHORS, REFERENCE_SHIFT_MEAN_M};

#[derive(Debug, Error, PartialEq)]
pub enum CorruptionError {
    #[error("invalid corruption parameters: {0}")]
    InvalidParams(String),
    #[error("unsupported severity level {0} (expected 1, 1.5 or 2)")]
    UnsupportedLevel(String),
    #[error("invalid shift distribution: {0}")]
    BadDistribution(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorruptionMode {
    #[default]
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorruptionParams {
    pub keep_probability: f64,
    pub shift_scale: f64,
    pub simplify_probability: f64,
    #[serde(default)]
    pub mode: CorruptionMode,
    #[serde(default)]
    pub shift_distribution: ShiftDistribution,
}

impl Default for CorruptionParams {
    fn default() -> Self {
        Severity::L1.params()
    }
}

impl CorruptionParams {
    pub fn with_mode(mut self, mode: CorruptionMode) -> Self {
        self.mode = mode;
        self
    }

    /// Probabilities in [0, 1]; the shift scale is finite and non-negative
    /// (zero disables shifting).
    pub fn validate(&self) -> Result<(), CorruptionError> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if !prob(self.keep_probability) || !prob(self.simplify_probability) {
            return Err(CorruptionError::InvalidParams(
                "probabilities must lie in [0, 1]".into(),
            ));
        }
        if !(self.shift_scale.is_finite() && self.shift_scale >= 0.0) {
            return Err(CorruptionError::InvalidParams(format!(
                "shift_scale must be finite and >= 0, got {}",
                self.shift_scale
            )));
        }
        Ok(())
    }
}

/// Training severity level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Severity {
    L1,
    L1_5,
    L2,
}

impl Severity {
    pub fn factor(self) -> f64 {
        match self {
            Severity::L1 => 1.0,
            Severity::L1_5 => 1.5,
            Severity::L2 => 2.0,
        }
    }

    /// Keep probability 0.43 divided by the factor; shift and simplification
    /// scaled up by it. Mode is train.
    pub fn params(self) -> CorruptionParams {
        let f = self.factor();
        CorruptionParams {
            keep_probability: 0.43 / f,
            shift_scale: f,
            simplify_probability: 0.25 * f,
            mode: CorruptionMode::Train,
            shift_distribution: ShiftDistribution::reference(),
        }
    }
}

impl FromStr for Severity {
    type Err = CorruptionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "1" | "1.0" => Ok(Severity::L1),
            "1.5" => Ok(Severity::L1_5),
            "2" | "2.0" => Ok(Severity::L2),
            other => Err(CorruptionError::UnsupportedLevel(other.to_string())),
        }
    }
}

/// Parameters for a numeric severity level; only 1, 1.5 and 2 exist.
pub fn severity_params(level: f64) -> Result<CorruptionParams, CorruptionError> {
    let sev = if level == 1.0 {
        Severity::L1
    } else if level == 1.5 {
        Severity::L1_5
    } else if level == 2.0 {
        Severity::L2
    } else {
        return Err(CorruptionError::UnsupportedLevel(level.to_string()));
    };
    Ok(sev.params())
}

/// What one corruption run did to an environment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorruptionRecord {
    /// Test mode: the shared shift magnitude. Train mode: mean over survivors (0 if none).
    pub shift_s: f64,
    /// Removed / total buildings; 0 for an environment without buildings.
    pub removal_fraction: f64,
    /// Test mode: whole-environment flag. Train mode: any survivor simplified.
    pub simplified: bool,
}

/// Corrupts the buildings of `env`. Deterministic in `seed`.
///
/// Draw order: one removal draw per building; then per survivor a shift
/// magnitude (train only) and direction, with the shared magnitude drawn
/// first in test mode; then simplification draws, per survivor in train
/// mode and a single one in test mode.
pub fn corrupt(
    env: &Environment,
    params: &CorruptionParams,
    seed: u64,
) -> Result<(Vec<Polygon>, CorruptionRecord), CorruptionError> {
    corrupt_buildings(&env.buildings, params, seed)
}

pub fn corrupt_buildings(
    buildings: &[Polygon],
    params: &CorruptionParams,
    seed: u64,
) -> Result<(Vec<Polygon>, CorruptionRecord), CorruptionError> {
    params.validate()?;
    let mut rng = rng_from_seed(seed);
    let dist = &params.shift_distribution;
    let survivors: Vec<&Polygon> = buildings
        .iter()
        .filter(|_| rng.random::<f64>() < params.keep_probability)
        .collect();
    let removal_fraction = if buildings.is_empty() {
        0.0
    } else {
        (buildings.len() - survivors.len()) as f64 / buildings.len() as f64
    };

    let shared = match params.mode {
        CorruptionMode::Test => Some(sample_shift(rng.random(), dist, params.shift_scale)),
        CorruptionMode::Train => None,
    };
    let mut total_shift = 0.0;
    let mut shifted: Vec<Polygon> = survivors
        .iter()
        .map(|poly| {
            let s = shared.unwrap_or_else(|| sample_shift(rng.random(), dist, params.shift_scale));
            let theta = rng.random_range(0.0..TAU);
            total_shift += s;
            poly.translated(Point::new(s * theta.cos(), s * theta.sin()))
        })
        .collect();

    let hull = |p: &Polygon| convex_hull(p).expect("validated polygons have a proper hull");
    let simplified = match params.mode {
        CorruptionMode::Test => {
            let all = rng.random::<f64>() < params.simplify_probability;
            if all {
                shifted = shifted.iter().map(hull).collect();
            }
            all
        }
        CorruptionMode::Train => {
            let mut any = false;
            for p in shifted.iter_mut() {
                if rng.random::<f64>() < params.simplify_probability {
                    *p = hull(p);
                    any = true;
                }
            }
            any
        }
    };

    let shift_s = match shared {
        Some(s) => s,
        None if survivors.is_empty() => 0.0,
        None => total_shift / survivors.len() as f64,
    };
    Ok((
        shifted,
        CorruptionRecord {
            shift_s,
            removal_fraction,
            simplified,
        },
    ))
}

/// Contents of `corrupted.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorruptedDocument {
    pub env_id: String,
    pub side_length: f64,
    pub buildings: Vec<Polygon>,
    pub record: CorruptionRecord,
    /// Present for test-mode corruption.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<TestGroupLabel>,
}

impl CorruptedDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("corrupted document serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn square(x: f64, y: f64) -> Polygon {
        Polygon::rectangle(Point::new(x, y), Point::new(x + 5.0, y + 5.0)).unwrap()
    }

    fn ell(x: f64, y: f64) -> Polygon {
        let p = |a: f64, b: f64| Point::new(x + a, y + b);
        Polygon::new(vec![
            p(0.0, 0.0),
            p(6.0, 0.0),
            p(6.0, 2.0),
            p(2.0, 2.0),
            p(2.0, 6.0),
            p(0.0, 6.0),
        ])
        .unwrap()
    }

    fn town(n: usize) -> Vec<Polygon> {
        (0..n)
            .map(|i| {
                if i % 2 == 0 {
                    square(10.0 * i as f64, 20.0)
                } else {
                    ell(10.0 * i as f64, 50.0)
                }
            })
            .collect()
    }

    fn params(keep: f64, scale: f64, simplify: f64, mode: CorruptionMode) -> CorruptionParams {
        CorruptionParams {
            keep_probability: keep,
            shift_scale: scale,
            simplify_probability: simplify,
            mode,
            shift_distribution: ShiftDistribution::reference(),
        }
    }

    #[test]
    fn severity_levels() {
        let p = severity_params(1.0).unwrap();
        assert_eq!(
            (p.keep_probability, p.shift_scale, p.simplify_probability),
            (0.43, 1.0, 0.25)
        );
        let p = severity_params(1.5).unwrap();
        assert_eq!(
            (p.keep_probability, p.shift_scale, p.simplify_probability),
            (0.43 / 1.5, 1.5, 0.375)
        );
        assert!((p.keep_probability - 0.287).abs() < 1e-3);
        let p = severity_params(2.0).unwrap();
        assert_eq!(
            (p.keep_probability, p.shift_scale, p.simplify_probability),
            (0.215, 2.0, 0.50)
        );
        assert!(matches!(
            severity_params(3.0),
            Err(CorruptionError::UnsupportedLevel(_))
        ));
        assert!("1.25".parse::<Severity>().is_err());
        assert_eq!("1.5".parse::<Severity>().unwrap(), Severity::L1_5);
    }

    #[test]
    fn identity_corruption() {
        let b = town(6);
        for mode in [CorruptionMode::Train, CorruptionMode::Test] {
            let (out, rec) = corrupt_buildings(&b, &params(1.0, 0.0, 0.0, mode), 5).unwrap();
            assert_eq!(out, b);
            assert_eq!(rec.removal_fraction, 0.0);
            assert_eq!(rec.shift_s, 0.0);
            assert!(!rec.simplified);
        }
    }

    #[test]
    fn remove_everything_and_empty_input() {
        let (out, rec) =
            corrupt_buildings(&town(4), &params(0.0, 1.0, 0.5, CorruptionMode::Train), 1).unwrap();
        assert!(out.is_empty());
        assert_eq!(rec.removal_fraction, 1.0);
        let (out, rec) =
            corrupt_buildings(&[], &params(0.5, 1.0, 0.5, CorruptionMode::Test), 1).unwrap();
        assert!(out.is_empty());
        assert_eq!(rec.removal_fraction, 0.0);
    }

    #[test]
    fn test_mode_simplification_is_all_or_none() {
        let b: Vec<Polygon> = (0..8).map(|i| ell(10.0 * i as f64, 10.0)).collect();
        let mut seen = [false; 2];
        for seed in 0..40 {
            let (out, rec) =
                corrupt_buildings(&b, &params(1.0, 0.0, 0.5, CorruptionMode::Test), seed).unwrap();
            let hulled = out.iter().filter(|p| p.vertices().len() == 5).count();
            assert!(hulled == 0 || hulled == out.len());
            assert_eq!(rec.simplified, hulled == out.len());
            seen[rec.simplified as usize] = true;
        }
        assert_eq!(seen, [true, true]);
    }

    #[test]
    fn train_mode_simplifies_per_building() {
        let b: Vec<Polygon> = (0..200).map(|i| ell(i as f64, 10.0)).collect();
        let (out, rec) =
            corrupt_buildings(&b, &params(1.0, 0.0, 0.25, CorruptionMode::Train), 9).unwrap();
        let hulled = out.iter().filter(|p| p.vertices().len() == 5).count();
        assert!(rec.simplified);
        assert!((30..=70).contains(&hulled), "{hulled}");
    }

    #[test]
    fn invalid_params_rejected() {
        let b = town(2);
        assert!(corrupt_buildings(&b, &params(1.2, 1.0, 0.0, CorruptionMode::Train), 0).is_err());
        assert!(corrupt_buildings(&b, &params(0.5, -1.0, 0.0, CorruptionMode::Train), 0).is_err());
        assert!(
            corrupt_buildings(&b, &params(0.5, f64::NAN, 0.0, CorruptionMode::Train), 0).is_err()
        );
    }

    #[test]
    fn document_roundtrip() {
        let (buildings, record) =
            corrupt_buildings(&town(5), &params(0.6, 1.0, 0.3, CorruptionMode::Test), 2).unwrap();
        let doc = CorruptedDocument {
            env_id: "e".into(),
            side_length: 100.0,
            buildings,
            group: Some(assign_group(&record)),
            record,
        };
        let back: CorruptedDocument = serde_json::from_str(&doc.to_json()).unwrap();
        assert_eq!(back, doc);
    }

    proptest! {
        #[test]
        fn test_mode_shift_is_one_translation_of_magnitude_s(seed in any::<u64>(), n in 1usize..12) {
            let b = town(n);
            let (out, rec) = corrupt_buildings(&b, &params(1.0, 1.0, 0.0, CorruptionMode::Test), seed).unwrap();
            prop_assert_eq!(out.len(), b.len());
            for (orig, moved) in b.iter().zip(&out) {
                let t = moved.vertices()[0].sub(orig.vertices()[0]);
                prop_assert!((t.norm() - rec.shift_s).abs() < 1e-9);
                for (p, q) in orig.vertices().iter().zip(moved.vertices()) {
                    prop_assert!(q.sub(*p).sub(t).norm() < 1e-9);
                }
            }
        }

        #[test]
        fn never_adds_buildings_and_is_deterministic(
            seed in any::<u64>(), n in 0usize..15, keep in 0.0f64..=1.0, simp in 0.0f64..=1.0, test in any::<bool>(),
        ) {
            let mode = if test { CorruptionMode::Test } else { CorruptionMode::Train };
            let p = params(keep, 2.0, simp, mode);
            let b = town(n);
            let first = corrupt_buildings(&b, &p, seed).unwrap();
            prop_assert!(first.0.len() <= b.len());
            prop_assert!((0.0..=1.0).contains(&first.1.removal_fraction));
            prop_assert_eq!(&first, &corrupt_buildings(&b, &p, seed).unwrap());
        }
    }
}
