//! Urban environment model: building footprints plus base-station and
//! user-equipment positions in a square frame.

mod adapter;
mod generate;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, Point, Polygon};

pub use adapter::{DatasetAdapter, NativeAdapter, WairdAdapter};
pub use generate::{generate_environment, GeneratorConfig, Range};

/// Base stations per environment.
pub const BS_COUNT: usize = 5;
/// User equipments per environment.
pub const UE_COUNT: usize = 30;
/// UE-BS pairs per environment.
pub const PAIR_COUNT: usize = BS_COUNT * UE_COUNT;

#[derive(Debug, Error)]
pub enum EnvironmentError {
    #[error("failed to parse environment document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid environment: {0}")]
    Invalid(String),
    #[error("invalid generator config: {0}")]
    Config(String),
    #[error("could not place {what} after {attempts} attempts; frame too crowded")]
    Crowded { what: &'static str, attempts: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("unsupported dataset layout: {0}")]
    Unsupported(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Environment {
    pub id: String,
    /// Frame side length in meters; the frame is `[0, side_length]^2`.
    pub side_length: f64,
    pub buildings: Vec<Polygon>,
    pub bs: Vec<Point>,
    pub ue: Vec<Point>,
}

impl Environment {
    pub fn validate(&self) -> Result<(), EnvironmentError> {
        let bad = |msg: String| Err(EnvironmentError::Invalid(msg));
        if !(self.side_length.is_finite() && self.side_length > 0.0) {
            return bad(format!(
                "side_length must be positive, got {}",
                self.side_length
            ));
        }
        if self.bs.len() != BS_COUNT {
            return bad(format!(
                "expected {BS_COUNT} base stations, got {}",
                self.bs.len()
            ));
        }
        if self.ue.len() != UE_COUNT {
            return bad(format!(
                "expected {UE_COUNT} user equipments, got {}",
                self.ue.len()
            ));
        }
        for (kind, pts) in [("bs", &self.bs), ("ue", &self.ue)] {
            for (i, p) in pts.iter().enumerate() {
                if !self.in_frame(*p) {
                    return bad(format!(
                        "{kind}[{i}] at ({}, {}) is outside the frame",
                        p.x, p.y
                    ));
                }
                if let Some(b) = self
                    .buildings
                    .iter()
                    .position(|poly| poly.strictly_contains(*p))
                {
                    return bad(format!("{kind}[{i}] lies inside building {b}"));
                }
            }
        }
        Ok(())
    }

    pub fn in_frame(&self, p: Point) -> bool {
        p.is_finite()
            && (0.0..=self.side_length).contains(&p.x)
            && (0.0..=self.side_length).contains(&p.y)
    }

    /// `(ue_index, bs_index)` for every pair, in canonical pair order
    /// (pair index = `bs_index * UE_COUNT + ue_index`).
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.bs.len()).flat_map(move |b| (0..self.ue.len()).map(move |u| (u, b)))
    }

    /// Canonical JSON encoding (pretty-printed, trailing newline).
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("environment serializes");
        s.push('\n');
        s
    }

    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self, EnvironmentError> {
        let env: Environment = serde_json::from_str(text)?;
        env.validate()?;
        Ok(env)
    }
}
