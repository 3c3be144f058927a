use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Environment, EnvironmentError, BS_COUNT, UE_COUNT};
use crate::geometry::{Point, Polygon};
use crate::seed::rng_from_seed;

/// Closed interval `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range<T> {
    pub min: T,
    pub max: T,
}

impl<T> Range<T> {
    pub const fn new(min: T, max: T) -> Self {
        Self { min, max }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeneratorConfig {
    pub building_count: Range<usize>,
    /// Rectangle width and height, meters.
    pub footprint_size: Range<f64>,
    pub side_length: Range<f64>,
    /// Uniform per-vertex jitter amplitude in meters (0 keeps exact rectangles).
    pub vertex_jitter: f64,
    /// Minimum distance from any BS/UE to a building boundary, meters.
    pub point_clearance: f64,
    pub max_attempts: usize,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            building_count: Range::new(4, 14),
            footprint_size: Range::new(8.0, 60.0),
            side_length: Range::new(120.0, 400.0),
            vertex_jitter: 0.0,
            point_clearance: 2.0,
            max_attempts: 10_000,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), EnvironmentError> {
        let bad = |m: &str| Err(EnvironmentError::Config(m.to_string()));
        if self.building_count.min > self.building_count.max {
            return bad("building_count range is empty");
        }
        let f = self.footprint_size;
        if !(f.min > 0.0 && f.min <= f.max && f.max.is_finite()) {
            return bad("footprint_size must be a non-empty positive range");
        }
        let s = self.side_length;
        if !(s.min > 0.0 && s.min <= s.max && s.max.is_finite()) {
            return bad("side_length must be a non-empty positive range");
        }
        if !(0.0..f.min / 4.0).contains(&self.vertex_jitter) {
            return bad("vertex_jitter must be in [0, footprint_size.min / 4)");
        }
        if !(self.point_clearance >= 0.0 && self.point_clearance.is_finite()) {
            return bad("point_clearance must be non-negative");
        }
        if self.max_attempts == 0 {
            return bad("max_attempts must be positive");
        }
        Ok(())
    }
}

fn uniform<R: Rng>(rng: &mut R, r: Range<f64>) -> f64 {
    if r.min == r.max {
        r.min
    } else {
        rng.random_range(r.min..=r.max)
    }
}

/// Generates an environment as a pure function of `cfg` (seed included).
///
/// Buildings are axis-aligned rectangles placed fully inside the frame and
/// may overlap. Base stations, then user equipments, are rejection-sampled
/// until they keep `point_clearance` from every building.
pub fn generate_environment(cfg: &GeneratorConfig) -> Result<Environment, EnvironmentError> {
    cfg.validate()?;
    let mut rng = rng_from_seed(cfg.seed);
    let side = uniform(&mut rng, cfg.side_length);
    let count = rng.random_range(cfg.building_count.min..=cfg.building_count.max);

    let mut buildings = Vec::with_capacity(count);
    for _ in 0..count {
        let w = uniform(&mut rng, cfg.footprint_size).min(side * 0.9);
        let h = uniform(&mut rng, cfg.footprint_size).min(side * 0.9);
        let x0 = rng.random_range(0.0..=(side - w));
        let y0 = rng.random_range(0.0..=(side - h));
        let mut corners = [
            Point::new(x0, y0),
            Point::new(x0 + w, y0),
            Point::new(x0 + w, y0 + h),
            Point::new(x0, y0 + h),
        ];
        if cfg.vertex_jitter > 0.0 {
            let j = cfg.vertex_jitter;
            for c in &mut corners {
                c.x = (c.x + rng.random_range(-j..=j)).clamp(0.0, side);
                c.y = (c.y + rng.random_range(-j..=j)).clamp(0.0, side);
            }
        }
        buildings.push(Polygon::new(corners.to_vec())?);
    }

    let mut place = |what: &'static str, n: usize| -> Result<Vec<Point>, EnvironmentError> {
        let mut pts = Vec::with_capacity(n);
        for _ in 0..n {
            let mut placed = None;
            for _ in 0..cfg.max_attempts {
                let p = Point::new(rng.random_range(0.0..=side), rng.random_range(0.0..=side));
                let clear = buildings
                    .iter()
                    .all(|b| !b.contains(p) && b.boundary_distance(p) >= cfg.point_clearance);
                if clear {
                    placed = Some(p);
                    break;
                }
            }
            pts.push(placed.ok_or(EnvironmentError::Crowded {
                what,
                attempts: cfg.max_attempts,
            })?);
        }
        Ok(pts)
    };
    let bs = place("base station", BS_COUNT)?;
    let ue = place("user equipment", UE_COUNT)?;

    Ok(Environment {
        id: format!("synthetic-{:016x}", cfg.seed),
        side_length: side,
        buildings,
        bs,
        ue,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_environment() {
        let cfg = GeneratorConfig::default();
        let a = generate_environment(&cfg).unwrap();
        let b = generate_environment(&cfg).unwrap();
        assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn different_seeds_differ() {
        let a = generate_environment(&GeneratorConfig::default()).unwrap();
        let b = generate_environment(&GeneratorConfig {
            seed: 1,
            ..Default::default()
        })
        .unwrap();
        assert_ne!(
            serde_json::to_string(&a.buildings).unwrap(),
            serde_json::to_string(&b.buildings).unwrap()
        );
    }

    #[test]
    fn zero_buildings_places_everything() {
        let env = generate_environment(&GeneratorConfig {
            building_count: Range::new(0, 0),
            ..Default::default()
        })
        .unwrap();
        assert!(env.buildings.is_empty());
        env.validate().unwrap();
    }

    #[test]
    fn generated_environments_validate() {
        for seed in 0..50 {
            let env = generate_environment(&GeneratorConfig {
                seed,
                vertex_jitter: if seed % 2 == 0 { 0.0 } else { 1.5 },
                ..Default::default()
            })
            .unwrap();
            env.validate().unwrap();
            let n = env.buildings.len();
            assert!((4..=14).contains(&n));
            assert!((120.0..=400.0).contains(&env.side_length));
        }
    }

    #[test]
    fn crowded_frame_is_an_error() {
        let cfg = GeneratorConfig {
            building_count: Range::new(1, 1),
            footprint_size: Range::new(1000.0, 1000.0),
            side_length: Range::new(100.0, 100.0),
            point_clearance: 50.0,
            max_attempts: 100,
            ..Default::default()
        };
        assert!(matches!(
            generate_environment(&cfg),
            Err(EnvironmentError::Crowded { .. })
        ));
    }

    #[test]
    fn bad_ranges_are_rejected() {
        let cfg = GeneratorConfig {
            building_count: Range::new(5, 2),
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(EnvironmentError::Config(_))));
    }
}
