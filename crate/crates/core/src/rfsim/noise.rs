use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::PathRecord;
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Carrier {
    #[serde(rename = "28ghz")]
    Ghz28,
    #[serde(rename = "73ghz")]
    Ghz73,
}

/// Angle measurement noise for one carrier frequency, in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseProfile {
    pub carrier: Carrier,
    pub sigma_aod_deg: f64,
    pub sigma_aoa_deg: f64,
}

impl NoiseProfile {
    pub fn for_carrier(carrier: Carrier) -> Self {
        let (sigma_aod_deg, sigma_aoa_deg) = match carrier {
            Carrier::Ghz28 => (8.5, 10.5),
            Carrier::Ghz73 => (5.5, 8.5),
        };
        Self {
            carrier,
            sigma_aod_deg,
            sigma_aoa_deg,
        }
    }
}

/// Wraps an angle into [-pi, pi).
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    (a + PI).rem_euclid(TAU) - PI
}

/// Adds independent Gaussian noise to every AoA and AoD; ToA is untouched.
///
/// Draws alternate AoA, AoD per record in order, so the output is a pure
/// function of `(records, profile, seed)`.
pub fn add_angle_noise(
    records: &[PathRecord],
    profile: &NoiseProfile,
    seed: u64,
) -> Vec<PathRecord> {
    let mut rng = rng_from_seed(seed);
    let aoa = Normal::new(0.0, profile.sigma_aoa_deg.to_radians()).expect("finite sigma");
    let aod = Normal::new(0.0, profile.sigma_aod_deg.to_radians()).expect("finite sigma");
    records
        .iter()
        .map(|r| {
            let mut out = *r;
            let (da, dd) = (aoa.sample(&mut rng), aod.sample(&mut rng));
            if profile.sigma_aoa_deg > 0.0 {
                out.aoa = wrap_angle(r.aoa + da);
            }
            if profile.sigma_aod_deg > 0.0 {
                out.aod = wrap_angle(r.aod + dd);
            }
            out
        })
        .collect()
}
