use serde::{Deserialize, Serialize};

use super::CorruptionError;

/// Building-shift distribution given as an inverse CDF through
/// `(percentile, meters)` anchors, linearly interpolated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct ShiftDistribution {
    anchors: Vec<(f64, f64)>,
}

/// Published percentiles of OSM building displacement, plus a (0, 0) lower anchor.
pub const REFERENCE_SHIFT_ANCHORS: [(f64, f64); 9] = [
    (0.0, 0.0),
    (0.20, 0.020),
    (0.40, 0.863),
    (0.60, 1.555),
    (0.80, 2.500),
    (0.85, 2.867),
    (0.90, 3.377),
    (0.95, 4.197),
    (1.00, 6.000),
];

/// Published mean of the shift distribution, meters.
pub const REFERENCE_SHIFT_MEAN_M: f64 = 1.460;

impl ShiftDistribution {
    pub fn new(anchors: Vec<(f64, f64)>) -> Result<Self, CorruptionError> {
        let bad = |msg: &str| Err(CorruptionError::BadDistribution(msg.to_string()));
        if anchors.len() < 2 {
            return bad("need at least two anchors");
        }
        if anchors
            .iter()
            .any(|(p, m)| !p.is_finite() || !m.is_finite())
        {
            return bad("anchors must be finite");
        }
        if anchors[0].0 != 0.0 || anchors[anchors.len() - 1].0 != 1.0 {
            return bad("percentiles must span [0, 1]");
        }
        if anchors
            .windows(2)
            .any(|w| w[1].0 <= w[0].0 || w[1].1 < w[0].1)
        {
            return bad("percentiles must increase strictly and meters must not decrease");
        }
        Ok(Self { anchors })
    }

    pub fn reference() -> Self {
        Self::new(REFERENCE_SHIFT_ANCHORS.to_vec()).expect("reference anchors are valid")
    }

    pub fn anchors(&self) -> &[(f64, f64)] {
        &self.anchors
    }

    /// Inverse CDF at `u`, clamped to [0, 1]. Exact at every anchor.
    pub fn quantile(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        let i = self.anchors.partition_point(|&(p, _)| p < u);
        let (p1, m1) = self.anchors[i];
        if p1 == u || i == 0 {
            return m1;
        }
        let (p0, m0) = self.anchors[i - 1];
        m0 + (u - p0) / (p1 - p0) * (m1 - m0)
    }

    /// Mean of the piecewise-linear distribution (trapezoids of the inverse CDF).
    pub fn mean(&self) -> f64 {
        self.anchors
            .windows(2)
            .map(|w| (w[1].0 - w[0].0) * 0.5 * (w[0].1 + w[1].1))
            .sum()
    }
}

impl Default for ShiftDistribution {
    fn default() -> Self {
        Self::reference()
    }
}

impl TryFrom<Vec<(f64, f64)>> for ShiftDistribution {
    type Error = CorruptionError;

    fn try_from(v: Vec<(f64, f64)>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<ShiftDistribution> for Vec<(f64, f64)> {
    fn from(d: ShiftDistribution) -> Self {
        d.anchors
    }
}

/// Shift magnitude in meters for the uniform draw `u`.
pub fn sample_shift(u: f64, dist: &ShiftDistribution, scale: f64) -> f64 {
    dist.quantile(u) * scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchor_values() {
        let d = ShiftDistribution::reference();
        assert_eq!(sample_shift(0.40, &d, 1.0), 0.863);
        assert_eq!(sample_shift(0.0, &d, 1.0), 0.0);
        assert_eq!(sample_shift(1.0, &d, 1.0), 6.0);
        assert!((sample_shift(0.50, &d, 1.0) - 1.209).abs() < 1e-12);
        assert!((sample_shift(0.50, &d, 2.0) - 2.418).abs() < 1e-12);
        for (p, m) in REFERENCE_SHIFT_ANCHORS {
            assert_eq!(d.quantile(p), m);
        }
    }

    #[test]
    fn mean_is_near_published() {
        // Trapezoid areas of the inverse CDF, segment by segment.
        let by_hand = 0.2 * 0.010
            + 0.2 * 0.4415
            + 0.2 * 1.209
            + 0.2 * 2.0275
            + 0.05 * 2.6835
            + 0.05 * 3.122
            + 0.05 * 3.787
            + 0.05 * 5.0985;
        let d = ShiftDistribution::reference();
        assert!((d.mean() - by_hand).abs() < 1e-12);
        assert!((d.mean() - REFERENCE_SHIFT_MEAN_M).abs() < 0.05);
    }

    #[test]
    fn rejects_bad_anchors() {
        assert!(ShiftDistribution::new(vec![(0.0, 0.0)]).is_err());
        assert!(
            ShiftDistribution::new(vec![(0.0, 0.0), (0.5, 1.0), (0.5, 2.0), (1.0, 3.0)]).is_err()
        );
        assert!(ShiftDistribution::new(vec![(0.0, 1.0), (1.0, 0.5)]).is_err());
        assert!(ShiftDistribution::new(vec![(0.1, 0.0), (1.0, 0.5)]).is_err());
        let json = serde_json::to_string(&ShiftDistribution::reference()).unwrap();
        let back: ShiftDistribution = serde_json::from_str(&json).unwrap();
        assert_eq!(back, ShiftDistribution::reference());
    }
}
