use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{PathRecord, RfError};

/// Carrier frequencies of the five path-loss bands, GHz.
pub const BANDS_GHZ: [f64; 5] = [2.6, 6.0, 28.0, 60.0, 100.0];

/// Free-space path loss in dB for `distance_m` meters at `freq_hz`.
pub fn fspl_db(distance_m: f64, freq_hz: f64) -> f64 {
    20.0 * distance_m.log10() + 20.0 * freq_hz.log10() - 147.55
}

/// Constants of the synthetic loss model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropagationModel {
    /// Extra loss per wall bounce, dB.
    pub reflection_loss_db: f64,
    /// Extra loss per band when the direct line is occluded, dB.
    pub diffraction_penalty_db: [f64; 5],
}

impl Default for PropagationModel {
    fn default() -> Self {
        Self {
            reflection_loss_db: 10.0,
            diffraction_penalty_db: [15.0; 5],
        }
    }
}

impl PropagationModel {
    /// Aggregate loss for band `band` from the traced paths.
    ///
    /// The direct path, when present, gives plain FSPL. Otherwise the
    /// shortest reflected path is used with per-bounce and occlusion
    /// penalties. No path at all gives infinite loss.
    pub fn loss_from_paths(&self, paths: &[PathRecord], band: usize) -> f64 {
        let freq_hz = BANDS_GHZ[band] * 1e9;
        let shortest = |direct: bool| {
            paths
                .iter()
                .filter(|p| (p.bounces() == 0) == direct)
                .min_by(|a, b| a.toa.total_cmp(&b.toa))
        };
        if let Some(p) = shortest(true) {
            return fspl_db(p.length(), freq_hz);
        }
        match shortest(false) {
            Some(p) => {
                fspl_db(p.length(), freq_hz)
                    + self.reflection_loss_db * p.bounces() as f64
                    + self.diffraction_penalty_db[band]
            }
            None => f64::INFINITY,
        }
    }

    pub fn table_from_paths(&self, paths: &[PathRecord]) -> PathLossTable {
        PathLossTable {
            loss_db: std::array::from_fn(|band| self.loss_from_paths(paths, band)),
        }
    }
}

/// Path loss per band, positive dB; infinite when no path exists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossTable {
    pub loss_db: [f64; 5],
}

impl PathLossTable {
    pub fn new(loss_db: [f64; 5]) -> Result<Self, RfError> {
        if loss_db.iter().any(|v| v.is_nan() || *v < 0.0) {
            return Err(RfError::InvalidLoss);
        }
        Ok(Self { loss_db })
    }
}

// JSON has no infinity: infinite losses are written as null.
impl Serialize for PathLossTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<Option<f64>> = self
            .loss_db
            .iter()
            .map(|&x| x.is_finite().then_some(x))
            .collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PathLossTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: [Option<f64>; 5] = Deserialize::deserialize(d)?;
        PathLossTable::new(v.map(|x| x.unwrap_or(f64::INFINITY))).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rfsim::{PathKind, SPEED_OF_LIGHT};

    fn direct(len: f64) -> PathRecord {
        PathRecord {
            aoa: 0.0,
            aod: 0.0,
            toa: len / SPEED_OF_LIGHT,
            kind: PathKind::Direct,
        }
    }

    #[test]
    fn fspl_reference_values() {
        assert!((fspl_db(1.0, 1e9) - 32.45).abs() < 1e-9);
        assert!((fspl_db(200.0, 28e9) - fspl_db(100.0, 28e9) - 20.0 * 2f64.log10()).abs() < 1e-9);
        assert!((20.0 * 2f64.log10() - 6.0206).abs() < 1e-4);
    }

    #[test]
    fn occluded_pair_pays_bounce_and_diffraction() {
        let m = PropagationModel::default();
        let refl = PathRecord {
            kind: PathKind::Reflected,
            ..direct(50.0)
        };
        let l = m.loss_from_paths(&[refl], 0);
        assert!((l - (fspl_db(50.0, 2.6e9) + 25.0)).abs() < 1e-9);
        assert_eq!(m.loss_from_paths(&[], 3), f64::INFINITY);
        // The direct path wins over a shorter-looking reflected one.
        assert!((m.loss_from_paths(&[direct(80.0), refl], 2) - fspl_db(80.0, 28e9)).abs() < 1e-9);
    }

    #[test]
    fn infinite_losses_roundtrip_as_null() {
        let t = PathLossTable::new([90.0, f64::INFINITY, 100.0, 110.0, 120.0]).unwrap();
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, "[90.0,null,100.0,110.0,120.0]");
        let back: PathLossTable = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
        assert!(PathLossTable::new([-1.0; 5]).is_err());
    }
}
