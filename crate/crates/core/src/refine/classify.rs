use serde::{Deserialize, Serialize};

use super::RefineError;
use crate::rfsim::{LosLabel, PathLossTable, BANDS_GHZ};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitMode {
    /// `y = a + log(x)`, slope pinned to 1.
    Literal,
    /// `y = a + b log(x)` by ordinary least squares.
    #[default]
    TwoParameter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogBase {
    #[default]
    Natural,
    Ten,
}

impl LogBase {
    pub fn log(self, x: f64) -> f64 {
        match self {
            LogBase::Natural => x.ln(),
            LogBase::Ten => x.log10(),
        }
    }
}

/// Expected LOS path loss versus distance for one band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LosCurve {
    pub band_ghz: f64,
    pub intercept: f64,
    /// Only set by the two-parameter fit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
    #[serde(default)]
    pub log_base: LogBase,
}

impl LosCurve {
    /// Expected loss in dB at distance `x` meters.
    pub fn predict(&self, x: f64) -> f64 {
        self.intercept + self.slope.unwrap_or(1.0) * self.log_base.log(x)
    }
}

/// LOS/NLOS threshold slack, dB, at distance `x` meters.
pub fn delta(x: f64) -> f64 {
    0.005 * x
}

/// Fits a curve to `(distance m, loss dB)` samples. Samples with a
/// non-finite loss or non-positive distance are skipped.
pub fn fit_curve(
    samples: &[(f64, f64)],
    band_ghz: f64,
    mode: FitMode,
    base: LogBase,
) -> Result<LosCurve, RefineError> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(x, y)| y.is_finite() && x.is_finite() && *x > 0.0)
        .map(|&(x, y)| (base.log(x), y))
        .collect();
    if pts.len() < 2 {
        return Err(RefineError::Fit(format!(
            "band {band_ghz} GHz: need at least 2 finite samples, got {}",
            pts.len()
        )));
    }
    let n = pts.len() as f64;
    let (intercept, slope) = match mode {
        FitMode::Literal => (pts.iter().map(|(lx, y)| y - lx).sum::<f64>() / n, None),
        FitMode::TwoParameter => {
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            if sxx <= 1e-12 * n {
                return Err(RefineError::Fit(format!(
                    "band {band_ghz} GHz: all distances are equal"
                )));
            }
            let b = sxy / sxx;
            (my - b * mx, Some(b))
        }
    };
    Ok(LosCurve {
        band_ghz,
        intercept,
        slope,
        log_base: base,
    })
}

/// One curve per path-loss band, in [`BANDS_GHZ`] order. Contents of `curves.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSet {
    pub mode: FitMode,
    pub curves: Vec<LosCurve>,
}

impl CurveSet {
    /// Fits all five bands from `(distance, table)` samples.
    pub fn fit(
        samples: &[(f64, PathLossTable)],
        mode: FitMode,
        base: LogBase,
    ) -> Result<Self, RefineError> {
        let curves = BANDS_GHZ
            .iter()
            .enumerate()
            .map(|(band, &ghz)| {
                let s: Vec<(f64, f64)> =
                    samples.iter().map(|(x, t)| (*x, t.loss_db[band])).collect();
                fit_curve(&s, ghz, mode, base)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { mode, curves })
    }

    pub fn validate(&self) -> Result<(), RefineError> {
        if self.curves.len() != BANDS_GHZ.len() {
            return Err(RefineError::Fit(format!(
                "expected 5 curves, got {}",
                self.curves.len()
            )));
        }
        Ok(())
    }
}

/// Per band, LOS iff the measured loss is below the curve plus `0.005 x`;
/// the label is the majority of the five votes. Infinite loss votes NLOS.
pub fn classify_pair(table: &PathLossTable, curves: &CurveSet, x: f64) -> LosLabel {
    let votes = table
        .loss_db
        .iter()
        .zip(&curves.curves)
        .filter(|(&measured, curve)| measured < curve.predict(x) + delta(x))
        .count();
    if 2 * votes > table.loss_db.len() {
        LosLabel::Los
    } else {
        LosLabel::Nlos
    }
}
