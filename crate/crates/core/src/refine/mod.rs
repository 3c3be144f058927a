//! Non-learning map refinement: LOS/NLOS classification from path loss
//! and violation-driven building insertion.

mod algorithm;
mod classify;

use thiserror::Error;

pub use algorithm::{
    analyze_violations, create_random_building, refine_map, PairSequence, RefinementConfig,
    RefinementOutcome, RefinementSummary, Stamp, StopReason, Violations,
};
pub use classify::{classify_pair, delta, fit_curve, CurveSet, FitMode, LogBase, LosCurve};

#[derive(Debug, Error, PartialEq)]
pub enum RefineError {
    #[error("curve fit failed: {0}")]
    Fit(String),
    #[error("invalid refinement config: {0}")]
    Config(String),
}
