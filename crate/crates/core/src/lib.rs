//! Building-map refinement from RF observations.
//!
//! The crate covers the whole non-learning pipeline: synthetic urban
//! environments, OSM-style map corruption, RF path and path-loss synthesis,
//! LOS/NLOS classification with violation-driven map refinement, and
//! mask metrics (IoU, Dice, Hausdorff, Chamfer) with grouped reports.

pub mod corruption;
pub mod environment;
pub mod geometry;
pub mod metrics;
pub mod pipeline;
pub mod refine;
pub mod rfsim;
pub mod seed;
