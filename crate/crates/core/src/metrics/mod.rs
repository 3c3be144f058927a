//! Mask metrics: IoU, Dice loss, Hausdorff and Chamfer distances over
//! raster boundaries, and macro/micro aggregation.

mod distance;
mod report;

use thiserror::Error;

use crate::geometry::BinaryMap;

pub use distance::BoundaryPointSet;
pub use report::{
    aggregate, evaluate_sample, markdown_table, write_samples_csv, EvalReport, GroupRow,
    SampleMetrics, TableRow,
};

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("map dimensions differ: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("cannot aggregate zero samples")]
    EmptyInput,
}

fn check(a: &BinaryMap, b: &BinaryMap) -> Result<(), MetricsError> {
    if a.same_shape(b) {
        Ok(())
    } else {
        Err(MetricsError::DimensionMismatch(
            a.width(),
            a.height(),
            b.width(),
            b.height(),
        ))
    }
}

/// Cell counts of two maps and their overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Overlap {
    pub intersection: usize,
    pub union: usize,
    pub count_a: usize,
    pub count_b: usize,
}

pub fn overlap(a: &BinaryMap, b: &BinaryMap) -> Result<Overlap, MetricsError> {
    check(a, b)?;
    let mut o = Overlap::default();
    for (&x, &y) in a.cells().iter().zip(b.cells()) {
        o.intersection += (x && y) as usize;
        o.union += (x || y) as usize;
        o.count_a += x as usize;
        o.count_b += y as usize;
    }
    Ok(o)
}

impl Overlap {
    /// 1 when both maps are empty.
    pub fn iou(&self) -> f64 {
        if self.union == 0 {
            1.0
        } else {
            self.intersection as f64 / self.union as f64
        }
    }

    /// 0 when both maps are empty.
    pub fn dice_loss(&self) -> f64 {
        let total = self.count_a + self.count_b;
        if total == 0 {
            0.0
        } else {
            1.0 - 2.0 * self.intersection as f64 / total as f64
        }
    }
}

pub fn iou(a: &BinaryMap, b: &BinaryMap) -> Result<f64, MetricsError> {
    Ok(overlap(a, b)?.iou())
}

pub fn dice_loss(a: &BinaryMap, b: &BinaryMap) -> Result<f64, MetricsError> {
    Ok(overlap(a, b)?.dice_loss())
}

/// Directed and symmetric boundary distances between two maps, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryDistances {
    pub hausdorff_ab: f64,
    pub hausdorff_ba: f64,
    pub chamfer_ab: f64,
    pub chamfer_ba: f64,
}

impl BoundaryDistances {
    /// Max of the two directed values.
    pub fn hausdorff(&self) -> f64 {
        self.hausdorff_ab.max(self.hausdorff_ba)
    }

    /// Mean of the two directed values.
    pub fn chamfer(&self) -> f64 {
        0.5 * (self.chamfer_ab + self.chamfer_ba)
    }
}

/// `None` if either map has no foreground.
pub fn boundary_distances(
    a: &BinaryMap,
    b: &BinaryMap,
) -> Result<Option<BoundaryDistances>, MetricsError> {
    check(a, b)?;
    let (pa, pb) = (BoundaryPointSet::from_map(a), BoundaryPointSet::from_map(b));
    let mpp = a.meters_per_pixel();
    let (Some((h_ab, c_ab)), Some((h_ba, c_ba))) = (
        distance::directed(pa.pixels(), pb.pixels(), mpp),
        distance::directed(pb.pixels(), pa.pixels(), mpp),
    ) else {
        return Ok(None);
    };
    Ok(Some(BoundaryDistances {
        hausdorff_ab: h_ab,
        hausdorff_ba: h_ba,
        chamfer_ab: c_ab,
        chamfer_ba: c_ba,
    }))
}

pub fn directed_hausdorff(a: &BinaryMap, b: &BinaryMap) -> Result<Option<f64>, MetricsError> {
    Ok(boundary_distances(a, b)?.map(|d| d.hausdorff_ab))
}

pub fn hausdorff(a: &BinaryMap, b: &BinaryMap) -> Result<Option<f64>, MetricsError> {
    Ok(boundary_distances(a, b)?.map(|d| d.hausdorff()))
}

pub fn directed_chamfer(a: &BinaryMap, b: &BinaryMap) -> Result<Option<f64>, MetricsError> {
    Ok(boundary_distances(a, b)?.map(|d| d.chamfer_ab))
}

pub fn chamfer(a: &BinaryMap, b: &BinaryMap) -> Result<Option<f64>, MetricsError> {
    Ok(boundary_distances(a, b)?.map(|d| d.chamfer()))
}
