use std::io::Write;

use serde::{Deserialize, Serialize};

use super::{boundary_distances, overlap, MetricsError};
use crate::corruption::{GroupEdges, TestGroupLabel};
use crate::geometry::BinaryMap;

/// Metrics of one prediction against its truth map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleMetrics {
    pub sample_id: String,
    pub iou: f64,
    pub intersection: usize,
    pub union: usize,
    /// Symmetric, meters; `None` when either map has no foreground.
    pub hausdorff: Option<f64>,
    pub chamfer: Option<f64>,
    pub group: Option<TestGroupLabel>,
}

pub fn evaluate_sample(
    sample_id: &str,
    pred: &BinaryMap,
    truth: &BinaryMap,
    group: Option<TestGroupLabel>,
) -> Result<SampleMetrics, MetricsError> {
    let o = overlap(pred, truth)?;
    let d = boundary_distances(pred, truth)?;
    Ok(SampleMetrics {
        sample_id: sample_id.to_string(),
        iou: o.iou(),
        intersection: o.intersection,
        union: o.union,
        hausdorff: d.map(|d| d.hausdorff()),
        chamfer: d.map(|d| d.chamfer()),
        group,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRow {
    pub group: TestGroupLabel,
    pub description: String,
    pub count: usize,
    pub macro_iou: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub samples: Vec<SampleMetrics>,
    pub macro_iou: f64,
    pub micro_iou: f64,
    pub mean_hausdorff: Option<f64>,
    pub mean_chamfer: Option<f64>,
    /// Samples left out of the distance means for lack of foreground.
    pub distance_exclusions: usize,
    /// All 24 bins in index order when any sample carries a group label.
    pub groups: Vec<GroupRow>,
}

fn mean(v: impl Iterator<Item = f64>) -> Option<f64> {
    let (n, s) = v.fold((0usize, 0.0), |(n, s), x| (n + 1, s + x));
    (n > 0).then(|| s / n as f64)
}

/// Macro IoU is the plain mean; micro IoU pools intersections and unions.
pub fn aggregate(
    samples: Vec<SampleMetrics>,
    edges: &GroupEdges,
) -> Result<EvalReport, MetricsError> {
    if samples.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let macro_iou = mean(samples.iter().map(|s| s.iou)).expect("nonempty");
    let (i, u) = samples.iter().fold((0usize, 0usize), |(i, u), s| {
        (i + s.intersection, u + s.union)
    });
    let micro_iou = if u == 0 { 1.0 } else { i as f64 / u as f64 };
    let mean_hausdorff = mean(samples.iter().filter_map(|s| s.hausdorff));
    let mean_chamfer = mean(samples.iter().filter_map(|s| s.chamfer));
    let distance_exclusions = samples.iter().filter(|s| s.hausdorff.is_none()).count();
    let groups = if samples.iter().any(|s| s.group.is_some()) {
        TestGroupLabel::all()
            .into_iter()
            .map(|g| {
                let members: Vec<f64> = samples
                    .iter()
                    .filter(|s| s.group == Some(g))
                    .map(|s| s.iou)
                    .collect();
                GroupRow {
                    group: g,
                    description: g.describe(edges),
                    count: members.len(),
                    macro_iou: mean(members.into_iter()),
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(EvalReport {
        samples,
        macro_iou,
        micro_iou,
        mean_hausdorff,
        mean_chamfer,
        distance_exclusions,
        groups,
    })
}

#[derive(Serialize)]
struct CsvRow<'a> {
    sample_id: &'a str,
    iou: f64,
    intersection: usize,
    union: usize,
    hausdorff_m: Option<f64>,
    chamfer_m: Option<f64>,
    group: Option<usize>,
}

/// Per-sample rows; empty cells for undefined distances or missing groups.
pub fn write_samples_csv<W: Write>(report: &EvalReport, out: W) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for s in &report.samples {
        w.serialize(CsvRow {
            sample_id: &s.sample_id,
            iou: s.iou,
            intersection: s.intersection,
            union: s.union,
            hausdorff_m: s.hausdorff,
            chamfer_m: s.chamfer,
            group: s.group.map(|g| g.index()),
        })?;
    }
    w.flush()?;
    Ok(())
}

/// One line of the summary table.
pub struct TableRow<'a> {
    pub method: &'a str,
    pub map: &'a str,
    pub rf: &'a str,
    pub report: &'a EvalReport,
}

fn meters(v: Option<f64>) -> String {
    v.map_or_else(|| "n/a".to_string(), |x| format!("{x:.2}"))
}

/// Markdown table with the columns Method, Map, RF, Macro IoU, Micro IoU, Hausdorff, Chamfer.
pub fn markdown_table(rows: &[TableRow<'_>]) -> String {
    let mut s =
        String::from("| Method | Map | RF | Macro IoU | Micro IoU | Hausdorff | Chamfer |\n");
    s.push_str("|---|---|---|---|---|---|---|\n");
    for r in rows {
        s.push_str(&format!(
            "| {} | {} | {} | {:.1}% | {:.1}% | {} | {} |\n",
            r.method,
            r.map,
            r.rf,
            100.0 * r.report.macro_iou,
            100.0 * r.report.micro_iou,
            meters(r.report.mean_hausdorff),
            meters(r.report.mean_chamfer),
        ));
    }
    s
}

impl EvalReport {
    /// Grouped macro IoU as a markdown table; empty when no sample is labeled.
    pub fn group_table_markdown(&self) -> String {
        if self.groups.is_empty() {
            return String::new();
        }
        let mut s = String::from("| Group | N | Macro IoU |\n|---|---|---|\n");
        for g in &self.groups {
            let v = g
                .macro_iou
                .map_or_else(|| "n/a".to_string(), |x| format!("{:.1}%", 100.0 * x));
            s.push_str(&format!("| {} | {} | {} |\n", g.description, g.count, v));
        }
        s
    }
}
