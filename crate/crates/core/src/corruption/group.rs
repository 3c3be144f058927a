use std::fmt;

use serde::{Deserialize, Serialize};

use super::{CorruptionError, CorruptionRecord};

/// Bin edges for grouped test evaluation.
///
/// Shift bins are left-closed (`s < a`, `a <= s < b`, `s >= b`); removal
/// bins are right-closed (`r <= q1`, `q1 < r <= q2`, ...).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupEdges {
    pub shift_m: [f64; 2],
    pub removal: [f64; 3],
}

impl Default for GroupEdges {
    // 0.6931 is a bin edge that happens to sit near ln 2.
    #[allow(clippy::approx_constant)]
    fn default() -> Self {
        Self {
            shift_m: [1.46, 4.20],
            removal: [0.4615, 0.5714, 0.6931],
        }
    }
}

impl GroupEdges {
    pub fn validate(&self) -> Result<(), CorruptionError> {
        let increasing =
            |v: &[f64]| v.iter().all(|x| x.is_finite()) && v.windows(2).all(|w| w[0] < w[1]);
        if !increasing(&self.shift_m) || !increasing(&self.removal) {
            return Err(CorruptionError::InvalidParams(
                "group edges must be finite and increasing".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftBin {
    Low,
    Mid,
    High,
}

/// Removal-rate quartile bin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RemovalBin {
    Q1,
    Q2,
    Q3,
    Q4,
}

/// One of the 3 x 4 x 2 test groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TestGroupLabel {
    pub shift_bin: ShiftBin,
    pub removal_bin: RemovalBin,
    pub simplified: bool,
}

pub const GROUP_COUNT: usize = 24;

impl TestGroupLabel {
    /// Dense index in `0..24`, shift-major.
    pub fn index(&self) -> usize {
        self.shift_bin as usize * 8 + self.removal_bin as usize * 2 + self.simplified as usize
    }

    /// All 24 labels in [`index`](Self::index) order.
    pub fn all() -> Vec<TestGroupLabel> {
        let shifts = [ShiftBin::Low, ShiftBin::Mid, ShiftBin::High];
        let removals = [
            RemovalBin::Q1,
            RemovalBin::Q2,
            RemovalBin::Q3,
            RemovalBin::Q4,
        ];
        let mut out = Vec::with_capacity(GROUP_COUNT);
        for shift_bin in shifts {
            for removal_bin in removals {
                for simplified in [false, true] {
                    out.push(TestGroupLabel {
                        shift_bin,
                        removal_bin,
                        simplified,
                    });
                }
            }
        }
        out
    }

    /// Human-readable bin ranges, e.g. `1.46<=s<4.2, 46.15%<r<=57.14%, no`.
    pub fn describe(&self, edges: &GroupEdges) -> String {
        let [a, b] = edges.shift_m;
        let s = match self.shift_bin {
            ShiftBin::Low => format!("s<{a}"),
            ShiftBin::Mid => format!("{a}<=s<{b}"),
            ShiftBin::High => format!("s>={b}"),
        };
        let pct = |x: f64| format!("{}%", (x * 1e4).round() / 1e2);
        let q = edges.removal;
        let r = match self.removal_bin {
            RemovalBin::Q1 => format!("r<={}", pct(q[0])),
            RemovalBin::Q2 => format!("{}<r<={}", pct(q[0]), pct(q[1])),
            RemovalBin::Q3 => format!("{}<r<={}", pct(q[1]), pct(q[2])),
            RemovalBin::Q4 => format!("r>{}", pct(q[2])),
        };
        format!("{s}, {r}, {}", if self.simplified { "yes" } else { "no" })
    }
}

impl fmt::Display for TestGroupLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.describe(&GroupEdges::default()))
    }
}

/// Bins a test-mode record with the default edges.
pub fn assign_group(record: &CorruptionRecord) -> TestGroupLabel {
    assign_group_with(record, &GroupEdges::default())
}

pub fn assign_group_with(record: &CorruptionRecord, edges: &GroupEdges) -> TestGroupLabel {
    let s = record.shift_s;
    let shift_bin = if s < edges.shift_m[0] {
        ShiftBin::Low
    } else if s < edges.shift_m[1] {
        ShiftBin::Mid
    } else {
        ShiftBin::High
    };
    let r = record.removal_fraction;
    let q = edges.removal;
    let removal_bin = if r <= q[0] {
        RemovalBin::Q1
    } else if r <= q[1] {
        RemovalBin::Q2
    } else if r <= q[2] {
        RemovalBin::Q3
    } else {
        RemovalBin::Q4
    };
    TestGroupLabel {
        shift_bin,
        removal_bin,
        simplified: record.simplified,
    }
}
