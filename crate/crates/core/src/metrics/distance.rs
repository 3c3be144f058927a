use crate::geometry::{BinaryMap, Pixel, Point};

/// Boundary cells of a map: foreground cells with a background 4-neighbour.
/// Cells outside the frame count as background.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryPointSet {
    pixels: Vec<Pixel>,
    meters_per_pixel: f64,
}

impl BoundaryPointSet {
    pub fn from_map(map: &BinaryMap) -> Self {
        let (w, h) = (map.width() as i64, map.height() as i64);
        let fg = |x: i64, y: i64| {
            x >= 0 && y >= 0 && x < w && y < h && map.get(Pixel::new(x as usize, y as usize))
        };
        let pixels = map
            .iter_ones()
            .filter(|p| {
                let (x, y) = (p.x as i64, p.y as i64);
                !(fg(x - 1, y) && fg(x + 1, y) && fg(x, y - 1) && fg(x, y + 1))
            })
            .collect();
        Self {
            pixels,
            meters_per_pixel: map.meters_per_pixel(),
        }
    }

    pub fn pixels(&self) -> &[Pixel] {
        &self.pixels
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// Cell centers in meters.
    pub fn points(&self) -> Vec<Point> {
        let m = self.meters_per_pixel;
        self.pixels
            .iter()
            .map(|p| Point::new((p.x as f64 + 0.5) * m, (p.y as f64 + 0.5) * m))
            .collect()
    }
}

const BUCKET: i64 = 8;

/// Exact nearest-neighbour lookup over integer cells, via uniform buckets
/// searched in growing square rings.
struct BucketGrid {
    cols: i64,
    rows: i64,
    buckets: Vec<Vec<(i64, i64)>>,
}

impl BucketGrid {
    fn new(pixels: &[Pixel]) -> Self {
        let max_x = pixels.iter().map(|p| p.x as i64).max().unwrap_or(0);
        let max_y = pixels.iter().map(|p| p.y as i64).max().unwrap_or(0);
        let (cols, rows) = (max_x / BUCKET + 1, max_y / BUCKET + 1);
        let mut buckets = vec![Vec::new(); (cols * rows) as usize];
        for p in pixels {
            let (x, y) = (p.x as i64, p.y as i64);
            buckets[((y / BUCKET) * cols + x / BUCKET) as usize].push((x, y));
        }
        Self {
            cols,
            rows,
            buckets,
        }
    }

    /// Squared distance in cells from `(x, y)` to the nearest stored cell.
    fn nearest_sq(&self, x: i64, y: i64) -> i64 {
        let (bx, by) = (x / BUCKET, y / BUCKET);
        let mut best = i64::MAX;
        let max_ring = self.cols.max(self.rows) + bx.max(by) + 1;
        for r in 0..=max_ring {
            for cy in (by - r)..=(by + r) {
                if cy < 0 || cy >= self.rows {
                    continue;
                }
                let edge_row = cy == by - r || cy == by + r;
                let mut cx = bx - r;
                while cx <= bx + r {
                    if cx >= 0 && cx < self.cols {
                        for &(px, py) in &self.buckets[(cy * self.cols + cx) as usize] {
                            best = best.min((px - x).pow(2) + (py - y).pow(2));
                        }
                    }
                    // Interior rows of the ring only have their two end buckets.
                    cx += if edge_row || r == 0 { 1 } else { 2 * r };
                }
            }
            // Anything in ring r+1 or beyond is at least r*BUCKET + 1 away on one axis.
            let reach = r * BUCKET + 1;
            if best <= reach * reach {
                break;
            }
        }
        best
    }
}

/// Max and mean nearest-neighbour distance from every cell of `from` to `to`, meters.
/// `None` when either set is empty.
pub(crate) fn directed(from: &[Pixel], to: &[Pixel], meters_per_pixel: f64) -> Option<(f64, f64)> {
    if from.is_empty() || to.is_empty() {
        return None;
    }
    let grid = BucketGrid::new(to);
    let mut max = 0.0f64;
    let mut sum = 0.0;
    for p in from {
        let d = (grid.nearest_sq(p.x as i64, p.y as i64) as f64).sqrt() * meters_per_pixel;
        max = max.max(d);
        sum += d;
    }
    Some((max, sum / from.len() as f64))
}
