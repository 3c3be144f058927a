use serde::{Deserialize, Serialize};

use super::{GeometryError, Point, Polygon};

/// Side length of the canonical map grid, in cells.
pub const GRID_SIZE: usize = 224;

/// Grid cell coordinate: `x` is the column, `y` the row (row 0 at y = 0 m).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pixel {
    pub x: usize,
    pub y: usize,
}

impl Pixel {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

/// Binary occupancy grid; 1 marks a building cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapDoc", into = "MapDoc")]
pub struct BinaryMap {
    width: usize,
    height: usize,
    meters_per_pixel: f64,
    cells: Vec<bool>,
}

impl BinaryMap {
    pub fn new(width: usize, height: usize, meters_per_pixel: f64) -> Result<Self, GeometryError> {
        if width == 0 || height == 0 {
            return Err(GeometryError::EmptyGrid);
        }
        if !(meters_per_pixel.is_finite() && meters_per_pixel > 0.0) {
            return Err(GeometryError::InvalidScale(meters_per_pixel));
        }
        Ok(Self {
            width,
            height,
            meters_per_pixel,
            cells: vec![false; width * height],
        })
    }

    /// Canonical 224x224 grid covering a square frame of `side_length` meters.
    pub fn for_frame(side_length: f64) -> Result<Self, GeometryError> {
        if !(side_length.is_finite() && side_length > 0.0) {
            return Err(GeometryError::InvalidScale(side_length));
        }
        Self::new(GRID_SIZE, GRID_SIZE, side_length / GRID_SIZE as f64)
    }

    /// Builds a map from row-major rows of 0/1 values.
    pub fn from_rows(rows: &[&[u8]], meters_per_pixel: f64) -> Result<Self, GeometryError> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut map = Self::new(width, height, meters_per_pixel)?;
        for (y, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(GeometryError::DimensionMismatch);
            }
            for (x, &v) in row.iter().enumerate() {
                map.set(Pixel::new(x, y), v != 0);
            }
        }
        Ok(map)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn meters_per_pixel(&self) -> f64 {
        self.meters_per_pixel
    }

    pub fn same_shape(&self, other: &BinaryMap) -> bool {
        self.width == other.width && self.height == other.height
    }

    pub fn get(&self, p: Pixel) -> bool {
        self.cells[p.y * self.width + p.x]
    }

    pub fn set(&mut self, p: Pixel, value: bool) {
        let w = self.width;
        self.cells[p.y * w + p.x] = value;
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn count_ones(&self) -> usize {
        self.cells.iter().filter(|&&c| c).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.cells.iter().any(|&c| c)
    }

    /// Pixelwise OR with `other` in place.
    pub fn merge_max(&mut self, other: &BinaryMap) -> Result<(), GeometryError> {
        if !self.same_shape(other) {
            return Err(GeometryError::DimensionMismatch);
        }
        for (a, &b) in self.cells.iter_mut().zip(&other.cells) {
            *a |= b;
        }
        Ok(())
    }

    /// Metric coordinate of the center of `p`.
    pub fn cell_center(&self, p: Pixel) -> Point {
        Point::new(
            (p.x as f64 + 0.5) * self.meters_per_pixel,
            (p.y as f64 + 0.5) * self.meters_per_pixel,
        )
    }

    /// Cell containing a metric point, clamped to the grid.
    pub fn pixel_at(&self, p: Point) -> Pixel {
        let clamp = |v: f64, n: usize| (v.floor().max(0.0) as usize).min(n - 1);
        Pixel::new(
            clamp(p.x / self.meters_per_pixel, self.width),
            clamp(p.y / self.meters_per_pixel, self.height),
        )
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = Pixel> + '_ {
        let w = self.width;
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &c)| c)
            .map(move |(i, _)| Pixel::new(i % w, i / w))
    }

    /// Row-major run lengths, alternating background/foreground and
    /// starting with a (possibly zero) background run.
    pub fn to_rle(&self) -> Vec<u32> {
        let mut runs = Vec::new();
        let mut current = false;
        let mut len = 0u32;
        for &c in &self.cells {
            if c == current {
                len += 1;
            } else {
                runs.push(len);
                current = c;
                len = 1;
            }
        }
        runs.push(len);
        runs
    }

    pub fn from_rle(
        width: usize,
        height: usize,
        meters_per_pixel: f64,
        runs: &[u32],
    ) -> Result<Self, GeometryError> {
        let mut map = Self::new(width, height, meters_per_pixel)?;
        let total: u64 = runs.iter().map(|&r| r as u64).sum();
        if total != (width * height) as u64 {
            return Err(GeometryError::BadRunLength {
                expected: width * height,
                found: total as usize,
            });
        }
        let mut i = 0;
        let mut value = false;
        for &r in runs {
            for c in &mut map.cells[i..i + r as usize] {
                *c = value;
            }
            i += r as usize;
            value = !value;
        }
        Ok(map)
    }
}

#[derive(Serialize, Deserialize)]
struct MapDoc {
    width: usize,
    height: usize,
    meters_per_pixel: f64,
    rle: Vec<u32>,
}

impl TryFrom<MapDoc> for BinaryMap {
    type Error = GeometryError;

    fn try_from(d: MapDoc) -> Result<Self, Self::Error> {
        BinaryMap::from_rle(d.width, d.height, d.meters_per_pixel, &d.rle)
    }
}

impl From<BinaryMap> for MapDoc {
    fn from(m: BinaryMap) -> Self {
        MapDoc {
            rle: m.to_rle(),
            width: m.width,
            height: m.height,
            meters_per_pixel: m.meters_per_pixel,
        }
    }
}

/// Rasterizes the union of `buildings` onto the canonical grid.
///
/// A cell is set when its center lies inside or on the boundary of any
/// polygon. Parts of polygons outside the frame are ignored.
pub fn rasterize(buildings: &[Polygon], side_length: f64) -> Result<BinaryMap, GeometryError> {
    let mut map = BinaryMap::for_frame(side_length)?;
    for poly in buildings {
        burn_polygon(&mut map, poly);
    }
    Ok(map)
}

/// Sets every cell of `map` whose center is covered by `poly`.
pub fn burn_polygon(map: &mut BinaryMap, poly: &Polygon) {
    let (min, max) = poly.bounds();
    let mpp = map.meters_per_pixel;
    // Cell centers (i + 0.5) * mpp within [min, max], widened by one cell for rounding.
    let lo = |v: f64| ((v / mpp - 0.5).floor() - 1.0).max(0.0) as usize;
    let hi = |v: f64, n: usize| (((v / mpp - 0.5).ceil() + 1.0).max(-1.0) as i64).min(n as i64 - 1);
    let (x0, y0) = (lo(min.x), lo(min.y));
    let (x1, y1) = (hi(max.x, map.width), hi(max.y, map.height));
    if x1 < 0 || y1 < 0 {
        return;
    }
    for y in y0..=y1 as usize {
        for x in x0..=x1 as usize {
            let p = Pixel::new(x, y);
            if !map.get(p) && poly.contains(map.cell_center(p)) {
                map.set(p, true);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_frame_polygon_sets_every_cell() {
        let side = 100.0;
        let p =
            Polygon::rectangle(Point::new(-1.0, -1.0), Point::new(side + 1.0, side + 1.0)).unwrap();
        let m = rasterize(&[p], side).unwrap();
        assert_eq!(m.count_ones(), GRID_SIZE * GRID_SIZE);
    }

    #[test]
    fn empty_building_list_gives_empty_map() {
        let m = rasterize(&[], 50.0).unwrap();
        assert!(m.is_empty());
        assert_eq!(m.width(), GRID_SIZE);
        assert_eq!(m.meters_per_pixel(), 50.0 / 224.0);
    }

    #[test]
    fn quadrant_square_matches_per_cell_oracle() {
        let side = 224.0 * 0.75;
        let sq =
            Polygon::rectangle(Point::new(0.0, 0.0), Point::new(side / 2.0, side / 2.0)).unwrap();
        let m = rasterize(std::slice::from_ref(&sq), side).unwrap();
        let mut expected = 0;
        for y in 0..GRID_SIZE {
            for x in 0..GRID_SIZE {
                let p = Pixel::new(x, y);
                let oracle = sq.contains(m.cell_center(p));
                assert_eq!(m.get(p), oracle, "cell {x},{y}");
                assert_eq!(oracle, x < 112 && y < 112);
                expected += oracle as usize;
            }
        }
        assert_eq!(expected, 112 * 112);
    }

    #[test]
    fn polygons_crossing_the_frame_are_clipped() {
        let side = 224.0;
        let p = Polygon::rectangle(Point::new(-50.0, -50.0), Point::new(10.0, 10.0)).unwrap();
        let m = rasterize(&[p], side).unwrap();
        assert_eq!(m.count_ones(), 10 * 10);
    }

    #[test]
    fn rle_roundtrip_and_bad_length() {
        let m = BinaryMap::from_rows(&[&[1, 1, 0], &[0, 1, 1]], 2.0).unwrap();
        let runs = m.to_rle();
        assert_eq!(runs, vec![0, 2, 2, 2]);
        assert_eq!(BinaryMap::from_rle(3, 2, 2.0, &runs).unwrap(), m);
        assert!(matches!(
            BinaryMap::from_rle(3, 2, 2.0, &[1, 2]),
            Err(GeometryError::BadRunLength { .. })
        ));
    }
}
