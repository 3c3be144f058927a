use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Tolerance used for on-boundary and collinearity tests, in meters.
pub const EPS: f64 = 1e-9;

/// A 2-D point in the environment frame (meters).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn sub(self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    pub fn add(self, other: Point) -> Point {
        Point::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        self.sub(other).norm()
    }

    /// Direction of the vector from the origin to `self`, measured from +x.
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point {
    fn from([x, y]: [f64; 2]) -> Self {
        Point::new(x, y)
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

/// Orientation of the triple (a, b, c): positive when counter-clockwise.
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    b.sub(a).cross(c.sub(a))
}

/// True when `p` lies on the closed segment a-b (within [`EPS`]).
pub fn on_segment(p: Point, a: Point, b: Point) -> bool {
    let ab = b.sub(a);
    let len = ab.norm();
    if len < EPS {
        return p.distance(a) <= EPS;
    }
    if (ab.cross(p.sub(a)) / len).abs() > EPS {
        return false;
    }
    let t = ab.dot(p.sub(a)) / (len * len);
    (-EPS / len..=1.0 + EPS / len).contains(&t)
}

/// Closed-segment intersection test (touching and collinear overlap count).
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    on_segment(a, c, d) || on_segment(b, c, d) || on_segment(c, a, b) || on_segment(d, a, b)
}

/// Signed area by the shoelace formula (positive for counter-clockwise rings).
pub fn signed_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    (0..n)
        .map(|i| vertices[i].cross(vertices[(i + 1) % n]))
        .sum::<f64>()
        * 0.5
}

/// A simple polygon stored counter-clockwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolygonDoc", into = "PolygonDoc")]
pub struct Polygon {
    vertices: Vec<Point>,
}

#[derive(Serialize, Deserialize)]
struct PolygonDoc {
    vertices: Vec<Point>,
}

impl TryFrom<PolygonDoc> for Polygon {
    type Error = GeometryError;

    fn try_from(doc: PolygonDoc) -> Result<Self, Self::Error> {
        Polygon::new(doc.vertices)
    }
}

impl From<Polygon> for PolygonDoc {
    fn from(p: Polygon) -> Self {
        PolygonDoc {
            vertices: p.vertices,
        }
    }
}

impl Polygon {
    /// Validates the ring and reorients it counter-clockwise.
    pub fn new(mut vertices: Vec<Point>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if let Some(i) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinite(i));
        }
        let area = signed_area(&vertices);
        if area.abs() < EPS {
            return Err(GeometryError::ZeroArea);
        }
        if !is_simple(&vertices) {
            return Err(GeometryError::SelfIntersecting);
        }
        if area < 0.0 {
            vertices.reverse();
        }
        Ok(Self { vertices })
    }

    /// Axis-aligned rectangle with corners `min` and `max`.
    pub fn rectangle(min: Point, max: Point) -> Result<Self, GeometryError> {
        Polygon::new(vec![
            min,
            Point::new(max.x, min.y),
            max,
            Point::new(min.x, max.y),
        ])
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    /// Iterator over the directed edges (CCW) as `(start, end)` pairs.
    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Axis-aligned bounds as `(min, max)`.
    pub fn bounds(&self) -> (Point, Point) {
        let mut min = Point::new(f64::INFINITY, f64::INFINITY);
        let mut max = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            min.x = min.x.min(p.x);
            min.y = min.y.min(p.y);
            max.x = max.x.max(p.x);
            max.y = max.y.max(p.y);
        }
        (min, max)
    }

    pub fn on_boundary(&self, p: Point) -> bool {
        self.edges().any(|(a, b)| on_segment(p, a, b))
    }

    /// Point-in-polygon, boundary counted as inside.
    pub fn contains(&self, p: Point) -> bool {
        self.on_boundary(p) || self.crossing_parity(p)
    }

    /// Point-in-polygon, boundary counted as outside.
    pub fn strictly_contains(&self, p: Point) -> bool {
        !self.on_boundary(p) && self.crossing_parity(p)
    }

    fn crossing_parity(&self, p: Point) -> bool {
        let mut inside = false;
        for (a, b) in self.edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    /// Euclidean distance from `p` to the polygon boundary.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn translated(&self, offset: Point) -> Polygon {
        Polygon {
            vertices: self.vertices.iter().map(|p| p.add(offset)).collect(),
        }
    }

    /// True when the open segment a-b passes through the polygon interior.
    ///
    /// Touching a vertex or running along an edge does not count.
    pub fn blocks_segment(&self, a: Point, b: Point) -> bool {
        let (min, max) = self.bounds();
        if a.x.max(b.x) < min.x - EPS
            || a.x.min(b.x) > max.x + EPS
            || a.y.max(b.y) < min.y - EPS
            || a.y.min(b.y) > max.y + EPS
        {
            return false;
        }
        let ab = b.sub(a);
        let len2 = ab.dot(ab);
        if len2 < EPS * EPS {
            return self.strictly_contains(a);
        }
        let mut ts = vec![0.0, 1.0];
        for (c, d) in self.edges() {
            if let Some(t) = segment_param(a, b, c, d) {
                ts.push(t);
            }
            for v in [c, d] {
                if on_segment(v, a, b) {
                    ts.push(ab.dot(v.sub(a)) / len2);
                }
            }
        }
        ts.sort_by(f64::total_cmp);
        ts.windows(2).any(|w| {
            w[1] - w[0] > 1e-12 && self.strictly_contains(a.add(ab.scale(0.5 * (w[0] + w[1]))))
        })
    }
}

/// Parameter `t` along a-b of a proper crossing with c-d, if any.
fn segment_param(a: Point, b: Point, c: Point, d: Point) -> Option<f64> {
    let r = b.sub(a);
    let s = d.sub(c);
    let denom = r.cross(s);
    if denom.abs() < 1e-15 {
        return None;
    }
    let t = c.sub(a).cross(s) / denom;
    let u = c.sub(a).cross(r) / denom;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then_some(t)
}

pub fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = b.sub(a);
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = (ab.dot(p.sub(a)) / len2).clamp(0.0, 1.0);
    p.distance(a.add(ab.scale(t)))
}

fn is_simple(vertices: &[Point]) -> bool {
    let n = vertices.len();
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        if a.distance(b) < EPS {
            return false;
        }
        for j in (i + 1)..n {
            let (c, d) = (vertices[j], vertices[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Shared vertex only; reject folding back along the same line.
                let shared = if j == i + 1 { b } else { a };
                let other_1 = if j == i + 1 { a } else { b };
                let other_2 = if j == i + 1 { d } else { c };
                if orient(other_1, shared, other_2).abs() < EPS
                    && other_1.sub(shared).dot(other_2.sub(shared)) > 0.0
                {
                    return false;
                }
                continue;
            }
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(raw: &[(f64, f64)]) -> Vec<Point> {
        raw.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let p = Polygon::new(pts(&[(0.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, 0.0)])).unwrap();
        assert!(p.area() > 0.0);
        assert_eq!(p.area(), 1.0);
    }

    #[test]
    fn rejects_invalid_rings() {
        assert!(matches!(
            Polygon::new(pts(&[(0.0, 0.0), (1.0, 0.0)])),
            Err(GeometryError::TooFewVertices(2))
        ));
        assert!(matches!(
            Polygon::new(pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)])),
            Err(GeometryError::ZeroArea)
        ));
        // Bow tie.
        assert!(matches!(
            Polygon::new(pts(&[(0.0, 0.0), (2.0, 2.0), (2.0, 0.0), (0.0, 1.0)])),
            Err(GeometryError::SelfIntersecting)
        ));
        assert!(matches!(
            Polygon::new(pts(&[(0.0, 0.0), (f64::NAN, 1.0), (1.0, 0.0)])),
            Err(GeometryError::NonFinite(1))
        ));
    }

    #[test]
    fn containment_includes_boundary() {
        let sq = Polygon::rectangle(Point::new(0.0, 0.0), Point::new(2.0, 2.0)).unwrap();
        assert!(sq.contains(Point::new(1.0, 1.0)));
        assert!(sq.contains(Point::new(2.0, 1.0)));
        assert!(sq.contains(Point::new(0.0, 0.0)));
        assert!(!sq.strictly_contains(Point::new(2.0, 1.0)));
        assert!(!sq.contains(Point::new(2.1, 1.0)));
    }

    #[test]
    fn blocking_ignores_grazing_contact() {
        let sq = Polygon::rectangle(Point::new(0.0, 0.0), Point::new(2.0, 2.0)).unwrap();
        assert!(sq.blocks_segment(Point::new(-1.0, 1.0), Point::new(3.0, 1.0)));
        // Along an edge.
        assert!(!sq.blocks_segment(Point::new(-1.0, 2.0), Point::new(3.0, 2.0)));
        // Through a corner only.
        assert!(!sq.blocks_segment(Point::new(-1.0, 1.0), Point::new(1.0, 3.0)));
        // Ending on the boundary from outside.
        assert!(!sq.blocks_segment(Point::new(-1.0, 1.0), Point::new(0.0, 1.0)));
    }
}
