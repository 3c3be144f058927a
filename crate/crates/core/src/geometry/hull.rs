use super::{orient, GeometryError, Point, Polygon};

/// Convex hull by Andrew's monotone chain; collinear boundary points are dropped.
pub fn convex_hull(poly: &Polygon) -> Result<Polygon, GeometryError> {
    let hull = hull_points(poly.vertices());
    if hull.len() < 3 {
        return Err(GeometryError::DegenerateHull);
    }
    Polygon::new(hull)
}

fn hull_points(points: &[Point]) -> Vec<Point> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<Point> = Vec::with_capacity(pts.len());
    for &p in &pts {
        while lower.len() >= 2 && orient(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::with_capacity(pts.len());
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && orient(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}
