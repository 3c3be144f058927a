use std::fmt::Write;

use crate::environment::Environment;
use crate::geometry::{BinaryMap, Pixel};

pub const INPUT_COLOR: &str = "#d62728";
pub const PREDICTION_COLOR: &str = "#1f77b4";
pub const TRUTH_COLOR: &str = "#2ca02c";

/// Maps overlaid in one picture; all share the truth map's grid.
pub struct RenderLayers<'a> {
    pub input: Option<&'a BinaryMap>,
    pub prediction: Option<&'a BinaryMap>,
    pub truth: &'a BinaryMap,
}

/// SVG path data tracing every foreground/background cell edge.
/// Row 0 is drawn at the bottom.
fn contour_path(map: &BinaryMap) -> String {
    let (w, h) = (map.width(), map.height());
    let fg = |x: i64, y: i64| {
        x >= 0
            && y >= 0
            && (x as usize) < w
            && (y as usize) < h
            && map.get(Pixel::new(x as usize, y as usize))
    };
    let mut d = String::new();
    for p in map.iter_ones() {
        let (x, y) = (p.x as i64, p.y as i64);
        // Cell corners in SVG space: left, right, top, bottom.
        let (l, r, top, bot) = (x, x + 1, h as i64 - y - 1, h as i64 - y);
        if !fg(x, y - 1) {
            let _ = write!(d, "M{l} {bot}H{r}");
        }
        if !fg(x, y + 1) {
            let _ = write!(d, "M{l} {top}H{r}");
        }
        if !fg(x - 1, y) {
            let _ = write!(d, "M{l} {top}V{bot}");
        }
        if !fg(x + 1, y) {
            let _ = write!(d, "M{r} {top}V{bot}");
        }
    }
    d
}

/// Contour overlay of input, prediction and truth maps plus BS/UE markers.
pub fn render_svg(env: &Environment, layers: &RenderLayers<'_>) -> String {
    let (w, h) = (layers.truth.width(), layers.truth.height());
    let mpp = layers.truth.meters_per_pixel();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {w} {h}" width="{}" height="{}">"#,
        3 * w,
        3 * h
    );
    let _ = writeln!(s, r#"<title>{}</title>"#, env.id);
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let mut layer = |name: &str, map: &BinaryMap, color: &str, width: f64| {
        let _ = writeln!(
            s,
            r#"<path id="{name}" d="{}" fill="none" stroke="{color}" stroke-width="{width}"/>"#,
            contour_path(map)
        );
    };
    layer("truth", layers.truth, TRUTH_COLOR, 0.6);
    if let Some(m) = layers.input {
        layer("input", m, INPUT_COLOR, 0.4);
    }
    if let Some(m) = layers.prediction {
        layer("prediction", m, PREDICTION_COLOR, 0.4);
    }
    let to_svg = |p: crate::geometry::Point| (p.x / mpp, h as f64 - p.y / mpp);
    for &b in &env.bs {
        let (x, y) = to_svg(b);
        let _ = writeln!(
            s,
            r#"<circle class="bs" cx="{x:.2}" cy="{y:.2}" r="2" fill="black"/>"#
        );
    }
    for &u in &env.ue {
        let (x, y) = to_svg(u);
        let _ = writeln!(
            s,
            r#"<circle class="ue" cx="{x:.2}" cy="{y:.2}" r="1" fill="gray"/>"#
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell_has_four_edges() {
        let mut m = BinaryMap::new(4, 4, 1.0).unwrap();
        m.set(Pixel::new(0, 0), true);
        assert_eq!(contour_path(&m), "M0 4H1M0 3H1M0 3V4M1 3V4");
        m.set(Pixel::new(1, 0), true);
        // The shared edge between the two cells is not drawn.
        assert_eq!(contour_path(&m).matches('M').count(), 6);
    }
}
