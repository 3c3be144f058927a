use super::{BinaryMap, Pixel, Point};

/// Cells touched by the segment a->b, plus whether any of them is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentTrace {
    pub intersects: bool,
    pub pixels: Vec<Pixel>,
}

/// Supercover traversal of a->b over the grid of `map`.
///
/// Every cell whose closed square shares at least one point with the segment
/// is returned, ordered from `a` towards `b`. A degenerate segment yields the
/// single cell containing the point.
pub fn segment_pixels(a: Point, b: Point, map: &BinaryMap) -> SegmentTrace {
    let pixels = supercover(a, b, map.width(), map.height(), map.meters_per_pixel());
    let intersects = pixels.iter().any(|&p| map.get(p));
    SegmentTrace { intersects, pixels }
}

/// Grid-only variant of [`segment_pixels`] for callers that hold no map.
pub fn supercover(a: Point, b: Point, width: usize, height: usize, mpp: f64) -> Vec<Pixel> {
    let to_grid = |p: Point| Point::new(p.x / mpp, p.y / mpp);
    let (ga, gb) = (to_grid(a), to_grid(b));
    if ga == gb {
        let clamp = |v: f64, n: usize| (v.floor().max(0.0) as usize).min(n - 1);
        return vec![Pixel::new(clamp(ga.x, width), clamp(ga.y, height))];
    }
    // Canonical endpoint order keeps the traversed set identical for a->b and b->a.
    let swap = (gb.x, gb.y) < (ga.x, ga.y);
    let (p, q) = if swap { (gb, ga) } else { (ga, gb) };

    let col_lo = (p.x.ceil() as i64 - 1).max(0);
    let col_hi = (q.x.floor() as i64).min(width as i64 - 1);
    let mut columns: Vec<Vec<Pixel>> = Vec::new();
    let rows_desc = q.y < p.y;
    for col in col_lo..=col_hi {
        let (ylo, yhi) = if p.x == q.x {
            (p.y.min(q.y), p.y.max(q.y))
        } else {
            let s0 = (col as f64).max(p.x);
            let s1 = ((col + 1) as f64).min(q.x);
            if s0 > s1 {
                continue;
            }
            let slope = (q.y - p.y) / (q.x - p.x);
            let y0 = p.y + (s0 - p.x) * slope;
            let y1 = p.y + (s1 - p.x) * slope;
            (y0.min(y1), y0.max(y1))
        };
        let row_lo = (ylo.ceil() as i64 - 1).max(0);
        let row_hi = (yhi.floor() as i64).min(height as i64 - 1);
        if row_lo > row_hi {
            continue;
        }
        let mut cells: Vec<Pixel> = (row_lo..=row_hi)
            .map(|row| Pixel::new(col as usize, row as usize))
            .collect();
        if rows_desc {
            cells.reverse();
        }
        columns.push(cells);
    }
    let mut out: Vec<Pixel> = columns.into_iter().flatten().collect();
    if swap {
        // Reverse traversal: columns and rows both flip direction.
        out.reverse();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    /// Closed segment vs closed box, by Liang-Barsky clipping.
    fn segment_touches_box(a: Point, b: Point, lo: Point, hi: Point) -> bool {
        let d = b.sub(a);
        let mut t0: f64 = 0.0;
        let mut t1: f64 = 1.0;
        for (pv, dv, l, h) in [(a.x, d.x, lo.x, hi.x), (a.y, d.y, lo.y, hi.y)] {
            if dv == 0.0 {
                if pv < l || pv > h {
                    return false;
                }
            } else {
                let (mut ta, mut tb) = ((l - pv) / dv, (h - pv) / dv);
                if ta > tb {
                    std::mem::swap(&mut ta, &mut tb);
                }
                t0 = t0.max(ta);
                t1 = t1.min(tb);
                if t0 > t1 {
                    return false;
                }
            }
        }
        true
    }

    fn oracle(a: Point, b: Point, w: usize, h: usize, mpp: f64) -> BTreeSet<Pixel> {
        let mut set = BTreeSet::new();
        for y in 0..h {
            for x in 0..w {
                let lo = Point::new(x as f64 * mpp, y as f64 * mpp);
                let hi = Point::new((x + 1) as f64 * mpp, (y + 1) as f64 * mpp);
                if segment_touches_box(a, b, lo, hi) {
                    set.insert(Pixel::new(x, y));
                }
            }
        }
        set
    }

    #[test]
    fn horizontal_segment_on_empty_map() {
        let map = BinaryMap::new(8, 8, 1.0).unwrap();
        let t = segment_pixels(Point::new(0.2, 3.5), Point::new(7.8, 3.5), &map);
        assert!(!t.intersects);
        assert_eq!(
            t.pixels,
            (0..8).map(|x| Pixel::new(x, 3)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn segment_through_solid_block() {
        let mut map = BinaryMap::new(8, 8, 1.0).unwrap();
        for y in 2..5 {
            for x in 3..5 {
                map.set(Pixel::new(x, y), true);
            }
        }
        let t = segment_pixels(Point::new(0.5, 3.5), Point::new(7.5, 3.5), &map);
        assert!(t.intersects);
    }

    #[test]
    fn diagonal_matches_box_oracle_on_4x4() {
        let a = Point::new(0.0, 0.0);
        let b = Point::new(4.0, 4.0);
        let got: BTreeSet<Pixel> = supercover(a, b, 4, 4, 1.0).into_iter().collect();
        assert_eq!(got, oracle(a, b, 4, 4, 1.0));
        // Corner crossings touch both off-diagonal neighbours.
        assert!(got.contains(&Pixel::new(1, 0)) && got.contains(&Pixel::new(0, 1)));
        assert_eq!(got.len(), 10);
    }

    #[test]
    fn traversal_is_ordered_from_a() {
        let path = supercover(Point::new(3.5, 0.5), Point::new(0.5, 2.5), 4, 4, 1.0);
        assert_eq!(path.first(), Some(&Pixel::new(3, 0)));
        assert_eq!(path.last(), Some(&Pixel::new(0, 2)));
    }

    #[test]
    fn degenerate_segment_is_single_cell() {
        let map = BinaryMap::new(4, 4, 2.0).unwrap();
        let t = segment_pixels(Point::new(3.0, 5.0), Point::new(3.0, 5.0), &map);
        assert_eq!(t.pixels, vec![Pixel::new(1, 2)]);
    }

    proptest! {
        #[test]
        fn matches_box_oracle(ax in 0.0f64..16.0, ay in 0.0f64..16.0, bx in 0.0f64..16.0, by in 0.0f64..16.0) {
            let (a, b) = (Point::new(ax, ay), Point::new(bx, by));
            prop_assume!(a != b);
            let got: BTreeSet<Pixel> = supercover(a, b, 8, 8, 2.0).into_iter().collect();
            prop_assert_eq!(got, oracle(a, b, 8, 8, 2.0));
        }

        #[test]
        fn direction_does_not_change_cell_set(ax in 0.0f64..50.0, ay in 0.0f64..50.0, bx in 0.0f64..50.0, by in 0.0f64..50.0) {
            let (a, b) = (Point::new(ax, ay), Point::new(bx, by));
            let fwd = supercover(a, b, 32, 32, 50.0 / 32.0);
            let mut rev = supercover(b, a, 32, 32, 50.0 / 32.0);
            rev.reverse();
            prop_assert_eq!(fwd, rev);
        }
    }
}
