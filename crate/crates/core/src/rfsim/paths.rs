use serde::{Deserialize, Serialize};

use super::{los_label_on, LosLabel, RfError, SPEED_OF_LIGHT};
use crate::environment::Environment;
use crate::geometry::{orient, rasterize, BinaryMap, Point, Polygon};

/// Paths kept per UE-BS pair.
pub const MAX_PATHS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    Direct,
    Reflected,
}

/// One propagation path between a UE and a BS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    /// Angle of arrival at the BS, radians from +x, in [-pi, pi].
    pub aoa: f64,
    /// Angle of departure at the UE, radians from +x, in [-pi, pi].
    pub aod: f64,
    /// Time of arrival, seconds.
    pub toa: f64,
    pub kind: PathKind,
}

impl PathRecord {
    pub fn length(&self) -> f64 {
        self.toa * SPEED_OF_LIGHT
    }

    pub fn bounces(&self) -> u32 {
        match self.kind {
            PathKind::Direct => 0,
            PathKind::Reflected => 1,
        }
    }
}

fn blocked(buildings: &[Polygon], a: Point, b: Point) -> bool {
    buildings.iter().any(|poly| poly.blocks_segment(a, b))
}

/// Mirror image of `p` across the infinite line through `a` and `b`.
pub fn mirror(p: Point, a: Point, b: Point) -> Point {
    let d = b.sub(a);
    let t = p.sub(a).dot(d) / d.dot(d);
    let foot = a.add(d.scale(t));
    foot.scale(2.0).sub(p)
}

fn record(ue: Point, bs: Point, via: Option<Point>, length: f64) -> PathRecord {
    let (first, last, kind) = match via {
        Some(r) => (r, r, PathKind::Reflected),
        None => (bs, ue, PathKind::Direct),
    };
    PathRecord {
        aod: first.sub(ue).angle(),
        aoa: last.sub(bs).angle(),
        toa: length / SPEED_OF_LIGHT,
        kind,
    }
}

/// Single-bounce image-method tracer over one environment.
///
/// The direct path exists iff the pair is LOS on the ground-truth raster, so
/// path geometry and LOS labels never disagree. Reflected legs are checked
/// against the exact polygons: a wall reflects when both endpoints are
/// strictly on its outer side, the reflection point falls strictly inside the
/// wall segment, and neither leg passes through a building interior.
pub struct Tracer<'a> {
    env: &'a Environment,
    truth: BinaryMap,
}

impl<'a> Tracer<'a> {
    pub fn new(env: &'a Environment) -> Result<Self, RfError> {
        Ok(Self {
            env,
            truth: rasterize(&env.buildings, env.side_length)?,
        })
    }

    pub fn truth(&self) -> &BinaryMap {
        &self.truth
    }

    /// Every valid direct and single-bounce path, unsorted.
    pub fn candidates(&self, ue: Point, bs: Point) -> Result<Vec<PathRecord>, RfError> {
        Ok(self.traced(ue, bs)?.into_iter().map(|(p, _)| p).collect())
    }

    /// The up-to-five shortest-ToA paths from `ue` to `bs`, ascending by ToA.
    pub fn trace(&self, ue: Point, bs: Point) -> Result<Vec<PathRecord>, RfError> {
        let mut paths = self.candidates(ue, bs)?;
        paths.sort_by(|x, y| x.toa.total_cmp(&y.toa));
        paths.truncate(MAX_PATHS);
        Ok(paths)
    }

    /// Candidates paired with their reflection point (`None` for the direct path).
    fn traced(&self, ue: Point, bs: Point) -> Result<Vec<(PathRecord, Option<Point>)>, RfError> {
        reflections(self.env, &self.truth, ue, bs)
    }
}

pub fn candidate_paths(
    env: &Environment,
    ue: Point,
    bs: Point,
) -> Result<Vec<PathRecord>, RfError> {
    Tracer::new(env)?.candidates(ue, bs)
}

fn reflections(
    env: &Environment,
    truth: &BinaryMap,
    ue: Point,
    bs: Point,
) -> Result<Vec<(PathRecord, Option<Point>)>, RfError> {
    if ue.distance(bs) == 0.0 {
        return Err(RfError::CoLocated);
    }
    let buildings = &env.buildings;
    let mut out = Vec::new();
    if los_label_on(truth, ue, bs) == LosLabel::Los {
        out.push((record(ue, bs, None, ue.distance(bs)), None));
    }
    for poly in buildings {
        for (a, b) in poly.edges() {
            // CCW ring: the exterior is to the right of each edge.
            if orient(a, b, ue) >= -1e-12 || orient(a, b, bs) >= -1e-12 {
                continue;
            }
            let image = mirror(bs, a, b);
            let Some(r) = wall_crossing(ue, image, a, b) else {
                continue;
            };
            if blocked(buildings, ue, r) || blocked(buildings, r, bs) {
                continue;
            }
            out.push((record(ue, bs, Some(r), ue.distance(image)), Some(r)));
        }
    }
    Ok(out)
}

/// Point where segment p-q crosses the interior of wall a-b.
fn wall_crossing(p: Point, q: Point, a: Point, b: Point) -> Option<Point> {
    let r = q.sub(p);
    let s = b.sub(a);
    let denom = r.cross(s);
    if denom.abs() < 1e-15 {
        return None;
    }
    let t = a.sub(p).cross(s) / denom;
    let u = a.sub(p).cross(r) / denom;
    let margin = 1e-9;
    ((0.0..=1.0).contains(&t) && u > margin && u < 1.0 - margin).then(|| a.add(s.scale(u)))
}

/// The up-to-five shortest-ToA paths from `ue` to `bs`, ascending by ToA.
///
/// Rasterizes the environment on every call; use [`Tracer`] for many pairs.
pub fn trace_paths(env: &Environment, ue: Point, bs: Point) -> Result<Vec<PathRecord>, RfError> {
    Tracer::new(env)?.trace(ue, bs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::{BS_COUNT, UE_COUNT};

    fn env_with(buildings: Vec<Polygon>) -> Environment {
        Environment {
            id: "t".into(),
            side_length: 100.0,
            buildings,
            bs: vec![Point::new(1.0, 1.0); BS_COUNT],
            ue: vec![Point::new(2.0, 2.0); UE_COUNT],
        }
    }

    fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon {
        Polygon::rectangle(Point::new(x0, y0), Point::new(x1, y1)).unwrap()
    }

    #[test]
    fn free_space_has_one_direct_path() {
        let env = env_with(vec![]);
        let (ue, bs) = (Point::new(10.0, 20.0), Point::new(70.0, 50.0));
        let paths = trace_paths(&env, ue, bs).unwrap();
        assert_eq!(paths.len(), 1);
        let p = paths[0];
        assert_eq!(p.kind, PathKind::Direct);
        assert_eq!(p.toa, ue.distance(bs) / SPEED_OF_LIGHT);
        assert_eq!(p.aod, (bs.y - ue.y).atan2(bs.x - ue.x));
        assert_eq!(p.aoa, (ue.y - bs.y).atan2(ue.x - bs.x));
    }

    /// Brute-force shortest UE -> wall -> BS length by dense sampling plus
    /// golden-section refinement along the wall.
    fn brute_force_reflection(ue: Point, bs: Point, a: Point, b: Point) -> f64 {
        let f = |u: f64| {
            let r = a.add(b.sub(a).scale(u));
            ue.distance(r) + r.distance(bs)
        };
        let n = 10_000;
        let best = (0..=n)
            .min_by(|&i, &j| f(i as f64 / n as f64).total_cmp(&f(j as f64 / n as f64)))
            .unwrap();
        let (mut lo, mut hi) = (
            ((best as f64) - 1.0) / n as f64,
            ((best as f64) + 1.0) / n as f64,
        );
        let g = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let m1 = hi - g * (hi - lo);
            let m2 = lo + g * (hi - lo);
            if f(m1) < f(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        f(0.5 * (lo + hi))
    }

    #[test]
    fn parallel_wall_adds_mirror_reflection() {
        let wall = rect(5.0, 60.0, 95.0, 62.0);
        let env = env_with(vec![wall]);
        let (ue, bs) = (Point::new(20.0, 40.0), Point::new(80.0, 40.0));
        let paths = trace_paths(&env, ue, bs).unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(paths[0].kind, PathKind::Direct);
        assert_eq!(paths[1].kind, PathKind::Reflected);
        let image = mirror(bs, Point::new(5.0, 60.0), Point::new(95.0, 60.0));
        assert!((image.y - 80.0).abs() < 1e-12);
        let closed_form = ue.distance(image);
        assert!((paths[1].length() - closed_form).abs() < 1e-9);
        let brute = brute_force_reflection(ue, bs, Point::new(5.0, 60.0), Point::new(95.0, 60.0));
        assert!(
            (paths[1].length() - brute).abs() < 1e-6,
            "{} vs {brute}",
            paths[1].length()
        );
        // Departure heads up-right towards the wall, arrival comes from up-left.
        assert!(paths[1].aod > 0.0 && paths[1].aod < std::f64::consts::FRAC_PI_2);
        assert!(paths[1].aoa > std::f64::consts::FRAC_PI_2);
    }

    #[test]
    fn spanning_wall_occludes_everything() {
        let env = env_with(vec![rect(0.0, 49.0, 100.0, 51.0)]);
        let paths = trace_paths(&env, Point::new(50.0, 20.0), Point::new(50.0, 80.0)).unwrap();
        assert!(paths.is_empty());
    }

    #[test]
    fn reflected_legs_are_unobstructed_and_sorted() {
        let env = env_with(vec![
            rect(10.0, 10.0, 30.0, 30.0),
            rect(50.0, 40.0, 70.0, 45.0),
            rect(35.0, 70.0, 60.0, 90.0),
            rect(75.0, 10.0, 90.0, 35.0),
        ]);
        let (ue, bs) = (Point::new(40.0, 20.0), Point::new(60.0, 60.0));
        let paths = trace_paths(&env, ue, bs).unwrap();
        assert!(!paths.is_empty() && paths.len() <= MAX_PATHS);
        assert!(paths.windows(2).all(|w| w[0].toa <= w[1].toa));
        let traced = Tracer::new(&env).unwrap().traced(ue, bs).unwrap();
        assert!(traced.iter().any(|(_, via)| via.is_some()));
        for (p, via) in traced {
            assert!(p.toa > 0.0);
            if let Some(r) = via {
                assert!(!blocked(&env.buildings, ue, r));
                assert!(!blocked(&env.buildings, r, bs));
                assert!(env.buildings.iter().any(|b| b.on_boundary(r)));
                let len = ue.distance(r) + r.distance(bs);
                assert!((p.length() - len).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn co_located_pair_is_rejected() {
        let env = env_with(vec![]);
        let p = Point::new(3.0, 3.0);
        assert!(matches!(trace_paths(&env, p, p), Err(RfError::CoLocated)));
    }
}
