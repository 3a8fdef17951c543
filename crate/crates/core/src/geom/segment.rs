use super::{closest_point_on_triangle, Point3, TriMesh, Triangle, Vector3};

/// Slack for "touching" in collision tests, in meters.
const TOUCH_EPS: f64 = 1e-12;

/// Line segment inflated by `radius` (a capsule; `radius == 0` is a bare segment).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub p0: Point3,
    pub p1: Point3,
    pub radius: f64,
}

impl Segment {
    pub fn new(p0: Point3, p1: Point3, radius: f64) -> Self {
        debug_assert!(radius >= 0.0);
        Segment { p0, p1, radius }
    }

    pub fn length(&self) -> f64 {
        (self.p1 - self.p0).norm()
    }

    pub fn point_at(&self, t: f64) -> Point3 {
        self.p0 + (self.p1 - self.p0) * t
    }

    fn distance_to_point(&self, q: &Point3) -> f64 {
        let d = self.p1 - self.p0;
        let len2 = d.norm_squared();
        let t = if len2 > 0.0 {
            ((q - self.p0).dot(&d) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        (self.point_at(t) - q).norm()
    }
}

/// Spherical region exempt from collision, centered on an active contact point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ball {
    pub center: Point3,
    pub radius: f64,
}

/// Closest points `(c1, c2)` between segments `p1q1` and `p2q2`.
pub fn closest_points_segment_segment(
    p1: &Point3,
    q1: &Point3,
    p2: &Point3,
    q2: &Point3,
) -> (Point3, Point3) {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(&r);
    const EPS: f64 = 1e-300;

    let (s, t);
    if a <= EPS && e <= EPS {
        return (*p1, *p2);
    }
    if a <= EPS {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(&r);
        if e <= EPS {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(&d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    (p1 + d1 * s, p2 + d2 * t)
}

fn segment_crosses_triangle(p0: &Point3, p1: &Point3, t: &Triangle) -> bool {
    // Möller–Trumbore restricted to the segment parameter range.
    let dir: Vector3 = p1 - p0;
    let e1 = t.b - t.a;
    let e2 = t.c - t.a;
    let h = dir.cross(&e2);
    let det = e1.dot(&h);
    if det.abs() < 1e-15 {
        return false;
    }
    let inv = 1.0 / det;
    let s = p0 - t.a;
    let u = s.dot(&h) * inv;
    if !(0.0..=1.0).contains(&u) {
        return false;
    }
    let q = s.cross(&e1);
    let v = dir.dot(&q) * inv;
    if v < 0.0 || u + v > 1.0 {
        return false;
    }
    let param = e2.dot(&q) * inv;
    (0.0..=1.0).contains(&param)
}

/// Euclidean distance between segment `p0p1` and the closed triangle `t`.
pub fn segment_triangle_distance(p0: &Point3, p1: &Point3, t: &Triangle) -> f64 {
    if segment_crosses_triangle(p0, p1, t) {
        return 0.0;
    }
    let mut best = (closest_point_on_triangle(p0, t) - p0)
        .norm()
        .min((closest_point_on_triangle(p1, t) - p1).norm());
    for (a, b) in [(t.a, t.b), (t.b, t.c), (t.c, t.a)] {
        let (c1, c2) = closest_points_segment_segment(p0, p1, &a, &b);
        best = best.min((c1 - c2).norm());
    }
    best
}

/// Parameter intervals of `[0, 1]` along the segment lying outside every ball.
fn uncovered_intervals(seg: &Segment, exempt: &[Ball]) -> Vec<(f64, f64)> {
    let d = seg.p1 - seg.p0;
    let a = d.norm_squared();
    let mut covered: Vec<(f64, f64)> = Vec::new();
    for ball in exempt {
        let m = seg.p0 - ball.center;
        if a == 0.0 {
            if m.norm() <= ball.radius {
                covered.push((0.0, 1.0));
            }
            continue;
        }
        let b = m.dot(&d);
        let c = m.norm_squared() - ball.radius * ball.radius;
        let disc = b * b - a * c;
        if disc < 0.0 {
            continue;
        }
        let root = disc.sqrt();
        let lo = ((-b - root) / a).max(0.0);
        let hi = ((-b + root) / a).min(1.0);
        if lo <= hi {
            covered.push((lo, hi));
        }
    }
    covered.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut free = Vec::new();
    let mut cursor = 0.0;
    for (lo, hi) in covered {
        if lo > cursor {
            free.push((cursor, lo));
        }
        cursor = f64::max(cursor, hi);
    }
    if cursor < 1.0 {
        free.push((cursor, 1.0));
    }
    free
}

/// True iff the capsule `seg` touches `mesh` anywhere outside the exempt balls.
///
/// The parts of the segment inside an exempt ball are removed before testing, so adding
/// a ball can only turn a hit into a miss.
pub fn segment_mesh_intersects(seg: &Segment, mesh: &TriMesh, exempt: &[Ball]) -> bool {
    let reach = seg.radius + TOUCH_EPS;
    let bounds = mesh.bounds();
    if seg.distance_to_point(&bounds.center) > bounds.radius + reach {
        return false;
    }
    for (lo, hi) in uncovered_intervals(seg, exempt) {
        let piece = Segment::new(seg.point_at(lo), seg.point_at(hi), seg.radius);
        for i in 0..mesh.faces().len() {
            let fb = mesh.face_bounds(i);
            if piece.distance_to_point(&fb.center) > fb.radius + reach {
                continue;
            }
            let t = mesh.triangle(i);
            if segment_triangle_distance(&piece.p0, &piece.p1, &t) <= reach {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::make_box;

    fn p(x: f64, y: f64, z: f64) -> Point3 {
        Point3::new(x, y, z)
    }

    fn unit_box() -> TriMesh {
        make_box(Point3::origin(), Vector3::new(0.5, 0.5, 0.5)).unwrap()
    }

    #[test]
    fn far_segment_misses() {
        let s = Segment::new(p(3.0, 3.0, 3.0), p(4.0, 5.0, 3.0), 0.0);
        assert!(!segment_mesh_intersects(&s, &unit_box(), &[]));
    }

    #[test]
    fn piercing_face_centroid_hits() {
        let s = Segment::new(p(0.0, 0.0, 2.0), p(0.0, 0.0, 0.0), 0.0);
        assert!(segment_mesh_intersects(&s, &unit_box(), &[]));
    }

    #[test]
    fn touching_endpoint_exempted_by_ball() {
        let tip = p(0.1, 0.2, 0.5);
        let s = Segment::new(p(0.1, 0.2, 1.5), tip, 0.0);
        let m = unit_box();
        assert!(segment_mesh_intersects(&s, &m, &[]));
        let ball = Ball {
            center: tip,
            radius: 0.01,
        };
        assert!(!segment_mesh_intersects(&s, &m, &[ball]));
    }

    #[test]
    fn capsule_radius_counts() {
        let s = Segment::new(p(-1.0, 0.0, 0.6), p(1.0, 0.0, 0.6), 0.05);
        assert!(!segment_mesh_intersects(&s, &unit_box(), &[]));
        let s = Segment::new(p(-1.0, 0.0, 0.6), p(1.0, 0.0, 0.6), 0.11);
        assert!(segment_mesh_intersects(&s, &unit_box(), &[]));
    }

    #[test]
    fn segment_lying_on_face_hits() {
        let s = Segment::new(p(-0.2, 0.0, 0.5), p(0.2, 0.0, 0.5), 0.0);
        assert!(segment_mesh_intersects(&s, &unit_box(), &[]));
    }

    #[test]
    fn segment_segment_skew() {
        let (a, b) = closest_points_segment_segment(
            &p(0.0, 0.0, 0.0),
            &p(1.0, 0.0, 0.0),
            &p(0.5, -1.0, 1.0),
            &p(0.5, 1.0, 1.0),
        );
        assert!((a - p(0.5, 0.0, 0.0)).norm() < 1e-12);
        assert!((b - p(0.5, 0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn uncovered_intervals_merge() {
        let s = Segment::new(p(0.0, 0.0, 0.0), p(1.0, 0.0, 0.0), 0.0);
        let balls = [
            Ball { center: p(0.0, 0.0, 0.0), radius: 0.2 },
            Ball { center: p(0.3, 0.0, 0.0), radius: 0.15 },
            Ball { center: p(1.0, 0.0, 0.0), radius: 0.1 },
        ];
        let free = uncovered_intervals(&s, &balls);
        assert_eq!(free.len(), 1);
        assert!((free[0].0 - 0.45).abs() < 1e-12 && (free[0].1 - 0.9).abs() < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_point(r: f64) -> impl Strategy<Value = Point3> {
            (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Point3::new(x, y, z))
        }

        proptest! {
            #[test]
            fn exemption_is_monotone(
                a in arb_point(1.5), b in arb_point(1.5),
                c1 in arb_point(1.0), r1 in 0.0..0.6f64,
                c2 in arb_point(1.0), r2 in 0.0..0.6f64,
            ) {
                let m = unit_box();
                let s = Segment::new(a, b, 0.0);
                let one = [Ball { center: c1, radius: r1 }];
                let two = [one[0], Ball { center: c2, radius: r2 }];
                let none = segment_mesh_intersects(&s, &m, &[]);
                let with_one = segment_mesh_intersects(&s, &m, &one);
                let with_two = segment_mesh_intersects(&s, &m, &two);
                prop_assert!(none || !with_one);
                prop_assert!(with_one || !with_two);
            }

            #[test]
            fn segment_triangle_distance_bounds_sampled(
                a in arb_point(1.0), b in arb_point(1.0),
                t0 in arb_point(1.0), t1 in arb_point(1.0), t2 in arb_point(1.0),
            ) {
                let Ok(t) = Triangle::new(t0, t1, t2) else { return Ok(()) };
                let d = segment_triangle_distance(&a, &b, &t);
                // every sampled segment point is at least `d` away, and some come close
                let mut best = f64::INFINITY;
                for i in 0..=200 {
                    let q = a + (b - a) * (i as f64 / 200.0);
                    let e = (closest_point_on_triangle(&q, &t) - q).norm();
                    prop_assert!(e + 1e-9 >= d);
                    best = best.min(e);
                }
                prop_assert!(best - d <= (b - a).norm() / 200.0 + 1e-9);
            }
        }
    }
}
