//! Triangle-mesh geometry: surfaces, exact point/triangle proximity and link collision.
//!
//! All queries are pure functions over immutable values. Distance queries scan every
//! face of a mesh; there is deliberately no spatial index, so query cost grows linearly
//! with the polygon count of the surface.

mod off;
mod primitives;
mod segment;

pub use off::{read_off, write_off};
pub use primitives::{make_box, make_icosphere, MAX_ICOSPHERE_SUBDIV};
pub use segment::{
    closest_points_segment_segment, segment_mesh_intersects, segment_triangle_distance, Ball,
    Segment,
};

use crate::error::{Error, Result};

pub type Point3 = nalgebra::Point3<f64>;
pub type Vector3 = nalgebra::Vector3<f64>;

/// Smallest admissible triangle area in m².
pub const MIN_TRIANGLE_AREA: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub a: Point3,
    pub b: Point3,
    pub c: Point3,
}

impl Triangle {
    pub fn new(a: Point3, b: Point3, c: Point3) -> Result<Self> {
        let t = Triangle { a, b, c };
        let area = t.area();
        if !(area >= MIN_TRIANGLE_AREA) {
            return Err(Error::DegenerateTriangle { area });
        }
        Ok(t)
    }

    pub fn area(&self) -> f64 {
        0.5 * (self.b - self.a).cross(&(self.c - self.a)).norm()
    }

    pub fn normal(&self) -> Vector3 {
        (self.b - self.a).cross(&(self.c - self.a)).normalize()
    }

    pub fn centroid(&self) -> Point3 {
        Point3::from((self.a.coords + self.b.coords + self.c.coords) / 3.0)
    }

    /// Barycentric coordinates `(u, v, w)` of `p` projected onto the triangle plane,
    /// with `p ≈ u·a + v·b + w·c`.
    pub fn barycentric(&self, p: &Point3) -> [f64; 3] {
        let v0 = self.b - self.a;
        let v1 = self.c - self.a;
        let v2 = p - self.a;
        let d00 = v0.dot(&v0);
        let d01 = v0.dot(&v1);
        let d11 = v1.dot(&v1);
        let d20 = v2.dot(&v0);
        let d21 = v2.dot(&v1);
        let denom = d00 * d11 - d01 * d01;
        let v = (d11 * d20 - d01 * d21) / denom;
        let w = (d00 * d21 - d01 * d20) / denom;
        [1.0 - v - w, v, w]
    }
}

/// Closest point of the closed triangle `t` to `p`.
///
/// Voronoi-region case analysis: vertex regions, then edge regions, then the face
/// interior. See Ericson, *Real-Time Collision Detection*, 5.1.5.
pub fn closest_point_on_triangle(p: &Point3, t: &Triangle) -> Point3 {
    let (a, b, c) = (t.a, t.b, t.c);
    let ab = b - a;
    let ac = c - a;

    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }

    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }

    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }

    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

/// Sphere enclosing a set of points (not minimal: centroid plus max radius).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingSphere {
    pub center: Point3,
    pub radius: f64,
}

impl BoundingSphere {
    fn around(points: impl Iterator<Item = Point3> + Clone) -> Self {
        let mut n = 0usize;
        let mut sum = Vector3::zeros();
        for p in points.clone() {
            sum += p.coords;
            n += 1;
        }
        if n == 0 {
            return BoundingSphere {
                center: Point3::origin(),
                radius: 0.0,
            };
        }
        let center = Point3::from(sum / n as f64);
        let radius = points.map(|p| (p - center).norm()).fold(0.0, f64::max);
        BoundingSphere { center, radius }
    }
}

/// Indexed triangle surface.
#[derive(Debug, Clone)]
pub struct TriMesh {
    name: String,
    vertices: Vec<Point3>,
    faces: Vec<[usize; 3]>,
    bounds: BoundingSphere,
    // Per-face bounding spheres, used to skip faces that cannot matter.
    face_bounds: Vec<BoundingSphere>,
}

impl TriMesh {
    /// Builds a mesh, rejecting out-of-range indices, degenerate faces and non-finite
    /// vertices. A mesh without faces is allowed; distance queries on it fail.
    pub fn new(
        name: impl Into<String>,
        vertices: Vec<Point3>,
        faces: Vec<[usize; 3]>,
    ) -> Result<Self> {
        let name = name.into();
        if let Some(i) = vertices.iter().position(|v| !v.coords.iter().all(|x| x.is_finite())) {
            return Err(Error::InvalidMesh(format!(
                "{name}: vertex {i} has a non-finite coordinate"
            )));
        }
        let mut face_bounds = Vec::with_capacity(faces.len());
        for (fi, f) in faces.iter().enumerate() {
            if let Some(&bad) = f.iter().find(|&&i| i >= vertices.len()) {
                return Err(Error::InvalidMesh(format!(
                    "{name}: face {fi} references vertex {bad}, mesh has {}",
                    vertices.len()
                )));
            }
            let [a, b, c] = f.map(|i| vertices[i]);
            Triangle::new(a, b, c).map_err(|e| {
                Error::InvalidMesh(format!("{name}: face {fi}: {e}"))
            })?;
            face_bounds.push(BoundingSphere::around([a, b, c].into_iter()));
        }
        let bounds = BoundingSphere::around(vertices.iter().copied());
        Ok(TriMesh {
            name,
            vertices,
            faces,
            bounds,
            face_bounds,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn bounds(&self) -> BoundingSphere {
        self.bounds
    }

    pub(crate) fn face_bounds(&self, i: usize) -> BoundingSphere {
        self.face_bounds[i]
    }

    pub fn triangle(&self, i: usize) -> Triangle {
        let [a, b, c] = self.faces[i].map(|v| self.vertices[v]);
        Triangle { a, b, c }
    }

    pub fn triangles(&self) -> impl Iterator<Item = Triangle> + '_ {
        (0..self.faces.len()).map(move |i| self.triangle(i))
    }

    pub fn surface_area(&self) -> f64 {
        self.triangles().map(|t| t.area()).sum()
    }

    /// Axis-aligned bounds `(min, max)` of the vertices.
    pub fn aabb(&self) -> (Point3, Point3) {
        let mut lo = Point3::new(f64::INFINITY, f64::INFINITY, f64::INFINITY);
        let mut hi = Point3::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }
}

/// Result of a point-to-surface query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshDistance {
    pub distance: f64,
    pub closest: Point3,
    pub face: usize,
}

/// Distance from `p` to the nearest point of `mesh`, by a linear scan over all faces.
/// Ties keep the lowest face index.
pub fn distance_to_mesh(p: &Point3, mesh: &TriMesh) -> Result<MeshDistance> {
    let mut best = MeshDistance {
        distance: f64::INFINITY,
        closest: *p,
        face: usize::MAX,
    };
    for (i, t) in mesh.triangles().enumerate() {
        // a face whose bounding sphere is farther than the best hit cannot win; the
        // margin absorbs rounding in the bound
        let fb = mesh.face_bounds[i];
        if (fb.center - p).norm() - fb.radius > best.distance + 1e-9 {
            continue;
        }
        let c = closest_point_on_triangle(p, &t);
        let d = (c - p).norm();
        if d < best.distance {
            best = MeshDistance {
                distance: d,
                closest: c,
                face: i,
            };
        }
    }
    if best.face == usize::MAX {
        return Err(Error::EmptySurface(mesh.name.clone()));
    }
    Ok(best)
}
