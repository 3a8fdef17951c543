#![allow(dead_code)]

use std::sync::Arc;

use slideplan::constraint::{ConstraintSet, ContactSpec};
use slideplan::geom::{closest_point_on_triangle, make_box, Point3, TriMesh, Vector3};
use slideplan::robot::{ContactPointSpec, KinematicChain};

pub fn tip_contact(id: usize, link: usize, length: f64) -> ContactPointSpec {
    ContactPointSpec { id, link, offset: Point3::new(length, 0.0, 0.0) }
}

pub fn planar_arm(lengths: &[f64], contacts: Vec<ContactPointSpec>) -> Arc<KinematicChain> {
    Arc::new(KinematicChain::planar(Point3::origin(), lengths, contacts).unwrap())
}

/// Thick slab whose top face is the plane y = 0 over |x| ≤ 5.
pub fn floor() -> Arc<TriMesh> {
    Arc::new(make_box(Point3::new(0.0, -1.0, 0.0), Vector3::new(5.0, 1.0, 1.0)).unwrap())
}

/// Two-link unit arm whose tip slides on [`floor`].
pub fn tip_on_floor() -> ConstraintSet {
    let chain = planar_arm(&[1.0, 1.0], vec![tip_contact(0, 1, 1.0)]);
    ConstraintSet::new(chain, vec![ContactSpec::sliding(0, floor())], 1e-4).unwrap()
}

/// Minimum over every face, no pruning.
pub fn brute_force_distance(p: &Point3, mesh: &TriMesh) -> f64 {
    mesh.triangles()
        .map(|t| (closest_point_on_triangle(p, &t) - p).norm())
        .fold(f64::INFINITY, f64::min)
}
