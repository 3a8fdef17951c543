use std::collections::HashMap;

use super::{Point3, TriMesh, Vector3};
use crate::error::{Error, Result};

pub const MAX_ICOSPHERE_SUBDIV: usize = 6;

/// Closed axis-aligned box with 8 vertices and 12 outward-facing triangles.
pub fn make_box(center: Point3, half_extents: Vector3) -> Result<TriMesh> {
    if !half_extents.iter().all(|&h| h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidGeometry(format!(
            "box half-extents must be positive, got {:?}",
            half_extents.as_slice()
        )));
    }
    let (hx, hy, hz) = (half_extents.x, half_extents.y, half_extents.z);
    // bit 0 -> x, bit 1 -> y, bit 2 -> z
    let vertices = (0..8)
        .map(|i| {
            let sx = if i & 1 == 0 { -hx } else { hx };
            let sy = if i & 2 == 0 { -hy } else { hy };
            let sz = if i & 4 == 0 { -hz } else { hz };
            center + Vector3::new(sx, sy, sz)
        })
        .collect();
    let faces = vec![
        // -x
        [0, 4, 6],
        [0, 6, 2],
        // +x
        [1, 3, 7],
        [1, 7, 5],
        // -y
        [0, 1, 5],
        [0, 5, 4],
        // +y
        [2, 6, 7],
        [2, 7, 3],
        // -z
        [0, 2, 3],
        [0, 3, 1],
        // +z
        [4, 5, 7],
        [4, 7, 6],
    ];
    TriMesh::new("box", vertices, faces)
}

/// Icosahedron subdivided `subdiv` times, every vertex pushed out to `radius`.
/// Produces `20 * 4^subdiv` faces.
pub fn make_icosphere(center: Point3, radius: f64, subdiv: usize) -> Result<TriMesh> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidGeometry(format!(
            "icosphere radius must be positive, got {radius}"
        )));
    }
    if subdiv > MAX_ICOSPHERE_SUBDIV {
        return Err(Error::InvalidGeometry(format!(
            "icosphere subdivision {subdiv} out of range 0..={MAX_ICOSPHERE_SUBDIV}"
        )));
    }

    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut dirs: Vec<Vector3> = [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|v| Vector3::from(*v).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdiv {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, dirs: &mut Vec<Vector3>| -> usize {
            let key = (a.min(b), a.max(b));
            *midpoints.entry(key).or_insert_with(|| {
                dirs.push(((dirs[a] + dirs[b]) * 0.5).normalize());
                dirs.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut dirs);
            let bc = midpoint(b, c, &mut dirs);
            let ca = midpoint(c, a, &mut dirs);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }

    let vertices = dirs.into_iter().map(|d| center + d * radius).collect();
    TriMesh::new("icosphere", vertices, faces)
}
