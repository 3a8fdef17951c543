//! ASCII OFF mesh import/export (triangles only).

use std::fmt::Write as _;

use super::{Point3, TriMesh};
use crate::error::{Error, Result};

pub fn read_off(name: &str, text: &str) -> Result<TriMesh> {
    let mut lines = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty());

    let header = lines.next().ok_or_else(|| Error::Parse("OFF: empty input".into()))?;
    // "OFF" may share its line with the counts.
    let counts_line = match header.strip_prefix("OFF") {
        Some(rest) if rest.trim().is_empty() => lines
            .next()
            .ok_or_else(|| Error::Parse("OFF: missing counts line".into()))?,
        Some(rest) => rest.trim(),
        None => return Err(Error::Parse(format!("OFF: bad header `{header}`"))),
    };
    let counts = parse_numbers::<usize>(counts_line, "counts")?;
    if counts.len() < 2 {
        return Err(Error::Parse("OFF: counts line needs vertex and face counts".into()));
    }
    let (nv, nf) = (counts[0], counts[1]);

    let mut vertices = Vec::with_capacity(nv);
    for i in 0..nv {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("OFF: missing vertex {i}")))?;
        let xyz = parse_numbers::<f64>(line, "vertex")?;
        if xyz.len() < 3 {
            return Err(Error::Parse(format!("OFF: vertex {i} needs 3 coordinates")));
        }
        vertices.push(Point3::new(xyz[0], xyz[1], xyz[2]));
    }

    let mut faces = Vec::with_capacity(nf);
    for i in 0..nf {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("OFF: missing face {i}")))?;
        let idx = parse_numbers::<usize>(line, "face")?;
        match idx.as_slice() {
            [3, a, b, c, ..] => faces.push([*a, *b, *c]),
            [n, ..] => {
                return Err(Error::Parse(format!(
                    "OFF: face {i} has {n} vertices, only triangles are supported"
                )))
            }
            [] => return Err(Error::Parse(format!("OFF: face {i} is empty"))),
        }
    }
    TriMesh::new(name, vertices, faces)
}

fn parse_numbers<T: std::str::FromStr>(line: &str, what: &str) -> Result<Vec<T>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<T>()
                .map_err(|_| Error::Parse(format!("OFF: bad {what} token `{tok}`")))
        })
        .collect()
}

pub fn write_off(mesh: &TriMesh) -> String {
    let mut out = String::new();
    out.push_str("OFF\n");
    let _ = writeln!(out, "{} {} 0", mesh.vertices().len(), mesh.faces().len());
    for v in mesh.vertices() {
        let _ = writeln!(out, "{} {} {}", v.x, v.y, v.z);
    }
    for [a, b, c] in mesh.faces() {
        let _ = writeln!(out, "3 {a} {b} {c}");
    }
    out
}
