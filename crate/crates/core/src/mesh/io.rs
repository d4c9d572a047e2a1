//! Plain-text mesh and field formats.
//!
//! Mesh: `V vertices T triangles B boundary-edges`, then `x y` lines, `i j k region_tag`
//! lines and `i j gamma_index` lines. Field: `vertex_index value` lines. Floats are written
//! in shortest round-trip form, so read-then-write reproduces the text exactly.

use std::fmt::Write as _;

use super::{BoundaryEdge, Mesh};
use crate::error::{Error, Result};
use crate::fem::ScalarField;
use crate::tensors::Region;

pub fn write_mesh(mesh: &Mesh) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{} vertices {} triangles {} boundary-edges",
        mesh.n_vertices(),
        mesh.n_triangles(),
        mesh.boundary_edges().len()
    );
    for p in mesh.vertices() {
        let _ = writeln!(s, "{:?} {:?}", p[0], p[1]);
    }
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let _ = writeln!(s, "{} {} {} {}", tri[0], tri[1], tri[2], mesh.region(t).code());
    }
    for e in mesh.boundary_edges() {
        let _ = writeln!(s, "{} {} {}", e.a, e.b, e.component);
    }
    s
}

fn bad(line: usize, msg: impl Into<String>) -> Error {
    Error::MeshFormat { line, msg: msg.into() }
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| bad(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| bad(line, format!("cannot parse {what}")))
}

pub fn read_mesh(text: &str) -> Result<Mesh> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (ln, header) = lines.next().ok_or_else(|| bad(1, "empty input"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 6 || h[1] != "vertices" || h[3] != "triangles" || h[5] != "boundary-edges" {
        return Err(bad(ln, "expected `V vertices T triangles B boundary-edges`"));
    }
    let nv: usize = parse_num(Some(h[0]), ln, "vertex count")?;
    let nt: usize = parse_num(Some(h[2]), ln, "triangle count")?;
    let nb: usize = parse_num(Some(h[4]), ln, "boundary-edge count")?;
    let mut next = |what: &str| lines.next().ok_or_else(|| bad(0, format!("unexpected end of input reading {what}")));
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = next("vertices")?;
        let mut it = l.split_whitespace();
        vertices.push([parse_num(it.next(), ln, "x")?, parse_num(it.next(), ln, "y")?]);
    }
    let mut triangles = Vec::with_capacity(nt);
    let mut region = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, l) = next("triangles")?;
        let mut it = l.split_whitespace();
        let tri: [usize; 3] = [
            parse_num(it.next(), ln, "i")?,
            parse_num(it.next(), ln, "j")?,
            parse_num(it.next(), ln, "k")?,
        ];
        if tri.iter().any(|&v| v >= nv) {
            return Err(bad(ln, "vertex index out of range"));
        }
        let code: u32 = parse_num(it.next(), ln, "region tag")?;
        region.push(Region::from_code(code).ok_or_else(|| bad(ln, "region tag must be 0, 1 or 2"))?);
        triangles.push(tri);
    }
    let mut boundary = Vec::with_capacity(nb);
    for _ in 0..nb {
        let (ln, l) = next("boundary edges")?;
        let mut it = l.split_whitespace();
        boundary.push(BoundaryEdge {
            a: parse_num(it.next(), ln, "i")?,
            b: parse_num(it.next(), ln, "j")?,
            component: parse_num(it.next(), ln, "gamma index")?,
        });
    }
    let h = estimate_h(&vertices, &triangles);
    Mesh::from_parts(vertices, triangles, boundary, h)?.with_regions(region)
}

fn estimate_h(vertices: &[[f64; 2]], triangles: &[[usize; 3]]) -> f64 {
    let mut h: f64 = 0.0;
    for t in triangles {
        for k in 0..3 {
            h = h.max(super::dist(vertices[t[k]], vertices[t[(k + 1) % 3]]));
        }
    }
    h
}

pub fn write_field(field: &ScalarField) -> String {
    let mut s = String::new();
    for (i, v) in field.values().iter().enumerate() {
        let _ = writeln!(s, "{i} {v:?}");
    }
    s
}

/// Reads a field written for `mesh`; every vertex must appear exactly once.
pub fn read_field(mesh: &Mesh, text: &str) -> Result<ScalarField> {
    let mut values = vec![f64::NAN; mesh.n_vertices()];
    let mut seen = vec![false; mesh.n_vertices()];
    for (i, l) in text.lines().enumerate() {
        if l.trim().is_empty() {
            continue;
        }
        let mut it = l.split_whitespace();
        let idx: usize = parse_num(it.next(), i + 1, "vertex index")?;
        let v: f64 = parse_num(it.next(), i + 1, "value")?;
        if idx >= values.len() || seen[idx] {
            return Err(bad(i + 1, "vertex index out of range or repeated"));
        }
        seen[idx] = true;
        values[idx] = v;
    }
    if seen.iter().any(|s| !s) {
        return Err(bad(0, "field does not cover every vertex"));
    }
    Ok(ScalarField::new(mesh, values))
}
