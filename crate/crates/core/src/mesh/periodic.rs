//! Square periodic cells.
//!
//! A disk or ellipse mesh is embedded in a square by blending its boundary loop into the
//! square along matching parameters; opposite sides of the square then carry matching
//! vertices, which are identified through the periodic vertex map. The original triangles are
//! kept unchanged (same indices, same order) at the start of the new mesh.

use std::f64::consts::PI;

use super::{dist, Mesh, Point};
use crate::error::{Error, Result};

fn square_point(center: Point, half: f64, t: f64) -> Point {
    let (c, s) = (t.cos(), t.sin());
    let k = half / c.abs().max(s.abs());
    [center[0] + k * c, center[1] + k * s]
}

/// Embeds a mesh with one star-shaped boundary loop (vertex count a multiple of 8,
/// mirror-symmetric about both axes through `center`) into the square of half-width `half`.
pub fn periodic_cell_around(mesh: &Mesh, center: Point, half: f64) -> Result<Mesh> {
    if mesh.n_components() != 1 {
        return Err(Error::InvalidArgument("periodic embedding needs a single boundary loop".into()));
    }
    let mut loop_v: Vec<(f64, usize)> = Vec::new();
    let is_b = mesh.is_boundary_vertex();
    for (i, p) in mesh.vertices().iter().enumerate() {
        if is_b[i] {
            let mut a = (p[1] - center[1]).atan2(p[0] - center[0]);
            if a < -1e-12 {
                a += 2.0 * PI;
            }
            loop_v.push((a.max(0.0), i));
        }
    }
    loop_v.sort_by(|x, y| x.0.total_cmp(&y.0));
    let m = loop_v.len();
    if m % 8 != 0 || loop_v[0].0 > 1e-9 {
        return Err(Error::InvalidArgument(
            "boundary loop must have a multiple of 8 vertices and one on the positive x axis".into(),
        ));
    }
    let far = loop_v.iter().map(|(_, i)| dist(mesh.vertices()[*i], center)).fold(0.0, f64::max);
    if half <= far {
        return Err(Error::InvalidArgument("square must strictly contain the mesh".into()));
    }
    let spacing = mesh.boundary_length() / m as f64;
    let gap = (0..m)
        .map(|j| dist(mesh.vertices()[loop_v[j].1], square_point(center, half, 2.0 * PI * j as f64 / m as f64)))
        .fold(0.0, f64::max);
    let layers = ((gap / spacing).ceil() as usize).max(1);
    let mut vertices = mesh.vertices().to_vec();
    let mut rows: Vec<Vec<usize>> = vec![loop_v.iter().map(|(_, i)| *i).collect()];
    for l in 1..=layers {
        let s = l as f64 / layers as f64;
        let start = vertices.len();
        for j in 0..m {
            let b = mesh.vertices()[loop_v[j].1];
            let q = square_point(center, half, 2.0 * PI * j as f64 / m as f64);
            vertices.push([(1.0 - s) * b[0] + s * q[0], (1.0 - s) * b[1] + s * q[1]]);
        }
        rows.push((start..start + m).collect());
    }
    let mut triangles = mesh.triangles().to_vec();
    let mut zones: Vec<Point> = (0..mesh.n_triangles()).map(|t| mesh.zone_point(t)).collect();
    for l in 0..layers {
        for j in 0..m {
            let (a, b) = (rows[l][j], rows[l][(j + 1) % m]);
            let (d, c) = (rows[l + 1][j], rows[l + 1][(j + 1) % m]);
            let quarter = (4 * j) / m;
            let pair = if quarter % 2 == 0 { [[a, b, c], [a, c, d]] } else { [[a, b, d], [b, c, d]] };
            for tri in pair {
                zones.push(super::centroid([vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]]));
                triangles.push(tri);
            }
        }
    }
    let outer = &rows[layers];
    let mut master: Vec<usize> = (0..vertices.len()).collect();
    let (q1, q3, q5, q7) = (m / 8, 3 * m / 8, 5 * m / 8, 7 * m / 8);
    for j in 0..m {
        let target = if j == q1 || j == q3 || j == q5 || j == q7 {
            q1
        } else if j > q3 && j < q5 {
            (m / 2 + m - j) % m
        } else if j > q5 && j < q7 {
            m - j
        } else {
            j
        };
        master[outer[j]] = outer[target];
    }
    let h = mesh.h().max(spacing);
    let regions = mesh.regions().to_vec();
    let mut out = Mesh::new(vertices, triangles, h)?.with_zone_points(zones).with_periodic(master);
    let mut reg = regions;
    reg.resize(out.n_triangles(), crate::tensors::Region::Background);
    out = out.with_regions(reg)?;
    Ok(out)
}

/// Tensor grid whose opposite sides are identified. `parity` shifts the diagonal pattern so
/// that a grid extended outward keeps the triangles of the original grid.
pub fn periodic_grid(xs: &[f64], ys: &[f64], parity: usize) -> Result<Mesh> {
    let base = super::grid::tensor_grid_with_parity(xs, ys, parity)?;
    let nx = xs.len();
    let ny = ys.len();
    let mut master: Vec<usize> = (0..base.n_vertices()).collect();
    for j in 0..ny {
        for i in 0..nx {
            let mi = if i == nx - 1 { 0 } else { i };
            let mj = if j == ny - 1 { 0 } else { j };
            master[j * nx + i] = mj * nx + mi;
        }
    }
    Ok(base.with_periodic(master))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::rings::RingLayout;

    #[test]
    fn ring_mesh_embeds_into_square() {
        let disk = RingLayout::graded([0.0, 0.0], 2.0, &[1.0], 0.1).unwrap().build().unwrap();
        let cell = periodic_cell_around(&disk, [0.0, 0.0], 3.0).unwrap();
        assert!((cell.total_area() - 36.0).abs() < 1e-9);
        for t in 0..disk.n_triangles() {
            assert_eq!(cell.triangles()[t], disk.triangles()[t]);
        }
        let map = cell.periodic_map().unwrap();
        for (v, &mv) in map.iter().enumerate() {
            if mv != v {
                let (p, q) = (cell.vertices()[v], cell.vertices()[mv]);
                let dx = (p[0] - q[0]).abs();
                let dy = (p[1] - q[1]).abs();
                let ok = |d: f64| d < 1e-9 || (d - 6.0).abs() < 1e-9;
                assert!(ok(dx) && ok(dy), "{p:?} {q:?}");
            }
        }
    }
}
