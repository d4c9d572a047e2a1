//! Triangle meshes with phase tags, boundary components and an optional periodic vertex map.
//!
//! Meshers: concentric rings for disk domains ([`rings`]), confocal elliptic grids
//! ([`confocal`]), tensor-product rectangles ([`grid`]), constrained Delaunay fill for
//! polygonal inclusions ([`polygon`]) and square periodic cells built around any of these
//! ([`periodic`]).

pub mod confocal;
pub mod grading;
pub mod grid;
mod io;
pub mod periodic;
pub mod polygon;
pub mod rings;

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};
use crate::tensors::Region;

pub use io::{read_field, read_mesh, write_field, write_mesh};

static NEXT_GEOMETRY: AtomicU64 = AtomicU64::new(1);

pub type Point = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub component: usize,
}

/// Per-triangle geometric data: area and gradients of the three barycentric functions.
#[derive(Clone, Copy, Debug)]
pub struct TriGeom {
    pub area: f64,
    pub grad: [[f64; 2]; 3],
}

#[derive(Clone, Debug)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    geom: Vec<TriGeom>,
    region: Vec<Region>,
    zone_points: Vec<Point>,
    boundary: Vec<BoundaryEdge>,
    h: f64,
    periodic: Option<Vec<usize>>,
    geometry_id: u64,
}

fn tri_geom(p: [Point; 3]) -> TriGeom {
    let [a, b, c] = p;
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    let inv = 1.0 / det;
    TriGeom {
        area: 0.5 * det,
        grad: [
            [(b[1] - c[1]) * inv, (c[0] - b[0]) * inv],
            [(c[1] - a[1]) * inv, (a[0] - c[0]) * inv],
            [(a[1] - b[1]) * inv, (b[0] - a[0]) * inv],
        ],
    }
}

impl Mesh {
    /// Builds a mesh, orienting triangles counter-clockwise and extracting boundary components.
    pub fn new(vertices: Vec<Point>, mut triangles: Vec<[usize; 3]>, h: f64) -> Result<Mesh> {
        for (k, t) in triangles.iter_mut().enumerate() {
            if t.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::InvalidArgument(format!("triangle {k} references a missing vertex")));
            }
            let g = tri_geom([vertices[t[0]], vertices[t[1]], vertices[t[2]]]);
            if g.area < 0.0 {
                t.swap(1, 2);
            }
        }
        let boundary = boundary_loops(&vertices, &triangles);
        Self::from_parts(vertices, triangles, boundary, h)
    }

    fn from_parts(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        boundary: Vec<BoundaryEdge>,
        h: f64,
    ) -> Result<Mesh> {
        let mut geom = Vec::with_capacity(triangles.len());
        let mut zone_points = Vec::with_capacity(triangles.len());
        for (k, t) in triangles.iter().enumerate() {
            let p = [vertices[t[0]], vertices[t[1]], vertices[t[2]]];
            let g = tri_geom(p);
            if !(g.area > 0.0) {
                return Err(Error::InvalidArgument(format!("triangle {k} is degenerate or inverted")));
            }
            geom.push(g);
            zone_points.push(centroid(p));
        }
        let n = triangles.len();
        Ok(Mesh {
            vertices,
            triangles,
            geom,
            region: vec![Region::Background; n],
            zone_points,
            boundary,
            h,
            periodic: None,
            geometry_id: NEXT_GEOMETRY.fetch_add(1, Ordering::Relaxed),
        })
    }

    /// Replaces the representative point of each triangle used for phase and conductivity lookup.
    ///
    /// Meshers pass a point in the middle of the geometric band the triangle belongs to, so that
    /// classification never depends on how a chord cuts a curved interface.
    pub fn with_zone_points(mut self, pts: Vec<Point>) -> Self {
        assert_eq!(pts.len(), self.triangles.len());
        self.zone_points = pts;
        self
    }

    pub(crate) fn with_periodic(mut self, master: Vec<usize>) -> Self {
        assert_eq!(master.len(), self.vertices.len());
        self.periodic = Some(master);
        self
    }

    /// Copy with new phase tags; geometry (and hence field compatibility) is shared.
    pub fn retagged(&self, classify: impl Fn(Point) -> Region) -> Mesh {
        let mut m = self.clone();
        m.region = self.zone_points.iter().map(|p| classify(*p)).collect();
        m
    }

    pub fn with_regions(mut self, region: Vec<Region>) -> Result<Mesh> {
        if region.len() != self.triangles.len() {
            return Err(Error::DimensionMismatch("one region tag per triangle required".into()));
        }
        self.region = region;
        Ok(self)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn geom(&self, t: usize) -> &TriGeom {
        &self.geom[t]
    }

    pub fn regions(&self) -> &[Region] {
        &self.region
    }

    pub fn region(&self, t: usize) -> Region {
        self.region[t]
    }

    pub fn zone_point(&self, t: usize) -> Point {
        self.zone_points[t]
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn periodic_map(&self) -> Option<&[usize]> {
        self.periodic.as_deref()
    }

    pub fn geometry_id(&self) -> u64 {
        self.geometry_id
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.triangles[t];
        centroid([self.vertices[a], self.vertices[b], self.vertices[c]])
    }

    /// Gradient of a P1 field on triangle `t`.
    pub fn gradient(&self, t: usize, values: &[f64]) -> [f64; 2] {
        let g = &self.geom[t];
        let tri = self.triangles[t];
        let mut out = [0.0; 2];
        for k in 0..3 {
            out[0] += values[tri[k]] * g.grad[k][0];
            out[1] += values[tri[k]] * g.grad[k][1];
        }
        out
    }

    pub fn total_area(&self) -> f64 {
        self.geom.iter().map(|g| g.area).sum()
    }

    pub fn n_components(&self) -> usize {
        self.boundary.iter().map(|e| e.component + 1).max().unwrap_or(0)
    }

    pub fn is_boundary_vertex(&self) -> Vec<bool> {
        let mut b = vec![false; self.vertices.len()];
        for e in &self.boundary {
            b[e.a] = true;
            b[e.b] = true;
        }
        b
    }

    pub fn boundary_length(&self) -> f64 {
        self.boundary.iter().map(|e| dist(self.vertices[e.a], self.vertices[e.b])).sum()
    }

    pub fn nearest_vertex(&self, p: Point) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, v) in self.vertices.iter().enumerate() {
            let d = dist(*v, p);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    /// Smallest interior angle over all triangles, in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        let mut worst = 180.0_f64;
        for t in &self.triangles {
            let p = [self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]]];
            for k in 0..3 {
                let a = p[k];
                let b = p[(k + 1) % 3];
                let c = p[(k + 2) % 3];
                let u = [b[0] - a[0], b[1] - a[1]];
                let v = [c[0] - a[0], c[1] - a[1]];
                let cos = (u[0] * v[0] + u[1] * v[1]) / ((u[0].hypot(u[1])) * (v[0].hypot(v[1])));
                worst = worst.min(cos.clamp(-1.0, 1.0).acos().to_degrees());
            }
        }
        worst
    }

    /// Triangles carrying an inclusion tag.
    pub fn inclusion_triangles(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.triangles.len()).filter(|&t| self.region[t].is_inclusion())
    }

    /// Distance from `p` to the nearest vertex of an inclusion triangle.
    pub fn distance_to_inclusions(&self, p: Point) -> f64 {
        let mut d = f64::INFINITY;
        for t in self.inclusion_triangles() {
            for &v in &self.triangles[t] {
                d = d.min(dist(self.vertices[v], p));
            }
        }
        d
    }
}

pub fn centroid(p: [Point; 3]) -> Point {
    [(p[0][0] + p[1][0] + p[2][0]) / 3.0, (p[0][1] + p[1][1] + p[2][1]) / 3.0]
}

pub fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Boundary edges (edges of exactly one triangle) oriented with the domain on their left,
/// grouped into connected components. Component 0 contains the vertex of largest x.
fn boundary_loops(vertices: &[Point], triangles: &[[usize; 3]]) -> Vec<BoundaryEdge> {
    let mut count: HashMap<(usize, usize), (usize, (usize, usize))> = HashMap::new();
    for t in triangles {
        for k in 0..3 {
            let (a, b) = (t[k], t[(k + 1) % 3]);
            let key = (a.min(b), a.max(b));
            count.entry(key).or_insert((0, (a, b))).0 += 1;
        }
    }
    let mut edges: Vec<(usize, usize)> =
        count.into_values().filter(|(c, _)| *c == 1).map(|(_, e)| e).collect();
    edges.sort_unstable();
    // union-find over boundary vertices
    let mut parent: HashMap<usize, usize> = HashMap::new();
    fn find(p: &mut HashMap<usize, usize>, x: usize) -> usize {
        let mut r = x;
        while let Some(&q) = p.get(&r) {
            if q == r {
                break;
            }
            r = q;
        }
        let mut y = x;
        while let Some(&q) = p.get(&y) {
            if q == r {
                break;
            }
            p.insert(y, r);
            y = q;
        }
        r
    }
    for &(a, b) in &edges {
        parent.entry(a).or_insert(a);
        parent.entry(b).or_insert(b);
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent.insert(ra.max(rb), ra.min(rb));
        }
    }
    let mut roots: Vec<(usize, f64)> = Vec::new();
    for &(a, _) in &edges {
        let r = find(&mut parent, a);
        match roots.iter_mut().find(|(q, _)| *q == r) {
            Some(entry) => entry.1 = entry.1.max(vertices[a][0]),
            None => roots.push((r, vertices[a][0])),
        }
    }
    roots.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    edges
        .into_iter()
        .map(|(a, b)| {
            let r = find(&mut parent, a);
            let component = roots.iter().position(|(q, _)| *q == r).expect("root registered");
            BoundaryEdge { a, b, component }
        })
        .collect()
}
