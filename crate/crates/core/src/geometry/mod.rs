//! Inclusion families `n -> (A_n, B_n, gamma_n)` and quantitative checks of the hypotheses
//! placed on them.

mod assumptions;
mod families;
mod shape;

pub use assumptions::{assumption_report, AssumptionReport, AssumptionRow};
pub use families::{
    elliptic_xi, family_registry, isotropic_dn_norm, parse_polygon, parse_shape, unit_sphere_area, ConfocalEllipse, CustomPolygons, DiskInclusion, FamilyFactory, FamilySpec, Law, Polygon,
    RadialAnnuli, StripWidth, Strips,
};
pub use shape::{polygon_area, Domain2D, Shape};

use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};
use crate::tensors::{MatrixField, Region, SymMat};

/// Segments per closed curve when curved boundaries are polygonized.
pub const OUTLINE_SEGMENTS: usize = 256;

/// A parameterized sequence of inclusions in a fixed domain with background `gamma_0`.
pub trait InclusionFamily: Send + Sync + Debug {
    fn name(&self) -> &'static str;

    fn dim(&self) -> usize {
        2
    }

    fn domain(&self) -> Domain2D;

    /// Background conductivity (constant for every built-in family).
    fn gamma0(&self) -> SymMat {
        SymMat::identity(self.dim())
    }

    /// Phase of `p` at parameter `n`.
    fn region(&self, n: usize, p: Point) -> Region;

    /// `gamma_n(p)` for `p` in inclusion `region`. Not clamped to the contrast cap.
    fn inclusion_tensor(&self, n: usize, p: Point, region: Region) -> SymMat;

    /// `(||d_n||_{L1(A_n)}, ||d_n||_{L1(B_n)})`.
    fn l1_split(&self, n: usize) -> (f64, f64);

    fn l1_dn(&self, n: usize) -> f64 {
        let (a, b) = self.l1_split(n);
        a + b
    }

    /// `(||d_n||_{Lp(A_n)}, ||d_n||_{Lp(B_n)})`.
    fn lp_split(&self, n: usize, p: f64) -> (f64, f64);

    /// Distance between the closures of `A_n` and `B_n`; infinite when either is empty.
    fn separation(&self, n: usize) -> f64 {
        outline_separation(&self.outlines(n))
    }

    /// Width of the thinnest inclusion at parameter `n`.
    fn min_feature(&self, n: usize) -> f64;

    /// Inclusion boundary curves as closed polygons tagged with their phase.
    fn outlines(&self, n: usize) -> Vec<(Region, Vec<Point>)>;

    /// Description of an `A_n`/`B_n` overlap, if any.
    fn overlap(&self, n: usize) -> Option<String> {
        outline_overlap(&self.outlines(n))
    }

    /// `gamma_n >= gamma_0` on `A_n` and `gamma_n <= gamma_0` on `B_n`.
    fn ordering_holds(&self, n: usize) -> bool;

    /// Inclusions lie in the open safety region `K`.
    fn inside_k(&self, n: usize) -> bool {
        let k = self.domain().k;
        self.outlines(n).iter().all(|(_, l)| l.iter().all(|p| k.contains(*p)))
    }

    /// Distance from the inclusions to the outer boundary.
    fn boundary_distance(&self, n: usize) -> f64 {
        let omega = self.domain().omega;
        self.outlines(n)
            .iter()
            .flat_map(|(_, l)| l.iter())
            .map(|p| omega.boundary_distance(*p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Untagged mesh of the domain conforming to the inclusion boundaries of every `n`.
    fn base_mesh(&self, n_list: &[usize], h: f64) -> Result<Mesh>;

    /// Evaluation points in the domain outside `K`.
    fn probes(&self) -> Vec<Point> {
        self.domain().probes()
    }
}

/// `gamma_n` as a field: background `gamma_0`, inclusion values by region.
pub fn conductivity(family: &Arc<dyn InclusionFamily>, n: usize) -> MatrixField {
    let g0 = family.gamma0();
    let mut f = MatrixField::constant(g0);
    for r in [Region::A, Region::B] {
        let fam = Arc::clone(family);
        f = f.with_region(r, Arc::new(move |p| fam.inclusion_tensor(n, p, r)));
    }
    f
}

pub fn background(family: &Arc<dyn InclusionFamily>) -> MatrixField {
    MatrixField::constant(family.gamma0())
}

fn check_resolvable(family: &dyn InclusionFamily, n: usize, h: f64) -> Result<()> {
    let w = family.min_feature(n);
    if w < 0.5 * h {
        return Err(Error::UnresolvableThinRegion { width: w, half_h: 0.5 * h });
    }
    Ok(())
}

/// Phase tags of a shared base mesh for parameter `n`.
pub fn mesh_for(family: &dyn InclusionFamily, base: &Mesh, n: usize) -> Result<Mesh> {
    check_resolvable(family, n, base.h())?;
    Ok(base.retagged(|p| family.region(n, p)))
}

/// Tagged conforming mesh for a single `n`.
pub fn build_mesh(family: &dyn InclusionFamily, n: usize, h: f64) -> Result<Mesh> {
    check_resolvable(family, n, h)?;
    let base = family.base_mesh(&[n], h)?;
    mesh_for(family, &base, n)
}

/// Validates the list and the resolution for every `n` before building a shared mesh.
pub(crate) fn check_n_list(family: &dyn InclusionFamily, n_list: &[usize], h: f64) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::InvalidArgument("empty n list".into()));
    }
    for &n in n_list {
        check_resolvable(family, n, h)?;
    }
    Ok(())
}

fn seg_dist(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l2 = d[0] * d[0] + d[1] * d[1];
    let t = if l2 > 0.0 { (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0) } else { 0.0 };
    crate::mesh::dist(p, [a[0] + t * d[0], a[1] + t * d[1]])
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let (o1, o2, o3, o4) = (orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b));
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

fn segment_distance(a: Point, b: Point, c: Point, d: Point) -> f64 {
    if segments_cross(a, b, c, d) {
        return 0.0;
    }
    seg_dist(a, c, d).min(seg_dist(b, c, d)).min(seg_dist(c, a, b)).min(seg_dist(d, a, b))
}

/// Even-odd test; points on an edge count as outside.
pub fn point_in_polygon(p: Point, poly: &[Point]) -> bool {
    let n = poly.len();
    for k in 0..n {
        if seg_dist(p, poly[k], poly[(k + 1) % n]) < 1e-14 {
            return false;
        }
    }
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0] {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn edges(l: &[Point]) -> impl Iterator<Item = (Point, Point)> + '_ {
    (0..l.len()).map(move |k| (l[k], l[(k + 1) % l.len()]))
}

/// Distance between the union of `A` outlines and the union of `B` outlines.
pub fn outline_separation(outlines: &[(Region, Vec<Point>)]) -> f64 {
    let a: Vec<&Vec<Point>> = outlines.iter().filter(|(r, _)| *r == Region::A).map(|(_, l)| l).collect();
    let b: Vec<&Vec<Point>> = outlines.iter().filter(|(r, _)| *r == Region::B).map(|(_, l)| l).collect();
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    if outline_overlap(outlines).is_some() {
        return 0.0;
    }
    let mut d = f64::INFINITY;
    for la in &a {
        for lb in &b {
            for (p, q) in edges(la) {
                for (r, s) in edges(lb) {
                    d = d.min(segment_distance(p, q, r, s));
                }
            }
        }
    }
    d
}

fn interior_samples(l: &[Point]) -> Vec<Point> {
    let mut s: Vec<Point> = l.to_vec();
    s.extend(edges(l).map(|(a, b)| [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]));
    let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
    for (p, q) in edges(l) {
        let c = p[0] * q[1] - q[0] * p[1];
        a2 += c;
        cx += (p[0] + q[0]) * c;
        cy += (p[1] + q[1]) * c;
    }
    if a2.abs() > 0.0 {
        s.push([cx / (3.0 * a2), cy / (3.0 * a2)]);
    }
    s
}

/// Interior intersection between an `A` outline and a `B` outline: crossing edges, or a
/// vertex, edge midpoint or centroid of one strictly inside the other.
pub fn outline_overlap(outlines: &[(Region, Vec<Point>)]) -> Option<String> {
    for (ia, (ra, la)) in outlines.iter().enumerate() {
        for (ib, (rb, lb)) in outlines.iter().enumerate() {
            if *ra != Region::A || *rb != Region::B {
                continue;
            }
            let crossing = edges(la).any(|(p, q)| edges(lb).any(|(r, s)| segments_cross(p, q, r, s)));
            let nested = interior_samples(la).iter().any(|p| point_in_polygon(*p, lb))
                || interior_samples(lb).iter().any(|p| point_in_polygon(*p, la));
            if crossing || nested {
                return Some(format!("A outline {ia} intersects B outline {ib}"));
            }
        }
    }
    None
}
