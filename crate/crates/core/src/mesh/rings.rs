//! Concentric-ring triangulation of a disk.
//!
//! Every ring is a closed polygon of mesh edges, so circular interfaces placed on rings are
//! resolved exactly (up to the polygonal chord). Consecutive rings are stitched by walking
//! both in angle order and always closing the shorter diagonal.

use std::f64::consts::PI;

use super::grading::{graded_nodes_local, unique_sorted};
use super::{Mesh, Point};
use crate::error::{Error, Result};

/// Ring radii and per-ring vertex counts around `center`.
#[derive(Clone, Debug)]
pub struct RingLayout {
    pub center: Point,
    /// Strictly increasing positive radii; the last one is the domain boundary.
    pub radii: Vec<f64>,
    /// Vertex count per ring; the outer count is a multiple of 8 so that the boundary is
    /// mirror-symmetric and contains the diagonal directions.
    pub counts: Vec<usize>,
}

/// Aspect ratio allowed between the angular and radial spacing of a ring.
const ASPECT: f64 = 2.0;

impl RingLayout {
    /// Graded layout with rings on every interface radius in `interfaces`.
    ///
    /// Every band between consecutive interfaces gets at least two layers of cells.
    pub fn graded(center: Point, outer: f64, interfaces: &[f64], h: f64) -> Result<RingLayout> {
        Self::graded_local(center, outer, interfaces, h, h)
    }

    /// Spacing `near` at the interfaces and the center, growing to `far` away from them.
    pub fn graded_local(center: Point, outer: f64, interfaces: &[f64], near: f64, far: f64) -> Result<RingLayout> {
        let h = far.max(near);
        if !(near > 0.0) {
            return Err(Error::InvalidArgument("mesh size must be positive".into()));
        }
        let mut breaks = vec![0.0, outer];
        breaks.extend(interfaces.iter().copied().filter(|r| *r > 0.0 && *r < outer));
        let breaks = unique_sorted(breaks, 1e-12);
        let radii: Vec<f64> = graded_nodes_local(&breaks, near, h, 1.2, 2).into_iter().skip(1).collect();
        let mut counts = Vec::with_capacity(radii.len());
        for (k, &r) in radii.iter().enumerate() {
            let inner = if k == 0 { r } else { r - radii[k - 1] };
            let outer_gap = if k + 1 < radii.len() { radii[k + 1] - r } else { inner };
            let arc = h.min(ASPECT * inner.min(outer_gap));
            let m = ((2.0 * PI * r / arc).ceil() as usize).max(6);
            counts.push(m + m % 2);
        }
        let last = counts.len() - 1;
        counts[last] = counts[last].div_ceil(8) * 8;
        Ok(RingLayout { center, radii, counts })
    }

    pub fn build(&self) -> Result<Mesh> {
        ring_mesh(self)
    }
}

fn ring_angles(k: usize, m: usize, outermost: bool) -> Vec<f64> {
    let offset = if outermost || k % 2 == 0 { 0.0 } else { PI / m as f64 };
    (0..m).map(|j| offset + 2.0 * PI * j as f64 / m as f64).collect()
}

pub fn ring_mesh(layout: &RingLayout) -> Result<Mesh> {
    let RingLayout { center, radii, counts } = layout;
    if radii.is_empty() || radii.len() != counts.len() {
        return Err(Error::InvalidArgument("one vertex count per ring required".into()));
    }
    let mut vertices = vec![*center];
    let mut rings: Vec<(usize, Vec<f64>)> = Vec::new();
    let nr = radii.len();
    for (k, (&r, &m)) in radii.iter().zip(counts).enumerate() {
        let ang = ring_angles(k, m, k + 1 == nr);
        let start = vertices.len();
        vertices.extend(ang.iter().map(|a| [center[0] + r * a.cos(), center[1] + r * a.sin()]));
        rings.push((start, ang));
    }
    let mut triangles = Vec::new();
    let mut zones = Vec::new();
    // central fan
    let (s0, a0) = &rings[0];
    let m0 = a0.len();
    for j in 0..m0 {
        let tri = [0, s0 + j, s0 + (j + 1) % m0];
        triangles.push(tri);
        zones.push(super::centroid([vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]]));
    }
    for k in 0..nr - 1 {
        let rmid = 0.5 * (radii[k] + radii[k + 1]);
        let band = stitch(&vertices, &rings[k], &rings[k + 1]);
        for tri in band {
            let c = super::centroid([vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]]);
            let phi = (c[1] - center[1]).atan2(c[0] - center[0]);
            zones.push([center[0] + rmid * phi.cos(), center[1] + rmid * phi.sin()]);
            triangles.push(tri);
        }
    }
    let h = radii.windows(2).map(|w| w[1] - w[0]).fold(radii[0], f64::max);
    let h = h.max(counts.iter().zip(radii).map(|(m, r)| 2.0 * PI * r / *m as f64).fold(0.0, f64::max));
    Ok(Mesh::new(vertices, triangles, h)?.with_zone_points(zones))
}

/// Triangulates the band between an inner and an outer ring.
fn stitch(v: &[Point], inner: &(usize, Vec<f64>), outer: &(usize, Vec<f64>)) -> Vec<[usize; 3]> {
    let (si, ai) = inner;
    let (so, ao) = outer;
    let (mi, mo) = (ai.len(), ao.len());
    let wrap = |a: f64, reference: f64| {
        let mut x = a;
        while x - reference > PI {
            x -= 2.0 * PI;
        }
        while x - reference <= -PI {
            x += 2.0 * PI;
        }
        x
    };
    let j0 = (0..mo)
        .min_by(|&x, &y| wrap(ao[x], ai[0]).abs().total_cmp(&wrap(ao[y], ai[0]).abs()))
        .expect("outer ring nonempty");
    let iv = |i: usize| si + i % mi;
    let ov = |j: usize| so + (j0 + j) % mo;
    let mut tris = Vec::with_capacity(mi + mo);
    let (mut i, mut j) = (0, 0);
    while i < mi || j < mo {
        let advance_inner = if i == mi {
            false
        } else if j == mo {
            true
        } else {
            let d_inner = super::dist(v[iv(i + 1)], v[ov(j)]);
            let d_outer = super::dist(v[iv(i)], v[ov(j + 1)]);
            d_inner <= d_outer
        };
        if advance_inner {
            tris.push([iv(i), iv(i + 1), ov(j)]);
            i += 1;
        } else {
            tris.push([iv(i), ov(j + 1), ov(j)]);
            j += 1;
        }
    }
    tris
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_area_and_quality() {
        let layout = RingLayout::graded([0.0, 0.0], 2.0, &[0.875, 1.0, 1.125], 0.05).unwrap();
        let m = layout.build().unwrap();
        let exact = PI * 4.0;
        assert!((m.total_area() - exact).abs() / exact < 2e-3);
        assert!(m.min_angle_deg() >= 20.0, "{}", m.min_angle_deg());
        assert_eq!(m.n_components(), 1);
        assert_eq!(m.boundary_edges().len(), *layout.counts.last().unwrap());
        for r in [0.875, 1.0, 1.125] {
            assert!(layout.radii.iter().any(|x| (x - r).abs() < 1e-14));
        }
    }

    #[test]
    fn thin_bands_get_two_layers() {
        let layout = RingLayout::graded([0.0, 0.0], 2.0, &[1.0 - 1.0 / 64.0, 1.0, 1.0 + 1.0 / 64.0], 0.05).unwrap();
        let inside = layout.radii.iter().filter(|r| **r > 1.0 - 1.0 / 64.0 && **r < 1.0).count();
        assert!(inside >= 1);
        let m = layout.build().unwrap();
        assert!(m.min_angle_deg() >= 20.0, "{}", m.min_angle_deg());
    }
}
