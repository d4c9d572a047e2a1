//! Quality constrained-Delaunay meshes of convex domains containing polygonal inclusions.

use spade::{AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation};

use super::{Mesh, Point};
use crate::error::{Error, Result};

/// Meshes the convex polygon `outer` with every loop in `loops` as a chain of mesh edges.
///
/// Triangles are refined to a 25 degree minimum angle and area at most that of an
/// equilateral triangle of side `h`.
pub fn polygon_mesh(outer: &[Point], loops: &[Vec<Point>], h: f64) -> Result<Mesh> {
    if outer.len() < 3 || !(h > 0.0) {
        return Err(Error::InvalidArgument("outer polygon needs 3 vertices and h > 0".into()));
    }
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> = ConstrainedDelaunayTriangulation::new();
    let mut add_loop = |pts: &[Point]| -> Result<()> {
        let mut handles = Vec::with_capacity(pts.len());
        for p in pts {
            let hnd = cdt
                .insert(Point2::new(p[0], p[1]))
                .map_err(|e| Error::InvalidArgument(format!("cannot insert vertex {p:?}: {e:?}")))?;
            handles.push(hnd);
        }
        for k in 0..handles.len() {
            let (a, b) = (handles[k], handles[(k + 1) % handles.len()]);
            if a == b {
                continue;
            }
            if !cdt.can_add_constraint(a, b) {
                return Err(Error::Overlap(format!("polygon edge from {:?} crosses another boundary", pts[k])));
            }
            cdt.add_constraint(a, b);
        }
        Ok(())
    };
    add_loop(outer)?;
    for l in loops {
        add_loop(l)?;
    }
    let max_area = h * h * 3f64.sqrt() / 4.0;
    let result = cdt.refine(
        RefinementParameters::<f64>::new()
            .with_angle_limit(AngleLimit::from_deg(25.0))
            .with_max_allowed_area(max_area)
            .with_max_additional_vertices(2_000_000),
    );
    if !result.refinement_complete {
        return Err(Error::InvalidArgument("polygon refinement did not complete".into()));
    }
    let vertices: Vec<Point> = cdt.vertices().map(|v| [v.position().x, v.position().y]).collect();
    let triangles: Vec<[usize; 3]> = cdt
        .inner_faces()
        .map(|f| {
            let [a, b, c] = f.vertices();
            [a.fix().index(), b.fix().index(), c.fix().index()]
        })
        .collect();
    Mesh::new(vertices, triangles, h)
}

/// Regular polygon approximating a circle; vertex 0 lies on the positive x axis.
pub fn circle_polygon(center: Point, r: f64, segments: usize) -> Vec<Point> {
    (0..segments)
        .map(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / segments as f64;
            [center[0] + r * a.cos(), center[1] + r * a.sin()]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_with_inner_square() {
        let outer = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let inner = vec![vec![[0.3, 0.3], [0.6, 0.3], [0.6, 0.6], [0.3, 0.6]]];
        let m = polygon_mesh(&outer, &inner, 0.1).unwrap();
        assert!((m.total_area() - 1.0).abs() < 1e-12);
        assert!(m.min_angle_deg() >= 20.0, "{}", m.min_angle_deg());
        let a: f64 = (0..m.n_triangles())
            .filter(|&t| {
                let c = m.centroid(t);
                c[0] > 0.3 && c[0] < 0.6 && c[1] > 0.3 && c[1] < 0.6
            })
            .map(|t| m.geom(t).area)
            .sum();
        assert!((a - 0.09).abs() < 1e-12, "{a}");
    }

    #[test]
    fn crossing_loops_rejected() {
        let outer = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let a = vec![[0.2, 0.2], [0.6, 0.2], [0.6, 0.6], [0.2, 0.6]];
        let b = vec![[0.4, 0.4], [0.8, 0.4], [0.8, 0.8], [0.4, 0.8]];
        assert!(matches!(polygon_mesh(&outer, &[a, b], 0.1), Err(Error::Overlap(_))));
    }
}
