use std::f64::consts::PI;

use super::OUTLINE_SEGMENTS;
use crate::mesh::{dist, Point};

/// Convex planar region used for domains and safety regions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Shape {
    Disk { center: Point, radius: f64 },
    /// Axis-aligned ellipse with semi-axes `a` (x) and `b` (y).
    Ellipse { center: Point, a: f64, b: f64 },
    Rectangle { min: Point, max: Point },
}

impl Shape {
    pub fn center(&self) -> Point {
        match *self {
            Shape::Disk { center, .. } | Shape::Ellipse { center, .. } => center,
            Shape::Rectangle { min, max } => [0.5 * (min[0] + max[0]), 0.5 * (min[1] + max[1])],
        }
    }

    /// Open-set membership.
    pub fn contains(&self, p: Point) -> bool {
        match *self {
            Shape::Disk { center, radius } => dist(p, center) < radius,
            Shape::Ellipse { center, a, b } => {
                let (x, y) = ((p[0] - center[0]) / a, (p[1] - center[1]) / b);
                x * x + y * y < 1.0
            }
            Shape::Rectangle { min, max } => p[0] > min[0] && p[0] < max[0] && p[1] > min[1] && p[1] < max[1],
        }
    }

    /// Distance from the center to the boundary along direction `theta`.
    pub fn ray_exit(&self, theta: f64) -> f64 {
        let (c, s) = (theta.cos(), theta.sin());
        match *self {
            Shape::Disk { radius, .. } => radius,
            Shape::Ellipse { a, b, .. } => 1.0 / ((c / a).powi(2) + (s / b).powi(2)).sqrt(),
            Shape::Rectangle { min, max } => {
                let (hx, hy) = (0.5 * (max[0] - min[0]), 0.5 * (max[1] - min[1]));
                let tx = if c.abs() > 1e-15 { hx / c.abs() } else { f64::INFINITY };
                let ty = if s.abs() > 1e-15 { hy / s.abs() } else { f64::INFINITY };
                tx.min(ty)
            }
        }
    }

    /// Closed polygon through boundary points, counter-clockwise.
    pub fn polygon(&self, segments: usize) -> Vec<Point> {
        match *self {
            Shape::Rectangle { min, max } => vec![min, [max[0], min[1]], max, [min[0], max[1]]],
            Shape::Disk { center, radius } => (0..segments)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / segments as f64;
                    [center[0] + radius * t.cos(), center[1] + radius * t.sin()]
                })
                .collect(),
            Shape::Ellipse { center, a, b } => (0..segments)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / segments as f64;
                    [center[0] + a * t.cos(), center[1] + b * t.sin()]
                })
                .collect(),
        }
    }

    /// Unsigned distance from `p` to the boundary curve.
    pub fn boundary_distance(&self, p: Point) -> f64 {
        match *self {
            Shape::Disk { center, radius } => (dist(p, center) - radius).abs(),
            Shape::Rectangle { min, max } => {
                let dx = (min[0] - p[0]).max(p[0] - max[0]);
                let dy = (min[1] - p[1]).max(p[1] - max[1]);
                if dx <= 0.0 && dy <= 0.0 {
                    -dx.max(dy)
                } else {
                    dx.max(0.0).hypot(dy.max(0.0))
                }
            }
            Shape::Ellipse { .. } => {
                let poly = self.polygon(4 * OUTLINE_SEGMENTS);
                (0..poly.len())
                    .map(|k| super::seg_dist(p, poly[k], poly[(k + 1) % poly.len()]))
                    .fold(f64::INFINITY, f64::min)
            }
        }
    }

    pub fn area(&self) -> f64 {
        match *self {
            Shape::Disk { radius, .. } => PI * radius * radius,
            Shape::Ellipse { a, b, .. } => PI * a * b,
            Shape::Rectangle { min, max } => (max[0] - min[0]) * (max[1] - min[1]),
        }
    }
}

/// Domain `Omega` and the open safety region `K` that must contain every inclusion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Domain2D {
    pub omega: Shape,
    pub k: Shape,
}

impl Domain2D {
    /// `K` lies inside `Omega` at positive distance from its boundary.
    pub fn k_distance(&self) -> f64 {
        let poly = self.k.polygon(OUTLINE_SEGMENTS);
        if !poly.iter().all(|p| self.omega.contains(*p)) {
            return 0.0;
        }
        poly.iter().map(|p| self.omega.boundary_distance(*p)).fold(f64::INFINITY, f64::min)
    }

    /// Eight probe points at 0.85 of the way from the center of `Omega` to its boundary.
    pub fn probes(&self) -> Vec<Point> {
        let c = self.omega.center();
        (0..8)
            .map(|k| {
                let t = PI * k as f64 / 4.0;
                let r = 0.85 * self.omega.ray_exit(t);
                [c[0] + r * t.cos(), c[1] + r * t.sin()]
            })
            .collect()
    }
}

/// Signed shoelace area (positive when counter-clockwise).
pub fn polygon_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    0.5 * (0..n).map(|k| poly[k][0] * poly[(k + 1) % n][1] - poly[(k + 1) % n][0] * poly[k][1]).sum::<f64>()
}
