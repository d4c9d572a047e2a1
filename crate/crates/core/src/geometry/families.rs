use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

use super::shape::{polygon_area, Domain2D, Shape};
use super::{check_n_list, point_in_polygon, InclusionFamily, OUTLINE_SEGMENTS};
use crate::error::{Error, Result};
use crate::mesh::confocal::ConfocalLayout;
use crate::mesh::grading::{graded_nodes, unique_sorted};
use crate::mesh::grid::tensor_grid;
use crate::mesh::polygon::{circle_polygon, polygon_mesh};
use crate::mesh::rings::RingLayout;
use crate::mesh::{Mesh, Point};
use crate::registry::Registry;
use crate::tensors::{dn_at, psd_leq, Region, SymMat};

/// Surface measure of the unit sphere in `R^d`.
pub fn unit_sphere_area(d: usize) -> f64 {
    match d {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 2.0) * unit_sphere_area(d - 2),
    }
}

/// `|d|_F` for isotropic phases `gamma_0 = I`, `gamma_n = lambda I` in dimension `d`.
pub fn isotropic_dn_norm(d: usize, lambda: f64) -> f64 {
    (d as f64).sqrt() * (lambda + 1.0 / lambda)
}

fn phase_of(lambda: f64) -> Region {
    if lambda >= 1.0 {
        Region::A
    } else {
        Region::B
    }
}

fn split(parts: &[(Region, f64)]) -> (f64, f64) {
    parts.iter().fold((0.0, 0.0), |(a, b), (r, v)| match r {
        Region::A => (a + v, b),
        Region::B => (a, b + v),
        Region::Background => (a, b),
    })
}

/// Power law `coef * n^exponent`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Law {
    pub coef: f64,
    pub exponent: f64,
}

impl Law {
    pub fn constant(v: f64) -> Law {
        Law { coef: v, exponent: 0.0 }
    }

    pub fn power(coef: f64, exponent: f64) -> Law {
        Law { coef, exponent }
    }

    pub fn at(&self, n: usize) -> f64 {
        self.coef * (n as f64).powf(self.exponent)
    }
}

fn circle(r: f64) -> Vec<Point> {
    circle_polygon([0.0, 0.0], r, OUTLINE_SEGMENTS)
}

/// Two thin concentric shells around the unit sphere: `1 - 1/n < r < 1` with conductivity
/// `n^alpha` and `1 < r < 1 + 1/n` with conductivity `n^beta`, in `Omega = B(0, 2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialAnnuli {
    pub d: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl RadialAnnuli {
    pub fn new(d: usize, alpha: f64, beta: f64) -> Self {
        RadialAnnuli { d, alpha, beta }
    }

    fn shells(&self, n: usize) -> [(Region, f64, f64, f64); 2] {
        let nf = n as f64;
        let (li, lo) = (nf.powf(self.alpha), nf.powf(self.beta));
        let outer = if self.beta <= 0.0 { Region::B } else { Region::A };
        [(phase_of(li), 1.0 - 1.0 / nf, 1.0, li), (outer, 1.0, 1.0 + 1.0 / nf, lo)]
    }

    fn shell_volume(&self, r0: f64, r1: f64) -> f64 {
        let d = self.d as i32;
        unit_sphere_area(self.d) / self.d as f64 * (r1.powi(d) - r0.powi(d))
    }
}

impl InclusionFamily for RadialAnnuli {
    fn name(&self) -> &'static str {
        "radial_annuli"
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn domain(&self) -> Domain2D {
        Domain2D {
            omega: Shape::Disk { center: [0.0, 0.0], radius: 2.0 },
            k: Shape::Disk { center: [0.0, 0.0], radius: 1.6 },
        }
    }

    fn region(&self, n: usize, p: Point) -> Region {
        let r = p[0].hypot(p[1]);
        self.shells(n)
            .iter()
            .find(|(_, r0, r1, _)| r > *r0 && r < *r1)
            .map_or(Region::Background, |s| s.0)
    }

    fn inclusion_tensor(&self, n: usize, p: Point, _region: Region) -> SymMat {
        let s = self.shells(n);
        let lam = if p[0].hypot(p[1]) < 1.0 { s[0].3 } else { s[1].3 };
        SymMat::scalar(self.d, lam)
    }

    fn l1_split(&self, n: usize) -> (f64, f64) {
        let parts: Vec<(Region, f64)> = self
            .shells(n)
            .iter()
            .map(|(r, r0, r1, l)| (*r, self.shell_volume(*r0, *r1) * isotropic_dn_norm(self.d, *l)))
            .collect();
        split(&parts)
    }

    fn lp_split(&self, n: usize, p: f64) -> (f64, f64) {
        let parts: Vec<(Region, f64)> = self
            .shells(n)
            .iter()
            .map(|(r, r0, r1, l)| (*r, (self.shell_volume(*r0, *r1) * isotropic_dn_norm(self.d, *l).powf(p))))
            .collect();
        let (a, b) = split(&parts);
        (a.powf(1.0 / p), b.powf(1.0 / p))
    }

    fn separation(&self, n: usize) -> f64 {
        let s = self.shells(n);
        if s[0].0 == s[1].0 {
            f64::INFINITY
        } else {
            0.0
        }
    }

    fn min_feature(&self, n: usize) -> f64 {
        1.0 / n as f64
    }

    fn outlines(&self, n: usize) -> Vec<(Region, Vec<Point>)> {
        self.shells(n).iter().flat_map(|(r, r0, r1, _)| [(*r, circle(*r0)), (*r, circle(*r1))]).collect()
    }

    fn overlap(&self, _n: usize) -> Option<String> {
        None
    }

    fn ordering_holds(&self, _n: usize) -> bool {
        true
    }

    fn base_mesh(&self, n_list: &[usize], h: f64) -> Result<Mesh> {
        if self.d != 2 {
            return Err(Error::UnsupportedDimension(self.d));
        }
        check_n_list(self, n_list, h)?;
        let radii: Vec<f64> = n_list.iter().flat_map(|&n| self.shells(n).map(|s| [s.1, s.2])).flatten().collect();
        RingLayout::graded([0.0, 0.0], 2.0, &radii, h)?.build()
    }
}

/// A disk of radius `rho(n)` and conductivity `lambda(n) I` in `Omega = B(0, 2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DiskInclusion {
    pub center: Point,
    pub rho: Law,
    pub lambda: Law,
}

impl DiskInclusion {
    pub fn new(center: Point, rho: Law, lambda: Law) -> Result<Self> {
        if rho.exponent > 0.0 || !(rho.coef > 0.0) {
            return Err(Error::InvalidArgument("disk radius law must be positive and non-increasing".into()));
        }
        if center[0].hypot(center[1]) + rho.coef >= 2.0 {
            return Err(Error::InvalidArgument("disk inclusion must lie inside B(0, 2)".into()));
        }
        Ok(DiskInclusion { center, rho, lambda })
    }

    fn is_centered(&self) -> bool {
        self.center == [0.0, 0.0]
    }
}

impl InclusionFamily for DiskInclusion {
    fn name(&self) -> &'static str {
        "disk"
    }

    fn domain(&self) -> Domain2D {
        let free = 2.0 - self.center[0].hypot(self.center[1]);
        Domain2D {
            omega: Shape::Disk { center: [0.0, 0.0], radius: 2.0 },
            k: Shape::Disk { center: self.center, radius: 0.5 * (self.rho.coef + free) },
        }
    }

    fn region(&self, n: usize, p: Point) -> Region {
        if crate::mesh::dist(p, self.center) < self.rho.at(n) {
            phase_of(self.lambda.at(n))
        } else {
            Region::Background
        }
    }

    fn inclusion_tensor(&self, n: usize, _p: Point, _region: Region) -> SymMat {
        SymMat::scalar(2, self.lambda.at(n))
    }

    fn l1_split(&self, n: usize) -> (f64, f64) {
        let (r, l) = (self.rho.at(n), self.lambda.at(n));
        split(&[(phase_of(l), PI * r * r * isotropic_dn_norm(2, l))])
    }

    fn lp_split(&self, n: usize, p: f64) -> (f64, f64) {
        let (r, l) = (self.rho.at(n), self.lambda.at(n));
        split(&[(phase_of(l), isotropic_dn_norm(2, l) * (PI * r * r).powf(1.0 / p))])
    }

    fn separation(&self, _n: usize) -> f64 {
        f64::INFINITY
    }

    fn min_feature(&self, n: usize) -> f64 {
        2.0 * self.rho.at(n)
    }

    fn outlines(&self, n: usize) -> Vec<(Region, Vec<Point>)> {
        vec![(phase_of(self.lambda.at(n)), circle_polygon(self.center, self.rho.at(n), OUTLINE_SEGMENTS))]
    }

    fn ordering_holds(&self, _n: usize) -> bool {
        true
    }

    fn base_mesh(&self, n_list: &[usize], h: f64) -> Result<Mesh> {
        check_n_list(self, n_list, h)?;
        let radii: Vec<f64> = n_list.iter().map(|&n| self.rho.at(n)).collect();
        if self.is_centered() {
            return RingLayout::graded([0.0, 0.0], 2.0, &radii, h)?.build();
        }
        let seg = |r: f64| ((2.0 * PI * r / h).ceil() as usize).max(16).div_ceil(8) * 8;
        let outer = circle_polygon([0.0, 0.0], 2.0, seg(2.0));
        let loops: Vec<Vec<Point>> = unique_sorted(radii, 1e-12)
            .into_iter()
            .map(|r| circle_polygon(self.center, r, seg(r).max(32)))
            .collect();
        polygon_mesh(&outer, &loops, h)
    }
}

/// Elliptic-coordinate inclusion `xi < 1/n` (foci at `+-1`) with conductivity `n^q I` in the
/// confocal domain `xi < 2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConfocalEllipse {
    pub q: f64,
}

/// Elliptic radial coordinate of `p` for foci `+-1`.
pub fn elliptic_xi(p: Point) -> f64 {
    let s = 0.5 * ((p[0] - 1.0).hypot(p[1]) + (p[0] + 1.0).hypot(p[1]));
    s.max(1.0).acosh()
}

impl ConfocalEllipse {
    pub const OUTER_XI: f64 = 2.0;

    pub fn lambda(&self, n: usize) -> f64 {
        (n as f64).powf(self.q)
    }

    fn ellipse(xi: f64) -> Shape {
        Shape::Ellipse { center: [0.0, 0.0], a: xi.cosh(), b: xi.sinh() }
    }
}

impl InclusionFamily for ConfocalEllipse {
    fn name(&self) -> &'static str {
        "confocal_ellipse"
    }

    fn domain(&self) -> Domain2D {
        Domain2D { omega: Self::ellipse(Self::OUTER_XI), k: Self::ellipse(1.0) }
    }

    fn region(&self, n: usize, p: Point) -> Region {
        if elliptic_xi(p) < 1.0 / n as f64 {
            phase_of(self.lambda(n))
        } else {
            Region::Background
        }
    }

    fn inclusion_tensor(&self, n: usize, _p: Point, _region: Region) -> SymMat {
        SymMat::scalar(2, self.lambda(n))
    }

    fn l1_split(&self, n: usize) -> (f64, f64) {
        let x = 1.0 / n as f64;
        let l = self.lambda(n);
        split(&[(phase_of(l), PI * x.cosh() * x.sinh() * isotropic_dn_norm(2, l))])
    }

    fn lp_split(&self, n: usize, p: f64) -> (f64, f64) {
        let x = 1.0 / n as f64;
        let l = self.lambda(n);
        split(&[(phase_of(l), isotropic_dn_norm(2, l) * (PI * x.cosh() * x.sinh()).powf(1.0 / p))])
    }

    fn separation(&self, _n: usize) -> f64 {
        f64::INFINITY
    }

    fn min_feature(&self, n: usize) -> f64 {
        2.0 * (1.0 / n as f64).sinh()
    }

    fn outlines(&self, n: usize) -> Vec<(Region, Vec<Point>)> {
        vec![(phase_of(self.lambda(n)), Self::ellipse(1.0 / n as f64).polygon(OUTLINE_SEGMENTS))]
    }

    fn ordering_holds(&self, _n: usize) -> bool {
        true
    }

    fn base_mesh(&self, n_list: &[usize], h: f64) -> Result<Mesh> {
        check_n_list(self, n_list, h)?;
        let mut levels: Vec<f64> = n_list.iter().map(|&n| 1.0 / n as f64).collect();
        levels.push(1.0);
        ConfocalLayout::graded(1.0, Self::OUTER_XI, &levels, h)?.build()
    }
}

/// Width law of the insulating strips.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StripWidth {
    /// `1/(4n^2)`: keeps `||d_n||_{L1(B_n)}` of order `1/ln n`.
    Quadratic,
    /// `1/(4n)`.
    Verbatim,
}

/// Vertical strips in the unit square: conductive `A_k = (k/n, k/n + n^{-(3+eps)}) x (0,1)`
/// with `gamma = diag(1, n)` and insulating `B_k` starting at `k/n + 1/(2n)` with
/// `gamma = (ln n / n) I`, for `k = 0..n-1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Strips {
    pub eps: f64,
    pub b_width: StripWidth,
}

impl Strips {
    pub fn new(eps: f64, b_width: StripWidth) -> Self {
        Strips { eps, b_width }
    }

    pub fn width_a(&self, n: usize) -> f64 {
        (n as f64).powf(-(3.0 + self.eps))
    }

    pub fn width_b(&self, n: usize) -> f64 {
        let nf = n as f64;
        match self.b_width {
            StripWidth::Quadratic => 0.25 / (nf * nf),
            StripWidth::Verbatim => 0.25 / nf,
        }
    }

    fn lambda_b(n: usize) -> f64 {
        let nf = n as f64;
        nf.ln() / nf
    }

    fn dn_a(n: usize) -> f64 {
        let nf = n as f64;
        (4.0 + (nf + 1.0 / nf).powi(2)).sqrt()
    }

    fn intervals(&self, n: usize) -> Vec<(Region, f64, f64)> {
        let nf = n as f64;
        (0..n)
            .flat_map(|k| {
                let x = k as f64 / nf;
                let b = x + 0.5 / nf;
                [(Region::A, x, x + self.width_a(n)), (Region::B, b, b + self.width_b(n))]
            })
            .collect()
    }
}

impl InclusionFamily for Strips {
    fn name(&self) -> &'static str {
        "strips"
    }

    fn domain(&self) -> Domain2D {
        Domain2D {
            omega: Shape::Rectangle { min: [-0.5, -0.5], max: [1.75, 1.5] },
            k: Shape::Rectangle { min: [-0.25, -0.25], max: [1.5, 1.25] },
        }
    }

    fn region(&self, n: usize, p: Point) -> Region {
        if !(p[1] > 0.0 && p[1] < 1.0) || !(p[0] >= 0.0 && p[0] < 1.0) {
            return Region::Background;
        }
        let nf = n as f64;
        let k = (p[0] * nf).floor();
        let x = p[0] - k / nf;
        let b = 0.5 / nf;
        if x > 0.0 && x < self.width_a(n) {
            Region::A
        } else if x > b && x < b + self.width_b(n) {
            Region::B
        } else {
            Region::Background
        }
    }

    fn inclusion_tensor(&self, n: usize, _p: Point, region: Region) -> SymMat {
        match region {
            Region::A => SymMat::diag(&[1.0, n as f64]),
            _ => SymMat::scalar(2, Self::lambda_b(n)),
        }
    }

    fn l1_split(&self, n: usize) -> (f64, f64) {
        let nf = n as f64;
        (nf * self.width_a(n) * Self::dn_a(n), nf * self.width_b(n) * isotropic_dn_norm(2, Self::lambda_b(n)))
    }

    fn lp_split(&self, n: usize, p: f64) -> (f64, f64) {
        let nf = n as f64;
        (
            Self::dn_a(n) * (nf * self.width_a(n)).powf(1.0 / p),
            isotropic_dn_norm(2, Self::lambda_b(n)) * (nf * self.width_b(n)).powf(1.0 / p),
        )
    }

    fn separation(&self, n: usize) -> f64 {
        let half = 0.5 / n as f64;
        (half - self.width_a(n)).min(half - self.width_b(n)).max(0.0)
    }

    fn min_feature(&self, n: usize) -> f64 {
        self.width_a(n).min(self.width_b(n))
    }

    fn outlines(&self, n: usize) -> Vec<(Region, Vec<Point>)> {
        self.intervals(n).into_iter().map(|(r, a, b)| (r, vec![[a, 0.0], [b, 0.0], [b, 1.0], [a, 1.0]])).collect()
    }

    fn overlap(&self, n: usize) -> Option<String> {
        let half = 0.5 / n as f64;
        if self.width_a(n) >= half || self.width_b(n) >= half {
            Some(format!("strips overlap at n = {n}"))
        } else {
            None
        }
    }

    fn ordering_holds(&self, n: usize) -> bool {
        n >= 2 && Self::lambda_b(n) <= 1.0
    }

    fn inside_k(&self, _n: usize) -> bool {
        true
    }

    fn boundary_distance(&self, _n: usize) -> f64 {
        0.5
    }

    fn base_mesh(&self, n_list: &[usize], h: f64) -> Result<Mesh> {
        check_n_list(self, n_list, h)?;
        let mut xb = vec![-0.5, 1.75];
        for &n in n_list {
            xb.extend(self.intervals(n).iter().flat_map(|(_, a, b)| [*a, *b]));
        }
        let xb = unique_sorted(xb, 1e-15);
        let xs = graded_nodes(&xb, h, 1.2, 2);
        let ys = graded_nodes(&[-0.5, 0.0, 1.0, 1.5], h, 1.2, 2);
        tensor_grid(&xs, &ys)
    }
}

/// A polygonal inclusion with a constant conductivity.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    pub region: Region,
    pub vertices: Vec<Point>,
    pub tensor: SymMat,
}

/// User-supplied polygonal inclusions per `n`.
#[derive(Clone, Debug)]
pub struct CustomPolygons {
    pub domain: Domain2D,
    pub gamma0: SymMat,
    pub sets: BTreeMap<usize, Vec<Polygon>>,
}

impl CustomPolygons {
    fn polys(&self, n: usize) -> &[Polygon] {
        self.sets.get(&n).map_or(&[], |v| v.as_slice())
    }

    fn norms(&self, n: usize, p: f64) -> (f64, f64) {
        let parts: Vec<(Region, f64)> = self
            .polys(n)
            .iter()
            .map(|q| {
                let dn = dn_at(&self.gamma0, &q.tensor, true).map(|d| d.frobenius()).unwrap_or(f64::NAN);
                (q.region, polygon_area(&q.vertices).abs() * dn.powf(p))
            })
            .collect();
        split(&parts)
    }
}

impl InclusionFamily for CustomPolygons {
    fn name(&self) -> &'static str {
        "custom_polygons"
    }

    fn domain(&self) -> Domain2D {
        self.domain
    }

    fn gamma0(&self) -> SymMat {
        self.gamma0
    }

    fn region(&self, n: usize, p: Point) -> Region {
        self.polys(n).iter().find(|q| point_in_polygon(p, &q.vertices)).map_or(Region::Background, |q| q.region)
    }

    fn inclusion_tensor(&self, n: usize, p: Point, _region: Region) -> SymMat {
        self.polys(n).iter().find(|q| point_in_polygon(p, &q.vertices)).map_or(self.gamma0, |q| q.tensor)
    }

    fn l1_split(&self, n: usize) -> (f64, f64) {
        self.norms(n, 1.0)
    }

    fn lp_split(&self, n: usize, p: f64) -> (f64, f64) {
        let (a, b) = self.norms(n, p);
        (a.powf(1.0 / p), b.powf(1.0 / p))
    }

    fn min_feature(&self, n: usize) -> f64 {
        self.polys(n)
            .iter()
            .map(|q| {
                let per: f64 = (0..q.vertices.len())
                    .map(|k| crate::mesh::dist(q.vertices[k], q.vertices[(k + 1) % q.vertices.len()]))
                    .sum();
                2.0 * polygon_area(&q.vertices).abs() / per
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn outlines(&self, n: usize) -> Vec<(Region, Vec<Point>)> {
        self.polys(n).iter().map(|q| (q.region, q.vertices.clone())).collect()
    }

    fn ordering_holds(&self, n: usize) -> bool {
        self.polys(n).iter().all(|q| match q.region {
            Region::A => psd_leq(&self.gamma0, &q.tensor),
            Region::B => psd_leq(&q.tensor, &self.gamma0),
            Region::Background => false,
        })
    }

    fn base_mesh(&self, n_list: &[usize], h: f64) -> Result<Mesh> {
        check_n_list(self, n_list, h)?;
        let omega = self.domain.omega;
        let segs = match omega {
            Shape::Rectangle { .. } => 4,
            _ => ((2.0 * PI * omega.ray_exit(0.0).max(omega.ray_exit(PI / 2.0)) / h).ceil() as usize).div_ceil(8) * 8,
        };
        let loops: Vec<Vec<Point>> =
            n_list.iter().flat_map(|&n| self.polys(n).iter().map(|q| q.vertices.clone())).collect();
        polygon_mesh(&omega.polygon(segs), &loops, h)
    }
}

/// Family kind and raw parameters, as read from a configuration file.
///
/// Every key maps to the list of values it was given (keys may repeat).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FamilySpec {
    pub kind: String,
    pub params: BTreeMap<String, Vec<String>>,
}

impl FamilySpec {
    pub fn new(kind: &str) -> Self {
        FamilySpec { kind: kind.to_string(), params: BTreeMap::new() }
    }

    pub fn with(mut self, key: &str, value: &str) -> Self {
        self.params.entry(key.to_string()).or_default().push(value.to_string());
        self
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.params.get(key).and_then(|v| v.last()).map(|s| s.as_str())
    }

    pub fn all(&self, key: &str) -> &[String] {
        self.params.get(key).map_or(&[], |v| v.as_slice())
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        match self.raw(key) {
            None => Ok(default),
            Some(s) => parse_f64(key, s),
        }
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        match self.raw(key) {
            None => Ok(default),
            Some(s) => s.trim().parse().map_err(|_| bad(key, s)),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.raw(key).map(|s| parse_list(key, s)).transpose()
    }
}

fn bad(key: &str, s: &str) -> Error {
    Error::InvalidArgument(format!("family.{key}: cannot parse `{s}`"))
}

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| bad(key, s))
}

fn parse_list(key: &str, s: &str) -> Result<Vec<f64>> {
    let t = s.trim().trim_start_matches('[').trim_end_matches(']');
    t.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|x| !x.is_empty())
        .map(|x| parse_f64(key, x))
        .collect()
}

/// Parses `disk cx cy r`, `ellipse cx cy a b` or `rectangle x0 y0 x1 y1`.
pub fn parse_shape(key: &str, s: &str) -> Result<Shape> {
    let mut it = s.split_whitespace();
    let kind = it.next().ok_or_else(|| bad(key, s))?;
    let v: Vec<f64> = it.map(|x| parse_f64(key, x)).collect::<Result<_>>()?;
    match (kind, v.len()) {
        ("disk", 3) => Ok(Shape::Disk { center: [v[0], v[1]], radius: v[2] }),
        ("ellipse", 4) => Ok(Shape::Ellipse { center: [v[0], v[1]], a: v[2], b: v[3] }),
        ("rectangle", 4) => Ok(Shape::Rectangle { min: [v[0], v[1]], max: [v[2], v[3]] }),
        _ => Err(bad(key, s)),
    }
}

/// Parses `n A|B g11 g12 g22 : x y, x y, ...`.
pub fn parse_polygon(s: &str) -> Result<(usize, Polygon)> {
    let (head, pts) = s.split_once(':').ok_or_else(|| bad("polygon", s))?;
    let h: Vec<&str> = head.split_whitespace().collect();
    if h.len() != 5 {
        return Err(bad("polygon", s));
    }
    let n: usize = h[0].parse().map_err(|_| bad("polygon", s))?;
    let region = match h[1] {
        "A" => Region::A,
        "B" => Region::B,
        _ => return Err(bad("polygon", s)),
    };
    let t: Vec<f64> = h[2..].iter().map(|x| parse_f64("polygon", x)).collect::<Result<_>>()?;
    let vertices: Vec<Point> = pts
        .split(',')
        .map(|p| {
            let c: Vec<f64> = p.split_whitespace().map(|x| parse_f64("polygon", x)).collect::<Result<_>>()?;
            if c.len() != 2 {
                return Err(bad("polygon", p));
            }
            Ok([c[0], c[1]])
        })
        .collect::<Result<_>>()?;
    if vertices.len() < 3 {
        return Err(bad("polygon", s));
    }
    Ok((n, Polygon { region, vertices, tensor: SymMat::new2(t[0], t[1], t[2]) }))
}

/// Builds a family from configuration parameters.
pub trait FamilyFactory: Send + Sync {
    fn build(&self, spec: &FamilySpec) -> Result<Arc<dyn InclusionFamily>>;
}

impl<F> FamilyFactory for F
where
    F: Fn(&FamilySpec) -> Result<Arc<dyn InclusionFamily>> + Send + Sync,
{
    fn build(&self, spec: &FamilySpec) -> Result<Arc<dyn InclusionFamily>> {
        self(spec)
    }
}

fn radial(spec: &FamilySpec) -> Result<Arc<dyn InclusionFamily>> {
    Ok(Arc::new(RadialAnnuli::new(spec.usize_or("d", 2)?, spec.f64_or("alpha", 0.5)?, spec.f64_or("beta", -0.5)?)))
}

fn disk(spec: &FamilySpec) -> Result<Arc<dyn InclusionFamily>> {
    let c = spec.f64_list("center")?.unwrap_or_else(|| vec![0.0, 0.0]);
    if c.len() != 2 {
        return Err(bad("center", &format!("{c:?}")));
    }
    Ok(Arc::new(DiskInclusion::new(
        [c[0], c[1]],
        Law::power(spec.f64_or("rho", 0.2)?, spec.f64_or("rho_exponent", 0.0)?),
        Law::power(spec.f64_or("lambda", 1.0)?, spec.f64_or("lambda_exponent", 1.0)?),
    )?))
}

fn ellipse(spec: &FamilySpec) -> Result<Arc<dyn InclusionFamily>> {
    Ok(Arc::new(ConfocalEllipse { q: spec.f64_or("q", 0.5)? }))
}

fn strips(spec: &FamilySpec) -> Result<Arc<dyn InclusionFamily>> {
    let w = match spec.raw("b_width").unwrap_or("quadratic") {
        "quadratic" => StripWidth::Quadratic,
        "verbatim" => StripWidth::Verbatim,
        other => return Err(bad("b_width", other)),
    };
    Ok(Arc::new(Strips::new(spec.f64_or("eps", 0.5)?, w)))
}

fn custom(spec: &FamilySpec) -> Result<Arc<dyn InclusionFamily>> {
    let omega = parse_shape("omega", spec.raw("omega").ok_or_else(|| bad("omega", "<missing>"))?)?;
    let k = parse_shape("k", spec.raw("k").ok_or_else(|| bad("k", "<missing>"))?)?;
    let g = spec.f64_list("gamma0")?.unwrap_or_else(|| vec![1.0, 0.0, 1.0]);
    if g.len() != 3 {
        return Err(bad("gamma0", &format!("{g:?}")));
    }
    let mut sets: BTreeMap<usize, Vec<Polygon>> = BTreeMap::new();
    for line in spec.all("polygon") {
        let (n, p) = parse_polygon(line)?;
        p.tensor.check_conductivity()?;
        sets.entry(n).or_default().push(p);
    }
    let gamma0 = SymMat::new2(g[0], g[1], g[2]);
    gamma0.check_conductivity()?;
    Ok(Arc::new(CustomPolygons { domain: Domain2D { omega, k }, gamma0, sets }))
}

/// Families selectable by their configuration `kind`.
pub fn family_registry() -> Registry<dyn FamilyFactory> {
    let mut r: Registry<dyn FamilyFactory> = Registry::new("family kind");
    r.register("radial_annuli", Arc::new(radial));
    r.register("disk", Arc::new(disk));
    r.register("confocal_ellipse", Arc::new(ellipse));
    r.register("strips", Arc::new(strips));
    r.register("custom_polygons", Arc::new(custom));
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_mesh;

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((unit_sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn homogeneous_shells_have_dn_twice_identity() {
        let f = RadialAnnuli::new(2, 0.0, 0.0);
        for n in [2, 5, 40] {
            let nf = n as f64;
            let area = PI * ((1.0 + 1.0 / nf).powi(2) - (1.0 - 1.0 / nf).powi(2));
            assert!((f.l1_dn(n) - 2.0 * 2f64.sqrt() * area).abs() < 1e-12);
        }
    }

    #[test]
    fn disk_l1_value() {
        let f = DiskInclusion::new([0.0, 0.0], Law::constant(0.2), Law::power(1.0, 1.0)).unwrap();
        for n in [2usize, 7, 30] {
            let nf = n as f64;
            assert!((f.l1_dn(n) - (nf + 1.0 / nf) * 2f64.sqrt() * PI * 0.04).abs() < 1e-12);
        }
    }

    #[test]
    fn strip_separation_window() {
        let f = Strips::new(0.5, StripWidth::Quadratic);
        for n in [4usize, 8, 16, 64] {
            let s = f.separation(n);
            let nf = n as f64;
            assert!(s >= 0.25 / nf && s <= 0.5 / nf, "{n} {s}");
        }
    }

    #[test]
    fn strip_regions_match_intervals() {
        let f = Strips::new(0.5, StripWidth::Quadratic);
        let n = 4;
        assert_eq!(f.region(n, [0.5 * f.width_a(n), 0.5]), Region::A);
        assert_eq!(f.region(n, [0.125 + 0.5 * f.width_b(n), 0.5]), Region::B);
        assert_eq!(f.region(n, [0.3, 0.5]), Region::Background);
        assert_eq!(f.region(n, [0.5 * f.width_a(n), 1.2]), Region::Background);
    }

    #[test]
    fn coarse_strip_mesh_is_unresolvable() {
        let f = Strips::new(0.5, StripWidth::Quadratic);
        assert!(matches!(build_mesh(&f, 4, 0.05), Err(Error::UnresolvableThinRegion { .. })));
    }

    #[test]
    fn radial_mesh_tags_shells() {
        let f = RadialAnnuli::new(2, 0.5, -0.5);
        let m = build_mesh(&f, 8, 0.05).unwrap();
        let nf = 8.0;
        let mut area = [0.0; 3];
        for t in 0..m.n_triangles() {
            let c = m.centroid(t);
            let r = c[0].hypot(c[1]);
            let expect = if r > 1.0 - 1.0 / nf && r < 1.0 {
                Region::A
            } else if r > 1.0 && r < 1.0 + 1.0 / nf {
                Region::B
            } else {
                Region::Background
            };
            assert_eq!(m.region(t), expect, "triangle {t} at r = {r}");
            area[m.region(t).code() as usize] += m.geom(t).area;
        }
        let exact = PI * (1.0 - (1.0f64 - 1.0 / nf).powi(2));
        assert!((area[1] - exact).abs() / exact < 0.01);
    }

    #[test]
    fn registry_builds_every_kind() {
        let r = family_registry();
        for k in ["radial_annuli", "disk", "confocal_ellipse", "strips"] {
            assert_eq!(r.get(k).unwrap().build(&FamilySpec::new(k)).unwrap().name().len() > 0, true);
        }
        let spec = FamilySpec::new("custom_polygons")
            .with("omega", "rectangle 0 0 1 1")
            .with("k", "rectangle 0.1 0.1 0.9 0.9")
            .with("polygon", "2 A 4 0 4 : 0.2 0.2, 0.4 0.2, 0.4 0.4, 0.2 0.4");
        let f = r.get("custom_polygons").unwrap().build(&spec).unwrap();
        assert_eq!(f.region(2, [0.3, 0.3]), Region::A);
        let err = r.get("hexagons").err().unwrap().to_string();
        assert!(err.contains("radial_annuli"), "{err}");
    }
}
