//! Correctors `w_n^i`, the normalized measure `mu_n = |d_n| / ||d_n||_1` and the cellwise
//! densities `D`, `W`, `M = D - W` with respect to it.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fem::{cell_tensors, Fem, ScalarField, Space};
use crate::mesh::{Mesh, Point};
use crate::tensors::{dn_at, MatrixField, SymMat};

type Mat2 = [[f64; 2]; 2];

/// Correctors for `e_1, e_2`: `int gamma_n grad w . grad phi = int (gamma_0 - gamma_n) e_i . grad phi`.
///
/// Both solves run concurrently. `Space::Periodic` needs a mesh with a periodic vertex map.
pub fn correctors(
    fem: &Fem,
    mesh: &Mesh,
    gamma0: &MatrixField,
    gamman: &MatrixField,
    space: Space,
) -> Result<Vec<ScalarField>> {
    let c0 = cell_tensors(mesh, gamma0)?;
    let cn = cell_tensors(mesh, gamman)?;
    (0..2)
        .into_par_iter()
        .map(|i| {
            let flux: Vec<[f64; 2]> = c0
                .iter()
                .zip(&cn)
                .map(|(a, b)| {
                    let q = (*a - *b).mul_vec(&unit(i));
                    [q[0], q[1]]
                })
                .collect();
            fem.solve_flux(mesh, &cn, &flux, space)
        })
        .collect()
}

fn unit(i: usize) -> [f64; 2] {
    let mut e = [0.0; 2];
    e[i] = 1.0;
    e
}

/// Densities of one inclusion triangle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CellDensity {
    pub triangle: usize,
    pub centroid: Point,
    /// `|d_n|_F area / ||d_n||_1`.
    pub weight: f64,
    pub d: Mat2,
    pub w: Mat2,
    pub m: Mat2,
}

/// Quantity integrated against `mu_n` by [`measure_integrate`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    Mu,
    D(usize, usize),
    W(usize, usize),
    M(usize, usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolarizationRecord {
    pub geometry_id: u64,
    /// Discrete `||d_n||_{L1}` over the tagged inclusion triangles.
    pub l1_dn: f64,
    pub cells: Vec<CellDensity>,
}

/// Cellwise `D = (gamma_n - gamma_0)/|d_n|`, `W_ij = grad w^i . (gamma_0 - gamma_n) e_j / |d_n|`
/// and `M = D - W` on the inclusion triangles.
pub fn tensor_densities(
    mesh: &Mesh,
    gamma0: &MatrixField,
    gamman: &MatrixField,
    correctors: &[ScalarField],
) -> Result<PolarizationRecord> {
    if correctors.len() != 2 {
        return Err(Error::DimensionMismatch(format!("expected 2 correctors, got {}", correctors.len())));
    }
    for w in correctors {
        w.check_mesh(mesh)?;
    }
    let c0 = cell_tensors(mesh, gamma0)?;
    let cn = cell_tensors(mesh, gamman)?;
    let mut cells = Vec::new();
    let mut l1 = 0.0;
    for t in mesh.inclusion_triangles() {
        let dn = dn_at(&c0[t], &cn[t], true)?.frobenius();
        let area = mesh.geom(t).area;
        if !(dn * area > 0.0) {
            continue;
        }
        l1 += dn * area;
        let diff = cn[t] - c0[t];
        let mut d = [[0.0; 2]; 2];
        let mut w = [[0.0; 2]; 2];
        let mut m = [[0.0; 2]; 2];
        for (i, wi) in correctors.iter().enumerate() {
            let q = diff.mul_vec(&wi.gradient(mesh, t));
            for j in 0..2 {
                d[i][j] = diff.get(i, j) / dn;
                w[i][j] = -q[j] / dn;
                m[i][j] = d[i][j] - w[i][j];
            }
        }
        cells.push(CellDensity { triangle: t, centroid: mesh.centroid(t), weight: dn * area, d, w, m });
    }
    if cells.is_empty() {
        return Err(Error::ZeroMeasure);
    }
    cells.iter_mut().for_each(|c| c.weight /= l1);
    Ok(PolarizationRecord { geometry_id: mesh.geometry_id(), l1_dn: l1, cells })
}

impl CellDensity {
    fn value(&self, which: Component) -> f64 {
        match which {
            Component::Mu => 1.0,
            Component::D(i, j) => self.d[i][j],
            Component::W(i, j) => self.w[i][j],
            Component::M(i, j) => self.m[i][j],
        }
    }
}

/// `sum_T weight * density * phi(centroid)` over the inclusion triangles.
pub fn measure_integrate(record: &PolarizationRecord, phi: impl Fn(Point) -> f64, which: Component) -> f64 {
    record.cells.iter().map(|c| c.weight * c.value(which) * phi(c.centroid)).sum()
}

impl PolarizationRecord {
    pub fn total_mass(&self) -> f64 {
        self.cells.iter().map(|c| c.weight).sum()
    }

    fn mean(&self, f: impl Fn(&CellDensity) -> Mat2) -> Mat2 {
        let mut s = [[0.0; 2]; 2];
        for c in &self.cells {
            let v = f(c);
            for i in 0..2 {
                for j in 0..2 {
                    s[i][j] += c.weight * v[i][j];
                }
            }
        }
        s
    }

    /// `mu`-weighted averages.
    pub fn d_mean(&self) -> Mat2 {
        self.mean(|c| c.d)
    }

    pub fn w_mean(&self) -> Mat2 {
        self.mean(|c| c.w)
    }

    pub fn m_mean(&self) -> Mat2 {
        self.mean(|c| c.m)
    }

    /// `||M - M^T||_F` of the averaged `M`.
    pub fn asymmetry_defect(&self) -> f64 {
        let m = self.m_mean();
        SQRT2 * (m[0][1] - m[1][0]).abs()
    }

    /// Symmetric part of the averaged `M`.
    pub fn m_tensor(&self) -> SymMat {
        symmetric_part(self.m_mean())
    }

    pub fn w_tensor(&self) -> SymMat {
        symmetric_part(self.w_mean())
    }

    /// `triangle_id,weight,D11,D12,D22,W11,W12,W21,W22,M11,M12,M21,M22`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("triangle_id,weight,D11,D12,D22,W11,W12,W21,W22,M11,M12,M21,M22\n");
        for c in &self.cells {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                c.triangle,
                c.weight,
                c.d[0][0],
                c.d[0][1],
                c.d[1][1],
                c.w[0][0],
                c.w[0][1],
                c.w[1][0],
                c.w[1][1],
                c.m[0][0],
                c.m[0][1],
                c.m[1][0],
                c.m[1][1]
            );
        }
        s
    }
}

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn symmetric_part(m: Mat2) -> SymMat {
    SymMat::new2(m[0][0], 0.5 * (m[0][1] + m[1][0]), m[1][1])
}

/// Tolerance on the eigenvalue bounds of `W`.
pub const TOL_W: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WBounds {
    pub min: f64,
    pub max: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Eigenvalue range of the symmetric part of the averaged `W` against `[0, 1/sqrt(2)]`
/// (isotropic phases) or `[0, 1]`, each widened by [`TOL_W`].
pub fn w_bounds_check(record: &PolarizationRecord, isotropic: bool) -> WBounds {
    let ev = record.w_tensor().eigenvalues();
    let bound = if isotropic { 1.0 / SQRT2 } else { 1.0 };
    let (min, max) = (ev[0], ev[1]);
    WBounds { min, max, bound, pass: min >= -TOL_W && max <= bound + TOL_W }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConversionSign {
    /// Factor `gamma_1 - gamma_0`.
    Plus,
    /// Factor `gamma_0 - gamma_1`.
    Minus,
}

/// `(1/sqrt d) gamma_1 / (gamma_1^2 + gamma_0^2) (+-(gamma_1 - gamma_0)) MM` for isotropic
/// phases, mapping a field-factor tensor `MM` to the `M` normalization used here.
pub fn cv_convert(mm: &SymMat, gamma1: f64, gamma0: f64, sign: ConversionSign) -> SymMat {
    let s = match sign {
        ConversionSign::Plus => gamma1 - gamma0,
        ConversionSign::Minus => gamma0 - gamma1,
    };
    let d = mm.dim() as f64;
    mm.scaled(gamma1 / (gamma1 * gamma1 + gamma0 * gamma0) * s / d.sqrt())
}

/// `max_i ||(gamma_n - gamma_0) grad(w_y^i - w_x^i)||_{L1} / ||d_n||_{L1}` for two corrector sets
/// on the same mesh.
pub fn bc_independence(
    mesh: &Mesh,
    gamma0: &MatrixField,
    gamman: &MatrixField,
    wx: &[ScalarField],
    wy: &[ScalarField],
) -> Result<f64> {
    if wx.len() != wy.len() {
        return Err(Error::DimensionMismatch("corrector sets differ in size".into()));
    }
    let c0 = cell_tensors(mesh, gamma0)?;
    let cn = cell_tensors(mesh, gamman)?;
    let l1 = l1_dn(mesh, gamma0, gamman)?;
    if !(l1 > 0.0) {
        return Err(Error::ZeroMeasure);
    }
    let mut worst = 0.0_f64;
    for (x, y) in wx.iter().zip(wy) {
        let diff = y.combine(1.0, x, -1.0)?;
        diff.check_mesh(mesh)?;
        let s: f64 = mesh
            .inclusion_triangles()
            .map(|t| {
                let q = (cn[t] - c0[t]).mul_vec(&diff.gradient(mesh, t));
                mesh.geom(t).area * q[0].hypot(q[1])
            })
            .sum();
        worst = worst.max(s / l1);
    }
    Ok(worst)
}

/// Discrete `||d_n||_{L1}` over the tagged inclusion triangles.
pub fn l1_dn(mesh: &Mesh, gamma0: &MatrixField, gamman: &MatrixField) -> Result<f64> {
    let c0 = cell_tensors(mesh, gamma0)?;
    let cn = cell_tensors(mesh, gamman)?;
    let mut l1 = 0.0;
    for t in mesh.inclusion_triangles() {
        l1 += mesh.geom(t).area * dn_at(&c0[t], &cn[t], true)?.frobenius();
    }
    Ok(l1)
}

/// Restricts a field on a mesh extending `base` (same leading vertices, as produced by the
/// periodic embedding) to `base`.
pub fn restrict_to(base: &Mesh, extended: &Mesh, field: &ScalarField) -> Result<ScalarField> {
    field.check_mesh(extended)?;
    let n = base.n_vertices();
    if extended.n_vertices() < n || extended.vertices()[..n] != *base.vertices() {
        return Err(Error::MismatchedMesh("extended mesh does not start with the base vertices".into()));
    }
    Ok(ScalarField::new(base, field.values()[..n].to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::grid::uniform_rectangle;
    use crate::tensors::Region;

    fn square_with_block(lambda: f64) -> (Mesh, MatrixField) {
        let m = uniform_rectangle(-1.0, 1.0, -1.0, 1.0, 0.1)
            .unwrap()
            .retagged(|p| if p[0].abs() < 0.3 && p[1].abs() < 0.3 { Region::A } else { Region::Background });
        let g = MatrixField::identity(2).with_region(Region::A, std::sync::Arc::new(move |_| SymMat::scalar(2, lambda)));
        (m, g)
    }

    #[test]
    fn homogeneous_correctors_vanish() {
        let (m, _) = square_with_block(1.0);
        let g0 = MatrixField::identity(2);
        let w = correctors(&Fem::default(), &m, &g0, &g0, Space::Dirichlet).unwrap();
        assert!(w.iter().all(|f| f.max_abs() < 1e-14));
        let rec = tensor_densities(&m, &g0, &g0, &w).unwrap();
        assert!((rec.total_mass() - 1.0).abs() < 1e-12);
        let b = w_bounds_check(&rec, true);
        assert!(b.pass && b.max.abs() < 1e-14);
    }

    #[test]
    fn isotropic_d_density_exact() {
        let l = 5.0;
        let (m, g) = square_with_block(l);
        let g0 = MatrixField::identity(2);
        let w = correctors(&Fem::default(), &m, &g0, &g, Space::Dirichlet).unwrap();
        let rec = tensor_densities(&m, &g0, &g, &w).unwrap();
        let expect = (l - 1.0) / (SQRT2 * (l + 1.0 / l));
        for c in &rec.cells {
            assert!((c.d[0][0] - expect).abs() < 1e-14 && c.d[0][1] == 0.0);
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(c.m[i][j], c.d[i][j] - c.w[i][j]);
                }
            }
        }
        assert!((measure_integrate(&rec, |_| 1.0, Component::Mu) - 1.0).abs() < 1e-12);
        assert!((measure_integrate(&rec, |_| 1.0, Component::D(0, 0)) - expect).abs() < 1e-12);
        assert!(measure_integrate(&rec, |p| p[0], Component::Mu).abs() < 1e-6);
    }

    #[test]
    fn no_inclusion_is_zero_measure() {
        let m = uniform_rectangle(0.0, 1.0, 0.0, 1.0, 0.25).unwrap();
        let g0 = MatrixField::identity(2);
        let w = vec![ScalarField::zeros(&m), ScalarField::zeros(&m)];
        assert!(matches!(tensor_densities(&m, &g0, &g0, &w), Err(Error::ZeroMeasure)));
    }

    #[test]
    fn conversion_signs() {
        let mm = SymMat::identity(2);
        assert_eq!(cv_convert(&mm, 1.0, 1.0, ConversionSign::Plus), SymMat::zero(2));
        let p = cv_convert(&mm, 3.0, 1.0, ConversionSign::Plus);
        let q = cv_convert(&mm, 3.0, 1.0, ConversionSign::Minus);
        assert!((p + q).frobenius() < 1e-15 && p.get(0, 0) > 0.0);
    }

    #[test]
    fn same_space_discrepancy_is_zero() {
        let (m, g) = square_with_block(4.0);
        let g0 = MatrixField::identity(2);
        let w = correctors(&Fem::default(), &m, &g0, &g, Space::Dirichlet).unwrap();
        assert_eq!(bc_independence(&m, &g0, &g, &w, &w).unwrap(), 0.0);
    }
}
