//! P1 finite elements for `div(gamma grad u) = 0` on triangle meshes.
//!
//! Dirichlet values are imposed by elimination. Natural (Neumann) and periodic problems pin
//! one unknown and then project onto the declared mean-zero constraint. Green functions use
//! a unit nodal load at the vertex nearest the source point, with the sign convention
//! `div(gamma_0 grad G) = delta_y`.

pub mod solver;
pub mod sparse;

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::Shape;
use crate::mesh::{dist, Mesh, Point};
use crate::tensors::{MatrixField, SymMat};
use solver::{LinearSolver, PcgJacobi};
use sparse::{assemble, flux_load, DofMap};

pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;
/// Normal flux density as a function of the boundary point and the outward unit normal.
pub type FluxFn = Arc<dyn Fn(Point, [f64; 2]) -> f64 + Send + Sync>;

/// Nodal P1 field tied to a mesh geometry.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    geometry_id: u64,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(mesh: &Mesh, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), mesh.n_vertices(), "one value per vertex");
        ScalarField { geometry_id: mesh.geometry_id(), values }
    }

    pub fn zeros(mesh: &Mesh) -> Self {
        Self::new(mesh, vec![0.0; mesh.n_vertices()])
    }

    pub fn interpolate(mesh: &Mesh, f: impl Fn(Point) -> f64) -> Self {
        Self::new(mesh, mesh.vertices().iter().map(|p| f(*p)).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn geometry_id(&self) -> u64 {
        self.geometry_id
    }

    pub fn check_mesh(&self, mesh: &Mesh) -> Result<()> {
        if self.geometry_id != mesh.geometry_id() {
            return Err(Error::MismatchedMesh(format!(
                "field on geometry {} used with mesh {}",
                self.geometry_id,
                mesh.geometry_id()
            )));
        }
        Ok(())
    }

    pub fn gradient(&self, mesh: &Mesh, t: usize) -> [f64; 2] {
        mesh.gradient(t, &self.values)
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &ScalarField, b: f64) -> Result<ScalarField> {
        if self.geometry_id != other.geometry_id {
            return Err(Error::MismatchedMesh("combining fields of different meshes".into()));
        }
        Ok(ScalarField {
            geometry_id: self.geometry_id,
            values: self.values.iter().zip(&other.values).map(|(x, y)| a * x + b * y).collect(),
        })
    }

    /// Exact L2 norm of the P1 interpolant.
    pub fn l2_norm(&self, mesh: &Mesh) -> f64 {
        let mut s = 0.0;
        for (t, tri) in mesh.triangles().iter().enumerate() {
            let v = [self.values[tri[0]], self.values[tri[1]], self.values[tri[2]]];
            let sq: f64 = v.iter().map(|x| x * x).sum::<f64>() + v[0] * v[1] + v[1] * v[2] + v[0] * v[2];
            s += mesh.geom(t).area * sq / 6.0;
        }
        s.sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `int_Omega u dx`.
    pub fn integral(&self, mesh: &Mesh) -> f64 {
        volume_integral(mesh, &self.values)
    }

    /// `int_{dOmega} u ds`.
    pub fn boundary_integral(&self, mesh: &Mesh) -> f64 {
        boundary_integral(mesh, &self.values)
    }
}

fn volume_integral(mesh: &Mesh, v: &[f64]) -> f64 {
    mesh.triangles()
        .iter()
        .enumerate()
        .map(|(t, tri)| mesh.geom(t).area * (v[tri[0]] + v[tri[1]] + v[tri[2]]) / 3.0)
        .sum()
}

fn boundary_integral(mesh: &Mesh, v: &[f64]) -> f64 {
    mesh.boundary_edges()
        .iter()
        .map(|e| 0.5 * dist(mesh.vertices()[e.a], mesh.vertices()[e.b]) * (v[e.a] + v[e.b]))
        .sum()
}

/// Boundary condition for [`Fem::solve`].
#[derive(Clone)]
pub enum BoundaryData {
    /// `u = g` on the boundary.
    Dirichlet(ScalarFn),
    /// `gamma grad u . n = h` with `int h = 0`; the solution has zero boundary mean.
    Neumann(FluxFn),
    /// `u = gradient . x + periodic`, periodic part with zero mean over the cell.
    Periodic { gradient: [f64; 2] },
}

impl BoundaryData {
    pub fn dirichlet(g: impl Fn(Point) -> f64 + Send + Sync + 'static) -> Self {
        BoundaryData::Dirichlet(Arc::new(g))
    }

    pub fn neumann(h: impl Fn(Point, [f64; 2]) -> f64 + Send + Sync + 'static) -> Self {
        BoundaryData::Neumann(Arc::new(h))
    }
}

impl fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryData::Dirichlet(_) => write!(f, "Dirichlet"),
            BoundaryData::Neumann(_) => write!(f, "Neumann"),
            BoundaryData::Periodic { gradient } => write!(f, "Periodic({gradient:?})"),
        }
    }
}

/// Variational space of a perturbation or corrector problem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Space {
    /// Zero trace on the boundary.
    Dirichlet,
    /// Natural boundary condition, zero mean over the domain.
    MeanZero,
    /// Periodic on a square cell, zero mean over the cell.
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GreenKind {
    Dirichlet,
    Neumann,
}

/// Per-triangle conductivity, validated.
pub fn cell_tensors(mesh: &Mesh, gamma: &MatrixField) -> Result<Vec<SymMat>> {
    if gamma.dim() != 2 {
        return Err(Error::UnsupportedDimension(gamma.dim()));
    }
    let cells: Vec<SymMat> = (0..mesh.n_triangles()).map(|t| gamma.at(mesh.zone_point(t), mesh.region(t))).collect();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for c in &cells {
        c.check_conductivity()?;
        let ev = c.eigenvalues();
        lo = lo.min(ev[0]);
        hi = hi.max(ev[1]);
    }
    if hi / lo > 1e8 {
        log::warn!("conductivity eigenvalue ratio {:.3e} exceeds 1e8; expect poor conditioning", hi / lo);
    }
    Ok(cells)
}

/// `int gamma grad w . grad w`, exact for P1.
pub fn energy(mesh: &Mesh, gamma: &MatrixField, w: &ScalarField) -> Result<f64> {
    w.check_mesh(mesh)?;
    Ok(energy_cells(mesh, &cell_tensors(mesh, gamma)?, w))
}

pub fn energy_cells(mesh: &Mesh, cells: &[SymMat], w: &ScalarField) -> f64 {
    (0..mesh.n_triangles())
        .map(|t| {
            let g = w.gradient(mesh, t);
            mesh.geom(t).area * cells[t].bilinear(&g, &g)
        })
        .sum()
}

/// Nodal residual `sum_T int gamma grad u . grad phi_i` of every vertex.
pub fn nodal_residual(mesh: &Mesh, cells: &[SymMat], u: &[f64]) -> Vec<f64> {
    let mut r = vec![0.0; mesh.n_vertices()];
    for (t, tri) in mesh.triangles().iter().enumerate() {
        let q = cells[t].mul_vec(&mesh.gradient(t, u));
        let g = mesh.geom(t);
        for k in 0..3 {
            r[tri[k]] += g.area * (q[0] * g.grad[k][0] + q[1] * g.grad[k][1]);
        }
    }
    r
}

/// Finite-element solver context; the linear solver is a pluggable strategy.
#[derive(Clone, Debug)]
pub struct Fem {
    solver: Arc<dyn LinearSolver>,
}

impl Default for Fem {
    fn default() -> Self {
        Fem { solver: Arc::new(PcgJacobi::default()) }
    }
}

impl Fem {
    pub fn new(solver: Arc<dyn LinearSolver>) -> Self {
        Fem { solver }
    }

    pub fn solver_name(&self) -> &'static str {
        self.solver.name()
    }

    fn run(&self, mat: &sparse::CsrMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut x = vec![0.0; mat.n()];
        self.solver.solve(mat, rhs, &mut x)?;
        Ok(x)
    }

    fn expand(dofs: &DofMap, x: &[f64], fixed: Option<&[f64]>) -> Vec<f64> {
        dofs.dof
            .iter()
            .enumerate()
            .map(|(v, d)| match d {
                Some(i) => x[*i],
                None => fixed.map_or(0.0, |g| g[v]),
            })
            .collect()
    }

    fn natural_dofs(mesh: &Mesh, periodic: bool) -> Result<DofMap> {
        let map = if periodic {
            Some(mesh.periodic_map().ok_or_else(|| {
                Error::InvalidArgument("periodic space requested on a mesh without a periodic map".into())
            })?)
        } else {
            None
        };
        Ok(DofMap::pinned(mesh, map, 0))
    }

    pub fn solve(&self, mesh: &Mesh, gamma: &MatrixField, bc: &BoundaryData) -> Result<ScalarField> {
        let cells = cell_tensors(mesh, gamma)?;
        match bc {
            BoundaryData::Dirichlet(g) => {
                let dofs = DofMap::dirichlet(mesh);
                let fixed: Vec<f64> = mesh.vertices().iter().map(|p| g(*p)).collect();
                let (mat, rhs) = assemble(mesh, &cells, &dofs, Some(&fixed));
                let x = self.run(&mat, &rhs)?;
                Ok(ScalarField::new(mesh, Self::expand(&dofs, &x, Some(&fixed))))
            }
            BoundaryData::Neumann(h) => {
                let load = neumann_load(mesh, h.as_ref())?;
                let dofs = Self::natural_dofs(mesh, false)?;
                let (mat, _) = assemble(mesh, &cells, &dofs, None);
                let mut rhs = vec![0.0; dofs.n];
                for (v, d) in dofs.dof.iter().enumerate() {
                    if let Some(i) = d {
                        rhs[*i] += load[v];
                    }
                }
                let x = self.run(&mat, &rhs)?;
                let mut u = Self::expand(&dofs, &x, None);
                let shift = boundary_integral(mesh, &u) / mesh.boundary_length();
                u.iter_mut().for_each(|v| *v -= shift);
                Ok(ScalarField::new(mesh, u))
            }
            BoundaryData::Periodic { gradient } => {
                let flux: Vec<[f64; 2]> = cells
                    .iter()
                    .map(|c| {
                        let q = c.mul_vec(gradient);
                        [-q[0], -q[1]]
                    })
                    .collect();
                let per = self.solve_flux(mesh, &cells, &flux, Space::Periodic)?;
                let u = mesh
                    .vertices()
                    .iter()
                    .zip(per.values())
                    .map(|(p, w)| gradient[0] * p[0] + gradient[1] * p[1] + w)
                    .collect();
                Ok(ScalarField::new(mesh, u))
            }
        }
    }

    /// Solves `int K grad w . grad phi = int flux . grad phi` for all discrete `phi` in `space`,
    /// with `flux` constant per triangle.
    pub fn solve_flux(&self, mesh: &Mesh, cells: &[SymMat], flux: &[[f64; 2]], space: Space) -> Result<ScalarField> {
        let dofs = match space {
            Space::Dirichlet => DofMap::dirichlet(mesh),
            Space::MeanZero => Self::natural_dofs(mesh, false)?,
            Space::Periodic => Self::natural_dofs(mesh, true)?,
        };
        let (mat, _) = assemble(mesh, cells, &dofs, None);
        let rhs = flux_load(mesh, flux, &dofs);
        let x = self.run(&mat, &rhs)?;
        let mut w = Self::expand(&dofs, &x, None);
        if space != Space::Dirichlet {
            let shift = volume_integral(mesh, &w) / mesh.total_area();
            w.iter_mut().for_each(|v| *v -= shift);
        }
        Ok(ScalarField::new(mesh, w))
    }

    /// Solves `int K grad w . grad phi_v = load_v` for every free vertex `v` of `space`.
    pub fn solve_load(&self, mesh: &Mesh, cells: &[SymMat], load: &[f64], space: Space) -> Result<ScalarField> {
        let dofs = match space {
            Space::Dirichlet => DofMap::dirichlet(mesh),
            Space::MeanZero => Self::natural_dofs(mesh, false)?,
            Space::Periodic => Self::natural_dofs(mesh, true)?,
        };
        let (mat, _) = assemble(mesh, cells, &dofs, None);
        let mut rhs = vec![0.0; dofs.n];
        for (v, d) in dofs.dof.iter().enumerate() {
            if let Some(i) = d {
                rhs[*i] += load[v];
            }
        }
        let x = self.run(&mat, &rhs)?;
        Ok(ScalarField::new(mesh, Self::expand(&dofs, &x, None)))
    }

    /// Perturbation `w_n` with `int gamma_n grad w . grad phi = int (gamma_0 - gamma_n) grad u_0 . grad phi`.
    pub fn solve_perturbation(
        &self,
        mesh: &Mesh,
        gamma0: &MatrixField,
        gamman: &MatrixField,
        u0: &ScalarField,
        space: Space,
    ) -> Result<ScalarField> {
        u0.check_mesh(mesh)?;
        let c0 = cell_tensors(mesh, gamma0)?;
        let cn = cell_tensors(mesh, gamman)?;
        let flux: Vec<[f64; 2]> = (0..mesh.n_triangles())
            .map(|t| {
                let q = (c0[t] - cn[t]).mul_vec(&u0.gradient(mesh, t));
                [q[0], q[1]]
            })
            .collect();
        self.solve_flux(mesh, &cn, &flux, space)
    }

    /// Discrete Green (`Dirichlet`) or Neumann function with source at the vertex nearest `y`.
    ///
    /// `keep_out` is the safety region the source must avoid; the source must also lie at least
    /// `2h` from every inclusion triangle.
    pub fn greens_function(
        &self,
        mesh: &Mesh,
        gamma0: &MatrixField,
        y: Point,
        kind: GreenKind,
        keep_out: Option<&Shape>,
    ) -> Result<ScalarField> {
        if keep_out.is_some_and(|k| k.contains(y)) || mesh.distance_to_inclusions(y) < 2.0 * mesh.h() {
            return Err(Error::PointInsideK(y[0], y[1]));
        }
        let cells = cell_tensors(mesh, gamma0)?;
        let v = mesh.nearest_vertex(y);
        match kind {
            GreenKind::Dirichlet => {
                let dofs = DofMap::dirichlet(mesh);
                let (mat, _) = assemble(mesh, &cells, &dofs, None);
                let mut rhs = vec![0.0; dofs.n];
                let i = dofs.dof[v].ok_or_else(|| Error::InvalidArgument("Green source on the boundary".into()))?;
                rhs[i] = -1.0;
                let x = self.run(&mat, &rhs)?;
                Ok(ScalarField::new(mesh, Self::expand(&dofs, &x, None)))
            }
            GreenKind::Neumann => {
                let dofs = Self::natural_dofs(mesh, false)?;
                let (mat, _) = assemble(mesh, &cells, &dofs, None);
                let len = mesh.boundary_length();
                let mut load = vec![0.0; mesh.n_vertices()];
                for e in mesh.boundary_edges() {
                    let l = dist(mesh.vertices()[e.a], mesh.vertices()[e.b]);
                    load[e.a] += 0.5 * l / len;
                    load[e.b] += 0.5 * l / len;
                }
                load[v] -= 1.0;
                let mut rhs = vec![0.0; dofs.n];
                for (vv, d) in dofs.dof.iter().enumerate() {
                    if let Some(i) = d {
                        rhs[*i] += load[vv];
                    }
                }
                let x = self.run(&mat, &rhs)?;
                let mut u = Self::expand(&dofs, &x, None);
                let shift = boundary_integral(mesh, &u) / len;
                u.iter_mut().for_each(|x| *x -= shift);
                Ok(ScalarField::new(mesh, u))
            }
        }
    }
}

/// Outward unit normal of a boundary edge oriented with the domain on its left.
pub fn outward_normal(a: Point, b: Point) -> [f64; 2] {
    let l = dist(a, b);
    [(b[1] - a[1]) / l, -(b[0] - a[0]) / l]
}

/// `int_{dOmega} h phi_i ds` by two-point Gauss quadrature per edge; checks `int h = 0`.
fn neumann_load(mesh: &Mesh, h: &(dyn Fn(Point, [f64; 2]) -> f64 + Send + Sync)) -> Result<Vec<f64>> {
    let mut load = vec![0.0; mesh.n_vertices()];
    let mut total = 0.0;
    let mut scale = 0.0;
    let s = 0.5 / 3f64.sqrt();
    for e in mesh.boundary_edges() {
        let (a, b) = (mesh.vertices()[e.a], mesh.vertices()[e.b]);
        let n = outward_normal(a, b);
        let l = dist(a, b);
        for xi in [0.5 - s, 0.5 + s] {
            let p = [a[0] + xi * (b[0] - a[0]), a[1] + xi * (b[1] - a[1])];
            let hv = h(p, n) * 0.5 * l;
            load[e.a] += hv * (1.0 - xi);
            load[e.b] += hv * xi;
            total += hv;
            scale += hv.abs();
        }
    }
    if total.abs() > 1e-10 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::InvalidArgument(format!(
            "Neumann data must integrate to zero (got {total:.3e} relative to {scale:.3e})"
        )));
    }
    Ok(load)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::grid::uniform_rectangle;

    #[test]
    fn energy_of_linear_field_on_unit_square() {
        let m = uniform_rectangle(0.0, 1.0, 0.0, 1.0, 0.2).unwrap();
        let w = ScalarField::interpolate(&m, |p| p[0]);
        let e = energy(&m, &MatrixField::identity(2), &w).unwrap();
        assert!((e - 1.0).abs() < 1e-13);
        assert_eq!(energy(&m, &MatrixField::identity(2), &ScalarField::zeros(&m)).unwrap(), 0.0);
    }

    #[test]
    fn linear_dirichlet_reproduced() {
        let m = uniform_rectangle(-1.0, 1.0, -1.0, 1.0, 0.1).unwrap();
        let u = Fem::default()
            .solve(&m, &MatrixField::identity(2), &BoundaryData::dirichlet(|p| 2.0 * p[0] - p[1]))
            .unwrap();
        for (p, v) in m.vertices().iter().zip(u.values()) {
            assert!((v - (2.0 * p[0] - p[1])).abs() < 1e-10);
        }
    }

    #[test]
    fn l2_norm_exact_for_linear() {
        let m = uniform_rectangle(0.0, 1.0, 0.0, 1.0, 0.5).unwrap();
        let w = ScalarField::interpolate(&m, |p| p[0]);
        assert!((w.l2_norm(&m) - (1.0f64 / 3.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn incompatible_neumann_rejected() {
        let m = uniform_rectangle(0.0, 1.0, 0.0, 1.0, 0.25).unwrap();
        let r = Fem::default().solve(&m, &MatrixField::identity(2), &BoundaryData::neumann(|_, _| 1.0));
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }
}
