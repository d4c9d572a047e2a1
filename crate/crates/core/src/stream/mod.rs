//! Stream functions in 2D.
//!
//! With `J = [[0, -1], [1, 0]]` the stream function of a solution `u` of
//! `div(gamma grad u) = 0` satisfies `J grad psi = gamma grad u`; it solves the dual problem with
//! conductivity `sigma = J^T gamma^{-1} J`, which swaps the roles of conductive and insulating
//! inclusions.

use crate::error::{Error, Result};
use crate::fem::{cell_tensors, nodal_residual, Fem, ScalarField, Space};
use crate::mesh::{Mesh, Point};
use crate::tensors::{dn_at, psd_leq, sigma_of, MatrixField, SymMat};

/// Largest boundary flux accepted before a stream function is built.
pub const FLUX_TOL: f64 = 1e-6;

/// Net flux `sum_v (K u)_v` over the vertices of boundary component `component`: the
/// variationally consistent value of `int gamma grad u . n`.
pub fn boundary_flux(mesh: &Mesh, gamma: &MatrixField, u: &ScalarField, component: usize) -> Result<f64> {
    if component >= mesh.n_components() {
        return Err(Error::UnknownBoundary(component));
    }
    let mut on = vec![false; mesh.n_vertices()];
    for e in mesh.boundary_edges().iter().filter(|e| e.component == component) {
        on[e.a] = true;
        on[e.b] = true;
    }
    vertex_set_flux(mesh, gamma, u, &on)
}

/// Flux leaving the discrete subdomain made of the vertices where `inside` holds.
pub fn subdomain_flux(mesh: &Mesh, gamma: &MatrixField, u: &ScalarField, inside: impl Fn(Point) -> bool) -> Result<f64> {
    let set: Vec<bool> = mesh.vertices().iter().map(|p| inside(*p)).collect();
    vertex_set_flux(mesh, gamma, u, &set)
}

fn vertex_set_flux(mesh: &Mesh, gamma: &MatrixField, u: &ScalarField, set: &[bool]) -> Result<f64> {
    u.check_mesh(mesh)?;
    let cells = cell_tensors(mesh, gamma)?;
    let r = nodal_residual(mesh, &cells, u.values());
    Ok(r.iter().zip(set).filter(|(_, s)| **s).map(|(v, _)| v).sum())
}

/// A field, its stream function and the least-squares mismatch between them.
#[derive(Clone, Debug)]
pub struct StreamPair {
    pub u: ScalarField,
    pub psi: ScalarField,
    /// `||gamma grad u - J grad psi||_{L2} / ||gamma grad u||_{L2}`.
    pub residual: f64,
}

fn rotate_back(q: [f64; 3]) -> [f64; 2] {
    // J^T q
    [q[1], -q[0]]
}

/// Mean-zero `psi` minimizing `int |J grad psi - gamma grad u|^2`.
///
/// Fails with `NonzeroFlux` if the flux of `gamma grad u` through some boundary component
/// exceeds [`FLUX_TOL`] relative to `max(1, ||gamma grad u||_{L1})`.
pub fn stream_function(fem: &Fem, mesh: &Mesh, gamma: &MatrixField, u: &ScalarField) -> Result<StreamPair> {
    u.check_mesh(mesh)?;
    let cells = cell_tensors(mesh, gamma)?;
    let q: Vec<[f64; 3]> = (0..mesh.n_triangles()).map(|t| cells[t].mul_vec(&u.gradient(mesh, t))).collect();
    let scale: f64 = (0..mesh.n_triangles()).map(|t| mesh.geom(t).area * q[t][0].hypot(q[t][1])).sum();
    for c in 0..mesh.n_components() {
        let f = boundary_flux(mesh, gamma, u, c)?;
        if f.abs() > FLUX_TOL * scale.max(1.0) {
            return Err(Error::NonzeroFlux { component: c, flux: f });
        }
    }
    let flux: Vec<[f64; 2]> = q.iter().map(|v| rotate_back(*v)).collect();
    let ident = vec![SymMat::identity(2); mesh.n_triangles()];
    let psi = fem.solve_flux(mesh, &ident, &flux, Space::MeanZero)?;
    let (mut num, mut den) = (0.0, 0.0);
    for t in 0..mesh.n_triangles() {
        let g = psi.gradient(mesh, t);
        let jg = [-g[1], g[0]];
        let a = mesh.geom(t).area;
        num += a * ((jg[0] - q[t][0]).powi(2) + (jg[1] - q[t][1]).powi(2));
        den += a * (q[t][0].powi(2) + q[t][1].powi(2));
    }
    let residual = if den > 0.0 { (num / den).sqrt() } else { num.sqrt() };
    Ok(StreamPair { u: u.clone(), psi, residual })
}

/// `sigma = J^T gamma^{-1} J` cellwise.
pub fn dual_cells(mesh: &Mesh, gamma: &MatrixField) -> Result<Vec<SymMat>> {
    cell_tensors(mesh, gamma)?.iter().map(sigma_of).collect()
}

/// Dual-norm size of the weak residual of `div(sigma grad psi) = 0` over test functions
/// vanishing on the boundary, relative to the `sigma`-energy norm of `psi`.
pub fn dual_equation_residual(fem: &Fem, mesh: &Mesh, gamma: &MatrixField, psi: &ScalarField) -> Result<f64> {
    psi.check_mesh(mesh)?;
    let sigma = dual_cells(mesh, gamma)?;
    let boundary = mesh.is_boundary_vertex();
    let mut r = nodal_residual(mesh, &sigma, psi.values());
    for (v, b) in r.iter_mut().zip(&boundary) {
        if *b {
            *v = 0.0;
        }
    }
    // z solves the sigma problem with load r, so r . z is the squared dual norm.
    let z = fem.solve_load(mesh, &sigma, &r, Space::Dirichlet)?;
    let dual: f64 = r.iter().zip(z.values()).map(|(a, b)| a * b).sum();
    let energy: f64 = (0..mesh.n_triangles())
        .map(|t| {
            let g = psi.gradient(mesh, t);
            mesh.geom(t).area * sigma[t].bilinear(&g, &g)
        })
        .sum();
    Ok((dual.max(0.0) / energy).sqrt())
}

/// `||(sigma_0 - sigma_n) grad(psi_n - psi_0)||_{L1} / ||Sigma_n||_{L1}` with
/// `Sigma_n = J^T gamma_0^{-1} d_n gamma_0^{-1} J`.
pub fn dual_gap(
    mesh: &Mesh,
    gamma0: &MatrixField,
    gamman: &MatrixField,
    psi0: &ScalarField,
    psin: &ScalarField,
) -> Result<f64> {
    let diff = psin.combine(1.0, psi0, -1.0)?;
    diff.check_mesh(mesh)?;
    let s0 = dual_cells(mesh, gamma0)?;
    let sn = dual_cells(mesh, gamman)?;
    let mass = sigma_mass(mesh, gamma0, gamman)?;
    if !(mass > 0.0) {
        return Err(Error::ZeroMeasure);
    }
    let s: f64 = (0..mesh.n_triangles())
        .map(|t| {
            let q = (s0[t] - sn[t]).mul_vec(&diff.gradient(mesh, t));
            mesh.geom(t).area * q[0].hypot(q[1])
        })
        .sum();
    Ok(s / mass)
}

/// `||Sigma_n||_{L1}` over the inclusion triangles.
pub fn sigma_mass(mesh: &Mesh, gamma0: &MatrixField, gamman: &MatrixField) -> Result<f64> {
    let c0 = cell_tensors(mesh, gamma0)?;
    let cn = cell_tensors(mesh, gamman)?;
    let mut s = 0.0;
    for t in mesh.inclusion_triangles() {
        let inv0 = c0[t].inverse()?;
        let big = inv0.sandwich(&dn_at(&c0[t], &cn[t], true)?);
        s += mesh.geom(t).area * rotate_sym(&big).frobenius();
    }
    Ok(s)
}

/// `J^T S J`.
fn rotate_sym(s: &SymMat) -> SymMat {
    SymMat::new2(s.get(1, 1), -s.get(0, 1), s.get(0, 0))
}

/// `||Sigma_n||_{L1} / ||d_n||_{L1}` and the admissible range
/// `[(min eig gamma_0^{-1})^2, (max eig gamma_0^{-1})^2]`, taken over the inclusion cells.
pub fn sigma_mass_ratio(mesh: &Mesh, gamma0: &MatrixField, gamman: &MatrixField) -> Result<(f64, f64, f64)> {
    let c0 = cell_tensors(mesh, gamma0)?;
    let cn = cell_tensors(mesh, gamman)?;
    let (mut l1, mut lo, mut hi) = (0.0, f64::INFINITY, 0.0_f64);
    for t in mesh.inclusion_triangles() {
        l1 += mesh.geom(t).area * dn_at(&c0[t], &cn[t], true)?.frobenius();
        let ev = c0[t].eigenvalues();
        lo = lo.min(1.0 / (ev[1] * ev[1]));
        hi = hi.max(1.0 / (ev[0] * ev[0]));
    }
    if !(l1 > 0.0) {
        return Err(Error::ZeroMeasure);
    }
    Ok((sigma_mass(mesh, gamma0, gamman)? / l1, lo, hi))
}

/// On every inclusion cell the dual conductivity sits on the other side of the dual
/// background: `sigma_n <= sigma_0` on `A` and `sigma_n >= sigma_0` on `B`.
pub fn roles_swapped(mesh: &Mesh, gamma0: &MatrixField, gamman: &MatrixField) -> Result<bool> {
    let s0 = dual_cells(mesh, gamma0)?;
    let sn = dual_cells(mesh, gamman)?;
    Ok(mesh.inclusion_triangles().all(|t| match mesh.region(t) {
        crate::tensors::Region::A => psd_leq(&sn[t], &s0[t]),
        crate::tensors::Region::B => psd_leq(&s0[t], &sn[t]),
        crate::tensors::Region::Background => true,
    }))
}
