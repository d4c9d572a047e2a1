use crate::error::{Error, Result};
use crate::fem::{cell_tensors, ScalarField};
use crate::mesh::{Mesh, Point};
use crate::polarization::PolarizationRecord;
use crate::tensors::MatrixField;

/// `int (gamma_n - gamma_0)(grad w_n + grad u_0) . grad G` over the inclusion triangles.
///
/// On a shared mesh this equals the nodal value of `w_n` at the Green source exactly (up to
/// solver tolerance), by discrete Galerkin duality.
pub fn reciprocity_value(
    mesh: &Mesh,
    gamma0: &MatrixField,
    gamman: &MatrixField,
    u0: &ScalarField,
    wn: &ScalarField,
    green: &ScalarField,
) -> Result<f64> {
    for f in [u0, wn, green] {
        f.check_mesh(mesh)?;
    }
    let c0 = cell_tensors(mesh, gamma0)?;
    let cn = cell_tensors(mesh, gamman)?;
    Ok(mesh
        .inclusion_triangles()
        .map(|t| {
            let gw = wn.gradient(mesh, t);
            let gu = u0.gradient(mesh, t);
            let q = (cn[t] - c0[t]).mul_vec(&[gw[0] + gu[0], gw[1] + gu[1]]);
            let gg = green.gradient(mesh, t);
            mesh.geom(t).area * (q[0] * gg[0] + q[1] * gg[1])
        })
        .sum())
}

/// `||d_n||_1 sum_T weight M_ij d_i u_0 d_j G`.
pub fn leading_order(mesh: &Mesh, record: &PolarizationRecord, u0: &ScalarField, green: &ScalarField) -> Result<f64> {
    if record.geometry_id != mesh.geometry_id() {
        return Err(Error::MismatchedMesh("polarization record from another mesh".into()));
    }
    u0.check_mesh(mesh)?;
    green.check_mesh(mesh)?;
    let s: f64 = record
        .cells
        .iter()
        .map(|c| {
            let gu = u0.gradient(mesh, c.triangle);
            let gg = green.gradient(mesh, c.triangle);
            let mut v = 0.0;
            for i in 0..2 {
                for j in 0..2 {
                    v += c.m[i][j] * gu[i] * gg[j];
                }
            }
            c.weight * v
        })
        .sum();
    Ok(record.l1_dn * s)
}

/// Exact perturbation, reciprocity integral and leading-order term at one source point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RepresentationCheck {
    pub y: Point,
    /// Mesh vertex carrying the source.
    pub vertex: usize,
    pub exact: f64,
    pub reciprocity: f64,
    pub leading: f64,
    /// `exact - leading`.
    pub remainder: f64,
    /// `remainder / ||d_n||_{L1}`.
    pub scaled_remainder: f64,
}

impl RepresentationCheck {
    /// `|exact - reciprocity|` relative to `max(1, |exact|)`.
    pub fn identity_defect(&self) -> f64 {
        (self.exact - self.reciprocity).abs() / self.exact.abs().max(1.0)
    }
}

/// Evaluates the representation at `y` for a Dirichlet perturbation `wn = u_n - u_0` and the
/// Dirichlet Green function `green` with source at the vertex nearest `y`.
#[allow(clippy::too_many_arguments)]
pub fn representation_check(
    mesh: &Mesh,
    gamma0: &MatrixField,
    gamman: &MatrixField,
    u0: &ScalarField,
    wn: &ScalarField,
    record: &PolarizationRecord,
    green: &ScalarField,
    y: Point,
) -> Result<RepresentationCheck> {
    let vertex = mesh.nearest_vertex(y);
    let exact = wn.values()[vertex];
    let reciprocity = reciprocity_value(mesh, gamma0, gamman, u0, wn, green)?;
    let leading = leading_order(mesh, record, u0, green)?;
    let remainder = exact - leading;
    Ok(RepresentationCheck {
        y,
        vertex,
        exact,
        reciprocity,
        leading,
        remainder,
        scaled_remainder: remainder / record.l1_dn,
    })
}
