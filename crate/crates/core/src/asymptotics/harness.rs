use std::sync::Arc;

use rayon::prelude::*;

use super::representation::{representation_check, RepresentationCheck};
use super::RateTable;
use crate::error::{Error, Result};
use crate::fem::{cell_tensors, energy_cells, BoundaryData, Fem, GreenKind, ScalarField, Space};
use crate::geometry::{background, conductivity, mesh_for, InclusionFamily, Shape};
use crate::mesh::{Mesh, Point};
use crate::polarization::{bc_independence, correctors, l1_dn, tensor_densities, PolarizationRecord};
use crate::registry::Registry;
use crate::tensors::MatrixField;

pub type DataFn = dyn Fn(Point) -> f64 + Send + Sync;

/// Boundary data dictionary over which uniformity in `g` is sampled.
pub fn boundary_data_registry() -> Registry<DataFn> {
    let mut r: Registry<DataFn> = Registry::new("boundary data");
    r.register("x1", Arc::new(|p: Point| p[0]));
    r.register("x2", Arc::new(|p: Point| p[1]));
    r.register("x1x2", Arc::new(|p: Point| p[0] * p[1]));
    r.register("harmonic2", Arc::new(|p: Point| p[0] * p[0] - p[1] * p[1]));
    r
}

/// Quantities whose decay against `||d_n||_{L1}` the harness fits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantity {
    /// `int gamma_n grad w_n . grad w_n`.
    Energy,
    /// `||w_n||_{L2}`.
    L2,
    /// `max_y |w_n(y) - leading(y)|` over the probe points.
    LinfRemainder,
    /// `||(gamma_n - gamma_0) grad w_n||_{L1}`.
    FluxL1,
    /// Scaled Dirichlet/Neumann corrector discrepancy.
    BcGap,
}

impl Quantity {
    pub const ALL: [Quantity; 5] =
        [Quantity::Energy, Quantity::L2, Quantity::LinfRemainder, Quantity::FluxL1, Quantity::BcGap];

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::Energy => "energy",
            Quantity::L2 => "l2",
            Quantity::LinfRemainder => "linf_remainder",
            Quantity::FluxL1 => "flux_l1",
            Quantity::BcGap => "bc_gap",
        }
    }

    pub fn parse(s: &str) -> Result<Quantity> {
        Quantity::ALL.into_iter().find(|q| q.name() == s).ok_or_else(|| Error::UnknownName {
            kind: "quantity",
            name: s.to_string(),
            supported: Quantity::ALL.map(|q| q.name()).join(", "),
        })
    }

    /// Exponent predicted by the corresponding bound.
    pub fn expected_exponent(&self) -> f64 {
        match self {
            Quantity::Energy | Quantity::FluxL1 => 1.0,
            // tau/2 for any tau < d/(d-1)
            Quantity::L2 => 1.0,
            // o(||d||): anything above 1, up to (2d-1)/(2d-2)
            Quantity::LinfRemainder => 1.0,
            // tau < 1/(2(d-1))
            Quantity::BcGap => 0.25,
        }
    }

    /// Fitted slope a desk-scale run must reach (strictly exceed for `LinfRemainder`).
    pub fn min_slope(&self) -> f64 {
        match self {
            Quantity::Energy | Quantity::FluxL1 => 0.85,
            Quantity::L2 => 0.55,
            Quantity::LinfRemainder => 1.0,
            Quantity::BcGap => 0.2,
        }
    }

    pub fn slope_ok(&self, slope: f64) -> bool {
        match self {
            Quantity::LinfRemainder => slope > self.min_slope(),
            _ => slope >= self.min_slope(),
        }
    }
}

/// A rate study: one family on one shared mesh over an `n` list.
#[derive(Clone)]
pub struct Study {
    pub family: Arc<dyn InclusionFamily>,
    pub n_list: Vec<usize>,
    pub h: f64,
    pub fem: Fem,
    /// Dirichlet data of `u_0`.
    pub data: Arc<DataFn>,
    pub probes: Vec<Point>,
}

/// Per-`n` state: tagged mesh, `gamma_n` and the Dirichlet perturbation `w_n = u_n - u_0`.
pub struct Stage {
    pub n: usize,
    pub mesh: Mesh,
    pub gamman: MatrixField,
    pub w: ScalarField,
    pub l1: f64,
}

impl Study {
    /// Data `x_1` and the first probe point of the family.
    pub fn new(family: Arc<dyn InclusionFamily>, n_list: &[usize], h: f64) -> Study {
        let probes = vec![family.probes()[0]];
        Study { family, n_list: n_list.to_vec(), h, fem: Fem::default(), data: Arc::new(|p: Point| p[0]), probes }
    }

    pub fn gamma0(&self) -> MatrixField {
        background(&self.family)
    }

    pub fn base_mesh(&self) -> Result<Mesh> {
        if self.n_list.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("n_list must be strictly ascending".into()));
        }
        self.family.base_mesh(&self.n_list, self.h)
    }

    pub fn background_solution(&self, base: &Mesh, data: &Arc<DataFn>) -> Result<ScalarField> {
        let g = Arc::clone(data);
        self.fem.solve(base, &self.gamma0(), &BoundaryData::dirichlet(move |p| g(p)))
    }

    pub fn stage(&self, base: &Mesh, n: usize, u0: &ScalarField) -> Result<Stage> {
        let mesh = mesh_for(self.family.as_ref(), base, n)?;
        let gamman = conductivity(&self.family, n);
        let g0 = self.gamma0();
        let w = self.fem.solve_perturbation(&mesh, &g0, &gamman, u0, Space::Dirichlet)?;
        let l1 = l1_dn(&mesh, &g0, &gamman)?;
        Ok(Stage { n, mesh, gamman, w, l1 })
    }

    /// Dirichlet Green function of `gamma_0` at `y`, checked against `K` and every inclusion
    /// of the study.
    pub fn green(&self, base: &Mesh, stages: &[Stage], y: Point) -> Result<ScalarField> {
        let k = self.family.domain().k;
        for s in stages {
            if s.mesh.distance_to_inclusions(y) < 2.0 * s.mesh.h() {
                return Err(Error::PointInsideK(y[0], y[1]));
            }
        }
        self.fem.greens_function(base, &self.gamma0(), y, GreenKind::Dirichlet, Some(&k))
    }

    pub fn record(&self, stage: &Stage, space: Space) -> Result<PolarizationRecord> {
        let g0 = self.gamma0();
        let w = correctors(&self.fem, &stage.mesh, &g0, &stage.gamman, space)?;
        tensor_densities(&stage.mesh, &g0, &stage.gamman, &w)
    }

    fn stages(&self, base: &Mesh, u0: &ScalarField) -> Result<Vec<Stage>> {
        self.n_list.par_iter().map(|&n| self.stage(base, n, u0)).collect()
    }

    /// Fits `quantity` against `||d_n||_{L1}` over the study's `n` list.
    pub fn rate(&self, quantity: Quantity) -> Result<RateTable> {
        if self.n_list.len() < 3 {
            return Err(Error::TooFewSamples { needed: 3, got: self.n_list.len() });
        }
        let base = self.base_mesh()?;
        let u0 = self.background_solution(&base, &self.data)?;
        let stages = self.stages(&base, &u0)?;
        let greens: Vec<ScalarField> = if quantity == Quantity::LinfRemainder {
            self.probes.par_iter().map(|y| self.green(&base, &stages, *y)).collect::<Result<_>>()?
        } else {
            Vec::new()
        };
        let g0 = self.gamma0();
        let rows: Vec<(usize, f64, f64)> = stages
            .par_iter()
            .map(|s| {
                let v = match quantity {
                    Quantity::Energy => energy_cells(&s.mesh, &cell_tensors(&s.mesh, &s.gamman)?, &s.w),
                    Quantity::L2 => s.w.l2_norm(&s.mesh),
                    Quantity::FluxL1 => flux_l1(&s.mesh, &g0, &s.gamman, &s.w)?,
                    Quantity::LinfRemainder => {
                        let rec = self.record(s, Space::Dirichlet)?;
                        let mut worst = 0.0_f64;
                        for (y, g) in self.probes.iter().zip(&greens) {
                            let c = representation_check(&s.mesh, &g0, &s.gamman, &u0, &s.w, &rec, g, *y)?;
                            worst = worst.max(c.remainder.abs());
                        }
                        worst
                    }
                    Quantity::BcGap => {
                        let (wx, wy) = rayon::join(
                            || correctors(&self.fem, &s.mesh, &g0, &s.gamman, Space::Dirichlet),
                            || correctors(&self.fem, &s.mesh, &g0, &s.gamman, Space::MeanZero),
                        );
                        bc_independence(&s.mesh, &g0, &s.gamman, &wx?, &wy?)?
                    }
                };
                Ok((s.n, s.l1, v))
            })
            .collect::<Result<_>>()?;
        RateTable::new(quantity.name(), rows, quantity.expected_exponent())
    }

    /// Representation checks at every `n`, datum and probe point.
    pub fn representation_sweep(&self, data: &[(String, Arc<DataFn>)]) -> Result<Vec<SweepRow>> {
        let base = self.base_mesh()?;
        let g0 = self.gamma0();
        // stages of the first datum carry the tags; perturbations are recomputed per datum
        let u0s: Vec<ScalarField> = data.par_iter().map(|(_, g)| self.background_solution(&base, g)).collect::<Result<_>>()?;
        let stages = self.stages(&base, &u0s[0])?;
        let greens: Vec<ScalarField> =
            self.probes.par_iter().map(|y| self.green(&base, &stages, *y)).collect::<Result<_>>()?;
        let per_n: Vec<Vec<SweepRow>> = stages
            .par_iter()
            .map(|s| {
                let rec = self.record(s, Space::Dirichlet)?;
                let mut rows = Vec::new();
                for ((name, _), u0) in data.iter().zip(&u0s) {
                    let w = self.fem.solve_perturbation(&s.mesh, &g0, &s.gamman, u0, Space::Dirichlet)?;
                    for (y, g) in self.probes.iter().zip(&greens) {
                        let check = representation_check(&s.mesh, &g0, &s.gamman, u0, &w, &rec, g, *y)?;
                        rows.push(SweepRow { n: s.n, l1: s.l1, data: name.clone(), check });
                    }
                }
                Ok(rows)
            })
            .collect::<Result<_>>()?;
        Ok(per_n.into_iter().flatten().collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub l1: f64,
    pub data: String,
    pub check: RepresentationCheck,
}

pub fn rate_harness(study: &Study, quantity: Quantity) -> Result<RateTable> {
    study.rate(quantity)
}

/// `||(gamma_n - gamma_0) grad w||_{L1}`.
pub fn flux_l1(mesh: &Mesh, gamma0: &MatrixField, gamman: &MatrixField, w: &ScalarField) -> Result<f64> {
    w.check_mesh(mesh)?;
    let c0 = cell_tensors(mesh, gamma0)?;
    let cn = cell_tensors(mesh, gamman)?;
    Ok(mesh
        .inclusion_triangles()
        .map(|t| {
            let q = (cn[t] - c0[t]).mul_vec(&w.gradient(mesh, t));
            mesh.geom(t).area * q[0].hypot(q[1])
        })
        .sum())
}

/// Energy and flux of a perturbation against `||d_n||_1 |grad u_0|_inf^2` and
/// `||d_n||_1 |grad u_0|_inf`, the sup taken over triangles with zone point in `K`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyBounds {
    pub energy: f64,
    pub flux_l1: f64,
    pub l1: f64,
    pub grad_sup: f64,
    pub energy_ratio: f64,
    pub flux_ratio: f64,
}

pub fn energy_bounds(
    mesh: &Mesh,
    gamma0: &MatrixField,
    gamman: &MatrixField,
    u0: &ScalarField,
    w: &ScalarField,
    k: &Shape,
) -> Result<EnergyBounds> {
    u0.check_mesh(mesh)?;
    let cn = cell_tensors(mesh, gamman)?;
    let energy = energy_cells(mesh, &cn, w);
    let flux = flux_l1(mesh, gamma0, gamman, w)?;
    let l1 = l1_dn(mesh, gamma0, gamman)?;
    let grad_sup = (0..mesh.n_triangles())
        .filter(|&t| k.contains(mesh.zone_point(t)))
        .map(|t| {
            let g = u0.gradient(mesh, t);
            g[0].hypot(g[1])
        })
        .fold(0.0, f64::max);
    let bound = l1 * grad_sup;
    Ok(EnergyBounds {
        energy,
        flux_l1: flux,
        l1,
        grad_sup,
        energy_ratio: energy / (bound * grad_sup),
        flux_ratio: flux / bound,
    })
}

/// Largest number of increases tolerated by [`decreasing_with_noise`].
pub const NOISE_INVERSIONS: usize = 1;

/// Strictly decreasing apart from at most one increase.
pub fn decreasing_with_noise(v: &[f64]) -> bool {
    v.windows(2).filter(|w| w[1] >= w[0]).count() <= NOISE_INVERSIONS
}
