//! Named run checks. Each check computes its numbers, a verdict and the CSV files it owns.

use std::fmt::Write as _;
use std::sync::Arc;

use contrast_asym::asymptotics::{
    boundary_data_registry, decreasing_with_noise, energy_bounds, fit_rate, DataFn, Quantity, RateTable, Stage, Study,
};
use contrast_asym::fem::{cell_tensors, Fem, ScalarField, Space};
use contrast_asym::geometry::{assumption_report, InclusionFamily};
use contrast_asym::mesh::write_field;
use contrast_asym::oracles::{elliptic_limit_tensors, LimitCase};
use contrast_asym::polarization::{cv_convert, w_bounds_check, ConversionSign, PolarizationRecord};
use contrast_asym::registry::Registry;
use contrast_asym::stream::{boundary_flux, dual_equation_residual, dual_gap, roles_swapped, stream_function};
use contrast_asym::{Error, MatrixField, Result, SymMat};
use rayon::prelude::*;

use crate::config::RunConfig;

/// What a check produced when it ran to completion.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    pub detail: String,
    /// Named scalar results in a fixed order.
    pub numbers: Vec<(String, f64)>,
    /// `(file name, body)` pairs written to the output directory.
    pub files: Vec<(String, String)>,
}

pub struct CheckContext<'a> {
    pub config: &'a RunConfig,
    pub family: Arc<dyn InclusionFamily>,
    pub fem: Fem,
}

impl CheckContext<'_> {
    fn data(&self, name: &str) -> Arc<DataFn> {
        boundary_data_registry().get(name).expect("validated by the config parser")
    }

    pub fn study(&self) -> Study {
        let mut s = Study::new(Arc::clone(&self.family), &self.config.n_list, self.config.h);
        s.fem = self.fem.clone();
        s.data = self.data(&self.config.data[0]);
        s.probes = self.config.probes.clone().unwrap_or_else(|| self.family.probes());
        s
    }

    fn stages(&self, study: &Study) -> Result<(contrast_asym::mesh::Mesh, ScalarField, Vec<Stage>)> {
        let base = study.base_mesh()?;
        let u0 = study.background_solution(&base, &study.data)?;
        let stages = study.n_list.par_iter().map(|&n| study.stage(&base, n, &u0)).collect::<Result<Vec<_>>>()?;
        Ok((base, u0, stages))
    }

    fn tol(&self, key: &str, default: f64) -> f64 {
        self.config.tolerance(key, default)
    }
}

pub trait Check: Send + Sync {
    /// Short statement of the bound or identity the check tests.
    fn anchor(&self) -> &'static str;

    fn run(&self, ctx: &CheckContext) -> Result<Outcome>;
}

/// Checks selectable from the `checks` list of a run configuration.
pub fn check_registry() -> Registry<dyn Check> {
    let mut r: Registry<dyn Check> = Registry::new("check");
    r.register("assumptions", Arc::new(Assumptions));
    r.register("energy", Arc::new(EnergyCheck));
    r.register("l2", Arc::new(L2Check));
    r.register("representation", Arc::new(RepresentationCheck));
    r.register("polarization", Arc::new(PolarizationCheck));
    r.register("bounds", Arc::new(ReussBounds));
    r.register("stream", Arc::new(StreamCheck));
    r.register("bc_independence", Arc::new(BcIndependence));
    r
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.4e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn rate_numbers(prefix: &str, t: &RateTable) -> Vec<(String, f64)> {
    vec![(format!("{prefix}_slope"), t.fit.slope), (format!("{prefix}_residual"), t.fit.residual)]
}

struct Assumptions;

impl Check for Assumptions {
    fn anchor(&self) -> &'static str {
        "K inside Omega; ||d_n||_L1 -> 0; gamma_n >= gamma_0 on A_n, <= on B_n; one of 4a/4b/4c"
    }

    fn run(&self, ctx: &CheckContext) -> Result<Outcome> {
        let c = ctx.config;
        let r = assumption_report(ctx.family.as_ref(), &c.n_list, c.p, c.tau, true)?;
        let mut csv = String::from(
            "n,inside_k,boundary_distance,l1_dn,l1_a,l1_b,lp_a,lp_b,separation,ordered,separated\n",
        );
        for row in &r.rows {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{},{},{}",
                row.n,
                row.inside_k,
                row.boundary_distance,
                row.l1,
                row.l1_a,
                row.l1_b,
                row.lp_a,
                row.lp_b,
                row.separation,
                row.ordered,
                row.separated
            );
        }
        let flag = |b: bool| if b { 1.0 } else { 0.0 };
        Ok(Outcome {
            pass: r.all_pass(),
            detail: format!(
                "containment {}, vanishing {}, ordering {}, integrability alternatives {:?}",
                r.containment,
                r.vanishing,
                r.ordering,
                r.alternatives()
            ),
            numbers: vec![
                ("containment".into(), flag(r.containment)),
                ("vanishing".into(), flag(r.vanishing)),
                ("ordering".into(), flag(r.ordering)),
                ("integrability".into(), flag(r.integrability())),
                ("l1_slope_vs_n".into(), r.l1_slope),
                ("lp_a_slope_vs_n".into(), r.lp_a_slope),
                ("lp_b_slope_vs_n".into(), r.lp_b_slope),
                ("separation_slope_vs_n".into(), r.sep_slope),
                ("l1_a_slope_vs_n".into(), r.l1_a_slope),
            ],
            files: vec![("assumptions.csv".into(), csv)],
        })
    }
}

struct EnergyCheck;

impl Check for EnergyCheck {
    fn anchor(&self) -> &'static str {
        "E(w_n) <= ||d_n||_L1 sup_K |grad u_0|^2 and ||(gamma_n - gamma_0) grad w_n||_L1 <= ||d_n||_L1 sup_K |grad u_0|"
    }

    fn run(&self, ctx: &CheckContext) -> Result<Outcome> {
        let study = ctx.study();
        let (_, u0, stages) = ctx.stages(&study)?;
        let k = ctx.family.domain().k;
        let g0 = study.gamma0();
        let bounds = stages
            .par_iter()
            .map(|s| energy_bounds(&s.mesh, &g0, &s.gamman, &u0, &s.w, &k))
            .collect::<Result<Vec<_>>>()?;
        let max_ratio = ctx.tol("energy_ratio", 1.05);
        let mut csv = String::from("n,l1_dn,energy,flux_l1,grad_sup,energy_ratio,flux_ratio\n");
        let mut numbers = Vec::new();
        let mut pass = true;
        for (s, b) in stages.iter().zip(&bounds) {
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                s.n, b.l1, b.energy, b.flux_l1, b.grad_sup, b.energy_ratio, b.flux_ratio
            );
            numbers.push((format!("energy_ratio_n{}", s.n), b.energy_ratio));
            numbers.push((format!("flux_ratio_n{}", s.n), b.flux_ratio));
            pass &= b.energy_ratio <= max_ratio && b.flux_ratio <= max_ratio;
        }
        let mut files = vec![("energy_bounds.csv".to_string(), csv)];
        let worst = bounds.iter().map(|b| b.energy_ratio.max(b.flux_ratio)).fold(0.0, f64::max);
        let mut detail = format!("largest bound ratio {worst:.4} (limit {max_ratio})");
        if stages.len() >= 3 {
            let rows = stages.iter().zip(&bounds).map(|(s, b)| (s.n, b.l1, b.energy)).collect();
            let t = RateTable::new(Quantity::Energy.name(), rows, Quantity::Energy.expected_exponent())?;
            let _ = write!(detail, "; energy slope {:.3} vs ||d_n||_L1 (reported, not gated)", t.fit.slope);
            numbers.extend(rate_numbers("energy", &t));
            files.push(("energy_rate.csv".into(), t.to_csv()));
        }
        Ok(Outcome { pass, detail, numbers, files })
    }
}

struct L2Check;

impl Check for L2Check {
    fn anchor(&self) -> &'static str {
        "||w_n||_L2 <= C ||d_n||_L1^(tau/2), fitted exponent above 1/2"
    }

    fn run(&self, ctx: &CheckContext) -> Result<Outcome> {
        let t = ctx.study().rate(Quantity::L2)?;
        let min = ctx.tol("l2_slope", Quantity::L2.min_slope());
        Ok(Outcome {
            pass: t.fit.slope >= min,
            detail: format!("fitted exponent {:.3} (minimum {min})", t.fit.slope),
            numbers: rate_numbers("l2", &t),
            files: vec![("l2_rate.csv".into(), t.to_csv())],
        })
    }
}

struct RepresentationCheck;

/// Scaled remainders below this are treated as vanishing identically.
const REMAINDER_FLOOR: f64 = 1e-12;

impl Check for RepresentationCheck {
    fn anchor(&self) -> &'static str {
        "(u_n - u_0)(y) = int (gamma_n - gamma_0)(grad w_n + grad u_0) . grad G(., y); remainder o(||d_n||_L1)"
    }

    fn run(&self, ctx: &CheckContext) -> Result<Outcome> {
        let study = ctx.study();
        let data: Vec<(String, Arc<DataFn>)> = ctx.config.data.iter().map(|n| (n.clone(), ctx.data(n))).collect();
        let rows = study.representation_sweep(&data)?;
        let mut csv = String::from("n,l1_dn,data,y1,y2,exact,reciprocity,leading,remainder,scaled_remainder\n");
        for r in &rows {
            let c = &r.check;
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{},{},{}",
                r.n, r.l1, r.data, c.y[0], c.y[1], c.exact, c.reciprocity, c.leading, c.remainder, c.scaled_remainder
            );
        }
        let defect = rows.iter().map(|r| r.check.identity_defect()).fold(0.0, f64::max);
        let per_n: Vec<(usize, f64, f64, f64)> = study
            .n_list
            .iter()
            .map(|&n| {
                let sel: Vec<_> = rows.iter().filter(|r| r.n == n).collect();
                let scaled = sel.iter().map(|r| r.check.scaled_remainder.abs()).fold(0.0, f64::max);
                let raw = sel.iter().map(|r| r.check.remainder.abs()).fold(0.0, f64::max);
                (n, sel[0].l1, scaled, raw)
            })
            .collect();
        let scaled: Vec<f64> = per_n.iter().map(|p| p.2).collect();
        let tol = ctx.tol("reciprocity", 1e-8);
        let mut numbers = vec![("identity_defect".to_string(), defect)];
        let mut files = vec![("representation.csv".to_string(), csv)];
        let vanishing = scaled.iter().all(|s| *s <= REMAINDER_FLOOR);
        let mut pass = defect < tol;
        let mut detail = format!("{} checks, identity defect {defect:.2e}; max scaled remainder {}", rows.len(), fmt_list(&scaled));
        if vanishing {
            detail.push_str("; remainder vanishes to round-off");
        } else if per_n.len() >= 3 {
            let decay = fit_rate(&per_n.iter().map(|p| (p.1, p.2)).collect::<Vec<_>>())?.slope;
            let min = ctx.tol("remainder_decay", 0.2);
            let trend = decreasing_with_noise(&scaled);
            pass &= trend && decay >= min;
            let _ = write!(detail, "; decreasing {trend}, decay exponent {decay:.3} (minimum {min})");
            numbers.push(("remainder_decay".into(), decay));
            let t = RateTable::new(
                Quantity::LinfRemainder.name(),
                per_n.iter().map(|p| (p.0, p.1, p.3)).collect(),
                Quantity::LinfRemainder.expected_exponent(),
            )?;
            numbers.extend(rate_numbers("linf_remainder", &t));
            files.push(("remainder_rate.csv".into(), t.to_csv()));
        } else if per_n.len() == 2 {
            let trend = scaled[1] < scaled[0];
            pass &= trend;
            let _ = write!(detail, "; decreasing {trend}");
        }
        Ok(Outcome { pass, detail, numbers, files })
    }
}

fn records(ctx: &CheckContext) -> Result<Vec<(usize, PolarizationRecord, bool)>> {
    let study = ctx.study();
    let (_, _, stages) = ctx.stages(&study)?;
    stages
        .par_iter()
        .map(|s| {
            let rec = study.record(s, Space::Dirichlet)?;
            Ok((s.n, rec, isotropic(s)?))
        })
        .collect()
}

fn is_scalar(m: &SymMat) -> bool {
    let scale = m.frobenius();
    m.get(0, 1).abs() <= 1e-12 * scale && (m.get(0, 0) - m.get(1, 1)).abs() <= 1e-12 * scale
}

/// Background and every inclusion cell carry multiples of the identity.
fn isotropic(s: &Stage) -> Result<bool> {
    let cells = cell_tensors(&s.mesh, &s.gamman)?;
    Ok(cells.iter().all(is_scalar))
}

fn mat_numbers(prefix: &str, m: [[f64; 2]; 2]) -> Vec<(String, f64)> {
    let mut v = Vec::new();
    for (i, row) in m.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            v.push((format!("{prefix}{}{}", i + 1, j + 1), *x));
        }
    }
    v
}

/// Closed-form `M` the largest-`n` record is compared with, if the family has one.
fn reference_m(ctx: &CheckContext, n: usize) -> Result<Option<(String, SymMat)>> {
    let spec = &ctx.config.family;
    match spec.kind.as_str() {
        "confocal_ellipse" => {
            let q = spec.f64_or("q", 0.5)?;
            let case = if q > 0.0 && q < 1.0 {
                LimitCase::Conductive
            } else if q < 0.0 {
                LimitCase::Insulating
            } else {
                return Ok(None);
            };
            Ok(Some((format!("{case:?} limit"), elliptic_limit_tensors(case).2)))
        }
        "disk" => {
            let lambda = spec.f64_or("lambda", 1.0)? * (n as f64).powf(spec.f64_or("lambda_exponent", 1.0)?);
            let factor = SymMat::scalar(2, 2.0 / (1.0 + lambda));
            Ok(Some((format!("two-phase disk value at lambda = {lambda}"), cv_convert(&factor, lambda, 1.0, ConversionSign::Plus))))
        }
        _ => Ok(None),
    }
}

struct PolarizationCheck;

impl Check for PolarizationCheck {
    fn anchor(&self) -> &'static str {
        "M = D - W as densities against mu = lim |d_n| / ||d_n||_L1"
    }

    fn run(&self, ctx: &CheckContext) -> Result<Outcome> {
        let recs = records(ctx)?;
        let mut numbers = Vec::new();
        let mut files = Vec::new();
        for (n, rec, _) in &recs {
            numbers.extend(mat_numbers(&format!("n{n}_M"), rec.m_mean()));
            files.push((format!("polarization_n{n}.csv"), rec.to_csv()));
        }
        let (n_max, last, _) = recs.last().ok_or(Error::ZeroMeasure)?;
        let m = last.m_mean();
        let mass = last.total_mass();
        let mut pass = (mass - 1.0).abs() < 1e-9 && m.iter().flatten().all(|x| x.is_finite());
        let mut detail = format!("M at n = {n_max}: [[{:.4}, {:.4}], [{:.4}, {:.4}]]", m[0][0], m[0][1], m[1][0], m[1][1]);
        match reference_m(ctx, *n_max)? {
            Some((label, r)) => {
                let tol = ctx.tol("polarization", 0.1);
                let dist = (0..2)
                    .flat_map(|i| (0..2).map(move |j| (i, j)))
                    .map(|(i, j)| (m[i][j] - r.get(i, j)).abs())
                    .fold(0.0, f64::max);
                pass &= dist <= tol;
                numbers.push(("reference_distance".into(), dist));
                let _ = write!(detail, "; {label} distance {dist:.4} (limit {tol})");
            }
            None => detail.push_str("; no closed-form reference for this family"),
        }
        Ok(Outcome { pass, detail, numbers, files })
    }
}

struct ReussBounds;

impl Check for ReussBounds {
    fn anchor(&self) -> &'static str {
        "0 <= W <= I/sqrt(d) for isotropic phases, 0 <= W <= I otherwise"
    }

    fn run(&self, ctx: &CheckContext) -> Result<Outcome> {
        let recs = records(ctx)?;
        let mut pass = true;
        let mut numbers = Vec::new();
        let mut csv = String::from("n,isotropic,w_min,w_max,bound,pass\n");
        for (n, rec, iso) in &recs {
            let b = w_bounds_check(rec, *iso);
            pass &= b.pass;
            numbers.push((format!("n{n}_w_min"), b.min));
            numbers.push((format!("n{n}_w_max"), b.max));
            let _ = writeln!(csv, "{n},{iso},{},{},{},{}", b.min, b.max, b.bound, b.pass);
        }
        let lo = numbers.iter().step_by(2).map(|x| x.1).fold(f64::INFINITY, f64::min);
        let hi = numbers.iter().skip(1).step_by(2).map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
        Ok(Outcome {
            pass,
            detail: format!("W eigenvalues within [{lo:.4}, {hi:.4}]"),
            numbers,
            files: vec![("w_bounds.csv".into(), csv)],
        })
    }
}

struct StreamCheck;

impl Check for StreamCheck {
    fn anchor(&self) -> &'static str {
        "J grad psi = gamma grad u, div(sigma grad psi) = 0 with sigma = J^T gamma^-1 J; scaled dual gap -> 0"
    }

    fn run(&self, ctx: &CheckContext) -> Result<Outcome> {
        if ctx.family.dim() != 2 {
            return Err(Error::UnsupportedDimension(ctx.family.dim()));
        }
        let study = ctx.study();
        let (base, u0, stages) = ctx.stages(&study)?;
        let g0: MatrixField = study.gamma0();
        let psi0 = stream_function(&ctx.fem, &base, &g0, &u0)?.psi;
        let rows = stages
            .par_iter()
            .map(|s| {
                let un = u0.combine(1.0, &s.w, 1.0)?;
                let pair = stream_function(&ctx.fem, &s.mesh, &s.gamman, &un)?;
                let weak = dual_equation_residual(&ctx.fem, &s.mesh, &s.gamman, &pair.psi)?;
                let gap = dual_gap(&s.mesh, &g0, &s.gamman, &psi0, &pair.psi)?;
                let flux = (0..s.mesh.n_components())
                    .map(|c| boundary_flux(&s.mesh, &s.gamman, &un, c).map(f64::abs))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .fold(0.0, f64::max);
                let swapped = roles_swapped(&s.mesh, &g0, &s.gamman)?;
                Ok((s.n, s.l1, pair, weak, gap, flux, swapped))
            })
            .collect::<Result<Vec<_>>>()?;
        let max_res = ctx.tol("stream_residual", 0.03);
        let max_weak = ctx.tol("dual_residual", 0.05);
        let mut csv = String::from("n,l1_dn,residual,weak_residual,dual_gap,boundary_flux,roles_swapped\n");
        let mut numbers = Vec::new();
        let mut files = Vec::new();
        let mut pass = true;
        for (n, l1, pair, weak, gap, flux, swapped) in &rows {
            let _ = writeln!(csv, "{n},{l1},{},{weak},{gap},{flux},{swapped}", pair.residual);
            numbers.push((format!("n{n}_residual"), pair.residual));
            numbers.push((format!("n{n}_dual_gap"), *gap));
            pass &= pair.residual < max_res && *weak < max_weak && *swapped;
            files.push((format!("psi_n{n}.txt"), write_field(&pair.psi)));
        }
        files.insert(0, ("stream.csv".into(), csv));
        let gaps: Vec<f64> = rows.iter().map(|r| r.4).collect();
        let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
        pass &= decreasing;
        let worst = rows.iter().map(|r| r.2.residual).fold(0.0, f64::max);
        Ok(Outcome {
            pass,
            detail: format!("largest duality residual {worst:.4} (limit {max_res}); dual gap {} decreasing {decreasing}", fmt_list(&gaps)),
            numbers,
            files,
        })
    }
}

struct BcIndependence;

impl Check for BcIndependence {
    fn anchor(&self) -> &'static str {
        "||(gamma_n - gamma_0) grad(w_D - w_N)||_L1 / ||d_n||_L1 -> 0"
    }

    fn run(&self, ctx: &CheckContext) -> Result<Outcome> {
        let t = ctx.study().rate(Quantity::BcGap)?;
        let v: Vec<f64> = t.rows.iter().map(|r| r.2).collect();
        let min = ctx.tol("bc_slope", Quantity::BcGap.min_slope());
        let trend = decreasing_with_noise(&v);
        Ok(Outcome {
            pass: trend && t.fit.slope >= min,
            detail: format!("discrepancy {} decreasing {trend}, fitted exponent {:.3} (minimum {min})", fmt_list(&v), t.fit.slope),
            numbers: rate_numbers("bc_gap", &t),
            files: vec![("bc_rate.csv".into(), t.to_csv())],
        })
    }
}
