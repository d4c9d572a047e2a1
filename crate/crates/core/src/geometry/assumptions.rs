use super::InclusionFamily;
use crate::asymptotics::fit_rate;
use crate::error::{Error, Result};

/// Largest fitted log-log slope versus `n` accepted as "bounded" over a finite `n` list.
pub const BOUNDED_SLOPE: f64 = 0.05;

/// Per-`n` hypothesis numbers and verdicts.
#[derive(Clone, Debug, PartialEq)]
pub struct AssumptionRow {
    pub n: usize,
    pub inside_k: bool,
    pub boundary_distance: f64,
    pub l1: f64,
    pub l1_a: f64,
    pub l1_b: f64,
    pub lp_a: f64,
    pub lp_b: f64,
    pub separation: f64,
    pub overlap: Option<String>,
    pub ordered: bool,
    /// `separation > ||d_n||_{L1(A_n)}^tau`.
    pub separated: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssumptionReport {
    pub family: String,
    pub p: f64,
    pub tau: f64,
    pub rows: Vec<AssumptionRow>,
    /// `K` inside `Omega` at positive distance and every inclusion inside `K`.
    pub containment: bool,
    pub k_distance: f64,
    /// `||d_n||_{L1} <= 1`, strictly decreasing, last below a tenth of the first, negative slope.
    pub vanishing: bool,
    pub l1_slope: f64,
    /// Disjoint phases with the required quadratic-form ordering.
    pub ordering: bool,
    pub lp_a_slope: f64,
    pub lp_b_slope: f64,
    pub bounded_a: bool,
    pub bounded_b: bool,
    pub sep_slope: f64,
    pub l1_a_slope: f64,
    pub integrable_a: bool,
    pub integrable_b: bool,
    pub separated: bool,
}

impl AssumptionReport {
    /// At least one of the three integrability alternatives holds.
    pub fn integrability(&self) -> bool {
        self.integrable_a || self.integrable_b || self.separated
    }

    pub fn all_pass(&self) -> bool {
        self.containment && self.vanishing && self.ordering && self.integrability()
    }

    /// Which integrability alternatives hold, e.g. `"4c"`.
    pub fn alternatives(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.integrable_a {
            v.push("4a");
        }
        if self.integrable_b {
            v.push("4b");
        }
        if self.separated {
            v.push("4c");
        }
        v
    }
}

fn slope_vs_n(n: &[usize], v: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = n.iter().zip(v).map(|(n, v)| (*n as f64, *v)).collect();
    if pts.len() < 3 || pts.iter().any(|(_, y)| !(*y > 0.0) || !y.is_finite()) {
        return f64::NAN;
    }
    fit_rate(&pts).map(|f| f.slope).unwrap_or(f64::NAN)
}

/// Evaluates the domain, vanishing, ordering and integrability hypotheses at every `n`.
///
/// With `audit` false an overlap between the two phases is an error; with `audit` true it is
/// recorded in the report and fails the ordering hypothesis.
pub fn assumption_report(
    family: &dyn InclusionFamily,
    n_list: &[usize],
    p: f64,
    tau: f64,
    audit: bool,
) -> Result<AssumptionReport> {
    if n_list.is_empty() || !n_list.windows(2).all(|w| w[1] > w[0]) {
        return Err(Error::InvalidArgument("n_list must be nonempty and strictly ascending".into()));
    }
    if !(p > 1.0) || !(tau > 0.0) {
        return Err(Error::InvalidArgument("need p > 1 and tau > 0".into()));
    }
    let d = family.dim() as f64;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let overlap = family.overlap(n);
        if let (Some(msg), false) = (&overlap, audit) {
            return Err(Error::Overlap(msg.clone()));
        }
        let (l1_a, l1_b) = family.l1_split(n);
        let (lp_a, lp_b) = family.lp_split(n, p);
        let separation = family.separation(n);
        rows.push(AssumptionRow {
            n,
            inside_k: family.inside_k(n),
            boundary_distance: family.boundary_distance(n),
            l1: l1_a + l1_b,
            l1_a,
            l1_b,
            lp_a,
            lp_b,
            separation,
            ordered: family.ordering_holds(n),
            separated: separation > l1_a.powf(tau),
            overlap,
        });
    }
    let k_distance = family.domain().k_distance();
    let containment = k_distance > 0.0 && rows.iter().all(|r| r.inside_k && r.boundary_distance > 0.0);

    let l1: Vec<f64> = rows.iter().map(|r| r.l1).collect();
    let l1_slope = slope_vs_n(n_list, &l1);
    let decreasing = l1.windows(2).all(|w| w[1] < w[0]);
    let vanishing = rows.iter().all(|r| r.l1 <= 1.0)
        && decreasing
        && l1.last().unwrap() < &(0.1 * l1[0])
        && (l1.len() < 3 || l1_slope < 0.0);

    let ordering = rows.iter().all(|r| r.ordered && r.overlap.is_none());

    let lp_a: Vec<f64> = rows.iter().map(|r| r.lp_a).collect();
    let lp_b: Vec<f64> = rows.iter().map(|r| r.lp_b).collect();
    let lp_a_slope = slope_vs_n(n_list, &lp_a);
    let lp_b_slope = slope_vs_n(n_list, &lp_b);
    let empty_a = lp_a.iter().all(|v| *v == 0.0);
    let empty_b = lp_b.iter().all(|v| *v == 0.0);
    let bounded_a = empty_a || lp_a_slope <= BOUNDED_SLOPE;
    let bounded_b = empty_b || lp_b_slope <= BOUNDED_SLOPE;

    let sep: Vec<f64> = rows.iter().map(|r| r.separation).collect();
    let l1a: Vec<f64> = rows.iter().map(|r| r.l1_a).collect();
    let sep_slope = slope_vs_n(n_list, &sep);
    let l1_a_slope = slope_vs_n(n_list, &l1a);

    Ok(AssumptionReport {
        family: family.name().to_string(),
        p,
        tau,
        containment,
        k_distance,
        vanishing,
        l1_slope,
        ordering,
        lp_a_slope,
        lp_b_slope,
        bounded_a,
        bounded_b,
        sep_slope,
        l1_a_slope,
        integrable_a: p > d && bounded_a,
        integrable_b: d == 2.0 && p > 2.0 && bounded_b,
        separated: p > d / 2.0 && tau < 1.0 / (d - 1.0) && rows.iter().all(|r| r.separated),
        rows,
    })
}
