use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Least-squares line through `(log x, log y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute deviation of a sample from the line, in log units.
    pub residual: f64,
}

pub fn fit_rate(samples: &[(f64, f64)]) -> Result<RateFit> {
    if samples.len() < 3 {
        return Err(Error::TooFewSamples { needed: 3, got: samples.len() });
    }
    if let Some((x, y)) = samples.iter().find(|(x, y)| !(*x > 0.0) || !(*y > 0.0) || !x.is_finite() || !y.is_finite()) {
        return Err(Error::NonPositiveSample(*x, *y));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let m = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / m, pts.iter().map(|p| p.1).sum::<f64>() / m);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("rate fit needs at least two distinct abscissae".into()));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = pts.iter().map(|p| (p.1 - intercept - slope * p.0).abs()).fold(0.0, f64::max);
    Ok(RateFit { slope, intercept, residual })
}

/// Samples `(n, ||d_n||_{L1}, value)` of one quantity and the fit of `log value` against
/// `log ||d_n||_{L1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RateTable {
    pub quantity: String,
    pub rows: Vec<(usize, f64, f64)>,
    pub fit: RateFit,
    /// Exponent the bound predicts, printed beside the fitted one.
    pub expected_exponent: f64,
}

impl RateTable {
    pub fn new(quantity: &str, rows: Vec<(usize, f64, f64)>, expected_exponent: f64) -> Result<RateTable> {
        let fit = fit_rate(&rows.iter().map(|r| (r.1, r.2)).collect::<Vec<_>>())?;
        Ok(RateTable { quantity: quantity.to_string(), rows, fit, expected_exponent })
    }

    /// Slope of `log value` against `log n`.
    pub fn slope_vs_n(&self) -> Result<f64> {
        Ok(fit_rate(&self.rows.iter().map(|r| (r.0 as f64, r.2)).collect::<Vec<_>>())?.slope)
    }

    /// `n,l1_dn,quantity,value` rows followed by the fit summary line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,l1_dn,quantity,value\n");
        for (n, l1, v) in &self.rows {
            let _ = writeln!(s, "{n},{l1},{},{v}", self.quantity);
        }
        let _ = writeln!(
            s,
            "# slope={} residual={} paper_exponent={}",
            self.fit.slope, self.fit.residual, self.expected_exponent
        );
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let s: Vec<(f64, f64)> = (1..6).map(|k| (k as f64, 3.0 * (k as f64).powi(2))).collect();
        let f = fit_rate(&s).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(f.residual < 1e-12);
    }

    #[test]
    fn constant_has_zero_slope() {
        let f = fit_rate(&[(1.0, 2.0), (2.0, 2.0), (5.0, 2.0)]).unwrap();
        assert!(f.slope.abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_samples() {
        assert!(matches!(fit_rate(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]), Err(Error::NonPositiveSample(..))));
        assert!(matches!(fit_rate(&[(1.0, 1.0), (2.0, 1.0)]), Err(Error::TooFewSamples { .. })));
    }

    #[test]
    fn csv_layout() {
        let t = RateTable::new("energy", vec![(8, 0.5, 0.1), (16, 0.25, 0.05), (32, 0.125, 0.025)], 1.0).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("n,l1_dn,quantity,value\n8,0.5,energy,0.1\n"));
        let last = csv.trim_end().lines().last().unwrap();
        let slope: f64 = last.strip_prefix("# slope=").unwrap().split(' ').next().unwrap().parse().unwrap();
        assert!((slope - 1.0).abs() < 1e-12, "{last}");
        assert!(last.contains(" residual=") && last.ends_with("paper_exponent=1"));
    }
}
