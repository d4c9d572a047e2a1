//! Closed-form transmission solutions: concentric layered media (any dimension, any harmonic
//! degree in 2D) and a confocal elliptic inclusion.

mod elliptic;
mod radial;

pub use elliptic::{elliptic_limit_tensors, elliptic_solution, EllipticSolution, LimitCase};
pub use radial::{
    radial_csv, radial_perturbation, radial_solution, HarmonicBranch, LayeredRadial, RadialSolution,
};

use crate::error::{Error, Result};

/// Gaussian elimination with partial pivoting.
pub(crate) fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        if a[piv][col].abs() <= 1e-300_f64.max(1e-15 * scale * f64::EPSILON) {
            return Err(Error::SingularSystem(format!("zero pivot in column {col}")));
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    Ok(x)
}
