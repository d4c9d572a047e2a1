//! Iterative solvers for the symmetric positive-definite stiffness systems.

use std::fmt::Debug;
use std::sync::Arc;

use super::sparse::CsrMatrix;
use crate::error::{Error, Result};
use crate::registry::Registry;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

pub trait LinearSolver: Send + Sync + Debug {
    fn name(&self) -> &'static str;
    /// Solves `a x = b`, using the incoming `x` as the initial guess.
    fn solve(&self, a: &CsrMatrix, b: &[f64], x: &mut [f64]) -> Result<SolveStats>;
}

/// Conjugate gradients with a diagonal preconditioner.
#[derive(Clone, Copy, Debug)]
pub struct PcgJacobi {
    pub rel_tol: f64,
    /// Iteration cap is `cap_factor * sqrt(unknowns)`.
    pub cap_factor: f64,
}

impl Default for PcgJacobi {
    fn default() -> Self {
        PcgJacobi { rel_tol: 1e-12, cap_factor: 50.0 }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl LinearSolver for PcgJacobi {
    fn name(&self) -> &'static str {
        "pcg-jacobi"
    }

    fn solve(&self, a: &CsrMatrix, b: &[f64], x: &mut [f64]) -> Result<SolveStats> {
        let n = a.n();
        let bnorm = dot(b, b).sqrt();
        if bnorm == 0.0 {
            x.iter_mut().for_each(|v| *v = 0.0);
            return Ok(SolveStats { iterations: 0, relative_residual: 0.0 });
        }
        let inv_diag: Vec<f64> = a.diagonal().iter().map(|d| if *d > 0.0 { 1.0 / d } else { 1.0 }).collect();
        let cap = (self.cap_factor * (n as f64).sqrt()).ceil() as usize;
        let mut r = vec![0.0; n];
        a.mul_vec(x, &mut r);
        r.iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
        let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(ri, di)| ri * di).collect();
        let mut p = z.clone();
        let mut ap = vec![0.0; n];
        let mut rz = dot(&r, &z);
        let mut res = dot(&r, &r).sqrt() / bnorm;
        let mut it = 0;
        while res > self.rel_tol {
            if it >= cap {
                return Err(Error::SolverDivergence { iterations: it, residual: res });
            }
            a.mul_vec(&p, &mut ap);
            let pap = dot(&p, &ap);
            if !(pap > 0.0) {
                return Err(Error::SolverDivergence { iterations: it, residual: res });
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            res = dot(&r, &r).sqrt() / bnorm;
            it += 1;
            for i in 0..n {
                z[i] = r[i] * inv_diag[i];
            }
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
        log::debug!("pcg-jacobi: n={n} iterations={it} residual={res:.2e}");
        Ok(SolveStats { iterations: it, relative_residual: res })
    }
}

/// Registry of linear solvers selectable by name.
pub fn solver_registry() -> Registry<dyn LinearSolver> {
    let mut r: Registry<dyn LinearSolver> = Registry::new("linear solver");
    r.register("pcg-jacobi", Arc::new(PcgJacobi::default()));
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_tridiagonal() {
        let n: usize = 50;
        let rows: Vec<Vec<usize>> = (0..n).map(|i| (i.saturating_sub(1)..(i + 2).min(n)).collect()).collect();
        let mut a = CsrMatrix::with_pattern(rows);
        for i in 0..n {
            a.add(i, i, 2.0 + i as f64 * 0.1);
            if i + 1 < n {
                a.add(i, i + 1, -1.0);
                a.add(i + 1, i, -1.0);
            }
        }
        let truth: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut b = vec![0.0; n];
        a.mul_vec(&truth, &mut b);
        let mut x = vec![0.0; n];
        let st = PcgJacobi::default().solve(&a, &b, &mut x).unwrap();
        assert!(st.relative_residual <= 1e-12);
        for (u, v) in x.iter().zip(&truth) {
            assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn iteration_cap_reports_divergence() {
        let n: usize = 400;
        let rows: Vec<Vec<usize>> = (0..n).map(|i| (i.saturating_sub(1)..(i + 2).min(n)).collect()).collect();
        let mut a = CsrMatrix::with_pattern(rows);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i + 1 < n {
                a.add(i, i + 1, -1.0);
                a.add(i + 1, i, -1.0);
            }
        }
        let b = vec![1.0; n];
        let mut x = vec![0.0; n];
        let tight = PcgJacobi { rel_tol: 1e-14, cap_factor: 0.5 };
        assert!(matches!(tight.solve(&a, &b, &mut x), Err(Error::SolverDivergence { .. })));
    }

    #[test]
    fn registry_lookup() {
        let r = solver_registry();
        assert_eq!(r.get("pcg-jacobi").unwrap().name(), "pcg-jacobi");
        assert!(r.get("lu").is_err());
    }
}
