use std::f64::consts::SQRT_2;

use super::dense_solve;
use crate::error::Result;
use crate::tensors::SymMat;

/// Outer boundary `xi = 2` of the confocal domain (foci `+-1`).
const OUTER: f64 = 2.0;

/// Exact solutions `u^i` with `u^i = x_i` on `xi = 2` for the inclusion `xi < 1/n` of
/// conductivity `lambda`.
///
/// Inside the inclusion `u^1 = a x_1` and `u^2 = b x_2`. Outside,
/// `u^1 = (A cosh xi + B sinh xi) cos eta` and `u^2 = (C sinh xi + E cosh xi) sin eta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllipticSolution {
    pub n: usize,
    pub lambda: f64,
    pub xi0: f64,
    pub a: f64,
    pub big_a: f64,
    pub big_b: f64,
    pub b: f64,
    pub big_c: f64,
    pub big_e: f64,
}

/// Elliptic coordinates `(xi, eta)` of `p` for foci `+-1`.
pub fn elliptic_coords(p: [f64; 2]) -> (f64, f64) {
    let s = 0.5 * ((p[0] - 1.0).hypot(p[1]) + (p[0] + 1.0).hypot(p[1]));
    let xi = s.max(1.0).acosh();
    let eta = if xi == 0.0 { p[0].clamp(-1.0, 1.0).acos() * if p[1] < 0.0 { -1.0 } else { 1.0 } } else {
        (p[1] / xi.sinh()).atan2(p[0] / xi.cosh())
    };
    (xi, eta)
}

pub fn elliptic_solution(n: usize, lambda: f64) -> Result<EllipticSolution> {
    let xi0 = 1.0 / n as f64;
    let (c0, s0, c2, s2) = (xi0.cosh(), xi0.sinh(), OUTER.cosh(), OUTER.sinh());
    // cos branch, unknowns (a, A, B)
    let x = dense_solve(
        vec![vec![c0, -c0, -s0], vec![lambda * s0, -s0, -c0], vec![0.0, c2, s2]],
        vec![0.0, 0.0, c2],
    )?;
    // sin branch, unknowns (b, C, E)
    let y = dense_solve(
        vec![vec![s0, -s0, -c0], vec![lambda * c0, -c0, -s0], vec![0.0, s2, c2]],
        vec![0.0, 0.0, s2],
    )?;
    Ok(EllipticSolution { n, lambda, xi0, a: x[0], big_a: x[1], big_b: x[2], b: y[0], big_c: y[1], big_e: y[2] })
}

impl EllipticSolution {
    /// `|d_n|_F` inside the inclusion.
    pub fn dn_norm(&self) -> f64 {
        SQRT_2 * (self.lambda + 1.0 / self.lambda)
    }

    /// `||d_n||_{L1}`.
    pub fn l1_dn(&self) -> f64 {
        std::f64::consts::PI * self.xi0.cosh() * self.xi0.sinh() * self.dn_norm()
    }

    /// `l^1 = (1 - lambda)(a - 1) / |d_n|_F`, the first diagonal entry of `W`.
    pub fn l1(&self) -> f64 {
        (1.0 - self.lambda) * (self.a - 1.0) / self.dn_norm()
    }

    /// `l^2 = (1 - lambda)(b - 1) / |d_n|_F`.
    pub fn l2(&self) -> f64 {
        (1.0 - self.lambda) * (self.b - 1.0) / self.dn_norm()
    }

    /// Cellwise `(1/|d|)(gamma_0 - gamma_n) d_j w^i` inside the inclusion, row `i`, column `j`.
    pub fn w_density(&self) -> [[f64; 2]; 2] {
        let s = (1.0 - self.lambda) / self.dn_norm();
        let gw = self.corrector_gradients();
        [[s * gw[0][0], s * gw[0][1]], [s * gw[1][0], s * gw[1][1]]]
    }

    /// Gradients of `w^i = u^i - x_i` inside the inclusion.
    pub fn corrector_gradients(&self) -> [[f64; 2]; 2] {
        [[self.a - 1.0, 0.0], [0.0, self.b - 1.0]]
    }

    pub fn d_tensor(&self) -> SymMat {
        SymMat::scalar(2, (self.lambda - 1.0) / self.dn_norm())
    }

    pub fn w_tensor(&self) -> SymMat {
        SymMat::diag(&[self.l1(), self.l2()])
    }

    pub fn m_tensor(&self) -> SymMat {
        self.d_tensor() - self.w_tensor()
    }

    /// `u^1(p)`.
    pub fn u1(&self, p: [f64; 2]) -> f64 {
        let (xi, eta) = elliptic_coords(p);
        if xi < self.xi0 {
            self.a * p[0]
        } else {
            (self.big_a * xi.cosh() + self.big_b * xi.sinh()) * eta.cos()
        }
    }

    /// `u^2(p)`.
    pub fn u2(&self, p: [f64; 2]) -> f64 {
        let (xi, eta) = elliptic_coords(p);
        if xi < self.xi0 {
            self.b * p[1]
        } else {
            (self.big_c * xi.sinh() + self.big_e * xi.cosh()) * eta.sin()
        }
    }

    /// Relative residuals of the six transmission and boundary conditions.
    pub fn residuals(&self) -> [f64; 6] {
        let (c0, s0, c2, s2) = (self.xi0.cosh(), self.xi0.sinh(), OUTER.cosh(), OUTER.sinh());
        let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE);
        [
            rel(self.a * c0, self.big_a * c0 + self.big_b * s0),
            rel(self.lambda * self.a * s0, self.big_a * s0 + self.big_b * c0),
            rel(self.big_a * c2 + self.big_b * s2, c2),
            rel(self.b * s0, self.big_c * s0 + self.big_e * c0),
            rel(self.lambda * self.b * c0, self.big_c * c0 + self.big_e * s0),
            rel(self.big_c * s2 + self.big_e * c2, s2),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitCase {
    /// `lambda_n -> inf` with `lambda_n / n -> 0`.
    Conductive,
    /// `lambda_n -> 0`.
    Insulating,
}

/// Limit tensors `(W, D, M)` of the elliptic example.
pub fn elliptic_limit_tensors(case: LimitCase) -> (SymMat, SymMat, SymMat) {
    let r = 1.0 / SQRT_2;
    match case {
        LimitCase::Conductive => (SymMat::diag(&[0.0, r]), SymMat::scalar(2, r), SymMat::diag(&[r, 0.0])),
        LimitCase::Insulating => (SymMat::zero(2), SymMat::scalar(2, -r), SymMat::scalar(2, -r)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_contrast_is_identity() {
        let s = elliptic_solution(8, 1.0).unwrap();
        assert!((s.a - 1.0).abs() < 1e-13 && (s.b - 1.0).abs() < 1e-13);
        assert!(s.l1().abs() < 1e-13 && s.l2().abs() < 1e-13);
        for p in [[0.3, 0.2], [2.0, -1.0], [-0.5, 3.0]] {
            assert!((s.u1(p) - p[0]).abs() < 1e-12);
            assert!((s.u2(p) - p[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn transmission_residuals() {
        for (n, l) in [(4, 3.0), (64, 8.0), (32, 1.0 / 32.0)] {
            let s = elliptic_solution(n, l).unwrap();
            assert!(s.residuals().iter().all(|r| *r < 1e-10), "{:?}", s.residuals());
        }
    }

    #[test]
    fn coords_round_trip() {
        for p in [[0.3, 0.2], [2.0, -1.0], [-0.5, 3.0], [-1.5, -0.1]] {
            let (xi, eta) = elliptic_coords(p);
            assert!((xi.cosh() * eta.cos() - p[0]).abs() < 1e-12);
            assert!((xi.sinh() * eta.sin() - p[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn limit_w_within_isotropic_bound() {
        for c in [LimitCase::Conductive, LimitCase::Insulating] {
            let (w, d, m) = elliptic_limit_tensors(c);
            let ev = w.eigenvalues();
            assert!(ev[0] >= 0.0 && ev[1] <= 1.0 / SQRT_2 + 1e-15);
            assert!((d - w).max_abs_diff(&m) < 1e-15);
        }
    }
}
