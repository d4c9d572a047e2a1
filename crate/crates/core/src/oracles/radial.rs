use std::fmt::Write as _;

use super::dense_solve;
use crate::error::{Error, Result};
use crate::geometry::unit_sphere_area;

/// Angular factor of a 2D harmonic: `cos(k theta)` or `sin(k theta)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HarmonicBranch {
    Cos,
    Sin,
}

/// Transmission solution in concentric layers for boundary data `r^k Y_k` on the outer sphere.
///
/// In layer `i` (between `radii[i-1]` and `radii[i]`, with `radii[-1] = 0`) the radial profile
/// is `f(r) = a_i r^k + b_i r^{2-d-k}`, with `b_0 = 0`. Potential and flux `gamma f'` are
/// continuous at every interface and `f(R) = R^k` on the outer radius `R = radii.last()`.
#[derive(Clone, Debug, PartialEq)]
pub struct LayeredRadial {
    pub d: usize,
    pub degree: usize,
    pub radii: Vec<f64>,
    pub gammas: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl LayeredRadial {
    pub fn solve(d: usize, degree: usize, radii: &[f64], gammas: &[f64]) -> Result<LayeredRadial> {
        if d < 2 || degree < 1 {
            return Err(Error::InvalidArgument("need d >= 2 and harmonic degree >= 1".into()));
        }
        if radii.is_empty() || radii.len() != gammas.len() {
            return Err(Error::DimensionMismatch("one conductivity per layer".into()));
        }
        if !(radii[0] > 0.0) || !radii.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::InvalidArgument("radii must be positive and increasing".into()));
        }
        if gammas.iter().any(|g| !(*g > 0.0) || !g.is_finite()) {
            return Err(Error::InvalidConductivity("layer conductivities must be positive".into()));
        }
        let (p, q) = (degree as f64, 2.0 - d as f64 - degree as f64);
        let m = radii.len();
        // unknowns: a_0, then (a_i, b_i) for i >= 1
        let nu = 2 * m - 1;
        let ia = |i: usize| if i == 0 { 0 } else { 2 * i - 1 };
        let ib = |i: usize| 2 * i;
        let mut mat = vec![vec![0.0; nu]; nu];
        let mut rhs = vec![0.0; nu];
        let mut row = 0;
        for k in 0..m - 1 {
            let r = radii[k];
            let (lo, hi) = (k, k + 1);
            mat[row][ia(lo)] = r.powf(p);
            if lo > 0 {
                mat[row][ib(lo)] = r.powf(q);
            }
            mat[row][ia(hi)] = -r.powf(p);
            mat[row][ib(hi)] = -r.powf(q);
            row += 1;
            mat[row][ia(lo)] = gammas[lo] * p * r.powf(p - 1.0);
            if lo > 0 {
                mat[row][ib(lo)] = gammas[lo] * q * r.powf(q - 1.0);
            }
            mat[row][ia(hi)] = -gammas[hi] * p * r.powf(p - 1.0);
            mat[row][ib(hi)] = -gammas[hi] * q * r.powf(q - 1.0);
            row += 1;
        }
        let big_r = radii[m - 1];
        mat[row][ia(m - 1)] = big_r.powf(p);
        if m > 1 {
            mat[row][ib(m - 1)] = big_r.powf(q);
        }
        rhs[row] = big_r.powf(p);
        let x = dense_solve(mat, rhs)?;
        let a = (0..m).map(|i| x[ia(i)]).collect();
        let b = (0..m).map(|i| if i == 0 { 0.0 } else { x[ib(i)] }).collect();
        Ok(LayeredRadial { d, degree, radii: radii.to_vec(), gammas: gammas.to_vec(), a, b })
    }

    fn exponents(&self) -> (f64, f64) {
        (self.degree as f64, 2.0 - self.d as f64 - self.degree as f64)
    }

    pub fn layer(&self, r: f64) -> usize {
        self.radii.iter().position(|&ri| r < ri).unwrap_or(self.radii.len() - 1)
    }

    fn profile_in(&self, i: usize, r: f64) -> f64 {
        let (p, q) = self.exponents();
        let b = if self.b[i] == 0.0 { 0.0 } else { self.b[i] * r.powf(q) };
        self.a[i] * r.powf(p) + b
    }

    fn derivative_in(&self, i: usize, r: f64) -> f64 {
        let (p, q) = self.exponents();
        let b = if self.b[i] == 0.0 { 0.0 } else { self.b[i] * q * r.powf(q - 1.0) };
        self.a[i] * p * r.powf(p - 1.0) + b
    }

    pub fn profile(&self, r: f64) -> f64 {
        self.profile_in(self.layer(r), r)
    }

    pub fn profile_derivative(&self, r: f64) -> f64 {
        self.derivative_in(self.layer(r), r)
    }

    /// Relative residuals of the `2m - 1` linear conditions.
    pub fn residuals(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for k in 0..self.radii.len() - 1 {
            let r = self.radii[k];
            let (u0, u1) = (self.profile_in(k, r), self.profile_in(k + 1, r));
            out.push((u0 - u1).abs() / u0.abs().max(u1.abs()).max(f64::MIN_POSITIVE));
            let (f0, f1) = (self.gammas[k] * self.derivative_in(k, r), self.gammas[k + 1] * self.derivative_in(k + 1, r));
            out.push((f0 - f1).abs() / f0.abs().max(f1.abs()).max(f64::MIN_POSITIVE));
        }
        let big_r = *self.radii.last().unwrap();
        let target = big_r.powi(self.degree as i32);
        out.push((self.profile_in(self.radii.len() - 1, big_r) - target).abs() / target);
        out
    }

    fn angular(&self, theta: f64, branch: HarmonicBranch) -> (f64, f64) {
        let k = self.degree as f64;
        match branch {
            HarmonicBranch::Cos => ((k * theta).cos(), -k * (k * theta).sin()),
            HarmonicBranch::Sin => ((k * theta).sin(), k * (k * theta).cos()),
        }
    }

    fn check_2d(&self) {
        assert_eq!(self.d, 2, "planar evaluation needs d = 2");
    }

    /// `u(p) = f(r) Y(theta)` (2D).
    pub fn value(&self, p: [f64; 2], branch: HarmonicBranch) -> f64 {
        self.check_2d();
        let r = p[0].hypot(p[1]);
        if r == 0.0 {
            return 0.0;
        }
        self.profile(r) * self.angular(p[1].atan2(p[0]), branch).0
    }

    pub fn gradient(&self, p: [f64; 2], branch: HarmonicBranch) -> [f64; 2] {
        self.check_2d();
        let r = p[0].hypot(p[1]);
        if r == 0.0 {
            return match (self.degree, branch) {
                (1, HarmonicBranch::Cos) => [self.a[0], 0.0],
                (1, HarmonicBranch::Sin) => [0.0, self.a[0]],
                _ => [0.0, 0.0],
            };
        }
        let th = p[1].atan2(p[0]);
        let (y, dy) = self.angular(th, branch);
        let ur = self.profile_derivative(r) * y;
        let ut = self.profile(r) * dy / r;
        let (c, s) = (th.cos(), th.sin());
        [ur * c - ut * s, ur * s + ut * c]
    }

    /// Stream function `psi` with `J grad psi = gamma grad u`, `J = [[0, -1], [1, 0]]` (2D).
    pub fn stream(&self, p: [f64; 2], branch: HarmonicBranch) -> f64 {
        self.check_2d();
        let r = p[0].hypot(p[1]);
        if r == 0.0 {
            return 0.0;
        }
        let i = self.layer(r);
        let k = self.degree as f64;
        let th = p[1].atan2(p[0]);
        let radial = self.gammas[i] * (self.a[i] * r.powf(k) - self.b[i] * r.powf(-k));
        match branch {
            HarmonicBranch::Cos => -radial * (k * th).sin(),
            HarmonicBranch::Sin => radial * (k * th).cos(),
        }
    }

    /// `sup_Omega |u - r^k Y|` for the unit-amplitude harmonic (angular sup is 1).
    pub fn deviation_sup(&self) -> f64 {
        let (p, q) = self.exponents();
        let mut best = 0.0_f64;
        let mut lo = 0.0;
        for (i, &hi) in self.radii.iter().enumerate() {
            let (a, b) = (self.a[i] - 1.0, self.b[i]);
            let g = |r: f64| if r == 0.0 { 0.0 } else { a * r.powf(p) + if b == 0.0 { 0.0 } else { b * r.powf(q) } };
            let mut cands = vec![lo, hi];
            // g'(r) = 0  <=>  r^{p-q} = -q b / (p a)
            if a != 0.0 && b != 0.0 {
                let t = -q * b / (p * a);
                if t > 0.0 {
                    let r = t.powf(1.0 / (p - q));
                    if r > lo && r < hi {
                        cands.push(r);
                    }
                }
            }
            for r in cands {
                best = best.max(g(r).abs());
            }
            lo = hi;
        }
        best
    }

    /// `||u - x_1||_{L1(B(0,R))}` for degree 1.
    pub fn deviation_l1(&self) -> f64 {
        assert_eq!(self.degree, 1, "L1 deviation implemented for the first harmonic");
        let d = self.d as f64;
        // integral of |omega_1| over the unit sphere: twice the volume of the unit (d-1)-ball
        let sphere = 2.0 * unit_sphere_area(self.d - 1) / (d - 1.0);
        let mut total = 0.0;
        let mut lo = 0.0;
        for (i, &hi) in self.radii.iter().enumerate() {
            let (a, b) = (self.a[i] - 1.0, self.b[i]);
            let anti = |r: f64| a * r.powf(d + 1.0) / (d + 1.0) + b * r;
            let mut cuts = vec![lo];
            if a != 0.0 {
                let t = -b / a;
                if t > 0.0 {
                    let r = t.powf(1.0 / d);
                    if r > lo && r < hi {
                        cuts.push(r);
                    }
                }
            }
            cuts.push(hi);
            for w in cuts.windows(2) {
                total += (anti(w[1]) - anti(w[0])).abs();
            }
            lo = hi;
        }
        total * sphere
    }
}

impl LayeredRadial {
    /// `int gamma |grad(u - r^k Y)|^2` over the disk for the unit-amplitude harmonic (2D).
    pub fn perturbation_energy(&self) -> f64 {
        self.check_2d();
        let k = self.degree as f64;
        let mut total = 0.0;
        let mut lo = 0.0_f64;
        for (i, &hi) in self.radii.iter().enumerate() {
            let (a, b) = (self.a[i] - 1.0, self.b[i]);
            let mut e = a * a * (hi.powf(2.0 * k) - lo.powf(2.0 * k));
            if b != 0.0 {
                e += b * b * (lo.powf(-2.0 * k) - hi.powf(-2.0 * k));
            }
            total += std::f64::consts::PI * self.gammas[i] * k * e;
            lo = hi;
        }
        total
    }
}

/// Exact solution of the two-shell example with `u = x_1` on `|x| = 2`.
///
/// Layers: `r < 1 - 1/n` (conductivity 1), `1 - 1/n < r < 1` (`n^alpha`),
/// `1 < r < 1 + 1/n` (`n^beta`), `1 + 1/n < r < 2` (1).
#[derive(Clone, Debug, PartialEq)]
pub struct RadialSolution {
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub layers: LayeredRadial,
}

impl RadialSolution {
    pub fn d(&self) -> usize {
        self.layers.d
    }

    /// `A_i`, `i = 1..=4`.
    pub fn a(&self, i: usize) -> f64 {
        self.layers.a[i - 1]
    }

    /// `B_i`, `i = 1..=4` (`B_1 = 0`).
    pub fn b(&self, i: usize) -> f64 {
        self.layers.b[i - 1]
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.layers.residuals()
    }
}

pub fn radial_solution(d: usize, n: usize, alpha: f64, beta: f64) -> Result<RadialSolution> {
    if n < 2 {
        return Err(Error::InvalidArgument("radial example needs n >= 2".into()));
    }
    let nf = n as f64;
    let radii = [1.0 - 1.0 / nf, 1.0, 1.0 + 1.0 / nf, 2.0];
    let gammas = [1.0, nf.powf(alpha), nf.powf(beta), 1.0];
    Ok(RadialSolution { n, alpha, beta, layers: LayeredRadial::solve(d, 1, &radii, &gammas)? })
}

/// `(||u_n - x_1||_inf, ||u_n - x_1||_1)` over `B(0, 2)`.
pub fn radial_perturbation(sol: &RadialSolution) -> (f64, f64) {
    (sol.layers.deviation_sup(), sol.layers.deviation_l1())
}

/// Coefficient table `n,alpha,beta,A1,A2,A3,A4,B2,B3,B4`.
pub fn radial_csv(rows: &[RadialSolution]) -> String {
    let mut s = String::from("n,alpha,beta,A1,A2,A3,A4,B2,B3,B4\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.alpha,
            r.beta,
            r.a(1),
            r.a(2),
            r.a(3),
            r.a(4),
            r.b(2),
            r.b(3),
            r.b(4)
        );
    }
    s
}
