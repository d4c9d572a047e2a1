use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Smallest admissible conductivity eigenvalue.
pub const CONTRAST_MIN: f64 = 1e-8;
/// Largest admissible conductivity eigenvalue.
pub const CONTRAST_MAX: f64 = 1e8;

type Full = [[f64; 3]; 3];

/// Symmetric `d x d` matrix for `d` in {2, 3}, stored as the row-major upper triangle.
#[derive(Clone, Copy, PartialEq)]
pub struct SymMat {
    dim: usize,
    e: [f64; 6],
}

fn slot(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    match dim {
        2 => i * 2 + j - i,
        _ => [[0, 1, 2], [1, 3, 4], [2, 4, 5]][i][j],
    }
}

impl SymMat {
    /// Builds from `d(d+1)/2` upper-triangle entries in row-major order.
    pub fn new(dim: usize, entries: &[f64]) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let len = dim * (dim + 1) / 2;
        if entries.len() != len {
            return Err(Error::DimensionMismatch(format!(
                "expected {len} entries for dim {dim}, got {}",
                entries.len()
            )));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite matrix entry".into()));
        }
        let mut e = [0.0; 6];
        e[..len].copy_from_slice(entries);
        Ok(SymMat { dim, e })
    }

    pub fn zero(dim: usize) -> Self {
        assert!(dim == 2 || dim == 3, "SymMat supports d = 2, 3");
        SymMat { dim, e: [0.0; 6] }
    }

    pub fn scalar(dim: usize, s: f64) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.set(i, i, s);
        }
        m
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Self::zero(d.len());
        for (i, v) in d.iter().enumerate() {
            m.set(i, i, *v);
        }
        m
    }

    /// 2x2 matrix `[[a, b], [b, c]]`.
    pub fn new2(a: f64, b: f64, c: f64) -> Self {
        SymMat { dim: 2, e: [a, b, c, 0.0, 0.0, 0.0] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[f64] {
        &self.e[..self.dim * (self.dim + 1) / 2]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.e[slot(self.dim, i, j)]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.e[slot(self.dim, i, j)] = v;
    }

    fn full(&self) -> Full {
        let mut f = [[0.0; 3]; 3];
        for (i, row) in f.iter_mut().enumerate().take(self.dim) {
            for (j, v) in row.iter_mut().enumerate().take(self.dim) {
                *v = self.get(i, j);
            }
        }
        f
    }

    /// Symmetrises a full matrix by averaging the off-diagonal pairs.
    fn from_full(dim: usize, f: &Full) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, 0.5 * (f[i][j] + f[j][i]));
            }
        }
        m
    }

    fn mul_full(&self, a: &Full, b: &Full) -> Full {
        let mut c = [[0.0; 3]; 3];
        for i in 0..self.dim {
            for j in 0..self.dim {
                c[i][j] = (0..self.dim).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        c
    }

    /// `self * b * self`, symmetric whenever both factors are.
    pub fn sandwich(&self, b: &SymMat) -> SymMat {
        assert_eq!(self.dim, b.dim);
        let a = self.full();
        let t = self.mul_full(&a, &b.full());
        SymMat::from_full(self.dim, &self.mul_full(&t, &a))
    }

    /// `self^2`.
    pub fn square(&self) -> SymMat {
        let a = self.full();
        SymMat::from_full(self.dim, &self.mul_full(&a, &a))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn det(&self) -> f64 {
        let a = self.full();
        match self.dim {
            2 => a[0][0] * a[1][1] - a[0][1] * a[1][0],
            _ => {
                a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                    - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                    + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
            }
        }
    }

    /// Inverse by the cofactor formula.
    pub fn inverse(&self) -> Result<SymMat> {
        let det = self.det();
        let scale = self.max_abs_entry().max(f64::MIN_POSITIVE);
        if det == 0.0 || det.abs() < 1e-300 || (det / scale.powi(self.dim as i32)).abs() < 1e-15 {
            return Err(Error::SingularSystem(format!("matrix {self:?} is singular")));
        }
        let a = self.full();
        let mut m = SymMat::zero(self.dim);
        match self.dim {
            2 => {
                m.set(0, 0, a[1][1] / det);
                m.set(0, 1, -a[0][1] / det);
                m.set(1, 1, a[0][0] / det);
            }
            _ => {
                let c = |r0: usize, r1: usize, c0: usize, c1: usize| {
                    a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]
                };
                m.set(0, 0, c(1, 2, 1, 2) / det);
                m.set(0, 1, -c(0, 2, 1, 2) / det);
                m.set(0, 2, c(0, 1, 1, 2) / det);
                m.set(1, 1, c(0, 2, 0, 2) / det);
                m.set(1, 2, -c(0, 1, 0, 2) / det);
                m.set(2, 2, c(0, 1, 0, 1) / det);
            }
        }
        Ok(m)
    }

    fn max_abs_entry(&self) -> f64 {
        self.entries().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Eigenvalues in ascending order (closed form: quadratic for d=2, trigonometric Cardano for d=3).
    pub fn eigenvalues(&self) -> Vec<f64> {
        match self.dim {
            2 => {
                let (a, b, c) = (self.e[0], self.e[1], self.e[2]);
                let m = 0.5 * (a + c);
                let r = (0.5 * (a - c)).hypot(b);
                vec![m - r, m + r]
            }
            _ => {
                let a = self.full();
                let p1 = a[0][1].powi(2) + a[0][2].powi(2) + a[1][2].powi(2);
                let q = self.trace() / 3.0;
                if p1 <= f64::EPSILON * f64::EPSILON * (q * q).max(f64::MIN_POSITIVE) {
                    let mut v = vec![a[0][0], a[1][1], a[2][2]];
                    v.sort_by(f64::total_cmp);
                    return v;
                }
                let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
                let p = (p2 / 6.0).sqrt();
                let b = (*self - SymMat::scalar(3, q)).scaled(1.0 / p);
                let r = (b.det() / 2.0).clamp(-1.0, 1.0);
                let phi = r.acos() / 3.0;
                let e1 = q + 2.0 * p * phi.cos();
                let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
                let e2 = 3.0 * q - e1 - e3;
                let mut v = vec![e1, e2, e3];
                v.sort_by(f64::total_cmp);
                v
            }
        }
    }

    pub fn min_eig(&self) -> f64 {
        self.eigenvalues()[0]
    }

    pub fn max_eig(&self) -> f64 {
        *self.eigenvalues().last().expect("nonempty spectrum")
    }

    /// Largest eigenvalue in absolute value.
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues().iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.dim {
            for j in 0..self.dim {
                s += self.get(i, j).powi(2);
            }
        }
        s.sqrt()
    }

    pub fn scaled(&self, s: f64) -> SymMat {
        let mut m = *self;
        m.e.iter_mut().for_each(|v| *v *= s);
        m
    }

    pub fn mul_vec(&self, v: &[f64]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, o) in out.iter_mut().enumerate().take(self.dim) {
            *o = (0..self.dim).map(|j| self.get(i, j) * v[j]).sum();
        }
        out
    }

    /// `u . A v`.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        let av = self.mul_vec(v);
        (0..self.dim).map(|i| u[i] * av[i]).sum()
    }

    /// Errors unless the matrix is a symmetric positive-definite conductivity inside the contrast cap.
    pub fn check_conductivity(&self) -> Result<()> {
        let ev = self.eigenvalues();
        let (lo, hi) = (ev[0], ev[ev.len() - 1]);
        if !(lo > 0.0) {
            return Err(Error::InvalidConductivity(format!("{self:?} is not positive definite")));
        }
        if lo < CONTRAST_MIN * (1.0 - 1e-12) || hi > CONTRAST_MAX * (1.0 + 1e-12) {
            return Err(Error::InvalidConductivity(format!(
                "eigenvalues [{lo:e}, {hi:e}] outside the contrast cap [{CONTRAST_MIN:e}, {CONTRAST_MAX:e}]"
            )));
        }
        Ok(())
    }

    pub fn max_abs_diff(&self, other: &SymMat) -> f64 {
        (*self - *other).max_abs_entry()
    }
}

impl fmt::Debug for SymMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymMat{}{:?}", self.dim, self.entries())
    }
}

impl Add for SymMat {
    type Output = SymMat;
    fn add(mut self, rhs: SymMat) -> SymMat {
        assert_eq!(self.dim, rhs.dim);
        self.e.iter_mut().zip(rhs.e).for_each(|(a, b)| *a += b);
        self
    }
}

impl Sub for SymMat {
    type Output = SymMat;
    fn sub(mut self, rhs: SymMat) -> SymMat {
        assert_eq!(self.dim, rhs.dim);
        self.e.iter_mut().zip(rhs.e).for_each(|(a, b)| *a -= b);
        self
    }
}

impl Neg for SymMat {
    type Output = SymMat;
    fn neg(self) -> SymMat {
        self.scaled(-1.0)
    }
}

impl Mul<SymMat> for f64 {
    type Output = SymMat;
    fn mul(self, rhs: SymMat) -> SymMat {
        rhs.scaled(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_2x2_and_3x3() {
        let m = SymMat::new2(2.0, 1.0, 2.0);
        let ev = m.eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
        let m3 = SymMat::new(3, &[2.0, -1.0, 0.0, 2.0, -1.0, 2.0]).unwrap();
        let ev = m3.eigenvalues();
        let s2 = 2f64.sqrt();
        for (a, b) in ev.iter().zip([2.0 - s2, 2.0, 2.0 + s2]) {
            assert!((a - b).abs() < 1e-13, "{ev:?}");
        }
    }

    #[test]
    fn inverse_roundtrip_3x3() {
        let m = SymMat::new(3, &[4.0, 1.0, 0.5, 3.0, 0.2, 2.0]).unwrap();
        let p = m.inverse().unwrap();
        let a = m.full();
        let b = p.full();
        let c = m.mul_full(&a, &b);
        for (i, row) in c.iter().enumerate().take(3) {
            for (j, v) in row.iter().enumerate().take(3) {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn contrast_cap_enforced() {
        assert!(SymMat::scalar(2, 1e9).check_conductivity().is_err());
        assert!(SymMat::scalar(2, 1e-9).check_conductivity().is_err());
        assert!(SymMat::new2(1.0, 2.0, 1.0).check_conductivity().is_err());
        assert!(SymMat::scalar(2, 1e8).check_conductivity().is_ok());
    }

    #[test]
    fn bad_dimension() {
        assert!(matches!(SymMat::new(4, &[0.0; 10]), Err(Error::UnsupportedDimension(4))));
        assert!(SymMat::new(2, &[1.0, 2.0]).is_err());
    }
}
