//! Symmetric-matrix algebra for conductivity tensors and the pointwise matrix inequalities
//! relating `gamma_0`, `gamma_n`, `d_n`, `sigma_n` and `Sigma_n`.

mod field;
mod symmat;

pub use field::{MatrixField, Region, TensorFn};
pub use symmat::{SymMat, CONTRAST_MAX, CONTRAST_MIN};

use crate::error::{Error, Result};

/// Relative tolerance of the positive-semidefinite order.
pub const TOL_PSD: f64 = 1e-10;

fn same_dim(a: &SymMat, b: &SymMat) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!("{} vs {}", a.dim(), b.dim())));
    }
    Ok(())
}

/// `gamma_n + gamma_0 gamma_n^{-1} gamma_0` inside an inclusion, zero outside.
pub fn dn_at(g0: &SymMat, gn: &SymMat, inside_inclusion: bool) -> Result<SymMat> {
    same_dim(g0, gn)?;
    g0.check_conductivity()?;
    gn.check_conductivity()?;
    if !inside_inclusion {
        return Ok(SymMat::zero(g0.dim()));
    }
    Ok(*gn + g0.sandwich(&gn.inverse()?))
}

/// `(gamma_n - gamma_0) gamma_n^{-1} (gamma_n - gamma_0)`, equal to `d_n - 2 gamma_0`.
pub fn dn_prime_at(g0: &SymMat, gn: &SymMat) -> Result<SymMat> {
    same_dim(g0, gn)?;
    g0.check_conductivity()?;
    gn.check_conductivity()?;
    let diff = *gn - *g0;
    Ok(diff.sandwich(&gn.inverse()?))
}

pub fn frobenius(a: &SymMat) -> f64 {
    a.frobenius()
}

/// `A <= B` as quadratic forms, up to `TOL_PSD` times the largest eigenvalue magnitude of `A`, `B`.
pub fn psd_leq(a: &SymMat, b: &SymMat) -> bool {
    assert_eq!(a.dim(), b.dim());
    let scale = a.spectral_radius().max(b.spectral_radius());
    (*b - *a).min_eig() >= -TOL_PSD * scale
}

/// Which side of the background an inclusion phase sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Phase {
    /// `gamma_n >= gamma_0`.
    Conductive,
    /// `gamma_n <= gamma_0`.
    Insulating,
}

/// The four Frobenius lower bounds on `|d_n|_F`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DnDominance {
    pub over_gamma0: bool,
    pub over_gamman: bool,
    pub over_difference: bool,
    pub over_dn_prime: bool,
}

impl DnDominance {
    pub fn all(&self) -> bool {
        self.over_gamma0 && self.over_gamman && self.over_difference && self.over_dn_prime
    }
}

/// Checks `|d_n|_F >= |gamma_0|_F, |gamma_n|_F, |gamma_n - gamma_0|_F, |d_n'|_F`.
pub fn check_dn_dominance(g0: &SymMat, gn: &SymMat, phase: Phase) -> Result<DnDominance> {
    let ordered = match phase {
        Phase::Conductive => psd_leq(g0, gn),
        Phase::Insulating => psd_leq(gn, g0),
    };
    if !ordered {
        return Err(Error::Ordering(format!("{gn:?} is not on the {phase:?} side of {g0:?}")));
    }
    let dn = dn_at(g0, gn, true)?.frobenius();
    let slack = 1e-12 * dn;
    Ok(DnDominance {
        over_gamma0: dn + slack >= g0.frobenius(),
        over_gamman: dn + slack >= gn.frobenius(),
        over_difference: dn + slack >= (*gn - *g0).frobenius(),
        over_dn_prime: dn + slack >= dn_prime_at(g0, gn)?.frobenius(),
    })
}

/// `(|A^2|_F, |A|_F^2, sqrt(d) |A^2|_F)`; the middle value lies between the outer ones for PSD `A`.
pub fn frobenius_sandwich(a: &SymMat) -> (f64, f64, f64) {
    let sq = a.square().frobenius();
    (sq, a.frobenius().powi(2), (a.dim() as f64).sqrt() * sq)
}

/// Dual conductivity `J^T gamma^{-1} J` with `J` the rotation by +pi/2.
pub fn sigma_of(g: &SymMat) -> Result<SymMat> {
    if g.dim() != 2 {
        return Err(Error::UnsupportedDimension(g.dim()));
    }
    let inv = g.inverse()?;
    // J^T [[a, b], [b, c]] J = [[c, -b], [-b, a]]
    Ok(SymMat::new2(inv.get(1, 1), -inv.get(0, 1), inv.get(0, 0)))
}

/// `Sigma_n` computed as `sigma_n + sigma_0 sigma_n^{-1} sigma_0` and as `J^T g0^{-1} d_n g0^{-1} J`.
#[derive(Clone, Copy, Debug)]
pub struct SigmaTwoWays {
    pub from_sigma: SymMat,
    pub from_dn: SymMat,
    pub deviation: f64,
    /// `|d_n|_F min_eig(g0^{-1})^2 <= |Sigma_n|_F <= |d_n|_F max_eig(g0^{-1})^2`.
    pub bounds_hold: bool,
}

pub fn sigma_two_ways(g0: &SymMat, gn: &SymMat) -> Result<SigmaTwoWays> {
    same_dim(g0, gn)?;
    if g0.dim() != 2 {
        return Err(Error::UnsupportedDimension(g0.dim()));
    }
    let s0 = sigma_of(g0)?;
    let sn = sigma_of(gn)?;
    let from_sigma = sn + s0.sandwich(&sn.inverse()?);
    let g0inv = g0.inverse()?;
    let dn = dn_at(g0, gn, true)?;
    let inner = g0inv.sandwich(&dn);
    let from_dn = SymMat::new2(inner.get(1, 1), -inner.get(0, 1), inner.get(0, 0));
    let scale = from_sigma.frobenius().max(1.0);
    let deviation = from_sigma.max_abs_diff(&from_dn) / scale;
    let ev = g0inv.eigenvalues();
    let sig = from_dn.frobenius();
    let dnf = dn.frobenius();
    let slack = 1e-12 * dnf.max(sig);
    let bounds_hold = dnf * ev[0] * ev[0] <= sig + slack && sig <= dnf * ev[1] * ev[1] + slack;
    Ok(SigmaTwoWays { from_sigma, from_dn, deviation, bounds_hold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dn_examples() {
        let i2 = SymMat::identity(2);
        let l = 7.0;
        let d = dn_at(&i2, &SymMat::scalar(2, l), true).unwrap();
        assert!(d.max_abs_diff(&SymMat::scalar(2, l + 1.0 / l)) < 1e-14);
        assert!(dn_at(&i2, &i2, true).unwrap().max_abs_diff(&SymMat::scalar(2, 2.0)) < 1e-15);
        let d = dn_at(&i2, &SymMat::diag(&[4.0, 9.0]), true).unwrap();
        assert!(d.max_abs_diff(&SymMat::diag(&[4.25, 9.0 + 1.0 / 9.0])) < 1e-14);
        assert_eq!(dn_at(&i2, &SymMat::scalar(2, 3.0), false).unwrap(), SymMat::zero(2));
        assert!(dn_at(&i2, &SymMat::new2(1.0, 3.0, 1.0), true).is_err());
    }

    #[test]
    fn dn_prime_examples() {
        let i2 = SymMat::identity(2);
        assert!(dn_prime_at(&i2, &i2).unwrap().frobenius() < 1e-15);
        let l = 5.0;
        let p = dn_prime_at(&i2, &SymMat::scalar(2, l)).unwrap();
        assert_relative_eq!(p.get(0, 0), (l - 1.0) * (l - 1.0) / l, epsilon = 1e-14);
    }

    #[test]
    fn frobenius_examples() {
        assert_relative_eq!(frobenius(&SymMat::identity(2)), 2f64.sqrt());
        assert_relative_eq!(frobenius(&SymMat::diag(&[3.0, 4.0])), 5.0);
        let l: f64 = 3.0;
        let d = dn_at(&SymMat::identity(2), &SymMat::scalar(2, l), true).unwrap();
        assert_relative_eq!(d.frobenius(), 2f64.sqrt() * (l + 1.0 / l), epsilon = 1e-14);
    }

    #[test]
    fn psd_examples() {
        assert!(psd_leq(&SymMat::identity(2), &SymMat::scalar(2, 2.0)));
        assert!(!psd_leq(&SymMat::diag(&[2.0, 0.5]), &SymMat::identity(2)));
    }

    #[test]
    fn dominance_examples() {
        let i2 = SymMat::identity(2);
        assert!(check_dn_dominance(&i2, &SymMat::scalar(2, 100.0), Phase::Conductive).unwrap().all());
        assert!(check_dn_dominance(&i2, &SymMat::scalar(2, 0.01), Phase::Insulating).unwrap().all());
        assert!(check_dn_dominance(&i2, &i2, Phase::Conductive).unwrap().all());
        assert!(matches!(
            check_dn_dominance(&i2, &SymMat::scalar(2, 0.5), Phase::Conductive),
            Err(Error::Ordering(_))
        ));
    }

    #[test]
    fn sandwich_examples() {
        let (a, b, c) = frobenius_sandwich(&SymMat::identity(2));
        assert_relative_eq!(a, 2f64.sqrt());
        assert_relative_eq!(b, 2.0);
        assert_relative_eq!(c, 2.0);
        let (a, b, c) = frobenius_sandwich(&SymMat::diag(&[1.0, 0.0]));
        assert_eq!((a, b), (1.0, 1.0));
        assert_relative_eq!(c, 2f64.sqrt());
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma_of(&SymMat::identity(2)).unwrap(), SymMat::identity(2));
        let s = sigma_of(&SymMat::diag(&[2.0, 5.0])).unwrap();
        assert!(s.max_abs_diff(&SymMat::diag(&[0.2, 0.5])) < 1e-15);
        let s = sigma_of(&SymMat::scalar(2, 4.0)).unwrap();
        assert!(s.max_abs_diff(&SymMat::scalar(2, 0.25)) < 1e-15);
        assert!(matches!(sigma_of(&SymMat::identity(3)), Err(Error::UnsupportedDimension(3))));
    }

    #[test]
    fn sigma_two_ways_examples() {
        let i2 = SymMat::identity(2);
        let l = 6.0;
        let r = sigma_two_ways(&i2, &SymMat::scalar(2, l)).unwrap();
        assert!(r.from_dn.max_abs_diff(&SymMat::scalar(2, l + 1.0 / l)) < 1e-14);
        assert!(r.deviation < 1e-15 && r.bounds_hold);
        let r = sigma_two_ways(&i2, &i2).unwrap();
        assert!(r.from_sigma.max_abs_diff(&SymMat::scalar(2, 2.0)) < 1e-15);
    }
}
