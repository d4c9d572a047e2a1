use contrast_asym::asymptotics::fit_rate;
use contrast_asym::geometry::{InclusionFamily, RadialAnnuli};
use contrast_asym::tensors::{
    check_dn_dominance, dn_at, dn_prime_at, frobenius_sandwich, psd_leq, sigma_of, sigma_two_ways, Phase,
};
use contrast_asym::SymMat;
use nalgebra::Matrix3;
use proptest::prelude::*;

fn dense(a: &SymMat) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| a.get(i, j))
}

/// `L L^T + 0.05 I` scaled by `s`, for a lower-triangular `L` with entries in `[-1, 1]`.
fn spd2() -> impl Strategy<Value = SymMat> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -2.0..2.0f64).prop_map(|(a, b, c, e)| {
        let s = 10f64.powf(e);
        SymMat::new2(s * (a * a + 0.05), s * a * b, s * (b * b + c * c + 0.05))
    })
}

fn spd3() -> impl Strategy<Value = SymMat> {
    (prop::array::uniform6(-1.0..1.0f64), -2.0..2.0f64).prop_map(|(l, e)| {
        let s = 10f64.powf(e);
        let m = [[l[0], 0.0, 0.0], [l[1], l[2], 0.0], [l[3], l[4], l[5]]];
        let dot = |i: usize, j: usize| (0..3).map(|k| m[i][k] * m[j][k]).sum::<f64>();
        let eye = |i: usize, j: usize| if i == j { 0.05 } else { 0.0 };
        let e: Vec<f64> = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]
            .iter()
            .map(|&(i, j)| s * (dot(i, j) + eye(i, j)))
            .collect();
        SymMat::new(3, &e).unwrap()
    })
}

fn identity_holds(g0: &SymMat, gn: &SymMat) -> bool {
    let dn = dn_at(g0, gn, true).unwrap();
    let other = dn_prime_at(g0, gn).unwrap() + g0.scaled(2.0);
    dn.max_abs_diff(&other) <= 1e-12 * dn.frobenius()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn dn_is_dn_prime_plus_twice_background(g0 in spd2(), gn in spd2()) {
        prop_assert!(identity_holds(&g0, &gn));
    }

    #[test]
    fn dn_identity_in_three_dimensions(g0 in spd3(), gn in spd3()) {
        prop_assert!(identity_holds(&g0, &gn));
    }

    #[test]
    fn sigma_computed_two_ways_agrees(g0 in spd2(), gn in spd2()) {
        let s = sigma_two_ways(&g0, &gn).unwrap();
        prop_assert!(s.deviation < 1e-12, "{}", s.deviation);
        prop_assert!(s.bounds_hold);
    }

    #[test]
    fn dual_conductivity_is_an_involution(g in spd2()) {
        let back = sigma_of(&sigma_of(&g).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&g) <= 1e-12 * g.frobenius());
    }

    #[test]
    fn frobenius_sandwich_orders(a in spd3()) {
        let (lo, mid, hi) = frobenius_sandwich(&a);
        prop_assert!(lo <= mid * (1.0 + 1e-12) && mid <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn psd_order_implies_frobenius_order(a in spd3(), c in spd3()) {
        let b = a + c;
        prop_assert!(psd_leq(&a, &b));
        prop_assert!(a.frobenius() <= b.frobenius() * (1.0 + 1e-12));
    }

    #[test]
    fn dn_dominates_ordered_pairs(g0 in spd2(), c in spd2()) {
        let up = check_dn_dominance(&g0, &(g0 + c), Phase::Conductive).unwrap();
        prop_assert!(up.all());
        let down = g0.sandwich(&(g0 + c).inverse().unwrap());
        prop_assert!(check_dn_dominance(&g0, &down, Phase::Insulating).unwrap().all());
    }

    #[test]
    fn fit_recovers_power_laws(slope in -3.0..3.0f64, c in 0.1..10.0f64) {
        let pts: Vec<(f64, f64)> = [1.0f64, 2.0, 5.0, 11.0].iter().map(|x| (*x, c * x.powf(slope))).collect();
        let f = fit_rate(&pts).unwrap();
        prop_assert!((f.slope - slope).abs() < 1e-10 && f.residual < 1e-10);
    }

    #[test]
    fn radial_mass_shrinks_with_n(alpha in -0.9..0.9f64, beta in -0.9..0.9f64) {
        let fam = RadialAnnuli::new(2, alpha, beta);
        let l1: Vec<f64> = [4usize, 8, 16, 32, 64].iter().map(|&n| fam.l1_dn(n)).collect();
        prop_assert!(l1.windows(2).all(|w| w[1] < w[0]), "{l1:?}");
    }

    #[test]
    fn eigen_and_inverse_match_dense_reference(a in spd3()) {
        let reference = dense(&a).symmetric_eigen();
        let mut expect: Vec<f64> = reference.eigenvalues.iter().copied().collect();
        expect.sort_by(f64::total_cmp);
        let got = a.eigenvalues();
        let scale = a.spectral_radius();
        for (g, e) in got.iter().zip(&expect) {
            prop_assert!((g - e).abs() <= 1e-10 * scale, "{got:?} vs {expect:?}");
        }
        let inv = dense(&a).try_inverse().unwrap();
        let ours = a.inverse().unwrap();
        let err = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).map(|(i, j)| (ours.get(i, j) - inv[(i, j)]).abs()).fold(0.0, f64::max);
        prop_assert!(err <= 1e-8 * inv.norm(), "{err}");
    }
}
