use std::sync::Arc;

use contrast_asym::fem::{Fem, Space};
use contrast_asym::mesh::rings::RingLayout;
use contrast_asym::mesh::Mesh;
use contrast_asym::polarization::{correctors, cv_convert, tensor_densities, w_bounds_check, ConversionSign};
use contrast_asym::{MatrixField, Region, SymMat};

const RHO: f64 = 0.2;

fn disk(lambda: f64) -> (Mesh, MatrixField) {
    let m = RingLayout::graded_local([0.0, 0.0], 2.0, &[RHO], RHO / 20.0, 0.1)
        .unwrap()
        .build()
        .unwrap();
    let phase = if lambda >= 1.0 { Region::A } else { Region::B };
    let m = m.retagged(|p| if p[0].hypot(p[1]) < RHO { phase } else { Region::Background });
    let g = MatrixField::identity(2).with_region(phase, Arc::new(move |_| SymMat::scalar(2, lambda)));
    (m, g)
}

#[test]
fn disk_interior_field_matches_two_phase_factor() {
    for lambda in [3.0, 10.0, 0.1] {
        let (m, g) = disk(lambda);
        let w = correctors(&Fem::default(), &m, &MatrixField::identity(2), &g, Space::Dirichlet).unwrap();
        let expect = 2.0 / (1.0 + lambda);
        let mut worst = 0.0_f64;
        for t in m.inclusion_triangles() {
            for (i, wi) in w.iter().enumerate() {
                let mut grad = wi.gradient(&m, t);
                grad[i] += 1.0;
                let dev = (grad[0] - if i == 0 { expect } else { 0.0 }).hypot(grad[1] - if i == 1 { expect } else { 0.0 });
                worst = worst.max(dev / expect);
            }
        }
        println!("lambda {lambda}: n_vertices {} worst relative deviation {worst:.4}", m.n_vertices());
        assert!(worst < 0.02, "lambda {lambda}: {worst}");
    }
}

#[test]
fn conversion_sign_fixed_by_disk() {
    let (m, g) = disk(3.0);
    let g0 = MatrixField::identity(2);
    let w = correctors(&Fem::default(), &m, &g0, &g, Space::Dirichlet).unwrap();
    let rec = tensor_densities(&m, &g0, &g, &w).unwrap();
    let fem = rec.m_tensor();
    let field_factor = SymMat::scalar(2, 2.0 / (1.0 + 3.0));
    let plus = cv_convert(&field_factor, 3.0, 1.0, ConversionSign::Plus);
    let minus = cv_convert(&field_factor, 3.0, 1.0, ConversionSign::Minus);
    let rel = |c: &SymMat| (fem - *c).frobenius() / c.frobenius();
    println!("fem {fem:?} plus {plus:?} rel {:.4} minus rel {:.4}", rel(&plus), rel(&minus));
    assert!(rel(&plus) < 0.03);
    assert!(rel(&minus) > 1.0);
    assert!(w_bounds_check(&rec, true).pass);
}
