//! Fixed numerical references for the family masks, corrections and
//! B-spline symbols. Decimal references were produced with 40-digit
//! arithmetic outside this crate.

use expsub_core::bspline::{normalized_symbol, stationary_bspline, Normalization};
use expsub_core::correction::{correction_derivatives, hermite_correction, stationary_correction};
use expsub_core::frequency::{GammaSet, Theta};
use expsub_core::laurent::{LaurentPoly, RealMask};
use expsub_core::pseudo::{family_oracle_4pt, family_oracle_6pt, real_symbol, SchemeFamily};
use expsub_core::scalar::{Cx, Dd};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn four_point_hyperbolic_level_zero() {
    let fam = SchemeFamily::family(Theta::Real(1.0), 2).unwrap();
    let m = fam.symbol_at(0).unwrap();
    assert_eq!(m.lo, -3);
    assert!(close(m.get(-3), -0.043589793803102403075, 1e-15));
    assert!(close(m.get(-1), 0.53434478156824822227, 1e-15));
    assert!(close(m.get(1), 0.53434478156824822227, 1e-15));
    assert_eq!(m.get(0), 1.0);
    assert!(m.get(-2).abs() < 1e-17);
}

#[test]
fn four_point_trigonometric_level_zero() {
    let m = real_symbol(&GammaSet::family(Theta::Imag(1.0), 2).unwrap(), &GammaSet::family(Theta::Imag(1.0), 2).unwrap(), 0)
        .unwrap();
    assert!(close(m.get(3), -0.092473237476125798591, 1e-15));
    assert!(close(m.get(-1), 0.57720073306503444596, 1e-15));
}

#[test]
fn six_point_hyperbolic_level_one() {
    let m = SchemeFamily::family(Theta::Real(2.0), 3).unwrap().symbol_at(1).unwrap();
    assert_eq!((m.lo, m.hi()), (-5, 5));
    assert!(close(m.get(-5), 0.0064277052219191467686, 1e-15));
    assert!(close(m.get(-3), -0.076835958398160273845, 1e-15));
    assert!(close(m.get(-1), 0.56874630241786773399, 1e-15));
    let oracle = family_oracle_6pt(Theta::Real(2.0), 1);
    assert!(close(oracle.get(5), 0.0064277052219191467686, 1e-15));
}

#[test]
fn dubuc_deslauriers_from_the_product() {
    let b4 = stationary_bspline::<f64>(4);
    let c4 = LaurentPoly::from_real(-1, &[-0.5, 2.0, -0.5]);
    let a = (&b4 * &c4).realize(1e-12).unwrap();
    let want = RealMask::new(-3, vec![-1.0 / 16.0, 0.0, 9.0 / 16.0, 1.0, 9.0 / 16.0, 0.0, -1.0 / 16.0]);
    assert_eq!(a, want);
    assert_eq!(family_oracle_4pt(Theta::Zero, 7), want);
}

#[test]
fn odd_stationary_correction() {
    // c(z) = h(1) + h''(1)/2 (z + 1/z - 2) for h = 2 z^(-1/2) / B_5(z): h(1) = 1, h''(1) = -5/4
    let want = LaurentPoly::from_real(-1, &[-0.625, 2.25, -0.625]);
    assert_eq!(stationary_correction::<f64>(3, 5).unwrap(), want);
    let c = hermite_correction::<Dd>(&GammaSet::polynomial(5).unwrap(), &GammaSet::polynomial(3).unwrap(), 2).unwrap();
    assert!(c.poly.convert::<f64>().sup_distance(&want) < 1e-15);
}

#[test]
fn normalization_reproduces_the_constant_target() {
    // For the rho = 2 family c(z_1) = 2 / B(z_1) = 1 at every level.
    let g = GammaSet::family(Theta::Real(1.0), 2).unwrap();
    for k in 0..6 {
        let b = normalized_symbol::<f64>(&g, Normalization::Auto, k).unwrap().poly;
        let z1 = g.primary_nodes::<f64>(k)[0].z;
        let d = correction_derivatives(&b, z1, 0.0, 2).unwrap();
        assert!((d[0] - Cx::new(1.0, 0.0)).norm() < 1e-14);
    }
}

#[test]
fn stationary_six_point_correction() {
    // 1 + 3 delta + 6 delta^2 with delta = (-z^-1 + 2 - z) / 4
    let want = LaurentPoly::from_real(-2, &[0.375, -2.25, 4.75, -2.25, 0.375]);
    assert!(stationary_correction::<f64>(6, 6).unwrap().sup_distance(&want) < 1e-15);
}
