use std::f64::consts::PI;

use proptest::prelude::*;

use shapeinv_core::basis::{self, limit};
use shapeinv_core::numerics::{
    adjointness_defect, eigen_lowest, inner_product, spectrum_numeric, Grid, GridFunction,
    TridiagonalSym,
};
use shapeinv_core::partners::{potential_v, potential_vtilde};
use shapeinv_core::riccati::{
    riccati_residual, solve_z, z_residual, ExtendedReal, RiccatiSolution, SignClass,
};
use shapeinv_core::{Family, FamilyKind, FamilyParams, Jet, Superpotential};

fn sign_class(tag: u8, c: f64) -> SignClass {
    match tag % 3 {
        0 => SignClass::PositiveA { c },
        1 => SignClass::ZeroA,
        _ => SignClass::NegativeA { c },
    }
}

fn far_from_poles(y: &RiccatiSolution, x: f64, gap: f64) -> bool {
    y.poles(x - 1.0, x + 1.0).iter().all(|p| (x - p).abs() >= gap)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn ode_residuals_vanish(
        tag in 0u8..3,
        c in 0.3f64..2.5,
        center in -2.0f64..2.0,
        sel in -3.0f64..3.0,
        b in -3.0f64..3.0,
        d in -3.0f64..3.0,
        x in -4.0f64..4.0,
    ) {
        let sign = sign_class(tag, c);
        let y = RiccatiSolution::new(sign, center, ExtendedReal::Finite(sel)).unwrap();
        prop_assume!(far_from_poles(&y, x, 0.05 / c));
        let z = solve_z(b, &y, d);
        prop_assert!(riccati_residual(&y, sign.a(), x).unwrap().abs() <= 1e-9);
        prop_assert!(z_residual(&y, &z, b, x).unwrap().abs() <= 1e-9);
    }

    #[test]
    fn partner_difference_is_twice_the_derivative(
        tag in 0u8..3,
        inverse in any::<bool>(),
        c in 0.3f64..2.0,
        sel in -2.0f64..2.0,
        forcing in -2.0f64..2.0,
        amplitude in -2.0f64..2.0,
        q in 0.2f64..2.0,
        m in 1.0f64..5.0,
        x in -3.0f64..3.0,
    ) {
        let params = FamilyParams {
            sign: sign_class(tag, c),
            center: 0.0,
            selector: ExtendedReal::Finite(sel),
            forcing,
            amplitude,
            q,
            t: 0.0,
            d: 0.5,
        };
        let kind = if inverse { FamilyKind::InversePower } else { FamilyKind::Affine };
        let f = Family::new(params, kind).unwrap();
        prop_assume!(f.singularities(m, x - 1.0, x + 1.0).iter().all(|p| (x - p).abs() >= 0.05));
        let w = Superpotential::Family(f);
        let diff = potential_vtilde(&w, 0.5, x, m).unwrap() - potential_v(&w, 0.5, x, m).unwrap();
        let k = f.k(x, m).unwrap();
        prop_assert!((diff - 2.0 * k.deriv).abs() <= 1e-9 * (1.0 + k.value * k.value));
    }

    #[test]
    fn inner_product_is_symmetric_and_bilinear(
        f in prop::collection::vec(-10.0f64..10.0, 33),
        g in prop::collection::vec(-10.0f64..10.0, 33),
        h in prop::collection::vec(-10.0f64..10.0, 33),
        a in -5.0f64..5.0,
    ) {
        let grid = Grid::new(0.0, 1.0, 33).unwrap();
        let mk = |v: &Vec<f64>| GridFunction::new(grid, v.clone()).unwrap();
        let (f, g, h) = (mk(&f), mk(&g), mk(&h));
        let fg = inner_product(&f, &g).unwrap();
        prop_assert!((fg - inner_product(&g, &f).unwrap()).abs() <= 1e-12 * (1.0 + fg.abs()));
        let lin = f.zip_with(&h, |x, y| a * x + y).unwrap();
        let lhs = inner_product(&lin, &g).unwrap();
        let rhs = a * fg + inner_product(&h, &g).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + lhs.abs() + rhs.abs()));
    }

    #[test]
    fn small_eigenproblems_match_characteristic_polynomial(
        diag in prop::collection::vec(-5.0f64..5.0, 1..=3),
        off in prop::collection::vec(-3.0f64..3.0, 2),
    ) {
        let n = diag.len();
        let off: Vec<f64> = off.into_iter().take(n - 1).collect();
        let t = TridiagonalSym::new(diag.clone(), off.clone()).unwrap();
        let values: Vec<f64> = eigen_lowest(&t, n).unwrap().into_iter().map(|e| e.value).collect();
        let charpoly = |l: f64| -> f64 {
            match n {
                1 => diag[0] - l,
                2 => (diag[0] - l) * (diag[1] - l) - off[0] * off[0],
                _ => {
                    (diag[0] - l) * ((diag[1] - l) * (diag[2] - l) - off[1] * off[1])
                        - off[0] * off[0] * (diag[2] - l)
                }
            }
        };
        let scale = 1.0 + diag.iter().chain(&off).map(|v| v.abs()).sum::<f64>();
        for w in values.windows(2) {
            prop_assert!(w[0] <= w[1]);
        }
        for l in &values {
            prop_assert!(charpoly(*l).abs() <= 1e-10 * scale.powi(n as i32));
        }
    }

    #[test]
    fn large_selector_recovers_limit_basis(
        c in 0.3f64..2.0,
        x in -2.0f64..2.0,
    ) {
        let big = 1e7;
        let (fp, hp) = (basis::f_plus(x, 0.0, big, c).unwrap(), basis::h_plus(x, 0.0, big, c).unwrap());
        prop_assert!((fp.value - limit::f_plus(x, 0.0, c).unwrap().value).abs() <= 1e-6);
        prop_assert!((big * hp.value - limit::h_plus(x, 0.0, c).unwrap().value).abs() <= 1e-6);
        let u = c * x;
        prop_assume!(u.cos().abs() > 0.2);
        let (fm, hm) = (basis::f_minus(x, 0.0, big, c).unwrap(), basis::h_minus(x, 0.0, big, c).unwrap());
        prop_assert!((fm.value - limit::f_minus(x, 0.0, c).unwrap().value).abs() <= 1e-5);
        prop_assert!((big * hm.value - limit::h_minus(x, 0.0, c).unwrap().value).abs() <= 1e-5);
        prop_assume!(x.abs() > 0.2);
        let f0 = basis::f_zero(x, 0.0, big).unwrap();
        let h0 = basis::h_zero(x, 0.0, big).unwrap();
        prop_assert!((big * f0.value - limit::f_zero(x, 0.0).unwrap().value).abs() <= 1e-5);
        prop_assert!((h0.value - limit::h_zero(x, 0.0).unwrap().value).abs() <= 1e-6);
    }

    #[test]
    fn shift_of_l_cancels_in_r(
        t in -100.0f64..100.0,
        u in 0.5f64..6.0,
        inverse in any::<bool>(),
    ) {
        let kind = if inverse { FamilyKind::InversePower } else { FamilyKind::Affine };
        let mk = |t: f64| {
            let mut p = FamilyParams::new(SignClass::PositiveA { c: 1.0 }, 0.0, ExtendedReal::Infinity);
            p.forcing = 0.3;
            p.q = 0.7;
            p.t = t;
            Family::new(p, kind).unwrap()
        };
        prop_assert_eq!(mk(t).R(u).unwrap(), mk(0.0).R(u).unwrap());
    }
}

#[test]
fn constant_k1_inverse_member_is_trivial() {
    for b in [1.0, -1.0] {
        let p = FamilyParams::new(SignClass::PositiveA { c: 1.0 }, 0.0, ExtendedReal::Finite(b));
        let f = Family::new(FamilyParams { q: 1.0, ..p }, FamilyKind::InversePower).unwrap();
        assert!(f.is_trivial());
        assert!(f.require_nontrivial().is_err());
    }
    let p = FamilyParams::new(SignClass::ZeroA, 0.0, ExtendedReal::Finite(0.0));
    let f = Family::new(FamilyParams { q: 1.0, ..p }, FamilyKind::InversePower).unwrap();
    assert!(f.is_trivial());
    let p = FamilyParams::new(SignClass::PositiveA { c: 1.0 }, 0.0, ExtendedReal::Infinity);
    let f = Family::new(FamilyParams { q: 1.0, ..p }, FamilyKind::InversePower).unwrap();
    assert!(!f.is_trivial());
}

#[test]
fn box_spectrum_is_second_order() {
    let errors: Vec<f64> = [251, 501, 1001, 2001]
        .iter()
        .map(|&n| {
            let g = Grid::new(0.0, PI, n).unwrap();
            let l = spectrum_numeric(&|_| Ok(0.0), &g, 3).unwrap();
            (l[2].energy - 9.0).abs()
        })
        .collect();
    for w in errors.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.8..4.2).contains(&ratio), "{ratio}");
    }
}

#[test]
fn adjointness_defect_is_at_least_fourth_order() {
    let w = Superpotential::custom(|x, _| Ok(Jet::new(x.sin() + 0.5 * x, x.cos() + 0.5)));
    let defect = |n: usize| {
        let g = Grid::new(-6.0, 6.0, n).unwrap();
        let bump = |x: f64, c: f64, r: f64| {
            let u = (x - c) / r;
            if u.abs() < 1.0 { (1.0 - u * u).powi(5) } else { 0.0 }
        };
        let phi = GridFunction::from_fn(g, |x| Ok(bump(x, 0.3137, 2.1))).unwrap();
        let psi = GridFunction::from_fn(g, |x| Ok(x * bump(x, -0.4213, 2.6))).unwrap();
        adjointness_defect(&w, 0.0, &phi, &psi).unwrap()
    };
    let d: Vec<f64> = [101, 201, 401, 801].iter().map(|&n| defect(n)).collect();
    // each halving of h gains at least h^4 (16x, with slack) until rounding
    for pair in d.windows(2) {
        assert!(pair[1] <= (pair[0] / 10.0).max(1e-11), "{d:?}");
    }
    assert!(d[0] > 1e-9, "{d:?}");
}
