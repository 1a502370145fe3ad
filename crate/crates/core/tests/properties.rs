use nalgebra::DMatrix;
use num_complex::Complex;
use proptest::prelude::*;

use so3ni::coherent::{cs_coeffs, zeta_action, zeta_of_q, CSLabel};
use so3ni::geometry::{h_factor, q_action, sphere_action, to_su2, GroupElement, SpherePoint};
use so3ni::lambda::{delta_j, kernel_closed_form, kernel_d, QFunction};
use so3ni::lie::{casimir_value, coadjoint_apply, Covector, OrbitLabel};
use so3ni::special::{small_d_matrix, wigner_matrix};

use std::f64::consts::{PI, TAU};

type C = Complex<f64>;

fn lab(j: u32) -> OrbitLabel {
    OrbitLabel::new(j as i64).unwrap()
}

prop_compose! {
    fn element()(phi in 0.0..TAU, c in -1.0f64..1.0, psi in 0.0..TAU) -> GroupElement<f64> {
        GroupElement::new(phi, c.acos(), psi)
    }
}

prop_compose! {
    fn interior_element()(phi in 0.0..TAU, theta in 0.05..PI - 0.05, psi in 0.0..TAU) -> GroupElement<f64> {
        GroupElement::new(phi, theta, psi)
    }
}

prop_compose! {
    fn sphere_point()(phi in 0.0..TAU, c in -1.0f64..1.0) -> SpherePoint<f64> {
        SpherePoint::new(phi, c.acos())
    }
}

prop_compose! {
    fn strip_q()(re in -3.0..3.0, im in -0.5..0.5) -> C {
        C::new(re, im)
    }
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn su2_factors_are_unitary(phi in -20.0..20.0, theta in -20.0..20.0, psi in -20.0..20.0) {
        prop_assert!(to_su2(phi, theta, psi).unitarity_residual() < 1e-14);
    }

    #[test]
    fn coordinates_round_trip_off_the_poles(g in interior_element()) {
        let back = GroupElement::try_from_su2(&g.lift()).unwrap();
        prop_assert!((back.theta - g.theta).abs() < 1e-10);
        prop_assert!(angle_gap(back.phi, g.phi) < 1e-10);
        prop_assert!(angle_gap(back.psi, g.psi) < 1e-10);
    }

    #[test]
    fn composition_is_associative(a in element(), b in element(), c in element()) {
        prop_assert!(a.compose(&b).compose(&c).distance(&a.compose(&b.compose(&c))) < 1e-10);
    }

    #[test]
    fn inverse_cancels(a in element()) {
        let e = GroupElement::identity();
        prop_assert!(a.compose(&a.inverse()).distance(&e) < 1e-10);
        prop_assert!(a.inverse().compose(&a).distance(&e) < 1e-10);
    }

    #[test]
    fn wigner_matrices_are_unitary(g in element(), j in 1u32..=6) {
        let d = wigner_matrix(j, &g);
        let n = d.nrows();
        prop_assert!((&d * d.adjoint() - DMatrix::<C>::identity(n, n)).camax() < 1e-12);
    }

    #[test]
    fn wigner_composition_law(g1 in element(), g2 in element(), j in 1u32..=4) {
        let e = wigner_matrix(j, &GroupElement::identity());
        let lhs = wigner_matrix(j, &g1.compose(&g2));
        let rhs = wigner_matrix(j, &g2) * e.transpose() * wigner_matrix(j, &g1);
        prop_assert!((lhs - rhs).camax() < 1e-9);
    }

    #[test]
    fn small_d_is_orthogonal(theta in 0.0..PI, j in 1u32..=8) {
        let d = small_d_matrix(j, theta);
        let n = d.nrows();
        prop_assert!((&d * d.transpose() - DMatrix::<f64>::identity(n, n)).amax() < 1e-12);
    }

    #[test]
    fn casimir_is_coadjoint_invariant(g in element(), f in prop::array::uniform3(-5.0..5.0f64)) {
        let ad: Vec<Vec<f64>> = g.adjoint_matrix().iter().map(|r| r.to_vec()).collect();
        let f = Covector(f.to_vec());
        let k0 = casimir_value(&f).unwrap();
        let k1 = casimir_value(&coadjoint_apply(&ad, &f).unwrap()).unwrap();
        prop_assert!((k1 - k0).abs() <= 1e-12 * k0.max(1.0));
    }

    #[test]
    fn sphere_action_composes(x in sphere_point(), g1 in element(), g2 in element()) {
        let two = sphere_action(&sphere_action(&x, &g1), &g2);
        prop_assert!(two.distance(&sphere_action(&x, &g1.compose(&g2))) < 1e-9);
    }

    #[test]
    fn h_factor_is_a_cocycle(x in sphere_point(), g1 in element(), g2 in element()) {
        let lhs = h_factor(&x, &g1.compose(&g2)).unwrap();
        let rhs = h_factor(&x, &g1).unwrap() + h_factor(&sphere_action(&x, &g1), &g2).unwrap();
        prop_assert!(angle_gap(lhs, rhs) < 1e-8);
    }

    #[test]
    fn q_action_composes_modulo_two_pi(q in strip_q(), g1 in element(), g2 in element()) {
        let lhs = q_action(q_action(q, &g1).unwrap(), &g2).unwrap();
        let rhs = q_action(q, &g2.compose(&g1)).unwrap();
        let d = lhs - rhs;
        let k = (d.re / TAU).round();
        prop_assert!((d - C::new(k * TAU, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn zeta_and_q_actions_agree(q in strip_q(), g in element()) {
        let a = zeta_action(zeta_of_q(q), &g).unwrap();
        let b = zeta_of_q(q_action(q, &g).unwrap());
        prop_assert!((a - b).norm() <= 1e-9 * b.norm().max(1.0));
    }

    #[test]
    fn coherent_states_are_normalised(re in -4.0..4.0, im in -4.0..4.0, j in 1u32..=8) {
        let cs = CSLabel::new(lab(j), C::new(re, im)).unwrap();
        let s: f64 = cs_coeffs(&cs).iter().map(|u| u.norm_sqr()).sum();
        prop_assert!((s - 1.0).abs() < 1e-13);
    }

    #[test]
    fn kernel_at_identity_is_the_delta(a in strip_q(), b in strip_q(), j in 1u32..=5) {
        let e = GroupElement::identity();
        let want = delta_j(a, b, lab(j));
        prop_assert!((kernel_closed_form(a, b, &e, lab(j)) - want).norm() <= 1e-12 * want.norm().max(1.0));
    }

    #[test]
    fn kernel_conjugation(a in strip_q(), b in strip_q(), g in element(), j in 1u32..=3) {
        let lhs = kernel_d(a, b.conj(), &g, lab(j));
        let rhs = kernel_d(b, a.conj(), &g.inverse(), lab(j)).conj();
        prop_assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0));
    }

    #[test]
    fn q_functions_round_trip_through_samples(
        coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 5),
    ) {
        let psi = QFunction::new(lab(2), coeffs.iter().map(|&(r, i)| C::new(r, i)).collect()).unwrap();
        let again = QFunction::from_fn(lab(2), |q| psi.eval(q));
        prop_assert!((&again.coeffs - &psi.coeffs).camax() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn single_precision_group_law(phi in 0.0..6.28f32, c in -1.0..1.0f32, psi in 0.0..6.28f32) {
        let g = GroupElement::<f32>::new(phi, c.acos(), psi);
        let e = GroupElement::<f32>::identity();
        prop_assert!(g.compose(&g.inverse()).distance(&e) < 1e-3);
        let d = wigner_matrix(2, &g);
        prop_assert!((&d * d.adjoint() - DMatrix::<Complex<f32>>::identity(5, 5)).camax() < 1e-4);
    }
}
