use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use so3ni::geometry::{q_action, Axis, GroupElement};
use so3ni::lambda::{
    completeness_check, default_q_grid, delta_j, ell_matrix, factor_kernel, factor_probe_spread,
    kernel_d, kernel_pde_residual, q_plane_grid, random_group_element, QMeasure,
};
use so3ni::lie::OrbitLabel;

fn lab(j: i64) -> OrbitLabel {
    OrbitLabel::new(j).unwrap()
}

fn rq(rng: &mut ChaCha8Rng) -> Complex<f64> {
    Complex::new(rng.gen_range(-1.5..1.5), rng.gen_range(-0.4..0.4))
}

fn away_from_poles(rng: &mut ChaCha8Rng) -> GroupElement<f64> {
    loop {
        let g = random_group_element(rng);
        if g.theta.sin() > 0.05 {
            return g;
        }
    }
}

#[test]
fn convolution_conjugation_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for j in 1..=3 {
        let l = lab(j);
        let grid = default_q_grid::<f64>(l);
        for _ in 0..4 {
            let (g1, g2) = (
                random_group_element(&mut rng),
                random_group_element(&mut rng),
            );
            let (a, b) = (rq(&mut rng), rq(&mut rng));
            let lhs = kernel_d(a, b.conj(), &g1.compose(&g2), l);
            let rhs =
                grid.integrate(|q| kernel_d(a, q.conj(), &g1, l) * kernel_d(q, b.conj(), &g2, l));
            assert!(
                (lhs - rhs).norm() < 1e-7 * lhs.norm().max(1.0),
                "conv j={j}: {lhs} vs {rhs}"
            );
            let c = kernel_d(b, a.conj(), &g1.inverse(), l).conj();
            assert!((kernel_d(a, b.conj(), &g1, l) - c).norm() < 1e-10);
            let e = GroupElement::identity();
            assert!((kernel_d(a, b.conj(), &e, l) - delta_j(a, b.conj(), l)).norm() < 1e-12);
        }
    }
}

#[test]
fn first_order_systems() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (j, tol) in [(1, 1e-5), (2, 1e-4), (3, 1e-4)] {
        for _ in 0..10 {
            let g = away_from_poles(&mut rng);
            let (l, r) = kernel_pde_residual(rq(&mut rng), rq(&mut rng), &g, lab(j)).unwrap();
            assert!(l < tol && r < tol, "j={j}: {l:e} {r:e}");
        }
    }
}

#[test]
fn self_adjoint_under_measure() {
    for j in 1..=5 {
        let grid = default_q_grid::<f64>(lab(j));
        let m = QMeasure::from_grid(&grid);
        assert!(m.hermitian_residual() < 1e-10);
        assert!(m.min_eigenvalue() > 0.0);
        for a in Axis::ALL {
            let op = ell_matrix::<f64>(a, lab(j)) * Complex::new(0.0, -1.0);
            assert!(m.self_adjoint_residual(&op) < 1e-8, "j={j} {a:?}");
        }
    }
}

#[test]
fn factor_is_probe_independent_and_cocycle() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for j in 1..=3 {
        for _ in 0..10 {
            let (g1, g2) = (
                random_group_element(&mut rng),
                random_group_element(&mut rng),
            );
            let q = rq(&mut rng) * 0.6;
            assert!(factor_probe_spread(q, &g1, lab(j)).unwrap() < 1e-9);
            let (u12, _) = factor_kernel(q, &g2.compose(&g1), lab(j)).unwrap();
            let (u1, moved) = factor_kernel(q, &g1, lab(j)).unwrap();
            let (u2, _) = factor_kernel(moved, &g2, lab(j)).unwrap();
            assert!((u12 - u1 * u2).norm() < 1e-8 * u12.norm().max(1.0));
            assert!(
                (q_action(q, &g2.compose(&g1)).unwrap() - q_action(moved, &g2).unwrap()).norm()
                    < 1e-9
            );
        }
    }
    let (u, _) = factor_kernel(
        Complex::new(0.3, 0.1),
        &GroupElement::new(1.0f64, 0.7, 2.0),
        lab(1),
    )
    .unwrap();
    assert!((u.norm() - 1.0).abs() > 1e-3);
}

#[test]
fn finer_grids_agree() {
    let l = lab(2);
    let coarse = QMeasure::from_grid(&q_plane_grid::<f64>(l, 24, 16).unwrap());
    let fine = QMeasure::from_grid(&q_plane_grid::<f64>(l, 64, 32).unwrap());
    assert!((coarse.gram - fine.gram).camax() < 1e-8);
}

#[test]
fn orthogonality_and_completeness() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let rep = completeness_check(2, 2, &mut rng).unwrap();
    assert!(rep.orthogonality_same < 1e-7, "{rep:?}");
    assert!(rep.orthogonality_cross < 1e-9, "{rep:?}");
    assert!(rep.completeness < 1e-7, "{rep:?}");
    assert!(rep.partial_sums.windows(2).all(|w| w[1] > w[0]));
}
