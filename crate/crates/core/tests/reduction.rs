use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use so3ni::geometry::GroupElement;
use so3ni::lambda::{default_q_grid, random_group_element};
use so3ni::lie::OrbitLabel;
use so3ni::reduction::{
    casimir_eigen_check, coherence_criterion, intertwining_residual, reconstruct_factorized,
    reconstruct_solution, reduced_spectrum, schrodinger_residual, spectrum_distance,
    with_multiplicity, HamiltonianSpec, WignerOracle,
};

fn lab(j: i64) -> OrbitLabel {
    OrbitLabel::new(j).unwrap()
}

/// `−(R D Rᵀ)` with `D` positive diagonal and `R` a random rotation.
fn negative_definite(rng: &mut ChaCha8Rng) -> HamiltonianSpec<f64> {
    let g = random_group_element(rng);
    let r = g.adjoint_matrix();
    let d = [
        rng.gen_range(0.5..2.0),
        rng.gen_range(0.5..2.0),
        rng.gen_range(0.5..2.0),
    ];
    let mut c = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in 0..3 {
            c[a][b] = -(0..3).map(|k| r[a][k] * d[k] * r[b][k]).sum::<f64>();
        }
    }
    for a in 0..3 {
        for b in 0..a {
            c[a][b] = c[b][a];
        }
    }
    HamiltonianSpec::new(c, [0.0; 3]).unwrap()
}

fn away_from_poles(rng: &mut ChaCha8Rng) -> GroupElement<f64> {
    loop {
        let g = random_group_element(rng);
        if g.theta.sin() > 0.1 {
            return g;
        }
    }
}

#[test]
fn spectra_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let specs: Vec<HamiltonianSpec<f64>> = (0..5).map(|_| negative_definite(&mut rng)).collect();
    for j in 1..=3u32 {
        let oracle = WignerOracle::new(j).unwrap();
        let top = HamiltonianSpec::symmetric_top(1.0, 2.0);
        let linear = HamiltonianSpec::new(top.c_ab, [0.3, -0.2, 0.5]).unwrap();
        for spec in specs.iter().chain([&top, &linear]) {
            let reduced = with_multiplicity(&reduced_spectrum(spec, lab(j as i64)).unwrap());
            let truth = oracle.spectrum(spec).unwrap();
            let d = spectrum_distance(&reduced, &truth);
            assert!(d < 1e-6, "j={j}: {d:e}");
        }
    }
}

#[test]
fn spherical_top_j2() {
    let sols = reduced_spectrum(&HamiltonianSpec::symmetric_top(0.5f64, 0.5), lab(2)).unwrap();
    assert!(sols.iter().all(|s| (s.energy.re - 3.0).abs() < 1e-12));
}

#[test]
fn reconstructed_solutions() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for j in 1..=2 {
        let grid = default_q_grid::<f64>(lab(j));
        let spec = negative_definite(&mut rng);
        let sols = reduced_spectrum(&spec, lab(j)).unwrap();
        for sol in &sols {
            let g = away_from_poles(&mut rng);
            let q = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-0.3..0.3));
            let quad = reconstruct_solution(&sol.psi, q, &g, &grid);
            let fact = reconstruct_factorized(&sol.psi, q, &g).unwrap();
            assert!((quad - fact).norm() < 1e-7 * fact.norm().max(1.0));
            let at_e = reconstruct_solution(&sol.psi, q, &GroupElement::identity(), &grid);
            assert!((at_e - sol.psi.eval(q)).norm() < 1e-8);
            assert!(schrodinger_residual(&spec, sol, q, &g, &grid).unwrap() < 1e-4);
            assert!(intertwining_residual(&sol.psi, q, &g, &grid).unwrap() < 1e-6);
            let tol = if j == 1 { 1e-4 } else { 1e-3 };
            assert!(casimir_eigen_check(sol, q, &g, &grid).unwrap() < tol);
        }
    }
}

#[test]
fn coherence_fails_for_complex_polarization() {
    let sols = reduced_spectrum(&HamiltonianSpec::symmetric_top(1.0f64, 2.0), lab(1)).unwrap();
    let q = Complex::new(0.3, 0.1);
    assert!(
        (coherence_criterion(&sols[0], q, &GroupElement::identity()).unwrap() - 1.0).abs() < 1e-12
    );
    let m = coherence_criterion(&sols[0], q, &GroupElement::new(1.0, 0.7, 2.0)).unwrap();
    assert!((m - 1.0).abs() > 1e-3);
}
