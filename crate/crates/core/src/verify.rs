//! Verification suites: every module invariant as a named, seeded check
//! producing a [`VerificationReport`].

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::coherent::{
    cs_coeffs, cs_transport_ratios, cs_wavefunction, harmonic_from_overlaps, ni_state,
    ni_state_from_expansion, ni_state_on_group, ni_to_cs, ni_transport_residual,
    regeneration_residual, wigner_from_kernel_matrix, zeta_action, zeta_of_q, CSLabel,
    NIStateLabel,
};
use crate::error::{Error, Result};
use crate::geometry::{
    casimir_apply, field_commutator, h_factor, haar_grid, left_field_apply, q_action,
    right_field_apply, sphere_action, sphere_casimir_apply, sphere_generator_apply, sphere_grid,
    sphere_transport_to, wrap_angle, Axis, Field, GroupElement, SpherePoint,
};
use crate::lambda::{
    casimir_lambda, completeness_check, default_q_grid, delta_j, ell_matrix, factor_kernel,
    factor_probe_spread, kernel_d, kernel_pde_residual, random_group_element, QFunction, QMeasure,
};
use crate::lie::{
    casimir_value, coadjoint_apply, poisson_lie_bracket, validate_structure, Covector, OrbitLabel,
    StructureConstants,
};
use crate::quadrature::gauss_legendre;
use crate::reduction::{
    casimir_eigen_check, coherence_criterion, intertwining_residual, reconstruct_factorized,
    reconstruct_solution, reduced_spectrum, schrodinger_residual, spectrum_distance,
    with_multiplicity, HamiltonianSpec, WignerOracle,
};
use crate::special::{small_d, small_d_matrix, spherical_y, wigner_d, wigner_matrix, WignerIndex};

/// Outcome of one check.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct VerificationReport {
    pub check_name: String,
    pub parameters: BTreeMap<String, Value>,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub runtime_ms: f64,
}

/// Module suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    Lie,
    Geometry,
    Lambda,
    Wigner,
    Bridge,
    Reduction,
    All,
}

impl Suite {
    pub const MODULES: [Suite; 6] = [
        Suite::Lie,
        Suite::Geometry,
        Suite::Lambda,
        Suite::Wigner,
        Suite::Bridge,
        Suite::Reduction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lie => "lie",
            Suite::Geometry => "geometry",
            Suite::Lambda => "lambda",
            Suite::Wigner => "wigner",
            Suite::Bridge => "bridge",
            Suite::Reduction => "reduction",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "lie" => Suite::Lie,
            "geometry" => Suite::Geometry,
            "lambda" => Suite::Lambda,
            "wigner" => Suite::Wigner,
            "bridge" => Suite::Bridge,
            "reduction" => Suite::Reduction,
            "all" => Suite::All,
            other => return Err(Error::Invalid(format!("unknown suite '{other}'"))),
        })
    }
}

/// Run-wide settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Largest orbit label used by the kernel, bridge and reduction checks.
    pub jmax: u32,
    /// Points per coordinate of the Haar grid used for Wigner orthogonality.
    pub grid: usize,
    pub tol_scale: f64,
    /// Record wall-clock times. Off by default so reports are reproducible
    /// byte for byte; `runtime_ms` is then 0.
    pub timings: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            jmax: 3,
            grid: 64,
            tol_scale: 1.0,
            timings: false,
        }
    }
}

type Params = BTreeMap<String, Value>;

type CheckFn = Box<dyn Fn(&mut ChaCha8Rng, &VerifyConfig) -> Result<(f64, Params)> + Send + Sync>;

struct Check {
    name: &'static str,
    tolerance: f64,
    run: CheckFn,
}

fn check<F>(name: &'static str, tolerance: f64, run: F) -> Check
where
    F: Fn(&mut ChaCha8Rng, &VerifyConfig) -> Result<(f64, Params)> + Send + Sync + 'static,
{
    Check {
        name,
        tolerance,
        run: Box::new(run),
    }
}

fn params(pairs: &[(&str, Value)]) -> Params {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

/// Per-check stream: independent of scheduling and of which other checks run.
fn check_seed(seed: u64, name: &str) -> u64 {
    name.bytes().fold(seed ^ 0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

fn lab(j: u32) -> OrbitLabel {
    OrbitLabel::new(j as i64).expect("orbit labels in suites are positive")
}

fn rq(rng: &mut ChaCha8Rng, re: f64, im: f64) -> Complex<f64> {
    Complex::new(rng.gen_range(-re..re), rng.gen_range(-im..im))
}

fn rsphere(rng: &mut ChaCha8Rng) -> SpherePoint<f64> {
    SpherePoint::new(
        rng.gen_range(0.0..std::f64::consts::TAU),
        rng.gen_range(-1.0f64..1.0).acos(),
    )
}

/// Haar sample with `sin θ > s`, for finite-difference checks.
fn interior(rng: &mut ChaCha8Rng, s: f64) -> GroupElement<f64> {
    loop {
        let g = random_group_element(rng);
        if g.theta.sin() > s {
            return g;
        }
    }
}

fn interior_sphere(rng: &mut ChaCha8Rng, s: f64) -> SpherePoint<f64> {
    loop {
        let x = rsphere(rng);
        if x.theta.sin() > s {
            return x;
        }
    }
}

fn rel(a: Complex<f64>, b: Complex<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

fn angle_diff(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(std::f64::consts::TAU - d)
}

fn negative_definite(rng: &mut ChaCha8Rng) -> HamiltonianSpec<f64> {
    let r = random_group_element(rng).adjoint_matrix();
    let d = [
        rng.gen_range(0.5..2.0),
        rng.gen_range(0.5..2.0),
        rng.gen_range(0.5..2.0),
    ];
    let mut c = [[0.0; 3]; 3];
    for a in 0..3 {
        for b in a..3 {
            let v = -(0..3).map(|k| r[a][k] * d[k] * r[b][k]).sum::<f64>();
            c[a][b] = v;
            c[b][a] = v;
        }
    }
    HamiltonianSpec {
        c_ab: c,
        c_a: [0.0; 3],
    }
}

fn lie_checks() -> Vec<Check> {
    vec![
        check("lie.so3_structure_valid", 0.0, |_, _| {
            let r = validate_structure(&StructureConstants::<f64>::so3());
            let residual = if r.pass() {
                r.max_residual()
            } else {
                f64::INFINITY
            };
            Ok((residual, params(&[("dim", json!(3))])))
        }),
        check("lie.abelian_structure_valid", 0.0, |_, _| {
            let r = validate_structure(&StructureConstants::<f64>::zeros(3));
            Ok((
                if r.pass() {
                    r.max_residual()
                } else {
                    f64::INFINITY
                },
                params(&[("dim", json!(3))]),
            ))
        }),
        check("lie.perturbations_rejected", 0.0, |rng, _| {
            let count = 20;
            let mut accepted = 0;
            for k in 0..count {
                let mut c = StructureConstants::<f64>::so3();
                if k % 2 == 0 {
                    let (a, b, e) = (
                        rng.gen_range(0..3),
                        rng.gen_range(0..3),
                        rng.gen_range(0..3),
                    );
                    c.set(a, b, e, c.get(a, b, e) + rng.gen_range(0.1..1.0));
                } else {
                    for a in 0..3 {
                        for b in 0..a {
                            for e in 0..3 {
                                let d = rng.gen_range(-0.5..0.5);
                                c.set(a, b, e, c.get(a, b, e) + d);
                                c.set(b, a, e, c.get(b, a, e) - d);
                            }
                        }
                    }
                }
                if validate_structure(&c).pass() {
                    accepted += 1;
                }
            }
            Ok((accepted as f64, params(&[("perturbations", json!(count))])))
        }),
        check("lie.bracket_cyclic", 1e-12, |rng, _| {
            let c = StructureConstants::<f64>::so3();
            let mut worst = 0.0f64;
            for _ in 0..50 {
                let f = Covector((0..3).map(|_| rng.gen_range(-3.0..3.0)).collect());
                for a in 0..3 {
                    for b in 0..3 {
                        let (mut ga, mut gb) = (vec![0.0; 3], vec![0.0; 3]);
                        ga[a] = 1.0;
                        gb[b] = 1.0;
                        let v = poisson_lie_bracket(&c, &ga, &gb, &f)?;
                        let want: f64 = (0..3).map(|k| c.get(a, b, k) * f.0[k]).sum();
                        worst = worst.max((v - want).abs());
                    }
                }
                // the Casimir is central
                let g1: Vec<f64> = f.0.iter().map(|x| 2.0 * x).collect();
                for b in 0..3 {
                    let mut gb = vec![0.0; 3];
                    gb[b] = 1.0;
                    worst = worst.max(poisson_lie_bracket(&c, &g1, &gb, &f)?.abs());
                }
            }
            Ok((worst, params(&[("samples", json!(50))])))
        }),
        check("lie.casimir_coadjoint_invariant", 1e-12, |rng, _| {
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let g = random_group_element(rng);
                let ad: Vec<Vec<f64>> = g.adjoint_matrix().iter().map(|r| r.to_vec()).collect();
                let f = Covector((0..3).map(|_| rng.gen_range(-3.0..3.0)).collect());
                let k0 = casimir_value(&f)?;
                worst = worst
                    .max((casimir_value(&coadjoint_apply(&ad, &f)?)? - k0).abs() / k0.max(1.0));
            }
            Ok((worst, params(&[("samples", json!(100))])))
        }),
        check("lie.coadjoint_composition", 1e-12, |rng, _| {
            let mut worst = 0.0f64;
            for _ in 0..50 {
                let (g1, g2) = (random_group_element(rng), random_group_element(rng));
                let m = |g: &GroupElement<f64>| -> Vec<Vec<f64>> {
                    g.adjoint_matrix().iter().map(|r| r.to_vec()).collect()
                };
                let f = Covector((0..3).map(|_| rng.gen_range(-3.0..3.0)).collect());
                let two = coadjoint_apply(&m(&g1), &coadjoint_apply(&m(&g2), &f)?)?;
                let one = coadjoint_apply(&m(&g1.compose(&g2)), &f)?;
                worst = worst.max(
                    two.0
                        .iter()
                        .zip(&one.0)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max),
                );
            }
            Ok((worst, params(&[("samples", json!(50))])))
        }),
    ]
}

fn test_function(g: &GroupElement<f64>) -> Complex<f64> {
    let idx = WignerIndex { j: 2, m: 1, n: -1 };
    wigner_d(idx, g).unwrap_or_default()
        + wigner_d(WignerIndex { j: 1, m: 0, n: 1 }, g).unwrap_or_default() * 0.7
}

fn geometry_checks() -> Vec<Check> {
    vec![
        check("geometry.su2_unitarity", 1e-14, |rng, _| {
            let mut worst = 0.0f64;
            for _ in 0..1000 {
                let u = crate::geometry::to_su2(
                    rng.gen_range(-10.0..10.0),
                    rng.gen_range(-10.0..10.0),
                    rng.gen_range(-10.0..10.0),
                );
                worst = worst.max(u.unitarity_residual());
            }
            Ok((worst, params(&[("samples", json!(1000))])))
        }),
        check("geometry.su2_homomorphism", 1e-12, |rng, _| {
            let mut worst = 0.0f64;
            for _ in 0..200 {
                let (g1, g2) = (random_group_element(rng), random_group_element(rng));
                let lhs = g1.compose(&g2).lift();
                worst = worst.max(lhs.projective_distance(&g1.lift().mul(&g2.lift())));
            }
            Ok((worst, params(&[("samples", json!(200))])))
        }),
        check("geometry.group_axioms", 1e-10, |rng, _| {
            let e = GroupElement::identity();
            let mut worst = 0.0f64;
            for _ in 0..200 {
                let (a, b, c) = (
                    random_group_element(rng),
                    random_group_element(rng),
                    random_group_element(rng),
                );
                worst = worst
                    .max(
                        a.compose(&b)
                            .compose(&c)
                            .distance(&a.compose(&b.compose(&c))),
                    )
                    .max(a.compose(&e).distance(&a))
                    .max(e.compose(&a).distance(&a))
                    .max(a.compose(&a.inverse()).distance(&e));
            }
            Ok((worst, params(&[("samples", json!(200))])))
        }),
        check("geometry.left_commutator", 1e-4, |rng, _| {
            let mut worst = 0.0f64;
            for _ in 0..50 {
                let g = interior(rng, 0.2);
                for (a, b, c) in [
                    (Axis::One, Axis::Two, Axis::Three),
                    (Axis::Two, Axis::Three, Axis::One),
                    (Axis::Three, Axis::One, Axis::Two),
                ] {
                    let lhs = field_commutator(Field::Left(a), Field::Left(b), &test_function, &g)?;
                    worst = worst.max((lhs - left_field_apply(c, &test_function, &g)?).norm());
                    let lhs =
                        field_commutator(Field::Right(a), Field::Right(b), &test_function, &g)?;
                    worst = worst.max((lhs - right_field_apply(c, &test_function, &g)?).norm());
                }
            }
            Ok((
                worst,
                params(&[("samples", json!(50)), ("step", json!(1e-4))]),
            ))
        }),
        check("geometry.left_right_commute", 1e-4, |rng, _| {
            let mut worst = 0.0f64;
            for _ in 0..20 {
                let g = interior(rng, 0.2);
                for a in Axis::ALL {
                    for b in Axis::ALL {
                        worst = worst.max(
                            field_commutator(Field::Left(a), Field::Right(b), &test_function, &g)?
                                .norm(),
                        );
                    }
                }
            }
            Ok((
                worst,
                params(&[("samples", json!(20)), ("step", json!(1e-4))]),
            ))
        }),
        check("geometry.haar_weights", 1e-12, |_, cfg| {
            let n = cfg.grid.min(32);
            let grid = haar_grid::<f64>(n, n, n)?;
            let w = (grid.weight_sum() - 1.0).abs();
            let c = grid.integrate(|g| Complex::new(g.theta.cos(), 0.0)).norm();
            let d = (grid
                .integrate(|g| {
                    Complex::new(
                        wigner_d(WignerIndex { j: 1, m: 0, n: 0 }, g)
                            .map(|z| z.norm_sqr())
                            .unwrap_or(f64::NAN),
                        0.0,
                    )
                })
                .re
                - 1.0 / 3.0)
                .abs();
            Ok((w.max(c).max(d), params(&[("grid", json!(n))])))
        }),
        check("geometry.sphere_action_composition", 1e-9, |rng, _| {
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let x = rsphere(rng);
                let (g1, g2) = (random_group_element(rng), random_group_element(rng));
                worst = worst.max(
                    sphere_action(&sphere_action(&x, &g1), &g2)
                        .distance(&sphere_action(&x, &g1.compose(&g2))),
                );
                worst = worst.max(sphere_action(&x, &GroupElement::identity()).distance(&x));
            }
            let x0 = SpherePoint::new(0.0, std::f64::consts::FRAC_PI_2);
            let grid = sphere_grid::<f64>(12, 12)?;
            for x in &grid.nodes {
                worst = worst.max(sphere_action(&x0, &sphere_transport_to(x)).distance(x) * 1e-1);
            }
            Ok((worst, params(&[("samples", json!(100))])))
        }),
        check("geometry.h_factor_cocycle", 1e-9, |rng, _| {
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let x = rsphere(rng);
                let (g1, g2) = (random_group_element(rng), random_group_element(rng));
                let lhs = h_factor(&x, &g1.compose(&g2))?;
                let rhs = h_factor(&x, &g1)? + h_factor(&sphere_action(&x, &g1), &g2)?;
                worst = worst.max(angle_diff(lhs, rhs));
                // recomposition s(x) g = e^{ψ_h e3} s(x∘g)
                let back = GroupElement::about_e3(h_factor(&x, &g1)?)
                    .compose(&sphere_action(&x, &g1).section());
                worst = worst.max(back.distance(&x.section().compose(&g1)));
            }
            Ok((worst, params(&[("samples", json!(100))])))
        }),
        check("geometry.q_action_composition", 1e-9, |rng, _| {
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let q = rq(rng, 1.5, 0.4);
                let (g1, g2) = (random_group_element(rng), random_group_element(rng));
                let lhs = q_action(q_action(q, &g1)?, &g2)?;
                let rhs = q_action(q, &g2.compose(&g1))?;
                // q is defined modulo 2π
                let d = lhs - rhs;
                let k = (d.re / std::f64::consts::TAU).round();
                worst = worst.max((d - Complex::new(k * std::f64::consts::TAU, 0.0)).norm());
            }
            Ok((worst, params(&[("samples", json!(100))])))
        }),
        check("geometry.sphere_generators", 1e-5, |rng, _| {
            let mut worst = 0.0f64;
            for _ in 0..20 {
                let x = interior_sphere(rng, 0.2);
                for j in 1..=3u32 {
                    for m in -(j as i32)..=(j as i32) {
                        let y = |p: &SpherePoint<f64>| spherical_y(j, m, p).unwrap_or_default();
                        let v = y(&x);
                        let k = sphere_casimir_apply(&y, &x)?;
                        worst = worst.max(rel(k, v * (j * (j + 1)) as f64));
                        let x1 =
                            sphere_generator_apply(Axis::One, &y, &x)? * Complex::new(0.0, -1.0);
                        worst = worst.max(rel(x1, v * m as f64));
                    }
                }
            }
            Ok((worst, params(&[("samples", json!(20)), ("jmax", json!(3))])))
        }),
    ]
}

fn lambda_checks() -> Vec<Check> {
    vec![
        check("lambda.ell_commutators", 1e-12, |_, _| {
            let mut worst = 0.0f64;
            for j in 1..=10 {
                let l: Vec<DMatrix<Complex<f64>>> =
                    Axis::ALL.iter().map(|a| ell_matrix(*a, lab(j))).collect();
                for (a, b, c) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
                    worst = worst.max((&l[a] * &l[b] - &l[b] * &l[a] - &l[c]).camax());
                }
            }
            Ok((worst, params(&[("jmax", json!(10))])))
        }),
        check("lambda.casimir", 1e-12, |_, _| {
            let mut worst = 0.0f64;
            for j in 1..=10 {
                let k = casimir_lambda::<f64>(lab(j));
                let id = DMatrix::<Complex<f64>>::identity(k.nrows(), k.ncols())
                    * Complex::new((j * (j + 1)) as f64, 0.0);
                worst = worst.max((k - id).camax());
            }
            Ok((worst, params(&[("jmax", json!(10))])))
        }),
        check("lambda.self_adjoint", 1e-8, |_, cfg| {
            let top = cfg.jmax.max(5);
            let mut worst = 0.0f64;
            for j in 1..=top {
                let m = QMeasure::from_grid(&default_q_grid::<f64>(lab(j)));
                if m.min_eigenvalue() <= 0.0 {
                    return Ok((f64::INFINITY, params(&[("j", json!(j))])));
                }
                worst = worst.max(m.hermitian_residual());
                for a in Axis::ALL {
                    worst = worst.max(
                        m.self_adjoint_residual(&(ell_matrix(a, lab(j)) * Complex::new(0.0, -1.0))),
                    );
                }
            }
            Ok((worst, params(&[("jmax", json!(top))])))
        }),
        check("lambda.reproducing", 1e-8, |rng, cfg| {
            let mut worst = 0.0f64;
            for j in 1..=cfg.jmax {
                let grid = default_q_grid::<f64>(lab(j));
                for _ in 0..3 {
                    let q0 = rq(rng, 1.5, 0.4);
                    for n in -(j as i32)..=(j as i32) {
                        let e = QFunction::<f64>::basis(lab(j), n)?;
                        let v = grid.integrate(|qp| delta_j(q0, qp.conj(), lab(j)) * e.eval(qp));
                        worst = worst.max(rel(v, e.eval(q0)));
                    }
                }
            }
            Ok((worst, params(&[("jmax", json!(cfg.jmax))])))
        }),
        check("lambda.kernel_convolution", 1e-7, |rng, cfg| {
            let mut worst = 0.0f64;
            for j in 1..=cfg.jmax.min(3) {
                let grid = default_q_grid::<f64>(lab(j));
                for _ in 0..20 {
                    let (g1, g2) = (random_group_element(rng), random_group_element(rng));
                    let (a, b) = (rq(rng, 1.5, 0.4), rq(rng, 1.5, 0.4));
                    let lhs = kernel_d(a, b.conj(), &g1.compose(&g2), lab(j));
                    let rhs = grid.integrate(|q| {
                        kernel_d(a, q.conj(), &g1, lab(j)) * kernel_d(q, b.conj(), &g2, lab(j))
                    });
                    worst = worst.max(rel(rhs, lhs));
                }
            }
            Ok((
                worst,
                params(&[("jmax", json!(cfg.jmax.min(3))), ("samples", json!(20))]),
            ))
        }),
        check("lambda.kernel_conjugation", 1e-10, |rng, cfg| {
            let mut worst = 0.0f64;
            for j in 1..=cfg.jmax.min(3) {
                for _ in 0..20 {
                    let g = random_group_element(rng);
                    let (a, b) = (rq(rng, 1.5, 0.4), rq(rng, 1.5, 0.4));
                    let lhs = kernel_d(a, b.conj(), &g, lab(j));
                    worst = worst.max(rel(lhs, kernel_d(b, a.conj(), &g.inverse(), lab(j)).conj()));
                }
            }
            Ok((
                worst,
                params(&[("jmax", json!(cfg.jmax.min(3))), ("samples", json!(20))]),
            ))
        }),
        check("lambda.kernel_identity", 1e-12, |rng, cfg| {
            let mut worst = 0.0f64;
            let e = GroupElement::identity();
            for j in 1..=cfg.jmax.min(3) {
                for _ in 0..100 {
                    let (a, b) = (rq(rng, 1.5, 0.4), rq(rng, 1.5, 0.4));
                    worst = worst.max(rel(kernel_d(a, b, &e, lab(j)), delta_j(a, b, lab(j))));
                }
            }
            Ok((worst, params(&[("samples", json!(100))])))
        }),
        check("lambda.kernel_pde_j1", 1e-5, |rng, _| pde_check(rng, 1)),
        check("lambda.kernel_pde_j3", 1e-4, |rng, _| pde_check(rng, 3)),
        check("lambda.factor_probe_independence", 1e-9, |rng, cfg| {
            let mut worst = 0.0f64;
            for j in 1..=cfg.jmax.min(3) {
                for _ in 0..20 {
                    worst = worst.max(factor_probe_spread(
                        rq(rng, 0.9, 0.25),
                        &random_group_element(rng),
                        lab(j),
                    )?);
                }
            }
            Ok((
                worst,
                params(&[("probes", json!(crate::lambda::FACTOR_PROBES.len()))]),
            ))
        }),
        check("lambda.factor_cocycle", 1e-8, |rng, cfg| {
            let mut worst = 0.0f64;
            for j in 1..=cfg.jmax.min(3) {
                for _ in 0..20 {
                    let (g1, g2) = (random_group_element(rng), random_group_element(rng));
                    let q = rq(rng, 0.9, 0.25);
                    let (u12, _) = factor_kernel(q, &g2.compose(&g1), lab(j))?;
                    let (u1, moved) = factor_kernel(q, &g1, lab(j))?;
                    let (u2, _) = factor_kernel(moved, &g2, lab(j))?;
                    worst = worst.max(rel(u1 * u2, u12));
                }
            }
            Ok((worst, params(&[("samples", json!(20))])))
        }),
        check("lambda.orthogonality_same_orbit", 1e-7, |rng, _| {
            let r = completeness_check(2, 2, rng)?;
            Ok((
                r.orthogonality_same,
                params(&[("jmax", json!(2)), ("samples", json!(2))]),
            ))
        }),
        check("lambda.orthogonality_cross_orbit", 1e-9, |rng, _| {
            let r = completeness_check(2, 2, rng)?;
            Ok((
                r.orthogonality_cross,
                params(&[("jmax", json!(2)), ("samples", json!(2))]),
            ))
        }),
        check("lambda.completeness", 1e-7, |rng, _| {
            let r = completeness_check(2, 2, rng)?;
            let monotone = r.partial_sums.windows(2).all(|w| w[1] > w[0]);
            let residual = if monotone {
                r.completeness
            } else {
                f64::INFINITY
            };
            Ok((
                residual,
                params(&[("jmax", json!(2)), ("partial_sums", json!(r.partial_sums))]),
            ))
        }),
    ]
}

fn pde_check(rng: &mut ChaCha8Rng, j: u32) -> Result<(f64, Params)> {
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let g = interior(rng, 0.1);
        let (l, r) = kernel_pde_residual(rq(rng, 1.5, 0.4), rq(rng, 1.5, 0.4), &g, lab(j))?;
        worst = worst.max(l).max(r);
    }
    Ok((worst, params(&[("j", json!(j)), ("samples", json!(20))])))
}

/// Gram matrix of all `D^j_{mn}`, `j ≤ jmax`, on the `(n, n, n)` Haar grid,
/// with the product sum evaluated coordinate by coordinate.
fn haar_wigner_gram(jmax: u32, n: usize) -> DMatrix<Complex<f64>> {
    let (x, w) = gauss_legendre::<f64>(n);
    let idx: Vec<WignerIndex> = (1..=jmax).flat_map(WignerIndex::all).collect();
    let d: Vec<Vec<f64>> = idx
        .iter()
        .map(|i| {
            x.iter()
                .map(|xi| small_d(*i, xi.acos()).unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    let trig = |k: i32| -> Complex<f64> {
        (0..n)
            .map(|a| {
                Complex::from_polar(1.0, k as f64 * std::f64::consts::TAU * a as f64 / n as f64)
            })
            .sum::<Complex<f64>>()
            / n as f64
    };
    let dim = idx.len();
    DMatrix::from_fn(dim, dim, |r, c| {
        let (a, b) = (idx[r], idx[c]);
        let theta: f64 = (0..n).map(|k| w[k] / 2.0 * d[r][k] * d[c][k]).sum();
        trig(b.m - a.m) * trig(b.n - a.n) * theta
    })
}

fn wigner_checks() -> Vec<Check> {
    vec![
        check("wigner.unitarity", 1e-12, |rng, _| {
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let g = random_group_element(rng);
                for j in 1..=5 {
                    let d = wigner_matrix(j, &g);
                    let dim = d.nrows();
                    worst = worst.max((&d * d.adjoint() - DMatrix::identity(dim, dim)).camax());
                }
            }
            Ok((
                worst,
                params(&[("jmax", json!(5)), ("samples", json!(100))]),
            ))
        }),
        check("wigner.orthogonality", 1e-10, |_, cfg| {
            let top = cfg.jmax.min(3);
            let gram = haar_wigner_gram(top, cfg.grid);
            let idx: Vec<WignerIndex> = (1..=top).flat_map(WignerIndex::all).collect();
            let mut worst = 0.0f64;
            for (r, a) in idx.iter().enumerate() {
                for (c, _) in idx.iter().enumerate() {
                    let want = if r == c {
                        1.0 / (2 * a.j + 1) as f64
                    } else {
                        0.0
                    };
                    worst = worst.max((gram[(r, c)] - want).norm());
                }
            }
            Ok((
                worst,
                params(&[
                    ("jmax", json!(top)),
                    ("grid", json!([cfg.grid, cfg.grid, cfg.grid])),
                ]),
            ))
        }),
        check("wigner.homomorphism", 1e-9, |rng, _| {
            let mut worst = 0.0f64;
            for _ in 0..50 {
                let (g1, g2) = (random_group_element(rng), random_group_element(rng));
                for j in 1..=4 {
                    let e = wigner_matrix(j, &GroupElement::identity());
                    let lhs = wigner_matrix(j, &g1.compose(&g2));
                    worst = worst.max(
                        (lhs - wigner_matrix(j, &g2) * e.transpose() * wigner_matrix(j, &g1))
                            .camax(),
                    );
                }
            }
            Ok((worst, params(&[("jmax", json!(4)), ("samples", json!(50))])))
        }),
        check("wigner.eigen_equations", 1e-5, |rng, cfg| {
            let mut worst = 0.0f64;
            let top = cfg.jmax.min(3);
            for _ in 0..50 {
                let g = interior(rng, 0.2);
                for j in 1..=top {
                    let m = rng.gen_range(-(j as i32)..=j as i32);
                    let n = rng.gen_range(-(j as i32)..=j as i32);
                    let idx = WignerIndex::new(j, m, n)?;
                    let f = |x: &GroupElement<f64>| wigner_d(idx, x).unwrap_or_default();
                    let v = f(&g);
                    worst = worst.max(rel(
                        left_field_apply(Axis::One, &f, &g)? * Complex::new(0.0, -1.0),
                        v * m as f64,
                    ));
                    worst = worst.max(rel(
                        right_field_apply(Axis::Three, &f, &g)? * Complex::new(0.0, 1.0),
                        v * n as f64,
                    ));
                    worst = worst.max(rel(casimir_apply(true, &f, &g)?, v * (j * (j + 1)) as f64));
                }
            }
            Ok((
                worst,
                params(&[("jmax", json!(top)), ("samples", json!(50))]),
            ))
        }),
        check("wigner.harmonics_orthonormal", 1e-10, |_, _| {
            let grid = sphere_grid::<f64>(24, 24)?;
            let idx: Vec<(u32, i32)> = (0..=3u32)
                .flat_map(|j| (-(j as i32)..=j as i32).map(move |m| (j, m)))
                .collect();
            let mut worst = 0.0f64;
            for a in &idx {
                for b in &idx {
                    let v = grid.integrate(|x| {
                        spherical_y(a.0, a.1, x).unwrap_or_default().conj()
                            * spherical_y(b.0, b.1, x).unwrap_or_default()
                    });
                    let want = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((v - want).norm());
                }
            }
            Ok((worst, params(&[("jmax", json!(3))])))
        }),
        check("wigner.small_d_symmetry", 0.0, |rng, _| {
            let mut worst = 0.0f64;
            for _ in 0..20 {
                let t = rng.gen_range(0.0..std::f64::consts::PI);
                for j in 1..=5 {
                    let d = small_d_matrix(j, t);
                    for idx in WignerIndex::all(j) {
                        let (r, c) = ((idx.m + j as i32) as usize, (idx.n + j as i32) as usize);
                        let sign = if (idx.m - idx.n).rem_euclid(2) == 0 {
                            1.0
                        } else {
                            -1.0
                        };
                        worst = worst.max((d[(r, c)] - sign * d[(c, r)]).abs());
                    }
                }
            }
            Ok((worst, params(&[("jmax", json!(5))])))
        }),
    ]
}

fn bridge_checks() -> Vec<Check> {
    vec![
        check("bridge.wigner_from_kernel_j1", 1e-6, |rng, _| {
            wigner_from_kernel_check(rng, 1, 20)
        }),
        check("bridge.wigner_from_kernel_j2", 1e-5, |rng, _| {
            wigner_from_kernel_check(rng, 2, 5)
        }),
        check("bridge.harmonic_from_overlaps", 1e-6, |rng, cfg| {
            let mut worst = 0.0f64;
            let top = cfg.jmax.min(3);
            let points: Vec<SpherePoint<f64>> = (0..100).map(|_| rsphere(rng)).collect();
            for j in 1..=top {
                let grid = default_q_grid::<f64>(lab(j));
                for x in &points {
                    for m in -(j as i32)..=(j as i32) {
                        let v = harmonic_from_overlaps(&grid, m, x, j as i32)?;
                        worst = worst.max((v - spherical_y(j, m, x)?).norm());
                    }
                }
            }
            Ok((
                worst,
                params(&[
                    ("jmax", json!(top)),
                    ("points", json!(100)),
                    ("exponent", json!("j")),
                ]),
            ))
        }),
        check("bridge.ni_cs_proportionality", 1e-10, |rng, cfg| {
            let mut worst = 0.0f64;
            for j in 1..=cfg.jmax.min(3) {
                for _ in 0..20 {
                    let label = NIStateLabel::new(lab(j), rq(rng, 1.0, 0.3));
                    let (scale, cs) = ni_to_cs(&label)?;
                    for _ in 0..50 {
                        let x = rsphere(rng);
                        worst =
                            worst.max(rel(scale * cs_wavefunction(&cs, &x), ni_state(&label, &x)));
                    }
                }
            }
            Ok((
                worst,
                params(&[("labels", json!(20)), ("points", json!(50))]),
            ))
        }),
        check("bridge.ni_transport", 1e-9, |rng, cfg| {
            let mut worst = 0.0f64;
            for j in 1..=cfg.jmax.min(3) {
                for _ in 0..50 {
                    let label = NIStateLabel::new(lab(j), rq(rng, 1.0, 0.3));
                    worst = worst.max(ni_transport_residual(
                        &label,
                        &random_group_element(rng),
                        &rsphere(rng),
                    )?);
                }
            }
            Ok((worst, params(&[("samples", json!(50))])))
        }),
        check("bridge.regeneration", 1e-9, |rng, cfg| {
            let mut worst = 0.0f64;
            for j in 1..=cfg.jmax.min(3) {
                for _ in 0..50 {
                    worst = worst.max(regeneration_residual(
                        lab(j),
                        &random_group_element(rng),
                        &rsphere(rng),
                    )?);
                }
            }
            Ok((worst, params(&[("samples", json!(50))])))
        }),
        check("bridge.cs_phase_unit_modulus", 1e-9, |rng, cfg| {
            let mut worst = 0.0f64;
            for j in 1..=cfg.jmax.min(3) {
                for _ in 0..50 {
                    let cs = CSLabel::new(lab(j), rq(rng, 1.0, 1.0))?;
                    for r in cs_transport_ratios(&cs, &random_group_element(rng))? {
                        worst = worst.max((r.norm() - 1.0).abs());
                    }
                }
            }
            Ok((worst, params(&[("samples", json!(50))])))
        }),
        check("bridge.cs_phase_probe_independence", 1e-8, |rng, cfg| {
            let mut worst = 0.0f64;
            for j in 1..=cfg.jmax.min(3) {
                for _ in 0..50 {
                    let cs = CSLabel::new(lab(j), rq(rng, 1.0, 1.0))?;
                    let r = cs_transport_ratios(&cs, &random_group_element(rng))?;
                    worst = worst.max(r.iter().map(|z| (z - r[0]).norm()).fold(0.0, f64::max));
                }
            }
            Ok((worst, params(&[("samples", json!(50))])))
        }),
        check("bridge.cs_norm", 1e-14, |rng, _| {
            let mut worst = 0.0f64;
            for j in 1..=6 {
                for _ in 0..50 {
                    let cs = CSLabel::new(lab(j), rq(rng, 2.0, 2.0))?;
                    let s: f64 = cs_coeffs(&cs).iter().map(|u| u.norm_sqr()).sum();
                    worst = worst.max((s - 1.0).abs());
                }
            }
            Ok((worst, params(&[("jmax", json!(6))])))
        }),
        check("bridge.cs_expansion", 1e-10, |rng, cfg| {
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let j = rng.gen_range(1..=cfg.jmax.min(3));
                let cs = CSLabel::new(lab(j), rq(rng, 1.0, 1.0))?;
                let x = rsphere(rng);
                let s: Complex<f64> = cs_coeffs(&cs)
                    .iter()
                    .enumerate()
                    .map(|(k, u)| *u * spherical_y(j, k as i32 - j as i32, &x).unwrap_or_default())
                    .sum();
                worst = worst.max((s - cs_wavefunction(&cs, &x)).norm());
            }
            Ok((worst, params(&[("samples", json!(100))])))
        }),
        check("bridge.overlap_expansion", 1e-8, |rng, cfg| {
            let mut worst = 0.0f64;
            for j in 1..=cfg.jmax.min(3) {
                for _ in 0..30 {
                    let label = NIStateLabel::new(lab(j), rq(rng, 1.0, 0.3));
                    let x = rsphere(rng);
                    worst = worst.max(rel(
                        ni_state_from_expansion(&label, &x)?,
                        ni_state(&label, &x),
                    ));
                }
            }
            Ok((worst, params(&[("samples", json!(30))])))
        }),
        check("bridge.ni_orthogonality", 1e-7, |rng, cfg| {
            let grid = sphere_grid::<f64>(24, 24)?;
            let top = cfg.jmax.min(3);
            let mut worst = 0.0f64;
            for _ in 0..3 {
                let (q1, q2) = (rq(rng, 1.0, 0.3), rq(rng, 1.0, 0.3));
                for j in 1..=top {
                    for jt in 1..=top {
                        let v = grid.integrate(|x| {
                            ni_state(&NIStateLabel::new(lab(j), q1), x).conj()
                                * ni_state(&NIStateLabel::new(lab(jt), q2), x)
                        }) / (4.0 * std::f64::consts::PI);
                        let want = if j == jt {
                            delta_j(q1.conj(), q2, lab(j)) / (2 * j + 1) as f64
                        } else {
                            Complex::default()
                        };
                        worst = worst.max((v - want).norm());
                    }
                }
            }
            Ok((worst, params(&[("jmax", json!(top))])))
        }),
        check("bridge.ni_kernel_integral", 1e-7, |rng, cfg| {
            let mut worst = 0.0f64;
            for j in 1..=cfg.jmax.min(3) {
                let grid = default_q_grid::<f64>(lab(j));
                for _ in 0..5 {
                    let g = random_group_element(rng);
                    let q = rq(rng, 1.0, 0.3);
                    let v = grid.integrate(|qp| {
                        crate::lambda::kernel_closed_form(q, qp.conj(), &g, lab(j))
                    });
                    worst = worst.max(rel(
                        v,
                        ni_state(&NIStateLabel::new(lab(j), q), &g.project()),
                    ));
                }
            }
            Ok((worst, params(&[("samples", json!(5))])))
        }),
        check("bridge.ni_eigen_system", 1e-5, |rng, cfg| {
            let mut worst = 0.0f64;
            for j in 1..=cfg.jmax.min(3) {
                for _ in 0..50 {
                    let g = interior(rng, 0.2);
                    let label = NIStateLabel::new(lab(j), rq(rng, 1.0, 0.3));
                    let f = |x: &GroupElement<f64>| ni_state_on_group(&label, x);
                    let v = f(&g);
                    worst = worst.max(rel(casimir_apply(true, &f, &g)?, v * (j * (j + 1)) as f64));
                    worst = worst
                        .max(right_field_apply(Axis::Three, &f, &g)?.norm() / v.norm().max(1.0));
                }
            }
            Ok((worst, params(&[("samples", json!(50))])))
        }),
        check("bridge.zeta_q_consistency", 1e-10, |rng, _| {
            let mut worst = 0.0f64;
            for _ in 0..100 {
                let g = random_group_element(rng);
                let q = rq(rng, 1.0, 0.3);
                worst = worst.max(rel(
                    zeta_action(zeta_of_q(q), &g)?,
                    zeta_of_q(q_action(q, &g)?),
                ));
            }
            Ok((worst, params(&[("samples", json!(100))])))
        }),
    ]
}

fn wigner_from_kernel_check(rng: &mut ChaCha8Rng, j: u32, count: usize) -> Result<(f64, Params)> {
    let grid = crate::lambda::q_plane_grid::<f64>(lab(j), 40, 24)?;
    let mut worst = 0.0f64;
    for _ in 0..count {
        let g = random_group_element(rng);
        worst = worst.max((wigner_from_kernel_matrix(&grid, &g)? - wigner_matrix(j, &g)).camax());
    }
    Ok((
        worst,
        params(&[
            ("j", json!(j)),
            ("samples", json!(count)),
            ("q_grid", json!([40, 24])),
        ]),
    ))
}

fn reduction_checks() -> Vec<Check> {
    vec![
        check("reduction.spectrum_oracle", 1e-6, |rng, cfg| {
            let top = cfg.jmax.min(3);
            let mut specs: Vec<HamiltonianSpec<f64>> =
                (0..5).map(|_| negative_definite(rng)).collect();
            specs.push(HamiltonianSpec::symmetric_top(1.0, 2.0));
            let mut worst = 0.0f64;
            for j in 1..=top {
                let oracle = WignerOracle::new(j)?;
                for spec in &specs {
                    let reduced = with_multiplicity(&reduced_spectrum(spec, lab(j))?);
                    worst = worst.max(spectrum_distance(&reduced, &oracle.spectrum(spec)?));
                }
            }
            Ok((
                worst,
                params(&[("jmax", json!(top)), ("specs", json!(specs.len()))]),
            ))
        }),
        check("reduction.energy_reality", 1e-10, |rng, _| {
            let mut worst = 0.0f64;
            for j in 1..=5 {
                for _ in 0..5 {
                    for s in reduced_spectrum(&negative_definite(rng), lab(j))? {
                        worst = worst.max(s.energy.im.abs());
                    }
                }
            }
            Ok((worst, params(&[("jmax", json!(5))])))
        }),
        check("reduction.symmetric_top", 1e-12, |_, _| {
            let sols = reduced_spectrum(&HamiltonianSpec::symmetric_top(1.0, 2.0), lab(1))?;
            let want = [2.0, 3.0, 3.0];
            let worst = sols
                .iter()
                .zip(want)
                .map(|(s, w)| (s.energy - w).norm())
                .fold(0.0, f64::max);
            Ok((
                worst,
                params(&[("a", json!(1.0)), ("b", json!(2.0)), ("j", json!(1))]),
            ))
        }),
        check("reduction.schrodinger", 1e-4, |rng, _| {
            let mut worst = 0.0f64;
            for j in 1..=2 {
                let grid = default_q_grid::<f64>(lab(j));
                let spec = negative_definite(rng);
                for sol in reduced_spectrum(&spec, lab(j))? {
                    let g = interior(rng, 0.2);
                    worst = worst.max(schrodinger_residual(
                        &spec,
                        &sol,
                        rq(rng, 1.0, 0.3),
                        &g,
                        &grid,
                    )?);
                }
            }
            Ok((worst, params(&[("jmax", json!(2))])))
        }),
        check("reduction.intertwining", 1e-6, |rng, _| {
            let mut worst = 0.0f64;
            for j in 1..=2 {
                let grid = default_q_grid::<f64>(lab(j));
                for sol in reduced_spectrum(&negative_definite(rng), lab(j))? {
                    let g = interior(rng, 0.2);
                    worst = worst.max(intertwining_residual(
                        &sol.psi,
                        rq(rng, 1.0, 0.3),
                        &g,
                        &grid,
                    )?);
                }
            }
            Ok((worst, params(&[("jmax", json!(2))])))
        }),
        check("reduction.solution_routes_agree", 1e-7, |rng, cfg| {
            let mut worst = 0.0f64;
            for j in 1..=cfg.jmax.min(3) {
                let grid = default_q_grid::<f64>(lab(j));
                for sol in reduced_spectrum(&negative_definite(rng), lab(j))? {
                    let g = random_group_element(rng);
                    let q = rq(rng, 1.0, 0.3);
                    let quad = reconstruct_solution(&sol.psi, q, &g, &grid);
                    worst = worst.max(rel(quad, reconstruct_factorized(&sol.psi, q, &g)?));
                    let at_e = reconstruct_solution(&sol.psi, q, &GroupElement::identity(), &grid);
                    worst = worst.max(rel(at_e, sol.psi.eval(q)));
                }
            }
            Ok((worst, params(&[("jmax", json!(cfg.jmax.min(3)))])))
        }),
        check("reduction.linearity", 1e-12, |rng, _| {
            let j = lab(2);
            let grid = default_q_grid::<f64>(j);
            let sols = reduced_spectrum(&negative_definite(rng), j)?;
            let (a, b) = (rq(rng, 1.0, 1.0), rq(rng, 1.0, 1.0));
            let combo =
                QFunction::from_vector(j, &sols[0].psi.coeffs * a + &sols[1].psi.coeffs * b)?;
            let (q, g) = (rq(rng, 1.0, 0.3), random_group_element(rng));
            let lhs = reconstruct_solution(&combo, q, &g, &grid);
            let rhs = reconstruct_solution(&sols[0].psi, q, &g, &grid) * a
                + reconstruct_solution(&sols[1].psi, q, &g, &grid) * b;
            Ok((rel(lhs, rhs), params(&[("j", json!(2))])))
        }),
        check("reduction.casimir_j1", 1e-4, |rng, _| casimir_check(rng, 1)),
        check("reduction.casimir_j2", 1e-3, |rng, _| casimir_check(rng, 2)),
        check("reduction.coherence_identity", 1e-12, |_, _| {
            let sols = reduced_spectrum(&HamiltonianSpec::symmetric_top(1.0, 2.0), lab(1))?;
            let m: f64 =
                coherence_criterion(&sols[0], Complex::new(0.3, 0.1), &GroupElement::identity())?;
            Ok(((m - 1.0).abs(), params(&[("j", json!(1))])))
        }),
        check("reduction.coherence_generic_deviation", 1.0, |_, _| {
            // pass iff ||U| − 1| ≥ 1e−3 at the documented element
            let sols = reduced_spectrum(&HamiltonianSpec::symmetric_top(1.0, 2.0), lab(1))?;
            let (q, g) = (Complex::new(0.3, 0.1), GroupElement::new(1.0, 0.7, 2.0));
            let deviation = (coherence_criterion::<f64>(&sols[0], q, &g)? - 1.0).abs();
            Ok((
                1e-3 / deviation,
                params(&[
                    ("j", json!(1)),
                    ("q", json!([0.3, 0.1])),
                    ("g", json!({"phi": 1.0, "theta": 0.7, "psi": 2.0})),
                    ("deviation", json!(deviation)),
                    ("min_deviation", json!(1e-3)),
                ]),
            ))
        }),
    ]
}

fn casimir_check(rng: &mut ChaCha8Rng, j: u32) -> Result<(f64, Params)> {
    let grid = default_q_grid::<f64>(lab(j));
    let mut worst = 0.0f64;
    for sol in reduced_spectrum(&negative_definite(rng), lab(j))? {
        let g = interior(rng, 0.2);
        worst = worst.max(casimir_eigen_check(&sol, rq(rng, 1.0, 0.3), &g, &grid)?);
    }
    Ok((worst, params(&[("j", json!(j))])))
}

fn checks_for(suite: Suite) -> Vec<Check> {
    match suite {
        Suite::Lie => lie_checks(),
        Suite::Geometry => geometry_checks(),
        Suite::Lambda => lambda_checks(),
        Suite::Wigner => wigner_checks(),
        Suite::Bridge => bridge_checks(),
        Suite::Reduction => reduction_checks(),
        Suite::All => Suite::MODULES.iter().flat_map(|s| checks_for(*s)).collect(),
    }
}

/// Names of the checks in a suite, sorted.
pub fn check_names(suite: Suite) -> Vec<&'static str> {
    let mut v: Vec<&'static str> = checks_for(suite).iter().map(|c| c.name).collect();
    v.sort_unstable();
    v
}

/// Run every check of `suite` in parallel; reports sorted by name.
pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> Vec<VerificationReport> {
    let checks = checks_for(suite);
    let mut reports: Vec<VerificationReport> = checks
        .par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(check_seed(cfg.seed, c.name));
            let start = Instant::now();
            let outcome = (c.run)(&mut rng, cfg);
            let runtime_ms = if cfg.timings {
                start.elapsed().as_secs_f64() * 1e3
            } else {
                0.0
            };
            let tolerance = c.tolerance * cfg.tol_scale;
            let (residual, mut parameters) = match outcome {
                Ok(v) => v,
                Err(e) => (f64::INFINITY, params(&[("error", json!(e.to_string()))])),
            };
            parameters.insert("seed".into(), json!(cfg.seed));
            VerificationReport {
                check_name: c.name.to_string(),
                parameters,
                residual,
                tolerance,
                pass: residual <= tolerance,
                runtime_ms,
            }
        })
        .collect();
    reports.sort_by(|a, b| a.check_name.cmp(&b.check_name));
    reports
}

/// JSON array of reports. Non-finite residuals are written as `null`.
pub fn reports_to_json(reports: &[VerificationReport]) -> Result<String> {
    Ok(serde_json::to_string_pretty(reports)?)
}
