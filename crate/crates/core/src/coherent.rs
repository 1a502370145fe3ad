//! Spin coherent states, the NI states `𝒟^j_q(φ, θ)` on the sphere, and
//! the identities relating them to each other and to Wigner functions.
//!
//! Sphere integrals use `dμ(x) = sin θ dθ dφ`.

use nalgebra::{ComplexField, DMatrix};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::{q_action, sphere_action, GroupElement, SpherePoint, MOBIUS_TOL};
use crate::lambda::{kernel_matrix, QFunction, QGrid};
use crate::lie::OrbitLabel;
use crate::scalar::{cabs, cpowi, factorial, imag_unit, lit, polar, real, Real};
use crate::special::spherical_y;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Spin coherent state label `(j, ζ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CSLabel<T> {
    pub j: OrbitLabel,
    pub zeta: Complex<T>,
}

/// NI state label `(j, q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NIStateLabel<T> {
    pub j: OrbitLabel,
    pub q: Complex<T>,
}

impl<T: Real> CSLabel<T> {
    pub fn new(j: OrbitLabel, zeta: Complex<T>) -> Result<Self> {
        if !(zeta.re.is_finite() && zeta.im.is_finite()) {
            return Err(Error::Invalid("coherent-state label must be finite".into()));
        }
        Ok(Self { j, zeta })
    }
}

impl<T: Real> NIStateLabel<T> {
    pub fn new(j: OrbitLabel, q: Complex<T>) -> Self {
        Self { j, q }
    }
}

/// `ζ = −i tan(q/2)`.
pub fn zeta_of_q<T: Real>(q: Complex<T>) -> Complex<T> {
    -imag_unit::<T>() * (q * lit::<T>(0.5)).tan()
}

/// `u_m = (1+|ζ|²)^{−j} √((2j)!/((j+m)!(j−m)!)) ζ^{j+m}`, `m = −j..j`.
pub fn cs_coeffs<T: Real>(label: &CSLabel<T>) -> Vec<Complex<T>> {
    let j = label.j.j();
    let ji = j as i32;
    let norm = (T::one() + label.zeta.norm_sqr()).powi(-ji);
    (-ji..=ji)
        .map(|m| {
            let b: T = lit((factorial(2 * j)
                / (factorial((ji + m) as u32) * factorial((ji - m) as u32)))
            .sqrt());
            label.zeta.powu((ji + m) as u32) * (norm * b)
        })
        .collect()
}

/// Closed form of `Σ_m u_m Y^j_m(φ, θ)`.
pub fn cs_wavefunction<T: Real>(label: &CSLabel<T>, x: &SpherePoint<T>) -> Complex<T> {
    let j = label.j.j();
    let z = label.zeta;
    let pref: T = lit(
        ((2 * j + 1) as f64 / FOUR_PI).sqrt() * factorial(2 * j).sqrt()
            / (2f64.powi(j as i32) * factorial(j)),
    );
    let norm = (T::one() + z.norm_sqr()).powi(-(j as i32));
    let (st, ct) = x.theta.sin_cos();
    let e1 = polar(T::one(), x.phi);
    let e2 = polar(T::one(), x.phi + x.phi);
    let base = e1 * z * (ct + ct) + real(st) - e2 * z * z * st;
    polar(pref * norm, -(lit::<T>(j as f64) * x.phi)) * base.powu(j)
}

/// `𝒟^j_q(φ, θ) = [−i cos θ sin q + (cos φ − i cos q sin φ) sin θ]^j`.
pub fn ni_state<T: Real>(label: &NIStateLabel<T>, x: &SpherePoint<T>) -> Complex<T> {
    let i = imag_unit::<T>();
    let q = label.q;
    let (sp, cp) = x.phi.sin_cos();
    let (st, ct) = x.theta.sin_cos();
    let base = -i * q.sin() * ct + (real(cp) - i * q.cos() * sp) * st;
    base.powu(label.j.j())
}

/// `𝒟^j_q` pulled back to the group, `g ↦ 𝒟^j_q(π(g))`.
pub fn ni_state_on_group<T: Real>(label: &NIStateLabel<T>, g: &GroupElement<T>) -> Complex<T> {
    ni_state(label, &g.project())
}

fn check_m(j: OrbitLabel, m: i32) -> Result<()> {
    if m.abs() > j.j() as i32 {
        return Err(Error::IndexOutOfRange { j: j.j(), m, n: 0 });
    }
    Ok(())
}

/// `⟨q,j | j,m⟩ = √((2j+1)/4π) 2^j j!/√((j−m)!(j+m)!) ζ̄^{j+m}/(1−ζ̄²)^j`.
pub fn overlap_qm<T: Real>(j: OrbitLabel, q: Complex<T>, m: i32) -> Result<Complex<T>> {
    overlap_qm_with_exponent(j, q, m, j.j() as i32)
}

/// [`overlap_qm`] with the exponent on `(1−ζ̄²)` as a parameter.
pub fn overlap_qm_with_exponent<T: Real>(
    j: OrbitLabel,
    q: Complex<T>,
    m: i32,
    exponent: i32,
) -> Result<Complex<T>> {
    check_m(j, m)?;
    let jj = j.j();
    let ji = jj as i32;
    let zb = zeta_of_q(q).conj();
    let den = real::<T>(T::one()) - zb * zb;
    if cabs(den) <= lit(MOBIUS_TOL) {
        return Err(Error::ScalePole);
    }
    let pref: T = lit(
        ((2 * jj + 1) as f64 / FOUR_PI).sqrt() * 2f64.powi(ji) * factorial(jj)
            / (factorial((ji - m) as u32) * factorial((ji + m) as u32)).sqrt(),
    );
    Ok(zb.powu((ji + m) as u32) * cpowi(den, -exponent) * pref)
}

/// `⟨j,m | q,j⟩`, the coefficient of `Y^j_m` in the expansion of `𝒟^j_q`:
/// `(4π/(2j+1)) conj⟨q,j | j,m⟩`.
pub fn expansion_coeff<T: Real>(j: OrbitLabel, q: Complex<T>, m: i32) -> Result<Complex<T>> {
    let f: T = lit(FOUR_PI / (2 * j.j() + 1) as f64);
    Ok(overlap_qm(j, q, m)?.conj() * f)
}

/// `Σ_m ⟨j,m | q,j⟩ Y^j_m(x)`.
pub fn ni_state_from_expansion<T: Real>(
    label: &NIStateLabel<T>,
    x: &SpherePoint<T>,
) -> Result<Complex<T>> {
    let ji = label.j.j() as i32;
    let mut s = Complex::new(T::zero(), T::zero());
    for m in -ji..=ji {
        s += expansion_coeff(label.j, label.q, m)? * spherical_y(label.j.j(), m, x)?;
    }
    Ok(s)
}

/// `∫_Q ⟨q,j | j,m⟩ 𝒟^j_q(x) dμ_j(q)`, which reproduces `Y^j_m(x)`.
pub fn harmonic_from_overlaps<T: Real>(
    grid: &QGrid<T>,
    m: i32,
    x: &SpherePoint<T>,
    exponent: i32,
) -> Result<Complex<T>> {
    let j = grid.j;
    check_m(j, m)?;
    let mut acc = Complex::new(T::zero(), T::zero());
    for (q, w) in grid.q.iter().zip(&grid.weights) {
        let c = overlap_qm_with_exponent(j, *q, m, exponent)?;
        acc += c * ni_state(&NIStateLabel::new(j, *q), x) * *w;
    }
    Ok(acc)
}

/// `C^j_{mn} = e^{iπ(j+m)/2} (j!)² / √((j+m)!(j−m)!(j+n)!(j−n)!)`.
pub fn wigner_from_kernel_constant<T: Real>(j: OrbitLabel, m: i32, n: i32) -> Complex<T> {
    let jj = j.j();
    let ji = jj as i32;
    let f = |k: i32| factorial(k as u32);
    let mag = factorial(jj).powi(2) / (f(ji + m) * f(ji - m) * f(ji + n) * f(ji - n)).sqrt();
    polar(lit(mag), lit(std::f64::consts::FRAC_PI_2 * (ji + m) as f64))
}

/// All `(m, n)` of `C^j_{mn} ∫∫ conj(F^j_m(q)) Φ^j_n(q′) K_{qq̄′}(g) dμ_j dμ_j`
/// with `F^j_m = tan^m(q/2) sin^j q`, `Φ^j_n = e^{−inq′}` and `K` the
/// closed-form kernel at the coordinates of `g`. Row `m + j`, column `n + j`.
pub fn wigner_from_kernel_matrix<T: Real>(
    grid: &QGrid<T>,
    g: &GroupElement<T>,
) -> Result<DMatrix<Complex<T>>> {
    let j = grid.j;
    let ji = j.j() as i32;
    let dim = j.dim();
    let k = kernel_matrix(grid, g);
    let i = imag_unit::<T>();
    let fm: Vec<QFunction<T>> = (-ji..=ji)
        .map(|m| QFunction::tan_sin(j, m))
        .collect::<Result<_>>()?;
    // left[m][a] = conj(F_m(q_a)) w_a, right[n][b] = Φ_n(q_b) w_b
    let left = DMatrix::from_fn(dim, grid.len(), |m, a| {
        fm[m].eval(grid.q[a]).conj() * grid.weights[a]
    });
    let right = DMatrix::from_fn(grid.len(), dim, |b, n| {
        (-(i * grid.q[b]) * lit::<T>((n as i32 - ji) as f64)).exp() * grid.weights[b]
    });
    let mut out = left * k * right;
    for m in -ji..=ji {
        for n in -ji..=ji {
            let (r, c) = ((m + ji) as usize, (n + ji) as usize);
            out[(r, c)] *= wigner_from_kernel_constant::<T>(j, m, n);
        }
    }
    Ok(out)
}

/// Single entry of [`wigner_from_kernel_matrix`]; must equal `D^j_{mn}(g)`.
pub fn wigner_from_kernel<T: Real>(
    grid: &QGrid<T>,
    m: i32,
    n: i32,
    g: &GroupElement<T>,
) -> Result<Complex<T>> {
    check_m(grid.j, m)?;
    check_m(grid.j, n)?;
    let ji = grid.j.j() as i32;
    Ok(wigner_from_kernel_matrix(grid, g)?[((m + ji) as usize, (n + ji) as usize)])
}

/// `𝒟^j_q = scale · ψ^j_ζ` with `ζ = −i tan(q/2)` and
/// `scale = √(4π/(2j+1)) 2^j j!/√((2j)!) [(1+|ζ|²)/(1−ζ²)]^j`.
pub fn ni_to_cs<T: Real>(label: &NIStateLabel<T>) -> Result<(Complex<T>, CSLabel<T>)> {
    let j = label.j.j();
    let z = zeta_of_q(label.q);
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::ScalePole);
    }
    let den = real::<T>(T::one()) - z * z;
    if cabs(den) <= lit(MOBIUS_TOL) {
        return Err(Error::ScalePole);
    }
    let c: T = lit(
        (FOUR_PI / (2 * j + 1) as f64).sqrt() * 2f64.powi(j as i32) * factorial(j)
            / factorial(2 * j).sqrt(),
    );
    let ratio = real::<T>(T::one() + z.norm_sqr()) / den;
    Ok((
        ratio.powu(j) * c,
        CSLabel {
            j: label.j,
            zeta: z,
        },
    ))
}

/// `ζ ∘ g⁻¹`: the Möbius action of the lift of `g` on `iζ`.
pub fn zeta_action<T: Real>(zeta: Complex<T>, g: &GroupElement<T>) -> Result<Complex<T>> {
    let i = imag_unit::<T>();
    let w = g.lift().mobius(i * zeta)?;
    Ok(-i * w)
}

/// Sphere points used as probes for transport ratios.
pub const SPHERE_PROBES: [(f64, f64); 6] = [
    (0.3, 0.9),
    (2.1, 1.7),
    (4.0, 0.5),
    (5.5, 2.4),
    (1.2, 2.9),
    (3.3, 1.2),
];

/// Smallest `|ψ|` used as a divisor at a probe.
pub const PROBE_MAGNITUDE_FLOOR: f64 = 1e-8;

/// Transport ratios `ψ^j_ζ(x∘g)/ψ^j_{ζ∘g⁻¹}(x)` at the usable probes.
pub fn cs_transport_ratios<T: Real>(
    label: &CSLabel<T>,
    g: &GroupElement<T>,
) -> Result<Vec<Complex<T>>> {
    let moved = CSLabel {
        j: label.j,
        zeta: zeta_action(label.zeta, g)?,
    };
    let mut out = Vec::new();
    for (phi, theta) in SPHERE_PROBES {
        let x = SpherePoint::new(lit(phi), lit(theta));
        let den = cs_wavefunction(&moved, &x);
        if cabs(den) <= lit(PROBE_MAGNITUDE_FLOOR) {
            continue;
        }
        out.push(cs_wavefunction(label, &sphere_action(&x, g)) / den);
    }
    if out.len() < 2 {
        return Err(Error::ProbeFailure(
            "fewer than two sphere probes away from zeros".into(),
        ));
    }
    Ok(out)
}

/// Phase `Φ^j(ζ, g)` with `ψ^j_ζ(x∘g) = e^{ijΦ} ψ^j_{ζ∘g⁻¹}(x)`.
///
/// Fails when the ratio is not unimodular to `1e−9` or varies with `x` by
/// more than `1e−8`.
pub fn cs_phase<T: Real>(label: &CSLabel<T>, g: &GroupElement<T>) -> Result<T> {
    let r = cs_transport_ratios(label, g)?;
    let modulus = r
        .iter()
        .fold(T::zero(), |m, z| m.max((cabs(*z) - T::one()).abs()));
    let spread = r.iter().fold(T::zero(), |m, z| m.max(cabs(*z - r[0])));
    if modulus > lit(1e-9) || spread > lit(1e-8) {
        return Err(Error::Numerical(format!(
            "coherent-state transport ratio not a pure phase: modulus error {modulus:e}, spread {spread:e}"
        )));
    }
    Ok(r[0].im.atan2(r[0].re) / lit(label.j.j() as f64))
}

/// Transport factor `𝒟^j_q(π(g))` with
/// `𝒟^j_q(x∘g) = 𝒟^j_q(π(g)) 𝒟^j_{q∘g⁻¹}(x)`; fails when the law is
/// violated at a probe by more than `1e−9` (relative).
pub fn ni_transport<T: Real>(label: &NIStateLabel<T>, g: &GroupElement<T>) -> Result<Complex<T>> {
    let factor = ni_state_on_group(label, g);
    let worst = SPHERE_PROBES
        .iter()
        .map(|(p, t)| ni_transport_residual(label, g, &SpherePoint::new(lit(*p), lit(*t))))
        .collect::<Result<Vec<T>>>()?
        .into_iter()
        .fold(T::zero(), |m, r| m.max(r));
    if worst > lit(1e-9) {
        return Err(Error::Numerical(format!(
            "NI transport law violated: residual {worst:e}"
        )));
    }
    Ok(factor)
}

/// `|𝒟^j_q(x∘g) − 𝒟^j_q(π(g)) 𝒟^j_{q∘g⁻¹}(x)|`, relative to the scale of
/// the left side.
pub fn ni_transport_residual<T: Real>(
    label: &NIStateLabel<T>,
    g: &GroupElement<T>,
    x: &SpherePoint<T>,
) -> Result<T> {
    let moved = NIStateLabel::new(label.j, q_action(label.q, g)?);
    let lhs = ni_state(label, &sphere_action(x, g));
    let rhs = ni_state_on_group(label, g) * ni_state(&moved, x);
    Ok(cabs(lhs - rhs) / cabs(lhs).max(T::one()))
}

/// `|𝒟^j_q(x) − 𝒟^j_0(x∘g⁻¹)/𝒟^j_0(π(g⁻¹))|` with `q = 0 ∘ g` (the
/// state regenerated from `q₀ = 0` by transport).
pub fn regeneration_residual<T: Real>(
    j: OrbitLabel,
    g: &GroupElement<T>,
    x: &SpherePoint<T>,
) -> Result<T> {
    let gi = g.inverse();
    let zero = Complex::new(T::zero(), T::zero());
    let q = q_action(zero, &gi)?;
    let base = NIStateLabel::new(j, zero);
    let den = ni_state_on_group(&base, &gi);
    if cabs(den) <= lit(PROBE_MAGNITUDE_FLOOR) {
        return Err(Error::ProbeFailure("transport factor vanishes".into()));
    }
    let lhs = ni_state(&NIStateLabel::new(j, q), x);
    let rhs = ni_state(&base, &sphere_action(x, &gi)) / den;
    Ok(cabs(lhs - rhs) / cabs(lhs).max(T::one()))
}
