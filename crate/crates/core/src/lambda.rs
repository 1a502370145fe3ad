//! The λ-representation of so(3) on functions over Q.
//!
//! Carrier space: span of `e^{−inq}`, `n = −j..j`. The measure `μ_j` is
//! realised in the plane `ζ = −i tan(q/2)`, where
//! `dμ_j = N_j |1−ζ²|^{2j} (1+|ζ|²)^{−2j−2} d²ζ`,
//! `N_j = (2j+1)(2j)! / (π 4^j (j!)²)`.

use nalgebra::{ComplexField, DMatrix, DVector};
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{
    left_field_apply, q_action, right_field_apply, Axis, GroupElement, QuadratureGrid, FIELD_STEP,
};
use crate::lie::OrbitLabel;
use crate::quadrature::gauss_legendre;
use crate::scalar::{binomial, cabs, cplx, factorial, imag_unit, lit, polar, real, Real};
use crate::special::wigner_matrix;

/// `2^j (j!)² / (2j)!`, the normalisation of `δ_j` and of the kernel.
pub fn kernel_norm(j: u32) -> f64 {
    2f64.powi(j as i32) * factorial(j).powi(2) / factorial(2 * j)
}

fn zero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

/// Matrix of `ℓ_a` on the basis `e^{−inq}` (column = input, index `n + j`).
///
/// As differential operators: `ℓ₁ = −i(sin q ∂_q − j cos q)`,
/// `ℓ₂ = −i(cos q ∂_q + j sin q)`, `ℓ₃ = ∂_q`.
pub fn ell_matrix<T: Real>(axis: Axis, j: OrbitLabel) -> DMatrix<Complex<T>> {
    let ji = j.j() as i32;
    let dim = j.dim();
    let mut l = DMatrix::from_element(dim, dim, zero::<T>());
    let half: T = lit(0.5);
    for n in -ji..=ji {
        let c = (n + ji) as usize;
        let up: T = lit((ji + n) as f64);
        let down: T = lit((ji - n) as f64);
        match axis {
            Axis::Three => l[(c, c)] = cplx(T::zero(), -lit::<T>(n as f64)),
            Axis::One => {
                if n > -ji {
                    l[(c - 1, c)] += cplx(T::zero(), up * half);
                }
                if n < ji {
                    l[(c + 1, c)] += cplx(T::zero(), down * half);
                }
            }
            Axis::Two => {
                if n > -ji {
                    l[(c - 1, c)] += real(-(up * half));
                }
                if n < ji {
                    l[(c + 1, c)] += real(down * half);
                }
            }
        }
    }
    l
}

/// `ℓ_a ψ` evaluated at `q` from the differential-operator form, with a
/// central difference in `q` (holomorphic `ψ`).
pub fn ell_apply<T, F>(axis: Axis, j: OrbitLabel, psi: &F, q: Complex<T>) -> Complex<T>
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T> + ?Sized,
{
    let h: T = lit(FIELD_STEP);
    let jj: T = lit(j.j() as f64);
    let d = (psi(q + h) - psi(q - h)) / real(h + h);
    let i = imag_unit::<T>();
    match axis {
        Axis::One => -i * (q.sin() * d - q.cos() * psi(q) * jj),
        Axis::Two => -i * (q.cos() * d + q.sin() * psi(q) * jj),
        Axis::Three => d,
    }
}

/// Complex conjugate operator `conj ℓ_a` acting on the variable `q̄`.
fn ell_conj_apply<T, F>(axis: Axis, j: OrbitLabel, psi: &F, qb: Complex<T>) -> Complex<T>
where
    T: Real,
    F: Fn(Complex<T>) -> Complex<T> + ?Sized,
{
    let h: T = lit(FIELD_STEP);
    let jj: T = lit(j.j() as f64);
    let d = (psi(qb + h) - psi(qb - h)) / real(h + h);
    let i = imag_unit::<T>();
    match axis {
        Axis::One => i * (qb.sin() * d - qb.cos() * psi(qb) * jj),
        Axis::Two => i * (qb.cos() * d + qb.sin() * psi(qb) * jj),
        Axis::Three => d,
    }
}

/// `Σ_a (−iℓ_a)²`; equals `j(j+1)·I`.
pub fn casimir_lambda<T: Real>(j: OrbitLabel) -> DMatrix<Complex<T>> {
    let dim = j.dim();
    let mut k = DMatrix::from_element(dim, dim, zero::<T>());
    for a in Axis::ALL {
        let l = ell_matrix::<T>(a, j);
        k -= &l * &l;
    }
    k
}

/// Element `ψ(q) = Σ_n c_n e^{−inq}` of the carrier space.
#[derive(Debug, Clone, PartialEq)]
pub struct QFunction<T: Real> {
    pub j: OrbitLabel,
    pub coeffs: DVector<Complex<T>>,
}

impl<T: Real> QFunction<T> {
    pub fn new(j: OrbitLabel, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len() != j.dim() {
            return Err(Error::Shape(format!(
                "expected {} coefficients, got {}",
                j.dim(),
                coeffs.len()
            )));
        }
        if coeffs
            .iter()
            .any(|c| !(c.re.is_finite() && c.im.is_finite()))
        {
            return Err(Error::Invalid("non-finite coefficient".into()));
        }
        Ok(Self {
            j,
            coeffs: DVector::from_vec(coeffs),
        })
    }

    pub fn from_vector(j: OrbitLabel, coeffs: DVector<Complex<T>>) -> Result<Self> {
        Self::new(j, coeffs.iter().copied().collect())
    }

    /// `e^{−inq}`.
    pub fn basis(j: OrbitLabel, n: i32) -> Result<Self> {
        let ji = j.j() as i32;
        if n.abs() > ji {
            return Err(Error::IndexOutOfRange {
                j: j.j(),
                m: n,
                n: 0,
            });
        }
        let mut c = vec![zero::<T>(); j.dim()];
        c[(n + ji) as usize] = real(T::one());
        Self::new(j, c)
    }

    /// Fourier coefficients of `f` from `2j+1` equispaced real samples; exact
    /// when `f` lies in the carrier space.
    pub fn from_fn(j: OrbitLabel, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        let ji = j.j() as i32;
        let big_n = j.dim();
        let samples: Vec<(T, Complex<T>)> = (0..big_n)
            .map(|k| {
                let q = T::two_pi() * lit(k as f64) / lit(big_n as f64);
                (q, f(real(q)))
            })
            .collect();
        let inv_n: T = T::one() / lit(big_n as f64);
        let coeffs = (-ji..=ji)
            .map(|n| {
                samples.iter().fold(zero::<T>(), |acc, (q, v)| {
                    acc + *v * polar(T::one(), lit::<T>(n as f64) * *q)
                }) * inv_n
            })
            .collect::<Vec<_>>();
        Self {
            j,
            coeffs: DVector::from_vec(coeffs),
        }
    }

    /// `F^j_m(q) = tan^m(q/2) sin^j(q)` in the basis, via the exact
    /// expansion `(−i)^m (2i)^{−j} w^{−j} (w−1)^{j+m} (w+1)^{j−m}`,
    /// `w = e^{iq}`.
    pub fn tan_sin(j: OrbitLabel, m: i32) -> Result<Self> {
        let ji = j.j() as i32;
        if m.abs() > ji {
            return Err(Error::IndexOutOfRange { j: j.j(), m, n: 0 });
        }
        let a = (ji + m) as u32;
        let b = (ji - m) as u32;
        // coefficients of w^k, k = 0..2j
        let mut poly = vec![0.0f64; (2 * ji + 1) as usize];
        for s in 0..=a {
            let cs = binomial(a, s) * if (a - s) % 2 == 0 { 1.0 } else { -1.0 };
            for t in 0..=b {
                poly[(s + t) as usize] += cs * binomial(b, t);
            }
        }
        let i = imag_unit::<T>();
        let pref = crate::scalar::cpowi(-i, m) * crate::scalar::cpowi(i * lit::<T>(2.0), -ji);
        // w^{k−j} = e^{i(k−j)q} = e^{−inq} with n = j − k
        let mut c = vec![zero::<T>(); j.dim()];
        for (k, v) in poly.iter().enumerate() {
            let n = ji - k as i32;
            c[(n + ji) as usize] = pref * lit::<T>(*v);
        }
        Self::new(j, c)
    }

    pub fn eval(&self, q: Complex<T>) -> Complex<T> {
        let ji = self.j.j() as i32;
        let i = imag_unit::<T>();
        self.coeffs
            .iter()
            .enumerate()
            .fold(zero::<T>(), |acc, (k, c)| {
                acc + *c * (-(i * q) * lit::<T>((k as i32 - ji) as f64)).exp()
            })
    }

    pub fn apply(&self, op: &DMatrix<Complex<T>>) -> Self {
        Self {
            j: self.j,
            coeffs: op * &self.coeffs,
        }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            j: self.j,
            coeffs: &self.coeffs * s,
        }
    }

    /// `⟨self, other⟩ = ∫ conj(self) other dμ_j`.
    pub fn inner(&self, other: &Self, measure: &QMeasure<T>) -> Complex<T> {
        (self.coeffs.adjoint() * &measure.gram * &other.coeffs)[(0, 0)]
    }

    pub fn norm(&self, measure: &QMeasure<T>) -> T {
        self.inner(self, measure).re.max(T::zero()).sqrt()
    }
}

/// Quadrature over Q for `dμ_j`.
#[derive(Debug, Clone)]
pub struct QGrid<T> {
    pub j: OrbitLabel,
    pub q: Vec<Complex<T>>,
    pub zeta: Vec<Complex<T>>,
    pub weights: Vec<T>,
}

/// `ζ = r e^{iα}`, `r = tan(u/2)`, Gauss–Legendre in `u ∈ (0, π)`, midpoint
/// rule in `α`.
pub fn q_plane_grid<T: Real>(j: OrbitLabel, n_r: usize, n_ang: usize) -> Result<QGrid<T>> {
    if n_r < 8 || n_ang == 0 {
        return Err(Error::Invalid(format!(
            "Q grid needs n_r >= 8 and n_ang >= 1 (got {n_r}, {n_ang})"
        )));
    }
    let jj = j.j();
    let (x, w) = gauss_legendre::<f64>(n_r);
    let norm = (2 * jj + 1) as f64 * factorial(2 * jj)
        / (std::f64::consts::PI * 4f64.powi(jj as i32) * factorial(jj).powi(2));
    let wa = 2.0 * std::f64::consts::PI / n_ang as f64;
    let mut q = Vec::with_capacity(n_r * n_ang);
    let mut zeta = Vec::with_capacity(n_r * n_ang);
    let mut weights = Vec::with_capacity(n_r * n_ang);
    for (xi, wi) in x.iter().zip(&w) {
        let u = (xi + 1.0) * std::f64::consts::FRAC_PI_2;
        let wu = wi * std::f64::consts::FRAC_PI_2;
        let r = (u / 2.0).tan();
        let jac = r * (1.0 + r * r) / 2.0 * wu * wa;
        for k in 0..n_ang {
            let alpha = (k as f64 + 0.5) * wa;
            let z = Complex::from_polar(r, alpha);
            let dens = (Complex::new(1.0, 0.0) - z * z).norm().powi(2 * jj as i32)
                / (1.0 + r * r).powi(2 * jj as i32 + 2);
            let qz = (Complex::new(0.0, 1.0) * z).atan() * 2.0;
            q.push(cplx(lit(qz.re), lit(qz.im)));
            zeta.push(cplx(lit(z.re), lit(z.im)));
            weights.push(lit(jac * norm * dens));
        }
    }
    Ok(QGrid {
        j,
        q,
        zeta,
        weights,
    })
}

/// Grid size that reproduces the carrier space to roughly machine
/// precision for the given orbit.
pub fn default_q_grid<T: Real>(j: OrbitLabel) -> QGrid<T> {
    let jj = j.j() as usize;
    q_plane_grid(j, 32 + 4 * jj, 8 + 4 * jj).expect("default sizes are valid")
}

impl<T: Real> QGrid<T> {
    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// `∫ f(q) dμ_j(q)`, summed in node order.
    pub fn integrate<F>(&self, f: F) -> Complex<T>
    where
        F: Fn(Complex<T>) -> Complex<T> + Sync,
    {
        let vals: Vec<Complex<T>> = self.q.par_iter().map(|q| f(*q)).collect();
        vals.iter()
            .zip(&self.weights)
            .fold(zero::<T>(), |s, (v, w)| s + *v * *w)
    }

    /// Sequential variant for use inside already-parallel loops.
    pub fn integrate_seq<F>(&self, f: F) -> Complex<T>
    where
        F: Fn(Complex<T>) -> Complex<T>,
    {
        self.q
            .iter()
            .zip(&self.weights)
            .fold(zero::<T>(), |s, (q, w)| s + f(*q) * *w)
    }

    /// `∫∫ f(q, q′) dμ_j(q) dμ_j(q′)`, parallel over the outer variable.
    pub fn integrate_double<F>(&self, f: F) -> Complex<T>
    where
        F: Fn(Complex<T>, Complex<T>) -> Complex<T> + Sync,
    {
        let rows: Vec<Complex<T>> = self
            .q
            .par_iter()
            .map(|q| self.integrate_seq(|qp| f(*q, qp)))
            .collect();
        rows.iter()
            .zip(&self.weights)
            .fold(zero::<T>(), |s, (v, w)| s + *v * *w)
    }
}

/// Gram matrix of the basis under `μ_j`.
#[derive(Debug, Clone)]
pub struct QMeasure<T: Real> {
    pub j: OrbitLabel,
    pub gram: DMatrix<Complex<T>>,
}

impl<T: Real> QMeasure<T> {
    /// `G_{ab} = ∫ conj(e^{−iaq}) e^{−ibq} dμ_j` by quadrature.
    pub fn from_grid(grid: &QGrid<T>) -> Self {
        let j = grid.j;
        let ji = j.j() as i32;
        let dim = j.dim();
        let i = imag_unit::<T>();
        let basis: Vec<Vec<Complex<T>>> = grid
            .q
            .iter()
            .map(|q| {
                (-ji..=ji)
                    .map(|n| (-(i * *q) * lit::<T>(n as f64)).exp())
                    .collect()
            })
            .collect();
        let mut gram = DMatrix::from_element(dim, dim, zero::<T>());
        for (b, w) in basis.iter().zip(&grid.weights) {
            for r in 0..dim {
                let cr = b[r].conj() * *w;
                for c in 0..dim {
                    gram[(r, c)] += cr * b[c];
                }
            }
        }
        Self { j, gram }
    }

    /// Closed form: diagonal, `G_{nn} = C(2j, j) / C(2j, j+n)`.
    pub fn exact(j: OrbitLabel) -> Self {
        let jj = j.j();
        let dim = j.dim();
        let gram = DMatrix::from_fn(dim, dim, |r, c| {
            if r == c {
                real(lit(binomial(2 * jj, jj) / binomial(2 * jj, r as u32)))
            } else {
                zero()
            }
        });
        Self { j, gram }
    }

    /// `max |G A − A† G|` for `A` the matrix of an operator.
    pub fn self_adjoint_residual(&self, a: &DMatrix<Complex<T>>) -> T {
        let r = &self.gram * a - a.adjoint() * &self.gram;
        r.iter().fold(T::zero(), |m, z| m.max(cabs(*z)))
    }

    /// `min` eigenvalue of the Hermitian part of `G`.
    pub fn min_eigenvalue(&self) -> T {
        let h = (&self.gram + self.gram.adjoint()) * real::<T>(lit(0.5));
        h.symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(T::max_value().unwrap_or(T::one()), |m, v| m.min(*v))
    }

    pub fn hermitian_residual(&self) -> T {
        let r = &self.gram - self.gram.adjoint();
        r.iter().fold(T::zero(), |m, z| m.max(cabs(*z)))
    }
}

/// `δ_j(q, q̄′) = [2^j (j!)²/(2j)!] [1 + cos(q − q̄′)]^j`.
pub fn delta_j<T: Real>(q: Complex<T>, qbar_prime: Complex<T>, j: OrbitLabel) -> Complex<T> {
    let c: T = lit(kernel_norm(j.j()));
    ((q - qbar_prime).cos() + T::one()).powu(j.j()) * c
}

/// The closed-form kernel expression evaluated at the coordinates of `g`.
/// It equals `𝒟^j_{qq̄′}(g⁻¹) = ⟨φ,θ,ψ | j,q,q′⟩`.
pub fn kernel_closed_form<T: Real>(
    q: Complex<T>,
    qbar_prime: Complex<T>,
    g: &GroupElement<T>,
    j: OrbitLabel,
) -> Complex<T> {
    let c: T = lit(kernel_norm(j.j()));
    kernel_base(q, qbar_prime, g).powu(j.j()) * c
}

/// The bracket raised to the `j`-th power in [`kernel_closed_form`].
pub fn kernel_base<T: Real>(
    q: Complex<T>,
    qbar_prime: Complex<T>,
    g: &GroupElement<T>,
) -> Complex<T> {
    let i = imag_unit::<T>();
    let (sp, cp) = g.phi.sin_cos();
    let (st, ct) = g.theta.sin_cos();
    let (sq, cq) = (q.sin(), q.cos());
    let s = real(g.psi) + qbar_prime;
    let (ss, cs) = (s.sin(), s.cos());
    real::<T>(st * cp) + cs * (cq * cp - i * sp) - i * cq * (st * sp) - i * sq * ct
        + ss * (-i * (ct * cp) - cq * (ct * sp) + sq * st)
}

/// Matrix `K[a][b] = kernel_closed_form(q_a, conj(q_b), g)` over the grid
/// nodes, built from the split `P(q) + cos(ψ+q̄′) Q_c(q) + sin(ψ+q̄′) Q_s(q)`.
pub fn kernel_matrix<T: Real>(grid: &QGrid<T>, g: &GroupElement<T>) -> DMatrix<Complex<T>> {
    let i = imag_unit::<T>();
    let j = grid.j.j();
    let c: T = lit(kernel_norm(j));
    let (sp, cp) = g.phi.sin_cos();
    let (st, ct) = g.theta.sin_cos();
    let parts: Vec<[Complex<T>; 3]> = grid
        .q
        .iter()
        .map(|q| {
            let (sq, cq) = (q.sin(), q.cos());
            [
                real::<T>(st * cp) - i * cq * (st * sp) - i * sq * ct,
                cq * cp - i * sp,
                -i * (ct * cp) - cq * (ct * sp) + sq * st,
            ]
        })
        .collect();
    let trig: Vec<(Complex<T>, Complex<T>)> = grid
        .q
        .iter()
        .map(|q| {
            let s = real(g.psi) + q.conj();
            (s.cos(), s.sin())
        })
        .collect();
    let n = grid.len();
    let rows: Vec<Vec<Complex<T>>> = parts
        .par_iter()
        .map(|p| {
            trig.iter()
                .map(|(cs, ss)| (p[0] + *cs * p[1] + *ss * p[2]).powu(j) * c)
                .collect()
        })
        .collect();
    DMatrix::from_fn(n, n, |a, b| rows[a][b])
}

/// `𝒟^j_{qq̄′}(g)`.
pub fn kernel_d<T: Real>(
    q: Complex<T>,
    qbar_prime: Complex<T>,
    g: &GroupElement<T>,
    j: OrbitLabel,
) -> Complex<T> {
    kernel_closed_form(q, qbar_prime, &g.inverse(), j)
}

/// Maximum residuals of the two first-order systems satisfied by
/// `𝒟^j_{qq̄′}(g⁻¹)`: `[ξ_a(g) + ℓ_a(q)]𝒟 = 0` and
/// `[η_a(g) + conj ℓ_a(q′)]𝒟 = 0`.
pub fn kernel_pde_residual<T: Real>(
    q: Complex<T>,
    qbar_prime: Complex<T>,
    g: &GroupElement<T>,
    j: OrbitLabel,
) -> Result<(T, T)> {
    let mut left = T::zero();
    let mut right = T::zero();
    for a in Axis::ALL {
        let fg = |x: &GroupElement<T>| kernel_closed_form(q, qbar_prime, x, j);
        let xi = left_field_apply(a, &fg, g)?;
        let lq = ell_apply(
            a,
            j,
            &|z: Complex<T>| kernel_closed_form(z, qbar_prime, g, j),
            q,
        );
        left = left.max(cabs(xi + lq));
        let eta = right_field_apply(a, &fg, g)?;
        let lqb = ell_conj_apply(
            a,
            j,
            &|z: Complex<T>| kernel_closed_form(q, z, g, j),
            qbar_prime,
        );
        right = right.max(cabs(eta + lqb));
    }
    Ok((left, right))
}

/// Probe values of `q̄′` used to divide the kernel.
pub const FACTOR_PROBES: [(f64, f64); 6] = [
    (0.37, 0.1),
    (-0.8, 0.25),
    (1.9, -0.3),
    (0.05, 0.0),
    (2.7, 0.4),
    (-2.2, -0.15),
];

/// Smallest `|δ_j|` accepted as a divisor.
pub const PROBE_FLOOR: f64 = 1e-8;

/// `U = 𝒟^j_{qq̄′}(g⁻¹) / δ_j(q∘g⁻¹, q̄′)` and `q∘g⁻¹`.
pub fn factor_kernel<T: Real>(
    q: Complex<T>,
    g: &GroupElement<T>,
    j: OrbitLabel,
) -> Result<(Complex<T>, Complex<T>)> {
    let moved = q_action(q, g)?;
    for (re, im) in FACTOR_PROBES {
        let p = cplx(lit(re), lit(im));
        if let Some(u) = factor_with_probe(q, moved, p, g, j) {
            return Ok((u, moved));
        }
    }
    Err(Error::FactorizationDegenerate)
}

fn factor_with_probe<T: Real>(
    q: Complex<T>,
    moved: Complex<T>,
    probe: Complex<T>,
    g: &GroupElement<T>,
    j: OrbitLabel,
) -> Option<Complex<T>> {
    let den = delta_j(moved, probe, j);
    if cabs(den) <= lit(PROBE_FLOOR) {
        return None;
    }
    Some(kernel_closed_form(q, probe, g, j) / den)
}

/// Spread `max |U_p − U_0|` of the factor across all usable probes.
pub fn factor_probe_spread<T: Real>(
    q: Complex<T>,
    g: &GroupElement<T>,
    j: OrbitLabel,
) -> Result<T> {
    let moved = q_action(q, g)?;
    let us: Vec<Complex<T>> = FACTOR_PROBES
        .iter()
        .filter_map(|(re, im)| factor_with_probe(q, moved, cplx(lit(*re), lit(*im)), g, j))
        .collect();
    if us.is_empty() {
        return Err(Error::FactorizationDegenerate);
    }
    let scale = cabs(us[0]).max(T::one());
    Ok(us.iter().fold(T::zero(), |m, u| m.max(cabs(*u - us[0]))) / scale)
}

/// Residuals of the orthogonality and completeness relations of the kernel.
#[derive(Debug, Clone)]
pub struct CompletenessReport {
    /// `max |∫ conj(𝒟^j)𝒟^j dμ(g) − δ_j δ_j/(2j+1)|` over samples.
    pub orthogonality_same: f64,
    /// `max |∫ conj(𝒟^{j̃})𝒟^j dμ(g)|`, `j ≠ j̃`.
    pub orthogonality_cross: f64,
    /// `max |∫∫ conj(𝒟^j(g̃))𝒟^j(g) dμ_j dμ_j − Σ_{mn} conj(D^j_{mn}(g̃))D^j_{mn}(g)|`.
    pub completeness: f64,
    /// Partial sums `Σ_{j ≤ J} (2j+1) ∫∫ |𝒟^j(g)|² dμ_j dμ_j`, `J = 1..j_max`.
    pub partial_sums: Vec<f64>,
}

/// Group integral checks for `j, j̃ ≤ j_max` at pseudo-random labels drawn
/// from `rng`.
pub fn completeness_check<R: rand::Rng>(
    j_max: u32,
    sample_count: usize,
    rng: &mut R,
) -> Result<CompletenessReport> {
    if j_max == 0 || j_max > 4 {
        return Err(Error::Invalid(format!(
            "completeness check supports 1 <= j_max <= 4 (got {j_max})"
        )));
    }
    let n = (2 * j_max + 2) as usize;
    let haar = crate::geometry::haar_grid::<f64>(n, n, n)?;
    let mut rq = || Complex::new(rng.gen_range(-1.5..1.5), rng.gen_range(-0.4..0.4));
    let mut same = 0.0f64;
    let mut cross = 0.0f64;
    for _ in 0..sample_count {
        let (a, ap, b, bp) = (rq(), rq(), rq(), rq());
        for j in 1..=j_max {
            for jt in 1..=j_max {
                let lj = OrbitLabel::new(j as i64)?;
                let ljt = OrbitLabel::new(jt as i64)?;
                let v = haar.integrate(|g| {
                    kernel_closed_form(b, bp.conj(), g, ljt).conj()
                        * kernel_closed_form(a, ap.conj(), g, lj)
                });
                if j == jt {
                    let want =
                        delta_j(a, b.conj(), lj) * delta_j(bp, ap.conj(), lj) / (2 * j + 1) as f64;
                    same = same.max((v - want).norm());
                } else {
                    cross = cross.max(v.norm());
                }
            }
        }
    }
    let mut completeness = 0.0f64;
    let mut partial_sums = Vec::new();
    let mut running = 0.0;
    let g_samples: Vec<GroupElement<f64>> = (0..sample_count.max(1))
        .map(|_| random_group_element(rng))
        .collect();
    for j in 1..=j_max {
        let lj = OrbitLabel::new(j as i64)?;
        let grid = default_q_grid::<f64>(lj);
        for w in g_samples.windows(2).chain(std::iter::once(&g_samples[..1])) {
            let (g, gt) = if w.len() == 2 {
                (w[0], w[1])
            } else {
                (w[0], w[0])
            };
            let v = grid.integrate_double(|q, qp| {
                kernel_closed_form(q, qp.conj(), &gt, lj).conj()
                    * kernel_closed_form(q, qp.conj(), &g, lj)
            });
            let dg = wigner_matrix(j, &g);
            let dgt = wigner_matrix(j, &gt);
            let want = dgt
                .iter()
                .zip(dg.iter())
                .fold(Complex::new(0.0, 0.0), |s, (x, y)| s + x.conj() * y);
            completeness = completeness.max((v - want).norm());
        }
        let g = g_samples[0];
        let v = grid
            .integrate_double(|q, qp| kernel_closed_form(q, qp.conj(), &g, lj).norm_sqr().into());
        running += (2 * j + 1) as f64 * v.re;
        partial_sums.push(running);
    }
    Ok(CompletenessReport {
        orthogonality_same: same,
        orthogonality_cross: cross,
        completeness,
        partial_sums,
    })
}

/// Haar-distributed element: uniform `φ, ψ`, `cos θ` uniform in `[−1, 1]`.
pub fn random_group_element<R: rand::Rng>(rng: &mut R) -> GroupElement<f64> {
    let tau = std::f64::consts::TAU;
    GroupElement::new(
        rng.gen_range(0.0..tau),
        rng.gen_range(-1.0f64..1.0).acos(),
        rng.gen_range(0.0..tau),
    )
}

/// Convenience: `𝒟(g)` on Haar quadrature as a sanity helper for callers
/// integrating kernels over the group.
pub fn integrate_kernel_over_group<T: Real>(
    grid: &QuadratureGrid<T>,
    q: Complex<T>,
    qbar_prime: Complex<T>,
    j: OrbitLabel,
) -> Complex<T> {
    grid.integrate(|g| kernel_closed_form(q, qbar_prime, g, j))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lab(j: i64) -> OrbitLabel {
        OrbitLabel::new(j).unwrap()
    }

    #[test]
    fn ell3_diagonal() {
        let l = ell_matrix::<f64>(Axis::Three, lab(2));
        for n in -2..=2 {
            let c = (n + 2) as usize;
            assert_eq!(l[(c, c)], Complex::new(0.0, -(n as f64)));
        }
    }

    #[test]
    fn ell_algebra() {
        for j in 1..=4 {
            let l: Vec<DMatrix<Complex<f64>>> =
                Axis::ALL.iter().map(|a| ell_matrix(*a, lab(j))).collect();
            let c = &l[0] * &l[1] - &l[1] * &l[0] - &l[2];
            assert!(c.camax() < 1e-12);
            let k = casimir_lambda::<f64>(lab(j));
            let want = DMatrix::<Complex<f64>>::identity(k.nrows(), k.ncols())
                * Complex::new((j * (j + 1)) as f64, 0.0);
            assert!((k - want).camax() < 1e-12);
        }
    }

    #[test]
    fn matrices_match_operators() {
        let j = lab(2);
        let psi = QFunction::new(
            j,
            (0..5)
                .map(|k| Complex::new(0.3 * k as f64 - 0.5, 0.1 * (k * k) as f64))
                .collect(),
        )
        .unwrap();
        let q = Complex::new(0.4, 0.2);
        for a in Axis::ALL {
            let via_matrix = psi.apply(&ell_matrix(a, j)).eval(q);
            let via_op = ell_apply(a, j, &|z| psi.eval(z), q);
            assert!((via_matrix - via_op).norm() < 1e-8, "{a:?}");
        }
    }

    #[test]
    fn tan_sin_eigenfunctions() {
        for j in 1..=3 {
            let l1 = ell_matrix::<f64>(Axis::One, lab(j));
            for m in -(j as i32)..=(j as i32) {
                let f = QFunction::tan_sin(lab(j), m).unwrap();
                let q = Complex::new(0.7, 0.1);
                let direct = (q / 2.0).tan().powi(m) * q.sin().powi(j as i32);
                assert!((f.eval(q) - direct).norm() < 1e-12);
                let lf = f.apply(&(l1.clone() * Complex::new(0.0, 1.0)));
                assert!(
                    (lf.coeffs - f.coeffs.clone() * Complex::new(m as f64, 0.0)).camax() < 1e-12
                );
            }
        }
    }

    #[test]
    fn from_fn_recovers_coefficients() {
        let j = lab(3);
        let psi =
            QFunction::new(j, (0..7).map(|k| Complex::new(k as f64, -1.0)).collect()).unwrap();
        let back = QFunction::from_fn(j, |q| psi.eval(q));
        assert!((back.coeffs - psi.coeffs).camax() < 1e-12);
    }

    #[test]
    fn delta_values() {
        let d = delta_j(Complex::new(0.0, 0.0), Complex::new(0.0, 0.0), lab(1));
        assert!((d - Complex::new(2.0, 0.0)).norm() < 1e-15);
        let d = delta_j(
            Complex::new(std::f64::consts::PI, 0.0),
            Complex::new(0.0, 0.0),
            lab(2),
        );
        assert!(d.norm() < 1e-15);
        let e = GroupElement::<f64>::identity();
        let (q, qb) = (Complex::new(0.3, -0.4), Complex::new(-1.2, 0.25));
        for j in 1..4 {
            assert!((kernel_d(q, qb, &e, lab(j)) - delta_j(q, qb, lab(j))).norm() < 1e-13);
        }
    }

    #[test]
    fn reproducing_and_gram() {
        for j in 1..=3 {
            let grid = default_q_grid::<f64>(lab(j));
            let q0 = Complex::new(0.3, 0.2);
            for n in -(j as i32)..=(j as i32) {
                let e = QFunction::<f64>::basis(lab(j), n).unwrap();
                let v = grid.integrate(|qp| delta_j(q0, qp.conj(), lab(j)) * e.eval(qp));
                assert!((v - e.eval(q0)).norm() < 1e-10, "j={j} n={n}");
            }
            let g = QMeasure::from_grid(&grid);
            let ex = QMeasure::<f64>::exact(lab(j));
            assert!((g.gram.clone() - ex.gram).camax() < 1e-10);
        }
    }

    #[test]
    fn factor_at_identity() {
        let q = Complex::new(0.4, 0.3);
        let (u, moved) = factor_kernel(q, &GroupElement::identity(), lab(1)).unwrap();
        assert!((u - Complex::new(1.0, 0.0)).norm() < 1e-13);
        assert!((moved - q).norm() < 1e-13);
    }

    #[test]
    fn short_grid_rejected() {
        assert!(q_plane_grid::<f64>(lab(1), 4, 8).is_err());
    }
}
