//! Concrete SO(3) geometry in second-kind canonical coordinates
//! `g(φ, θ, ψ) = e^{ψ e3} e^{(θ − π/2) e2} e^{φ e1}`, its SU(2) lift,
//! invariant vector fields, Haar quadrature and the actions on the sphere
//! and on the λ-representation manifold Q.
//!
//! The so(3) basis is realised in SU(2) as `E1 = iσz/2`, `E2 = iσx/2`,
//! `E3 = −iσy/2`, so that `[Ea, Eb] = ε_abc Ec`. The identity element sits at
//! `(0, π/2, 0)`.

use nalgebra::ComplexField;
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::scalar::{cabs, cnan, cplx, lit, polar, real, Real};

/// Central-difference step for single vector-field applications.
pub const FIELD_STEP: f64 = 1e-5;
/// Step for nested (second-order) finite differences.
pub const NESTED_STEP: f64 = 1e-4;
/// Distance from θ ∈ {0, π} below which `cot θ`, `1/sin θ` are refused.
pub const POLE_TOL: f64 = 1e-6;
/// Bound on the Möbius denominator.
pub const MOBIUS_TOL: f64 = 1e-12;

/// Basis direction `e1`, `e2`, `e3` of so(3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    One,
    Two,
    Three,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::One, Axis::Two, Axis::Three];

    /// 1-based axis number.
    pub fn from_number(a: usize) -> Result<Self> {
        match a {
            1 => Ok(Axis::One),
            2 => Ok(Axis::Two),
            3 => Ok(Axis::Three),
            other => Err(Error::InvalidAxis(other)),
        }
    }

    /// 0-based index.
    pub fn index(self) -> usize {
        match self {
            Axis::One => 0,
            Axis::Two => 1,
            Axis::Three => 2,
        }
    }
}

/// Wrap an angle into `[0, 2π)`.
pub fn wrap_angle<T: Real>(x: T) -> T {
    let tau = T::two_pi();
    let mut y = x - tau * (x / tau).floor();
    if y >= tau || y < T::zero() {
        y = T::zero();
    }
    y
}

/// Unit quaternion-like pair `(α, β)` standing for
/// `[[α, β], [−β*, α*]] ∈ SU(2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SU2Pair<T> {
    pub alpha: Complex<T>,
    pub beta: Complex<T>,
}

/// The three-factor 2×2 product
/// `R(ψ) · X(θ) · Z(φ)` with `R` a real rotation by `ψ/2`, `X` the
/// `iσx` rotation by `θ/2` and `Z = diag(e^{iφ/2}, e^{−iφ/2})`, taken
/// literally at the supplied angles (no `π/2` shift).
pub fn to_su2<T: Real>(phi: T, theta: T, psi: T) -> SU2Pair<T> {
    let two: T = lit(2.0);
    let (sp, cp) = (psi / two).sin_cos();
    let (st, ct) = (theta / two).sin_cos();
    let ephi = polar(T::one(), phi / two);
    let alpha = cplx(cp * ct, -(sp * st)) * ephi;
    let beta = cplx(-(sp * ct), cp * st) * ephi.conj();
    SU2Pair { alpha, beta }
}

impl<T: Real> SU2Pair<T> {
    pub fn identity() -> Self {
        Self {
            alpha: real(T::one()),
            beta: Complex::new(T::zero(), T::zero()),
        }
    }

    /// `exp(t E_a)`.
    pub fn exp_axis(axis: Axis, t: T) -> Self {
        let (s, c) = (t / lit(2.0)).sin_cos();
        let zero = T::zero();
        match axis {
            Axis::One => Self {
                alpha: cplx(c, s),
                beta: cplx(zero, zero),
            },
            Axis::Two => Self {
                alpha: cplx(c, zero),
                beta: cplx(zero, s),
            },
            Axis::Three => Self {
                alpha: cplx(c, zero),
                beta: cplx(-s, zero),
            },
        }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self {
            alpha: self.alpha * rhs.alpha - self.beta * rhs.beta.conj(),
            beta: self.alpha * rhs.beta + self.beta * rhs.alpha.conj(),
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            alpha: self.alpha.conj(),
            beta: -self.beta,
        }
    }

    pub fn neg(&self) -> Self {
        Self {
            alpha: -self.alpha,
            beta: -self.beta,
        }
    }

    /// `| |α|² + |β|² − 1 |`.
    pub fn unitarity_residual(&self) -> T {
        (self.alpha.norm_sqr() + self.beta.norm_sqr() - T::one()).abs()
    }

    /// Representative of `±(α, β)` with `Re α > 0`, or `Re α = 0` and
    /// `Im α ≥ 0` (ties broken on `β` when `α = 0`).
    pub fn canonical_sign(&self) -> Self {
        let a = self.alpha;
        let flip = if a.re != T::zero() {
            a.re < T::zero()
        } else if a.im != T::zero() {
            a.im < T::zero()
        } else if self.beta.re != T::zero() {
            self.beta.re < T::zero()
        } else {
            self.beta.im < T::zero()
        };
        if flip {
            self.neg()
        } else {
            *self
        }
    }

    /// Distance between the SO(3) images, i.e. minimised over the sign.
    pub fn projective_distance(&self, other: &Self) -> T {
        let d_plus =
            ((self.alpha - other.alpha).norm_sqr() + (self.beta - other.beta).norm_sqr()).sqrt();
        let d_minus =
            ((self.alpha + other.alpha).norm_sqr() + (self.beta + other.beta).norm_sqr()).sqrt();
        d_plus.min(d_minus)
    }

    fn matrix(&self) -> [[Complex<T>; 2]; 2] {
        [
            [self.alpha, self.beta],
            [-self.beta.conj(), self.alpha.conj()],
        ]
    }

    /// Adjoint (rotation) matrix `R[c][b]`: `M E_b M⁻¹ = Σ_c R[c][b] E_c`.
    pub fn adjoint_matrix(&self) -> [[T; 3]; 3] {
        let m = self.matrix();
        let mi = self.inverse().matrix();
        let half: T = lit(0.5);
        let zero = T::zero();
        let i_half = cplx(zero, half);
        let gens: [[[Complex<T>; 2]; 2]; 3] = [
            [[i_half, cplx(zero, zero)], [cplx(zero, zero), -i_half]],
            [[cplx(zero, zero), i_half], [i_half, cplx(zero, zero)]],
            [
                [cplx(zero, zero), cplx(-half, zero)],
                [cplx(half, zero), cplx(zero, zero)],
            ],
        ];
        let mut r = [[T::zero(); 3]; 3];
        for (b, e) in gens.iter().enumerate() {
            let y = mat2_mul(&mat2_mul(&m, e), &mi);
            let two: T = lit(2.0);
            r[0][b] = two * y[0][0].im;
            r[1][b] = two * y[0][1].im;
            r[2][b] = -(two * y[0][1].re);
        }
        r
    }

    /// Linear-fractional action `w ↦ (α w + β)/(−β* w + α*)`.
    pub fn mobius(&self, w: Complex<T>) -> Result<Complex<T>> {
        let den = -self.beta.conj() * w + self.alpha.conj();
        if cabs(den) <= lit(MOBIUS_TOL) {
            return Err(Error::MobiusPole);
        }
        Ok((self.alpha * w + self.beta) / den)
    }
}

fn mat2_mul<T: Real>(a: &[[Complex<T>; 2]; 2], b: &[[Complex<T>; 2]; 2]) -> [[Complex<T>; 2]; 2] {
    let mut c = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for i in 0..2 {
        for k in 0..2 {
            c[i][k] = a[i][0] * b[0][k] + a[i][1] * b[1][k];
        }
    }
    c
}

/// A rotation in canonical coordinates `(φ, θ, ψ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupElement<T> {
    pub phi: T,
    pub theta: T,
    pub psi: T,
}

impl<T: Real> GroupElement<T> {
    /// Raw coordinates, not canonicalised.
    pub fn new(phi: T, theta: T, psi: T) -> Self {
        Self { phi, theta, psi }
    }

    /// `(0, π/2, 0)`: all three exponents vanish there.
    pub fn identity() -> Self {
        Self::new(T::zero(), T::frac_pi_2(), T::zero())
    }

    /// `e^{ψ e3}` as a group element.
    pub fn about_e3(psi: T) -> Self {
        Self::new(T::zero(), T::frac_pi_2(), psi)
    }

    /// `e^{φ e1}` as a group element.
    pub fn about_e1(phi: T) -> Self {
        Self::new(phi, T::frac_pi_2(), T::zero())
    }

    /// SU(2) lift: the three-factor product at `(φ, θ − π/2, ψ)`.
    pub fn lift(&self) -> SU2Pair<T> {
        to_su2(self.phi, self.theta - T::frac_pi_2(), self.psi)
    }

    /// Map into the chart ranges `φ, ψ ∈ [0, 2π)`, `θ ∈ [0, π]`.
    pub fn canonical(&self) -> Self {
        if self.theta >= T::zero() && self.theta <= T::pi() {
            Self::new(wrap_angle(self.phi), self.theta, wrap_angle(self.psi))
        } else {
            Self::from_su2(&self.lift())
        }
    }

    /// Read coordinates off an SU(2) element. At `θ ∈ {0, π}` the chart
    /// degenerates and the error carries the `ψ := 0` fallback.
    pub fn try_from_su2(u: &SU2Pair<T>) -> Result<Self> {
        let r = u.adjoint_matrix();
        let cos_t = (r[0][0] * r[0][0] + r[1][0] * r[1][0]).sqrt();
        let t = (-r[2][0]).atan2(cos_t);
        let theta = t + T::frac_pi_2();
        if cos_t < degenerate_tol::<T>() {
            let phi = wrap_angle((-r[1][2]).atan2(r[1][1]));
            return Err(Error::DegenerateChart {
                theta: to_f64(theta),
                fallback: [to_f64(phi), to_f64(theta), 0.0],
            });
        }
        let psi = r[1][0].atan2(r[0][0]);
        let phi = r[2][1].atan2(r[2][2]);
        Ok(Self::new(wrap_angle(phi), theta, wrap_angle(psi)))
    }

    /// [`try_from_su2`](Self::try_from_su2) with the degenerate-chart
    /// fallback applied silently.
    pub fn from_su2(u: &SU2Pair<T>) -> Self {
        match Self::try_from_su2(u) {
            Ok(g) => g,
            Err(Error::DegenerateChart { fallback, .. }) => {
                Self::new(lit(fallback[0]), lit(fallback[1]), T::zero())
            }
            Err(_) => unreachable!("coordinate extraction only fails on the degenerate chart"),
        }
    }

    /// Product `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self::from_su2(&self.lift().mul(&other.lift()))
    }

    pub fn try_compose(&self, other: &Self) -> Result<Self> {
        Self::try_from_su2(&self.lift().mul(&other.lift()))
    }

    pub fn inverse(&self) -> Self {
        Self::from_su2(&self.lift().inverse())
    }

    /// `π(g) = (φ, θ)`.
    pub fn project(&self) -> SpherePoint<T> {
        SpherePoint::new(self.phi, self.theta)
    }

    /// Distance between the underlying rotations (sign-insensitive).
    pub fn distance(&self, other: &Self) -> T {
        self.lift().projective_distance(&other.lift())
    }

    /// Adjoint matrix `(Ad_g)^B_A` (row B, column A).
    pub fn adjoint_matrix(&self) -> [[T; 3]; 3] {
        self.lift().adjoint_matrix()
    }
}

fn degenerate_tol<T: Real>() -> T {
    T::default_epsilon().sqrt() * lit(1e-2)
}

pub(crate) fn to_f64<T: Real>(x: T) -> f64 {
    nalgebra::try_convert(x).unwrap_or(f64::NAN)
}

/// Point `(φ, θ)` on the sphere `SO(3)/SO(2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint<T> {
    pub phi: T,
    pub theta: T,
}

impl<T: Real> SpherePoint<T> {
    pub fn new(phi: T, theta: T) -> Self {
        Self { phi, theta }
    }

    /// Section `s(x) = g(φ, θ, 0)`.
    pub fn section(&self) -> GroupElement<T> {
        GroupElement::new(self.phi, self.theta, T::zero())
    }

    /// Unit vector, used for chart-free comparisons.
    pub fn unit_vector(&self) -> [T; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn distance(&self, other: &Self) -> T {
        let a = self.unit_vector();
        let b = other.unit_vector();
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }
}

/// `x ∘ g = π[s(x) g]`.
pub fn sphere_action<T: Real>(x: &SpherePoint<T>, g: &GroupElement<T>) -> SpherePoint<T> {
    x.section().compose(g).project()
}

pub fn try_sphere_action<T: Real>(
    x: &SpherePoint<T>,
    g: &GroupElement<T>,
) -> Result<SpherePoint<T>> {
    Ok(x.section().try_compose(g)?.project())
}

/// SO(2) angle `ψ_h` with `s(x) g = e^{ψ_h e3} s(x ∘ g)`.
pub fn h_factor<T: Real>(x: &SpherePoint<T>, g: &GroupElement<T>) -> Result<T> {
    Ok(x.section().try_compose(g)?.psi)
}

/// Element carrying `(0, π/2)` to `x` under the right action.
pub fn sphere_transport_to<T: Real>(x: &SpherePoint<T>) -> GroupElement<T> {
    x.section()
}

/// `q ∘ g⁻¹` on Q: `tan(q′/2)` is the Möbius image of `tan(q/2)` under the
/// lift of `g`.
pub fn q_action<T: Real>(q: Complex<T>, g: &GroupElement<T>) -> Result<Complex<T>> {
    let u = g.lift();
    let half: T = lit(0.5);
    let (s, c) = ((q * half).sin(), (q * half).cos());
    let num = u.alpha * s + u.beta * c;
    let den = -u.beta.conj() * s + u.alpha.conj() * c;
    if cabs(den) <= lit::<T>(MOBIUS_TOL) * (cabs(s) + cabs(c)) {
        return Err(Error::MobiusPole);
    }
    Ok((num / den).atan() * lit::<T>(2.0))
}

/// Partial derivatives `(∂φ F, ∂θ F, ∂ψ F)` by central differences.
pub fn partials<T, F>(f: &F, g: &GroupElement<T>, h: T) -> [Complex<T>; 3]
where
    T: Real,
    F: Fn(&GroupElement<T>) -> Complex<T> + ?Sized,
{
    let two_h = h + h;
    let d = |dp: T, dt: T, ds: T| {
        let plus = f(&GroupElement::new(g.phi + dp, g.theta + dt, g.psi + ds));
        let minus = f(&GroupElement::new(g.phi - dp, g.theta - dt, g.psi - ds));
        (plus - minus) / real(two_h)
    };
    let z = T::zero();
    [d(h, z, z), d(z, h, z), d(z, z, h)]
}

fn check_pole<T: Real>(theta: T) -> Result<()> {
    let s = theta.sin().abs();
    if s < lit(POLE_TOL) {
        return Err(Error::SingularChart {
            theta: to_f64(theta),
            tol: POLE_TOL,
        });
    }
    Ok(())
}

/// Coefficients of `ξ_a` on `(∂φ, ∂θ, ∂ψ)`.
pub fn left_field_coefficients<T: Real>(axis: Axis, g: &GroupElement<T>) -> Result<[T; 3]> {
    let (sp, cp) = g.phi.sin_cos();
    let z = T::zero();
    Ok(match axis {
        Axis::One => [T::one(), z, z],
        Axis::Two => {
            check_pole(g.theta)?;
            let (st, ct) = g.theta.sin_cos();
            [-(ct / st) * sp, cp, sp / st]
        }
        Axis::Three => {
            check_pole(g.theta)?;
            let (st, ct) = g.theta.sin_cos();
            [-(ct / st) * cp, -sp, cp / st]
        }
    })
}

/// Coefficients of `η_a` on `(∂φ, ∂θ, ∂ψ)`.
pub fn right_field_coefficients<T: Real>(axis: Axis, g: &GroupElement<T>) -> Result<[T; 3]> {
    let (ss, cs) = g.psi.sin_cos();
    let z = T::zero();
    Ok(match axis {
        Axis::One => {
            check_pole(g.theta)?;
            let (st, ct) = g.theta.sin_cos();
            [-cs / st, ss, cs * ct / st]
        }
        Axis::Two => {
            check_pole(g.theta)?;
            let (st, ct) = g.theta.sin_cos();
            [-ss / st, -cs, ss * ct / st]
        }
        Axis::Three => [z, z, -T::one()],
    })
}

fn apply_coefficients<T: Real>(coef: [T; 3], d: [Complex<T>; 3]) -> Complex<T> {
    d[0] * coef[0] + d[1] * coef[1] + d[2] * coef[2]
}

/// `(ξ_a F)(g)` with step `h`.
pub fn left_field_apply_with_step<T, F>(
    axis: Axis,
    f: &F,
    g: &GroupElement<T>,
    h: T,
) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&GroupElement<T>) -> Complex<T> + ?Sized,
{
    let coef = left_field_coefficients(axis, g)?;
    Ok(apply_coefficients(coef, partials(f, g, h)))
}

/// `(η_a F)(g)` with step `h`.
pub fn right_field_apply_with_step<T, F>(
    axis: Axis,
    f: &F,
    g: &GroupElement<T>,
    h: T,
) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&GroupElement<T>) -> Complex<T> + ?Sized,
{
    let coef = right_field_coefficients(axis, g)?;
    Ok(apply_coefficients(coef, partials(f, g, h)))
}

/// `(ξ_a F)(g)`, generator of right shifts, step [`FIELD_STEP`].
pub fn left_field_apply<T, F>(axis: Axis, f: &F, g: &GroupElement<T>) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&GroupElement<T>) -> Complex<T> + ?Sized,
{
    left_field_apply_with_step(axis, f, g, lit(FIELD_STEP))
}

/// `(η_a F)(g)`, generator of left shifts, step [`FIELD_STEP`].
pub fn right_field_apply<T, F>(axis: Axis, f: &F, g: &GroupElement<T>) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&GroupElement<T>) -> Complex<T> + ?Sized,
{
    right_field_apply_with_step(axis, f, g, lit(FIELD_STEP))
}

/// One of the invariant vector fields: `ξ_a` (left-invariant) or `η_a`
/// (right-invariant).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Left(Axis),
    Right(Axis),
}

/// `(X F)(g)` for a field `X` with step `h`.
pub fn field_apply_with_step<T, F>(
    field: Field,
    f: &F,
    g: &GroupElement<T>,
    h: T,
) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&GroupElement<T>) -> Complex<T> + ?Sized,
{
    match field {
        Field::Left(a) => left_field_apply_with_step(a, f, g, h),
        Field::Right(a) => right_field_apply_with_step(a, f, g, h),
    }
}

/// `(X Y F)(g)` with the nested step [`NESTED_STEP`] on both levels.
pub fn nested_field_apply<T, F>(
    outer: Field,
    inner: Field,
    f: &F,
    g: &GroupElement<T>,
) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&GroupElement<T>) -> Complex<T> + ?Sized,
{
    let h: T = lit(NESTED_STEP);
    // Inner failures can only come from the pole check, which the outer
    // point already passed at a distance much larger than `h`.
    let inner_fn =
        |x: &GroupElement<T>| field_apply_with_step(inner, f, x, h).unwrap_or_else(|_| cnan());
    field_apply_with_step(outer, &inner_fn, g, h)
}

/// `([X, Y] F)(g)` by nested differences.
pub fn field_commutator<T, F>(x: Field, y: Field, f: &F, g: &GroupElement<T>) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&GroupElement<T>) -> Complex<T> + ?Sized,
{
    Ok(nested_field_apply(x, y, f, g)? - nested_field_apply(y, x, f, g)?)
}

/// `(X_a X_b F)(g)` within one family (`left` selects `ξ`, otherwise `η`).
pub fn nested_apply<T, F>(
    left: bool,
    a: Axis,
    b: Axis,
    f: &F,
    g: &GroupElement<T>,
) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&GroupElement<T>) -> Complex<T> + ?Sized,
{
    let wrap = |ax| {
        if left {
            Field::Left(ax)
        } else {
            Field::Right(ax)
        }
    };
    nested_field_apply(wrap(a), wrap(b), f, g)
}

/// Casimir `K(−iξ) F = −Σ_a ξ_a² F` (or with `η` when `left` is false).
pub fn casimir_apply<T, F>(left: bool, f: &F, g: &GroupElement<T>) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&GroupElement<T>) -> Complex<T> + ?Sized,
{
    let mut s = Complex::new(T::zero(), T::zero());
    for a in Axis::ALL {
        s -= nested_apply(left, a, a, f, g)?;
    }
    Ok(s)
}

/// Definition route for `ξ_a`: `d/dt F(g e^{t E_a})` at `t = 0`.
pub fn left_flow_derivative<T, F>(axis: Axis, f: &F, g: &GroupElement<T>, h: T) -> Complex<T>
where
    T: Real,
    F: Fn(&GroupElement<T>) -> Complex<T> + ?Sized,
{
    let u = g.lift();
    let plus = GroupElement::from_su2(&u.mul(&SU2Pair::exp_axis(axis, h)));
    let minus = GroupElement::from_su2(&u.mul(&SU2Pair::exp_axis(axis, -h)));
    (f(&plus) - f(&minus)) / real(h + h)
}

/// Definition route for `η_a`: `d/dt F(e^{−t E_a} g)` at `t = 0`.
pub fn right_flow_derivative<T, F>(axis: Axis, f: &F, g: &GroupElement<T>, h: T) -> Complex<T>
where
    T: Real,
    F: Fn(&GroupElement<T>) -> Complex<T> + ?Sized,
{
    let u = g.lift();
    let plus = GroupElement::from_su2(&SU2Pair::exp_axis(axis, -h).mul(&u));
    let minus = GroupElement::from_su2(&SU2Pair::exp_axis(axis, h).mul(&u));
    (f(&plus) - f(&minus)) / real(h + h)
}

/// Generators `X_a` of the right action on the sphere.
pub fn sphere_generator_apply_with_step<T, F>(
    axis: Axis,
    f: &F,
    x: &SpherePoint<T>,
    h: T,
) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&SpherePoint<T>) -> Complex<T> + ?Sized,
{
    let two_h = real(h + h);
    let dphi = (f(&SpherePoint::new(x.phi + h, x.theta))
        - f(&SpherePoint::new(x.phi - h, x.theta)))
        / two_h;
    if axis == Axis::One {
        return Ok(dphi);
    }
    check_pole(x.theta)?;
    let dtheta = (f(&SpherePoint::new(x.phi, x.theta + h))
        - f(&SpherePoint::new(x.phi, x.theta - h)))
        / two_h;
    let (sp, cp) = x.phi.sin_cos();
    let cot = x.theta.cos() / x.theta.sin();
    Ok(match axis {
        Axis::Two => dphi * (-(cot * sp)) + dtheta * cp,
        _ => dphi * (-(cot * cp)) - dtheta * sp,
    })
}

pub fn sphere_generator_apply<T, F>(axis: Axis, f: &F, x: &SpherePoint<T>) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&SpherePoint<T>) -> Complex<T> + ?Sized,
{
    sphere_generator_apply_with_step(axis, f, x, lit(FIELD_STEP))
}

/// `K(−iX) F = −Σ_a X_a² F` on the sphere, nested step [`NESTED_STEP`].
pub fn sphere_casimir_apply<T, F>(f: &F, x: &SpherePoint<T>) -> Result<Complex<T>>
where
    T: Real,
    F: Fn(&SpherePoint<T>) -> Complex<T> + ?Sized,
{
    let h: T = lit(NESTED_STEP);
    let mut s = Complex::new(T::zero(), T::zero());
    for a in Axis::ALL {
        let inner = |y: &SpherePoint<T>| {
            sphere_generator_apply_with_step(a, f, y, h).unwrap_or_else(|_| cnan())
        };
        s -= sphere_generator_apply_with_step(a, &inner, x, h)?;
    }
    Ok(s)
}

/// Product quadrature for the normalised Haar measure
/// `dμ(g) = sin θ dθ dφ dψ / (8π²)`.
#[derive(Debug, Clone)]
pub struct QuadratureGrid<T> {
    pub nodes: Vec<GroupElement<T>>,
    pub weights: Vec<T>,
    pub shape: [usize; 3],
}

/// Gauss–Legendre in `cos θ`, periodic trapezoid in `φ` and `ψ`.
pub fn haar_grid<T: Real>(n_theta: usize, n_phi: usize, n_psi: usize) -> Result<QuadratureGrid<T>> {
    if n_theta < 2 || n_phi == 0 || n_psi == 0 {
        return Err(Error::Invalid(format!(
            "Haar grid needs n_theta >= 2 and positive n_phi, n_psi (got {n_theta}, {n_phi}, {n_psi})"
        )));
    }
    let (x, w) = gauss_legendre::<T>(n_theta);
    let total: T = w.iter().fold(T::zero(), |s, v| s + *v);
    let mut nodes = Vec::with_capacity(n_theta * n_phi * n_psi);
    let mut weights = Vec::with_capacity(nodes.capacity());
    let dphi = T::two_pi() / lit(n_phi as f64);
    let dpsi = T::two_pi() / lit(n_psi as f64);
    let per = T::one() / lit((n_phi * n_psi) as f64);
    for (xi, wi) in x.iter().zip(&w) {
        let theta = xi.acos();
        for a in 0..n_phi {
            for b in 0..n_psi {
                nodes.push(GroupElement::new(
                    dphi * lit(a as f64),
                    theta,
                    dpsi * lit(b as f64),
                ));
                weights.push(*wi / total * per);
            }
        }
    }
    Ok(QuadratureGrid {
        nodes,
        weights,
        shape: [n_theta, n_phi, n_psi],
    })
}

impl<T: Real> QuadratureGrid<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫ f dμ(g)`. Node values are computed in parallel and summed in node
    /// order, so the result does not depend on scheduling.
    pub fn integrate<F>(&self, f: F) -> Complex<T>
    where
        F: Fn(&GroupElement<T>) -> Complex<T> + Sync,
    {
        let vals: Vec<Complex<T>> = self.nodes.par_iter().map(&f).collect();
        vals.iter()
            .zip(&self.weights)
            .fold(Complex::new(T::zero(), T::zero()), |s, (v, w)| s + *v * *w)
    }

    pub fn weight_sum(&self) -> T {
        self.weights.iter().fold(T::zero(), |s, w| s + *w)
    }
}

/// Product quadrature on the sphere for `dμ(x) = sin θ dθ dφ` (total `4π`).
#[derive(Debug, Clone)]
pub struct SphereGrid<T> {
    pub nodes: Vec<SpherePoint<T>>,
    pub weights: Vec<T>,
}

pub fn sphere_grid<T: Real>(n_theta: usize, n_phi: usize) -> Result<SphereGrid<T>> {
    if n_theta < 2 || n_phi == 0 {
        return Err(Error::Invalid(format!(
            "sphere grid needs n_theta >= 2, n_phi >= 1 (got {n_theta}, {n_phi})"
        )));
    }
    let (x, w) = gauss_legendre::<T>(n_theta);
    let dphi = T::two_pi() / lit(n_phi as f64);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for (xi, wi) in x.iter().zip(&w) {
        for a in 0..n_phi {
            nodes.push(SpherePoint::new(dphi * lit(a as f64), xi.acos()));
            weights.push(*wi * dphi);
        }
    }
    Ok(SphereGrid { nodes, weights })
}

impl<T: Real> SphereGrid<T> {
    pub fn integrate<F>(&self, f: F) -> Complex<T>
    where
        F: Fn(&SpherePoint<T>) -> Complex<T> + Sync,
    {
        let vals: Vec<Complex<T>> = self.nodes.par_iter().map(&f).collect();
        vals.iter()
            .zip(&self.weights)
            .fold(Complex::new(T::zero(), T::zero()), |s, (v, w)| s + *v * *w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn g(phi: f64, theta: f64, psi: f64) -> GroupElement<f64> {
        GroupElement::new(phi, theta, psi)
    }

    #[test]
    fn to_su2_trivial_values() {
        let u = to_su2(0.0f64, 0.0, 0.0);
        assert_eq!(u.alpha, Complex::new(1.0, 0.0));
        assert_eq!(u.beta, Complex::new(0.0, 0.0));
        let phi = 0.83;
        let u = to_su2(phi, 0.0, 0.0);
        assert!((u.alpha - Complex::from_polar(1.0, phi / 2.0)).norm() < 1e-15);
        assert!(u.beta.norm() < 1e-15);
    }

    #[test]
    fn identity_lifts_to_one() {
        let u = GroupElement::<f64>::identity().lift();
        assert!((u.alpha - Complex::new(1.0, 0.0)).norm() < 1e-15);
        assert!(u.beta.norm() < 1e-15);
        let e = GroupElement::<f64>::identity();
        assert!(e.compose(&e).distance(&e) < 1e-15);
    }

    #[test]
    fn extraction_inverts_lift() {
        let x = g(1.0, 0.7, 2.0);
        let y = GroupElement::try_from_su2(&x.lift()).unwrap();
        assert!(
            (y.phi - 1.0).abs() < 1e-13
                && (y.theta - 0.7).abs() < 1e-13
                && (y.psi - 2.0).abs() < 1e-13
        );
    }

    #[test]
    fn degenerate_chart_reports_fallback() {
        let x = g(0.4, 0.0, 1.1);
        match GroupElement::try_from_su2(&x.lift()) {
            Err(Error::DegenerateChart { fallback, .. }) => {
                assert_eq!(fallback[2], 0.0);
                let fb = GroupElement::new(fallback[0], fallback[1], fallback[2]);
                assert!(fb.distance(&x) < 1e-7);
            }
            other => panic!("expected degenerate chart, got {other:?}"),
        }
        let fb = GroupElement::from_su2(&x.lift());
        assert!(fb.distance(&x) < 1e-7);
    }

    #[test]
    fn adjoint_of_axis_rotation_is_standard() {
        let r = SU2Pair::<f64>::exp_axis(Axis::Three, 0.3).adjoint_matrix();
        assert!((r[0][0] - 0.3f64.cos()).abs() < 1e-15);
        assert!((r[1][0] - 0.3f64.sin()).abs() < 1e-15);
        assert!((r[2][2] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lift_matches_exponential_product() {
        // e^{ψE3} e^{(θ−π/2)E2} e^{φE1}
        let (phi, theta, psi) = (0.9, 2.1, 4.0);
        let prod = SU2Pair::exp_axis(Axis::Three, psi)
            .mul(&SU2Pair::exp_axis(Axis::Two, theta - PI / 2.0))
            .mul(&SU2Pair::exp_axis(Axis::One, phi));
        let u = g(phi, theta, psi).lift();
        assert!((u.alpha - prod.alpha).norm() < 1e-15 && (u.beta - prod.beta).norm() < 1e-15);
    }

    #[test]
    fn coefficient_fields_match_flows() {
        let f = |x: &GroupElement<f64>| {
            let u = x.lift();
            u.alpha * u.alpha * Complex::new(0.3, 1.0)
                + u.beta * u.alpha
                + u.beta.conj() * u.alpha * 2.0
        };
        let at = g(1.0, 0.7, 2.0);
        for a in Axis::ALL {
            let flow = left_flow_derivative(a, &f, &at, 1e-5);
            let coef = left_field_apply(a, &f, &at).unwrap();
            assert!((flow - coef).norm() < 1e-8, "xi {a:?}");
            let flow = right_flow_derivative(a, &f, &at, 1e-5);
            let coef = right_field_apply(a, &f, &at).unwrap();
            assert!((flow - coef).norm() < 1e-8, "eta {a:?}");
        }
    }

    #[test]
    fn field_values_on_coordinates() {
        let at = g(1.3, 1.0, 0.4);
        let v = left_field_apply(
            Axis::One,
            &|x: &GroupElement<f64>| Complex::new(x.phi, 0.0),
            &at,
        )
        .unwrap();
        assert!((v.re - 1.0).abs() < 1e-9);
        let v = right_field_apply(
            Axis::Three,
            &|x: &GroupElement<f64>| Complex::new(x.psi, 0.0),
            &at,
        )
        .unwrap();
        assert!((v.re + 1.0).abs() < 1e-9);
    }

    #[test]
    fn pole_is_refused() {
        let at = g(1.0, 1e-8, 0.0);
        let f = |x: &GroupElement<f64>| Complex::new(x.phi, 0.0);
        assert!(matches!(
            left_field_apply(Axis::Two, &f, &at),
            Err(Error::SingularChart { .. })
        ));
        assert!(matches!(
            right_field_apply(Axis::One, &f, &at),
            Err(Error::SingularChart { .. })
        ));
        assert!(left_field_apply(Axis::One, &f, &at).is_ok());
    }

    #[test]
    fn haar_weights() {
        let grid = haar_grid::<f64>(8, 6, 5).unwrap();
        assert!((grid.weight_sum() - 1.0).abs() < 1e-14);
        let c = grid.integrate(|x| Complex::new(x.theta.cos(), 0.0));
        assert!(c.norm() < 1e-14);
        assert!(haar_grid::<f64>(1, 4, 4).is_err());
    }

    #[test]
    fn sphere_action_about_e3_axis() {
        // right action by e^{φ0 e1} shifts φ
        let x = SpherePoint::new(0.4, 1.2);
        let y = sphere_action(&x, &GroupElement::about_e1(0.5));
        assert!((y.phi - 0.9).abs() < 1e-10 && (y.theta - 1.2).abs() < 1e-10);
    }

    #[test]
    fn q_action_identity_and_pole() {
        let q = Complex::new(0.3, 0.2);
        let e = GroupElement::<f64>::identity();
        assert!((q_action(q, &e).unwrap() - q).norm() < 1e-14);
    }

    #[test]
    fn canonical_wraps() {
        let x = g(-0.5, 0.3, 7.0).canonical();
        assert!((x.phi - (2.0 * PI - 0.5)).abs() < 1e-14);
        assert!((x.psi - (7.0 - 2.0 * PI)).abs() < 1e-14);
        let y = g(0.2, -0.4, 0.1);
        let yc = y.canonical();
        assert!(yc.theta >= 0.0 && yc.theta <= PI);
        assert!(yc.distance(&y) < 1e-12);
    }
}
