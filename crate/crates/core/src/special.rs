//! Jacobi polynomials, Wigner d/D functions and spherical harmonics.

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::{GroupElement, SpherePoint};
use crate::scalar::{binomial, factorial, lit, polar, Real};

/// `P_n^{(α,β)}(z)` for integer parameters with `α, β ≥ −n`.
///
/// The three-term recurrence is used when `α, β ≥ 0`; otherwise the
/// recurrence can divide by zero and the finite binomial sum is used.
pub fn jacobi_poly<T: Real>(n: i32, alpha: i32, beta: i32, z: T) -> Result<T> {
    if n < 0 || alpha < -n || beta < -n {
        return Err(Error::InvalidDegree { n, alpha, beta });
    }
    if alpha >= 0 && beta >= 0 {
        Ok(jacobi_recurrence(n, alpha, beta, z))
    } else {
        Ok(jacobi_sum(n, alpha, beta, z))
    }
}

fn jacobi_recurrence<T: Real>(n: i32, alpha: i32, beta: i32, z: T) -> T {
    let a: T = lit(alpha as f64);
    let b: T = lit(beta as f64);
    let one = T::one();
    let two: T = lit(2.0);
    let mut p_prev = one;
    if n == 0 {
        return p_prev;
    }
    let mut p = (a + one) + (a + b + two) * (z - one) / two;
    for k in 2..=n {
        let k: T = lit(k as f64);
        let s = two * k + a + b;
        let c0 = two * k * (k + a + b) * (s - two);
        let c1 = (s - one) * (s * (s - two) * z + a * a - b * b);
        let c2 = two * (k + a - one) * (k + b - one) * s;
        let next = (c1 * p - c2 * p_prev) / c0;
        p_prev = p;
        p = next;
    }
    p
}

/// `Σ_s C(n+α, n−s) C(n+β, s) ((z−1)/2)^s ((z+1)/2)^{n−s}`.
pub(crate) fn jacobi_sum<T: Real>(n: i32, alpha: i32, beta: i32, z: T) -> T {
    let half: T = lit(0.5);
    let zm = (z - T::one()) * half;
    let zp = (z + T::one()) * half;
    let na = (n + alpha) as u32;
    let nb = (n + beta) as u32;
    let mut acc = T::zero();
    for s in 0..=n {
        let c = binomial(na, (n - s) as u32) * binomial(nb, s as u32);
        if c != 0.0 {
            acc += lit::<T>(c) * zm.powi(s) * zp.powi(n - s);
        }
    }
    acc
}

/// Index triple `(j, m, n)` with `|m|, |n| ≤ j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WignerIndex {
    pub j: u32,
    pub m: i32,
    pub n: i32,
}

impl WignerIndex {
    pub fn new(j: u32, m: i32, n: i32) -> Result<Self> {
        let ji = j as i32;
        if m.abs() > ji || n.abs() > ji {
            return Err(Error::IndexOutOfRange { j, m, n });
        }
        Ok(Self { j, m, n })
    }

    /// All `(2j+1)²` indices, `m` outer, `n` inner, both ascending.
    pub fn all(j: u32) -> impl Iterator<Item = WignerIndex> {
        let ji = j as i32;
        (-ji..=ji).flat_map(move |m| (-ji..=ji).map(move |n| WignerIndex { j, m, n }))
    }
}

fn sign(k: i32) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `d^j_{mn}(θ)`.
pub fn small_d<T: Real>(idx: WignerIndex, theta: T) -> Result<T> {
    let idx = WignerIndex::new(idx.j, idx.m, idx.n)?;
    Ok(small_d_unchecked(idx.j as i32, idx.m, idx.n, theta))
}

fn small_d_unchecked<T: Real>(j: i32, m: i32, n: i32, theta: T) -> T {
    if m < n {
        return lit::<T>(sign(m - n)) * small_d_unchecked(j, n, m, theta);
    }
    if m + n < 0 {
        return small_d_unchecked(j, -n, -m, theta);
    }
    let half: T = lit(0.5);
    let (s, c) = (theta * half).sin_cos();
    let ratio = factorial((j + m) as u32) * factorial((j - m) as u32)
        / (factorial((j + n) as u32) * factorial((j - n) as u32));
    let pref: T = lit(sign(m - n) * ratio.sqrt());
    pref * s.powi(m - n) * c.powi(m + n) * jacobi_recurrence(j - m, m - n, m + n, theta.cos())
}

/// `D^j_{mn}(g) = e^{i m φ + i n ψ} d^j_{mn}(θ)`.
pub fn wigner_d<T: Real>(idx: WignerIndex, g: &GroupElement<T>) -> Result<Complex<T>> {
    let d = small_d(idx, g.theta)?;
    let phase = lit::<T>(idx.m as f64) * g.phi + lit::<T>(idx.n as f64) * g.psi;
    Ok(polar(d, phase))
}

/// `(2j+1)×(2j+1)` matrix `D[m+j][n+j]`.
pub fn wigner_matrix<T: Real>(j: u32, g: &GroupElement<T>) -> DMatrix<Complex<T>> {
    let ji = j as i32;
    let dim = (2 * j + 1) as usize;
    DMatrix::from_fn(dim, dim, |r, c| {
        let (m, n) = (r as i32 - ji, c as i32 - ji);
        let d = small_d_unchecked(ji, m, n, g.theta);
        polar(d, lit::<T>(m as f64) * g.phi + lit::<T>(n as f64) * g.psi)
    })
}

/// `d^j(θ)` as a real matrix.
pub fn small_d_matrix<T: Real>(j: u32, theta: T) -> DMatrix<T> {
    let ji = j as i32;
    let dim = (2 * j + 1) as usize;
    DMatrix::from_fn(dim, dim, |r, c| {
        small_d_unchecked(ji, r as i32 - ji, c as i32 - ji, theta)
    })
}

/// `Y^j_m(φ, θ) = √((2j+1)/4π) D^j_{m0}(φ, θ, ·)`, orthonormal under
/// `sin θ dθ dφ`.
pub fn spherical_y<T: Real>(j: u32, m: i32, x: &SpherePoint<T>) -> Result<Complex<T>> {
    let idx = WignerIndex::new(j, m, 0)?;
    let pref: T = lit(((2 * j + 1) as f64 / (4.0 * std::f64::consts::PI)).sqrt());
    Ok(wigner_d(idx, &GroupElement::new(x.phi, x.theta, T::zero()))? * pref)
}
