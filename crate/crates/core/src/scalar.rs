//! Scalar abstraction shared by every numerical module.

use std::fmt;

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::FromPrimitive;

/// Real scalar type the library is generic over (`f32` or `f64`).
///
/// The tolerances quoted throughout the crate assume `f64`; `f32` works for
/// everything but only at single-precision accuracy.
pub trait Real:
    RealField + Copy + FromPrimitive + fmt::Display + fmt::LowerExp + Send + Sync + 'static
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Literal conversion from `f64`.
#[inline]
pub fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable")
}

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn real<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub fn imag_unit<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

/// `n!` as a float. Exact in `f64` up to `22!`.
pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Integer power of a complex number, allowing negative exponents.
pub fn cpowi<T: Real>(z: Complex<T>, n: i32) -> Complex<T> {
    if n >= 0 {
        z.powu(n as u32)
    } else {
        z.powu(n.unsigned_abs()).inv()
    }
}

/// `r e^{iθ}`.
#[inline]
pub fn polar<T: Real>(r: T, theta: T) -> Complex<T> {
    let (s, c) = theta.sin_cos();
    Complex::new(r * c, r * s)
}

/// Quiet NaN in complex form, used to poison values that failed inside
/// nested finite differences.
#[inline]
pub fn cnan<T: Real>() -> Complex<T> {
    let nan: T = lit(f64::NAN);
    Complex::new(nan, nan)
}

/// Magnitude of a complex number.
#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}
