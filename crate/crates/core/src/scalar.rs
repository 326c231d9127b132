//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};

/// Real floating-point scalar: `f32` or `f64`.
///
/// Linear algebra comes from [`RealField`]; conversions from num-traits.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Send + Sync + 'static
{
    /// Converts an `f64` literal, rounding to the nearest representable value.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar over `T`.
pub type C<T> = Complex<T>;

#[inline]
pub fn czero<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub fn creal<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub fn cabs<T: Real>(z: C<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// `exp(2πi·k/d)`, with `k` taken modulo `d`.
///
/// The angle is evaluated in `f64` and rounded once into `T`; multiples of
/// `π/6` use closed forms.
pub fn root_of_unity<T: Real>(d: usize, k: i64) -> C<T> {
    let d_i = d as i64;
    let k = k.rem_euclid(d_i);
    if k == 0 {
        return cone();
    }
    if 2 * k == d_i {
        return creal(-T::one());
    }
    // Multiples of 2π/12 are built from 1/2 and √3/2 so that ω_3, ω_6 and
    // their powers satisfy the usual identities to the last bit.
    if (12 * k) % d_i == 0 {
        let h = T::lit(0.5);
        let r = T::lit(3f64.sqrt() / 2.0);
        let (c, s) = match 12 * k / d_i {
            1 => (r, h),
            2 => (h, r),
            3 => (T::zero(), T::one()),
            4 => (-h, r),
            5 => (-r, h),
            7 => (-r, -h),
            8 => (-h, -r),
            9 => (T::zero(), -T::one()),
            10 => (h, -r),
            11 => (r, -h),
            _ => unreachable!(),
        };
        return Complex::new(c, s);
    }
    let angle = std::f64::consts::TAU * (k as f64) / (d as f64);
    Complex::new(T::lit(angle.cos()), T::lit(angle.sin()))
}

/// Formats a scalar so that parsing it back yields the same value.
pub fn fmt_exact<T: Real>(x: T) -> String {
    let a = x.abs();
    if a == T::zero() || (a >= T::lit(1e-4) && a < T::lit(1e15)) {
        format!("{}", x)
    } else {
        format!("{:e}", x)
    }
}
