//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All algorithms are written once against [`Real`] and instantiated for
//! `f64` (the default, see the aliases in the crate root) and `f32`.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Real floating-point scalar: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal into this scalar type.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex number over a [`Real`] scalar.
pub type Cplx<T> = Complex<T>;

#[inline]
pub(crate) fn re<T: Real>(x: T) -> Cplx<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub(crate) fn im<T: Real>(x: T) -> Cplx<T> {
    Complex::new(T::zero(), x)
}

/// `e^{i x}`
#[inline]
pub(crate) fn cis<T: Real>(x: T) -> Cplx<T> {
    Complex::new(x.cos(), x.sin())
}
