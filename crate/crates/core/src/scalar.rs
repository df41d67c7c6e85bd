//! Floating-point abstraction shared by the estimators.
//!
//! Spectral, Whittle and CUSUM code is written once against [`Scalar`] and
//! instantiated for `f32` and `f64`. Simulation and Monte Carlo code is
//! `f64` only.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// floating point: f32 or f64
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + FftNum + Sum + Debug + Display + Send + Sync + 'static
{
    /// Converts an `f64` literal; infallible for the implementing types.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_exact(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Neumaier (improved Kahan) running sum.
#[derive(Debug, Clone, Copy)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator.
pub fn csum<T: Scalar, I: IntoIterator<Item = T>>(iter: I) -> T {
    let mut acc = CompensatedSum::new();
    for x in iter {
        acc.add(x);
    }
    acc.value()
}

/// Compensated arithmetic mean; `NaN` for an empty slice.
pub fn cmean<T: Scalar>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::nan();
    }
    csum(xs.iter().copied()) / T::from_usize_exact(xs.len())
}
