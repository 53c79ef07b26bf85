//! Scalar abstractions shared by the simulation code.
//!
//! Classical bookkeeping (coupling tables, energies of colorings, variable
//! elimination) only needs ring arithmetic and is generic over
//! [`Coefficient`], so integer tables can be handled exactly. Anything that
//! touches quantum amplitudes needs [`Real`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, Num};

/// Ring-valued coupling coefficient: integers, rationals or floats.
pub trait Coefficient: Num + Copy + PartialOrd + Debug + Send + Sync + 'static {}

impl<T> Coefficient for T where T: Num + Copy + PartialOrd + Debug + Send + Sync + 'static {}

/// Floating point type used for amplitudes and angles (f32 or f64).
pub trait Real:
    Float + FloatConst + FromPrimitive + Coefficient + Display + Default + Sum
{
    /// Converts an `f64` literal; never fails for the implemented types.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn of_usize(x: usize) -> Self {
        Self::from_usize(x).expect("usize representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

pub type Cplx<T> = Complex<T>;

/// Primitive k-th root of unity raised to `power`, i.e. exp(2πi·power/k).
pub fn root_of_unity<T: Real>(k: usize, power: usize) -> Cplx<T> {
    let angle = T::TAU() * T::of_usize(power % k) / T::of_usize(k);
    Complex::from_polar(T::one(), angle)
}

/// Reduces `a` modulo `k` into `0..k`.
#[inline]
pub fn modk(a: i64, k: usize) -> usize {
    a.rem_euclid(k as i64) as usize
}

/// Neumaier-compensated sum of `init` and `terms`, in iteration order.
/// Long sums of pair energies otherwise lose several ulps.
pub fn compensated_sum<T: Real>(init: T, terms: impl IntoIterator<Item = T>) -> T {
    let mut sum = init;
    let mut carry = T::zero();
    for x in terms {
        let t = sum + x;
        carry = carry + if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
        sum = t;
    }
    sum + carry
}
