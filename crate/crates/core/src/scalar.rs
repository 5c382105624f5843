//! Scalar abstraction shared by every numeric routine in the crate.

use nalgebra::{DMatrix, RealField};
use num_complex::Complex;
use num_traits::{FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};

/// Real scalar the index machinery is written over.
///
/// `f64` is the production type. `f32` satisfies the bound and works for the
/// structural operations (normal forms, ⋄-products, closed-form iteration
/// counts); the default tolerances are calibrated for double precision.
pub trait Scalar:
    RealField + Copy + FromPrimitive + ToPrimitive + Default + Display + Debug + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: RealField
        + Copy
        + FromPrimitive
        + ToPrimitive
        + Default
        + Display
        + Debug
        + Send
        + Sync
        + 'static
{
}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("scalar must represent f64 literals")
}

#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub type Mat<T> = DMatrix<T>;
pub type CMat<T> = DMatrix<Complex<T>>;

pub fn complexify<T: Scalar>(m: &Mat<T>) -> CMat<T> {
    m.map(|x| Complex::new(x, T::zero()))
}

/// Largest absolute entry.
pub fn max_abs<T: Scalar>(m: &Mat<T>) -> T {
    m.iter().fold(T::zero(), |acc, &x| acc.max(x.abs()))
}
