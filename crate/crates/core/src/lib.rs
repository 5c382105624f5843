//! Maslov-type P-indices, splitting numbers, Bott-type iteration formulas and
//! a dual-action orbit finder for P-symmetric closed characteristics on
//! partially symmetric convex hypersurfaces.
//!
//! Numeric code is generic over [`Scalar`]; the aliases at the bottom fix the
//! production type `f64`.

pub mod dual;
pub mod error;
pub mod geometry;
pub mod index;
pub mod normal_form;
pub mod path;
pub mod scalar;
pub mod sym;

pub use error::{Error, Result};
pub use scalar::{Mat, Scalar};
pub use sym::{Dim, Tolerances};

pub type SymplecticMatrixF64 = sym::SymplecticMatrix<f64>;
pub type UnitCircleF64 = sym::UnitCircleValue<f64>;
