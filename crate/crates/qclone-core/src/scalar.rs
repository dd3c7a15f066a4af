//! Real scalar abstraction backing all matrix and state arithmetic.
//!
//! Everything in this crate is generic over a real floating-point type
//! `T: Scalar`; complex amplitudes are `num_complex::Complex<T>`. The
//! concrete aliases at the crate root pin `T = f64`, which is what the
//! tolerances used throughout are calibrated for. An `f32` instantiation
//! works but cannot be expected to meet the default residual thresholds.

use std::fmt::{Debug, Display};
use std::iter::{Product, Sum};

use num_complex::Complex;
use num_traits::{Float, FromPrimitive};

/// Real floating-point scalar usable as the base field of the toolkit.
pub trait Scalar:
    Float + FromPrimitive + Sum + Product + Debug + Display + Send + Sync + 'static
{
    /// Lifts an `f64` constant (tolerances, literals) into the scalar type.
    fn real(x: f64) -> Self {
        Self::from_f64(x).expect("constant not representable in scalar type")
    }

    /// Complex zero.
    fn czero() -> Complex<Self> {
        Complex::new(Self::zero(), Self::zero())
    }

    /// Complex one.
    fn cone() -> Complex<Self> {
        Complex::new(Self::one(), Self::zero())
    }

    /// Embeds a real value on the real axis.
    fn creal(x: Self) -> Complex<Self> {
        Complex::new(x, Self::zero())
    }
}

impl<T> Scalar for T where
    T: Float + FromPrimitive + Sum + Product + Debug + Display + Send + Sync + 'static
{
}
