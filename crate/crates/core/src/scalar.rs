//! Scalar traits shared by the scaled structures.
//!
//! [`Scalar`] is the element type of a scaled number structure: reals,
//! complex numbers, or exact rationals. [`Real`] is the floating-point type
//! used for coordinates, scales and lattice data. [`LinearScalar`] refines
//! `Scalar` with the modulus and embedding a vector space needs.

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, One, Signed, Zero};
use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Floating-point type for coordinates, scaling fields and lattices. Every
/// such float is also a [`Scalar`] and its own [`LinearScalar`], so a real
/// scaling factor can label a number structure or a vector space directly.
pub trait Real:
    Float
    + FloatConst
    + NumAssign
    + FromPrimitive
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + Scalar
    + LinearScalar<Real = Self>
{
}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into the working float type.
///
/// Panics if the literal is not representable, which cannot happen for the
/// fixed constants this crate feeds it.
pub fn real<T: Real>(x: f64) -> T {
    T::from_f64(x).expect("literal not representable in this float type")
}

/// Element of a scaled number structure.
///
/// The type must be a field under the ordinary operations; the structure
/// machinery in [`crate::arithmetic`] builds the scaled operations on top.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Display
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Zero
    + One
{
    /// Complex conjugate. Identity for real and rational scalars.
    fn conjugate(&self) -> Self;

    /// True when using this factor as a map parameter reverses the order of
    /// a scaled real structure. Negative reals do; complex factors never do
    /// because the complex structures carry no order.
    fn flips_order(&self) -> bool;

    /// True when the value lies on the real axis.
    fn is_real(&self) -> bool;
}

impl Scalar for f32 {
    fn conjugate(&self) -> Self {
        *self
    }
    fn flips_order(&self) -> bool {
        *self < 0.0
    }
    fn is_real(&self) -> bool {
        true
    }
}

impl Scalar for f64 {
    fn conjugate(&self) -> Self {
        *self
    }
    fn flips_order(&self) -> bool {
        *self < 0.0
    }
    fn is_real(&self) -> bool {
        true
    }
}

impl<T: Real> Scalar for Complex<T> {
    fn conjugate(&self) -> Self {
        self.conj()
    }
    fn flips_order(&self) -> bool {
        false
    }
    fn is_real(&self) -> bool {
        self.im.is_zero()
    }
}

impl Scalar for BigRational {
    fn conjugate(&self) -> Self {
        self.clone()
    }
    fn flips_order(&self) -> bool {
        self.is_negative()
    }
    fn is_real(&self) -> bool {
        true
    }
}

/// Scalar usable as the component type of a scaled vector space.
///
/// Vector spaces here have complex (or real) components but always a real
/// scaling factor, so the scalar must expose its real subfield.
pub trait LinearScalar: Scalar {
    type Real: Real + Scalar;

    /// Embeds a real number into the scalar.
    fn from_real(r: Self::Real) -> Self;

    /// Squared modulus as a real number.
    fn modulus_sq(&self) -> Self::Real;

    /// Real part.
    fn real_part(&self) -> Self::Real;
}

impl LinearScalar for f32 {
    type Real = f32;
    fn from_real(r: f32) -> Self {
        r
    }
    fn modulus_sq(&self) -> f32 {
        self * self
    }
    fn real_part(&self) -> f32 {
        *self
    }
}

impl LinearScalar for f64 {
    type Real = f64;
    fn from_real(r: f64) -> Self {
        r
    }
    fn modulus_sq(&self) -> f64 {
        self * self
    }
    fn real_part(&self) -> f64 {
        *self
    }
}

impl<T: Real> LinearScalar for Complex<T> {
    type Real = T;
    fn from_real(r: T) -> Self {
        Complex::new(r, T::zero())
    }
    fn modulus_sq(&self) -> T {
        self.norm_sqr()
    }
    fn real_part(&self) -> T {
        self.re
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn negative_reals_flip_order_and_complex_factors_do_not() {
        assert!((-2.0f64).flips_order());
        assert!(!2.0f64.flips_order());
        assert!(!Complex::new(0.0f64, 1.0).flips_order());
        assert!(!Complex::new(-3.0f64, 0.0).flips_order());
    }

    #[test]
    fn conjugation_is_identity_on_reals_and_mirrors_complex() {
        assert_eq!(3.5f64.conjugate(), 3.5);
        let z = Complex::new(1.0f64, -2.0);
        assert_eq!(z.conjugate(), Complex::new(1.0, 2.0));
        assert!(Complex::new(4.0f64, 0.0).is_real());
        assert!(!z.is_real());
    }

    #[test]
    fn rational_scalars_are_exact() {
        use num_bigint::BigInt;
        let r = BigRational::new(BigInt::from(2), BigInt::from(3));
        let s = BigRational::new(BigInt::from(3), BigInt::from(2));
        assert!((r.clone() * s).is_one());
        assert!((-r).flips_order());
    }
}
