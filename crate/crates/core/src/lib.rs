//! Arithmetic, calculus and geometry over scaled number structures.
//!
//! Ordinary ("Diophantine") arithmetic identifies a number with its value.
//! This crate keeps the two apart: a number is an element of a fixed base
//! set, and every nonzero scaling factor `t` labels a structure in which
//! that element has value `base / t`. Field operations are arranged so the
//! axioms hold for values inside every structure, and two families of maps
//! move material between structures, one preserving values and one
//! preserving numbers.
//!
//! Promoting the scaling factor to a positive field `g(y) = exp(alpha(y))`
//! over spacetime attaches a structure to every point. Comparing quantities
//! at different points then requires a connection, and the gradient
//! `A = grad alpha` shows up as a drag term in derivatives, integrals, the
//! Dirac Lagrangian density, and path lengths. The modules below follow that
//! ladder:
//!
//! * [`scalar`]: scalar traits shared by everything else;
//! * [`expr`]: a small differentiable expression language for field input;
//! * [`arithmetic`]: scaled numbers, their field operations, and the
//!   value-changing / number-changing maps;
//! * [`linear`]: scaled vector spaces with norms and scalar products;
//! * [`field`]: the scaling field `g`, its fibers, and the local-flatness
//!   validator;
//! * [`calculus`]: scaled integrals and derivatives of sections;
//! * [`dirac`]: gamma algebra, the modified U(1) Lagrangian density, and
//!   gauge transformations;
//! * [`geometry`]: scaled path lengths, geodesics, and a variational
//!   cross-check;
//! * [`config`]: TOML readers for the CLI file formats;
//! * [`selftest`]: the randomized acceptance checks behind `localmath
//!   selftest`.

pub mod arithmetic;
pub mod calculus;
pub mod config;
pub mod dirac;
pub mod expr;
pub mod field;
pub mod geometry;
pub mod linear;
pub mod scalar;
pub mod selftest;
mod sweep;

pub use arithmetic::{natural_value_table, NaturalValueEntry, ScaledNumber, StructureTag};
pub use field::{Axis, FieldSpec, Grid, Point};

/// Scaled real line over `f64`.
pub type RealTag = StructureTag<f64>;
/// Scaled complex plane over `f64` components.
pub type ComplexTag = StructureTag<num_complex::Complex<f64>>;
/// Scaled rational line with exact arithmetic.
pub type RationalTag = StructureTag<num_rational::BigRational>;
/// Scaled spinor space: complex components, real nonzero scale.
pub type SpinorSpace = linear::VectorStructure<num_complex::Complex<f64>>;
