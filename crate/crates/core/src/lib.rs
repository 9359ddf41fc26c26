//! Structure-preserving Lie-derivative calculus on periodic grids and a
//! GENERIC model of thermo-visco-elastoplasticity in Eulerian coordinates.
//!
//! Everything is generic over the scalar type ([`Real`], implemented for
//! `f32` and `f64`); the aliases below pin the common choices.

// `!(x > 0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// index loops mirror the tensor formulas
#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod error;
pub mod field_calculus;
pub mod generic;
pub mod lie;
pub mod scalar;
pub mod sim;
pub mod thermomech;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Grid64 = field_calculus::Grid<f64>;
pub type Field64 = field_calculus::TensorField<f64>;
pub type Grid32 = field_calculus::Grid<f32>;
pub type Field32 = field_calculus::TensorField<f32>;
