//! Periodic grids, variance-tagged tensor fields, skew-adjoint centered
//! differences, quadrature and pointwise tensor algebra.

mod algebra;
mod diff;
mod field;
mod grid;
mod kind;
mod preset;
mod quad;
mod small;

pub use algebra::{apply, contract, interior_product, matmul, tensor_product, transpose, Multilinear};
#[allow(unused_imports)]
pub(crate) use algebra::stored_transposed;
pub use diff::{diff_op, jacobian, strain_rate, DiffMode};
#[allow(unused_imports)]
pub(crate) use diff::{advect, component_gradients, d_axis, div_components, sym_part};
pub use field::TensorField;
pub use grid::{make_grid, Grid, MIN_POINTS};
pub use kind::Kind;
pub use preset::{sample_field, sample_field_seeded, sample_sum, FourierSeries, Preset};
pub use quad::{inner, integrate};
#[allow(unused_imports)]
pub(crate) use quad::dot;
pub use small::Mat;
