//! Rectangle-rule quadrature. Sums are sequential so results do not depend on
//! the thread count.

use super::field::TensorField;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// h^d Σ_nodes f
pub fn integrate<T: Real>(f: &TensorField<T>) -> Result<T> {
    if !f.kind().is_scalar() {
        return Err(Error::KindMismatch {
            op: "integrate",
            found: f.kind(),
            expected: "a scalar kind",
        });
    }
    Ok(f.data().iter().copied().sum::<T>() * f.grid().cell_volume())
}

/// h^d Σ_nodes Σ_c a_c b_c, the pairing of two fields with equal component count.
pub fn inner<T: Real>(a: &TensorField<T>, b: &TensorField<T>) -> Result<T> {
    a.grid().ensure_same(b.grid())?;
    if a.ncomp() != b.ncomp() {
        return Err(Error::ShapeMismatch(format!(
            "cannot pair {:?} with {:?}",
            a.kind(),
            b.kind()
        )));
    }
    Ok(dot(a.data(), b.data()) * a.grid().cell_volume())
}

pub(crate) fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}
