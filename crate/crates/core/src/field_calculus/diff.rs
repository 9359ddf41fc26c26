//! Centered second-order differences on the periodic grid.
//!
//! With the rectangle rule these stencils are exactly skew-adjoint,
//! Σ f·D g = −Σ (D f)·g, which every exactness claim downstream rests on.

use rayon::prelude::*;

use super::field::TensorField;
use super::grid::Grid;
use super::kind::Kind;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiffMode {
    /// ∂_axis of every component; keeps the kind.
    Partial(usize),
    /// ∇f of a scalar, as a Covector.
    GradScalar,
    /// div w of a rank-1 field, as an IntensiveScalar.
    DivVector,
    /// (∇v)_ij = ∂_j v_i, as OpVV.
    JacobianOfVector,
    /// (div T)_i = Σ_j ∂_j T_ij, as a Covector.
    DivMatrixRows,
}

/// Centered difference of one component array along `axis`.
pub(crate) fn d_axis<T: Real>(grid: &Grid<T>, src: &[T], axis: usize) -> Vec<T> {
    let inv2h = T::one() / (T::lit(2.0) * grid.spacing());
    let n = grid.n();
    let s = grid.stride(axis);
    let span = n * s;
    let mut out = vec![T::zero(); src.len()];
    out.par_iter_mut().enumerate().for_each(|(i, o)| {
        let k = (i / s) % n;
        let f = if k == n - 1 { i + s - span } else { i + s };
        let b = if k == 0 { i + span - s } else { i - s };
        *o = (src[f] - src[b]) * inv2h;
    });
    out
}

/// grads[c][j] = D_j a_c for every component of `a`.
pub(crate) fn component_gradients<T: Real>(a: &TensorField<T>) -> Vec<Vec<Vec<T>>> {
    let g = *a.grid();
    (0..a.ncomp())
        .map(|c| (0..g.dim()).map(|j| d_axis(&g, a.component(c), j)).collect())
        .collect()
}

/// Transport term Σ_j v_j D_j a for every component, summed over j in axis order.
///
/// Shared by the specialized and the general Lie derivative so both produce
/// identical bits.
pub(crate) fn advect<T: Real>(v: &TensorField<T>, grads: &[Vec<Vec<T>>]) -> Vec<Vec<T>> {
    let d = v.dim();
    grads
        .iter()
        .map(|gc| {
            let mut out = vec![T::zero(); v.grid().len()];
            out.par_iter_mut().enumerate().for_each(|(i, o)| {
                let mut acc = T::zero();
                for (j, gj) in gc.iter().enumerate().take(d) {
                    acc += v.component(j)[i] * gj[i];
                }
                *o = acc;
            });
            out
        })
        .collect()
}

fn require_vector_like<T: Real>(op: &'static str, a: &TensorField<T>) -> Result<()> {
    if a.kind().is_vector_like() {
        Ok(())
    } else {
        Err(Error::KindMismatch {
            op,
            found: a.kind(),
            expected: "a rank-1 kind",
        })
    }
}

pub fn diff_op<T: Real>(a: &TensorField<T>, mode: DiffMode) -> Result<TensorField<T>> {
    let g = *a.grid();
    let d = g.dim();
    match mode {
        DiffMode::Partial(axis) => {
            if axis >= d {
                return Err(Error::SlotOutOfRange(format!("axis {axis} on a {d}-d grid")));
            }
            let mut data = Vec::with_capacity(a.data().len());
            for c in 0..a.ncomp() {
                data.extend(d_axis(&g, a.component(c), axis));
            }
            Ok(TensorField::from_raw(g, a.kind(), data))
        }
        DiffMode::GradScalar => {
            if !a.kind().is_scalar() {
                return Err(Error::KindMismatch {
                    op: "grad_scalar",
                    found: a.kind(),
                    expected: "a scalar kind",
                });
            }
            let mut data = Vec::with_capacity(d * g.len());
            for j in 0..d {
                data.extend(d_axis(&g, a.data(), j));
            }
            Ok(TensorField::from_raw(g, Kind::Covector, data))
        }
        DiffMode::DivVector => {
            require_vector_like("div_vector", a)?;
            Ok(TensorField::from_raw(
                g,
                Kind::IntensiveScalar,
                div_components(&g, (0..d).map(|j| a.component(j))),
            ))
        }
        DiffMode::JacobianOfVector => {
            require_vector_like("jacobian_of_vector", a)?;
            let mut data = Vec::with_capacity(d * d * g.len());
            for i in 0..d {
                for j in 0..d {
                    data.extend(d_axis(&g, a.component(i), j));
                }
            }
            Ok(TensorField::from_raw(g, Kind::OpVV, data))
        }
        DiffMode::DivMatrixRows => {
            if !a.kind().is_matrix() {
                return Err(Error::KindMismatch {
                    op: "div_matrix_rows",
                    found: a.kind(),
                    expected: "a matrix kind",
                });
            }
            let mut data = Vec::with_capacity(d * g.len());
            for i in 0..d {
                data.extend(div_components(
                    &g,
                    (0..d).map(|j| a.component(i * d + j)),
                ));
            }
            Ok(TensorField::from_raw(g, Kind::Covector, data))
        }
    }
}

/// Σ_j D_j u_j for component arrays u_0, u_1, … (j in axis order).
pub(crate) fn div_components<'a, T: Real>(
    g: &Grid<T>,
    comps: impl Iterator<Item = &'a [T]>,
) -> Vec<T> {
    let mut acc = vec![T::zero(); g.len()];
    for (j, u) in comps.enumerate() {
        let du = d_axis(g, u, j);
        acc.par_iter_mut().zip(du.par_iter()).for_each(|(a, &b)| *a += b);
    }
    acc
}

/// ∇v with J_ij = ∂_j v_i.
pub fn jacobian<T: Real>(v: &TensorField<T>) -> Result<TensorField<T>> {
    diff_op(v, DiffMode::JacobianOfVector)
}

/// D(v) = ½(∇v + (∇v)*), tagged OpVC: it is half the Lie derivative of the
/// Euclidean metric, a form on T × T.
pub fn strain_rate<T: Real>(v: &TensorField<T>) -> Result<TensorField<T>> {
    v.ensure_kind("strain_rate", Kind::Vector)?;
    let jac = jacobian(v)?;
    Ok(sym_part(&jac).retag(Kind::OpVC))
}

/// ½(A_ij + A_ji) written as 0.5·(A_ij + A_ji) so the result is bitwise symmetric.
pub(crate) fn sym_part<T: Real>(a: &TensorField<T>) -> TensorField<T> {
    let d = a.dim();
    let half = T::lit(0.5);
    let mut out = a.clone();
    for i in 0..d {
        for j in 0..d {
            let (aij, aji) = (a.component(i * d + j), a.component(j * d + i));
            out.component_mut(i * d + j)
                .iter_mut()
                .zip(aij.iter().zip(aji))
                .for_each(|(o, (&x, &y))| *o = half * (x + y));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field_calculus::{inner, integrate, make_grid};
    use std::f64::consts::PI;

    #[test]
    fn constant_fields_have_zero_derivatives() {
        let g = make_grid(2, 16, 2.0 * PI).unwrap();
        let w = TensorField::constant(g, Kind::Vector, &[1.3, -0.2]).unwrap();
        assert!(diff_op(&w, DiffMode::DivVector).unwrap().is_zero());
        assert!(jacobian(&w).unwrap().is_zero());
        assert!(strain_rate(&w).unwrap().is_zero());
    }

    #[test]
    fn gradient_of_sine_within_taylor_bound() {
        let g = make_grid(2, 64, 2.0 * PI).unwrap();
        let f = TensorField::from_fn(g, Kind::IntensiveScalar, |x, _| x[0].sin());
        let gf = diff_op(&f, DiffMode::GradScalar).unwrap();
        let h = g.spacing();
        for node in 0..g.len() {
            let x = g.coords(node);
            assert!((gf.at(node, 0) - x[0].cos()).abs() <= h * h / 6.0);
            assert!(gf.at(node, 1).abs() < 1e-15);
        }
    }

    #[test]
    fn jacobian_entry_layout() {
        let g = make_grid(2, 64, 2.0 * PI).unwrap();
        let v = TensorField::from_fn(g, Kind::Vector, |x, c| if c == 0 { x[1].sin() } else { 0.0 });
        let jac = jacobian(&v).unwrap();
        let d = strain_rate(&v).unwrap();
        for node in 0..g.len() {
            let x = g.coords(node);
            assert!((jac.at(node, 1) - x[1].cos()).abs() < 2e-3);
            assert_eq!(jac.at(node, 0), 0.0);
            assert_eq!(jac.at(node, 2), 0.0);
            assert_eq!(jac.at(node, 3), 0.0);
            assert!((d.at(node, 1) - 0.5 * x[1].cos()).abs() < 1e-3);
            assert_eq!(d.at(node, 1), d.at(node, 2));
        }
    }

    #[test]
    fn summation_by_parts_is_exact() {
        let g = make_grid(2, 16, 2.0 * PI).unwrap();
        let f = TensorField::from_fn(g, Kind::IntensiveScalar, |x, _| (x[0] + 2.0 * x[1]).sin() + x[0].cos());
        let v = TensorField::from_fn(g, Kind::Vector, |x, c| ((c + 1) as f64 * x[1]).cos() * x[0].sin());
        let lhs = integrate(&f.scaled_by(&diff_op(&v, DiffMode::DivVector).unwrap()).unwrap()).unwrap();
        let rhs = -inner(&diff_op(&f, DiffMode::GradScalar).unwrap(), &v).unwrap();
        assert!((lhs - rhs).abs() <= 1e-13 * lhs.abs().max(1.0));
    }
}
