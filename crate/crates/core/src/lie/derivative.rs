use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field_calculus::{
    advect, component_gradients, d_axis, diff_op, div_components, jacobian, DiffMode, Kind,
    Multilinear, TensorField,
};
use crate::scalar::Real;

/// Objective stress rates of a contravariant (OpCV) stress field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StressRate {
    /// v·∇T + (div v)T − T(∇v)* − (∇v)T, for the extensive Cauchy stress.
    Truesdell,
    /// v·∇T − T(∇v)* − (∇v)T, for the intensive Kirchhoff stress.
    Oldroyd,
}

fn check_velocity<T: Real>(v: &TensorField<T>, a_grid: &crate::field_calculus::Grid<T>) -> Result<()> {
    v.ensure_kind("lie_derivative (velocity)", Kind::Vector)?;
    v.grid().ensure_same(a_grid)
}

/// Builds one output component node by node.
fn node_map<T: Real>(n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    (0..n).into_par_iter().map(&f).collect()
}

/// 𝔏_v A with the rule selected by `A`'s kind (or by `override_kind`).
pub fn lie_derivative<T: Real>(
    v: &TensorField<T>,
    a: &TensorField<T>,
    override_kind: Option<Kind>,
) -> Result<TensorField<T>> {
    check_velocity(v, a.grid())?;
    let kind = override_kind.unwrap_or(a.kind());
    if kind.rank() != a.kind().rank() {
        return Err(Error::KindMismatch {
            op: "lie_derivative",
            found: kind,
            expected: "a kind with the stored rank",
        });
    }
    let g = *a.grid();
    let d = g.dim();
    let n = g.len();
    let jac = jacobian(v)?;
    let jc = |i: usize, j: usize| jac.component(i * d + j);
    let comp = |c: usize| a.component(c);

    let data: Vec<T> = match kind {
        Kind::ExtensiveScalar => {
            let fluxes: Vec<Vec<T>> = (0..d).map(|j| product(comp(0), v.component(j))).collect();
            div_components(&g, fluxes.iter().map(|x| x.as_slice()))
        }
        Kind::RdExtensive => {
            let mut out = Vec::with_capacity(d * n);
            for i in 0..d {
                let fluxes: Vec<Vec<T>> = (0..d).map(|j| product(comp(i), v.component(j))).collect();
                out.extend(div_components(&g, fluxes.iter().map(|x| x.as_slice())));
            }
            out
        }
        Kind::Momentum => {
            let mut out = Vec::with_capacity(d * n);
            for i in 0..d {
                let fluxes: Vec<Vec<T>> = (0..d).map(|j| product(comp(i), v.component(j))).collect();
                let div = div_components(&g, fluxes.iter().map(|x| x.as_slice()));
                out.extend(node_map(n, |x| {
                    let mut s = T::zero();
                    for k in 0..d {
                        s += comp(k)[x] * jc(k, i)[x];
                    }
                    div[x] + s
                }));
            }
            out
        }
        _ => {
            let adv = advect(v, &component_gradients(a));
            let mut out = Vec::with_capacity(a.data().len());
            match kind {
                Kind::IntensiveScalar | Kind::IntensiveMatrix => {
                    for c in adv {
                        out.extend(c);
                    }
                }
                Kind::Vector => {
                    for i in 0..d {
                        out.extend(node_map(n, |x| {
                            let mut r = adv[i][x];
                            let mut s = T::zero();
                            for k in 0..d {
                                s += comp(k)[x] * jc(i, k)[x];
                            }
                            r -= s;
                            r
                        }));
                    }
                }
                Kind::Covector => {
                    for i in 0..d {
                        out.extend(node_map(n, |x| {
                            let mut r = adv[i][x];
                            let mut s = T::zero();
                            for k in 0..d {
                                s += comp(k)[x] * jc(k, i)[x];
                            }
                            r += s;
                            r
                        }));
                    }
                }
                Kind::TwoPoint => {
                    // −(∇v)F
                    for i in 0..d {
                        for j in 0..d {
                            out.extend(node_map(n, |x| {
                                let mut r = adv[i * d + j][x];
                                let mut s = T::zero();
                                for k in 0..d {
                                    s += comp(k * d + j)[x] * jc(i, k)[x];
                                }
                                r -= s;
                                r
                            }));
                        }
                    }
                }
                Kind::OpVV | Kind::OpVC | Kind::OpCC | Kind::OpCV => {
                    // Each entry is adv + first correction ± second correction:
                    //   𝔹: +𝔹(∇v) − (∇v)𝔹        ℂ: +ℂ(∇v) + (∇v)*ℂ
                    //   𝔻: +(∇v)*𝔻 − 𝔻(∇v)*      𝔼: −(∇v)𝔼 − 𝔼(∇v)*
                    // Sums over k run in ascending order, tensor entry times ∇v entry.
                    for a_ in 0..d {
                        for b in 0..d {
                            out.extend(node_map(n, |x| {
                                let m = |i: usize, j: usize| comp(i * d + j)[x];
                                let jv = |i: usize, j: usize| jc(i, j)[x];
                                let mut r = adv[a_ * d + b][x];
                                let (mut s1, mut s2) = (T::zero(), T::zero());
                                for k in 0..d {
                                    s1 += match kind {
                                        Kind::OpVV | Kind::OpVC => m(a_, k) * jv(k, b),
                                        Kind::OpCC => m(k, b) * jv(k, a_),
                                        _ => m(k, b) * jv(a_, k),
                                    };
                                }
                                for k in 0..d {
                                    s2 += match kind {
                                        Kind::OpVV => m(k, b) * jv(a_, k),
                                        Kind::OpVC => m(k, b) * jv(k, a_),
                                        _ => m(a_, k) * jv(b, k),
                                    };
                                }
                                match kind {
                                    Kind::OpVV => {
                                        r += s1;
                                        r -= s2;
                                    }
                                    Kind::OpVC => {
                                        r += s1;
                                        r += s2;
                                    }
                                    Kind::OpCC => {
                                        r += s1;
                                        r -= s2;
                                    }
                                    _ => {
                                        r -= s1;
                                        r -= s2;
                                    }
                                }
                                r
                            }));
                        }
                    }
                }
                _ => unreachable!("transport kinds handled above"),
            }
            out
        }
    };
    Ok(TensorField::from_raw(g, kind, data))
}

fn product<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    a.par_iter().zip(b.par_iter()).map(|(&x, &y)| x * y).collect()
}

/// Objective rate of an OpCV stress.
pub fn stress_rate<T: Real>(v: &TensorField<T>, t: &TensorField<T>, which: StressRate) -> Result<TensorField<T>> {
    t.ensure_kind("stress_rate", Kind::OpCV)?;
    let oldroyd = lie_derivative(v, t, None)?;
    match which {
        StressRate::Oldroyd => Ok(oldroyd),
        StressRate::Truesdell => {
            let divv = diff_op(v, DiffMode::DivVector)?;
            oldroyd.add(&t.scaled_by(&divv)?)
        }
    }
}

/// [[v, w]] = (∇w)v − (∇v)w, antisymmetric bit for bit.
pub fn commutator<T: Real>(v: &TensorField<T>, w: &TensorField<T>) -> Result<TensorField<T>> {
    v.ensure_kind("commutator", Kind::Vector)?;
    w.ensure_kind("commutator", Kind::Vector)?;
    v.grid().ensure_same(w.grid())?;
    let g = *v.grid();
    let d = g.dim();
    let n = g.len();
    let dw: Vec<Vec<Vec<T>>> = (0..d)
        .map(|i| (0..d).map(|j| d_axis(&g, w.component(i), j)).collect())
        .collect();
    let dv: Vec<Vec<Vec<T>>> = (0..d)
        .map(|i| (0..d).map(|j| d_axis(&g, v.component(i), j)).collect())
        .collect();
    let mut data = Vec::with_capacity(d * n);
    for i in 0..d {
        data.extend(node_map(n, |x| {
            // a_i = Σ_j v_j ∂_j w_i and b_i = Σ_j w_j ∂_j v_i, built symmetrically
            let mut a = T::zero();
            let mut b = T::zero();
            for j in 0..d {
                a += v.component(j)[x] * dw[i][j][x];
            }
            for j in 0..d {
                b += w.component(j)[x] * dv[i][j][x];
            }
            a - b
        }));
    }
    Ok(TensorField::from_raw(g, Kind::Vector, data))
}

/// The general multilinear rule: transport, then +∇v inserted into every
/// vector slot and −(∇v)* into every covector slot.
pub fn lie_general_rank2<T: Real>(v: &TensorField<T>, a: &Multilinear<T>) -> Result<Multilinear<T>> {
    check_velocity(v, a.grid())?;
    let (p, q) = a.signature();
    let r = p + q;
    if r > 2 {
        return Err(Error::Unsupported(format!("Lie derivative of a rank-{r} tensor")));
    }
    let g = *a.grid();
    let d = g.dim();
    let n = g.len();
    let jac = jacobian(v)?;
    let jc = |i: usize, j: usize| jac.component(i * d + j);
    let grads: Vec<Vec<Vec<T>>> = (0..a.ncomp())
        .map(|c| (0..d).map(|j| d_axis(&g, a.component(c), j)).collect())
        .collect();
    let adv = advect(v, &grads);
    let mut data = Vec::with_capacity(a.data().len());
    for (c, adv_c) in adv.iter().enumerate() {
        let idx = a.unflat(c);
        data.extend(node_map(n, |x| {
            let mut out = adv_c[x];
            for slot in 0..r {
                let mut s = T::zero();
                for k in 0..d {
                    let mut moved = [idx[0], idx[1]];
                    moved[slot] = k;
                    let val = a.component(a.flat(&moved[..r]))[x];
                    s += if slot < p {
                        val * jc(k, idx[slot])[x]
                    } else {
                        val * jc(idx[slot], k)[x]
                    };
                }
                if slot < p {
                    out += s;
                } else {
                    out -= s;
                }
            }
            out
        }));
    }
    Ok(Multilinear::from_raw(g, p, q, data))
}

/// 𝔏_vβ − (i_v dβ + d(i_vβ)) for a covector β.
pub fn cartan_residual<T: Real>(v: &TensorField<T>, beta: &TensorField<T>) -> Result<TensorField<T>> {
    beta.ensure_kind("cartan_residual", Kind::Covector)?;
    let lie = lie_derivative(v, beta, None)?;
    let g = *beta.grid();
    let d = g.dim();
    let n = g.len();
    // (dβ)_ij = ∂_i β_j − ∂_j β_i
    let dbeta: Vec<Vec<Vec<T>>> = (0..d)
        .map(|j| (0..d).map(|i| d_axis(&g, beta.component(j), i)).collect())
        .collect();
    let ivbeta = TensorField::from_raw(
        g,
        Kind::IntensiveScalar,
        node_map(n, |x| {
            let mut s = T::zero();
            for k in 0..d {
                s += v.component(k)[x] * beta.component(k)[x];
            }
            s
        }),
    );
    let grad = diff_op(&ivbeta, DiffMode::GradScalar)?;
    let mut data = Vec::with_capacity(d * n);
    for j in 0..d {
        data.extend(node_map(n, |x| {
            let mut ivd = T::zero();
            for i in 0..d {
                ivd += v.component(i)[x] * (dbeta[j][i][x] - dbeta[i][j][x]);
            }
            lie.component(j)[x] - (ivd + grad.component(j)[x])
        }));
    }
    Ok(TensorField::from_raw(g, Kind::Covector, data))
}

/// ‖𝔏_v𝔏_wA − 𝔏_w𝔏_vA − 𝔏_{[[v,w]]}A‖ / ‖𝔏_v𝔏_wA‖
pub fn commutator_rule_residual<T: Real>(v: &TensorField<T>, w: &TensorField<T>, a: &TensorField<T>) -> Result<T> {
    let vw = lie_derivative(v, &lie_derivative(w, a, None)?, None)?;
    let wv = lie_derivative(w, &lie_derivative(v, a, None)?, None)?;
    let c = lie_derivative(&commutator(v, w)?, a, None)?;
    let r = vw.sub(&wv)?.sub(&c)?;
    Ok(r.l2_norm() / (vw.l2_norm() + T::min_positive_value()))
}

/// ‖[[u,[[v,w]]]] + [[v,[[w,u]]]] + [[w,[[u,v]]]]‖ / largest term norm
pub fn vector_jacobi_residual<T: Real>(u: &TensorField<T>, v: &TensorField<T>, w: &TensorField<T>) -> Result<T> {
    let a = commutator(u, &commutator(v, w)?)?;
    let b = commutator(v, &commutator(w, u)?)?;
    let c = commutator(w, &commutator(u, v)?)?;
    let scale = a.l2_norm().max(b.l2_norm()).max(c.l2_norm());
    Ok(a.add(&b)?.add(&c)?.l2_norm() / (scale + T::min_positive_value()))
}
