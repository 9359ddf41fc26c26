use rayon::prelude::*;

use super::state::{pair, CotState, State, ThermalRole};
use super::Functionals;
use crate::error::{Error, Result};
use crate::field_calculus::{d_axis, div_components, Kind, TensorField};
use crate::lie::lie_derivative;
use crate::scalar::Real;

/// Which coupling block of the first row of J_simple.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BBlock {
    /// B^ve(F)Ξ = ∇F:Ξ + div(ΞF*)
    Ve,
    /// B^in(F_p)Ξ = ∇F_p:Ξ
    In,
    /// B^ex(s)κ = −s∇κ
    Ex,
}

/// Σ_ab (∂_i X_ab) Ξ_ab for each i.
fn grad_contract<T: Real>(x: &TensorField<T>, xi: &TensorField<T>) -> Vec<Vec<T>> {
    let g = *x.grid();
    let d = g.dim();
    let n = g.len();
    (0..d)
        .map(|i| {
            let mut acc = vec![T::zero(); n];
            for c in 0..x.ncomp() {
                let dx = d_axis(&g, x.component(c), i);
                let xc = xi.component(c);
                acc.par_iter_mut()
                    .enumerate()
                    .for_each(|(k, a)| *a += dx[k] * xc[k]);
            }
            acc
        })
        .collect()
}

/// The block B(X)Ξ, the exact discrete adjoint of v ↦ 𝔏_v X. The result lives
/// in the momentum slot.
pub fn b_operator<T: Real>(x: &TensorField<T>, xi: &TensorField<T>, which: BBlock) -> Result<TensorField<T>> {
    x.grid().ensure_same(xi.grid())?;
    if x.ncomp() != xi.ncomp() {
        return Err(Error::ShapeMismatch(format!(
            "B operator: {:?} against {:?}",
            x.kind(),
            xi.kind()
        )));
    }
    let g = *x.grid();
    let d = g.dim();
    let n = g.len();
    let data: Vec<T> = match which {
        BBlock::Ve | BBlock::In => {
            if !x.kind().is_matrix() {
                return Err(Error::KindMismatch {
                    op: "b_operator",
                    found: x.kind(),
                    expected: "a matrix kind",
                });
            }
            let mut rows = grad_contract(x, xi);
            if which == BBlock::Ve {
                // div(ΞF*)_i = Σ_j ∂_j (Σ_b Ξ_ib F_jb)
                for (i, row) in rows.iter_mut().enumerate() {
                    let flux: Vec<Vec<T>> = (0..d)
                        .map(|j| {
                            (0..n)
                                .into_par_iter()
                                .map(|k| {
                                    let mut s = T::zero();
                                    for b in 0..d {
                                        s += xi.component(i * d + b)[k] * x.component(j * d + b)[k];
                                    }
                                    s
                                })
                                .collect()
                        })
                        .collect();
                    let div = div_components(&g, flux.iter().map(|f| f.as_slice()));
                    row.par_iter_mut().zip(div.par_iter()).for_each(|(r, &q)| *r += q);
                }
            }
            rows.concat()
        }
        BBlock::Ex => {
            if !x.kind().is_scalar() {
                return Err(Error::KindMismatch {
                    op: "b_operator",
                    found: x.kind(),
                    expected: "a scalar kind",
                });
            }
            let s = x.data();
            (0..d)
                .flat_map(|i| {
                    let dk = d_axis(&g, xi.data(), i);
                    (0..n).map(move |k| -(s[k] * dk[k])).collect::<Vec<T>>()
                })
                .collect()
        }
    };
    Ok(TensorField::from_raw(g, Kind::Momentum, data))
}

fn require_entropy<T>(q: &State<T>, op: &str) -> Result<()> {
    if q.role == ThermalRole::Entropy {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "{op} is defined for the entropy role only"
        )))
    }
}

/// J_simple(q)ζ for q = (π, F, F_p, s). Linear in q, so q may be any tangent.
pub fn j_simple_apply<T: Real>(q: &State<T>, zeta: &CotState<T>) -> Result<State<T>> {
    require_entropy(q, "j_simple_apply")?;
    q.grid().ensure_same(zeta.grid())?;
    let v = &zeta.v;
    let lie_pi = lie_derivative(v, &q.pi, Some(Kind::Momentum))?;
    let bve = b_operator(&q.f, &zeta.xi_e, BBlock::Ve)?;
    let bin = b_operator(&q.fp, &zeta.xi_p, BBlock::In)?;
    let bex = b_operator(&q.tau, &zeta.kappa, BBlock::Ex)?;
    let pi = lie_pi.neg().add(&bve)?.add(&bin)?.add(&bex)?;
    Ok(State {
        pi,
        f: lie_derivative(v, &q.f, Some(Kind::TwoPoint))?.neg(),
        fp: lie_derivative(v, &q.fp, Some(Kind::IntensiveMatrix))?.neg(),
        tau: lie_derivative(v, &q.tau, Some(Kind::ExtensiveScalar))?.neg(),
        role: ThermalRole::Entropy,
    })
}

/// M_S*ζ given DS: (v, Ξ_e − (κ/∂_τS)∂_FS, Ξ_p − (κ/∂_τS)∂_{F_p}S, κ/∂_τS).
pub fn ms_star_with<T: Real>(ds: &CotState<T>, zeta: &CotState<T>) -> Result<CotState<T>> {
    ds.grid().ensure_same(zeta.grid())?;
    let r = zeta.kappa.zip_map(&ds.kappa, |k, st| k / st);
    Ok(CotState {
        v: zeta.v.clone(),
        xi_e: zeta.xi_e.sub(&ds.xi_e.scaled_by(&r)?)?,
        xi_p: zeta.xi_p.sub(&ds.xi_p.scaled_by(&r)?)?,
        kappa: r,
    })
}

/// M_S δ given DS: (δπ, δF, δF_p, (δτ − ∂_FS:δF − ∂_{F_p}S:δF_p)/∂_τS).
pub fn ms_with<T: Real>(ds: &CotState<T>, dq: &State<T>, role: ThermalRole) -> Result<State<T>> {
    ds.grid().ensure_same(dq.grid())?;
    let n = dq.grid().len();
    let nc = ds.xi_e.ncomp();
    let tau: Vec<T> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut num = dq.tau.data()[k];
            for c in 0..nc {
                num -= ds.xi_e.component(c)[k] * dq.f.component(c)[k];
            }
            for c in 0..nc {
                num -= ds.xi_p.component(c)[k] * dq.fp.component(c)[k];
            }
            num / ds.kappa.data()[k]
        })
        .collect();
    Ok(State {
        pi: dq.pi.clone(),
        f: dq.f.clone(),
        fp: dq.fp.clone(),
        tau: TensorField::from_raw(*dq.grid(), Kind::ExtensiveScalar, tau),
        role,
    })
}

fn positive_entropy_slope<T: Real>(ds: &CotState<T>) -> Result<()> {
    if let Some(k) = ds.kappa.data().iter().position(|&x| !(x > T::zero())) {
        return Err(Error::Constitutive {
            what: "d_tau S <= 0",
            node: k,
            value: ds.kappa.data()[k].to_f64_lossy(),
        });
    }
    Ok(())
}

pub fn ms_star_apply<T: Real, M: Functionals<T> + ?Sized>(model: &M, q: &State<T>, zeta: &CotState<T>) -> Result<CotState<T>> {
    let ds = model.entropy_differential(q)?;
    positive_entropy_slope(&ds)?;
    ms_star_with(&ds, zeta)
}

pub fn ms_apply<T: Real, M: Functionals<T> + ?Sized>(model: &M, q: &State<T>, dq: &State<T>) -> Result<State<T>> {
    let ds = model.entropy_differential(q)?;
    positive_entropy_slope(&ds)?;
    ms_with(&ds, dq, q.role)
}

/// J(q)ζ = M_S J_simple(π, F, F_p, S(q)) M_S* ζ; J_simple itself for the entropy role.
pub fn j_apply<T: Real, M: Functionals<T> + ?Sized>(model: &M, q: &State<T>, zeta: &CotState<T>) -> Result<State<T>> {
    match q.role {
        ThermalRole::Entropy => j_simple_apply(q, zeta),
        ThermalRole::InternalEnergy => {
            let ds = model.entropy_differential(q)?;
            positive_entropy_slope(&ds)?;
            let qs = State {
                pi: q.pi.clone(),
                f: q.f.clone(),
                fp: q.fp.clone(),
                tau: model.entropy_density(q)?,
                role: ThermalRole::Entropy,
            };
            let t = j_simple_apply(&qs, &ms_star_with(&ds, zeta)?)?;
            ms_with(&ds, &t, q.role)
        }
    }
}

fn floor<T: Real>(x: T) -> T {
    x + T::epsilon()
}

/// (⟨ζ₁, Jζ₂⟩ + ⟨ζ₂, Jζ₁⟩) / (‖ζ₁‖‖ζ₂‖‖q‖ + ε)
pub fn skew_residual<T: Real, M: Functionals<T> + ?Sized>(
    model: &M,
    q: &State<T>,
    z1: &CotState<T>,
    z2: &CotState<T>,
) -> Result<T> {
    let a = pair(z1, &j_apply(model, q, z2)?)?;
    let b = pair(z2, &j_apply(model, q, z1)?)?;
    Ok((a + b) / floor(z1.l2_norm() * z2.l2_norm() * q.l2_norm()))
}

/// Normalized cyclic sum T₁₂₃ + T₂₃₁ + T₃₁₂ with T_abc = ⟨ζ_a, J(J(q)ζ_b)ζ_c⟩,
/// using DJ(q)[δq] = J(δq) (J_simple is linear in q).
pub fn jacobi_residual<T: Real>(q: &State<T>, z1: &CotState<T>, z2: &CotState<T>, z3: &CotState<T>) -> Result<T> {
    require_entropy(q, "jacobi_residual")?;
    let t = |a: &CotState<T>, b: &CotState<T>, c: &CotState<T>| -> Result<T> {
        let jb = j_simple_apply(q, b)?;
        pair(a, &j_simple_apply(&jb, c)?)
    };
    // summed in sorted order so relabelling cannot change the rounding
    let mut terms = [t(z1, z2, z3)?, t(z2, z3, z1)?, t(z3, z1, z2)?];
    terms.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let sum = terms[0] + terms[1] + terms[2];
    let mut norms = [z1.l2_norm(), z2.l2_norm(), z3.l2_norm()];
    norms.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let scale = q.l2_norm() * norms[0] * norms[1] * norms[2];
    Ok(sum.abs() / floor(scale))
}
