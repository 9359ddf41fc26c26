use rayon::prelude::*;

use super::poisson::j_apply;
use super::state::{CotState, EtaForces, State};
use super::Functionals;
use crate::error::{Error, Result};
use crate::field_calculus::{diff_op, strain_rate, sym_part, DiffMode, Kind, TensorField};
use crate::scalar::Real;

fn positive_energy_slope<T: Real>(de: &CotState<T>) -> Result<()> {
    if let Some(k) = de.kappa.data().iter().position(|&x| !(x > T::zero())) {
        return Err(Error::Constitutive {
            what: "d_tau E <= 0",
            node: k,
            value: de.kappa.data()[k].to_f64_lossy(),
        });
    }
    Ok(())
}

/// N_E*ζ given DE (whose velocity slot is v):
/// (D(w) − (κ/∂_τE)D(v), Ξ_p − (κ/∂_τE)∂_{F_p}E, κ/∂_τE).
pub fn ne_star_with<T: Real>(de: &CotState<T>, zeta: &CotState<T>) -> Result<EtaForces<T>> {
    de.grid().ensure_same(zeta.grid())?;
    let r = zeta.kappa.zip_map(&de.kappa, |k, et| k / et);
    let dv = strain_rate(&de.v)?;
    let dw = strain_rate(&zeta.v)?;
    Ok(EtaForces {
        eta_m: dw.sub(&dv.scaled_by(&r)?)?,
        eta_p: zeta.xi_p.sub(&de.xi_p.scaled_by(&r)?)?,
        eta_t: r,
    })
}

/// N_E η given DE:
/// (−div sym η_m, 0, η_p, (−D(v):η_m − ∂_{F_p}E:η_p + η_t)/∂_τE).
pub fn ne_with<T: Real>(de: &CotState<T>, eta: &EtaForces<T>, q: &State<T>) -> Result<State<T>> {
    de.grid().ensure_same(eta.eta_m.grid())?;
    let g = *de.grid();
    let n = g.len();
    let dv = strain_rate(&de.v)?;
    let nc = dv.ncomp();
    let pi = diff_op(&sym_part(&eta.eta_m), DiffMode::DivMatrixRows)?
        .neg()
        .retag(Kind::Momentum);
    let tau: Vec<T> = (0..n)
        .into_par_iter()
        .map(|k| {
            let mut num = T::zero();
            for c in 0..nc {
                num -= dv.component(c)[k] * eta.eta_m.component(c)[k];
            }
            for c in 0..nc {
                num -= de.xi_p.component(c)[k] * eta.eta_p.component(c)[k];
            }
            num += eta.eta_t.data()[k];
            num / de.kappa.data()[k]
        })
        .collect();
    Ok(State {
        pi,
        f: TensorField::zeros(g, Kind::TwoPoint),
        fp: eta.eta_p.clone().retag(Kind::IntensiveMatrix),
        tau: TensorField::from_raw(g, Kind::ExtensiveScalar, tau),
        role: q.role,
    })
}

pub fn ne_star_apply<T: Real, M: Functionals<T> + ?Sized>(model: &M, q: &State<T>, zeta: &CotState<T>) -> Result<EtaForces<T>> {
    let de = model.energy_differential(q)?;
    positive_energy_slope(&de)?;
    ne_star_with(&de, zeta)
}

pub fn ne_apply<T: Real, M: Functionals<T> + ?Sized>(model: &M, q: &State<T>, eta: &EtaForces<T>) -> Result<State<T>> {
    let de = model.energy_differential(q)?;
    positive_energy_slope(&de)?;
    ne_with(&de, eta, q)
}

/// Multipliers λ at which R*(q, λDE) is probed.
pub const NONINTERACTION_LAMBDAS: [f64; 3] = [-1.0, 0.5, 2.0];

/// (‖J(q)DS(q)‖ / (‖q‖‖DS‖ + ε), max_λ |R*(q, λDE(q))|).
pub fn noninteraction_residuals<T: Real, M: Functionals<T> + ?Sized>(model: &M, q: &State<T>) -> Result<(T, T)> {
    let ds = model.entropy_differential(q)?;
    let de = model.energy_differential(q)?;
    positive_energy_slope(&de)?;
    let jds = j_apply(model, q, &ds)?;
    let first = jds.l2_norm() / (q.l2_norm() * ds.l2_norm() + T::epsilon());
    let mut second = T::zero();
    for lam in NONINTERACTION_LAMBDAS {
        let eta = ne_star_with(&de, &de.scale(T::lit(lam)))?;
        second = second.max(model.dual_dissipation(q, &eta)?.abs());
    }
    Ok((first, second))
}
