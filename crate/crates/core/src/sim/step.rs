use super::config::Scheme;
use crate::error::Result;
use crate::generic::State;
use crate::scalar::Real;
use crate::thermomech::Model;

/// One explicit step of q̇ = V_Ham(q) + V_diss(q). The result is validated
/// (finite, det F > 0, det F_p > 0, constitutive domain) before it is returned.
pub fn step<T: Real>(model: &Model<T>, q: &State<T>, dt: T, scheme: Scheme) -> Result<State<T>> {
    if dt == T::zero() {
        return Ok(q.clone());
    }
    let next = match scheme {
        Scheme::Euler => q.axpy(dt, &model.rhs(q)?)?,
        Scheme::Rk4 => {
            let half = dt * T::lit(0.5);
            let k1 = model.rhs(q)?;
            let k2 = model.rhs(&q.axpy(half, &k1)?)?;
            let k3 = model.rhs(&q.axpy(half, &k2)?)?;
            let k4 = model.rhs(&q.axpy(dt, &k3)?)?;
            let sum = k1.add(&k2.scale(T::lit(2.0)))?.add(&k3.scale(T::lit(2.0)))?.add(&k4)?;
            q.axpy(dt / T::lit(6.0), &sum)?
        }
    };
    next.check_admissible()?;
    model.points(&next)?;
    Ok(next)
}
