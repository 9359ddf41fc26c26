//! GENERIC building blocks: state and dual types, the Poisson operator
//! J = M_S J_simple M_S*, the Onsager transformation N_E, and residuals for
//! skew-symmetry, the Jacobi identity and the non-interaction conditions.

mod onsager;
mod poisson;
mod state;

pub use onsager::{
    ne_apply, ne_star_apply, ne_star_with, ne_with, noninteraction_residuals, NONINTERACTION_LAMBDAS,
};
pub use poisson::{
    b_operator, j_apply, j_simple_apply, jacobi_residual, ms_apply, ms_star_apply, ms_star_with, ms_with,
    skew_residual, BBlock,
};
pub use state::{pair, pair_eta, CotState, EtaForces, State, ThermalRole};

use crate::error::Result;
use crate::field_calculus::TensorField;
use crate::scalar::Real;

/// What the GENERIC operators need to know about a concrete model.
pub trait Functionals<T: Real>: Sync {
    /// DE(q); its velocity slot is v = π/ρ.
    fn energy_differential(&self, q: &State<T>) -> Result<CotState<T>>;
    /// DS(q); its velocity slot vanishes.
    fn entropy_differential(&self, q: &State<T>) -> Result<CotState<T>>;
    /// Pointwise entropy density S(F, F_p, τ), as an extensive scalar.
    fn entropy_density(&self, q: &State<T>) -> Result<TensorField<T>>;
    /// R*_simple(q, η).
    fn dual_dissipation(&self, q: &State<T>, eta: &EtaForces<T>) -> Result<T>;
    /// ∂_η R*_simple(q, η).
    fn dual_dissipation_gradient(&self, q: &State<T>, eta: &EtaForces<T>) -> Result<EtaForces<T>>;
}
