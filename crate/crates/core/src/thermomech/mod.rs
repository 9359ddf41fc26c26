//! Finite-strain thermo-visco-elastoplasticity: constitutive law, energy and
//! entropy functionals, stresses and the evolution vector fields.

mod dynamics;
mod material;
mod model;

pub use dynamics::ScalarRates;
pub use material::{DissipationSpec, MaterialModel, PointEval};
pub use model::{Model, Stresses};

#[cfg(test)]
mod tests;
