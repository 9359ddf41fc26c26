//! Lie derivatives of every field kind, plus the flow-map / pull-back oracle
//! they are validated against.

mod derivative;
mod flow;

pub use derivative::{
    cartan_residual, commutator, commutator_rule_residual, lie_derivative, lie_general_rank2, stress_rate,
    vector_jacobi_residual, StressRate,
};
pub use flow::{
    flow_map, lie_via_flow, pullback, pushforward, Diffeo, FlowOracle, TrigInterpolant, DEFAULT_DS,
    DEFAULT_SUBSTEPS,
};
