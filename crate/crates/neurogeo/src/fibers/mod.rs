//! Identifiability machinery: sparse activations, the monomial-fiber group
//! action, the lattice scaling system and its Smith normal form, fiber
//! counting, and scaling rigidity for convolutional networks.

pub mod bound;
pub mod scaling;
pub mod snf;
pub mod sparse;

pub use bound::degree_bound;
pub use scaling::{
    fiber_scaling_count, monomial_fiber_action, scaling_exponent_matrix, scaling_rigidity_check,
    MonomialFiberElement, RigidityReport, ScalingCountReport, ScalingFamily,
};
pub use snf::{int_det, smith_normal_form, SnfResult};
pub use sparse::{
    sparse_decomposition_check, SparseActivationSpec, SparseDecompositionReport,
    DEFAULT_MONOMIAL_BUDGET,
};
