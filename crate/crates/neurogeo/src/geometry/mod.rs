//! Geometry of the function space: Jacobians of the parametrization map,
//! generic and pointwise ranks, tangent-span singularity tests, and
//! implicit equations with their singular loci.

pub mod implicit;
pub mod jacobian;
pub mod matrix;
pub mod rank;
pub mod tangent;
pub(crate) mod univar;

pub use implicit::{
    canonical_integral, implicitize, implicitize_map, plane_curve_singular_points,
    singular_locus_membership, ImplicitSurface, MembershipReport, PlaneSingularReport,
};
pub use jacobian::{mlp_jacobian_mod, symbolic_jacobian, FpPoly, JacobianOracle};
pub use matrix::{FpMatrix, PolyMatrix, RatMatrix};
pub use rank::{
    cnn_kernel_check, generic_rank, generic_rank_restricted, rank_at, Certainty, KernelReport,
    RankField, RankOptions, RankReport,
};
pub use tangent::{tangent_excess_test, TangentReport};
