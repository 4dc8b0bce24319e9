//! Network architectures, their parametrization maps, and the ambient
//! coefficient space the parametrized functions live in.

pub mod basis;
pub mod cnn;
pub mod mlp;
pub mod subnet;

pub use basis::{achievable_degrees, embed, AmbientBasis, CoeffVector};
pub use cnn::{cnn_conv, cnn_eval, cnn_forward, CnnSpec, CnnWeights};
pub use mlp::{mlp_eval, mlp_forward, sample_nonzero_ints, MlpSpec, MlpWeights};
pub use subnet::{
    apply_cnn_subnetwork, apply_subnetwork, fiber_row_indices, free_cnn_weight_indices,
    free_weight_indices, shift_subnetwork_weights, tilde_profile, RowSource, SubnetCnnSpec,
    SubnetMlpSpec, SubnetMode, TildeProfile,
};
