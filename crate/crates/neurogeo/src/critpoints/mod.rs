//! Critical points of quadric losses on the neuromanifold: the loss as an
//! exact quadric, constructed critical targets, exposedness dimension
//! counts, and the CNN singularity classifier with its shift witness.

pub mod cnn_sing;
pub mod exposed;
pub mod quadric;
pub mod witness;

pub use cnn_sing::{
    cnn_fiber_witness, cnn_singularity_classify, CnnFiberWitness, CnnSingularityReport,
};
pub use exposed::{
    cnn_exposedness_dimension, exposedness_dimension, family_weight_sample, ExposednessReport,
    ExposednessVerdict,
};
pub use quadric::{dataset_to_quadric, Dataset, QuadricLoss};
pub use witness::{critical_witness, embedded_point, gradient_of_loss, CriticalWitness};
