//! Exact-arithmetic computational geometry of polynomial neural networks.
//!
//! The crate builds the parametrization map of a polynomial MLP or 1-D
//! strided CNN as an explicit polynomial map, then answers geometric
//! questions about its image with exact rational or prime-field linear
//! algebra: neuromanifold dimension, subnetwork singularities, implicit
//! equations of hypersurface images, critical-point exposedness for
//! quadric losses, and fiber structure of monomial and sparse activations.

pub mod cli;
pub mod critpoints;
pub mod error;
pub mod fibers;
pub mod fixtures;
pub mod geometry;
pub mod netparam;
pub mod polyalg;
pub mod report;

pub use error::NgError;
