//! Singularity classification of padded CNN families and the shift witness
//! that certifies every positive classification.
//!
//! A padded family is declared singular exactly when the paddings are
//! proper and the accumulated profile is integral with final value zero.
//! Soundness is enforced constructively: for every family classified as
//! singular, shifting each filter by its padding must reproduce the same
//! network function symbolically, exhibiting two distinct weight tuples in
//! one fiber.

use serde::Serialize;

use crate::error::NgError;
use crate::netparam::{
    apply_cnn_subnetwork, embed, shift_subnetwork_weights, AmbientBasis, CnnSpec, CnnWeights,
    SubnetCnnSpec, TildeProfile,
};
use crate::netparam::cnn_forward;

/// Classifier output: the accumulated padding profile and its verdict.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CnnSingularityReport {
    pub singular: bool,
    pub profile: TildeProfile,
}

/// Classifies the image of a padded filter family as a singular point of
/// the neuromanifold: the paddings must be proper and the accumulated
/// profile integral with terminal value zero.
pub fn cnn_singularity_classify(
    spec: &CnnSpec,
    subnet: &SubnetCnnSpec,
) -> Result<CnnSingularityReport, NgError> {
    let profile = crate::netparam::tilde_profile(spec, subnet)?;
    let singular = subnet.is_proper() && profile.all_integral() && profile.last_zero();
    Ok(CnnSingularityReport { singular, profile })
}

/// The shifted weight tuple certifying a singular classification.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CnnFiberWitness {
    /// Whether the original and shifted tuples define the same function.
    pub equal: bool,
    /// The shifted filters, one canonical string per entry.
    pub shifted_filters: Vec<Vec<String>>,
}

/// Builds the shifted filters for a family the classifier declared
/// singular (zero paddings are allowed and shift nothing) and verifies
/// symbolically that both weight tuples embed to the same point. A singular
/// classification with a failed equality is an internal contradiction and
/// aborts.
pub fn cnn_fiber_witness(
    spec: &CnnSpec,
    weights: &CnnWeights,
    subnet: &SubnetCnnSpec,
) -> Result<CnnFiberWitness, NgError> {
    let class = cnn_singularity_classify(spec, subnet)?;
    if subnet.is_proper() && !class.singular {
        return Err(NgError::Config(format!(
            "fiber witness requires a singular family; profile ({}) fails the test",
            class
                .profile
                .tail()
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }
    let constrained = apply_cnn_subnetwork(spec, weights, subnet)?;
    let shifted = shift_subnetwork_weights(spec, &constrained, subnet)?;
    let basis = AmbientBasis::for_cnn(spec);
    let original = embed(&cnn_forward(spec, &constrained)?, &basis)?;
    let moved = embed(&cnn_forward(spec, &shifted)?, &basis)?;
    let equal = original.coords == moved.coords;
    if class.singular && !equal {
        return Err(NgError::Internal(
            "singular classification contradicted by the shift witness".into(),
        ));
    }
    Ok(CnnFiberWitness {
        equal,
        shifted_filters: shifted
            .filters
            .iter()
            .map(|f| f.iter().map(|p| p.canonical_string()).collect())
            .collect(),
    })
}
