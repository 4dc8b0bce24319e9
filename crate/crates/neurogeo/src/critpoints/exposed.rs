//! Exposedness dimension counts for parametrized weight families.
//!
//! A family is critically exposed when the targets admitting a critical
//! point on it fill a full-dimensional subset of the ambient space. The
//! criterion certified here is the dimension count: the family's image
//! dimension plus the dimension of the normal space at its generic points
//! must reach the ambient dimension. Both ranks are probabilistic (two
//! agreeing primes per point), so a disagreement yields an explicit
//! `inconclusive` verdict rather than a silent decision.

use num::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::error::NgError;
use crate::geometry::{generic_rank_restricted, JacobianOracle, RankOptions};
use crate::netparam::{
    free_cnn_weight_indices, free_weight_indices, sample_nonzero_ints, CnnSpec, MlpSpec,
    SubnetCnnSpec, SubnetMlpSpec, SubnetMode,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum ExposednessVerdict {
    Exposed,
    NotExposed,
    Inconclusive,
}

/// Dimension accounting for one family: `total_dim = family_dim +
/// normal_dim` must reach `ambient_dim` for the exposed verdict.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExposednessReport {
    /// Generic rank of the Jacobian restricted to the family's columns.
    pub family_dim: usize,
    /// Ambient dimension minus the full Jacobian's generic rank on the family.
    pub normal_dim: usize,
    pub total_dim: usize,
    pub ambient_dim: usize,
    pub verdict: ExposednessVerdict,
    /// Per-trial seeds of the two rank computations, family then full.
    pub seeds: Vec<u64>,
}

fn report_from_ranks(
    family_rank: &crate::geometry::RankReport,
    full_rank: &crate::geometry::RankReport,
    ambient_dim: usize,
) -> ExposednessReport {
    let family_dim = family_rank.rank;
    let normal_dim = ambient_dim - full_rank.rank;
    let total_dim = family_dim + normal_dim;
    let verdict = if !family_rank.conclusive || !full_rank.conclusive {
        ExposednessVerdict::Inconclusive
    } else if total_dim == ambient_dim {
        ExposednessVerdict::Exposed
    } else {
        ExposednessVerdict::NotExposed
    };
    let mut seeds = family_rank.point_seeds.clone();
    seeds.extend_from_slice(&full_rank.point_seeds);
    ExposednessReport { family_dim, normal_dim, total_dim, ambient_dim, verdict, seeds }
}

/// Expands free parameter values into a full weight vector satisfying the
/// subnetwork constraints: zeros at removed positions, and copied rows in
/// repeated-rows mode.
fn mlp_family_point(
    spec: &MlpSpec,
    subnet: &SubnetMlpSpec,
    free: &[usize],
    values: &[BigRational],
) -> Result<Vec<BigRational>, NgError> {
    if values.len() < free.len() {
        return Err(NgError::Shape(format!(
            "{} sampled values for {} free parameters",
            values.len(),
            free.len()
        )));
    }
    let mut point = vec![BigRational::zero(); spec.num_weights()];
    for (&idx, v) in free.iter().zip(values) {
        point[idx] = v.clone();
    }
    if subnet.mode == SubnetMode::RepeatedRows {
        for (i, set) in subnet.index_sets.iter().enumerate() {
            for &j in set {
                let src = subnet.source_for(i + 1, j).ok_or_else(|| {
                    NgError::Config(format!(
                        "repeated-rows subnetwork lacks a source for neuron {j} in layer {}",
                        i + 1
                    ))
                })? - 1;
                for c in 0..spec.widths[i] {
                    point[spec.weight_index(i, j - 1, c)] =
                        point[spec.weight_index(i, src, c)].clone();
                }
            }
        }
    }
    Ok(point)
}

/// Samples one weight vector lying on the family: free parameters take
/// seeded random nonzero integer values, removed ones are zero, and
/// repeated rows are copied from their sources.
pub fn family_weight_sample(
    spec: &MlpSpec,
    family: &SubnetMlpSpec,
    seed: u64,
    bound: i64,
) -> Result<Vec<BigRational>, NgError> {
    family.validate(spec)?;
    let free = free_weight_indices(spec, family)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let values = sample_nonzero_ints(&mut rng, free.len(), bound);
    mlp_family_point(spec, family, &free, &values)
}

/// Exposedness dimension count for an MLP subnetwork family.
///
/// The ranked columns default to the family's free parameters; `columns`
/// overrides them to reproduce counts that restrict attention to a subset
/// of directions while other parameters still vary along the family.
pub fn exposedness_dimension(
    spec: &MlpSpec,
    family: &SubnetMlpSpec,
    columns: Option<&[usize]>,
    opts: &RankOptions,
) -> Result<ExposednessReport, NgError> {
    family.validate(spec)?;
    let oracle = JacobianOracle::for_mlp(spec)?;
    let free = free_weight_indices(spec, family)?;
    let cols = columns.unwrap_or(&free).to_vec();
    if let Some(&bad) = cols.iter().find(|&&c| c >= spec.num_weights()) {
        return Err(NgError::Config(format!(
            "column {bad} out of range for {} weights",
            spec.num_weights()
        )));
    }
    let family_point =
        |values: &[BigRational]| mlp_family_point(spec, family, &free, values);
    let family_rank =
        generic_rank_restricted(&oracle, &cols, free.len(), &family_point, opts)?;
    let all: Vec<usize> = (0..spec.num_weights()).collect();
    let full_rank = generic_rank_restricted(&oracle, &all, free.len(), &family_point, opts)?;
    Ok(report_from_ranks(&family_rank, &full_rank, oracle.rows()))
}

/// Exposedness dimension count for a padded CNN family.
pub fn cnn_exposedness_dimension(
    spec: &CnnSpec,
    family: &SubnetCnnSpec,
    opts: &RankOptions,
) -> Result<ExposednessReport, NgError> {
    family.validate(spec)?;
    let oracle = JacobianOracle::for_cnn(spec)?;
    let free = free_cnn_weight_indices(spec, family)?;
    let num_weights = spec.num_weights();
    let family_point = |values: &[BigRational]| -> Result<Vec<BigRational>, NgError> {
        if values.len() < free.len() {
            return Err(NgError::Shape(format!(
                "{} sampled values for {} free parameters",
                values.len(),
                free.len()
            )));
        }
        let mut point = vec![BigRational::zero(); num_weights];
        for (&idx, v) in free.iter().zip(values) {
            point[idx] = v.clone();
        }
        Ok(point)
    };
    let family_rank =
        generic_rank_restricted(&oracle, &free, free.len(), &family_point, opts)?;
    let all: Vec<usize> = (0..num_weights).collect();
    let full_rank = generic_rank_restricted(&oracle, &all, free.len(), &family_point, opts)?;
    Ok(report_from_ranks(&family_rank, &full_rank, oracle.rows()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{cnn_d2, mlp_d1};
    use crate::netparam::RowSource;

    fn strict_subnet() -> SubnetMlpSpec {
        SubnetMlpSpec {
            index_sets: vec![vec![2]],
            mode: SubnetMode::Strict,
            sources: Vec::new(),
        }
    }

    #[test]
    fn strict_family_is_exposed_three_plus_four() {
        let spec = mlp_d1();
        let subnet = strict_subnet();
        // Free parameters are exactly the first row of the first layer and
        // the surviving second-layer weight.
        assert_eq!(free_weight_indices(&spec, &subnet).unwrap(), vec![0, 1, 4]);
        let report =
            exposedness_dimension(&spec, &subnet, None, &RankOptions::new(101)).unwrap();
        assert_eq!(report.family_dim, 3);
        assert_eq!(report.normal_dim, 4);
        assert_eq!(report.total_dim, 7);
        assert_eq!(report.ambient_dim, 7);
        assert_eq!(report.verdict, ExposednessVerdict::Exposed);
        assert!(!report.seeds.is_empty());
    }

    #[test]
    fn strict_family_satisfies_the_padding_identity() {
        // At strict subnetwork points the removed weights' Jacobian columns
        // vanish, so the full rank equals the restricted rank: the normal
        // dimension is the ambient dimension minus the family dimension.
        let spec = mlp_d1();
        let report =
            exposedness_dimension(&spec, &strict_subnet(), None, &RankOptions::new(7)).unwrap();
        assert_eq!(report.ambient_dim - report.normal_dim, report.family_dim);
    }

    #[test]
    fn plain_family_with_restricted_columns_falls_short() {
        // Zeroing only the outgoing weight keeps the removed neuron's row in
        // play: the full Jacobian picks up a fourth direction the restricted
        // columns miss, and the honest count stays below the ambient
        // dimension.
        let spec = mlp_d1();
        let subnet = SubnetMlpSpec {
            index_sets: vec![vec![2]],
            mode: SubnetMode::Plain,
            sources: Vec::new(),
        };
        assert_eq!(free_weight_indices(&spec, &subnet).unwrap(), vec![0, 1, 2, 3, 4]);
        let report = exposedness_dimension(
            &spec,
            &subnet,
            Some(&[0, 1, 4]),
            &RankOptions::new(19),
        )
        .unwrap();
        assert_eq!(report.family_dim, 3);
        assert_eq!(report.normal_dim, 3);
        assert_eq!(report.total_dim, 6);
        assert_eq!(report.verdict, ExposednessVerdict::NotExposed);
    }

    #[test]
    fn full_parameter_family_is_trivially_exposed() {
        let spec = mlp_d1();
        let subnet = SubnetMlpSpec {
            index_sets: vec![vec![]],
            mode: SubnetMode::Plain,
            sources: Vec::new(),
        };
        let report =
            exposedness_dimension(&spec, &subnet, None, &RankOptions::new(3)).unwrap();
        assert_eq!(report.family_dim, 6);
        assert_eq!(report.normal_dim, 1);
        assert_eq!(report.total_dim, 7);
        assert_eq!(report.verdict, ExposednessVerdict::Exposed);
    }

    #[test]
    fn padded_cnn_family_is_not_exposed() {
        // Paddings (2, -1) zero the first two entries of filter one and the
        // last entry of filter two, leaving two free parameters.
        let spec = cnn_d2();
        let family = SubnetCnnSpec { signed_paddings: vec![2, -1] };
        assert_eq!(free_cnn_weight_indices(&spec, &family).unwrap().len(), 2);
        let report = cnn_exposedness_dimension(&spec, &family, &RankOptions::new(13)).unwrap();
        assert_eq!(report.family_dim, 2);
        assert_eq!(report.normal_dim, 15);
        assert_eq!(report.total_dim, 17);
        assert_eq!(report.ambient_dim, 20);
        assert_eq!(report.verdict, ExposednessVerdict::NotExposed);
    }

    #[test]
    fn single_padding_cnn_family_still_falls_short() {
        let spec = cnn_d2();
        let family = SubnetCnnSpec { signed_paddings: vec![1, 0] };
        let report = cnn_exposedness_dimension(&spec, &family, &RankOptions::new(31)).unwrap();
        assert!(report.total_dim < report.ambient_dim);
        assert_eq!(report.verdict, ExposednessVerdict::NotExposed);
    }

    #[test]
    fn family_weight_sample_respects_the_constraints() {
        let spec = mlp_d1();
        let sample = family_weight_sample(&spec, &strict_subnet(), 11, 9).unwrap();
        assert_eq!(sample.len(), 6);
        // Removed neuron 2 of layer 1: its row (indices 2, 3) and outgoing
        // weight (index 5) are zero; the free parameters are nonzero.
        for idx in [2usize, 3, 5] {
            assert!(sample[idx].is_zero());
        }
        for idx in [0usize, 1, 4] {
            assert!(!sample[idx].is_zero());
        }
        // Seeding makes the sample reproducible.
        let again = family_weight_sample(&spec, &strict_subnet(), 11, 9).unwrap();
        assert_eq!(sample, again);
        let other = family_weight_sample(&spec, &strict_subnet(), 12, 9).unwrap();
        assert_ne!(sample, other);
    }

    #[test]
    fn family_weight_sample_copies_repeated_rows() {
        let spec = mlp_d1();
        let subnet = SubnetMlpSpec {
            index_sets: vec![vec![2]],
            mode: SubnetMode::RepeatedRows,
            sources: vec![RowSource { layer: 1, removed: 2, source: 1 }],
        };
        let sample = family_weight_sample(&spec, &subnet, 5, 9).unwrap();
        assert_eq!(sample[2], sample[0]);
        assert_eq!(sample[3], sample[1]);
        assert!(!sample[5].is_zero());
    }
}
