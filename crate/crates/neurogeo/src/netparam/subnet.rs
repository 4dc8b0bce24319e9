//! Subnetwork families: removed neurons for MLPs, signed zero paddings for
//! CNNs, and the accumulated padding profile that detects CNN singularities.
//!
//! Neuron indices in `SubnetMlpSpec` are 1-based, matching the convention
//! `A_i` is a subset of `{1, ..., d_i}` for hidden layers `i = 1..L-1`.

use num::{BigInt, BigRational};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::NgError;
use crate::netparam::cnn::{CnnSpec, CnnWeights};
use crate::netparam::mlp::{MlpSpec, MlpWeights};
use crate::polyalg::MultiPoly;

/// How removed neurons constrain the weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SubnetMode {
    /// Zero the outgoing column of each removed neuron.
    Plain,
    /// Zero the outgoing column and the incoming row.
    Strict,
    /// Copy a surviving row over the removed neuron's incoming row
    /// (the variant used when sigma(0) != 0).
    RepeatedRows,
}

/// Where a repeated-rows constraint copies its row from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RowSource {
    /// Hidden layer, 1-based.
    pub layer: usize,
    /// Removed neuron, 1-based.
    pub removed: usize,
    /// Surviving neuron whose incoming row is copied, 1-based.
    pub source: usize,
}

/// Removed hidden neurons per layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubnetMlpSpec {
    /// `index_sets[i]` is A_{i+1}, 1-based neuron indices in hidden layer i+1.
    pub index_sets: Vec<Vec<usize>>,
    pub mode: SubnetMode,
    /// Required in repeated-rows mode: one entry per removed neuron.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<RowSource>,
}

impl SubnetMlpSpec {
    pub fn validate(&self, spec: &MlpSpec) -> Result<(), NgError> {
        let hidden = spec.num_layers() - 1;
        if self.index_sets.len() != hidden {
            return Err(NgError::Config(format!(
                "{} index sets for {hidden} hidden layers",
                self.index_sets.len()
            )));
        }
        for (i, set) in self.index_sets.iter().enumerate() {
            let d = spec.widths[i + 1];
            for &j in set {
                if j == 0 || j > d {
                    return Err(NgError::Config(format!(
                        "neuron {j} out of range 1..={d} in hidden layer {}",
                        i + 1
                    )));
                }
            }
            if self.mode == SubnetMode::RepeatedRows {
                for &j in set {
                    let k = self.source_for(i + 1, j).ok_or_else(|| {
                        NgError::Config(format!(
                            "repeated-rows subnetwork lacks a source for neuron {j} in layer {}",
                            i + 1
                        ))
                    })?;
                    if k == 0 || k > d || set.contains(&k) {
                        return Err(NgError::Config(format!(
                            "source {k} for neuron {j} must be a surviving neuron of layer {}",
                            i + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn source_for(&self, layer: usize, removed: usize) -> Option<usize> {
        self.sources
            .iter()
            .find(|s| s.layer == layer && s.removed == removed)
            .map(|s| s.source)
    }

    /// True when some neuron is removed.
    pub fn is_proper(&self) -> bool {
        self.index_sets.iter().any(|s| !s.is_empty())
    }
}

/// Applies the subnetwork constraints to concrete or symbolic weights.
pub fn apply_subnetwork(
    spec: &MlpSpec,
    weights: &MlpWeights,
    subnet: &SubnetMlpSpec,
) -> Result<MlpWeights, NgError> {
    subnet.validate(spec)?;
    let n = weights.num_vars();
    let zero = MultiPoly::zero(n);
    let mut out = weights.clone();
    for (i, set) in subnet.index_sets.iter().enumerate() {
        for &j in set {
            let col = j - 1;
            match subnet.mode {
                SubnetMode::Plain | SubnetMode::Strict => {
                    // Column j of W_{i+2} (the outgoing weights).
                    for row in out.layers[i + 1].iter_mut() {
                        row[col] = zero.clone();
                    }
                    if subnet.mode == SubnetMode::Strict {
                        for entry in out.layers[i][col].iter_mut() {
                            *entry = zero.clone();
                        }
                    }
                }
                SubnetMode::RepeatedRows => {
                    let src = subnet.source_for(i + 1, j).unwrap() - 1;
                    out.layers[i][col] = out.layers[i][src].clone();
                }
            }
        }
    }
    Ok(out)
}

/// Flat indices of weights left free by the subnetwork constraints.
/// For plain mode the removed neurons' incoming rows stay free (the
/// function does not depend on them); repeated-rows copies keep the source
/// rows as the free representatives.
pub fn free_weight_indices(spec: &MlpSpec, subnet: &SubnetMlpSpec) -> Result<Vec<usize>, NgError> {
    subnet.validate(spec)?;
    let mut constrained = vec![false; spec.num_weights()];
    for (i, set) in subnet.index_sets.iter().enumerate() {
        for &j in set {
            let col = j - 1;
            match subnet.mode {
                SubnetMode::Plain | SubnetMode::Strict => {
                    for row in 0..spec.widths[i + 2] {
                        constrained[spec.weight_index(i + 1, row, col)] = true;
                    }
                    if subnet.mode == SubnetMode::Strict {
                        for c in 0..spec.widths[i] {
                            constrained[spec.weight_index(i, col, c)] = true;
                        }
                    }
                }
                SubnetMode::RepeatedRows => {
                    for c in 0..spec.widths[i] {
                        constrained[spec.weight_index(i, col, c)] = true;
                    }
                }
            }
        }
    }
    Ok((0..spec.num_weights()).filter(|&k| !constrained[k]).collect())
}

/// Flat indices of the removed neurons' incoming rows, which parametrize
/// the fiber through a plain subnetwork point.
pub fn fiber_row_indices(spec: &MlpSpec, subnet: &SubnetMlpSpec) -> Result<Vec<usize>, NgError> {
    subnet.validate(spec)?;
    let mut out = Vec::new();
    for (i, set) in subnet.index_sets.iter().enumerate() {
        for &j in set {
            for c in 0..spec.widths[i] {
                out.push(spec.weight_index(i, j - 1, c));
            }
        }
    }
    Ok(out)
}

/// Signed zero paddings per CNN layer: `t_i > 0` zeroes the first `t_i`
/// filter entries, `t_i < 0` the last `|t_i|`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SubnetCnnSpec {
    pub signed_paddings: Vec<i64>,
}

impl SubnetCnnSpec {
    pub fn validate(&self, spec: &CnnSpec) -> Result<(), NgError> {
        if self.signed_paddings.len() != spec.num_layers() {
            return Err(NgError::Config(format!(
                "{} paddings for {} layers",
                self.signed_paddings.len(),
                spec.num_layers()
            )));
        }
        for (i, (&t, &k)) in self.signed_paddings.iter().zip(&spec.filters).enumerate() {
            if t.unsigned_abs() as usize > k {
                return Err(NgError::Config(format!(
                    "padding {t} exceeds filter length {k} at layer {}",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    pub fn is_proper(&self) -> bool {
        self.signed_paddings.iter().any(|&t| t != 0)
    }
}

/// Zeroes the padded entries of each filter.
pub fn apply_cnn_subnetwork(
    spec: &CnnSpec,
    weights: &CnnWeights,
    subnet: &SubnetCnnSpec,
) -> Result<CnnWeights, NgError> {
    subnet.validate(spec)?;
    let n = weights.num_vars();
    let zero = MultiPoly::zero(n);
    let mut out = weights.clone();
    for (l, &t) in subnet.signed_paddings.iter().enumerate() {
        let k = spec.filters[l];
        let pad = t.unsigned_abs() as usize;
        if t >= 0 {
            for entry in out.filters[l].iter_mut().take(pad) {
                *entry = zero.clone();
            }
        } else {
            for entry in out.filters[l].iter_mut().skip(k - pad) {
                *entry = zero.clone();
            }
        }
    }
    Ok(out)
}

/// Flat indices of filter entries not forced to zero by the paddings.
pub fn free_cnn_weight_indices(
    spec: &CnnSpec,
    subnet: &SubnetCnnSpec,
) -> Result<Vec<usize>, NgError> {
    subnet.validate(spec)?;
    let mut free = Vec::new();
    for (l, &t) in subnet.signed_paddings.iter().enumerate() {
        let k = spec.filters[l];
        let pad = t.unsigned_abs() as usize;
        let range = if t >= 0 { pad..k } else { 0..k - pad };
        for j in range {
            free.push(spec.weight_index(l, j));
        }
    }
    Ok(free)
}

/// The accumulated padding profile `t~_0, ..., t~_L` with
/// `t~_0 = 0` and `t~_i = t_i + t~_{i-1} / s_{i-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TildeProfile {
    #[serde(with = "crate::polyalg::ratio_serde::vec")]
    pub values: Vec<BigRational>,
}

impl TildeProfile {
    pub fn all_integral(&self) -> bool {
        self.values.iter().all(|v| v.denom().is_one())
    }

    pub fn last_zero(&self) -> bool {
        self.values.last().map(|v| v.is_zero()).unwrap_or(true)
    }

    /// The profile without the leading t~_0 = 0, as displayed in tables.
    pub fn tail(&self) -> &[BigRational] {
        &self.values[1..]
    }
}

/// Computes the accumulated profile for a padded CNN family.
pub fn tilde_profile(spec: &CnnSpec, subnet: &SubnetCnnSpec) -> Result<TildeProfile, NgError> {
    subnet.validate(spec)?;
    let mut values = vec![BigRational::zero()];
    for (i, &t) in subnet.signed_paddings.iter().enumerate() {
        // Stride of the previous convolution layer; the i = 0 term is
        // multiplied into t~_0 = 0, so the sentinel value is irrelevant.
        let prev_stride = if i == 0 { 1 } else { spec.strides[i - 1] };
        let prev = &values[i];
        let next = BigRational::from_integer(BigInt::from(t))
            + prev / BigRational::from_integer(BigInt::from(prev_stride as i64));
        values.push(next);
    }
    Ok(TildeProfile { values })
}

/// The shifted filters witnessing that a padded family folds back onto the
/// unpadded image: entries move by `t_i` toward the zeroed side.
/// Requires the accumulated profile to be integral with final value zero.
pub fn shift_subnetwork_weights(
    spec: &CnnSpec,
    weights: &CnnWeights,
    subnet: &SubnetCnnSpec,
) -> Result<CnnWeights, NgError> {
    let profile = tilde_profile(spec, subnet)?;
    if !profile.all_integral() || !profile.last_zero() {
        return Err(NgError::Config(format!(
            "shift witness needs an integral profile ending in zero, got {:?}",
            profile.values.iter().map(ToString::to_string).collect::<Vec<_>>()
        )));
    }
    let n = weights.num_vars();
    let zero = MultiPoly::zero(n);
    let mut out = weights.clone();
    for (l, &t) in subnet.signed_paddings.iter().enumerate() {
        let k = spec.filters[l];
        let pad = t.unsigned_abs() as usize;
        let w = &weights.filters[l];
        out.filters[l] = if t >= 0 {
            // (w[t..k], 0, ..., 0)
            w[pad..].iter().cloned().chain(std::iter::repeat(zero.clone()).take(pad)).collect()
        } else {
            // (0, ..., 0, w[0..k-|t|])
            std::iter::repeat(zero.clone())
                .take(pad)
                .chain(w[..k - pad].iter().cloned())
                .collect()
        };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{cnn_d2, mlp_d1};
    use crate::netparam::cnn::cnn_forward;
    use crate::netparam::mlp::mlp_forward;
    use crate::polyalg::rational_from_str;

    fn subnet(sets: Vec<Vec<usize>>, mode: SubnetMode) -> SubnetMlpSpec {
        SubnetMlpSpec { index_sets: sets, mode, sources: Vec::new() }
    }

    #[test]
    fn plain_zeroes_outgoing_column() {
        let spec = mlp_d1();
        let w = spec.symbolic_weights();
        let sub = subnet(vec![vec![2]], SubnetMode::Plain);
        let out = apply_subnetwork(&spec, &w, &sub).unwrap();
        // Column 2 of W2 is the weight f; the rest is untouched.
        assert!(out.layers[1][0][1].is_zero());
        assert_eq!(out.layers[0], w.layers[0]);
        assert_eq!(out.layers[1][0][0], w.layers[1][0][0]);
    }

    #[test]
    fn strict_zeroes_row_and_column() {
        let spec = mlp_d1();
        let w = spec.symbolic_weights();
        let sub = subnet(vec![vec![2]], SubnetMode::Strict);
        let out = apply_subnetwork(&spec, &w, &sub).unwrap();
        // c = d = f = 0.
        assert!(out.layers[0][1][0].is_zero());
        assert!(out.layers[0][1][1].is_zero());
        assert!(out.layers[1][0][1].is_zero());
        assert_eq!(free_weight_indices(&spec, &sub).unwrap(), vec![0, 1, 4]);
    }

    #[test]
    fn repeated_rows_copies_and_keeps_columns() {
        let spec = mlp_d1();
        let w = spec.symbolic_weights();
        let mut sub = subnet(vec![vec![2]], SubnetMode::RepeatedRows);
        sub.sources.push(RowSource { layer: 1, removed: 2, source: 1 });
        let out = apply_subnetwork(&spec, &w, &sub).unwrap();
        assert_eq!(out.layers[0][1], out.layers[0][0]);
        assert_eq!(out.layers[1], w.layers[1]);
        // Missing source is rejected.
        let bad = subnet(vec![vec![2]], SubnetMode::RepeatedRows);
        assert!(apply_subnetwork(&spec, &w, &bad).is_err());
    }

    #[test]
    fn plain_forward_ignores_free_rows() {
        let spec = mlp_d1();
        let sub = subnet(vec![vec![1]], SubnetMode::Plain);
        let base: Vec<_> = ["1", "2", "3", "4", "5", "6"]
            .iter()
            .map(|s| rational_from_str(s).unwrap())
            .collect();
        let constrained =
            apply_subnetwork(&spec, &spec.constant_weights(&base).unwrap(), &sub).unwrap();
        let f0 = mlp_forward(&spec, &constrained).unwrap();
        // Overwrite the free row (incoming weights of removed neuron 1).
        let mut other = constrained.clone();
        other.layers[0][0][0] = MultiPoly::constant_int(8, 99);
        other.layers[0][0][1] = MultiPoly::constant_int(8, -7);
        let f1 = mlp_forward(&spec, &other).unwrap();
        assert_eq!(f0, f1);
        assert_eq!(fiber_row_indices(&spec, &sub).unwrap(), vec![0, 1]);
    }

    #[test]
    fn strict_equals_reduced_architecture() {
        let spec = mlp_d1();
        let sub = subnet(vec![vec![2]], SubnetMode::Strict);
        let base: Vec<_> = ["2", "-3", "7", "1", "5", "-2"]
            .iter()
            .map(|s| rational_from_str(s).unwrap())
            .collect();
        let constrained =
            apply_subnetwork(&spec, &spec.constant_weights(&base).unwrap(), &sub).unwrap();
        let full = mlp_forward(&spec, &constrained).unwrap();
        // Reduced (2,1,1) network on the surviving weights (a, b, e).
        let reduced_spec =
            MlpSpec::new(vec![2, 1, 1], spec.activation.clone()).unwrap();
        let reduced_w: Vec<_> = ["2", "-3", "5"]
            .iter()
            .map(|s| rational_from_str(s).unwrap())
            .collect();
        let reduced =
            mlp_forward(&reduced_spec, &reduced_spec.constant_weights(&reduced_w).unwrap())
                .unwrap();
        // Compare coefficients in the input variables.
        let full_groups = full.components[0].split_vars(2);
        let reduced_groups = reduced.components[0].split_vars(2);
        assert_eq!(full_groups.len(), reduced_groups.len());
        for (m, c) in full_groups {
            let rc = &reduced_groups[&m];
            assert_eq!(c.canonical_string(), rc.canonical_string());
        }
    }

    #[test]
    fn cnn_padding_patterns() {
        let spec = cnn_d2();
        let w = spec.symbolic_weights();
        let sub = SubnetCnnSpec { signed_paddings: vec![2, -1] };
        let out = apply_cnn_subnetwork(&spec, &w, &sub).unwrap();
        assert!(out.filters[0][0].is_zero() && out.filters[0][1].is_zero());
        assert!(!out.filters[0][2].is_zero());
        assert!(out.filters[1][1].is_zero());
        assert!(!out.filters[1][0].is_zero());
        // t = (+1, 0): only a = 0.
        let sub1 = SubnetCnnSpec { signed_paddings: vec![1, 0] };
        let out1 = apply_cnn_subnetwork(&spec, &w, &sub1).unwrap();
        assert!(out1.filters[0][0].is_zero());
        assert!(!out1.filters[0][1].is_zero());
        assert!(!out1.filters[1][1].is_zero());
        // Out-of-range padding rejected.
        let bad = SubnetCnnSpec { signed_paddings: vec![4, 0] };
        assert!(bad.validate(&spec).is_err());
    }

    #[test]
    fn tilde_profiles_match_table() {
        let spec = cnn_d2();
        for (paddings, expected, singular) in crate::fixtures::d2_padding_table() {
            let sub = SubnetCnnSpec { signed_paddings: paddings };
            let profile = tilde_profile(&spec, &sub).unwrap();
            assert_eq!(profile.tail(), expected.as_slice());
            let classified =
                sub.is_proper() && profile.all_integral() && profile.last_zero();
            assert_eq!(classified, singular);
        }
    }

    #[test]
    fn shift_witness_matches_displayed_embeddings() {
        let spec = cnn_d2();
        let sub = SubnetCnnSpec { signed_paddings: vec![2, -1] };
        let padded = apply_cnn_subnetwork(&spec, &spec.symbolic_weights(), &sub).unwrap();
        let shifted = shift_subnetwork_weights(&spec, &padded, &sub).unwrap();
        // w1 = (0,0,c) shifts to (c,0,0); w2 = (d,0) shifts to (0,d).
        let n = 10;
        assert_eq!(shifted.filters[0][0], MultiPoly::var(n, 7));
        assert!(shifted.filters[0][1].is_zero() && shifted.filters[0][2].is_zero());
        assert!(shifted.filters[1][0].is_zero());
        assert_eq!(shifted.filters[1][1], MultiPoly::var(n, 8));
        // The two weight settings give the same function.
        let f_padded = cnn_forward(&spec, &padded).unwrap();
        let f_shifted = cnn_forward(&spec, &shifted).unwrap();
        assert_eq!(f_padded, f_shifted);
        // Non-integral profiles are rejected.
        let bad = SubnetCnnSpec { signed_paddings: vec![1, 0] };
        assert!(shift_subnetwork_weights(&spec, &padded, &bad).is_err());
    }

    #[test]
    fn zero_padding_is_identity() {
        let spec = cnn_d2();
        let w = spec.symbolic_weights();
        let sub = SubnetCnnSpec { signed_paddings: vec![0, 0] };
        assert_eq!(apply_cnn_subnetwork(&spec, &w, &sub).unwrap(), w);
        assert_eq!(shift_subnetwork_weights(&spec, &w, &sub).unwrap(), w);
        assert!(!sub.is_proper());
    }
}
