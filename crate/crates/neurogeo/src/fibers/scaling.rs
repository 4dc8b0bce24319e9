//! Fiber structure of monomial-activation networks: the lattice system
//! counting diagonal scalings, the permutation-and-scaling action that
//! preserves the network function, and the rigidity of layerwise scalings
//! for convolutional networks.

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::Serialize;

use crate::error::NgError;
use crate::fibers::snf::{int_det, smith_normal_form, SnfResult};
use crate::netparam::{cnn_forward, embed, AmbientBasis, CnnSpec, CnnWeights, MlpWeights};
use crate::polyalg::MultiPoly;

/// The exponent lattice of the scaling system: entry `(i, j)` is
/// `b_(L-i)^(L-1-j)` (1-based), one Vandermonde row per hidden layer. Takes
/// the raw per-layer exponent list `b_1, ..., b_L`; the last exponent never
/// enters the lattice.
pub fn scaling_exponent_matrix(exponents: &[u32]) -> Result<Vec<Vec<BigInt>>, NgError> {
    let layers = exponents.len();
    if layers < 2 {
        return Err(NgError::Config("scaling system needs at least two layers".into()));
    }
    let size = layers - 1;
    let mat = (1..=size)
        .map(|i| {
            let beta = BigInt::from(exponents[layers - 1 - i]);
            (1..=size).map(|j| beta.pow((size - j) as u32)).collect()
        })
        .collect();
    Ok(mat)
}

/// Count of complex diagonal scalings fixing a generic monomial-activation
/// network function: the product of the invariant factors of the exponent
/// lattice, which equals `|det A|`.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ScalingCountReport {
    pub snf: SnfResult,
    /// Complex scaling-fiber count (solutions over the complex torus; no
    /// real count is claimed).
    pub count: String,
}

pub fn fiber_scaling_count(exponents: &[u32]) -> Result<ScalingCountReport, NgError> {
    let mat = scaling_exponent_matrix(exponents)?;
    let snf = smith_normal_form(&mat)?;
    let count: BigInt = snf.invariant_factors.iter().product();
    let det = int_det(&mat)?;
    if count != det.abs() {
        return Err(NgError::Internal(
            "invariant factor product disagrees with the determinant".into(),
        ));
    }
    Ok(ScalingCountReport { snf, count: count.to_string() })
}

/// A permutation together with an invertible diagonal per hidden layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialFiberElement {
    /// `permutations[l][new_row] = old_row`, one per hidden layer.
    pub permutations: Vec<Vec<usize>>,
    /// Nonzero diagonal entries, one vector per hidden layer.
    pub diagonals: Vec<Vec<BigRational>>,
}

impl MonomialFiberElement {
    pub fn identity(hidden_widths: &[usize]) -> Self {
        MonomialFiberElement {
            permutations: hidden_widths.iter().map(|&w| (0..w).collect()).collect(),
            diagonals: hidden_widths
                .iter()
                .map(|&w| vec![BigRational::one(); w])
                .collect(),
        }
    }

    fn validate(&self, hidden_widths: &[usize]) -> Result<(), NgError> {
        if self.permutations.len() != hidden_widths.len()
            || self.diagonals.len() != hidden_widths.len()
        {
            return Err(NgError::Shape(format!(
                "fiber element covers {} hidden layers, network has {}",
                self.permutations.len(),
                hidden_widths.len()
            )));
        }
        for (l, &w) in hidden_widths.iter().enumerate() {
            let perm = &self.permutations[l];
            let mut seen = vec![false; w];
            if perm.len() != w {
                return Err(NgError::Shape(format!("permutation {l} has wrong length")));
            }
            for &p in perm {
                if p >= w || seen[p] {
                    return Err(NgError::Config(format!("layer {l} list is not a permutation")));
                }
                seen[p] = true;
            }
            if self.diagonals[l].len() != w {
                return Err(NgError::Shape(format!("diagonal {l} has wrong length")));
            }
            if self.diagonals[l].iter().any(Zero::is_zero) {
                return Err(NgError::Config(format!("diagonal {l} has a zero entry")));
            }
        }
        Ok(())
    }
}

fn rational_power(base: &BigRational, exp: i32) -> Result<BigRational, NgError> {
    if base.is_zero() {
        return Err(NgError::Config("singular diagonal in fiber action".into()));
    }
    Ok(base.pow(exp))
}

/// Applies `(P_1 D_1 W_1, P_2 D_2 W_2 D_1^(-r) P_1^T, ..., W_L D_(L-1)^(-r)
/// P_(L-1)^T)` to the weights. With the monomial activation `x^r` the
/// network function is unchanged.
pub fn monomial_fiber_action(
    weights: &MlpWeights,
    elt: &MonomialFiberElement,
    r: u32,
) -> Result<MlpWeights, NgError> {
    let hidden: Vec<usize> = weights.layers[..weights.layers.len() - 1]
        .iter()
        .map(Vec::len)
        .collect();
    elt.validate(&hidden)?;
    let mut out = Vec::with_capacity(weights.layers.len());
    for (l, mat) in weights.layers.iter().enumerate() {
        let rows = mat.len();
        let cols = mat[0].len();
        let mut next = vec![vec![MultiPoly::zero(mat[0][0].num_vars()); cols]; rows];
        for i in 0..rows {
            // Left factor P_l D_l permutes and scales rows.
            let (src_row, row_scale) = if l < hidden.len() {
                let s = elt.permutations[l][i];
                (s, elt.diagonals[l][s].clone())
            } else {
                (i, BigRational::one())
            };
            for j in 0..cols {
                // Right factor D_(l-1)^(-r) P_(l-1)^T permutes and scales
                // columns.
                let (src_col, col_scale) = if l > 0 {
                    let s = elt.permutations[l - 1][j];
                    let exp = i32::try_from(r)
                        .map_err(|_| NgError::Config(format!("exponent {r} too large")))?;
                    (s, rational_power(&elt.diagonals[l - 1][s], -exp)?)
                } else {
                    (j, BigRational::one())
                };
                let scale = &row_scale * col_scale;
                next[i][j] = mat[src_row][src_col].scale(&scale);
            }
        }
        out.push(next);
    }
    Ok(MlpWeights { layers: out })
}

/// One nonzero factor per layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalingFamily {
    pub factors: Vec<BigRational>,
}

impl ScalingFamily {
    pub fn new(factors: Vec<BigRational>) -> Result<Self, NgError> {
        if factors.iter().any(Zero::is_zero) {
            return Err(NgError::Config("scaling factors must be nonzero".into()));
        }
        Ok(ScalingFamily { factors })
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.iter().all(One::is_one)
    }
}

/// Outcome of the layerwise-scaling comparison for a CNN.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RigidityReport {
    /// True when the scaled network computes the identical function.
    pub equal: bool,
    pub trivial_scaling: bool,
    /// Unmet theorem hypotheses; the comparison still ran.
    pub hypothesis_warnings: Vec<String>,
}

/// Compares the coefficient vectors of the network and its layerwise
/// rescaling `w_i -> lambda_i w_i`. Under the rigidity hypotheses equality
/// forces every factor to be 1.
pub fn scaling_rigidity_check(
    spec: &CnnSpec,
    weights: &CnnWeights,
    family: &ScalingFamily,
) -> Result<RigidityReport, NgError> {
    if family.factors.len() != spec.num_layers() {
        return Err(NgError::Shape(format!(
            "{} scaling factors for {} layers",
            family.factors.len(),
            spec.num_layers()
        )));
    }
    let mut warnings = Vec::new();
    let coeffs = spec.activation.coeffs();
    let degree = spec.activation.degree();
    if degree <= 2 {
        warnings.push(format!("activation degree {degree} does not exceed 2"));
    }
    if !spec.activation.vanishes_at_zero() {
        warnings.push("activation has a nonzero constant term".into());
    }
    if degree >= 1 && coeffs.get(degree as usize - 1).map_or(true, Zero::is_zero) {
        warnings.push("coefficient below the leading term vanishes".into());
    }
    for (l, filter) in weights.filters.iter().enumerate() {
        if filter.iter().all(MultiPoly::is_zero) {
            warnings.push(format!("filter {} is zero", l + 1));
        }
    }

    let scaled = CnnWeights {
        filters: weights
            .filters
            .iter()
            .zip(&family.factors)
            .map(|(filter, lambda)| filter.iter().map(|w| w.scale(lambda)).collect())
            .collect(),
    };
    let basis = AmbientBasis::for_cnn(spec);
    let original = embed(&cnn_forward(spec, weights)?, &basis)?;
    let rescaled = embed(&cnn_forward(spec, &scaled)?, &basis)?;
    Ok(RigidityReport {
        equal: original.coords == rescaled.coords,
        trivial_scaling: family.is_trivial(),
        hypothesis_warnings: warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::netparam::{mlp_forward, MlpSpec};
    use crate::polyalg::Activation;
    use num::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn exponent_matrices_match_reference_values() {
        let mat = scaling_exponent_matrix(&[2, 3, 100]).unwrap();
        let expect: Vec<Vec<BigInt>> = vec![
            vec![BigInt::from(3), BigInt::from(1)],
            vec![BigInt::from(2), BigInt::from(1)],
        ];
        assert_eq!(mat, expect);
    }

    #[test]
    fn scaling_counts_for_reference_exponents() {
        // Two layers: a single equation lambda = 1.
        assert_eq!(fiber_scaling_count(&[2, 3]).unwrap().count, "1");
        assert_eq!(fiber_scaling_count(&[2, 3, 100]).unwrap().count, "1");
        assert_eq!(fiber_scaling_count(&[2, 4, 100]).unwrap().count, "2");
    }

    #[test]
    fn count_is_invariant_under_exponent_reordering() {
        let mut mat = scaling_exponent_matrix(&[2, 4, 100]).unwrap();
        mat.swap(0, 1);
        let reordered: BigInt =
            smith_normal_form(&mat).unwrap().invariant_factors.iter().product();
        assert_eq!(reordered.to_string(), fiber_scaling_count(&[2, 4, 100]).unwrap().count);
    }

    fn square_spec() -> MlpSpec {
        MlpSpec::new(vec![2, 2, 1], Activation::monomial(2).unwrap()).unwrap()
    }

    #[test]
    fn diagonal_scaling_preserves_the_function() {
        let spec = square_spec();
        let w = spec.symbolic_weights();
        let elt = MonomialFiberElement {
            permutations: vec![vec![0, 1]],
            diagonals: vec![vec![q(2, 1), q(3, 1)]],
        };
        let moved = monomial_fiber_action(&w, &elt, 2).unwrap();
        assert_ne!(moved, w);
        assert_eq!(
            mlp_forward(&spec, &moved).unwrap(),
            mlp_forward(&spec, &w).unwrap()
        );
    }

    #[test]
    fn permutation_preserves_the_function() {
        let spec = square_spec();
        let w = spec.symbolic_weights();
        let elt = MonomialFiberElement {
            permutations: vec![vec![1, 0]],
            diagonals: vec![vec![q(1, 1), q(1, 1)]],
        };
        let moved = monomial_fiber_action(&w, &elt, 2).unwrap();
        assert_ne!(moved, w);
        assert_eq!(
            mlp_forward(&spec, &moved).unwrap(),
            mlp_forward(&spec, &w).unwrap()
        );
    }

    #[test]
    fn inverse_element_restores_weights() {
        let spec = MlpSpec::new(vec![2, 3, 2], Activation::monomial(3).unwrap()).unwrap();
        let w = spec.symbolic_weights();
        let perm = vec![2, 0, 1];
        let diag = vec![q(2, 1), q(-1, 3), q(5, 2)];
        let elt = MonomialFiberElement {
            permutations: vec![perm.clone()],
            diagonals: vec![diag.clone()],
        };
        // Inverse permutation q with q[p[i]] = i; inverse diagonal entry at
        // k is 1 / d[p[k]].
        let mut inv_perm = vec![0; 3];
        for (i, &p) in perm.iter().enumerate() {
            inv_perm[p] = i;
        }
        let inv_diag: Vec<BigRational> =
            (0..3).map(|k| diag[perm[k]].recip()).collect();
        let inverse = MonomialFiberElement {
            permutations: vec![inv_perm],
            diagonals: vec![inv_diag],
        };
        let moved = monomial_fiber_action(&w, &elt, 3).unwrap();
        let back = monomial_fiber_action(&moved, &inverse, 3).unwrap();
        assert_eq!(back, w);
    }

    #[test]
    fn identity_element_fixes_weights() {
        let spec = square_spec();
        let w = spec.symbolic_weights();
        let elt = MonomialFiberElement::identity(&[2]);
        assert_eq!(monomial_fiber_action(&w, &elt, 2).unwrap(), w);
    }

    #[test]
    fn trivial_scaling_is_accepted_nontrivial_rejected() {
        let spec = fixtures::cnn_d2();
        let w = spec.symbolic_weights();
        let ok = scaling_rigidity_check(
            &spec,
            &w,
            &ScalingFamily::new(vec![q(1, 1), q(1, 1)]).unwrap(),
        )
        .unwrap();
        assert!(ok.equal && ok.trivial_scaling);
        // sigma = x^2 + x has degree 2: hypothesis violation is reported,
        // and the scaled network still differs.
        let moved = scaling_rigidity_check(
            &spec,
            &w,
            &ScalingFamily::new(vec![q(2, 1), q(1, 1)]).unwrap(),
        )
        .unwrap();
        assert!(!moved.equal);
        assert!(moved.hypothesis_warnings.iter().any(|w| w.contains("degree")));
    }

    #[test]
    fn cubic_chain_rejects_compensating_scalings() {
        // L=2 chain, sigma = x^3 + x^2, lambda = (2, 1/2).
        let spec = CnnSpec::new(
            vec![2, 2],
            vec![1, 1],
            vec![3, 2, 1],
            Activation::from_ints(&[0, 0, 1, 1]).unwrap(),
        )
        .unwrap();
        let w = spec.symbolic_weights();
        let report = scaling_rigidity_check(
            &spec,
            &w,
            &ScalingFamily::new(vec![q(2, 1), q(1, 2)]).unwrap(),
        )
        .unwrap();
        assert!(!report.equal);
        assert!(report.hypothesis_warnings.is_empty());
    }
}
