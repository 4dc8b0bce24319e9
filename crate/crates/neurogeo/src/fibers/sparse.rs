//! Sparse activations with super-polynomially separated exponents and the
//! layerwise decomposition they induce on the network function.

use num::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::error::NgError;
use crate::netparam::{mlp_forward, sample_nonzero_ints, MlpSpec, MlpWeights};
use crate::polyalg::{Activation, MultiPoly, PolyMap};

pub const DEFAULT_MONOMIAL_BUDGET: u128 = 10_000_000;

/// Strictly increasing exponents with `b_1 > 1` and each later exponent
/// exceeding the previous one raised to `L - 1`, where `L` is the exponent
/// count. These gaps keep the homogeneous pieces of the network function
/// from interfering.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SparseActivationSpec {
    pub exponents: Vec<u32>,
}

impl SparseActivationSpec {
    pub fn new(exponents: Vec<u32>) -> Result<Self, NgError> {
        if exponents.is_empty() {
            return Err(NgError::Config("at least one exponent required".into()));
        }
        if exponents[0] <= 1 {
            return Err(NgError::Config("first exponent must exceed 1".into()));
        }
        let layers = exponents.len() as u32;
        for pair in exponents.windows(2) {
            let gap = BigInt::from(pair[0]).pow(layers.saturating_sub(1));
            if BigInt::from(pair[1]) <= gap {
                return Err(NgError::Config(format!(
                    "exponent {} must exceed {}^({} - 1) = {}",
                    pair[1], pair[0], layers, gap
                )));
            }
        }
        Ok(SparseActivationSpec { exponents })
    }

    /// Number of layers this activation is built for.
    pub fn num_layers(&self) -> usize {
        self.exponents.len()
    }

    /// The activation `x^(b_1) + ... + x^(b_L)`.
    pub fn activation(&self) -> Result<Activation, NgError> {
        Activation::sparse(&self.exponents)
    }
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DegreeCheck {
    pub exponent: u32,
    pub degree: u64,
    pub matches: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DegreeSkip {
    pub exponent: u32,
    pub degree: u64,
    pub needed_slots: u128,
}

/// Outcome of the layerwise decomposition test.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SparseDecompositionReport {
    pub widths: Vec<usize>,
    pub exponents: Vec<u32>,
    pub seed: u64,
    pub budget: u128,
    pub checked: Vec<DegreeCheck>,
    /// Degrees whose expansion would exceed the monomial budget.
    pub skipped: Vec<DegreeSkip>,
    /// True when the function minus every checked monomial layer has no
    /// monomial left at any checked degree.
    pub remainder_clean: bool,
    pub all_match: bool,
}

/// Number of coefficient slots a dense degree-`d` expansion in `vars`
/// variables can touch, squared to account for products.
fn expansion_slots(vars: usize, degree: u64) -> u128 {
    // C(degree + vars, vars), saturating.
    let mut acc: u128 = 1;
    for i in 1..=vars as u128 {
        acc = acc.saturating_mul((degree as u128).saturating_add(i));
        acc /= i;
    }
    acc.saturating_mul(acc)
}

/// Truncated forward pass: exact in every monomial of total degree at most
/// `max_degree`, with higher-degree terms dropped as they appear.
fn forward_truncated(
    spec: &MlpSpec,
    weights: &MlpWeights,
    max_degree: u32,
) -> Result<PolyMap, NgError> {
    let n = weights.num_vars();
    let d0 = spec.input_dim();
    let mut act: Vec<MultiPoly> = (0..d0).map(|i| MultiPoly::var(n, i)).collect();
    let last = spec.num_layers() - 1;
    for l in 0..spec.num_layers() {
        let mat = &weights.layers[l];
        let mut next = Vec::with_capacity(mat.len());
        for row in mat {
            let mut acc = MultiPoly::zero(n);
            for (w, x) in row.iter().zip(&act) {
                acc = acc.add(&w.mul_truncated(x, max_degree)?)?;
            }
            next.push(acc);
        }
        act = next;
        if l < last {
            act = act
                .into_iter()
                .map(|p| spec.activation.compose_truncated(&p, max_degree))
                .collect();
        }
    }
    PolyMap::new(act)
}

/// Tests, at random integer weights, that each homogeneous slice of the
/// sparse-activation network at degree `b_j^(L-1)` coincides exactly with
/// the monomial network using `x^(b_j)` and the same weights. Slices whose
/// expansion would exceed `budget` monomial slots are skipped and reported.
pub fn sparse_decomposition_check(
    widths: &[usize],
    sparse: &SparseActivationSpec,
    seed: u64,
    budget: Option<u128>,
) -> Result<SparseDecompositionReport, NgError> {
    let layers = widths.len().saturating_sub(1);
    // One exponent per layer; a single exponent (monomial activation) is
    // accepted at any depth since its decomposition is the whole function.
    if sparse.num_layers() != layers && sparse.num_layers() != 1 {
        return Err(NgError::Config(format!(
            "{} exponents supplied for a {layers}-layer architecture; they must agree",
            sparse.num_layers()
        )));
    }
    let budget = budget.unwrap_or(DEFAULT_MONOMIAL_BUDGET);
    let spec = MlpSpec::new(widths.to_vec(), sparse.activation()?)?;
    let input_dim = spec.input_dim();
    let tower = (layers - 1) as u32;

    let mut feasible = Vec::new();
    let mut skipped = Vec::new();
    for &beta in &sparse.exponents {
        let degree = (beta as u64).pow(tower);
        let needed = expansion_slots(input_dim, degree);
        if needed <= budget && degree <= u64::from(u32::MAX) {
            feasible.push((beta, degree));
        } else {
            skipped.push(DegreeSkip { exponent: beta, degree, needed_slots: needed });
        }
    }
    if feasible.is_empty() {
        let needed = skipped.iter().map(|s| s.needed_slots).min().unwrap_or(0);
        return Err(NgError::Budget { needed, budget });
    }
    let max_degree = feasible.iter().map(|&(_, d)| d).max().unwrap() as u32;

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let flat = sample_nonzero_ints(&mut rng, spec.num_weights(), 10);
    let weights = spec.constant_weights(&flat)?;
    let full = forward_truncated(&spec, &weights, max_degree)?;

    // The monomial comparison networks are independent; build them in
    // parallel.
    let monomial_maps: Vec<Result<PolyMap, NgError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = feasible
            .iter()
            .map(|&(beta, _)| {
                let widths = widths.to_vec();
                let flat = &flat;
                scope.spawn(move || {
                    let mono_spec = MlpSpec::new(widths, Activation::monomial(beta)?)?;
                    mlp_forward(&mono_spec, &mono_spec.constant_weights(flat)?)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker thread panicked")).collect()
    });

    let mut checked = Vec::new();
    let mut remainder = full.components.clone();
    for ((beta, degree), map) in feasible.iter().zip(monomial_maps) {
        let map = map?;
        let mut matches = true;
        for (o, comp) in full.components.iter().enumerate() {
            let slice = comp.homogeneous_component(*degree as u32);
            if slice != map.components[o] {
                matches = false;
            }
            remainder[o] = remainder[o].sub(&map.components[o])?;
        }
        checked.push(DegreeCheck { exponent: *beta, degree: *degree, matches });
    }
    // The leftover after removing every feasible monomial layer must avoid
    // those degrees entirely.
    let remainder_clean = remainder.iter().all(|comp| {
        feasible
            .iter()
            .all(|&(_, degree)| comp.homogeneous_component(degree as u32).is_zero())
    });

    let all_match = checked.iter().all(|c| c.matches);
    Ok(SparseDecompositionReport {
        widths: widths.to_vec(),
        exponents: sparse.exponents.clone(),
        seed,
        budget,
        checked,
        skipped,
        remainder_clean,
        all_match,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_gaps_enforced() {
        assert!(SparseActivationSpec::new(vec![2, 3]).is_ok());
        assert!(SparseActivationSpec::new(vec![2, 5, 26]).is_ok());
        // 25 = 5^2 is not a strict overshoot for a three-exponent spec.
        assert!(SparseActivationSpec::new(vec![2, 5, 25]).is_err());
        assert!(SparseActivationSpec::new(vec![1, 3]).is_err());
        assert!(SparseActivationSpec::new(vec![2, 2]).is_err());
    }

    #[test]
    fn two_layer_decomposition_splits_exactly() {
        let sparse = SparseActivationSpec::new(vec![2, 3]).unwrap();
        let report = sparse_decomposition_check(&[2, 2, 1], &sparse, 5, None).unwrap();
        assert!(report.all_match);
        assert!(report.remainder_clean);
        assert!(report.skipped.is_empty());
        assert_eq!(
            report.checked.iter().map(|c| c.degree).collect::<Vec<_>>(),
            vec![2, 3]
        );
    }

    #[test]
    fn three_layer_decomposition_skips_over_budget_degree() {
        let sparse = SparseActivationSpec::new(vec![2, 5, 26]).unwrap();
        let report = sparse_decomposition_check(&[2, 2, 2, 1], &sparse, 9, None).unwrap();
        assert!(report.all_match);
        assert!(report.remainder_clean);
        assert_eq!(
            report.checked.iter().map(|c| c.degree).collect::<Vec<_>>(),
            vec![4, 25]
        );
        assert_eq!(report.skipped.len(), 1);
        assert_eq!(report.skipped[0].degree, 676);
        assert!(report.skipped[0].needed_slots > DEFAULT_MONOMIAL_BUDGET);
    }

    #[test]
    fn exponent_count_must_match_depth() {
        let sparse = SparseActivationSpec::new(vec![2, 5]).unwrap();
        let err = sparse_decomposition_check(&[2, 2, 2, 1], &sparse, 1, None).unwrap_err();
        assert!(matches!(err, NgError::Config(_)));
    }

    #[test]
    fn single_exponent_is_trivially_exact() {
        let sparse = SparseActivationSpec::new(vec![4]).unwrap();
        let report = sparse_decomposition_check(&[2, 2, 1], &sparse, 2, None).unwrap();
        assert!(report.all_match);
        assert!(report.remainder_clean);
        assert_eq!(report.checked.len(), 1);
        assert_eq!(report.checked[0].degree, 4);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let sparse = SparseActivationSpec::new(vec![2, 3]).unwrap();
        let err = sparse_decomposition_check(&[2, 2, 1], &sparse, 5, Some(1)).unwrap_err();
        assert!(matches!(err, NgError::Budget { .. }));
    }
}
