//! Exact criticality checks: the gradient of a quadric loss pulled back
//! through the parametrization, and targets constructed to make a given
//! weight tuple critical.
//!
//! A weight tuple `W` is critical for the loss centered at `u` exactly when
//! `J^T G (phi(W) - u) = 0`, with `J` the Jacobian of the parametrization
//! at `W`. The witness construction inverts this: it picks `u = phi(W) + v`
//! with `v` in the kernel of `J^T G`, which forces the gradient to vanish
//! identically — and checks that it does, exactly.

use num::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::critpoints::quadric::QuadricLoss;
use crate::error::NgError;
use crate::geometry::JacobianOracle;
use crate::netparam::{embed, mlp_forward, sample_nonzero_ints, MlpSpec};

/// Coefficient vector of the network function at exact weights.
pub fn embedded_point(spec: &MlpSpec, weights: &[BigRational]) -> Result<Vec<BigRational>, NgError> {
    let f = mlp_forward(spec, &spec.constant_weights(weights)?)?;
    let oracle_basis = crate::netparam::AmbientBasis::for_mlp(spec);
    embed(&f, &oracle_basis)?.to_rationals()
}

/// Exact gradient of the pulled-back loss at `weights`:
/// `2 J^T G (phi(W) - u)`, one entry per flat weight.
pub fn gradient_of_loss(
    spec: &MlpSpec,
    weights: &[BigRational],
    loss: &QuadricLoss,
) -> Result<Vec<BigRational>, NgError> {
    let center = loss
        .center
        .as_ref()
        .ok_or_else(|| NgError::Config("the loss has no center (degenerate quadric)".into()))?;
    let oracle = JacobianOracle::for_mlp(spec)?;
    if loss.dim() != oracle.rows() {
        return Err(NgError::Shape(format!(
            "quadric of dimension {} against an ambient basis of size {}",
            loss.dim(),
            oracle.rows()
        )));
    }
    let phi = embedded_point(spec, weights)?;
    let diff: Vec<BigRational> = phi.iter().zip(center).map(|(p, u)| p - u).collect();
    let gdiff = loss.gram.mul_vec(&diff)?;
    let jt = oracle.eval_rational(weights)?.transpose();
    let two = BigRational::from_integer(2.into());
    Ok(jt.mul_vec(&gdiff)?.into_iter().map(|g| g * &two).collect())
}

/// A target making the given weights exactly critical for the standard
/// squared distance on the ambient basis.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CriticalWitness {
    /// The constructed target, in ambient coordinates.
    #[serde(with = "crate::polyalg::ratio_serde::vec")]
    pub target: Vec<BigRational>,
    /// Dimension of the kernel of `J^T` at the weights.
    pub kernel_dim: usize,
    /// False when the kernel was trivial and the target is `phi(W)` itself.
    pub moved: bool,
    pub seed: u64,
}

/// Constructs `u = phi(W) + v` with `v` a random exact combination of a
/// kernel basis of `J^T` (the standard inner product plays the role of the
/// Gram matrix). The returned target provably has an exactly-zero loss
/// gradient at `weights`; this is re-verified before returning. When the
/// kernel is trivial the target is `phi(W)` itself.
pub fn critical_witness(
    spec: &MlpSpec,
    weights: &[BigRational],
    seed: u64,
) -> Result<CriticalWitness, NgError> {
    let oracle = JacobianOracle::for_mlp(spec)?;
    let jt = oracle.eval_rational(weights)?.transpose();
    let kernel = jt.kernel_basis();
    let phi = embedded_point(spec, weights)?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let coeffs = sample_nonzero_ints(&mut rng, kernel.len(), 9);
    let mut target = phi;
    let mut moved = false;
    for (k, c) in kernel.iter().zip(&coeffs) {
        for (t, v) in target.iter_mut().zip(k) {
            let step = c * v;
            if !step.is_zero() {
                moved = true;
            }
            *t += step;
        }
    }
    let gradient = gradient_of_loss(spec, weights, &QuadricLoss::identity_centered(target.clone()))?;
    if gradient.iter().any(|g| !g.is_zero()) {
        return Err(NgError::Internal(
            "constructed target failed the exact zero-gradient check".into(),
        ));
    }
    Ok(CriticalWitness { target, kernel_dim: kernel.len(), moved, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critpoints::quadric::{dataset_to_quadric, Dataset};
    use crate::fixtures::mlp_d1;
    use crate::netparam::{
        apply_subnetwork, AmbientBasis, RowSource, SubnetMlpSpec, SubnetMode,
    };
    use crate::polyalg::{rational_from_str, Activation};

    fn qv(vals: &[&str]) -> Vec<BigRational> {
        vals.iter().map(|s| rational_from_str(s).unwrap()).collect()
    }

    #[test]
    fn center_at_the_image_point_gives_zero_gradient() {
        let spec = mlp_d1();
        let w = qv(&["1", "2", "-1", "3", "1/2", "2"]);
        let u = embedded_point(&spec, &w).unwrap();
        let g = gradient_of_loss(&spec, &w, &QuadricLoss::identity_centered(u)).unwrap();
        assert_eq!(g.len(), 6);
        assert!(g.iter().all(BigRational::is_zero));
    }

    #[test]
    fn zero_weights_make_every_target_critical() {
        // With sigma(0) = 0 the Jacobian vanishes identically at W = 0.
        let spec = mlp_d1();
        let w = qv(&["0", "0", "0", "0", "0", "0"]);
        let u = qv(&["1", "1", "1", "1", "1", "1", "1"]);
        let g = gradient_of_loss(&spec, &w, &QuadricLoss::identity_centered(u)).unwrap();
        assert!(g.iter().all(BigRational::is_zero));
    }

    #[test]
    fn gradient_matches_direct_polynomial_differentiation() {
        // Independent path: expand L(w) = |phi(w) - u|^2 as a scalar
        // polynomial in the weight variables and differentiate it directly.
        let spec = mlp_d1();
        let basis = AmbientBasis::for_mlp(&spec);
        let f = mlp_forward(&spec, &spec.symbolic_weights()).unwrap();
        let coords = embed(&f, &basis).unwrap().coords;
        let mut rng = ChaCha20Rng::seed_from_u64(41);
        for _ in 0..2 {
            let w = sample_nonzero_ints(&mut rng, spec.num_weights(), 5);
            let u = sample_nonzero_ints(&mut rng, basis.len(), 5);
            let loss = QuadricLoss::identity_centered(u.clone());
            let fast = gradient_of_loss(&spec, &w, &loss).unwrap();
            let mut scalar = crate::polyalg::MultiPoly::zero(spec.num_weights());
            for (coord, ui) in coords.iter().zip(&u) {
                let diff = coord
                    .sub(&crate::polyalg::MultiPoly::constant(spec.num_weights(), ui.clone()))
                    .unwrap();
                scalar = scalar.add(&diff.mul(&diff).unwrap()).unwrap();
            }
            for (k, fast_k) in fast.iter().enumerate() {
                let direct = scalar.partial(k).eval_rational(&w).unwrap();
                assert_eq!(*fast_k, direct, "weight {k}");
            }
        }
    }

    #[test]
    fn gradient_with_a_dataset_quadric_matches_the_sum_of_squares_derivative() {
        // Same cross-check with a nondegenerate data-derived Gram matrix.
        let spec = mlp_d1();
        let basis = AmbientBasis::for_mlp(&spec);
        let mut rng = ChaCha20Rng::seed_from_u64(47);
        // Eight generic pairs make the 7x7 Gram matrix nondegenerate.
        let pairs: Vec<(Vec<BigRational>, Vec<BigRational>)> = (0..8)
            .map(|_| {
                (
                    sample_nonzero_ints(&mut rng, 2, 6),
                    sample_nonzero_ints(&mut rng, 1, 6),
                )
            })
            .collect();
        let data = Dataset::new(pairs).unwrap();
        let loss = dataset_to_quadric(&data, &basis).unwrap();
        assert!(!loss.is_degenerate());
        let w = sample_nonzero_ints(&mut rng, spec.num_weights(), 4);
        let fast = gradient_of_loss(&spec, &w, &loss).unwrap();
        // Direct path: differentiate sum_{(x,y)} (f_w(x) - y)^2 minus its
        // minimum; the minimum is constant in w, so gradients agree.
        let f = mlp_forward(&spec, &spec.symbolic_weights()).unwrap();
        let coords = embed(&f, &basis).unwrap().coords;
        let n = spec.num_weights();
        let mut scalar = crate::polyalg::MultiPoly::zero(n);
        for (x, y) in &data.pairs {
            let mut residual = crate::polyalg::MultiPoly::constant(n, -y[0].clone());
            for ((_, m), coord) in basis.entries.iter().zip(&coords) {
                let mexp = m
                    .0
                    .iter()
                    .zip(x)
                    .map(|(&e, xi)| {
                        let mut v = BigRational::from_integer(1.into());
                        for _ in 0..e {
                            v *= xi;
                        }
                        v
                    })
                    .product::<BigRational>();
                residual = residual.add(&coord.scale(&mexp)).unwrap();
            }
            scalar = scalar.add(&residual.mul(&residual).unwrap()).unwrap();
        }
        for (k, fast_k) in fast.iter().enumerate() {
            let direct = scalar.partial(k).eval_rational(&w).unwrap();
            assert_eq!(*fast_k, direct, "weight {k}");
        }
    }

    #[test]
    fn degenerate_loss_is_rejected() {
        let spec = mlp_d1();
        let basis = AmbientBasis::for_mlp(&spec);
        let data = Dataset::new(vec![(qv(&["1", "1"]), qv(&["1"]))]).unwrap();
        let loss = dataset_to_quadric(&data, &basis).unwrap();
        assert!(loss.is_degenerate());
        let w = qv(&["1", "2", "3", "4", "5", "6"]);
        assert!(gradient_of_loss(&spec, &w, &loss).is_err());
    }

    #[test]
    fn gradient_entries_of_removed_weights_vanish_at_strict_subnetworks() {
        // At a strict subnetwork point the Jacobian columns of the removed
        // weights are identically zero, so the full gradient is the reduced
        // network's gradient padded with zeros — for arbitrary targets.
        let spec = mlp_d1();
        let subnet = SubnetMlpSpec {
            index_sets: vec![vec![2]],
            mode: SubnetMode::Strict,
            sources: Vec::new(),
        };
        let w = qv(&["1", "2", "0", "0", "1", "0"]);
        // Sanity: the constraint map fixes this point.
        let constrained =
            apply_subnetwork(&spec, &spec.constant_weights(&w).unwrap(), &subnet).unwrap();
        assert_eq!(constrained, spec.constant_weights(&w).unwrap());
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..3 {
            let u = sample_nonzero_ints(&mut rng, 7, 8);
            let g =
                gradient_of_loss(&spec, &w, &QuadricLoss::identity_centered(u)).unwrap();
            // Removed weights: c, d (row 2 of the first layer) and f
            // (column 2 of the second layer).
            assert!(g[2].is_zero());
            assert!(g[3].is_zero());
            assert!(g[5].is_zero());
        }
    }

    #[test]
    fn witness_at_a_strict_subnetwork_moves_off_the_image() {
        let spec = mlp_d1();
        let w = qv(&["1", "2", "0", "0", "1", "0"]);
        let witness = critical_witness(&spec, &w, 17).unwrap();
        // Rank drops to 3 at this point, leaving a 4-dimensional kernel.
        assert_eq!(witness.kernel_dim, 4);
        assert!(witness.moved);
        let phi = embedded_point(&spec, &w).unwrap();
        assert_ne!(witness.target, phi);
        let g = gradient_of_loss(
            &spec,
            &w,
            &QuadricLoss::identity_centered(witness.target.clone()),
        )
        .unwrap();
        assert!(g.iter().all(BigRational::is_zero));
    }

    #[test]
    fn full_rank_parametrization_pins_the_witness_to_the_image() {
        // sigma = x^2 on (2,2,1) fills the three-dimensional space of binary
        // quadratic forms, so the transposed Jacobian has trivial kernel.
        let spec = crate::netparam::MlpSpec::new(
            vec![2, 2, 1],
            Activation::from_ints(&[0, 0, 1]).unwrap(),
        )
        .unwrap();
        let w = qv(&["1", "2", "-1", "3", "1", "2"]);
        let witness = critical_witness(&spec, &w, 5).unwrap();
        assert_eq!(witness.kernel_dim, 0);
        assert!(!witness.moved);
        assert_eq!(witness.target, embedded_point(&spec, &w).unwrap());
    }

    #[test]
    fn repeated_rows_point_admits_a_moving_witness() {
        // sigma(0) != 0, so the subnetwork convention copies row 1 of the
        // first layer over row 2; the duplicated Jacobian columns drop the
        // rank and open up a kernel.
        let spec = crate::netparam::MlpSpec::new(
            vec![2, 2, 1],
            Activation::from_ints(&[1, 0, 1, 1]).unwrap(),
        )
        .unwrap();
        let subnet = SubnetMlpSpec {
            index_sets: vec![vec![2]],
            mode: SubnetMode::RepeatedRows,
            sources: vec![RowSource { layer: 1, removed: 2, source: 1 }],
        };
        let w = qv(&["1", "2", "1", "2", "1", "3"]);
        let constrained =
            apply_subnetwork(&spec, &spec.constant_weights(&w).unwrap(), &subnet).unwrap();
        assert_eq!(constrained, spec.constant_weights(&w).unwrap());
        let witness = critical_witness(&spec, &w, 29).unwrap();
        assert!(witness.kernel_dim >= 1);
        assert!(witness.moved);
        let g = gradient_of_loss(
            &spec,
            &w,
            &QuadricLoss::identity_centered(witness.target.clone()),
        )
        .unwrap();
        assert!(g.iter().all(BigRational::is_zero));
    }
}
