//! Rank reports: exact pointwise ranks and probabilistic generic ranks.

use num::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::error::NgError;
use crate::geometry::jacobian::JacobianOracle;
use crate::geometry::matrix::{PolyMatrix, RatMatrix};
use crate::netparam::{cnn_forward, sample_nonzero_ints, CnnSpec};
use crate::polyalg::{rational_to_string, random_prime, PrimeField};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum RankField {
    Rational,
    PrimeField { p: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Certainty {
    ExactSymbolic,
    Probabilistic,
}

/// Outcome of a rank computation, with enough context to reproduce it.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RankReport {
    pub rank: usize,
    pub field: RankField,
    pub trials: usize,
    pub point_seeds: Vec<u64>,
    pub primes: Vec<u64>,
    pub certified: Certainty,
    /// False when some trial never saw two primes agree.
    pub conclusive: bool,
}

/// Options shared by the probabilistic rank routines.
#[derive(Debug, Clone)]
pub struct RankOptions {
    pub trials: usize,
    pub seed: u64,
    /// Optional fixed prime; a second random prime is still drawn.
    pub prime: Option<u64>,
    /// Weight samples are uniform in [-bound, bound] without zero.
    pub bound: i64,
    /// Attempts per trial before declaring the trial inconclusive.
    pub retry_cap: usize,
}

impl RankOptions {
    pub fn new(seed: u64) -> Self {
        Self { trials: 3, seed, prime: None, bound: 10, retry_cap: 5 }
    }
}

/// Exact rank of a symbolic matrix at one rational point, over Q or F_p.
pub fn rank_at(
    matrix: &PolyMatrix,
    point: &[BigRational],
    prime: Option<u64>,
) -> Result<RankReport, NgError> {
    let (rank, field) = match prime {
        None => (matrix.eval_rational(point)?.rank(), RankField::Rational),
        Some(p) => {
            let f = PrimeField::new(p)?;
            let residues: Vec<u64> =
                point.iter().map(|v| f.from_rational(v)).collect::<Result<_, _>>()?;
            (matrix.eval_mod(&residues, &f)?.rank()?, RankField::PrimeField { p })
        }
    };
    Ok(RankReport {
        rank,
        field,
        trials: 1,
        point_seeds: Vec::new(),
        primes: prime.into_iter().collect(),
        certified: Certainty::ExactSymbolic,
        conclusive: true,
    })
}

/// One agreed-upon rank at a fresh random point, or None after the retry cap.
/// Each attempt evaluates the Jacobian at the same point over two distinct
/// primes and only accepts matching ranks.
fn rank_trial<F>(
    eval_rank: &F,
    num_points: usize,
    opts: &RankOptions,
    rng: &mut ChaCha20Rng,
    primes_used: &mut Vec<u64>,
) -> Result<Option<usize>, NgError>
where
    F: Fn(&[BigRational], &PrimeField) -> Result<usize, NgError>,
{
    for _ in 0..opts.retry_cap {
        let point = sample_nonzero_ints(rng, num_points, opts.bound);
        let p1 = opts.prime.unwrap_or_else(|| random_prime(rng));
        let mut p2 = random_prime(rng);
        while p2 == p1 {
            p2 = random_prime(rng);
        }
        let mut ranks = Vec::new();
        let mut failed = false;
        for p in [p1, p2] {
            let f = PrimeField::new(p)?;
            match eval_rank(&point, &f) {
                Ok(r) => ranks.push(r),
                // A prime clashing with a denominator is re-sampled, any
                // other failure propagates.
                Err(NgError::BadPrime(_)) => {
                    failed = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if failed {
            continue;
        }
        if ranks[0] == ranks[1] {
            primes_used.push(p1);
            primes_used.push(p2);
            return Ok(Some(ranks[0]));
        }
    }
    Ok(None)
}

/// Probabilistic generic rank: the maximum agreed rank over `trials` random
/// integer points, each checked over two distinct primes.
pub fn generic_rank(oracle: &JacobianOracle, opts: &RankOptions) -> Result<RankReport, NgError> {
    if opts.trials == 0 {
        return Err(NgError::Config("generic rank needs at least one trial".into()));
    }
    let eval_rank = |point: &[BigRational], f: &PrimeField| -> Result<usize, NgError> {
        let residues: Vec<u64> =
            point.iter().map(|v| f.from_rational(v)).collect::<Result<_, _>>()?;
        oracle.eval_mod(&residues, f)?.rank()
    };
    let mut best = 0usize;
    let mut point_seeds = Vec::new();
    let mut primes = Vec::new();
    let mut conclusive = true;
    for trial in 0..opts.trials {
        let trial_seed = opts.seed.wrapping_add(trial as u64);
        let mut rng = ChaCha20Rng::seed_from_u64(trial_seed);
        point_seeds.push(trial_seed);
        match rank_trial(&eval_rank, oracle.cols(), opts, &mut rng, &mut primes)? {
            Some(r) => best = best.max(r),
            None => conclusive = false,
        }
    }
    Ok(RankReport {
        rank: best,
        field: RankField::PrimeField { p: *primes.last().unwrap_or(&0) },
        trials: opts.trials,
        point_seeds,
        primes,
        certified: Certainty::Probabilistic,
        conclusive,
    })
}

/// Same procedure restricted to a column subset, with each trial point drawn
/// from a parameter family: `params` free values are sampled and expanded to
/// a full weight vector by `family_point_of`. The ranked columns need not
/// coincide with the family's free parameters.
pub fn generic_rank_restricted(
    oracle: &JacobianOracle,
    columns: &[usize],
    params: usize,
    family_point_of: &dyn Fn(&[BigRational]) -> Result<Vec<BigRational>, NgError>,
    opts: &RankOptions,
) -> Result<RankReport, NgError> {
    if opts.trials == 0 {
        return Err(NgError::Config("generic rank needs at least one trial".into()));
    }
    let eval_rank = |free: &[BigRational], f: &PrimeField| -> Result<usize, NgError> {
        let point = family_point_of(free)?;
        let residues: Vec<u64> =
            point.iter().map(|v| f.from_rational(v)).collect::<Result<_, _>>()?;
        let full = oracle.eval_mod(&residues, f)?;
        if columns.is_empty() {
            return Ok(0);
        }
        let mut sub = crate::geometry::matrix::FpMatrix::zero(full.rows, columns.len(), f.clone());
        for r in 0..full.rows {
            for (ci, &c) in columns.iter().enumerate() {
                sub.set(r, ci, full.get(r, c));
            }
        }
        sub.rank()
    };
    let mut best = 0usize;
    let mut point_seeds = Vec::new();
    let mut primes = Vec::new();
    let mut conclusive = true;
    for trial in 0..opts.trials {
        let trial_seed = opts.seed.wrapping_add(trial as u64);
        let mut rng = ChaCha20Rng::seed_from_u64(trial_seed);
        point_seeds.push(trial_seed);
        match rank_trial(&eval_rank, params.max(1), opts, &mut rng, &mut primes)? {
            Some(r) => best = best.max(r),
            None => conclusive = false,
        }
    }
    Ok(RankReport {
        rank: best,
        field: RankField::PrimeField { p: *primes.last().unwrap_or(&0) },
        trials: opts.trials,
        point_seeds,
        primes,
        certified: Certainty::Probabilistic,
        conclusive,
    })
}

/// Kernel of the CNN Jacobian at rational weights, with the layerwise
/// scaling-space comparison for monomial activations.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct KernelReport {
    pub kernel_dim: usize,
    pub expected_dim: usize,
    pub matches_scaling_space: bool,
    pub kernel: Vec<Vec<String>>,
}

pub fn cnn_kernel_check(spec: &CnnSpec, weights: &[BigRational]) -> Result<KernelReport, NgError> {
    let w = spec.constant_weights(weights)?;
    let f = cnn_forward(spec, &w)?;
    if f.components.iter().all(|p| p.is_zero()) {
        return Err(NgError::Config(
            "kernel check requires a nonzero network function".into(),
        ));
    }
    let oracle = JacobianOracle::for_cnn(spec)?;
    let jac = oracle.eval_rational(weights)?;
    let kernel = jac.kernel_basis();
    let el = spec.num_layers();
    let support = spec.activation.support();
    let monomial = support.len() == 1;
    let expected_dim = if monomial { el - 1 } else { 0 };
    let matches = if monomial {
        let beta = *support.first().unwrap();
        kernel.len() == expected_dim
            && scaling_directions(spec, weights, beta)
                .iter()
                .all(|d| in_span(&kernel, d))
    } else {
        kernel.is_empty()
    };
    Ok(KernelReport {
        kernel_dim: kernel.len(),
        expected_dim,
        matches_scaling_space: matches,
        kernel: kernel
            .iter()
            .map(|v| v.iter().map(rational_to_string).collect())
            .collect(),
    })
}

/// The layerwise scaling directions (0,..,w_k,-beta*w_{k+1},..,0) that span
/// the kernel for a monomial activation.
fn scaling_directions(spec: &CnnSpec, weights: &[BigRational], beta: u32) -> Vec<Vec<BigRational>> {
    let mut out = Vec::new();
    let b = BigRational::from_integer(i64::from(beta).into());
    for k in 0..spec.num_layers() - 1 {
        let mut v = vec![BigRational::zero(); weights.len()];
        for j in 0..spec.filters[k] {
            let idx = spec.weight_index(k, j);
            v[idx] = weights[idx].clone();
        }
        for j in 0..spec.filters[k + 1] {
            let idx = spec.weight_index(k + 1, j);
            v[idx] = -(&b * &weights[idx]);
        }
        out.push(v);
    }
    out
}

fn in_span(basis: &[Vec<BigRational>], v: &[BigRational]) -> bool {
    if basis.is_empty() {
        return v.iter().all(|x| x.is_zero());
    }
    let mut rows: Vec<Vec<BigRational>> = basis.to_vec();
    let with = RatMatrix::from_rows({
        let mut r = rows.clone();
        r.push(v.to_vec());
        r
    })
    .unwrap();
    let without = RatMatrix::from_rows(std::mem::take(&mut rows)).unwrap();
    with.rank() == without.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{cnn_d2, mlp_d1};
    use crate::netparam::{embed, mlp_forward, AmbientBasis};
    use crate::polyalg::{rational_from_str, Activation};

    fn qv(vals: &[&str]) -> Vec<BigRational> {
        vals.iter().map(|s| rational_from_str(s).unwrap()).collect()
    }

    #[test]
    fn cubic_network_has_full_generic_rank() {
        let oracle = JacobianOracle::for_mlp(&mlp_d1()).unwrap();
        let report = generic_rank(&oracle, &RankOptions::new(11)).unwrap();
        assert_eq!(report.rank, 6);
        assert!(report.conclusive);
        assert_eq!(report.certified, Certainty::Probabilistic);
        assert_eq!(report.point_seeds.len(), 3);
        assert!(report.primes.len() >= 6);
    }

    #[test]
    fn monomial_activation_collapses_rank() {
        let spec = crate::netparam::MlpSpec::new(
            vec![2, 2, 1],
            Activation::from_ints(&[0, 0, 1]).unwrap(),
        )
        .unwrap();
        let oracle = JacobianOracle::for_mlp(&spec).unwrap();
        let report = generic_rank(&oracle, &RankOptions::new(5)).unwrap();
        // Image is the full space of binary quadratic forms.
        assert_eq!(report.rank, 3);
    }

    #[test]
    fn rank_at_rational_matches_mod_p() {
        let spec = mlp_d1();
        let f = mlp_forward(&spec, &spec.symbolic_weights()).unwrap();
        let basis = AmbientBasis::for_mlp(&spec);
        let j = crate::geometry::jacobian::symbolic_jacobian(&embed(&f, &basis).unwrap());
        let point = qv(&["1", "2", "3", "1", "1", "2"]);
        let exact = rank_at(&j, &point, None).unwrap();
        let modular = rank_at(&j, &point, Some(1_000_003)).unwrap();
        assert_eq!(exact.rank, modular.rank);
        assert_eq!(exact.field, RankField::Rational);
        assert_eq!(exact.certified, Certainty::ExactSymbolic);
    }

    #[test]
    fn cnn_generic_rank_is_filter_count() {
        let oracle = JacobianOracle::for_cnn(&cnn_d2()).unwrap();
        let report = generic_rank(&oracle, &RankOptions::new(3)).unwrap();
        assert_eq!(report.rank, 5);
        assert!(report.conclusive);
    }

    #[test]
    fn monomial_cnn_kernel_is_scaling_space() {
        let spec = crate::netparam::CnnSpec::new(
            vec![3, 2],
            vec![2, 1],
            vec![5, 2, 1],
            Activation::from_ints(&[0, 0, 1]).unwrap(),
        )
        .unwrap();
        let w = qv(&["2", "-1", "3", "1", "4"]);
        let report = cnn_kernel_check(&spec, &w).unwrap();
        assert_eq!(report.kernel_dim, 1);
        assert_eq!(report.expected_dim, 1);
        assert!(report.matches_scaling_space);
    }

    #[test]
    fn multi_term_cnn_kernel_is_trivial() {
        let spec = crate::netparam::CnnSpec::new(
            vec![3, 2],
            vec![2, 1],
            vec![5, 2, 1],
            Activation::from_ints(&[0, 0, 1, 1]).unwrap(),
        )
        .unwrap();
        let w = qv(&["2", "-1", "3", "1", "4"]);
        let report = cnn_kernel_check(&spec, &w).unwrap();
        assert_eq!(report.kernel_dim, 0);
        assert!(report.matches_scaling_space);
    }

    #[test]
    fn zero_function_rejected_by_kernel_check() {
        let spec = cnn_d2();
        let w = qv(&["0", "0", "0", "1", "2"]);
        assert!(cnn_kernel_check(&spec, &w).is_err());
    }
}
