//! Singularity detection for MLP subnetwork points: stack Jacobian columns
//! over many points of the fiber and compare the span against the generic
//! rank. A span exceeding the generic rank certifies a singular function.

use num::{BigRational, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;

use crate::error::NgError;
use crate::geometry::jacobian::JacobianOracle;
use crate::geometry::rank::{generic_rank, RankOptions};
use crate::netparam::{
    apply_subnetwork, fiber_row_indices, sample_nonzero_ints, MlpSpec, SubnetMlpSpec, SubnetMode,
};
use crate::polyalg::{random_prime, PrimeField};

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TangentReport {
    pub singular: bool,
    pub span_dim: usize,
    pub generic_rank: usize,
    pub fiber_samples: usize,
    pub seed: u64,
    pub primes: Vec<u64>,
    /// Unmet theorem hypotheses; the test still ran.
    pub hypothesis_warnings: Vec<String>,
}

fn width_condition_holds(spec: &MlpSpec, subnet: &SubnetMlpSpec) -> bool {
    // Removal sizes per layer 0..L, with nothing removable at the ends.
    let mut removed = vec![0usize; spec.widths.len()];
    for (i, set) in subnet.index_sets.iter().enumerate() {
        removed[i + 1] = set.len();
    }
    let surviving: Vec<isize> =
        spec.widths.iter().zip(&removed).map(|(&d, &a)| d as isize - a as isize).collect();
    (0..spec.widths.len() - 1).any(|i| {
        removed[i + 1] > 0 && (0..=i).all(|j| surviving[i] <= surviving[j])
    })
}

/// Spans the Jacobian image over sampled fiber points of a subnetwork
/// function. `fiber_samples` defaults to twice the parameter count.
pub fn tangent_excess_test(
    spec: &MlpSpec,
    subnet: &SubnetMlpSpec,
    fiber_samples: Option<usize>,
    opts: &RankOptions,
) -> Result<TangentReport, NgError> {
    subnet.validate(spec)?;
    if subnet.mode == SubnetMode::RepeatedRows {
        return Err(NgError::Config(
            "tangent excess test supports removed-neuron subnetworks only".into(),
        ));
    }
    let oracle = JacobianOracle::for_mlp(spec)?;
    let dim_w = spec.num_weights();
    let samples = fiber_samples.unwrap_or(2 * dim_w);

    let generic = generic_rank(&oracle, opts)?;
    if !generic.conclusive {
        return Err(NgError::Inconclusive("generic rank trials disagreed".into()));
    }

    let mut warnings = Vec::new();
    let nonzero = spec.activation.support().len();
    if nonzero <= generic.rank {
        warnings.push(format!(
            "activation has {nonzero} nonzero coefficients, not more than the generic rank {}",
            generic.rank
        ));
    }
    if !width_condition_holds(spec, subnet) {
        warnings.push("surviving-width condition does not hold for any removal layer".into());
    }

    // Base point on the subnetwork, then fiber points varying the rows the
    // function does not depend on.
    let mut rng = ChaCha20Rng::seed_from_u64(opts.seed);
    let raw = spec.constant_weights(&sample_nonzero_ints(&mut rng, dim_w, opts.bound))?;
    let constrained = apply_subnetwork(spec, &raw, subnet)?;
    let origin = vec![BigRational::zero(); constrained.num_vars()];
    let base: Vec<BigRational> = (0..dim_w)
        .map(|k| {
            let (layer, row, col) = unflatten(spec, k);
            constrained.layers[layer][row][col].eval_rational(&origin)
        })
        .collect::<Result<_, _>>()?;
    let free_rows = fiber_row_indices(spec, subnet)?;
    let mut points = vec![base.clone()];
    for _ in 0..samples {
        let mut p = base.clone();
        for (slot, v) in
            free_rows.iter().zip(sample_nonzero_ints(&mut rng, free_rows.len(), opts.bound))
        {
            p[*slot] = v;
        }
        points.push(p);
    }

    // Exact span over two distinct primes; they must agree.
    let mut primes = Vec::new();
    let mut span = None;
    for _ in 0..opts.retry_cap {
        let p1 = opts.prime.unwrap_or_else(|| random_prime(&mut rng));
        let mut p2 = random_prime(&mut rng);
        while p2 == p1 {
            p2 = random_prime(&mut rng);
        }
        let mut dims = Vec::new();
        let mut bad_prime = false;
        for p in [p1, p2] {
            let field = PrimeField::new(p)?;
            match stacked_span(&oracle, &points, &field) {
                Ok(d) => dims.push(d),
                Err(NgError::BadPrime(_)) => {
                    bad_prime = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if !bad_prime && dims[0] == dims[1] {
            primes = vec![p1, p2];
            span = Some(dims[0]);
            break;
        }
    }
    let Some(span_dim) = span else {
        return Err(NgError::Inconclusive("fiber span ranks disagreed across primes".into()));
    };

    Ok(TangentReport {
        singular: span_dim > generic.rank,
        span_dim,
        generic_rank: generic.rank,
        fiber_samples: samples,
        seed: opts.seed,
        primes,
        hypothesis_warnings: warnings,
    })
}

fn stacked_span(
    oracle: &JacobianOracle,
    points: &[Vec<BigRational>],
    field: &PrimeField,
) -> Result<usize, NgError> {
    let mut stacked: Option<crate::geometry::matrix::FpMatrix> = None;
    for point in points {
        let residues: Vec<u64> =
            point.iter().map(|v| field.from_rational(v)).collect::<Result<_, _>>()?;
        let jac = oracle.eval_mod(&residues, field)?;
        match &mut stacked {
            None => stacked = Some(jac),
            Some(m) => m.augment(&jac)?,
        }
    }
    stacked.unwrap().rank()
}

fn unflatten(spec: &MlpSpec, flat: usize) -> (usize, usize, usize) {
    let mut k = flat;
    for layer in 0..spec.num_layers() {
        let count = spec.widths[layer + 1] * spec.widths[layer];
        if k < count {
            return (layer, k / spec.widths[layer], k % spec.widths[layer]);
        }
        k -= count;
    }
    unreachable!("flat weight index out of range")
}
