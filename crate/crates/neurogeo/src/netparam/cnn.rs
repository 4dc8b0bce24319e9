//! 1-D strided convolutional networks with polynomial activations.
//!
//! Layer i convolves with a filter of length `k_i` at stride `s_i`; the
//! dimension chain is `d_{i-1} = s_i (d_i - 1) + k_i`. Filters are
//! single-channel, without biases. Symbolic filter entries follow the input
//! variables, concatenated layer-major.

use num::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::NgError;
use crate::netparam::mlp::sample_nonzero_ints;
use crate::polyalg::{Activation, MultiPoly, PolyMap};

/// Architecture of a 1-D strided convolutional network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnnSpec {
    /// Filter lengths `k_1, ..., k_L`.
    pub filters: Vec<usize>,
    /// Strides `s_1, ..., s_L`.
    pub strides: Vec<usize>,
    /// Dimensions `d_0, ..., d_L`.
    pub dims: Vec<usize>,
    pub activation: Activation,
}

impl CnnSpec {
    pub fn new(
        filters: Vec<usize>,
        strides: Vec<usize>,
        dims: Vec<usize>,
        activation: Activation,
    ) -> Result<Self, NgError> {
        if filters.is_empty() || filters.len() != strides.len() || dims.len() != filters.len() + 1 {
            return Err(NgError::Config("inconsistent CNN shape lists".into()));
        }
        if filters.iter().any(|&k| k == 0)
            || strides.iter().any(|&s| s == 0)
            || dims.iter().any(|&d| d == 0)
        {
            return Err(NgError::Config("zero filter length, stride, or dimension".into()));
        }
        let spec = CnnSpec { filters, strides, dims, activation };
        for i in 1..=spec.num_layers() {
            let expect = spec.strides[i - 1] * (spec.dims[i] - 1) + spec.filters[i - 1];
            if spec.dims[i - 1] != expect {
                return Err(NgError::Config(format!(
                    "dimension chain broken at layer {i}: d_{} = {} but s_{i}(d_{i} - 1) + k_{i} = {expect}",
                    i - 1,
                    spec.dims[i - 1]
                )));
            }
        }
        Ok(spec)
    }

    pub fn num_layers(&self) -> usize {
        self.filters.len()
    }

    pub fn input_dim(&self) -> usize {
        self.dims[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.dims.last().unwrap()
    }

    /// Total filter entry count: sum of k_i.
    pub fn num_weights(&self) -> usize {
        self.filters.iter().sum()
    }

    /// Flat index of filter entry `w_{layer+1}[j]`.
    pub fn weight_index(&self, layer: usize, j: usize) -> usize {
        self.filters[..layer].iter().sum::<usize>() + j
    }

    /// Symbolic filters: variable `input_dim + weight_index` per entry.
    pub fn symbolic_weights(&self) -> CnnWeights {
        let n = self.input_dim() + self.num_weights();
        let filters = (0..self.num_layers())
            .map(|l| {
                (0..self.filters[l])
                    .map(|j| MultiPoly::var(n, self.input_dim() + self.weight_index(l, j)))
                    .collect()
            })
            .collect();
        CnnWeights { filters }
    }

    /// Numeric filters lifted into the symbolic ring as constants.
    pub fn constant_weights(&self, flat: &[BigRational]) -> Result<CnnWeights, NgError> {
        if flat.len() != self.num_weights() {
            return Err(NgError::Shape(format!(
                "{} filter values for {} entries",
                flat.len(),
                self.num_weights()
            )));
        }
        let n = self.input_dim() + self.num_weights();
        let filters = (0..self.num_layers())
            .map(|l| {
                (0..self.filters[l])
                    .map(|j| MultiPoly::constant(n, flat[self.weight_index(l, j)].clone()))
                    .collect()
            })
            .collect();
        Ok(CnnWeights { filters })
    }

    /// Uniform nonzero integer filter entries in `[-bound, bound]`.
    pub fn sample_weights<R: Rng>(&self, rng: &mut R, bound: i64) -> Vec<BigRational> {
        sample_nonzero_ints(rng, self.num_weights(), bound)
    }
}

/// Filter banks with polynomial entries over one shared ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CnnWeights {
    /// `filters[l][j]` is the entry `w_{l+1}[j]`.
    pub filters: Vec<Vec<MultiPoly>>,
}

impl CnnWeights {
    pub fn num_vars(&self) -> usize {
        self.filters[0][0].num_vars()
    }

    fn check_shape(&self, spec: &CnnSpec) -> Result<(), NgError> {
        if self.filters.len() != spec.num_layers()
            || self
                .filters
                .iter()
                .zip(&spec.filters)
                .any(|(f, &k)| f.len() != k)
        {
            return Err(NgError::Shape("filter shapes mismatch".into()));
        }
        Ok(())
    }
}

/// Strided convolution `(w * x)[i] = sum_j w[j] x[s*i + j]` (0-indexed).
/// The input length must equal `s(d' - 1) + k` for some output length d'.
pub fn cnn_conv(w: &[MultiPoly], x: &[MultiPoly], stride: usize) -> Result<Vec<MultiPoly>, NgError> {
    let k = w.len();
    if k == 0 || stride == 0 {
        return Err(NgError::Shape("empty filter or zero stride".into()));
    }
    if x.len() < k || (x.len() - k) % stride != 0 {
        return Err(NgError::Shape(format!(
            "input length {} incompatible with filter {k} at stride {stride}",
            x.len()
        )));
    }
    let d_out = (x.len() - k) / stride + 1;
    let mut out = Vec::with_capacity(d_out);
    for i in 0..d_out {
        let mut acc = MultiPoly::zero(x[0].num_vars());
        for (j, wj) in w.iter().enumerate() {
            acc = acc.add(&wj.mul(&x[stride * i + j])?)?;
        }
        out.push(acc);
    }
    Ok(out)
}

/// The exact polynomial map computed by the network.
pub fn cnn_forward(spec: &CnnSpec, weights: &CnnWeights) -> Result<PolyMap, NgError> {
    weights.check_shape(spec)?;
    let n = weights.num_vars();
    let d0 = spec.input_dim();
    let mut act: Vec<MultiPoly> = (0..d0).map(|i| MultiPoly::var(n, i)).collect();
    let last = spec.num_layers() - 1;
    for l in 0..spec.num_layers() {
        act = cnn_conv(&weights.filters[l], &act, spec.strides[l])?;
        if act.len() != spec.dims[l + 1] {
            return Err(NgError::Internal("dimension chain mismatch in forward pass".into()));
        }
        if l < last {
            act = act.into_iter().map(|p| spec.activation.compose(&p)).collect();
        }
    }
    PolyMap::new(act)
}

/// Numeric layer-by-layer forward pass.
pub fn cnn_eval(
    spec: &CnnSpec,
    flat_weights: &[BigRational],
    input: &[BigRational],
) -> Result<Vec<BigRational>, NgError> {
    if input.len() != spec.input_dim() {
        return Err(NgError::Shape("input dimension mismatch".into()));
    }
    let mut act = input.to_vec();
    let last = spec.num_layers() - 1;
    for l in 0..spec.num_layers() {
        let k = spec.filters[l];
        let s = spec.strides[l];
        let d_out = (act.len() - k) / s + 1;
        let mut next = Vec::with_capacity(d_out);
        for i in 0..d_out {
            let mut acc = BigRational::from_integer(0.into());
            for j in 0..k {
                acc += &flat_weights[spec.weight_index(l, j)] * &act[s * i + j];
            }
            next.push(acc);
        }
        if l < last {
            next = next.iter().map(|v| spec.activation.eval_rational(v)).collect();
        }
        act = next;
    }
    Ok(act)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ints(vals: &[i64], n: usize) -> Vec<MultiPoly> {
        vals.iter().map(|&v| MultiPoly::constant_int(n, v)).collect()
    }

    fn spec_d2() -> CnnSpec {
        crate::fixtures::cnn_d2()
    }

    #[test]
    fn dimension_chain_enforced() {
        assert!(CnnSpec::new(
            vec![3, 2],
            vec![2, 1],
            vec![6, 2, 1],
            Activation::from_ints(&[0, 1, 1]).unwrap()
        )
        .is_err());
        assert!(spec_d2().num_weights() == 5);
    }

    #[test]
    fn identity_filter_and_direct_sum() {
        let x = ints(&[1, 2, 3, 4], 0);
        let id = ints(&[1], 0);
        assert_eq!(cnn_conv(&id, &x, 1).unwrap(), x);
        let w = ints(&[1, 1], 0);
        let out = cnn_conv(&w, &x, 2).unwrap();
        assert_eq!(out, ints(&[3, 7], 0));
        let zero = ints(&[0, 0], 0);
        assert!(cnn_conv(&zero, &x, 2).unwrap().iter().all(MultiPoly::is_zero));
    }

    #[test]
    fn symbolic_forward_matches_displayed_structure() {
        // Filters (a,b,c) and (d,e): output = d*sigma(a x1 + b x2 + c x3)
        // + e*sigma(a x3 + b x4 + c x5) for sigma = x^2 + x.
        let spec = spec_d2();
        let f = cnn_forward(&spec, &spec.symbolic_weights()).unwrap();
        assert_eq!(f.components.len(), 1);
        let n = 10;
        let (x, w): (Vec<MultiPoly>, Vec<MultiPoly>) = (
            (0..5).map(|i| MultiPoly::var(n, i)).collect(),
            (5..10).map(|i| MultiPoly::var(n, i)).collect(),
        );
        let sigma = &spec.activation;
        let h1 = w[0]
            .mul(&x[0])
            .unwrap()
            .add(&w[1].mul(&x[1]).unwrap())
            .unwrap()
            .add(&w[2].mul(&x[2]).unwrap())
            .unwrap();
        let h2 = w[0]
            .mul(&x[2])
            .unwrap()
            .add(&w[1].mul(&x[3]).unwrap())
            .unwrap()
            .add(&w[2].mul(&x[4]).unwrap())
            .unwrap();
        let expected = w[3]
            .mul(&sigma.compose(&h1))
            .unwrap()
            .add(&w[4].mul(&sigma.compose(&h2)).unwrap())
            .unwrap();
        assert_eq!(f.components[0], expected);
    }

    #[test]
    fn numeric_eval_matches_symbolic_map() {
        let spec = spec_d2();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = spec.sample_weights(&mut rng, 7);
        let f = cnn_forward(&spec, &spec.constant_weights(&w).unwrap()).unwrap();
        let x: Vec<BigRational> = (1..=5)
            .map(|v| BigRational::new(v.into(), 3.into()))
            .collect();
        let mut point = x.clone();
        point.extend(std::iter::repeat(BigRational::from_integer(0.into())).take(5));
        let via_map = f.components[0].eval_rational(&point).unwrap();
        let direct = cnn_eval(&spec, &w, &x).unwrap()[0].clone();
        assert_eq!(via_map, direct);
    }
}
