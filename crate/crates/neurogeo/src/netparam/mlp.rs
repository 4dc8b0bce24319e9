//! Fully connected polynomial networks and their parametrization maps.
//!
//! A network with widths `(d_0, ..., d_L)` computes `W_L . sigma . ... .
//! sigma . W_1` with no biases. Symbolic weights are realized by enlarging
//! the polynomial ring: input variables first, weight variables after, the
//! weights flattened row-major within each layer and layer-major overall.

use num::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::NgError;
use crate::polyalg::{Activation, MultiPoly, PolyMap};

/// Architecture of a fully connected network.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpSpec {
    /// Widths `d_0, ..., d_L`; `L >= 2` layers counting the output map.
    pub widths: Vec<usize>,
    pub activation: Activation,
}

impl MlpSpec {
    pub fn new(widths: Vec<usize>, activation: Activation) -> Result<Self, NgError> {
        if widths.len() < 3 {
            return Err(NgError::Config(
                "an MLP needs at least one hidden layer (three widths)".into(),
            ));
        }
        if widths.iter().any(|&d| d == 0) {
            return Err(NgError::Config("zero width".into()));
        }
        Ok(MlpSpec { widths, activation })
    }

    /// Number of layer maps L.
    pub fn num_layers(&self) -> usize {
        self.widths.len() - 1
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.widths.last().unwrap()
    }

    /// Total weight count: sum of d_i * d_{i-1}.
    pub fn num_weights(&self) -> usize {
        self.widths.windows(2).map(|w| w[0] * w[1]).sum()
    }

    /// Flat index of weight `W_{layer+1}[row, col]` in the canonical layout.
    pub fn weight_index(&self, layer: usize, row: usize, col: usize) -> usize {
        let mut base = 0;
        for l in 0..layer {
            base += self.widths[l] * self.widths[l + 1];
        }
        base + row * self.widths[layer] + col
    }

    /// Symbolic weights: variable `input_dim + weight_index` per entry.
    pub fn symbolic_weights(&self) -> MlpWeights {
        let n = self.input_dim() + self.num_weights();
        let mut layers = Vec::with_capacity(self.num_layers());
        for l in 0..self.num_layers() {
            let rows = self.widths[l + 1];
            let cols = self.widths[l];
            let mut mat = Vec::with_capacity(rows);
            for r in 0..rows {
                let mut row = Vec::with_capacity(cols);
                for c in 0..cols {
                    let idx = self.input_dim() + self.weight_index(l, r, c);
                    row.push(MultiPoly::var(n, idx));
                }
                mat.push(row);
            }
            layers.push(mat);
        }
        MlpWeights { layers }
    }

    /// Numeric weights lifted into the symbolic ring as constants.
    pub fn constant_weights(&self, flat: &[BigRational]) -> Result<MlpWeights, NgError> {
        if flat.len() != self.num_weights() {
            return Err(NgError::Shape(format!(
                "{} weight values for {} weights",
                flat.len(),
                self.num_weights()
            )));
        }
        let n = self.input_dim() + self.num_weights();
        let mut layers = Vec::new();
        for l in 0..self.num_layers() {
            let rows = self.widths[l + 1];
            let cols = self.widths[l];
            let mut mat = Vec::with_capacity(rows);
            for r in 0..rows {
                let mut row = Vec::with_capacity(cols);
                for c in 0..cols {
                    let v = flat[self.weight_index(l, r, c)].clone();
                    row.push(MultiPoly::constant(n, v));
                }
                mat.push(row);
            }
            layers.push(mat);
        }
        Ok(MlpWeights { layers })
    }

    /// Uniform nonzero integer weights in `[-bound, bound]`.
    pub fn sample_weights<R: Rng>(&self, rng: &mut R, bound: i64) -> Vec<BigRational> {
        sample_nonzero_ints(rng, self.num_weights(), bound)
    }
}

/// Draws `count` independent uniform integers from `[-bound, bound] \ {0}`.
pub fn sample_nonzero_ints<R: Rng>(rng: &mut R, count: usize, bound: i64) -> Vec<BigRational> {
    (0..count)
        .map(|_| loop {
            let v = rng.gen_range(-bound..=bound);
            if v != 0 {
                break BigRational::from_integer(v.into());
            }
        })
        .collect()
}

/// Weight matrices with polynomial entries (symbolic variables, constants,
/// or anything in between), all over one shared ring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MlpWeights {
    /// `layers[l][r][c]` is the entry `W_{l+1}[r, c]`.
    pub layers: Vec<Vec<Vec<MultiPoly>>>,
}

impl MlpWeights {
    pub fn num_vars(&self) -> usize {
        self.layers[0][0][0].num_vars()
    }

    fn check_shape(&self, spec: &MlpSpec) -> Result<(), NgError> {
        if self.layers.len() != spec.num_layers() {
            return Err(NgError::Shape("layer count mismatch".into()));
        }
        for (l, mat) in self.layers.iter().enumerate() {
            if mat.len() != spec.widths[l + 1] || mat.iter().any(|row| row.len() != spec.widths[l]) {
                return Err(NgError::Shape(format!("layer {} shape mismatch", l + 1)));
            }
        }
        Ok(())
    }
}

/// The exact polynomial map computed by the network. Components are
/// polynomials in `d_0` input variables followed by any weight variables.
pub fn mlp_forward(spec: &MlpSpec, weights: &MlpWeights) -> Result<PolyMap, NgError> {
    weights.check_shape(spec)?;
    let n = weights.num_vars();
    let d0 = spec.input_dim();
    if n < d0 {
        return Err(NgError::Shape("ring smaller than the input dimension".into()));
    }
    let mut activations: Vec<MultiPoly> = (0..d0).map(|i| MultiPoly::var(n, i)).collect();
    let last = spec.num_layers() - 1;
    for (l, mat) in weights.layers.iter().enumerate() {
        let mut next = Vec::with_capacity(mat.len());
        for row in mat {
            let mut acc = MultiPoly::zero(n);
            for (w, a) in row.iter().zip(&activations) {
                acc = acc.add(&w.mul(a)?)?;
            }
            next.push(acc);
        }
        if l < last {
            next = next.into_iter().map(|p| spec.activation.compose(&p)).collect();
        }
        activations = next;
    }
    PolyMap::new(activations)
}

/// Forward pass on numeric inputs and numeric weights, layer by layer.
pub fn mlp_eval(
    spec: &MlpSpec,
    flat_weights: &[BigRational],
    input: &[BigRational],
) -> Result<Vec<BigRational>, NgError> {
    if input.len() != spec.input_dim() {
        return Err(NgError::Shape("input dimension mismatch".into()));
    }
    if flat_weights.len() != spec.num_weights() {
        return Err(NgError::Shape("weight count mismatch".into()));
    }
    let mut act = input.to_vec();
    let last = spec.num_layers() - 1;
    for l in 0..spec.num_layers() {
        let rows = spec.widths[l + 1];
        let cols = spec.widths[l];
        let mut next = Vec::with_capacity(rows);
        for r in 0..rows {
            let mut acc = BigRational::from_integer(0.into());
            for (c, a) in act.iter().enumerate().take(cols) {
                acc += &flat_weights[spec.weight_index(l, r, c)] * a;
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
