//! Jacobians of the parametrization map with respect to the weights.
//!
//! Two evaluation strategies produce the same matrix: full symbolic partials
//! of the embedded coefficient vector (small architectures), and a numeric
//! chain rule over a prime field that never expands the weights symbolically
//! (needed when the output degree makes the symbolic embedding infeasible).

use num::BigRational;
use std::collections::BTreeMap;

use crate::error::NgError;
use crate::geometry::matrix::{FpMatrix, PolyMatrix, RatMatrix};
use crate::netparam::{embed, mlp_forward, AmbientBasis, CnnSpec, CoeffVector, MlpSpec};
use crate::polyalg::{Monomial, PrimeField};

/// Jacobian of an embedded coefficient vector: entry (b, k) is the partial
/// of coordinate b with respect to weight variable k.
pub fn symbolic_jacobian(embedded: &CoeffVector) -> PolyMatrix {
    let num_weights = embedded.coords.first().map(|p| p.num_vars()).unwrap_or(0);
    let mut m = PolyMatrix::zero(embedded.coords.len(), num_weights, num_weights);
    for (b, coord) in embedded.coords.iter().enumerate() {
        for k in 0..num_weights {
            m.set(b, k, coord.partial(k));
        }
    }
    m
}

/// Sparse polynomial over a prime field, used only by the numeric chain rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpPoly {
    num_vars: usize,
    terms: BTreeMap<Monomial, u64>,
}

impl FpPoly {
    pub fn zero(num_vars: usize) -> Self {
        Self { num_vars, terms: BTreeMap::new() }
    }

    pub fn constant(num_vars: usize, c: u64, field: &PrimeField) -> Self {
        let mut p = Self::zero(num_vars);
        let c = c % field.prime();
        if c != 0 {
            p.terms.insert(Monomial::one(num_vars), c);
        }
        p
    }

    pub fn var(num_vars: usize, index: usize) -> Self {
        let mut p = Self::zero(num_vars);
        p.terms.insert(Monomial::var(num_vars, index), 1);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, u64)> {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    fn add_term(&mut self, m: Monomial, c: u64, field: &PrimeField) {
        if c == 0 {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = field.add(*e.get(), c);
                if v == 0 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c % field.prime());
            }
        }
    }

    pub fn add(&self, other: &Self, field: &PrimeField) -> Self {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), c, field);
        }
        out
    }

    pub fn scale(&self, c: u64, field: &PrimeField) -> Self {
        let c = c % field.prime();
        let mut out = Self::zero(self.num_vars);
        if c == 0 {
            return out;
        }
        for (m, v) in self.terms() {
            out.terms.insert(m.clone(), field.mul(v, c));
        }
        out
    }

    pub fn mul(&self, other: &Self, field: &PrimeField) -> Self {
        let mut out = Self::zero(self.num_vars);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                out.add_term(ma.mul(mb), field.mul(ca, cb), field);
            }
        }
        out
    }

    /// Horner evaluation of sum(coeffs[t] * self^t), coefficients low-to-high.
    pub fn compose_coeffs(&self, coeffs: &[u64], field: &PrimeField) -> Self {
        let mut acc = Self::zero(self.num_vars);
        for &c in coeffs.iter().rev() {
            acc = acc.mul(self, field);
            acc.add_term(Monomial::one(self.num_vars), c % field.prime(), field);
        }
        acc
    }
}

fn activation_residues(
    coeffs: &[BigRational],
    field: &PrimeField,
) -> Result<Vec<u64>, NgError> {
    coeffs.iter().map(|c| field.from_rational(c)).collect()
}

/// Chain-rule Jacobian of an MLP at integer residues `flat`, over `field`.
/// Rows follow `basis`; columns follow the flat weight layout.
pub fn mlp_jacobian_mod(
    spec: &MlpSpec,
    basis: &AmbientBasis,
    flat: &[u64],
    field: &PrimeField,
) -> Result<FpMatrix, NgError> {
    if flat.len() != spec.num_weights() {
        return Err(NgError::Shape(format!(
            "{} weight residues for {} weights",
            flat.len(),
            spec.num_weights()
        )));
    }
    let n = spec.input_dim();
    let num_layers = spec.num_layers();
    let sigma = activation_residues(spec.activation.coeffs(), field)?;
    let sigma_d = activation_residues(&spec.activation.derivative_coeffs(), field)?;

    let weight = |layer: usize, row: usize, col: usize| flat[spec.weight_index(layer, row, col)];

    // Forward pass: s[0] = input variables, z[i] = pre-activations of layer i+1.
    let mut s: Vec<Vec<FpPoly>> = vec![(0..n).map(|i| FpPoly::var(n, i)).collect()];
    let mut z: Vec<Vec<FpPoly>> = Vec::new();
    for layer in 0..num_layers {
        let prev = &s[layer];
        let mut zs = Vec::with_capacity(spec.widths[layer + 1]);
        for row in 0..spec.widths[layer + 1] {
            let mut acc = FpPoly::zero(n);
            for (col, sp) in prev.iter().enumerate() {
                acc = acc.add(&sp.scale(weight(layer, row, col), field), field);
            }
            zs.push(acc);
        }
        let next_s = if layer + 1 < num_layers {
            zs.iter().map(|p| p.compose_coeffs(&sigma, field)).collect()
        } else {
            Vec::new()
        };
        z.push(zs);
        if layer + 1 < num_layers {
            s.push(next_s);
        }
    }

    // Backward pass: back[layer][o][j] = d f_o / d z_{layer+1}[j].
    let out_dim = spec.output_dim();
    let mut back: Vec<Vec<Vec<FpPoly>>> = vec![Vec::new(); num_layers];
    back[num_layers - 1] = (0..out_dim)
        .map(|o| {
            (0..out_dim)
                .map(|j| FpPoly::constant(n, u64::from(o == j), field))
                .collect()
        })
        .collect();
    for layer in (0..num_layers - 1).rev() {
        let d_here = spec.widths[layer + 1];
        let d_next = spec.widths[layer + 2];
        let deriv: Vec<FpPoly> =
            z[layer].iter().map(|p| p.compose_coeffs(&sigma_d, field)).collect();
        let mut rows = Vec::with_capacity(out_dim);
        for o in 0..out_dim {
            let mut row = Vec::with_capacity(d_here);
            for j in 0..d_here {
                let mut acc = FpPoly::zero(n);
                for k in 0..d_next {
                    let w = weight(layer + 1, k, j);
                    acc = acc.add(&back[layer + 1][o][k].scale(w, field), field);
                }
                row.push(acc.mul(&deriv[j], field));
            }
            rows.push(row);
        }
        back[layer] = rows;
    }

    // Assemble: column for W_{layer+1}[j, c] has, in output o's block, the
    // coefficients of back[layer][o][j] * s[layer][c].
    let mut out = FpMatrix::zero(basis.len(), spec.num_weights(), field.clone());
    for layer in 0..num_layers {
        for j in 0..spec.widths[layer + 1] {
            for c in 0..spec.widths[layer] {
                let col = spec.weight_index(layer, j, c);
                for o in 0..out_dim {
                    let p = back[layer][o][j].mul(&s[layer][c], field);
                    for (m, coeff) in p.terms() {
                        let row = basis.position(o, m).ok_or_else(|| {
                            NgError::Internal(format!(
                                "monomial {m} of output {o} missing from ambient basis"
                            ))
                        })?;
                        out.set(row, col, coeff);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Evaluation strategy for Jacobians of a given architecture.
#[derive(Debug, Clone)]
pub enum JacobianOracle {
    /// Symbolic partials of the embedded map, in weight variables.
    Symbolic { basis: AmbientBasis, matrix: PolyMatrix },
    /// Numeric chain rule per evaluation point (MLP only).
    ChainRule { spec: MlpSpec, basis: AmbientBasis },
}

/// Largest activation-degree power for which the symbolic embedding is
/// built eagerly; beyond it the chain rule is used.
const SYMBOLIC_DEGREE_LIMIT: u32 = 16;

impl JacobianOracle {
    pub fn for_mlp(spec: &MlpSpec) -> Result<Self, NgError> {
        let basis = AmbientBasis::for_mlp(spec);
        if basis.max_degree <= SYMBOLIC_DEGREE_LIMIT {
            let f = mlp_forward(spec, &spec.symbolic_weights())?;
            let embedded = embed(&f, &basis)?;
            Ok(Self::Symbolic { basis, matrix: symbolic_jacobian(&embedded) })
        } else {
            Ok(Self::ChainRule { spec: spec.clone(), basis })
        }
    }

    pub fn for_cnn(spec: &CnnSpec) -> Result<Self, NgError> {
        let basis = AmbientBasis::for_cnn(spec);
        let f = crate::netparam::cnn_forward(spec, &spec.symbolic_weights())?;
        let embedded = embed(&f, &basis)?;
        Ok(Self::Symbolic { basis, matrix: symbolic_jacobian(&embedded) })
    }

    pub fn basis(&self) -> &AmbientBasis {
        match self {
            Self::Symbolic { basis, .. } => basis,
            Self::ChainRule { basis, .. } => basis,
        }
    }

    pub fn rows(&self) -> usize {
        self.basis().len()
    }

    pub fn cols(&self) -> usize {
        match self {
            Self::Symbolic { matrix, .. } => matrix.cols,
            Self::ChainRule { spec, .. } => spec.num_weights(),
        }
    }

    pub fn eval_mod(&self, flat: &[u64], field: &PrimeField) -> Result<FpMatrix, NgError> {
        match self {
            Self::Symbolic { matrix, .. } => matrix.eval_mod(flat, field),
            Self::ChainRule { spec, basis } => mlp_jacobian_mod(spec, basis, flat, field),
        }
    }

    pub fn eval_rational(&self, flat: &[BigRational]) -> Result<RatMatrix, NgError> {
        match self {
            Self::Symbolic { matrix, .. } => matrix.eval_rational(flat),
            Self::ChainRule { .. } => Err(NgError::Internal(
                "rational Jacobian evaluation requires the symbolic oracle".into(),
            )),
        }
    }
}
