//! The ambient coefficient space V and coordinates of network functions.
//!
//! The basis enumerates, per output coordinate, the input monomials a
//! network of the given architecture can actually produce: the achievable
//! total degrees follow from the activation's support, layer by layer.
//! Listing is output-major, and within one output in descending global
//! monomial order. The constant monomial appears exactly when the constant
//! term is achievable, which for bias-free networks means sigma(0) != 0.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;

use crate::error::NgError;
use crate::netparam::cnn::CnnSpec;
use crate::netparam::mlp::MlpSpec;
use crate::polyalg::{monomials_with_degrees, Activation, Monomial, MultiPoly, PolyMap};

/// Ordered monomial basis of the ambient space V.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AmbientBasis {
    pub input_dim: usize,
    pub output_dim: usize,
    /// Degree bound r^{L-1} for the architecture.
    pub max_degree: u32,
    /// Output-major list of basis elements.
    pub entries: Vec<(usize, Monomial)>,
    pub include_constant: bool,
}

/// Total degrees achievable after `layers` activation applications,
/// starting from degree-1 linear forms in the inputs.
pub fn achievable_degrees(activation: &Activation, activation_layers: usize) -> BTreeSet<u32> {
    let support = activation.support();
    let mut degrees: BTreeSet<u32> = BTreeSet::from([1]);
    for _ in 0..activation_layers {
        let mut next = BTreeSet::new();
        for &t in &support {
            // Sums of exactly t achievable degrees.
            let mut sums: BTreeSet<u32> = BTreeSet::from([0]);
            for _ in 0..t {
                let mut grown = BTreeSet::new();
                for s in &sums {
                    for d in &degrees {
                        grown.insert(s + d);
                    }
                }
                sums = grown;
            }
            next.extend(sums);
        }
        degrees = next;
    }
    degrees
}

impl AmbientBasis {
    fn from_degrees(
        input_dim: usize,
        output_dim: usize,
        max_degree: u32,
        degrees: &BTreeSet<u32>,
    ) -> Self {
        let degree_list: Vec<u32> = degrees.iter().copied().collect();
        let monos = monomials_with_degrees(input_dim, &degree_list);
        let entries = (0..output_dim)
            .flat_map(|o| monos.iter().map(move |m| (o, m.clone())))
            .collect();
        AmbientBasis {
            input_dim,
            output_dim,
            max_degree,
            entries,
            include_constant: degrees.contains(&0),
        }
    }

    pub fn for_mlp(spec: &MlpSpec) -> Self {
        let layers = spec.num_layers() - 1;
        let degrees = achievable_degrees(&spec.activation, layers);
        let max_degree = spec.activation.degree().pow(layers as u32);
        Self::from_degrees(spec.input_dim(), spec.output_dim(), max_degree, &degrees)
    }

    pub fn for_cnn(spec: &CnnSpec) -> Self {
        let layers = spec.num_layers() - 1;
        let degrees = achievable_degrees(&spec.activation, layers);
        let max_degree = spec.activation.degree().pow(layers as u32);
        Self::from_degrees(spec.input_dim(), spec.output_dim(), max_degree, &degrees)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Position of `(output, monomial)` in the listing.
    pub fn position(&self, output: usize, m: &Monomial) -> Option<usize> {
        self.entries.iter().position(|(o, bm)| *o == output && bm == m)
    }
}

/// Coordinates of a function (or family of functions) in an ambient basis.
/// Coordinates are polynomials in the weight variables; for a numeric
/// network they are constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffVector {
    pub basis: AmbientBasis,
    pub coords: Vec<MultiPoly>,
}

impl CoeffVector {
    /// Exact rational coordinates; fails when any coordinate is symbolic.
    pub fn to_rationals(&self) -> Result<Vec<num::BigRational>, NgError> {
        self.coords
            .iter()
            .map(|c| {
                if c.total_degree() > 0 {
                    return Err(NgError::Shape("coefficient vector is not numeric".into()));
                }
                c.eval_rational(&vec![num::BigRational::from_integer(0.into()); c.num_vars()])
            })
            .collect()
    }

    /// Contraction `sum_alpha coords_alpha * m_alpha(x)` per output, for a
    /// numeric coefficient vector.
    pub fn eval_at_input(
        &self,
        input: &[num::BigRational],
    ) -> Result<Vec<num::BigRational>, NgError> {
        if input.len() != self.basis.input_dim {
            return Err(NgError::Shape("input dimension mismatch".into()));
        }
        let values = self.to_rationals()?;
        let mut out = vec![num::BigRational::from_integer(0.into()); self.basis.output_dim];
        for ((o, m), cval) in self.basis.entries.iter().zip(values) {
            let mut term = cval;
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    term *= &input[i];
                }
            }
            out[*o] += term;
        }
        Ok(out)
    }
}

/// Expresses a polynomial map in the given basis. The map's variables are
/// the `input_dim` input variables followed by weight variables; each
/// coordinate of the result is a polynomial in the weight variables alone.
pub fn embed(f: &PolyMap, basis: &AmbientBasis) -> Result<CoeffVector, NgError> {
    if f.len() != basis.output_dim {
        return Err(NgError::Shape(format!(
            "map has {} outputs, basis expects {}",
            f.len(),
            basis.output_dim
        )));
    }
    let num_weight_vars = f
        .num_vars()
        .checked_sub(basis.input_dim)
        .ok_or_else(|| NgError::Shape("map has fewer variables than the basis input".into()))?;
    let mut grouped = Vec::with_capacity(f.len());
    for (o, comp) in f.components.iter().enumerate() {
        let groups = comp.split_vars(basis.input_dim);
        for m in groups.keys() {
            if basis.position(o, m).is_none() {
                return Err(NgError::Shape(format!(
                    "monomial {m} of output {o} lies outside the basis"
                )));
            }
        }
        grouped.push(groups);
    }
    let coords = basis
        .entries
        .iter()
        .map(|(o, m)| {
            grouped[*o]
                .get(m)
                .cloned()
                .unwrap_or_else(|| MultiPoly::zero(num_weight_vars))
        })
        .collect();
    Ok(CoeffVector { basis: basis.clone(), coords })
}
