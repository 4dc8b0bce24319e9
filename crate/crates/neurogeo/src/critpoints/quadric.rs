//! The mean-squared-error objective as an exact quadric on the ambient
//! coefficient space.
//!
//! For a dataset of input/output pairs, summing the squared errors of the
//! function with coefficient vector `c` gives an exact quadratic
//! `L(c) = c^T G c - 2 b^T c + const`. The Gram matrix `G` is block diagonal
//! per output coordinate; when it is nondegenerate the unique minimizer
//! `u = G^{-1} b` serves as the quadric's center, so that criticality of
//! `L` along a parametrized family reduces to orthogonality against `u`.

use num::BigRational;
use num_traits::{One, Zero};

use crate::error::NgError;
use crate::geometry::RatMatrix;
use crate::netparam::AmbientBasis;
use crate::polyalg::Monomial;

/// Finite list of exact input/output pairs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub pairs: Vec<(Vec<BigRational>, Vec<BigRational>)>,
}

impl Dataset {
    /// Builds a dataset, requiring every pair to share the first pair's
    /// input and output dimensions.
    pub fn new(pairs: Vec<(Vec<BigRational>, Vec<BigRational>)>) -> Result<Self, NgError> {
        if let Some((x0, y0)) = pairs.first() {
            for (i, (x, y)) in pairs.iter().enumerate() {
                if x.len() != x0.len() || y.len() != y0.len() {
                    return Err(NgError::Shape(format!(
                        "pair {i} has shape ({}, {}), expected ({}, {})",
                        x.len(),
                        y.len(),
                        x0.len(),
                        y0.len()
                    )));
                }
            }
        }
        Ok(Self { pairs })
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Direct sum of squared errors of the coefficient vector `c` over the
    /// dataset, bypassing the quadric form entirely.
    pub fn sum_of_squares(
        &self,
        basis: &AmbientBasis,
        c: &[BigRational],
    ) -> Result<BigRational, NgError> {
        if c.len() != basis.len() {
            return Err(NgError::Shape(format!(
                "{} coefficients for a basis of size {}",
                c.len(),
                basis.len()
            )));
        }
        let mut total = BigRational::zero();
        for (x, y) in &self.pairs {
            check_pair(basis, x, y)?;
            let mut value = vec![BigRational::zero(); basis.output_dim];
            for ((o, m), coeff) in basis.entries.iter().zip(c) {
                value[*o] += coeff * &eval_monomial(m, x);
            }
            for (vo, yo) in value.iter().zip(y) {
                let diff = vo - yo;
                total += &diff * &diff;
            }
        }
        Ok(total)
    }
}

fn check_pair(basis: &AmbientBasis, x: &[BigRational], y: &[BigRational]) -> Result<(), NgError> {
    if x.len() != basis.input_dim || y.len() != basis.output_dim {
        return Err(NgError::Shape(format!(
            "data pair of shape ({}, {}) against a basis over ({}, {})",
            x.len(),
            y.len(),
            basis.input_dim,
            basis.output_dim
        )));
    }
    Ok(())
}

fn eval_monomial(m: &Monomial, x: &[BigRational]) -> BigRational {
    let mut out = BigRational::one();
    for (xi, &e) in x.iter().zip(&m.0) {
        for _ in 0..e {
            out *= xi;
        }
    }
    out
}

/// A quadratic objective `L(c) = c^T G c - 2 b^T c + const` on coefficient
/// vectors, with the center `u = G^{-1} b` recorded when `G` is
/// nondegenerate. `G` is symmetric by construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadricLoss {
    pub gram: RatMatrix,
    pub linear: Vec<BigRational>,
    pub constant: BigRational,
    /// Absent exactly when the Gram matrix is degenerate.
    pub center: Option<Vec<BigRational>>,
}

impl QuadricLoss {
    /// Squared distance to a fixed target: `G` is the identity, so
    /// `L(c) = |c - u|^2`.
    pub fn identity_centered(center: Vec<BigRational>) -> Self {
        let n = center.len();
        let constant = center.iter().map(|v| v * v).sum();
        Self {
            gram: RatMatrix::identity(n),
            linear: center.clone(),
            constant,
            center: Some(center),
        }
    }

    /// Side length of the Gram matrix (the coefficient-space dimension).
    pub fn dim(&self) -> usize {
        self.gram.rows
    }

    pub fn is_degenerate(&self) -> bool {
        self.center.is_none()
    }

    /// Exact value `c^T G c - 2 b^T c + const`.
    pub fn evaluate(&self, c: &[BigRational]) -> Result<BigRational, NgError> {
        if c.len() != self.dim() {
            return Err(NgError::Shape(format!(
                "{} coefficients for a quadric of dimension {}",
                c.len(),
                self.dim()
            )));
        }
        let gc = self.gram.mul_vec(c)?;
        let quad: BigRational = c.iter().zip(&gc).map(|(ci, gi)| ci * gi).sum();
        let lin: BigRational = self.linear.iter().zip(c).map(|(bi, ci)| bi * ci).sum();
        Ok(quad - BigRational::from_integer(2.into()) * lin + self.constant.clone())
    }
}

/// Assembles the sum-of-squares loss of a dataset as a quadric over the
/// given basis. The Gram matrix couples two basis elements only when they
/// belong to the same output coordinate; degeneracy is reported by leaving
/// the center absent, never as an error.
pub fn dataset_to_quadric(
    dataset: &Dataset,
    basis: &AmbientBasis,
) -> Result<QuadricLoss, NgError> {
    if basis.is_empty() {
        return Err(NgError::Config("the quadric needs a nonempty basis".into()));
    }
    let n = basis.len();
    let mut gram = RatMatrix::zero(n, n);
    let mut linear = vec![BigRational::zero(); n];
    let mut constant = BigRational::zero();
    for (x, y) in &dataset.pairs {
        check_pair(basis, x, y)?;
        let values: Vec<BigRational> =
            basis.entries.iter().map(|(_, m)| eval_monomial(m, x)).collect();
        for (i, (oi, _)) in basis.entries.iter().enumerate() {
            for (j, (oj, _)) in basis.entries.iter().enumerate() {
                if oi == oj {
                    let add = &values[i] * &values[j];
                    let v = gram.get(i, j) + add;
                    gram.set(i, j, v);
                }
            }
            linear[i] += &y[*oi] * &values[i];
        }
        for yo in y {
            constant += yo * yo;
        }
    }
    let center = if gram.rank() == n {
        Some(gram.solve(&linear)?.ok_or_else(|| {
            NgError::Internal("full-rank Gram matrix failed to solve for its center".into())
        })?)
    } else {
        None
    };
    Ok(QuadricLoss { gram, linear, constant, center })
}
