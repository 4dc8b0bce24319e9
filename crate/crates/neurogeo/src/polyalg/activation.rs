//! Polynomial activations applied coordinate-wise between layers.

use num::{BigInt, BigRational};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::NgError;
use crate::polyalg::poly::MultiPoly;

/// A univariate polynomial activation, coefficients low-to-high.
/// Invariants: degree r >= 1 and the leading coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Activation {
    #[serde(with = "crate::polyalg::ratio_serde::vec")]
    coeffs: Vec<BigRational>,
}

impl Activation {
    pub fn new(coeffs: Vec<BigRational>) -> Result<Self, NgError> {
        match coeffs.last() {
            None => Err(NgError::Config("empty activation".into())),
            Some(last) if last.is_zero() => {
                Err(NgError::Config("activation leading coefficient is zero".into()))
            }
            _ if coeffs.len() < 2 => {
                Err(NgError::Config("activation must have degree >= 1".into()))
            }
            _ => Ok(Activation { coeffs }),
        }
    }

    pub fn from_ints(coeffs: &[i64]) -> Result<Self, NgError> {
        Self::new(
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    /// The monomial activation `x^beta`.
    pub fn monomial(beta: u32) -> Result<Self, NgError> {
        if beta == 0 {
            return Err(NgError::Config("monomial activation needs degree >= 1".into()));
        }
        let mut coeffs = vec![BigRational::zero(); beta as usize + 1];
        coeffs[beta as usize] = BigRational::from_integer(BigInt::from(1));
        Self::new(coeffs)
    }

    /// Sparse activation `sum_j x^{beta_j}` for strictly increasing exponents.
    pub fn sparse(betas: &[u32]) -> Result<Self, NgError> {
        let r = *betas.last().ok_or_else(|| NgError::Config("empty exponent list".into()))?;
        let mut coeffs = vec![BigRational::zero(); r as usize + 1];
        for &b in betas {
            coeffs[b as usize] = BigRational::from_integer(BigInt::from(1));
        }
        Self::new(coeffs)
    }

    /// Coefficients low-to-high.
    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Degree r.
    pub fn degree(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    /// Exponents with nonzero coefficients, ascending.
    pub fn support(&self) -> Vec<u32> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i as u32)
            .collect()
    }

    pub fn vanishes_at_zero(&self) -> bool {
        self.coeffs[0].is_zero()
    }

    /// sigma(p) by Horner's scheme in p.
    pub fn compose(&self, p: &MultiPoly) -> MultiPoly {
        let n = p.num_vars();
        let mut acc = MultiPoly::constant(n, self.coeffs.last().expect("nonempty").clone());
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc
                .mul(p)
                .and_then(|t| t.add(&MultiPoly::constant(n, c.clone())))
                .expect("same ring");
        }
        acc
    }

    /// sigma(p) with every intermediate product truncated above `max_degree`.
    pub fn compose_truncated(&self, p: &MultiPoly, max_degree: u32) -> MultiPoly {
        let n = p.num_vars();
        let mut acc = MultiPoly::constant(n, self.coeffs.last().expect("nonempty").clone());
        for c in self.coeffs.iter().rev().skip(1) {
            acc = acc
                .mul_truncated(p, max_degree)
                .and_then(|t| t.add(&MultiPoly::constant(n, c.clone())))
                .expect("same ring");
        }
        acc
    }

    /// sigma'(x) as an activation-shaped coefficient list (may be constant).
    pub fn derivative_coeffs(&self) -> Vec<BigRational> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect()
    }

    /// Exact scalar evaluation.
    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}
