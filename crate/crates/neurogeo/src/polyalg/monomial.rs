//! Monomials as exponent vectors with a fixed global ordering.
//!
//! The global order is lexicographic with `x1 > x2 > ...`: monomials compare
//! by their exponent vectors left to right. Canonical listings (polynomial
//! terms, ambient bases, coefficient vectors) are in descending order, so
//! for two variables `x1^3 > x1^2*x2 > x1^2 > x1*x2^2 > x1*x2 > x2^3 > x2^2`.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Exponent vector of a monomial; index `i` is the exponent of `x_{i+1}`.
///
/// The derived `Ord` on the inner vector is exactly the global lexicographic
/// order for monomials over the same variable set.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    /// The constant monomial in `n` variables.
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    /// The single variable `x_{index+1}` in `n` variables.
    pub fn var(n: usize, index: usize) -> Self {
        let mut e = vec![0; n];
        e[index] = 1;
        Monomial(e)
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }

    /// Total degree.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Exponent-wise product of two monomials over the same variables.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    /// Graded-lex comparison: first by total degree, then lexicographic.
    pub fn cmp_grlex(&self, other: &Monomial) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if wrote {
                write!(f, "*")?;
            }
            if e == 1 {
                write!(f, "x{}", i + 1)?;
            } else {
                write!(f, "x{}^{}", i + 1, e)?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "1")?;
        }
        Ok(())
    }
}

/// All monomials in `n` variables of total degree exactly `d`,
/// in descending global order.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current = vec![0u32; n];
    fill(&mut out, &mut current, 0, d);
    out
}

fn fill(out: &mut Vec<Monomial>, current: &mut Vec<u32>, pos: usize, remaining: u32) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(Monomial(current.clone()));
        current[pos] = 0;
        return;
    }
    // Descending lex: larger exponents on earlier variables first.
    for e in (0..=remaining).rev() {
        current[pos] = e;
        fill(out, current, pos + 1, remaining - e);
        current[pos] = 0;
    }
}

/// All monomials in `n` variables whose total degree lies in `degrees`,
/// in descending global order.
pub fn monomials_with_degrees(n: usize, degrees: &[u32]) -> Vec<Monomial> {
    let mut out: Vec<Monomial> = degrees
        .iter()
        .flat_map(|&d| monomials_of_degree(n, d))
        .collect();
    out.sort_by(|a, b| b.cmp(a));
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_matches_canonical_two_variable_listing() {
        let listed = ["x1^3", "x1^2*x2", "x1^2", "x1*x2^2", "x1*x2", "x2^3", "x2^2"];
        let basis = monomials_with_degrees(2, &[2, 3]);
        let shown: Vec<String> = basis.iter().map(|m| m.to_string()).collect();
        assert_eq!(shown, listed);
    }

    #[test]
    fn degree_enumeration_counts() {
        assert_eq!(monomials_of_degree(2, 3).len(), 4);
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
        assert_eq!(monomials_of_degree(1, 5).len(), 1);
        assert_eq!(monomials_of_degree(2, 0), vec![Monomial::one(2)]);
    }

    #[test]
    fn grlex_ranks_degree_first() {
        let x1x2 = Monomial(vec![1, 1]);
        let x1sq = Monomial(vec![2, 0]);
        let x2cb = Monomial(vec![0, 3]);
        assert_eq!(x1sq.cmp_grlex(&x1x2), std::cmp::Ordering::Greater);
        assert_eq!(x2cb.cmp_grlex(&x1sq), std::cmp::Ordering::Greater);
        assert_eq!(x1sq.cmp(&x2cb), std::cmp::Ordering::Greater);
    }

    #[test]
    fn display_forms() {
        assert_eq!(Monomial(vec![2, 1]).to_string(), "x1^2*x2");
        assert_eq!(Monomial::one(3).to_string(), "1");
        assert_eq!(Monomial::var(2, 1).to_string(), "x2");
    }
}
