//! Sparse multivariate polynomials over the rationals.
//!
//! # Key operations
//! Exact ring arithmetic, activation composition by Horner's scheme,
//! evaluation over Q or F_p, formal partials, homogeneous components, and
//! substitution of polynomials for variables (the evaluation homomorphism
//! used by forward passes, Jacobians, and implicit-equation verification).
//!
//! # Design notes
//! Terms live in a `BTreeMap` keyed by [`Monomial`]; the map invariant is
//! "no zero coefficients". Canonical listings iterate in descending global
//! order. Serialized form is `[{"exp":[..],"coef":"num/den"},...]`.

use num::{BigInt, BigRational};
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::fmt;

use crate::error::NgError;
use crate::polyalg::fp::PrimeField;
use crate::polyalg::monomial::Monomial;
use crate::polyalg::scalar::{rational_from_str, rational_to_string, Scalar};

/// A sparse polynomial in a fixed number of variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    num_vars: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl MultiPoly {
    /// The zero polynomial in `n` variables.
    pub fn zero(n: usize) -> Self {
        MultiPoly { num_vars: n, terms: BTreeMap::new() }
    }

    /// A constant polynomial.
    pub fn constant(n: usize, c: BigRational) -> Self {
        let mut p = MultiPoly::zero(n);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(n), c);
        }
        p
    }

    /// An integer constant polynomial.
    pub fn constant_int(n: usize, c: i64) -> Self {
        Self::constant(n, BigRational::from_integer(BigInt::from(c)))
    }

    /// The variable `x_{index+1}`.
    pub fn var(n: usize, index: usize) -> Self {
        assert!(index < n, "variable index out of range");
        let mut p = MultiPoly::zero(n);
        p.terms.insert(Monomial::var(n, index), BigRational::one());
        p
    }

    /// A single term `c * m`.
    pub fn term(n: usize, m: Monomial, c: BigRational) -> Self {
        assert_eq!(m.num_vars(), n);
        let mut p = MultiPoly::zero(n);
        if !c.is_zero() {
            p.terms.insert(m, c);
        }
        p
    }

    /// Builds from `(exponents, coefficient)` pairs, merging duplicates.
    pub fn from_terms(
        n: usize,
        terms: impl IntoIterator<Item = (Vec<u32>, BigRational)>,
    ) -> Result<Self, NgError> {
        let mut p = MultiPoly::zero(n);
        for (exp, coef) in terms {
            if exp.len() != n {
                return Err(NgError::Shape(format!(
                    "term has {} exponents, polynomial has {n} variables",
                    exp.len()
                )));
            }
            p.add_term(Monomial(exp), coef);
        }
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Terms in descending global order (the canonical listing).
    pub fn terms_desc(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter().rev()
    }

    /// Coefficient of a monomial (zero when absent).
    pub fn coeff(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Leading term in the global order, if any.
    pub fn leading_term(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, m: Monomial, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_vars(&self, other: &MultiPoly) -> Result<(), NgError> {
        if self.num_vars != other.num_vars {
            return Err(NgError::Shape(format!(
                "polynomials over {} and {} variables",
                self.num_vars, other.num_vars
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly, NgError> {
        self.check_vars(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly, NgError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.num_vars);
        }
        MultiPoly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly, NgError> {
        self.check_vars(other)?;
        let mut out = MultiPoly::zero(self.num_vars);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    /// Product with terms above `max_degree` discarded. Exact for every
    /// retained degree: a product term of degree <= max_degree only ever
    /// arises from factor terms of degree <= max_degree.
    pub fn mul_truncated(&self, other: &MultiPoly, max_degree: u32) -> Result<MultiPoly, NgError> {
        self.check_vars(other)?;
        let mut out = MultiPoly::zero(self.num_vars);
        for (ma, ca) in &self.terms {
            let da = ma.degree();
            if da > max_degree {
                continue;
            }
            for (mb, cb) in &other.terms {
                if da + mb.degree() > max_degree {
                    continue;
                }
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, exp: u32) -> MultiPoly {
        let mut acc = MultiPoly::constant(self.num_vars, BigRational::one());
        for _ in 0..exp {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Formal partial derivative with respect to `x_{var+1}`.
    pub fn partial(&self, var: usize) -> MultiPoly {
        assert!(var < self.num_vars, "variable index out of range");
        let mut out = MultiPoly::zero(self.num_vars);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[var] = e - 1;
            out.add_term(Monomial(exps), c * BigRational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Sum of the terms of exactly the given total degree.
    pub fn homogeneous_component(&self, degree: u32) -> MultiPoly {
        MultiPoly {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == degree)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Exact rational evaluation.
    pub fn eval_rational(&self, point: &[BigRational]) -> Result<BigRational, NgError> {
        if point.len() != self.num_vars {
            return Err(NgError::Shape(format!(
                "point has {} coordinates, polynomial has {} variables",
                point.len(),
                self.num_vars
            )));
        }
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                for _ in 0..e {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Evaluation over F_p with coefficients reduced mod p.
    /// Fails when p divides any coefficient denominator.
    pub fn eval_mod(&self, field: &PrimeField, point: &[u64]) -> Result<u64, NgError> {
        if point.len() != self.num_vars {
            return Err(NgError::Shape("point length mismatch".into()));
        }
        let mut acc = 0u64;
        for (m, c) in &self.terms {
            let mut t = field.from_rational(c)?;
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = field.mul(t, field.pow(point[i], e as u64));
                }
            }
            acc = field.add(acc, t);
        }
        Ok(acc)
    }

    /// Field-dispatching evaluation: all-rational or all same-prime points.
    pub fn eval(&self, point: &[Scalar]) -> Result<Scalar, NgError> {
        if point.len() != self.num_vars {
            return Err(NgError::Shape("point length mismatch".into()));
        }
        let mut prime = None;
        for s in point {
            if let Scalar::Mod { prime: p, .. } = s {
                match prime {
                    None => prime = Some(*p),
                    Some(q) if q == *p => {}
                    _ => return Err(NgError::Shape("mixed primes in point".into())),
                }
            }
        }
        match prime {
            None => {
                let coords: Vec<BigRational> = point
                    .iter()
                    .map(|s| s.as_rational().cloned())
                    .collect::<Result<_, _>>()?;
                Ok(Scalar::Rat(self.eval_rational(&coords)?))
            }
            Some(p) => {
                let field = PrimeField::new(p)?;
                let coords: Vec<u64> = point
                    .iter()
                    .map(|s| match s {
                        Scalar::Mod { value, .. } => Ok(*value),
                        Scalar::Rat(q) => field.from_rational(q),
                    })
                    .collect::<Result<_, _>>()?;
                Ok(Scalar::Mod { value: self.eval_mod(&field, &coords)?, prime: p })
            }
        }
    }

    /// Substitutes `images[i]` for `x_{i+1}` (the evaluation homomorphism).
    /// All images must share a variable count, which the result inherits.
    pub fn substitute(&self, images: &[MultiPoly]) -> Result<MultiPoly, NgError> {
        if images.len() != self.num_vars {
            return Err(NgError::Shape(format!(
                "{} images for {} variables",
                images.len(),
                self.num_vars
            )));
        }
        let target_vars = match images.first() {
            Some(p) => p.num_vars,
            None => return Ok(MultiPoly::constant(0, self.coeff(&Monomial::one(0)))),
        };
        for im in images {
            if im.num_vars != target_vars {
                return Err(NgError::Shape("images over different rings".into()));
            }
        }
        // Cache powers of each image up to its maximal exponent.
        let mut max_exp = vec![0u32; self.num_vars];
        for m in self.terms.keys() {
            for (i, &e) in m.0.iter().enumerate() {
                max_exp[i] = max_exp[i].max(e);
            }
        }
        let one = MultiPoly::constant(target_vars, BigRational::one());
        let powers: Vec<Vec<MultiPoly>> = images
            .iter()
            .zip(&max_exp)
            .map(|(im, &me)| {
                let mut ps = Vec::with_capacity(me as usize + 1);
                ps.push(one.clone());
                for e in 1..=me {
                    let next = ps[(e - 1) as usize].mul(im).expect("same ring");
                    ps.push(next);
                }
                ps
            })
            .collect();
        let mut acc = MultiPoly::zero(target_vars);
        for (m, c) in &self.terms {
            let mut t = MultiPoly::constant(target_vars, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t.mul(&powers[i][e as usize])?;
                }
            }
            acc = acc.add(&t)?;
        }
        Ok(acc)
    }

    /// Re-embeds into a ring with `new_n` variables, sending `x_i` to
    /// `x_{i+offset}`.
    pub fn shift_vars(&self, new_n: usize, offset: usize) -> MultiPoly {
        assert!(self.num_vars + offset <= new_n);
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut exps = vec![0u32; new_n];
                exps[offset..offset + self.num_vars].copy_from_slice(&m.0);
                (Monomial(exps), c.clone())
            })
            .collect();
        MultiPoly { num_vars: new_n, terms }
    }

    /// Groups terms by the monomial in the first `first` variables; each
    /// group's coefficient is a polynomial in the remaining variables.
    pub fn split_vars(&self, first: usize) -> BTreeMap<Monomial, MultiPoly> {
        assert!(first <= self.num_vars);
        let rest = self.num_vars - first;
        let mut out: BTreeMap<Monomial, MultiPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let head = Monomial(m.0[..first].to_vec());
            let tail = Monomial(m.0[first..].to_vec());
            out.entry(head)
                .or_insert_with(|| MultiPoly::zero(rest))
                .add_term(tail, c.clone());
        }
        out
    }

    /// Exact division by `divisor`; fails if the division leaves a remainder.
    pub fn div_exact(&self, divisor: &MultiPoly) -> Result<MultiPoly, NgError> {
        self.check_vars(divisor)?;
        let (dm, dc) = divisor
            .leading_term()
            .ok_or_else(|| NgError::Shape("division by zero polynomial".into()))?;
        let mut rem = self.clone();
        let mut quot = MultiPoly::zero(self.num_vars);
        while let Some((lm, lc)) = rem.leading_term() {
            let lm = lm.clone();
            let lc = lc.clone();
            let mut exps = Vec::with_capacity(self.num_vars);
            for (a, b) in lm.0.iter().zip(&dm.0) {
                if a < b {
                    return Err(NgError::Internal("inexact polynomial division".into()));
                }
                exps.push(a - b);
            }
            let qm = Monomial(exps);
            let qc = lc / dc;
            let qterm = MultiPoly::term(self.num_vars, qm, qc);
            rem = rem.sub(&qterm.mul(divisor)?)?;
            quot = quot.add(&qterm)?;
        }
        Ok(quot)
    }

    /// Canonical text form: descending terms joined by " + ", coefficients
    /// as `num/den`.
    pub fn canonical_string(&self) -> String {
        if self.is_zero() {
            return "0/1".to_string();
        }
        self.terms_desc()
            .map(|(m, c)| {
                if m.degree() == 0 {
                    rational_to_string(c)
                } else {
                    format!("{}*{}", rational_to_string(c), m)
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.canonical_string())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    coef: String,
}

impl Serialize for MultiPoly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let terms: Vec<TermJson> = self
            .terms_desc()
            .map(|(m, c)| TermJson { exp: m.0.clone(), coef: rational_to_string(c) })
            .collect();
        terms.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MultiPoly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let terms = Vec::<TermJson>::deserialize(deserializer)?;
        let n = terms.first().map(|t| t.exp.len()).unwrap_or(0);
        MultiPoly::from_terms(
            n,
            terms
                .into_iter()
                .map(|t| {
                    let c = rational_from_str(&t.coef).map_err(D::Error::custom)?;
                    Ok((t.exp, c))
                })
                .collect::<Result<Vec<_>, D::Error>>()?,
        )
        .map_err(D::Error::custom)
    }
}

/// A tuple of polynomials over a shared ring: a polynomial map.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyMap {
    pub components: Vec<MultiPoly>,
}

impl PolyMap {
    pub fn new(components: Vec<MultiPoly>) -> Result<Self, NgError> {
        if let Some(first) = components.first() {
            for c in &components {
                if c.num_vars() != first.num_vars() {
                    return Err(NgError::Shape("map components over different rings".into()));
                }
            }
        }
        Ok(PolyMap { components })
    }

    pub fn num_vars(&self) -> usize {
        self.components.first().map(|c| c.num_vars()).unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Component-wise exact rational evaluation.
    pub fn eval_rational(&self, point: &[BigRational]) -> Result<Vec<BigRational>, NgError> {
        self.components.iter().map(|c| c.eval_rational(point)).collect()
    }
}
