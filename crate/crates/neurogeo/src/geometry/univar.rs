//! Dense univariate polynomials over the rationals: Euclidean gcd, rational
//! root enumeration with certified completeness, and Sylvester resultants
//! for eliminating one variable from a bivariate system.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

use crate::error::NgError;
use crate::geometry::matrix::PolyMatrix;
use crate::polyalg::MultiPoly;

/// Coefficients low-to-high with no trailing zeros; the zero polynomial is
/// the empty vector.
pub(crate) type Univar = Vec<BigRational>;

pub(crate) fn trim(mut v: Univar) -> Univar {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
    v
}

pub(crate) fn eval(v: &Univar, x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in v.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

/// Remainder of `a` modulo `b` (`b` nonzero).
fn rem(a: &Univar, b: &Univar) -> Univar {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lead = &b[db];
    while r.len() > db {
        let dr = r.len() - 1;
        let factor = &r[dr] / lead;
        if !factor.is_zero() {
            for i in 0..=db {
                let t = &b[i] * &factor;
                r[dr - db + i] -= t;
            }
        }
        r.pop();
        r = trim(r);
        if r.is_empty() {
            break;
        }
    }
    r
}

/// Monic gcd; gcd with the zero polynomial is the other argument made monic.
pub(crate) fn gcd(a: &Univar, b: &Univar) -> Univar {
    let mut x = trim(a.clone());
    let mut y = trim(b.clone());
    while !y.is_empty() {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(lead) = x.last().cloned() {
        for c in &mut x {
            *c /= &lead;
        }
    }
    x
}

/// Divides out the root `r` once; the caller guarantees `eval(v, r) == 0`.
fn deflate(v: &Univar, r: &BigRational) -> Univar {
    let mut out = vec![BigRational::zero(); v.len() - 1];
    let mut carry = BigRational::zero();
    for i in (0..v.len() - 1).rev() {
        carry = &v[i + 1] + r * &carry;
        out[i] = carry.clone();
    }
    out
}

/// All positive divisors, with a flag marking whether the list is provably
/// complete. Trial division stops at 10^6; a cofactor below 10^12 is then
/// prime, anything larger leaves the list incomplete.
fn divisors(n: &BigInt) -> (Vec<BigInt>, bool) {
    let mut remaining = n.abs();
    let mut prime_powers: Vec<(BigInt, u32)> = Vec::new();
    let mut complete = true;
    if remaining.is_zero() {
        return (vec![BigInt::one()], true);
    }
    let mut p = BigInt::from(2);
    let cutoff = BigInt::from(1_000_000u64);
    while &p * &p <= remaining && p <= cutoff {
        if remaining.is_multiple_of(&p) {
            let mut e = 0u32;
            while remaining.is_multiple_of(&p) {
                remaining /= &p;
                e += 1;
            }
            prime_powers.push((p.clone(), e));
        }
        p += 1u32;
    }
    if remaining > BigInt::one() {
        if remaining < BigInt::from(1_000_000_000_000u64) {
            prime_powers.push((remaining.clone(), 1));
        } else {
            complete = false;
        }
    }
    let mut divs = vec![BigInt::one()];
    for (p, e) in &prime_powers {
        let mut next = Vec::with_capacity(divs.len() * (*e as usize + 1));
        for d in &divs {
            let mut pw = BigInt::one();
            for _ in 0..=*e {
                next.push(d * &pw);
                pw *= p;
            }
        }
        divs = next;
        if divs.len() > 20_000 {
            return (divs, false);
        }
    }
    divs.sort();
    (divs, complete)
}

/// Rational roots of `v`, deduplicated and sorted. The flag is true when the
/// polynomial splits completely over the rationals, so the returned roots
/// account for every complex root.
pub(crate) fn rational_roots(v: &Univar) -> Result<(Vec<BigRational>, bool), NgError> {
    let mut w = trim(v.clone());
    if w.is_empty() {
        return Err(NgError::Config(
            "root finding on the zero polynomial".into(),
        ));
    }
    let mut roots = Vec::new();
    if w.len() > 1 && w[0].is_zero() {
        roots.push(BigRational::zero());
        while w.len() > 1 && w[0].is_zero() {
            w.remove(0);
        }
    }
    if w.len() > 1 {
        // Primitive integer form shares the same roots.
        let lcm = w
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> =
            w.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let (nums, _) = divisors(&ints[0]);
        let (dens, _) = divisors(ints.last().unwrap());
        'cand: for num in &nums {
            for den in &dens {
                if num.gcd(den) != BigInt::one() {
                    continue;
                }
                for sign in [1i32, -1] {
                    let cand = BigRational::new(num * BigInt::from(sign), den.clone());
                    while eval(&w, &cand).is_zero() {
                        roots.push(cand.clone());
                        w = deflate(&w, &cand);
                        if w.len() <= 1 {
                            break 'cand;
                        }
                    }
                }
            }
        }
    }
    let fully_split = w.len() <= 1;
    roots.sort();
    roots.dedup();
    Ok((roots, fully_split))
}

/// Coefficients of `f` as a polynomial in `var`, low-to-high. Each entry
/// keeps the full variable count with the `var` exponent cleared.
pub(crate) fn coeffs_in_var(f: &MultiPoly, var: usize) -> Vec<MultiPoly> {
    let n = f.num_vars();
    let deg = f.terms_desc().map(|(m, _)| m.0[var]).max().unwrap_or(0) as usize;
    let mut buckets: Vec<Vec<(Vec<u32>, BigRational)>> = vec![Vec::new(); deg + 1];
    for (m, c) in f.terms_desc() {
        let e = m.0[var] as usize;
        let mut stripped = m.0.clone();
        stripped[var] = 0;
        buckets[e].push((stripped, c.clone()));
    }
    buckets
        .into_iter()
        .map(|terms| MultiPoly::from_terms(n, terms).expect("stripped terms stay well formed"))
        .collect()
}

/// Sylvester resultant of `f` and `g` with respect to `var`. The result no
/// longer involves `var`; it vanishes at exactly the projections of common
/// roots together with common leading-coefficient zeros.
pub(crate) fn sylvester_resultant(
    f: &MultiPoly,
    g: &MultiPoly,
    var: usize,
) -> Result<MultiPoly, NgError> {
    let n_vars = f.num_vars();
    if g.num_vars() != n_vars {
        return Err(NgError::Shape("resultant arguments over different rings".into()));
    }
    if f.is_zero() || g.is_zero() {
        return Ok(MultiPoly::zero(n_vars));
    }
    let fc = coeffs_in_var(f, var);
    let gc = coeffs_in_var(g, var);
    let m = fc.len() - 1;
    let n = gc.len() - 1;
    if m == 0 && n == 0 {
        return Ok(MultiPoly::constant_int(n_vars, 1));
    }
    let size = m + n;
    let mut mat = PolyMatrix::zero(size, size, n_vars);
    for i in 0..n {
        for j in 0..=m {
            mat.set(i, i + j, fc[m - j].clone());
        }
    }
    for i in 0..m {
        for j in 0..=n {
            mat.set(n + i, i + j, gc[n - j].clone());
        }
    }
    mat.det()
}

/// Extracts a polynomial using only `var` into dense coefficients.
pub(crate) fn univar_in(f: &MultiPoly, var: usize) -> Result<Univar, NgError> {
    let deg = f.total_degree() as usize;
    let mut out = vec![BigRational::zero(); deg + 1];
    for (m, c) in f.terms_desc() {
        if m.0.iter().enumerate().any(|(i, &e)| i != var && e > 0) {
            return Err(NgError::Internal(
                "expected a univariate polynomial after elimination".into(),
            ));
        }
        out[m.0[var] as usize] = c.clone();
    }
    Ok(trim(out))
}

/// Substitutes `x = value` for variable `var` of a bivariate polynomial,
/// producing a dense univariate polynomial in the other variable.
pub(crate) fn specialize(f: &MultiPoly, var: usize, value: &BigRational) -> Univar {
    let other = 1 - var;
    let deg = f.terms_desc().map(|(m, _)| m.0[other]).max().unwrap_or(0) as usize;
    let mut out = vec![BigRational::zero(); deg + 1];
    for (m, c) in f.terms_desc() {
        let mut pw = BigRational::one();
        for _ in 0..m.0[var] {
            pw *= value;
        }
        out[m.0[other] as usize] += c * pw;
    }
    trim(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn gcd_of_shared_factor() {
        // (x - 2)(x + 1) and (x - 2)(x - 5) share x - 2.
        let a = vec![q(-2), q(-1), q(1)];
        let b = vec![q(10), q(-7), q(1)];
        assert_eq!(gcd(&a, &b), vec![q(-2), q(1)]);
    }

    #[test]
    fn roots_with_multiplicity_and_split_flag() {
        // x^2 (2x - 1) splits completely.
        let f = vec![q(0), q(0), q(-1), q(2)];
        let (roots, split) = rational_roots(&f).unwrap();
        assert_eq!(roots, vec![q(0), BigRational::new(1.into(), 2.into())]);
        assert!(split);
        // x (x^2 - 2) has an irrational factor left over.
        let g = vec![q(0), q(-2), q(0), q(1)];
        let (roots, split) = rational_roots(&g).unwrap();
        assert_eq!(roots, vec![q(0)]);
        assert!(!split);
    }

    #[test]
    fn resultant_detects_common_root() {
        // f = x^2 - y, g = x - y: common roots have x-coordinate 0 or 1.
        let x = MultiPoly::var(2, 0);
        let y = MultiPoly::var(2, 1);
        let f = x.pow(2).sub(&y).unwrap();
        let g = x.sub(&y).unwrap();
        let res = sylvester_resultant(&f, &g, 1).unwrap();
        let coeffs = univar_in(&res, 0).unwrap();
        let (roots, split) = rational_roots(&coeffs).unwrap();
        assert_eq!(roots, vec![q(0), q(1)]);
        assert!(split);
    }

    #[test]
    fn resultant_of_coprime_polynomials_is_nonzero_constant() {
        let x = MultiPoly::var(2, 0);
        let y = MultiPoly::var(2, 1);
        let f = y.pow(2).add(&MultiPoly::constant_int(2, 1)).unwrap();
        let g = y.sub(&x).unwrap();
        let res = sylvester_resultant(&f, &g, 1).unwrap();
        // x^2 + 1 in x only.
        let coeffs = univar_in(&res, 0).unwrap();
        assert_eq!(coeffs, vec![q(1), q(0), q(1)]);
    }

    #[test]
    fn specialization_matches_direct_evaluation() {
        let f = fixtures::node_implicit();
        let at = specialize(&f, 0, &q(2));
        // f(2, y) = 12 - y^2.
        assert_eq!(at, vec![q(12), q(0), q(-1)]);
    }
}
