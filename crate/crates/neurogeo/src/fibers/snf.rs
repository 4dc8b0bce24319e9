//! Smith normal form of integer matrices with unimodular transforms, kept
//! exact over arbitrary-precision integers.

use num::{BigInt, One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::NgError;

fn serialize_big_matrix<S: Serializer>(
    m: &Vec<Vec<BigInt>>,
    s: S,
) -> Result<S::Ok, S::Error> {
    let strings: Vec<Vec<String>> =
        m.iter().map(|row| row.iter().map(ToString::to_string).collect()).collect();
    strings.serialize(s)
}

fn serialize_big_vec<S: Serializer>(v: &Vec<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    let strings: Vec<String> = v.iter().map(ToString::to_string).collect();
    strings.serialize(s)
}

/// Decomposition `U * A * V = D` with `U`, `V` unimodular and `D` diagonal,
/// the diagonal entries nonnegative and forming a divisibility chain.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SnfResult {
    #[serde(serialize_with = "serialize_big_matrix")]
    pub input: Vec<Vec<BigInt>>,
    #[serde(serialize_with = "serialize_big_matrix")]
    pub u: Vec<Vec<BigInt>>,
    #[serde(serialize_with = "serialize_big_matrix")]
    pub d: Vec<Vec<BigInt>>,
    #[serde(serialize_with = "serialize_big_matrix")]
    pub v: Vec<Vec<BigInt>>,
    /// Nonzero diagonal entries of `D`, each dividing the next.
    #[serde(serialize_with = "serialize_big_vec")]
    pub invariant_factors: Vec<BigInt>,
}

fn identity(n: usize) -> Vec<Vec<BigInt>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

/// Pivot choice: the entry of smallest nonzero absolute value in the
/// trailing submatrix, ties broken row-major.
fn pick_pivot(a: &[Vec<BigInt>], start: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(start) {
        for (j, val) in row.iter().enumerate().skip(start) {
            if val.is_zero() {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, bj)) => val.abs() < a[bi][bj].abs(),
            };
            if better {
                best = Some((i, j));
            }
        }
    }
    best
}

pub fn smith_normal_form(a: &[Vec<BigInt>]) -> Result<SnfResult, NgError> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 || a.iter().any(|r| r.len() != cols) {
        return Err(NgError::Shape("Smith normal form needs a rectangular nonempty matrix".into()));
    }
    let input = a.to_vec();
    let mut m = a.to_vec();
    let mut u = identity(rows);
    let mut v = identity(cols);

    let steps = rows.min(cols);
    for t in 0..steps {
        'place: loop {
            let Some((pi, pj)) = pick_pivot(&m, t) else {
                break 'place;
            };
            if pi != t {
                m.swap(t, pi);
                u.swap(t, pi);
            }
            if pj != t {
                for row in &mut m {
                    row.swap(t, pj);
                }
                for row in &mut v {
                    row.swap(t, pj);
                }
            }
            // Reduce column t, then row t, by the pivot.
            let mut dirty = false;
            for i in t + 1..rows {
                if m[i][t].is_zero() {
                    continue;
                }
                let q = div_round(&m[i][t], &m[t][t]);
                if !q.is_zero() {
                    for j in 0..cols {
                        let delta = &q * &m[t][j];
                        m[i][j] -= delta;
                    }
                    for j in 0..rows {
                        let delta = &q * &u[t][j];
                        u[i][j] -= delta;
                    }
                }
                if !m[i][t].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if m[t][j].is_zero() {
                    continue;
                }
                let q = div_round(&m[t][j], &m[t][t]);
                if !q.is_zero() {
                    for i in 0..rows {
                        let delta = &q * &m[i][t];
                        m[i][j] -= delta;
                    }
                    for i in 0..cols {
                        let delta = &q * &v[i][t];
                        v[i][j] -= delta;
                    }
                }
                if !m[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'place;
            }
            // Enforce divisibility: fold in any entry the pivot misses.
            let offender = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !(&m[i][j] % &m[t][t]).is_zero());
            match offender {
                Some((i, _)) => {
                    for j in 0..cols {
                        let add = m[i][j].clone();
                        m[t][j] += add;
                    }
                    for j in 0..rows {
                        let add = u[i][j].clone();
                        u[t][j] += add;
                    }
                }
                None => break 'place,
            }
        }
        if m[t][t].is_negative() {
            for j in 0..cols {
                m[t][j] = -m[t][j].clone();
            }
            for j in 0..rows {
                u[t][j] = -u[t][j].clone();
            }
        }
    }

    let invariant_factors: Vec<BigInt> =
        (0..steps).map(|t| m[t][t].clone()).filter(|x| !x.is_zero()).collect();
    let result = SnfResult { input, u, d: m, v, invariant_factors };
    verify(&result)?;
    Ok(result)
}

/// Quotient rounded to nearest, which keeps remainders in `[-|b|/2, |b|/2]`
/// and the pivot shrinking fast.
fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let (q, r) = num::Integer::div_rem(a, b);
    if r.abs() * two > b.abs() {
        if (r.sign() == b.sign()) || r.is_zero() {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let rows = a.len();
    let inner = b.len();
    let cols = b[0].len();
    let mut out = vec![vec![BigInt::zero(); cols]; rows];
    for i in 0..rows {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..cols {
                let delta = &a[i][k] * &b[k][j];
                out[i][j] += delta;
            }
        }
    }
    out
}

/// Bareiss determinant of a square integer matrix.
pub fn int_det(a: &[Vec<BigInt>]) -> Result<BigInt, NgError> {
    let n = a.len();
    if n == 0 || a.iter().any(|r| r.len() != n) {
        return Err(NgError::Shape("determinant needs a square matrix".into()));
    }
    let mut m = a.to_vec();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            let Some(pr) = (k + 1..n).find(|&r| !m[r][k].is_zero()) else {
                return Ok(BigInt::zero());
            };
            m.swap(k, pr);
            sign = -sign;
        }
        for r in k + 1..n {
            for c in k + 1..n {
                let num = &m[r][c] * &m[k][k] - &m[r][k] * &m[k][c];
                m[r][c] = num / &prev;
            }
            m[r][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    Ok(sign * m[n - 1][n - 1].clone())
}

/// Re-derives every claimed identity: the product, unimodularity,
/// diagonality, nonnegativity, and the divisibility chain.
fn verify(res: &SnfResult) -> Result<(), NgError> {
    let product = mat_mul(&mat_mul(&res.u, &res.input), &res.v);
    if product != res.d {
        return Err(NgError::Internal("U*A*V does not equal D".into()));
    }
    for (name, mat) in [("U", &res.u), ("V", &res.v)] {
        let det = int_det(mat)?;
        if det.abs() != BigInt::one() {
            return Err(NgError::Internal(format!("{name} is not unimodular (det {det})")));
        }
    }
    for (i, row) in res.d.iter().enumerate() {
        for (j, val) in row.iter().enumerate() {
            if i != j && !val.is_zero() {
                return Err(NgError::Internal("D is not diagonal".into()));
            }
            if i == j && val.is_negative() {
                return Err(NgError::Internal("diagonal entry is negative".into()));
            }
        }
    }
    for pair in res.invariant_factors.windows(2) {
        if !(&pair[1] % &pair[0]).is_zero() {
            return Err(NgError::Internal("divisibility chain broken".into()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    fn factors(rows: &[&[i64]]) -> Vec<BigInt> {
        smith_normal_form(&mat(rows)).unwrap().invariant_factors
    }

    #[test]
    fn identity_is_fixed() {
        let res = smith_normal_form(&mat(&[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(res.d, mat(&[&[1, 0], &[0, 1]]));
        assert_eq!(res.u, mat(&[&[1, 0], &[0, 1]]));
        assert_eq!(res.v, mat(&[&[1, 0], &[0, 1]]));
    }

    #[test]
    fn coprime_diagonal_merges() {
        assert_eq!(factors(&[&[2, 0], &[0, 3]]), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn dense_example() {
        assert_eq!(factors(&[&[2, 4], &[6, 8]]), vec![BigInt::from(2), BigInt::from(4)]);
    }

    #[test]
    fn rank_deficient_and_rectangular() {
        assert_eq!(factors(&[&[1, 2], &[2, 4]]), vec![BigInt::from(1)]);
        assert_eq!(factors(&[&[6, 10, 15]]), vec![BigInt::from(1)]);
        assert_eq!(factors(&[&[0, 0], &[0, 0]]), Vec::<BigInt>::new());
    }

    #[test]
    fn factors_multiply_to_absolute_determinant() {
        let a = mat(&[&[3, 1, -2], &[7, -4, 5], &[2, 2, 2]]);
        let res = smith_normal_form(&a).unwrap();
        let prod: BigInt = res.invariant_factors.iter().product();
        assert_eq!(prod, int_det(&a).unwrap().abs());
    }

    #[test]
    fn negative_determinant_normalizes() {
        // det = -1: SNF is the identity.
        assert_eq!(factors(&[&[0, 1], &[1, 0]]), vec![BigInt::from(1), BigInt::from(1)]);
    }
}
