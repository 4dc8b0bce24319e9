//! Dense exact matrices over Q, over prime fields, and over the polynomial
//! ring (for symbolic Jacobians and fraction-free determinants).

use num::{BigRational, Zero};

use crate::error::NgError;
use crate::polyalg::{MultiPoly, PrimeField};

/// Dense rational matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigRational::zero(); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self, NgError> {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        if rows.iter().any(|x| x.len() != c) {
            return Err(NgError::Shape("ragged matrix rows".into()));
        }
        Ok(Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigRational::from_integer(1.into());
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: BigRational) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[BigRational] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zero(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(c, r)] = self[(r, c)].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, NgError> {
        if self.cols != other.rows {
            return Err(NgError::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zero(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let add = a * &other[(k, c)];
                    out[(r, c)] += add;
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Result<Vec<BigRational>, NgError> {
        if v.len() != self.cols {
            return Err(NgError::Shape("vector length mismatch".into()));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Reduced row echelon form; returns pivot column indices.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut lead = 0usize;
        for col in 0..self.cols {
            let Some(pr) = (lead..self.rows).find(|&r| !self[(r, col)].is_zero()) else {
                continue;
            };
            self.swap_rows(lead, pr);
            let inv = self[(lead, col)].recip();
            for c in col..self.cols {
                let v = &self[(lead, c)] * &inv;
                self[(lead, c)] = v;
            }
            for r in 0..self.rows {
                if r != lead && !self[(r, col)].is_zero() {
                    let factor = self[(r, col)].clone();
                    for c in col..self.cols {
                        let v = &self[(r, c)] - &factor * &self[(lead, c)];
                        self[(r, c)] = v;
                    }
                }
            }
            pivots.push(col);
            lead += 1;
            if lead == self.rows {
                break;
            }
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    /// Basis of the right kernel {v : Av = 0}.
    pub fn kernel_basis(&self) -> Vec<Vec<BigRational>> {
        let mut m = self.clone();
        let pivots = m.rref();
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivot_set.contains(c)).collect();
        let mut basis = Vec::new();
        for &fc in &free {
            let mut v = vec![BigRational::zero(); self.cols];
            v[fc] = BigRational::from_integer(1.into());
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = -m[(prow, fc)].clone();
            }
            basis.push(v);
        }
        basis
    }

    /// Solves Ax = b exactly; None when inconsistent. For underdetermined
    /// systems returns the solution with free variables set to zero.
    pub fn solve(&self, b: &[BigRational]) -> Result<Option<Vec<BigRational>>, NgError> {
        if b.len() != self.rows {
            return Err(NgError::Shape("right-hand side length mismatch".into()));
        }
        let mut aug = RatMatrix::zero(self.rows, self.cols + 1);
        for r in 0..self.rows {
            for c in 0..self.cols {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, self.cols)] = b[r].clone();
        }
        let pivots = aug.rref();
        if pivots.contains(&self.cols) {
            return Ok(None);
        }
        let mut x = vec![BigRational::zero(); self.cols];
        for (prow, &pcol) in pivots.iter().enumerate() {
            x[pcol] = aug[(prow, self.cols)].clone();
        }
        Ok(Some(x))
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = BigRational;
    fn index(&self, (r, c): (usize, usize)) -> &BigRational {
        self.get(r, c)
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut BigRational {
        &mut self.data[r * self.cols + c]
    }
}

/// Dense matrix over a prime field, entries as residues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    pub rows: usize,
    pub cols: usize,
    pub field: PrimeField,
    data: Vec<u64>,
}

impl FpMatrix {
    pub fn zero(rows: usize, cols: usize, field: PrimeField) -> Self {
        Self { rows, cols, field, data: vec![0; rows * cols] }
    }

    pub fn get(&self, r: usize, c: usize) -> u64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: u64) {
        self.data[r * self.cols + c] = v % self.field.prime();
    }

    /// Appends the rows of `other` below `self`.
    pub fn stack(&mut self, other: &FpMatrix) -> Result<(), NgError> {
        if other.cols != self.cols || other.field.prime() != self.field.prime() {
            return Err(NgError::Shape("stacked matrix shape or field mismatch".into()));
        }
        self.data.extend_from_slice(&other.data);
        self.rows += other.rows;
        Ok(())
    }

    /// Appends the columns of `other` to the right of `self`.
    pub fn augment(&mut self, other: &FpMatrix) -> Result<(), NgError> {
        if other.rows != self.rows || other.field.prime() != self.field.prime() {
            return Err(NgError::Shape("augmented matrix shape or field mismatch".into()));
        }
        let mut data = Vec::with_capacity(self.rows * (self.cols + other.cols));
        for r in 0..self.rows {
            data.extend_from_slice(&self.data[r * self.cols..(r + 1) * self.cols]);
            data.extend_from_slice(&other.data[r * other.cols..(r + 1) * other.cols]);
        }
        self.cols += other.cols;
        self.data = data;
        Ok(())
    }

    pub fn rank(&self) -> Result<usize, NgError> {
        let f = &self.field;
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let at = |m: &Vec<u64>, r: usize, c: usize| m[r * cols + c];
        let mut rank = 0usize;
        for col in 0..cols {
            let Some(pr) = (rank..rows).find(|&r| at(&m, r, col) != 0) else {
                continue;
            };
            for c in 0..cols {
                m.swap(rank * cols + c, pr * cols + c);
            }
            let inv = f.inv(at(&m, rank, col))?;
            for r in rank + 1..rows {
                let factor = f.mul(at(&m, r, col), inv);
                if factor == 0 {
                    continue;
                }
                for c in col..cols {
                    let v = f.sub(at(&m, r, c), f.mul(factor, at(&m, rank, c)));
                    m[r * cols + c] = v;
                }
            }
            rank += 1;
            if rank == rows {
                break;
            }
        }
        Ok(rank)
    }

    /// Basis of the right kernel over the prime field.
    pub fn kernel_basis(&self) -> Result<Vec<Vec<u64>>, NgError> {
        let f = &self.field;
        let mut m = self.data.clone();
        let (rows, cols) = (self.rows, self.cols);
        let at = |m: &Vec<u64>, r: usize, c: usize| m[r * cols + c];
        let mut pivots: Vec<usize> = Vec::new();
        let mut lead = 0usize;
        for col in 0..cols {
            let Some(pr) = (lead..rows).find(|&r| at(&m, r, col) != 0) else {
                continue;
            };
            for c in 0..cols {
                m.swap(lead * cols + c, pr * cols + c);
            }
            let inv = f.inv(at(&m, lead, col))?;
            for c in col..cols {
                m[lead * cols + c] = f.mul(at(&m, lead, c), inv);
            }
            for r in 0..rows {
                if r != lead && at(&m, r, col) != 0 {
                    let factor = at(&m, r, col);
                    for c in col..cols {
                        let v = f.sub(at(&m, r, c), f.mul(factor, at(&m, lead, c)));
                        m[r * cols + c] = v;
                    }
                }
            }
            pivots.push(col);
            lead += 1;
            if lead == rows {
                break;
            }
        }
        let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
        let mut basis = Vec::new();
        for fc in (0..cols).filter(|c| !pivot_set.contains(c)) {
            let mut v = vec![0u64; cols];
            v[fc] = 1;
            for (prow, &pcol) in pivots.iter().enumerate() {
                v[pcol] = f.neg(at(&m, prow, fc));
            }
            basis.push(v);
        }
        Ok(basis)
    }
}

/// Dense matrix of polynomials, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    pub rows: usize,
    pub cols: usize,
    pub num_vars: usize,
    entries: Vec<MultiPoly>,
}

impl PolyMatrix {
    pub fn zero(rows: usize, cols: usize, num_vars: usize) -> Self {
        Self { rows, cols, num_vars, entries: vec![MultiPoly::zero(num_vars); rows * cols] }
    }

    pub fn get(&self, r: usize, c: usize) -> &MultiPoly {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: MultiPoly) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zero(rows.len(), cols.len(), self.num_vars);
        for (ri, &r) in rows.iter().enumerate() {
            for (ci, &c) in cols.iter().enumerate() {
                out.set(ri, ci, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn restrict_cols(&self, cols: &[usize]) -> Self {
        self.submatrix(&(0..self.rows).collect::<Vec<_>>(), cols)
    }

    /// Fraction-free determinant (Bareiss). Exact over the polynomial ring.
    pub fn det(&self) -> Result<MultiPoly, NgError> {
        if self.rows != self.cols {
            return Err(NgError::Shape("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(MultiPoly::constant_int(self.num_vars, 1));
        }
        let mut m: Vec<MultiPoly> = self.entries.clone();
        let at = |m: &Vec<MultiPoly>, r: usize, c: usize| m[r * n + c].clone();
        let mut sign = 1i64;
        let mut prev = MultiPoly::constant_int(self.num_vars, 1);
        for k in 0..n - 1 {
            if at(&m, k, k).is_zero() {
                let Some(pr) = (k + 1..n).find(|&r| !at(&m, r, k).is_zero()) else {
                    return Ok(MultiPoly::zero(self.num_vars));
                };
                for c in 0..n {
                    m.swap(k * n + c, pr * n + c);
                }
                sign = -sign;
            }
            for r in k + 1..n {
                for c in k + 1..n {
                    let num = at(&m, r, c)
                        .mul(&at(&m, k, k))?
                        .sub(&at(&m, r, k).mul(&at(&m, k, c))?)?;
                    m[r * n + c] = num.div_exact(&prev)?;
                }
                m[r * n + k] = MultiPoly::zero(self.num_vars);
            }
            prev = at(&m, k, k);
        }
        let det = at(&m, n - 1, n - 1);
        Ok(if sign < 0 { det.neg() } else { det })
    }

    pub fn eval_rational(&self, point: &[BigRational]) -> Result<RatMatrix, NgError> {
        let mut out = RatMatrix::zero(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = self.get(r, c).eval_rational(point)?;
            }
        }
        Ok(out)
    }

    pub fn eval_mod(&self, point: &[u64], field: &PrimeField) -> Result<FpMatrix, NgError> {
        let mut out = FpMatrix::zero(self.rows, self.cols, field.clone());
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(r, c, self.get(r, c).eval_mod(field, point)?);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::rational_from_str;

    fn q(s: &str) -> BigRational {
        rational_from_str(s).unwrap()
    }

    fn rat(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn rational_rank_and_rref() {
        let m = rat(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(m.rank(), 2);
        assert_eq!(RatMatrix::identity(4).rank(), 4);
        assert_eq!(RatMatrix::zero(3, 5).rank(), 0);
    }

    #[test]
    fn rational_kernel_annihilates() {
        let m = rat(&[&[1, 2, 3], &[4, 5, 6]]);
        let kernel = m.kernel_basis();
        assert_eq!(kernel.len(), 1);
        for v in &kernel {
            let prod = m.mul_vec(v).unwrap();
            assert!(prod.iter().all(|x| x.is_zero()));
        }
        // Kernel vector is proportional to (1, -2, 1).
        let v = &kernel[0];
        assert_eq!(&v[0] * q("-2"), v[1].clone());
        assert_eq!(v[0], v[2]);
        let prod = m.mul_vec(&[q("1"), q("-2"), q("1")]).unwrap();
        assert!(prod.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn rational_solve() {
        let m = rat(&[&[2, 1], &[1, 3]]);
        let x = m.solve(&[q("5"), q("10")]).unwrap().unwrap();
        assert_eq!(x, vec![q("1"), q("3")]);
        // Inconsistent system.
        let s = rat(&[&[1, 1], &[2, 2]]);
        assert!(s.solve(&[q("1"), q("3")]).unwrap().is_none());
        // Consistent underdetermined system.
        let some = s.solve(&[q("1"), q("2")]).unwrap().unwrap();
        let back = s.mul_vec(&some).unwrap();
        assert_eq!(back, vec![q("1"), q("2")]);
    }

    #[test]
    fn fp_rank_and_kernel() {
        let field = PrimeField::new(101).unwrap();
        let mut m = FpMatrix::zero(2, 3, field.clone());
        m.set(0, 0, 1);
        m.set(0, 1, 2);
        m.set(0, 2, 3);
        m.set(1, 0, 4);
        m.set(1, 1, 5);
        m.set(1, 2, 6);
        assert_eq!(m.rank().unwrap(), 2);
        let kernel = m.kernel_basis().unwrap();
        assert_eq!(kernel.len(), 1);
        let v = &kernel[0];
        for r in 0..2 {
            let mut acc = 0u64;
            for c in 0..3 {
                acc = field.add(acc, field.mul(m.get(r, c), v[c]));
            }
            assert_eq!(acc, 0);
        }
    }

    #[test]
    fn fp_stack_and_augment() {
        let field = PrimeField::new(7).unwrap();
        let mut a = FpMatrix::zero(1, 2, field.clone());
        a.set(0, 0, 1);
        let mut b = FpMatrix::zero(1, 2, field.clone());
        b.set(0, 1, 1);
        a.stack(&b).unwrap();
        assert_eq!(a.rows, 2);
        assert_eq!(a.rank().unwrap(), 2);
        let mut c = FpMatrix::zero(2, 1, field);
        c.set(0, 0, 3);
        a.augment(&c).unwrap();
        assert_eq!(a.cols, 3);
        assert_eq!(a.get(0, 2), 3);
        assert_eq!(a.get(1, 0), 0);
    }

    #[test]
    fn poly_det_two_by_two() {
        // det [[x1, x2], [x3, x4]] = x1*x4 - x2*x3.
        let mut m = PolyMatrix::zero(2, 2, 4);
        for (i, slot) in [(0usize, (0usize, 0usize)), (1, (0, 1)), (2, (1, 0)), (3, (1, 1))] {
            m.set(slot.0, slot.1, MultiPoly::var(4, i));
        }
        let det = m.det().unwrap();
        let expected = MultiPoly::var(4, 0)
            .mul(&MultiPoly::var(4, 3))
            .unwrap()
            .sub(&MultiPoly::var(4, 1).mul(&MultiPoly::var(4, 2)).unwrap())
            .unwrap();
        assert_eq!(det, expected);
    }

    #[test]
    fn poly_det_bareiss_three_by_three() {
        // Vandermonde in x1, x2, x3: det = (x2-x1)(x3-x1)(x3-x2).
        let n = 3;
        let mut m = PolyMatrix::zero(3, 3, n);
        for r in 0..3 {
            let x = MultiPoly::var(n, r);
            m.set(r, 0, MultiPoly::constant_int(n, 1));
            m.set(r, 1, x.clone());
            m.set(r, 2, x.mul(&x).unwrap());
        }
        let det = m.det().unwrap();
        let x1 = MultiPoly::var(n, 0);
        let x2 = MultiPoly::var(n, 1);
        let x3 = MultiPoly::var(n, 2);
        let expected = x2
            .sub(&x1)
            .unwrap()
            .mul(&x3.sub(&x1).unwrap())
            .unwrap()
            .mul(&x3.sub(&x2).unwrap())
            .unwrap();
        assert_eq!(det, expected);
    }

    #[test]
    fn poly_det_with_zero_pivot_and_singular() {
        let n = 1;
        // [[0, x], [x, 0]] needs a row swap; det = -x^2.
        let x = MultiPoly::var(n, 0);
        let mut m = PolyMatrix::zero(2, 2, n);
        m.set(0, 1, x.clone());
        m.set(1, 0, x.clone());
        assert_eq!(m.det().unwrap(), x.mul(&x).unwrap().neg());
        // Singular matrix.
        let mut s = PolyMatrix::zero(2, 2, n);
        s.set(0, 0, x.clone());
        s.set(1, 0, x.clone());
        assert!(s.det().unwrap().is_zero());
    }

    #[test]
    fn poly_eval_paths_agree() {
        let n = 2;
        let mut m = PolyMatrix::zero(2, 2, n);
        m.set(0, 0, MultiPoly::var(n, 0).mul(&MultiPoly::var(n, 1)).unwrap());
        m.set(0, 1, MultiPoly::constant_int(n, 5));
        m.set(1, 1, MultiPoly::var(n, 1));
        let point = [q("2"), q("3")];
        let rm = m.eval_rational(&point).unwrap();
        assert_eq!(rm[(0, 0)], q("6"));
        let field = PrimeField::new(97).unwrap();
        let fm = m.eval_mod(&[2, 3], &field).unwrap();
        assert_eq!(fm.get(0, 0), 6);
        assert_eq!(fm.get(0, 1), 5);
        assert_eq!(fm.get(1, 0), 0);
        assert_eq!(fm.get(1, 1), 3);
    }
}
