//! Exact dense linear algebra over a [`Scalar`] field.
//!
//! Everything is immutable after construction and computed without rounding.
//! The central entry point is [`Matrix::reduce`], which returns the reduced
//! row echelon form together with the row transform and a kernel basis.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};


use thiserror::Error;

use crate::field::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinAlgError {
    #[error("shape mismatch: {left} vs {right} for {op}")]
    Shape {
        op: &'static str,
        left: String,
        right: String,
    },
    #[error("matrix is not invertible")]
    NotInvertible,
}

/// Dense row-major matrix of exact scalars.
#[derive(Clone, PartialEq)]
pub struct Matrix<K: Scalar> {
    rows: usize,
    cols: usize,
    data: Vec<K>,
}

impl<K: Scalar> fmt::Debug for Matrix<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].render()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl<K: Scalar> Matrix<K> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![K::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = K::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<K>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> K) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_ints(rows: usize, cols: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Matrix {
            rows,
            cols,
            data: entries.iter().map(|&n| K::from_int(n)).collect(),
        }
    }

    pub fn column(entries: Vec<K>) -> Self {
        let rows = entries.len();
        Matrix {
            rows,
            cols: 1,
            data: entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn scale(&self, c: &K) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }

    pub fn col_vec(&self, j: usize) -> Vec<K> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn row_vec(&self, i: usize) -> Vec<K> {
        (0..self.cols).map(|j| self[(i, j)].clone()).collect()
    }

    /// Columns `js` extracted as a new matrix.
    pub fn select_cols(&self, js: &[usize]) -> Self {
        Matrix::from_fn(self.rows, js.len(), |i, j| self[(i, js[j])].clone())
    }

    pub fn hstack(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        Matrix::from_fn(self.rows, self.cols + other.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                other[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn vstack(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.cols, "vstack col mismatch");
        Matrix::from_fn(self.rows + other.rows, self.cols, |i, j| {
            if i < self.rows {
                self[(i, j)].clone()
            } else {
                other[(i - self.rows, j)].clone()
            }
        })
    }

    /// Block diagonal sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        Matrix::from_fn(
            self.rows + other.rows,
            self.cols + other.cols,
            |i, j| match (i < self.rows, j < self.cols) {
                (true, true) => self[(i, j)].clone(),
                (false, false) => other[(i - self.rows, j - self.cols)].clone(),
                _ => K::zero(),
            },
        )
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out: Matrix<K> = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if b.is_zero() {
                        continue;
                    }
                    let cur = out[(i, j)].clone();
                    out[(i, j)] = cur + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[K]) -> Vec<K> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = K::zero();
                for j in 0..self.cols {
                    if !self[(i, j)].is_zero() && !v[j].is_zero() {
                        acc = acc + self[(i, j)].clone() * v[j].clone();
                    }
                }
                acc
            })
            .collect()
    }

    /// Flatten row-major into a single column vector.
    pub fn vectorize(&self) -> Vec<K> {
        self.data.clone()
    }

    pub fn rank(&self) -> usize {
        self.reduce().rank
    }

    /// Gauss-Jordan elimination with full bookkeeping.
    pub fn reduce(&self) -> Reduction<K> {
        let mut rref = self.clone();
        let mut transform = Matrix::identity(self.rows);
        let mut pivots: Vec<usize> = Vec::new();
        let mut r = 0usize;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !rref[(i, c)].is_zero()) else {
                continue;
            };
            rref.swap_rows(r, p);
            transform.swap_rows(r, p);
            let inv = rref[(r, c)].try_inverse().expect("nonzero pivot");
            rref.scale_row(r, &inv);
            transform.scale_row(r, &inv);
            for i in 0..self.rows {
                if i != r && !rref[(i, c)].is_zero() {
                    let f = rref[(i, c)].clone();
                    rref.row_sub_scaled(i, r, &f);
                    transform.row_sub_scaled(i, r, &f);
                }
            }
            pivots.push(c);
            r += 1;
        }
        let rank = r;
        // kernel basis from free columns
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut kernel = Matrix::zeros(self.cols, free.len());
        for (k, &fc) in free.iter().enumerate() {
            kernel[(fc, k)] = K::one();
            for (pr, &pc) in pivots.iter().enumerate() {
                kernel[(pc, k)] = -rref[(pr, fc)].clone();
            }
        }
        Reduction {
            rank,
            rref,
            kernel_basis: kernel,
            row_transform: transform,
            pivot_cols: pivots,
        }
    }

    /// One exact solution of `self * x = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &[K]) -> Result<Option<Vec<K>>, LinAlgError> {
        if b.len() != self.rows {
            return Err(LinAlgError::Shape {
                op: "solve",
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("{}", b.len()),
            });
        }
        let red = self.reduce();
        let tb = red.row_transform.apply(b);
        // inconsistent iff some non-pivot row of T*b is nonzero
        if tb.iter().skip(red.rank).any(|x| !x.is_zero()) {
            return Ok(None);
        }
        let mut x = vec![K::zero(); self.cols];
        for (r, &c) in red.pivot_cols.iter().enumerate() {
            x[c] = tb[r].clone();
        }
        Ok(Some(x))
    }

    /// Solve `self * X = B` columnwise.
    pub fn solve_matrix(&self, b: &Matrix<K>) -> Result<Option<Matrix<K>>, LinAlgError> {
        if b.rows() != self.rows {
            return Err(LinAlgError::Shape {
                op: "solve_matrix",
                left: format!("{}x{}", self.rows, self.cols),
                right: format!("{}x{}", b.rows, b.cols),
            });
        }
        let red = self.reduce();
        let tb = red.row_transform.matmul(b);
        for i in red.rank..self.rows {
            for j in 0..b.cols {
                if !tb[(i, j)].is_zero() {
                    return Ok(None);
                }
            }
        }
        let mut x = Matrix::zeros(self.cols, b.cols);
        for (r, &c) in red.pivot_cols.iter().enumerate() {
            for j in 0..b.cols {
                x[(c, j)] = tb[(r, j)].clone();
            }
        }
        Ok(Some(x))
    }

    pub fn inverse(&self) -> Result<Self, LinAlgError> {
        if !self.is_square() {
            return Err(LinAlgError::NotInvertible);
        }
        let red = self.reduce();
        if red.rank < self.rows {
            return Err(LinAlgError::NotInvertible);
        }
        Ok(red.row_transform)
    }

    pub fn is_invertible(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    /// Basis of the column span, as columns in echelon order.
    pub fn column_space_basis(&self) -> Matrix<K> {
        let red = self.reduce();
        self.select_cols(&red.pivot_cols)
    }

    pub fn trace(&self) -> K {
        assert!(self.is_square());
        let mut acc = K::zero();
        for i in 0..self.rows {
            acc = acc + self[(i, i)].clone();
        }
        acc
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn scale_row(&mut self, r: usize, f: &K) {
        for j in 0..self.cols {
            let v = self[(r, j)].clone();
            self[(r, j)] = v * f.clone();
        }
    }

    fn row_sub_scaled(&mut self, dst: usize, src: usize, f: &K) {
        for j in 0..self.cols {
            let s = self[(src, j)].clone();
            if s.is_zero() {
                continue;
            }
            let d = self[(dst, j)].clone();
            self[(dst, j)] = d - f.clone() * s;
        }
    }
}

impl<K: Scalar> std::ops::Index<(usize, usize)> for Matrix<K> {
    type Output = K;
    fn index(&self, (i, j): (usize, usize)) -> &K {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<K: Scalar> std::ops::IndexMut<(usize, usize)> for Matrix<K> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut K {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<K: Scalar> Add for &Matrix<K> {
    type Output = Matrix<K>;
    fn add(self, rhs: &Matrix<K>) -> Matrix<K> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + rhs[(i, j)].clone()
        })
    }
}

impl<K: Scalar> Sub for &Matrix<K> {
    type Output = Matrix<K>;
    fn sub(self, rhs: &Matrix<K>) -> Matrix<K> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - rhs[(i, j)].clone()
        })
    }
}

impl<K: Scalar> Neg for &Matrix<K> {
    type Output = Matrix<K>;
    fn neg(self) -> Matrix<K> {
        Matrix::from_fn(self.rows, self.cols, |i, j| -self[(i, j)].clone())
    }
}

impl<K: Scalar> Mul for &Matrix<K> {
    type Output = Matrix<K>;
    fn mul(self, rhs: &Matrix<K>) -> Matrix<K> {
        self.matmul(rhs)
    }
}

/// Result of Gauss-Jordan elimination.
#[derive(Clone, Debug)]
pub struct Reduction<K: Scalar> {
    pub rank: usize,
    pub rref: Matrix<K>,
    /// Columns span the kernel `{x : Mx = 0}`; shape cols(M) x nullity.
    pub kernel_basis: Matrix<K>,
    /// Invertible `T` with `T * M = rref`.
    pub row_transform: Matrix<K>,
    pub pivot_cols: Vec<usize>,
}

/// Reusable "is this vector in the span" solver over a fixed generating set.
pub struct SpanSolver<K: Scalar> {
    gens: Matrix<K>, // columns are generators
    red: Reduction<K>,
}

impl<K: Scalar> SpanSolver<K> {
    /// `gens`: columns generate the subspace.
    pub fn new(gens: Matrix<K>) -> Self {
        let red = gens.reduce();
        SpanSolver { gens, red }
    }

    pub fn dim(&self) -> usize {
        self.red.rank
    }

    /// Coordinates of `v` in the generators, if `v` lies in the span.
    pub fn express(&self, v: &[K]) -> Option<Vec<K>> {
        let tb = self.red.row_transform.apply(v);
        if tb.iter().skip(self.red.rank).any(|x| !x.is_zero()) {
            return None;
        }
        let mut x = vec![K::zero(); self.gens.cols()];
        for (r, &c) in self.red.pivot_cols.iter().enumerate() {
            x[c] = tb[r].clone();
        }
        Some(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use crate::field::{rat, ratio, Fp64, Rational};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn qm(rows: usize, cols: usize, ints: &[i64]) -> Matrix<Rational> {
        Matrix::from_ints(rows, cols, ints)
    }

    #[test]
    fn reduce_identity() {
        let m = Matrix::<Rational>::identity(3);
        let red = m.reduce();
        assert_eq!(red.rank, 3);
        assert_eq!(red.kernel_basis.cols(), 0);
        assert_eq!(red.rref, m);
    }

    #[test]
    fn reduce_zero() {
        let m = Matrix::<Rational>::zeros(2, 3);
        let red = m.reduce();
        assert_eq!(red.rank, 0);
        assert_eq!(red.kernel_basis.cols(), 3);
    }

    #[test]
    fn reduce_rank_one() {
        let m = qm(2, 2, &[1, 2, 2, 4]);
        let red = m.reduce();
        assert_eq!(red.rank, 1);
        assert_eq!(red.kernel_basis.cols(), 1);
        // kernel spanned by (-2, 1)
        let k = red.kernel_basis.col_vec(0);
        assert!(m.apply(&k).iter().all(|x| x.is_zero()));
        assert_eq!(k[0].clone() * rat(1), k[1].clone() * rat(-2));
    }

    #[test]
    fn transform_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..25 {
            let r = rng.gen_range(0..5);
            let c = rng.gen_range(0..5);
            let m = Matrix::<Rational>::from_fn(r, c, |_, _| ratio(rng.gen_range(-4..5), 1));
            let red = m.reduce();
            assert!(red.row_transform.is_invertible() || r == 0);
            assert_eq!(red.row_transform.matmul(&m), red.rref);
            assert_eq!(m.rank(), m.transpose().rank());
            // kernel columns are independent and annihilated
            assert_eq!(red.kernel_basis.rank(), red.kernel_basis.cols());
            assert!(m.matmul(&red.kernel_basis).is_zero());
            assert_eq!(red.rank + red.kernel_basis.cols(), c);
        }
    }

    #[test]
    fn solve_cases() {
        let id = Matrix::<Rational>::identity(3);
        let b = vec![rat(4), rat(-1), rat(9)];
        assert_eq!(id.solve(&b).unwrap().unwrap(), b);

        let z = Matrix::<Rational>::zeros(2, 2);
        assert_eq!(z.solve(&[rat(1), rat(0)]).unwrap(), None);

        // underdetermined consistent system, verify by substitution
        let m = qm(2, 3, &[1, 2, 3, 0, 1, 1]);
        let b = vec![rat(6), rat(2)];
        let x = m.solve(&b).unwrap().unwrap();
        assert_eq!(m.apply(&x), b);

        assert!(m.solve(&[rat(1)]).is_err());
    }

    #[test]
    fn inverse_and_span() {
        let m = qm(2, 2, &[2, 1, 1, 1]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.matmul(&inv), Matrix::identity(2));

        let gens = qm(3, 2, &[1, 2, 0, 0, 1, 2]);
        let solver = SpanSolver::new(gens.clone());
        let v = vec![rat(3), rat(0), rat(3)];
        let coords = solver.express(&v).unwrap();
        assert_eq!(gens.apply(&coords), v);
        assert!(solver.express(&[rat(0), rat(1), rat(0)]).is_none());
    }

    #[test]
    fn prime_field_reduce() {
        let m = Matrix::<Fp64>::from_ints(3, 3, &[1, 2, 0, 2, 4, 1, 0, 0, 5]).scale(&Fp64::new(1, 7));
        let red = m.reduce();
        assert_eq!(red.row_transform.matmul(&m), red.rref);
        assert!(m.matmul(&red.kernel_basis).is_zero());
    }
}
