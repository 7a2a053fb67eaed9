//! Small dense matrices over any [`Scalar`].

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<V> {
    rows: usize,
    cols: usize,
    data: Vec<V>,
}

impl<V: Scalar> Matrix<V> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> V) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<V>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn zeros_like(like: &V, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| like.zero_like())
    }

    pub fn identity_like(like: &V, n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { like.one_like() } else { like.zero_like() })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &V {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: V) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> impl Iterator<Item = &V> {
        self.data.iter()
    }

    pub fn row(&self, i: usize) -> &[V] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<V>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<W: Scalar>(&self, f: impl Fn(&V) -> W) -> Matrix<W> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        Self::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = self.get(i, 0).mul(o.get(0, j));
            for k in 1..self.cols {
                acc = acc.add(&self.get(i, k).mul(o.get(k, j)));
            }
            acc
        })
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect() }
    }

    pub fn scale(&self, k: &V) -> Self {
        self.map(|x| x.mul(k))
    }

    /// Row vector times matrix.
    pub fn left_apply(&self, x: &[V]) -> Vec<V> {
        assert_eq!(x.len(), self.rows);
        (0..self.cols)
            .map(|j| {
                let mut acc = x[0].mul(self.get(0, j));
                for (i, xi) in x.iter().enumerate().skip(1) {
                    acc = acc.add(&xi.mul(self.get(i, j)));
                }
                acc
            })
            .collect()
    }

    /// Leading `k x k` block.
    pub fn leading(&self, k: usize) -> Self {
        Self::from_fn(k, k, |i, j| self.get(i, j).clone())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// True if every entry above the diagonal is exactly zero.
    pub fn is_lower_triangular(&self) -> bool {
        (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self.get(i, j).is_exact_zero()))
    }

    /// Inverse of a square lower-triangular matrix by forward substitution.
    pub fn lower_triangular_inverse(&self) -> Result<Self> {
        if self.rows != self.cols || !self.is_lower_triangular() {
            return Err(Error::Precondition("expected a square lower-triangular matrix".into()));
        }
        let n = self.rows;
        let like = self.get(0, 0);
        let mut inv = Self::zeros_like(like, n, n);
        let diag_inv: Vec<V> = (0..n).map(|i| self.get(i, i).try_inv()).collect::<Result<_>>()?;
        for j in 0..n {
            inv.set(j, j, diag_inv[j].clone());
            for i in j + 1..n {
                let mut acc = like.zero_like();
                for k in j..i {
                    acc = acc.add(&self.get(i, k).mul(inv.get(k, j)));
                }
                inv.set(i, j, acc.mul(&diag_inv[i]).neg());
            }
        }
        Ok(inv)
    }

    /// Reorders rows and columns: entry `(i, j)` of the result is `(perm[i], perm[j])` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(perm[i], perm[j]).clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radical::{rat, RadicalNumber};

    fn r(n: i64, d: i64) -> RadicalNumber {
        RadicalNumber::from_rational(rat(n, d))
    }

    #[test]
    fn lower_inverse_exact() {
        let m = Matrix::from_rows(vec![
            vec![r(2, 1), r(0, 1), r(0, 1)],
            vec![r(1, 3), r(5, 1), r(0, 1)],
            vec![r(-1, 1), r(7, 2), r(1, 4)],
        ]);
        let inv = m.lower_triangular_inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::identity_like(&r(1, 1), 3));
        let upper = m.transpose();
        assert!(upper.lower_triangular_inverse().is_err());
    }

    #[test]
    fn row_vector_apply() {
        let m = Matrix::from_rows(vec![vec![r(1, 1), r(2, 1)], vec![r(3, 1), r(4, 1)]]);
        assert_eq!(m.left_apply(&[r(1, 1), r(1, 1)]), vec![r(4, 1), r(6, 1)]);
    }
}
