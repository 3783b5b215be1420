//! Dense integer matrices and the few scalar-vector products the towers need.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::scalar::{Scalar, ScalarError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        let data = rows.iter().flat_map(|row| row.iter().cloned().map(Into::into)).collect();
        Self { rows: r, cols: c, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Zero-based entry access.
    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn min_entry(&self) -> Option<&BigInt> {
        self.data.iter().min()
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows).map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn mul_scalars(&self, v: &[Scalar]) -> Result<Vec<Scalar>, ScalarError> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows).map(|i| dot_int_scalar(self.row(i), v)).collect()
    }

    /// `selfᵀ · v`.
    pub fn transpose_mul_scalars(&self, v: &[Scalar]) -> Result<Vec<Scalar>, ScalarError> {
        assert_eq!(self.rows, v.len(), "dimension mismatch");
        (0..self.cols)
            .map(|j| {
                let col: Vec<BigInt> = (0..self.rows).map(|i| self.get(i, j).clone()).collect();
                dot_int_scalar(&col, v)
            })
            .collect()
    }
}

pub fn dot_int(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_int_scalar(a: &[BigInt], v: &[Scalar]) -> Result<Scalar, ScalarError> {
    let mut acc = Scalar::zero();
    for (k, x) in a.iter().zip(v) {
        if !k.is_zero() {
            acc = acc.checked_add(&x.mul_int(k))?;
        }
    }
    Ok(acc)
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            (0..self.rows).map(|i| self.row(i).iter().map(ToString::to_string).collect()).collect();
        rows.serialize(s)
    }
}

/// Solves `M x = b` (or `Mᵀ x = b` when `transposed`) exactly for square `M`;
/// `None` when `M` is singular.
pub fn solve_exact(m: &IntMatrix, b: &[Scalar], transposed: bool) -> Result<Option<Vec<Scalar>>, ScalarError> {
    let n = m.rows();
    if m.cols() != n || b.len() != n {
        return Ok(None);
    }
    let mut a: Vec<Vec<Scalar>> = (0..n)
        .map(|i| {
            let mut row: Vec<Scalar> =
                (0..n).map(|j| Scalar::integer(if transposed { m.get(j, i) } else { m.get(i, j) }.clone())).collect();
            row.push(b[i].clone());
            row
        })
        .collect();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !a[r][col].is_zero()) else { return Ok(None) };
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for x in &mut a[col][col..] {
            *x = x.checked_div(&p)?;
        }
        let pivot_row = a[col].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r == col || row[col].is_zero() {
                continue;
            }
            let f = row[col].clone();
            for (x, y) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x = x.checked_sub(&y.checked_mul(&f)?)?;
            }
        }
    }
    Ok(Some(a.into_iter().map(|row| row[n].clone()).collect()))
}
