//! Dense real matrices and the controllability-matrix machinery.

use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};
use crate::tol;

/// Dense row-major real matrix with finite entries.
#[derive(Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl RealMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension(format!("empty {rows}x{cols} matrix")));
        }
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite entry at ({}, {})",
                pos / cols,
                pos % cols
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::from_row_major(r, c, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Column vector from a slice.
    pub fn column(values: &[f64]) -> Result<Self> {
        Self::from_row_major(values.len(), 1, values.to_vec())
    }

    /// The canonical basis vector `e_index` of dimension `n`.
    pub fn basis(n: usize, index: usize) -> Self {
        let mut m = Self::zeros(n, 1);
        m.data[index] = 1.0;
        m
    }

    /// Selection matrix whose columns are `e_l` for each listed row index.
    pub fn selection(n: usize, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Argument("empty selection".into()));
        }
        let mut m = Self::zeros(n, indices.len());
        for (c, &r) in indices.iter().enumerate() {
            if r >= n {
                return Err(Error::Argument(format!("index {r} out of range for n = {n}")));
            }
            m.set(r, c, 1.0);
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, value: f64) {
        self.data[r * self.cols + c] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    /// True when every entry is an integer small enough to be represented
    /// exactly.
    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.fract() == 0.0 && x.abs() < 9.007_199_254_740_992e15)
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetry_violation().is_none()
    }

    pub(crate) fn symmetry_violation(&self) -> Option<(usize, usize)> {
        if !self.is_square() {
            return Some((0, 0));
        }
        let eps = tol::zero_tolerance();
        for i in 0..self.rows {
            for j in i + 1..self.cols {
                if (self.get(i, j) - self.get(j, i)).abs() > eps {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn mul(&self, other: &RealMatrix) -> Result<RealMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        RealMatrix::from_row_major(self.rows, other.cols, out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::Dimension(format!(
                "vector of length {} for a matrix with {} columns",
                v.len(),
                self.cols
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `wᵀ M`.
    pub fn left_mul_vec(&self, w: &[f64]) -> Result<Vec<f64>> {
        if w.len() != self.rows {
            return Err(Error::Dimension(format!(
                "vector of length {} for a matrix with {} rows",
                w.len(),
                self.rows
            )));
        }
        Ok((0..self.cols)
            .map(|c| (0..self.rows).map(|r| w[r] * self.get(r, c)).sum())
            .collect())
    }

    /// Rows listed in `rows`, columns in `cols`, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<RealMatrix> {
        if rows.is_empty() || cols.is_empty() {
            return Err(Error::Dimension("empty submatrix".into()));
        }
        let mut data = Vec::with_capacity(rows.len() * cols.len());
        for &r in rows {
            for &c in cols {
                if r >= self.rows || c >= self.cols {
                    return Err(Error::Dimension(format!("index ({r}, {c}) out of range")));
                }
                data.push(self.get(r, c));
            }
        }
        RealMatrix::from_row_major(rows.len(), cols.len(), data)
    }

    pub fn hstack(blocks: &[RealMatrix]) -> Result<RealMatrix> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::Dimension("nothing to stack".into()))?;
        let rows = first.rows;
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::Dimension("row counts differ".into()));
        }
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for b in blocks {
                data.extend_from_slice(b.row(r));
            }
        }
        RealMatrix::from_row_major(rows, cols, data)
    }

    /// Indices of rows whose entries are all zero under the zero tolerance.
    pub fn zero_rows(&self) -> Vec<usize> {
        (0..self.rows)
            .filter(|&r| self.row(r).iter().all(|&x| tol::is_zero(x)))
            .collect()
    }
}

impl Index<(usize, usize)> for RealMatrix {
    type Output = f64;

    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl fmt::Debug for RealMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RealMatrix{:?}", self.to_rows())
    }
}

/// Sign of a real number under the zero tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignClass {
    Negative,
    Zero,
    Positive,
}

impl SignClass {
    pub fn of(x: f64) -> Self {
        if tol::is_zero(x) {
            SignClass::Zero
        } else if x > 0.0 {
            SignClass::Positive
        } else {
            SignClass::Negative
        }
    }

    /// `+1`, `0` or `-1`.
    pub fn as_f64(self) -> f64 {
        match self {
            SignClass::Negative => -1.0,
            SignClass::Zero => 0.0,
            SignClass::Positive => 1.0,
        }
    }

    pub fn is_nonzero(self) -> bool {
        self != SignClass::Zero
    }
}

/// A bijection on `0..len`, stored as `image[i] = π(i)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; image.len()];
        for &i in &image {
            if i >= image.len() || std::mem::replace(&mut seen[i], true) {
                return Err(Error::Permutation(format!("{image:?} is not a bijection")));
            }
        }
        Ok(Self(image))
    }

    pub fn identity(len: usize) -> Self {
        Self((0..len).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Self(inv)
    }

    /// `out[i] = v[π(i)]`.
    pub fn gather<T: Clone>(&self, v: &[T]) -> Vec<T> {
        self.0.iter().map(|&p| v[p].clone()).collect()
    }

    /// Inverse of [`Permutation::gather`]: `out[π(i)] = v[i]`.
    pub fn scatter<T: Clone + Default>(&self, v: &[T]) -> Vec<T> {
        let mut out = vec![T::default(); v.len()];
        for (i, &p) in self.0.iter().enumerate() {
            out[p] = v[i].clone();
        }
        out
    }
}

/// `[B | AB | … | A^{steps-1} B]`, built by repeated multiplication.
pub fn controllability_matrix(a: &RealMatrix, b: &RealMatrix, steps: usize) -> Result<RealMatrix> {
    check_pair(a, b)?;
    if steps == 0 {
        return Err(Error::Dimension("at least one step is required".into()));
    }
    let mut blocks = Vec::with_capacity(steps);
    let mut current = b.clone();
    for k in 0..steps {
        if k > 0 {
            current = a.mul(&current)?;
        }
        blocks.push(current.clone());
    }
    RealMatrix::hstack(&blocks)
}

pub(crate) fn check_pair(a: &RealMatrix, b: &RealMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "state matrix is {}x{}, expected square",
            a.rows(),
            a.cols()
        )));
    }
    if b.rows() != a.rows() {
        return Err(Error::Dimension(format!(
            "input matrix has {} rows, state dimension is {}",
            b.rows(),
            a.rows()
        )));
    }
    Ok(())
}

/// The four blocks of `A` split after the first `m` rows and columns.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockPartition {
    pub a11: RealMatrix,
    pub a12: RealMatrix,
    pub a21: RealMatrix,
    pub a22: RealMatrix,
}

pub fn block_partition(a: &RealMatrix, m: usize) -> Result<BlockPartition> {
    let n = a.rows();
    if !a.is_square() || m == 0 || m >= n {
        return Err(Error::Partition { m, n });
    }
    let head: Vec<usize> = (0..m).collect();
    let tail: Vec<usize> = (m..n).collect();
    Ok(BlockPartition {
        a11: a.submatrix(&head, &head)?,
        a12: a.submatrix(&head, &tail)?,
        a21: a.submatrix(&tail, &head)?,
        a22: a.submatrix(&tail, &tail)?,
    })
}

/// `result[i][j] = M[row_perm(i)][col_perm(j)]`.
pub fn permute(m: &RealMatrix, row_perm: &Permutation, col_perm: &Permutation) -> Result<RealMatrix> {
    if row_perm.len() != m.rows() || col_perm.len() != m.cols() {
        return Err(Error::Permutation(format!(
            "permutation sizes ({}, {}) do not match a {}x{} matrix",
            row_perm.len(),
            col_perm.len(),
            m.rows(),
            m.cols()
        )));
    }
    let mut out = RealMatrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out.set(i, j, m.get(row_perm.apply(i), col_perm.apply(j)));
        }
    }
    Ok(out)
}
