//! Arbitrary-precision integer matrices.
//!
//! Powers of an integer state matrix are cancellation-prone in floating
//! point, and every structural test here is sign based. When the inputs are
//! integral the controllability matrix is formed with big integers, so its
//! sign pattern and rank are exact.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;

/// How a computation treats integral inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Arithmetic {
    /// Exact when every input entry is an integer, floating otherwise.
    #[default]
    Auto,
    /// Always floating point.
    Float,
    /// Always exact; fractional inputs are rejected.
    Exact,
}

impl Arithmetic {
    /// Decides whether the given inputs are processed exactly.
    pub fn use_exact(self, inputs: &[&RealMatrix]) -> Result<bool> {
        match self {
            Arithmetic::Float => Ok(false),
            Arithmetic::Auto => Ok(inputs.iter().all(|m| m.is_integral())),
            Arithmetic::Exact => {
                if inputs.iter().all(|m| m.is_integral()) {
                    Ok(true)
                } else {
                    Err(Error::Numeric(
                        "exact mode requires integer weights".into(),
                    ))
                }
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn from_real(m: &RealMatrix) -> Option<Self> {
        if !m.is_integral() {
            return None;
        }
        let data = m.as_slice().iter().map(|&x| BigInt::from(x as i64)).collect();
        Some(Self { rows: m.rows(), cols: m.cols(), data })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.iter().flatten().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.data[r * self.cols + c]
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut data = vec![BigInt::zero(); self.rows * other.cols];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    data[i * other.cols + j] += a * other.get(k, j);
                }
            }
        }
        Ok(IntMatrix { rows: self.rows, cols: other.cols, data })
    }

    pub fn hstack(blocks: &[IntMatrix]) -> Result<IntMatrix> {
        let rows = blocks
            .first()
            .ok_or_else(|| Error::Dimension("nothing to stack".into()))?
            .rows;
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::Dimension("row counts differ".into()));
        }
        let cols = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for b in blocks {
                data.extend_from_slice(&b.data[r * b.cols..(r + 1) * b.cols]);
            }
        }
        Ok(IntMatrix { rows, cols, data })
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let data = rows
            .iter()
            .flat_map(|&r| cols.iter().map(move |&c| self.get(r, c).clone()))
            .collect();
        IntMatrix { rows: rows.len(), cols: cols.len(), data }
    }

    /// Nearest floating-point matrix. Signs and zeros are preserved exactly;
    /// magnitudes beyond the `f64` range are an error.
    pub fn to_real(&self) -> Result<RealMatrix> {
        let data = self
            .data
            .iter()
            .map(|x| {
                x.to_f64()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| Error::Numeric("integer entry exceeds f64 range".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        RealMatrix::from_row_major(self.rows, self.cols, data)
    }

    /// Exact rank by fraction-free (Bareiss) elimination.
    pub fn rank(&self) -> usize {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|r| self.data[r * self.cols..(r + 1) * self.cols].to_vec())
            .collect();
        let mut rank = 0;
        let mut prev = BigInt::from(1);
        for col in 0..self.cols {
            let Some(pivot) = (rank..self.rows).find(|&r| !m[r][col].is_zero()) else {
                continue;
            };
            m.swap(rank, pivot);
            for r in rank + 1..self.rows {
                for c in col + 1..self.cols {
                    let v = &m[rank][col] * &m[r][c] - &m[r][col] * &m[rank][c];
                    m[r][c] = v / &prev;
                }
                m[r][col] = BigInt::zero();
            }
            prev = m[rank][col].clone();
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }

    /// True when every column of `other` lies in the column space of `self`.
    pub fn image_contains(&self, other: &IntMatrix) -> Result<bool> {
        let base = self.rank();
        for c in 0..other.cols {
            let col = other.submatrix(&(0..other.rows).collect::<Vec<_>>(), &[c]);
            if base != IntMatrix::hstack(&[self.clone(), col])?.rank() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub(crate) fn data(&self) -> &[BigInt] {
        &self.data
    }
}

/// Exact `[B | AB | … | A^{steps-1} B]`.
pub fn controllability_matrix_exact(a: &IntMatrix, b: &IntMatrix, steps: usize) -> Result<IntMatrix> {
    if a.rows != a.cols || b.rows != a.rows {
        return Err(Error::Dimension("state/input shapes do not match".into()));
    }
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
    IntMatrix::hstack(&blocks)
}

/// A controllability matrix in floating form, plus its exact counterpart
/// when the inputs were processed exactly.
#[derive(Debug, Clone)]
pub struct ReachMatrix {
    pub real: RealMatrix,
    pub exact: Option<IntMatrix>,
}

pub fn reach_matrix(a: &RealMatrix, b: &RealMatrix, steps: usize, arith: Arithmetic) -> Result<ReachMatrix> {
    crate::matrix::check_pair(a, b)?;
    if arith.use_exact(&[a, b])? {
        let ai = IntMatrix::from_real(a).expect("integral");
        let bi = IntMatrix::from_real(b).expect("integral");
        let exact = controllability_matrix_exact(&ai, &bi, steps)?;
        Ok(ReachMatrix { real: exact.to_real()?, exact: Some(exact) })
    } else {
        Ok(ReachMatrix {
            real: crate::matrix::controllability_matrix(a, b, steps)?,
            exact: None,
        })
    }
}

/// Scales a vector of rationals `num[i] / den[i]` to the primitive integer
/// vector with the same direction.
pub(crate) fn primitive_integer_direction(values: &[num_rational::BigRational]) -> Vec<BigInt> {
    let lcm = values
        .iter()
        .fold(BigInt::from(1), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = values.iter().map(|v| (v * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|v| v / &g).collect()
}
