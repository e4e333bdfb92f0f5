//! Exact decision of whether the image of a matrix meets the open positive
//! orthant, with certificates.
//!
//! A pair `(A, B)` is herdable iff the image of its controllability matrix
//! contains a strictly positive vector. Because the image is a subspace,
//! that is the same as feasibility of `M u >= 1`. Feasible instances come
//! with the input `u`; infeasible ones with a nonnegative, nonzero `w` such
//! that `wᵀM = 0` (Farkas).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{primitive_integer_direction, reach_matrix, Arithmetic, IntMatrix};
use crate::matrix::RealMatrix;
use crate::simplex::{int_to_rational, phase_one, PhaseOne};
use crate::tol::CERTIFICATE_SLACK;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Herdable,
    NotHerdable,
    Unknown,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Herdable => "Herdable",
            Status::NotHerdable => "NotHerdable",
            Status::Unknown => "Unknown",
        }
    }
}

/// Outcome of a herdability test.
///
/// `Herdable` always carries an input certificate `u` with `M u >= 1`;
/// `NotHerdable` always carries a separating functional `w`. `Unknown` is
/// only produced by sufficient tests.
#[derive(Debug, Clone, PartialEq)]
pub struct HerdabilityVerdict {
    pub status: Status,
    pub certificate: Option<Vec<f64>>,
    pub witness: Option<Vec<f64>>,
}

impl HerdabilityVerdict {
    pub fn herdable(certificate: Vec<f64>) -> Self {
        Self { status: Status::Herdable, certificate: Some(certificate), witness: None }
    }

    pub fn not_herdable(witness: Vec<f64>) -> Self {
        Self { status: Status::NotHerdable, certificate: None, witness: Some(witness) }
    }

    pub fn unknown() -> Self {
        Self { status: Status::Unknown, certificate: None, witness: None }
    }

    pub fn is_herdable(&self) -> bool {
        self.status == Status::Herdable
    }
}

/// True iff every component of `M u` is at least `1 - 1e-8`.
pub fn verify_certificate(m: &RealMatrix, u: &[f64]) -> Result<bool> {
    Ok(m.mul_vec(u)?.iter().all(|&v| v >= 1.0 - CERTIFICATE_SLACK))
}

/// True iff `w >= 0`, `w != 0` and `|wᵀM|` vanishes componentwise, with a
/// tolerance of `tol` relative to the magnitudes involved.
pub fn verify_witness(m: &RealMatrix, w: &[f64], tol: f64) -> Result<bool> {
    if w.len() != m.rows() {
        return Err(Error::Dimension("witness length does not match rows".into()));
    }
    if w.iter().any(|&x| x < 0.0) || w.iter().all(|&x| x == 0.0) {
        return Ok(false);
    }
    let wm = m.left_mul_vec(w)?;
    Ok((0..m.cols()).all(|c| {
        let scale: f64 = (0..m.rows()).map(|r| (w[r] * m.get(r, c)).abs()).sum();
        wm[c].abs() <= tol * scale.max(1.0)
    }))
}

/// Decides `∃u: M u >= 1`. Integral matrices are solved in exact rational
/// arithmetic, others in floating point.
pub fn positive_image_feasible(m: &RealMatrix) -> Result<HerdabilityVerdict> {
    match IntMatrix::from_real(m) {
        Some(exact) => positive_image_feasible_exact(&exact, m),
        None => positive_image_feasible_float(m),
    }
}

pub fn positive_image_feasible_float(m: &RealMatrix) -> Result<HerdabilityVerdict> {
    if let Some(verdict) = zero_row_verdict(m) {
        return Ok(verdict);
    }
    match phase_one(m.rows(), m.cols(), m.as_slice()) {
        PhaseOne::Feasible { u } => Ok(HerdabilityVerdict::herdable(normalize_certificate(m, u)?)),
        PhaseOne::Infeasible { y } => {
            let max = y.iter().cloned().fold(0.0_f64, f64::max);
            if max <= 0.0 {
                return Err(Error::Numeric("degenerate dual witness".into()));
            }
            let w = y.iter().map(|&v| if v > 0.0 { v / max } else { 0.0 }).collect();
            Ok(HerdabilityVerdict::not_herdable(w))
        }
    }
}

/// Exact variant; `real` must be the floating image of `m` and is used to
/// scale the returned certificate.
pub fn positive_image_feasible_exact(m: &IntMatrix, real: &RealMatrix) -> Result<HerdabilityVerdict> {
    if let Some(verdict) = zero_row_verdict(real) {
        return Ok(verdict);
    }
    let entries: Vec<BigRational> = m.data().iter().map(int_to_rational).collect();
    match phase_one(m.rows(), m.cols(), &entries) {
        PhaseOne::Feasible { u } => {
            let u = u
                .iter()
                .map(|x| x.to_f64().filter(|v| v.is_finite()))
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| Error::Numeric("certificate outside f64 range".into()))?;
            Ok(HerdabilityVerdict::herdable(normalize_certificate(real, u)?))
        }
        PhaseOne::Infeasible { y } => {
            let w = primitive_integer_direction(&y);
            if w.iter().any(|v| v.is_negative()) || w.iter().all(BigInt::is_zero) {
                return Err(Error::Numeric("invalid exact dual witness".into()));
            }
            let w = w
                .iter()
                .map(|v| v.to_f64().filter(|x| x.is_finite()))
                .collect::<Option<Vec<f64>>>()
                .ok_or_else(|| Error::Numeric("witness outside f64 range".into()))?;
            Ok(HerdabilityVerdict::not_herdable(w))
        }
    }
}

/// Rescales `u` so that the floating evaluation of `M u` is at least one
/// everywhere.
fn normalize_certificate(m: &RealMatrix, mut u: Vec<f64>) -> Result<Vec<f64>> {
    let mu = m.mul_vec(&u)?;
    let min = mu.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(Error::Numeric("certificate lost positivity in rounding".into()));
    }
    if min < 1.0 {
        let scale = (1.0 / min) * (1.0 + 1e-12);
        u.iter_mut().for_each(|x| *x *= scale);
    }
    Ok(u)
}

/// An exactly zero row rules out positivity; the corresponding basis vector
/// is a witness.
fn zero_row_verdict(m: &RealMatrix) -> Option<HerdabilityVerdict> {
    let row = (0..m.rows()).find(|&r| m.row(r).iter().all(|&x| x == 0.0))?;
    let mut w = vec![0.0; m.rows()];
    w[row] = 1.0;
    Some(HerdabilityVerdict::not_herdable(w))
}

/// Herdability of the pair `(A, B)`: the oracle applied to `R(A, B)`.
pub fn herdable(a: &RealMatrix, b: &RealMatrix) -> Result<HerdabilityVerdict> {
    herdable_with(a, b, Arithmetic::Auto)
}

pub fn herdable_with(a: &RealMatrix, b: &RealMatrix, arith: Arithmetic) -> Result<HerdabilityVerdict> {
    let reach = reach_matrix(a, b, a.rows(), arith)?;
    match &reach.exact {
        Some(exact) => positive_image_feasible_exact(exact, &reach.real),
        None => positive_image_feasible_float(&reach.real),
    }
}
