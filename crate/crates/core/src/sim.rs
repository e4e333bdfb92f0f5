//! Discrete-time herding: `x(t+1) = A x(t) + B u(t)`.
//!
//! After `n` steps, `x(n) = Aⁿ x(0) + R ū` where block `k` of `ū` is the
//! input applied at time `n − 1 − k`. A certificate `u` with `R u >= 1`
//! therefore yields inputs reaching any threshold once it is scaled.

use crate::error::{Error, Result};
use crate::exact::{reach_matrix, Arithmetic};
use crate::matrix::{check_pair, RealMatrix};
use crate::oracle::{herdable, Status};

#[derive(Debug, Clone, PartialEq)]
pub struct HerdingPlan {
    /// Number of steps `t_f`.
    pub horizon: usize,
    /// `u(0), …, u(t_f − 1)`.
    pub inputs: Vec<Vec<f64>>,
    pub threshold: f64,
    /// Simulated `x(t_f)`.
    pub final_state: Vec<f64>,
    /// Multiplier applied to the certificate.
    pub scale: f64,
}

/// States `x(0), …, x(t_f)` under the given inputs.
pub fn simulate(a: &RealMatrix, b: &RealMatrix, x0: &[f64], inputs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    check_pair(a, b)?;
    if x0.len() != a.rows() {
        return Err(Error::Dimension(format!("initial state has length {}, expected {}", x0.len(), a.rows())));
    }
    let mut trajectory = Vec::with_capacity(inputs.len() + 1);
    trajectory.push(x0.to_vec());
    for (t, u) in inputs.iter().enumerate() {
        if u.len() != b.cols() {
            return Err(Error::Dimension(format!("input {t} has length {}, expected {}", u.len(), b.cols())));
        }
        let x = trajectory.last().expect("nonempty");
        let next: Vec<f64> = a.mul_vec(x)?.iter().zip(b.mul_vec(u)?).map(|(p, q)| p + q).collect();
        trajectory.push(next);
    }
    Ok(trajectory)
}

fn inputs_for(u: &[f64], scale: f64, n: usize, m: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|t| {
            let k = n - 1 - t;
            u[k * m..(k + 1) * m].iter().map(|&x| scale * x).collect()
        })
        .collect()
}

fn check_finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric(format!("non-finite {what}")))
    }
}

const MAX_CORRECTIONS: usize = 64;

/// Inputs over `n` steps driving `x0` to at least `h` in every component.
pub fn synthesize_plan(a: &RealMatrix, b: &RealMatrix, x0: &[f64], h: f64) -> Result<HerdingPlan> {
    check_pair(a, b)?;
    let n = a.rows();
    let m = b.cols();
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::Argument(format!("threshold must be positive, got {h}")));
    }
    if x0.len() != n {
        return Err(Error::Dimension(format!("initial state has length {}, expected {n}", x0.len())));
    }
    check_finite(x0, "initial state")?;
    let verdict = herdable(a, b)?;
    if verdict.status != Status::Herdable {
        return Err(Error::NotHerdable);
    }
    let u = verdict.certificate.expect("herdable verdicts carry a certificate");
    let r = reach_matrix(a, b, n, Arithmetic::Auto)?.real;
    let ru = r.mul_vec(&u)?;
    let mut free = x0.to_vec();
    for _ in 0..n {
        free = a.mul_vec(&free)?;
    }
    check_finite(&free, "free response")?;

    let mut scale = free
        .iter()
        .zip(&ru)
        .map(|(&f, &g)| (h - f) / g)
        .fold(0.0_f64, f64::max);
    for _ in 0..MAX_CORRECTIONS {
        if !scale.is_finite() {
            break;
        }
        let inputs = inputs_for(&u, scale, n, m);
        let final_state = simulate(a, b, x0, &inputs)?.pop().expect("nonempty");
        check_finite(&final_state, "final state")?;
        let shortfall = final_state
            .iter()
            .zip(&ru)
            .map(|(&x, &g)| (h - x) / g)
            .fold(0.0_f64, f64::max);
        if final_state.iter().all(|&x| x >= h) {
            return Ok(HerdingPlan { horizon: n, inputs, threshold: h, final_state, scale });
        }
        scale += shortfall.max(scale.abs() * f64::EPSILON * 4.0).max(f64::MIN_POSITIVE);
    }
    Err(Error::Numeric("could not reach the threshold in floating point".into()))
}
