//! Phase-one simplex for the system `M u >= 1`, `u` free.
//!
//! The program solved is
//!
//! ```text
//! minimize   Σ s_i
//! subject to M u⁺ − M u⁻ − t + s = 1,   u⁺, u⁻, t, s >= 0
//! ```
//!
//! with the artificial variables `s` as the starting basis. The system is
//! feasible iff the optimum is zero, in which case `u = u⁺ − u⁻` is a
//! certificate. Otherwise the optimal dual `y` satisfies `y >= 0`,
//! `yᵀM = 0` and `1ᵀy > 0`, a Farkas witness of infeasibility. The dual
//! component `y_i` is read off as the reduced cost of the surplus column
//! `t_i`. Pivoting follows Bland's rule.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub(crate) trait LpScalar: Clone + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_pos(&self) -> bool;
    fn is_neg(&self) -> bool;
    fn lt(&self, other: &Self) -> bool;
    fn is_exact_zero(&self) -> bool;
    /// Whether an optimal phase-one objective counts as zero.
    fn objective_is_zero(&self) -> bool;
}

const PIVOT_TOL: f64 = 1e-11;
const FEASIBILITY_TOL: f64 = 1e-8;

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_pos(&self) -> bool {
        *self > PIVOT_TOL
    }
    fn is_neg(&self) -> bool {
        *self < -PIVOT_TOL
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
    fn is_exact_zero(&self) -> bool {
        *self == 0.0
    }
    fn objective_is_zero(&self) -> bool {
        self.abs() <= FEASIBILITY_TOL
    }
}

impl LpScalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_pos(&self) -> bool {
        self.is_positive()
    }
    fn is_neg(&self) -> bool {
        self.is_negative()
    }
    fn lt(&self, o: &Self) -> bool {
        self < o
    }
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }
    fn objective_is_zero(&self) -> bool {
        self.is_zero()
    }
}

#[derive(Debug, Clone)]
pub(crate) enum PhaseOne<T> {
    Feasible { u: Vec<T> },
    Infeasible { y: Vec<T> },
}

/// Solves the phase-one program for the `rows × cols` matrix given row-major.
pub(crate) fn phase_one<T: LpScalar>(rows: usize, cols: usize, m: &[T]) -> PhaseOne<T> {
    debug_assert_eq!(m.len(), rows * cols);
    // Column layout: u⁺ (cols), u⁻ (cols), t (rows), s (rows).
    let n_vars = 2 * cols + 2 * rows;
    let t_off = 2 * cols;
    let s_off = 2 * cols + rows;

    let mut tab: Vec<Vec<T>> = (0..rows)
        .map(|i| {
            let mut row = vec![T::zero(); n_vars + 1];
            for j in 0..cols {
                let v = m[i * cols + j].clone();
                row[cols + j] = v.neg();
                row[j] = v;
            }
            row[t_off + i] = T::one().neg();
            row[s_off + i] = T::one();
            row[n_vars] = T::one();
            row
        })
        .collect();
    let mut basis: Vec<usize> = (0..rows).map(|i| s_off + i).collect();

    // Reduced costs d_j = c_j − 1ᵀ(column j) for the artificial starting basis.
    let mut cost = vec![T::zero(); n_vars + 1];
    for (j, c) in cost.iter_mut().enumerate() {
        let col_sum = tab.iter().fold(T::zero(), |acc, row| acc.add(&row[j]));
        let c_j = if (s_off..s_off + rows).contains(&j) { T::one() } else { T::zero() };
        *c = if j == n_vars { col_sum.neg() } else { c_j.sub(&col_sum) };
    }

    while let Some(enter) = (0..n_vars).find(|&j| cost[j].is_neg()) {
        let mut leave: Option<(usize, T)> = None;
        for (i, row) in tab.iter().enumerate() {
            if !row[enter].is_pos() {
                continue;
            }
            let ratio = row[n_vars].div(&row[enter]);
            leave = match leave {
                None => Some((i, ratio)),
                Some((li, lr)) => {
                    if ratio.lt(&lr) || (!lr.lt(&ratio) && basis[i] < basis[li]) {
                        Some((i, ratio))
                    } else {
                        Some((li, lr))
                    }
                }
            };
        }
        // Phase one is bounded below by zero, so an entering column always
        // has a positive entry.
        let (pr, _) = leave.expect("phase-one program is bounded");
        pivot(&mut tab, &mut cost, pr, enter);
        basis[pr] = enter;
    }

    let objective = cost[n_vars].neg();
    if objective.objective_is_zero() {
        let mut u = vec![T::zero(); cols];
        for (i, &bv) in basis.iter().enumerate() {
            if bv < cols {
                u[bv] = u[bv].add(&tab[i][n_vars]);
            } else if bv < 2 * cols {
                u[bv - cols] = u[bv - cols].sub(&tab[i][n_vars]);
            }
        }
        PhaseOne::Feasible { u }
    } else {
        let y = (0..rows).map(|i| cost[t_off + i].clone()).collect();
        PhaseOne::Infeasible { y }
    }
}

fn pivot<T: LpScalar>(tab: &mut [Vec<T>], cost: &mut [T], pr: usize, pc: usize) {
    let p = tab[pr][pc].clone();
    for v in tab[pr].iter_mut() {
        *v = v.div(&p);
    }
    let pivot_row = tab[pr].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == pr {
            continue;
        }
        let f = row[pc].clone();
        if f.is_exact_zero() {
            continue;
        }
        for (v, pv) in row.iter_mut().zip(&pivot_row) {
            *v = v.sub(&f.mul(pv));
        }
        row[pc] = T::zero();
    }
    let f = cost[pc].clone();
    for (v, pv) in cost.iter_mut().zip(&pivot_row) {
        *v = v.sub(&f.mul(pv));
    }
    cost[pc] = T::zero();
}

#[cfg(test)]
fn to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

pub(crate) fn int_to_rational(x: &BigInt) -> BigRational {
    BigRational::from_integer(x.clone())
}
