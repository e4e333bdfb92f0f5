//! Sufficient herdability tests based on unisigned columns.
//!
//! Every test here looks only at the sign pattern of a controllability
//! matrix `R`. A positive outcome comes with an input certificate assembled
//! from an [`EliminationTrace`]: an ordered list of column groups, each
//! clearing a set of rows, such that the columns of a group vanish on the
//! rows cleared by every later group. That block upper-triangular shape lets
//! the certificate be built back to front, scaling each earlier group until
//! it dominates whatever later groups leave on its rows.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::matrix::{RealMatrix, SignClass};
use crate::oracle::{positive_image_feasible, verify_certificate, HerdabilityVerdict, Status};

/// Indices `i` with `|v_i| > ε` (0-based).
pub fn nonzero_pattern(v: &[f64]) -> Vec<usize> {
    v.iter()
        .enumerate()
        .filter(|(_, &x)| SignClass::of(x).is_nonzero())
        .map(|(i, _)| i)
        .collect()
}

/// Common sign of the nonzero entries of `v`. The zero vector and mixed
/// vectors have none.
pub fn is_unisigned(v: &[f64]) -> Option<SignClass> {
    unisigned_on(v, 0..v.len())
}

/// Like [`is_unisigned`] but restricted to the listed positions.
pub(crate) fn unisigned_on(v: &[f64], rows: impl IntoIterator<Item = usize>) -> Option<SignClass> {
    let mut sign = SignClass::Zero;
    for i in rows {
        let s = SignClass::of(v[i]);
        if s == SignClass::Zero {
            continue;
        }
        if sign == SignClass::Zero {
            sign = s;
        } else if sign != s {
            return None;
        }
    }
    sign.is_nonzero().then_some(sign)
}

/// Unisigned columns of a matrix and the rows they cover.
#[derive(Debug, Clone, PartialEq)]
pub struct UnisignAnalysis {
    /// Column indices `J` whose column is unisigned.
    pub columns: Vec<usize>,
    /// Rows `H` covered by the nonzero patterns of those columns.
    pub covered_rows: BTreeSet<usize>,
    /// Sign of each column in `J`, aligned with `columns`.
    pub signs: Vec<SignClass>,
}

impl UnisignAnalysis {
    pub fn of(r: &RealMatrix) -> Self {
        let mut columns = Vec::new();
        let mut signs = Vec::new();
        let mut covered_rows = BTreeSet::new();
        for j in 0..r.cols() {
            let col = r.col(j);
            if let Some(s) = is_unisigned(&col) {
                columns.push(j);
                signs.push(s);
                covered_rows.extend(nonzero_pattern(&col));
            }
        }
        Self { columns, covered_rows, signs }
    }

    pub fn contains_column(&self, j: usize) -> bool {
        self.columns.binary_search(&j).is_ok()
    }

    fn unisigned_block(&self) -> TraceBlock {
        TraceBlock {
            columns: self.columns.iter().copied().zip(self.signs.iter().copied()).collect(),
            rows: self.covered_rows.iter().copied().collect(),
        }
    }
}

/// One elimination step: signed columns and the rows they clear.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceBlock {
    pub columns: Vec<(usize, SignClass)>,
    pub rows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EliminationTrace {
    pub blocks: Vec<TraceBlock>,
}

impl EliminationTrace {
    /// Maps local row and column indices to a larger matrix.
    pub(crate) fn remapped(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self {
            blocks: self
                .blocks
                .iter()
                .map(|b| TraceBlock {
                    columns: b.columns.iter().map(|&(j, s)| (cols[j], s)).collect(),
                    rows: b.rows.iter().map(|&i| rows[i]).collect(),
                })
                .collect(),
        }
    }

    pub(crate) fn extend(&mut self, other: EliminationTrace) {
        self.blocks.extend(other.blocks);
    }
}

const MAX_GAIN: f64 = 1_152_921_504_606_846_976.0; // 2^60

/// Builds `u` with `R u >= 1` from a block upper-triangular trace.
///
/// The last block gets gain one; walking backwards, each block's gain starts
/// at one and doubles until every row it clears evaluates to at least one.
pub fn compose_block_certificates(r: &RealMatrix, trace: &EliminationTrace) -> Result<Vec<f64>> {
    let mut u = vec![0.0; r.cols()];
    let mut values = vec![0.0; r.rows()];
    for block in trace.blocks.iter().rev() {
        let base: Vec<f64> = block
            .rows
            .iter()
            .map(|&i| block.columns.iter().map(|&(j, s)| s.as_f64() * r.get(i, j)).sum())
            .collect();
        if let Some(pos) = base.iter().position(|&b| b <= 0.0) {
            return Err(Error::CertificateAssembly(format!(
                "block does not clear row {}",
                block.rows[pos]
            )));
        }
        let mut gain = 1.0;
        while block
            .rows
            .iter()
            .zip(&base)
            .any(|(&i, &b)| gain * b + values[i] < 1.0)
        {
            gain *= 2.0;
            if gain > MAX_GAIN {
                return Err(Error::CertificateAssembly("gain exceeded 2^60".into()));
            }
        }
        for &(j, s) in &block.columns {
            u[j] += gain * s.as_f64();
        }
        values = r.mul_vec(&u)?;
    }
    if !verify_certificate(r, &u)? {
        return Err(Error::CertificateAssembly("assembled vector fails verification".into()));
    }
    Ok(u)
}

/// Certificate from a trace, or the oracle's when assembly fails on a
/// numerically degenerate instance.
pub(crate) fn certify(r: &RealMatrix, trace: &EliminationTrace) -> HerdabilityVerdict {
    match compose_block_certificates(r, trace) {
        Ok(u) => HerdabilityVerdict::herdable(u),
        Err(_) => match positive_image_feasible(r) {
            Ok(v) if v.status == Status::Herdable => v,
            _ => HerdabilityVerdict::unknown(),
        },
    }
}

fn has_zero_row(r: &RealMatrix) -> bool {
    !r.zero_rows().is_empty()
}

/// Trace for the "at most one uncovered row" condition: no zero rows and the
/// unisigned columns cover at least `n - 1` rows.
pub(crate) fn lemma_a_trace(r: &RealMatrix) -> Option<EliminationTrace> {
    if has_zero_row(r) {
        return None;
    }
    let analysis = UnisignAnalysis::of(r);
    let uncovered: Vec<usize> = (0..r.rows()).filter(|i| !analysis.covered_rows.contains(i)).collect();
    let mut trace = EliminationTrace::default();
    if !analysis.columns.is_empty() {
        trace.blocks.push(analysis.unisigned_block());
    }
    match uncovered.as_slice() {
        [] => Some(trace),
        [row] => {
            let row = *row;
            let h = (0..r.cols()).find(|&j| {
                !analysis.contains_column(j) && SignClass::of(r.get(row, j)).is_nonzero()
            })?;
            trace.blocks.push(TraceBlock {
                columns: vec![(h, SignClass::of(r.get(row, h)))],
                rows: vec![row],
            });
            Some(trace)
        }
        _ => None,
    }
}

/// Trace for the "sign-uniform outside H" condition: every row outside the
/// covered set `H` has a non-unisigned column that is nonzero there and
/// sign-uniform on all rows outside `H`.
pub(crate) fn lemma_c_trace(r: &RealMatrix) -> Option<EliminationTrace> {
    if has_zero_row(r) {
        return None;
    }
    let analysis = UnisignAnalysis::of(r);
    let outside: Vec<usize> = (0..r.rows()).filter(|i| !analysis.covered_rows.contains(i)).collect();
    let mut trace = EliminationTrace::default();
    if !analysis.columns.is_empty() {
        trace.blocks.push(analysis.unisigned_block());
    }
    if outside.is_empty() {
        return Some(trace);
    }
    let mut chosen: Vec<(usize, SignClass)> = Vec::new();
    for &h in &outside {
        let col = (0..r.cols()).find_map(|j| {
            if analysis.contains_column(j) {
                return None;
            }
            let sign = SignClass::of(r.get(h, j));
            if !sign.is_nonzero() {
                return None;
            }
            let v = r.col(j);
            (unisigned_on(&v, outside.iter().copied()) == Some(sign)).then_some((j, sign))
        })?;
        if !chosen.iter().any(|&(j, _)| j == col.0) {
            chosen.push(col);
        }
    }
    chosen.sort_unstable();
    trace.blocks.push(TraceBlock { columns: chosen, rows: outside });
    Some(trace)
}

/// No zero rows and `|H| >= n - 1`.
pub fn lemma_a_check(r: &RealMatrix) -> HerdabilityVerdict {
    match lemma_a_trace(r) {
        Some(trace) => certify(r, &trace),
        None => HerdabilityVerdict::unknown(),
    }
}

/// No zero rows and every row outside `H` is reached by a column that is
/// sign-uniform on the rows outside `H`.
pub fn lemma_c_check(r: &RealMatrix) -> HerdabilityVerdict {
    match lemma_c_trace(r) {
        Some(trace) => certify(r, &trace),
        None => HerdabilityVerdict::unknown(),
    }
}

/// Greedy elimination: repeatedly take the lowest-index column that is
/// unisigned on the rows still active, deactivate its nonzero rows, and
/// restart the scan. Returns the trace when every row is cleared.
pub fn greedy_trace(r: &RealMatrix) -> Option<EliminationTrace> {
    let mut active: BTreeSet<usize> = (0..r.rows()).collect();
    let mut used = vec![false; r.cols()];
    let mut trace = EliminationTrace::default();
    while !active.is_empty() {
        let step = (0..r.cols()).filter(|&j| !used[j]).find_map(|j| {
            let col = r.col(j);
            let sign = unisigned_on(&col, active.iter().copied())?;
            let cleared: Vec<usize> = active
                .iter()
                .copied()
                .filter(|&i| SignClass::of(col[i]).is_nonzero())
                .collect();
            Some((j, sign, cleared))
        });
        let (j, sign, cleared) = step?;
        used[j] = true;
        for i in &cleared {
            active.remove(i);
        }
        trace.blocks.push(TraceBlock { columns: vec![(j, sign)], rows: cleared });
    }
    Some(trace)
}

pub fn greedy_check(r: &RealMatrix) -> HerdabilityVerdict {
    match greedy_trace(r) {
        Some(trace) => certify(r, &trace),
        None => HerdabilityVerdict::unknown(),
    }
}
