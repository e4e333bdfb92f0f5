//! Leader-follower networks: `B = [I_m; 0]`, leaders are the first `m`
//! nodes and followers are grouped into layers by their distance from the
//! leader set.
//!
//! The layered tests read the block `Φ_k` of `A^k B` on the rows of layer
//! `k`. Since a follower at distance `k` is not reached by shorter walks,
//! `A^j B` vanishes on layer `k` for `j < k`, which makes the per-layer
//! certificates compose.

use crate::error::{Error, Result};
use crate::exact::{reach_matrix, Arithmetic};
use crate::graph::{
    graph_from_matrix, is_strongly_connected, layer_decomposition, structural_balance_partition,
    LayerDecomposition,
};
use crate::matrix::{block_partition, permute, Permutation, RealMatrix, SignClass};
use crate::oracle::{HerdabilityVerdict, Status};
use crate::unisign::{
    certify, greedy_trace, lemma_a_trace, lemma_c_trace, EliminationTrace, TraceBlock,
};

/// A leader-follower system with nodes ordered leaders first, then layer
/// by layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LeaderFollowerSystem {
    a: RealMatrix,
    m: usize,
    layers: LayerDecomposition,
    permutation: Permutation,
}

impl LeaderFollowerSystem {
    /// State matrix in normalized order.
    pub fn a(&self) -> &RealMatrix {
        &self.a
    }

    pub fn leader_count(&self) -> usize {
        self.m
    }

    pub fn node_count(&self) -> usize {
        self.a.rows()
    }

    pub fn layers(&self) -> &LayerDecomposition {
        &self.layers
    }

    /// `permutation().apply(i)` is the caller's index of normalized node `i`.
    pub fn permutation(&self) -> &Permutation {
        &self.permutation
    }

    pub fn b(&self) -> RealMatrix {
        leader_input(self.node_count(), self.m)
    }

    /// Moves a state-space vector back to the caller's node order.
    pub fn to_original_order(&self, v: &[f64]) -> Vec<f64> {
        self.permutation.scatter(v)
    }
}

/// `[I_m; 0]` with `n` rows.
pub fn leader_input(n: usize, m: usize) -> RealMatrix {
    let mut b = RealMatrix::zeros(n, m);
    for i in 0..m.min(n) {
        b.set(i, i, 1.0);
    }
    b
}

fn check_partition(a: &RealMatrix, m: usize) -> Result<()> {
    if !a.is_square() || m == 0 || m >= a.rows() {
        return Err(Error::Partition { m, n: a.rows() });
    }
    Ok(())
}

/// Computes the layers seen from leaders `0..m` and reorders followers by
/// `(distance, index)` when they are not already contiguous by layer.
pub fn validate_assumption1(a: &RealMatrix, m: usize) -> Result<LeaderFollowerSystem> {
    check_partition(a, m)?;
    let g = graph_from_matrix(a, true)?;
    let leaders: Vec<usize> = (0..m).collect();
    let layers = layer_decomposition(&g, &leaders)?;
    let permutation = Permutation::new(layers.ordering())?;
    if permutation.is_identity() {
        return Ok(LeaderFollowerSystem { a: a.clone(), m, layers, permutation });
    }
    let a = permute(a, &permutation, &permutation)?;
    let mut next = m;
    let layers = LayerDecomposition {
        leaders,
        layers: layers
            .layers
            .iter()
            .map(|layer| {
                let ids: Vec<usize> = (next..next + layer.len()).collect();
                next += layer.len();
                ids
            })
            .collect(),
    };
    Ok(LeaderFollowerSystem { a, m, layers, permutation })
}

fn reach_k(s: &LeaderFollowerSystem, steps: usize) -> Result<RealMatrix> {
    Ok(reach_matrix(&s.a, &s.b(), steps, Arithmetic::Auto)?.real)
}

fn phi_blocks(s: &LeaderFollowerSystem, r: &RealMatrix) -> Result<Vec<RealMatrix>> {
    let m = s.m;
    s.layers
        .layers
        .iter()
        .enumerate()
        .map(|(idx, rows)| {
            let k = idx + 1;
            r.submatrix(rows, &(k * m..(k + 1) * m).collect::<Vec<_>>())
        })
        .collect()
}

/// `Φ_k` for `k = 1..K`: rows of layer `k` in `A^k B`.
///
/// A zero row can only arise from cancelling walks; it is reported as a
/// structure error.
pub fn layer_blocks(s: &LeaderFollowerSystem) -> Result<Vec<RealMatrix>> {
    let r = reach_k(s, s.layers.depth() + 1)?;
    let blocks = phi_blocks(s, &r)?;
    for (k, phi) in blocks.iter().enumerate() {
        if let Some(&row) = phi.zero_rows().first() {
            return Err(Error::Structure(format!(
                "layer {} block has a zero row at follower {}",
                k + 1,
                s.layers.layers[k][row]
            )));
        }
    }
    Ok(blocks)
}

fn leader_block(m: usize) -> TraceBlock {
    TraceBlock {
        columns: (0..m).map(|j| (j, SignClass::Positive)).collect(),
        rows: (0..m).collect(),
    }
}

fn pad(u: Vec<f64>, len: usize) -> Vec<f64> {
    let mut u = u;
    u.resize(len, 0.0);
    u
}

fn layered_check(
    s: &LeaderFollowerSystem,
    layer_trace: fn(&RealMatrix) -> Option<EliminationTrace>,
) -> Result<HerdabilityVerdict> {
    let depth = s.layers.depth();
    let m = s.m;
    let r = reach_k(s, depth + 1)?;
    let mut trace = EliminationTrace { blocks: vec![leader_block(m)] };
    for (idx, phi) in phi_blocks(s, &r)?.iter().enumerate() {
        let k = idx + 1;
        let cols: Vec<usize> = (k * m..(k + 1) * m).collect();
        match layer_trace(phi) {
            Some(t) => trace.extend(t.remapped(&s.layers.layers[idx], &cols)),
            None => return Ok(HerdabilityVerdict::unknown()),
        }
    }
    let mut verdict = certify(&r, &trace);
    verdict.certificate = verdict.certificate.map(|u| pad(u, s.node_count() * m));
    Ok(verdict)
}

/// Every layer block has no zero rows and its unisigned columns cover all
/// but at most one of its rows.
pub fn prop2_check(s: &LeaderFollowerSystem) -> Result<HerdabilityVerdict> {
    layered_check(s, lemma_a_trace)
}

/// Every layer block has no zero rows and each row left uncovered by its
/// unisigned columns is reached by a column that is sign-uniform on all
/// uncovered rows of that layer.
pub fn prop3_check(s: &LeaderFollowerSystem) -> Result<HerdabilityVerdict> {
    layered_check(s, lemma_c_trace)
}

/// `(A22, A21)`: herdability of `(A, [I_m; 0])` is equivalent to
/// herdability of this reduced pair.
pub fn reduce(a: &RealMatrix, m: usize) -> Result<(RealMatrix, RealMatrix)> {
    let p = block_partition(a, m)?;
    Ok((p.a22, p.a21))
}

fn certify_full(a: &RealMatrix, m: usize, trace: Option<EliminationTrace>) -> Result<HerdabilityVerdict> {
    let r = reach_matrix(a, &leader_input(a.rows(), m), a.rows(), Arithmetic::Auto)?.real;
    let trace = trace.or_else(|| greedy_trace(&r)).unwrap_or_default();
    let verdict = certify(&r, &trace);
    if verdict.status != Status::Herdable {
        return Err(Error::Structure("sufficient condition held but no certificate was found".into()));
    }
    Ok(verdict)
}

/// `G(A)` strongly connected and structurally balanced, with the class of
/// node 1 contained in the leader set.
pub fn corollary1_check(a: &RealMatrix, m: usize) -> Result<HerdabilityVerdict> {
    check_partition(a, m)?;
    let g = graph_from_matrix(a, true)?;
    if !is_strongly_connected(&g) {
        return Ok(HerdabilityVerdict::unknown());
    }
    match structural_balance_partition(&g) {
        Some((v1, _)) if !v1.is_empty() && v1.iter().all(|&v| v < m) => certify_full(a, m, None),
        _ => Ok(HerdabilityVerdict::unknown()),
    }
}

/// Every follower has a leader neighbour and each leader's arcs to
/// followers share one sign.
pub fn corollary2_check(a: &RealMatrix, m: usize) -> Result<HerdabilityVerdict> {
    check_partition(a, m)?;
    let (_, a21) = reduce(a, m)?;
    if !a21.zero_rows().is_empty() {
        return Ok(HerdabilityVerdict::unknown());
    }
    let mut columns = Vec::new();
    for j in 0..m {
        let col = a21.col(j);
        match crate::unisign::is_unisigned(&col) {
            Some(sign) => columns.push((m + j, sign)),
            None if col.iter().all(|&x| !SignClass::of(x).is_nonzero()) => {}
            None => return Ok(HerdabilityVerdict::unknown()),
        }
    }
    let trace = EliminationTrace {
        blocks: vec![leader_block(m), TraceBlock { columns, rows: (m..a.rows()).collect() }],
    };
    certify_full(a, m, Some(trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{herdable, verify_certificate};

    fn m(rows: &[&[f64]]) -> RealMatrix {
        RealMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn undirected(n: usize, edges: &[(usize, usize, f64)]) -> RealMatrix {
        let mut a = RealMatrix::zeros(n, n);
        for &(i, j, w) in edges {
            a.set(i, j, w);
            a.set(j, i, w);
        }
        a
    }

    fn assert_sound(s: &LeaderFollowerSystem, v: &HerdabilityVerdict) {
        assert_eq!(v.status, Status::Herdable);
        let r = reach_k(s, s.node_count()).unwrap();
        assert!(verify_certificate(&r, v.certificate.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn validate_path() {
        let s = validate_assumption1(&undirected(3, &[(0, 1, 1.0), (1, 2, 1.0)]), 1).unwrap();
        assert_eq!(s.layers().layers, vec![vec![1], vec![2]]);
        assert!(s.permutation().is_identity());
    }

    #[test]
    fn validate_reorders() {
        let a = undirected(3, &[(0, 2, 1.0), (2, 1, 1.0)]);
        let s = validate_assumption1(&a, 1).unwrap();
        assert_eq!(s.permutation().as_slice(), &[0, 2, 1]);
        assert_eq!(s.layers().layers, vec![vec![1], vec![2]]);
        assert_eq!(s.a().get(1, 0), 1.0);
        assert_eq!(s.to_original_order(&[1.0, 2.0, 3.0]), vec![1.0, 3.0, 2.0]);
    }

    #[test]
    fn validate_errors() {
        let a = undirected(3, &[(0, 1, 1.0)]);
        assert_eq!(validate_assumption1(&a, 1), Err(Error::Coverage { node: 2 }));
        assert!(matches!(validate_assumption1(&a, 3), Err(Error::Partition { .. })));
    }

    #[test]
    fn blocks() {
        let s = validate_assumption1(&undirected(3, &[(0, 1, 1.0), (1, 2, 1.0)]), 1).unwrap();
        assert_eq!(layer_blocks(&s).unwrap(), vec![m(&[&[1.0]]), m(&[&[1.0]])]);

        let s = validate_assumption1(&undirected(3, &[(0, 1, 2.0), (0, 2, -3.0)]), 1).unwrap();
        assert_eq!(layer_blocks(&s).unwrap(), vec![m(&[&[2.0], &[-3.0]])]);
    }

    #[test]
    fn cancelling_walks_are_a_structure_error() {
        // Two length-2 walks 0→1→3 and 0→2→3 with opposite products.
        let a = undirected(4, &[(0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0), (2, 3, -1.0)]);
        let s = validate_assumption1(&a, 1).unwrap();
        assert!(matches!(layer_blocks(&s), Err(Error::Structure(_))));
        assert_eq!(prop2_check(&s).unwrap().status, Status::Unknown);
    }

    #[test]
    fn prop2_examples() {
        let s = validate_assumption1(&undirected(3, &[(0, 1, 1.0), (1, 2, -1.0)]), 1).unwrap();
        assert_sound(&s, &prop2_check(&s).unwrap());

        // Two leaders, one layer with Φ_1 = [[1, −1], [−1, 1]].
        let a = m(&[
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[1.0, -1.0, 0.0, 0.0],
            &[-1.0, 1.0, 0.0, 0.0],
        ]);
        let s = validate_assumption1(&a, 2).unwrap();
        assert_eq!(prop2_check(&s).unwrap().status, Status::Unknown);
        assert_eq!(herdable(&a, &s.b()).unwrap().status, Status::NotHerdable);

        // Φ_1 = [[1, −1], [0, 1], [0, 1]]: H = {0}, m_1 = 3.
        let a = m(&[
            &[0.0, 0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0, 0.0],
            &[1.0, -1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0, 0.0],
        ]);
        let s = validate_assumption1(&a, 2).unwrap();
        assert_eq!(prop2_check(&s).unwrap().status, Status::Unknown);
        assert_sound(&s, &prop3_check(&s).unwrap());
    }

    #[test]
    fn prop3_examples() {
        let lf = |col: [f64; 3]| {
            let mut a = RealMatrix::zeros(5, 5);
            for (i, (&x, &y)) in [1.0, 0.0, 0.0].iter().zip(col.iter()).enumerate() {
                a.set(2 + i, 0, x);
                a.set(2 + i, 1, y);
            }
            validate_assumption1(&a, 2).unwrap()
        };
        let s = lf([3.0, -2.0, -7.0]);
        assert_sound(&s, &prop3_check(&s).unwrap());
        let s = lf([3.0, -2.0, 7.0]);
        assert_eq!(prop3_check(&s).unwrap().status, Status::Unknown);
    }

    #[test]
    fn certificates_match_across_orderings() {
        let a = undirected(4, &[(0, 3, 1.0), (3, 1, -1.0), (3, 2, -2.0)]);
        let s = validate_assumption1(&a, 1).unwrap();
        assert!(!s.permutation().is_identity());
        let v = prop3_check(&s).unwrap();
        assert_sound(&s, &v);
        let r = reach_matrix(&a, &leader_input(4, 1), 4, Arithmetic::Auto).unwrap().real;
        assert!(verify_certificate(&r, v.certificate.as_ref().unwrap()).unwrap());
    }

    #[test]
    fn reduce_blocks() {
        let (a22, a21) = reduce(&m(&[&[0.0, 1.0], &[1.0, 0.0]]), 1).unwrap();
        assert_eq!(a22, m(&[&[0.0]]));
        assert_eq!(a21, m(&[&[1.0]]));

        let (a22, a21) = reduce(&undirected(3, &[(0, 1, 1.0), (1, 2, 1.0)]), 1).unwrap();
        assert_eq!(a22, m(&[&[0.0, 1.0], &[1.0, 0.0]]));
        assert_eq!(a21, m(&[&[1.0], &[0.0]]));

        let (a22, _) = reduce(&RealMatrix::zeros(3, 3), 2).unwrap();
        assert_eq!(a22.rows(), 1);
        assert!(matches!(reduce(&RealMatrix::zeros(3, 3), 0), Err(Error::Partition { .. })));
    }

    #[test]
    fn corollary1() {
        let a = m(&[&[0.0, -1.0], &[-1.0, 0.0]]);
        let v = corollary1_check(&a, 1).unwrap();
        assert_eq!(v.status, Status::Herdable);
        let r = reach_matrix(&a, &leader_input(2, 1), 2, Arithmetic::Auto).unwrap().real;
        assert!(verify_certificate(&r, v.certificate.as_ref().unwrap()).unwrap());

        let a = m(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert_eq!(corollary1_check(&a, 1).unwrap().status, Status::Unknown);
        assert_eq!(herdable(&a, &leader_input(2, 1)).unwrap().status, Status::Herdable);

        let a = m(&[&[0.0, 0.0], &[-1.0, 0.0]]);
        assert_eq!(corollary1_check(&a, 1).unwrap().status, Status::Unknown);
    }

    #[test]
    fn corollary2() {
        let mut a = RealMatrix::zeros(5, 5);
        for (i, row) in [[1.0, 0.0], [2.0, 0.0], [0.0, -1.0]].iter().enumerate() {
            a.set(2 + i, 0, row[0]);
            a.set(2 + i, 1, row[1]);
        }
        let v = corollary2_check(&a, 2).unwrap();
        assert_eq!(v.status, Status::Herdable);
        let r = reach_matrix(&a, &leader_input(5, 2), 5, Arithmetic::Auto).unwrap().real;
        assert!(verify_certificate(&r, v.certificate.as_ref().unwrap()).unwrap());

        a.set(4, 1, 0.0);
        assert_eq!(corollary2_check(&a, 2).unwrap().status, Status::Unknown);

        let a = m(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[-1.0, 0.0, 0.0]]);
        assert_eq!(corollary2_check(&a, 1).unwrap().status, Status::Unknown);
    }
}
