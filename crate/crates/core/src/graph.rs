//! Signed graphs induced by state matrices.
//!
//! A nonzero `A[i][j]` is an arc from `j` to `i`, so that entry `(i, l)` of
//! `A^k B` sums the weights of length-`k` walks from input node `l` to `i`.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};
use crate::matrix::{RealMatrix, SignClass};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

/// Undirected graphs store each edge once with `from <= to`; adjacency lists
/// contain both directions.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedGraph {
    n: usize,
    directed: bool,
    edges: Vec<Edge>,
    out: Vec<Vec<(usize, f64)>>,
}

impl SignedGraph {
    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Successors of `v` with the connecting weight, in ascending order.
    pub fn successors(&self, v: usize) -> &[(usize, f64)] {
        &self.out[v]
    }

    fn check_nodes(&self, nodes: &[usize]) -> Result<()> {
        match nodes.iter().find(|&&v| v >= self.n) {
            Some(v) => Err(Error::Argument(format!("node {v} out of range for {} nodes", self.n))),
            None => Ok(()),
        }
    }
}

pub fn graph_from_matrix(a: &RealMatrix, directed: bool) -> Result<SignedGraph> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("adjacency matrix is {}x{}", a.rows(), a.cols())));
    }
    if !directed {
        if let Some((row, col)) = a.symmetry_violation() {
            return Err(Error::Symmetry { row, col });
        }
    }
    let n = a.rows();
    let mut edges = Vec::new();
    let mut out = vec![Vec::new(); n];
    for (j, succ) in out.iter_mut().enumerate() {
        for i in 0..n {
            let w = a.get(i, j);
            if !SignClass::of(w).is_nonzero() {
                continue;
            }
            succ.push((i, w));
            if directed || j <= i {
                edges.push(Edge { from: j, to: i, weight: w });
            }
        }
    }
    Ok(SignedGraph { n, directed, edges, out })
}

/// Multi-source hop distances; `None` marks unreachable nodes.
pub fn distances_from_set(g: &SignedGraph, sources: &[usize]) -> Result<Vec<Option<usize>>> {
    if sources.is_empty() {
        return Err(Error::Argument("source set is empty".into()));
    }
    g.check_nodes(sources)?;
    let mut dist = vec![None; g.n];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s].is_none() {
            dist[s] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = dist[v].expect("queued nodes have a distance");
        for &(w, _) in &g.out[v] {
            if dist[w].is_none() {
                dist[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    Ok(dist)
}

/// Leaders and the follower layers `F_k = { j : d(L, j) = k }`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerDecomposition {
    pub leaders: Vec<usize>,
    pub layers: Vec<Vec<usize>>,
}

impl LayerDecomposition {
    /// Number of follower layers `K`.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        self.layers.iter().map(Vec::len).collect()
    }

    /// Leaders first, then each layer in order.
    pub fn ordering(&self) -> Vec<usize> {
        self.leaders.iter().chain(self.layers.iter().flatten()).copied().collect()
    }
}

/// Errors with [`Error::Coverage`] if some node is unreachable from `leaders`.
pub fn layer_decomposition(g: &SignedGraph, leaders: &[usize]) -> Result<LayerDecomposition> {
    let dist = distances_from_set(g, leaders)?;
    if let Some(node) = dist.iter().position(Option::is_none) {
        return Err(Error::Coverage { node });
    }
    let depth = dist.iter().flatten().copied().max().unwrap_or(0);
    let mut layers = vec![Vec::new(); depth];
    for (v, d) in dist.iter().enumerate() {
        let d = d.expect("checked above");
        if d > 0 {
            layers[d - 1].push(v);
        }
    }
    let mut leaders: Vec<usize> = leaders.to_vec();
    leaders.sort_unstable();
    leaders.dedup();
    Ok(LayerDecomposition { leaders, layers })
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OutNeighborhoods {
    pub out: BTreeSet<usize>,
    pub out_pos: BTreeSet<usize>,
    pub out_neg: BTreeSet<usize>,
}

impl OutNeighborhoods {
    /// Nonempty and reached through arcs of a single sign.
    pub fn is_sign_uniform(&self) -> bool {
        !self.out.is_empty() && (self.out_pos == self.out || self.out_neg == self.out)
    }
}

/// Nodes outside `set` reached by one arc from `set`, split by arc sign.
pub fn out_neighborhoods(g: &SignedGraph, set: &[usize]) -> Result<OutNeighborhoods> {
    g.check_nodes(set)?;
    let inside: BTreeSet<usize> = set.iter().copied().collect();
    let mut result = OutNeighborhoods::default();
    for &v in &inside {
        for &(w, weight) in &g.out[v] {
            if inside.contains(&w) {
                continue;
            }
            result.out.insert(w);
            if weight > 0.0 {
                result.out_pos.insert(w);
            } else {
                result.out_neg.insert(w);
            }
        }
    }
    Ok(result)
}

/// Strongly connected components (Tarjan, iterative). Components are listed
/// in reverse topological order of the condensation.
pub fn strongly_connected_components(g: &SignedGraph) -> Vec<Vec<usize>> {
    const UNSEEN: usize = usize::MAX;
    let n = g.n;
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut components = Vec::new();
    let mut counter = 0;

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut next)) = call.last_mut() {
            if let Some(&(w, _)) = g.out[v].get(*next) {
                *next += 1;
                if index[w] == UNSEEN {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("component root is on the stack");
                    on_stack[w] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                components.push(comp);
            }
        }
    }
    components
}

pub fn is_strongly_connected(g: &SignedGraph) -> bool {
    g.n > 0 && strongly_connected_components(g).len() == 1
}

/// A two-class partition with nonnegative weights inside classes and
/// nonpositive weights across, or `None` when no such partition exists.
///
/// Arc directions are ignored. In every weakly connected component the
/// lowest-index node is placed in `V1`.
pub fn structural_balance_partition(g: &SignedGraph) -> Option<(Vec<usize>, Vec<usize>)> {
    let n = g.n;
    let mut neighbors: Vec<Vec<(usize, bool)>> = vec![Vec::new(); n];
    for v in 0..n {
        for &(w, weight) in &g.out[v] {
            if v == w {
                if weight < 0.0 {
                    return None;
                }
                continue;
            }
            neighbors[v].push((w, weight < 0.0));
            neighbors[w].push((v, weight < 0.0));
        }
    }
    let mut side: Vec<Option<bool>> = vec![None; n];
    for root in 0..n {
        if side[root].is_some() {
            continue;
        }
        side[root] = Some(false);
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            let sv = side[v].expect("queued nodes are colored");
            for &(w, negative) in &neighbors[v] {
                let want = sv ^ negative;
                match side[w] {
                    None => {
                        side[w] = Some(want);
                        queue.push_back(w);
                    }
                    Some(s) if s != want => return None,
                    Some(_) => {}
                }
            }
        }
    }
    let (v2, v1): (Vec<usize>, Vec<usize>) = (0..n).partition(|&v| side[v] == Some(true));
    Some((v1, v2))
}
