//! Single-leader undirected trees and diagonal pairs.
//!
//! On a tree every follower is reached from the leader along a unique path,
//! so the layer blocks of the controllability matrix are signed products of
//! edge weights. Depth-one and depth-two trees admit exact sign conditions;
//! deeper trees get the layer-uniform sufficient test.

use crate::error::{Error, Result};
use crate::graph::{graph_from_matrix, layer_decomposition, out_neighborhoods, LayerDecomposition, SignedGraph};
use crate::leader::{prop2_check, validate_assumption1};
use crate::matrix::{controllability_matrix, permute, Permutation, RealMatrix, SignClass};
use crate::oracle::{herdable, positive_image_feasible, verify_certificate, HerdabilityVerdict, Status};
use crate::par;
use crate::tol::approx_eq;

#[derive(Debug, Clone, PartialEq)]
pub struct TreeSystem {
    a: RealMatrix,
    leader: usize,
    layers: LayerDecomposition,
    permutation: Permutation,
    normalized: RealMatrix,
}

impl TreeSystem {
    pub fn a(&self) -> &RealMatrix {
        &self.a
    }

    pub fn leader(&self) -> usize {
        self.leader
    }

    /// Layers in the caller's node indices.
    pub fn layers(&self) -> &LayerDecomposition {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.depth()
    }

    pub fn node_count(&self) -> usize {
        self.a.rows()
    }

    pub fn b(&self) -> RealMatrix {
        RealMatrix::basis(self.node_count(), self.leader)
    }

    /// Maps normalized indices (leader first, then by distance and index)
    /// to the caller's indices.
    pub fn permutation(&self) -> &Permutation {
        &self.permutation
    }

    /// State matrix in normalized order.
    pub fn normalized(&self) -> &RealMatrix {
        &self.normalized
    }

    /// `(parent, child, weight)` for every edge, grouped by the layer of the
    /// parent (layer 0 is the leader).
    fn layer_edges(&self) -> Vec<Vec<(usize, usize, f64)>> {
        let mut levels = vec![self.layers.leaders.clone()];
        levels.extend(self.layers.layers.iter().cloned());
        levels
            .windows(2)
            .map(|w| {
                w[1].iter()
                    .map(|&child| {
                        let parent = *w[0]
                            .iter()
                            .find(|&&p| SignClass::of(self.a.get(child, p)).is_nonzero())
                            .expect("every follower has a parent in the previous layer");
                        (parent, child, self.a.get(child, parent))
                    })
                    .collect()
            })
            .collect()
    }
}

/// Checks that `A` is the weighted adjacency matrix of a tree and computes
/// its layers from `leader`.
pub fn validate_tree(a: &RealMatrix, leader: usize) -> Result<TreeSystem> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("adjacency matrix is {}x{}", a.rows(), a.cols())));
    }
    let n = a.rows();
    if leader >= n {
        return Err(Error::Argument(format!("leader {leader} out of range for {n} nodes")));
    }
    let g = graph_from_matrix(a, false)?;
    if g.edges().iter().any(|e| e.from == e.to) {
        return Err(Error::NotATree("nonzero diagonal entry".into()));
    }
    if g.edges().len() != n - 1 {
        return Err(Error::NotATree(format!("{} edges for {} nodes", g.edges().len(), n)));
    }
    let layers = match layer_decomposition(&g, &[leader]) {
        Ok(l) => l,
        Err(Error::Coverage { .. }) => return Err(Error::NotATree("graph is disconnected".into())),
        Err(e) => return Err(e),
    };
    let permutation = Permutation::new(layers.ordering())?;
    let normalized = permute(a, &permutation, &permutation)?;
    Ok(TreeSystem { a: a.clone(), leader, layers, permutation, normalized })
}

fn sign_uniform(weights: impl IntoIterator<Item = f64>) -> bool {
    let mut seen = SignClass::Zero;
    for w in weights {
        let s = SignClass::of(w);
        if seen == SignClass::Zero {
            seen = s;
        } else if s != seen {
            return false;
        }
    }
    true
}

/// For every `k`, the edges from layer `k` to layer `k + 1` share one sign.
pub fn prop5_check(t: &TreeSystem) -> Result<HerdabilityVerdict> {
    if !t.layer_edges().iter().all(|edges| sign_uniform(edges.iter().map(|e| e.2))) {
        return Ok(HerdabilityVerdict::unknown());
    }
    if t.node_count() == 1 {
        return Ok(HerdabilityVerdict::herdable(vec![1.0]));
    }
    let s = validate_assumption1(t.normalized(), 1)?;
    prop2_check(&s)
}

fn expands_uniformly(g: &SignedGraph, leader: usize) -> Result<bool> {
    let n = g.node_count();
    let mut visited = vec![false; n];
    visited[leader] = true;
    let mut count = 1;
    let mut frontier = vec![leader];
    while count < n {
        let mut out = out_neighborhoods(g, &frontier)?;
        out.out.retain(|&v| !visited[v]);
        out.out_pos.retain(|&v| !visited[v]);
        out.out_neg.retain(|&v| !visited[v]);
        if !out.is_sign_uniform() {
            return Ok(false);
        }
        frontier = out.out.into_iter().collect();
        for &v in &frontier {
            visited[v] = true;
        }
        count += frontier.len();
    }
    Ok(true)
}

/// The lowest-index node from which every frontier expansion is
/// sign-uniform, with the resulting certificate.
pub fn select_leader(a: &RealMatrix) -> Result<Option<(usize, HerdabilityVerdict)>> {
    validate_tree(a, 0)?;
    let g = graph_from_matrix(a, false)?;
    let found = par::find_first(a.rows(), |i| match expands_uniformly(&g, i) {
        Ok(true) => Some(()),
        _ => None,
    });
    let Some((leader, ())) = found else {
        return Ok(None);
    };
    let verdict = prop5_check(&validate_tree(a, leader)?)?;
    if verdict.status != Status::Herdable {
        return Err(Error::Structure(format!("leader {leader} passed selection but not the layer test")));
    }
    Ok(Some((leader, verdict)))
}

fn oracle_verdict(t: &TreeSystem) -> Result<HerdabilityVerdict> {
    herdable(t.a(), &t.b())
}

fn confirm(t: &TreeSystem, expected: Status) -> Result<HerdabilityVerdict> {
    let verdict = oracle_verdict(t)?;
    if verdict.status != expected {
        return Err(Error::Structure(format!(
            "sign conditions give {} but the oracle gives {}",
            expected.as_str(),
            verdict.status.as_str()
        )));
    }
    Ok(verdict)
}

/// Depth-one trees: herdable iff all edges share one sign.
pub fn prop6_check(t: &TreeSystem) -> Result<HerdabilityVerdict> {
    if t.depth() != 1 {
        return Err(Error::Depth { depth: t.depth(), expected: "1" });
    }
    if sign_uniform(t.layer_edges()[0].iter().map(|e| e.2)) {
        let verdict = prop5_check(t)?;
        if verdict.is_herdable() {
            return Ok(verdict);
        }
        return confirm(t, Status::Herdable);
    }
    confirm(t, Status::NotHerdable)
}

/// Outcome of the depth-two test, with the first failing pair of
/// first-layer nodes (caller indices, `i == j` for a single node).
#[derive(Debug, Clone, PartialEq)]
pub struct Prop7Report {
    pub verdict: HerdabilityVerdict,
    pub violation: Option<(usize, usize)>,
}

/// Depth-two trees. For first-layer nodes `i`, `j` whose children carry the
/// same sum of squared weights, the leader edges to `i` and `j` must share a
/// sign and the child edges of `i` and `j` together must be sign-uniform.
pub fn prop7_report(t: &TreeSystem) -> Result<Prop7Report> {
    match t.depth() {
        0 => {
            return Ok(Prop7Report { verdict: HerdabilityVerdict::herdable(vec![1.0]), violation: None });
        }
        1 => return Ok(Prop7Report { verdict: prop6_check(t)?, violation: None }),
        2 => {}
        depth => return Err(Error::Depth { depth, expected: "at most 2" }),
    }
    let edges = t.layer_edges();
    let first: Vec<(usize, f64)> = edges[0].iter().map(|&(_, child, w)| (child, w)).collect();
    let children = |i: usize| edges[1].iter().filter(move |e| e.0 == i).map(|e| e.2);
    let lambda: Vec<f64> = first.iter().map(|&(i, _)| children(i).map(|w| w * w).sum()).collect();

    let mut violation = first.iter().find(|&&(i, _)| !sign_uniform(children(i))).map(|&(i, _)| (i, i));
    if violation.is_none() {
        'pairs: for p in 0..first.len() {
            for q in p + 1..first.len() {
                if !approx_eq(lambda[p], lambda[q]) {
                    continue;
                }
                let (i, gi) = first[p];
                let (j, gj) = first[q];
                if gi * gj <= 0.0 || !sign_uniform(children(i).chain(children(j))) {
                    violation = Some((i, j));
                    break 'pairs;
                }
            }
        }
    }
    let expected = if violation.is_some() { Status::NotHerdable } else { Status::Herdable };
    Ok(Prop7Report { verdict: confirm(t, expected)?, violation })
}

pub fn prop7_check(t: &TreeSystem) -> Result<HerdabilityVerdict> {
    Ok(prop7_report(t)?.verdict)
}

/// The pair `(diag(λ), Γ)` with `Γ` free of zero entries.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalPair {
    pub lambda: Vec<f64>,
    pub gamma: Vec<f64>,
}

impl DiagonalPair {
    pub fn new(lambda: Vec<f64>, gamma: Vec<f64>) -> Result<Self> {
        if lambda.len() != gamma.len() || lambda.is_empty() {
            return Err(Error::Dimension("λ and Γ must have the same nonzero length".into()));
        }
        if let Some(index) = gamma.iter().position(|&g| !SignClass::of(g).is_nonzero()) {
            return Err(Error::ZeroGamma { index });
        }
        Ok(Self { lambda, gamma })
    }

    pub fn a(&self) -> RealMatrix {
        let n = self.lambda.len();
        let mut a = RealMatrix::zeros(n, n);
        for (i, &l) in self.lambda.iter().enumerate() {
            a.set(i, i, l);
        }
        a
    }

    pub fn b(&self) -> RealMatrix {
        RealMatrix::column(&self.gamma).expect("nonempty")
    }

    pub fn controllability(&self) -> Result<RealMatrix> {
        controllability_matrix(&self.a(), &self.b(), self.lambda.len())
    }
}

/// Coefficients `c` of the polynomial of degree `< xs.len()` through the
/// points `(xs[k], ys[k])`, lowest degree first.
fn interpolate(xs: &[f64], ys: &[f64]) -> Vec<f64> {
    let s = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..s {
        for k in (level..s).rev() {
            dd[k] = (dd[k] - dd[k - 1]) / (xs[k] - xs[k - level]);
        }
    }
    let mut coeffs = vec![0.0; s];
    for k in (0..s).rev() {
        // coeffs ← coeffs·(x − xs[k]) + dd[k]
        let mut next = vec![0.0; s];
        for d in 0..s {
            if d + 1 < s {
                next[d + 1] += coeffs[d];
            }
            next[d] -= xs[k] * coeffs[d];
        }
        next[0] += dd[k];
        coeffs = next;
    }
    coeffs
}

/// Herdable iff nodes with equal `λ` carry same-signed `Γ` entries.
pub fn diagonal_pair_herdable(p: &DiagonalPair) -> Result<HerdabilityVerdict> {
    if let Some(index) = p.gamma.iter().position(|&g| !SignClass::of(g).is_nonzero()) {
        return Err(Error::ZeroGamma { index });
    }
    let n = p.lambda.len();
    for i in 0..n {
        for j in i + 1..n {
            if approx_eq(p.lambda[i], p.lambda[j]) && p.gamma[i] * p.gamma[j] < 0.0 {
                let mut w = vec![0.0; n];
                w[i] = p.gamma[j];
                w[j] = -p.gamma[i];
                if w[i] < 0.0 {
                    w[i] = -w[i];
                    w[j] = -w[j];
                }
                return Ok(HerdabilityVerdict::not_herdable(w));
            }
        }
    }
    let mut xs: Vec<f64> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for (&l, &g) in p.lambda.iter().zip(&p.gamma) {
        if !xs.iter().any(|&x| approx_eq(x, l)) {
            xs.push(l);
            ys.push(g.signum());
        }
    }
    let min_gamma = p.gamma.iter().map(|g| g.abs()).fold(f64::INFINITY, f64::min);
    let mut u: Vec<f64> = interpolate(&xs, &ys).into_iter().map(|c| c / min_gamma).collect();
    u.resize(n, 0.0);
    let r = p.controllability()?;
    if u.iter().all(|x| x.is_finite()) && verify_certificate(&r, &u)? {
        return Ok(HerdabilityVerdict::herdable(u));
    }
    let verdict = positive_image_feasible(&r)?;
    if verdict.status != Status::Herdable {
        return Err(Error::Structure("equal-eigenvalue condition held but the oracle disagrees".into()));
    }
    Ok(verdict)
}
