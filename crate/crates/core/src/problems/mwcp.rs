//! Maximum weight clique.

use serde::{Deserialize, Serialize};

use super::{Problem, ProblemKind};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

pub const FEATURE_NAMES: [&str; 4] = ["weight", "degree", "upper_bound", "density"];

/// Undirected vertex-weighted graph with sorted adjacency lists and a dense
/// adjacency bit matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
    bits: Vec<u64>,
    words: usize,
    weights: Vec<f64>,
    num_edges: usize,
}

/// Vertex set of a clique, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Clique(pub Vec<usize>);

impl Clique {
    pub fn new(mut vertices: Vec<usize>) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        Clique(vertices)
    }

    pub fn vertices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl WeightedGraph {
    /// Builds a graph from 0-based edges. Duplicate edges are merged;
    /// self-loops and out-of-range endpoints are rejected.
    pub fn new(n: usize, edges: &[(usize, usize)], weights: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("graph must have at least one vertex"));
        }
        if weights.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: weights.len() });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("vertex weights"));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::invalid("vertex weights must be nonnegative"));
        }
        let words = n.div_ceil(64);
        let mut bits = vec![0u64; n * words];
        let mut adj = vec![Vec::new(); n];
        let mut num_edges = 0;
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::invalid(format!("edge ({i}, {j}) out of range for n = {n}")));
            }
            if i == j {
                return Err(Error::invalid(format!("self-loop on vertex {i}")));
            }
            if bits[i * words + j / 64] & (1 << (j % 64)) != 0 {
                continue;
            }
            bits[i * words + j / 64] |= 1 << (j % 64);
            bits[j * words + i / 64] |= 1 << (i % 64);
            adj[i].push(j);
            adj[j].push(i);
            num_edges += 1;
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self { n, adj, bits, words, weights, num_edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> f64 {
        self.weights[v]
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] & (1 << (j % 64)) != 0
    }

    /// Adjacency row of `v` as a bitset of `words()` 64-bit words.
    pub fn row_bits(&self, v: usize) -> &[u64] {
        &self.bits[v * self.words..(v + 1) * self.words]
    }

    pub fn words(&self) -> usize {
        self.words
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.adj[i].iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    pub fn density(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        2.0 * self.num_edges as f64 / (self.n as f64 * (self.n as f64 - 1.0))
    }

    /// Same topology with new vertex weights.
    pub fn with_weights(&self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: weights.len() });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("vertex weights"));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(Error::invalid("vertex weights must be nonnegative"));
        }
        Ok(Self { weights, ..self.clone() })
    }

    /// Graph on the same vertices whose edges are exactly the non-edges of
    /// `self`. Weights are preserved.
    pub fn complement(&self) -> Self {
        let mut edges = Vec::with_capacity(self.n * (self.n - 1) / 2 - self.num_edges);
        for i in 0..self.n {
            for j in i + 1..self.n {
                if !self.adjacent(i, j) {
                    edges.push((i, j));
                }
            }
        }
        Self::new(self.n, &edges, self.weights.clone()).expect("complement of a valid graph is valid")
    }

    /// Candidate set after adding `added` to a partial clique: the sorted
    /// intersection of `candidates` with the neighbours of `added`.
    pub fn propagate(&self, candidates: &[usize], added: usize) -> Vec<usize> {
        intersect_sorted(candidates, &self.adj[added])
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(a, &u)| vertices[a + 1..].iter().all(|&v| self.adjacent(u, v)))
    }

    /// A vertex outside `clique` adjacent to all its members, if any.
    pub fn extension_vertex(&self, clique: &[usize]) -> Option<usize> {
        (0..self.n).find(|&v| !clique.contains(&v) && clique.iter().all(|&u| self.adjacent(u, v)))
    }

    /// Sum of member weights; errors if `clique` is not a clique.
    pub fn clique_weight(&self, clique: &Clique) -> Result<f64> {
        if clique.0.iter().any(|&v| v >= self.n) {
            return Err(Error::Infeasible("vertex out of range".into()));
        }
        if !self.is_clique(&clique.0) {
            return Err(Error::Infeasible("missing edge".into()));
        }
        Ok(clique.0.iter().map(|&v| self.weights[v]).sum())
    }

    /// Greedily adds vertices (ascending index) until the clique is maximal.
    pub fn extend_to_maximal(&self, clique: &mut Clique) {
        let mut cands: Vec<usize> =
            (0..self.n).filter(|&v| !clique.0.contains(&v) && clique.0.iter().all(|&u| self.adjacent(u, v))).collect();
        while let Some(&v) = cands.first() {
            clique.0.push(v);
            cands = self.propagate(&cands, v);
        }
        clique.0.sort_unstable();
    }
}

pub(crate) fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

pub struct CliqueState {
    members: Vec<usize>,
    candidates: Vec<usize>,
}

impl Problem for WeightedGraph {
    type Solution = Clique;
    type State = CliqueState;

    const KIND: ProblemKind = ProblemKind::Mwcp;

    fn num_vars(&self) -> usize {
        self.n
    }

    fn objective(&self, solution: &Clique) -> f64 {
        solution.0.iter().map(|&v| self.weights[v]).sum()
    }

    fn check(&self, solution: &Clique) -> std::result::Result<(), String> {
        let v = &solution.0;
        if v.windows(2).any(|w| w[0] >= w[1]) {
            return Err("vertices not sorted and distinct".into());
        }
        if v.iter().any(|&x| x >= self.n) {
            return Err("vertex out of range".into());
        }
        if !self.is_clique(v) {
            return Err("missing edge".into());
        }
        if let Some(x) = self.extension_vertex(v) {
            return Err(format!("not maximal: vertex {x} is adjacent to every member"));
        }
        Ok(())
    }

    fn active_vars(&self, solution: &Clique) -> Vec<usize> {
        solution.0.clone()
    }

    fn canonical_key(&self, solution: &Clique) -> Vec<usize> {
        solution.0.clone()
    }

    fn problem_features(&self) -> FeatureMatrix {
        let n = self.n;
        let upper: Vec<f64> =
            (0..n).map(|v| self.weights[v] + self.adj[v].iter().map(|&u| self.weights[u]).sum::<f64>()).collect();
        let max_w = self.weights.iter().cloned().fold(0.0, f64::max);
        let max_deg = (0..n).map(|v| self.degree(v)).max().unwrap_or(0) as f64;
        let max_ub = upper.iter().cloned().fold(0.0, f64::max);
        let density = self.density();
        let scale = |x: f64, m: f64| if m > 0.0 { x / m } else { 0.0 };
        let mut m = FeatureMatrix::zeros(n, FEATURE_NAMES.iter().map(|s| s.to_string()).collect());
        for v in 0..n {
            let row = m.row_mut(v);
            row[0] = scale(self.weights[v], max_w);
            row[1] = scale(self.degree(v) as f64, max_deg);
            row[2] = scale(upper[v], max_ub);
            row[3] = density;
        }
        m
    }

    fn ps_start(&self, _sample_index: usize) -> CliqueState {
        CliqueState { members: Vec::new(), candidates: (0..self.n).collect() }
    }

    fn ps_candidates<'a>(&self, state: &'a CliqueState) -> &'a [usize] {
        &state.candidates
    }

    fn ps_variable(&self, _state: &CliqueState, candidate: usize) -> usize {
        candidate
    }

    fn ps_fix(&self, state: &mut CliqueState, candidate: usize) {
        state.members.push(candidate);
        state.candidates = self.propagate(&state.candidates, candidate);
    }

    fn ps_finish(&self, state: CliqueState) -> Clique {
        Clique::new(state.members)
    }

    fn default_samples(&self) -> usize {
        self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle(w: [f64; 3]) -> WeightedGraph {
        WeightedGraph::new(3, &[(0, 1), (1, 2), (0, 2)], w.to_vec()).unwrap()
    }

    #[test]
    fn objective_examples() {
        let g = triangle([1.0, 2.0, 3.0]);
        assert_eq!(g.clique_weight(&Clique::new(vec![0, 1, 2])).unwrap(), 6.0);

        let single = WeightedGraph::new(1, &[], vec![7.0]).unwrap();
        assert_eq!(single.clique_weight(&Clique::new(vec![0])).unwrap(), 7.0);

        // path 1-2-3 with weights (5, 1, 5): maximal cliques {1,2} and {2,3}
        let path = WeightedGraph::new(3, &[(0, 1), (1, 2)], vec![5.0, 1.0, 5.0]).unwrap();
        assert_eq!(path.clique_weight(&Clique::new(vec![0, 1])).unwrap(), 6.0);
        assert!(matches!(path.clique_weight(&Clique::new(vec![0, 2])), Err(Error::Infeasible(_))));
    }

    #[test]
    fn propagate_complete_and_star() {
        let k4 = WeightedGraph::new(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], vec![1.0; 4]).unwrap();
        assert_eq!(k4.propagate(&[0, 1, 2, 3], 2), vec![0, 1, 3]);

        let star = WeightedGraph::new(5, &[(0, 1), (0, 2), (0, 3), (0, 4)], vec![1.0; 5]).unwrap();
        assert_eq!(star.propagate(&[0, 1, 2, 3, 4], 0), vec![1, 2, 3, 4]);
        assert_eq!(star.propagate(&[0, 1, 2, 3, 4], 3), vec![0]);
    }

    #[test]
    fn features_examples() {
        let g = WeightedGraph::new(3, &[(0, 1)], vec![2.0, 4.0, 1.0]).unwrap();
        let f = g.problem_features();
        // isolated vertex 2: degree 0, upper bound = own weight
        assert_eq!(f.row(2)[1], 0.0);
        assert_eq!(f.row(2)[2], 1.0 / 6.0);
        assert!((f.row(0)[3] - 1.0 / 3.0).abs() < 1e-15);

        let k3 = triangle([5.0; 3]);
        let f = k3.problem_features();
        assert_eq!(f.row(0), f.row(1));
        assert_eq!(f.row(1), f.row(2));

        let one = WeightedGraph::new(1, &[], vec![3.0]).unwrap();
        assert_eq!(one.problem_features().row(0)[3], 0.0);
    }

    #[test]
    fn check_reasons() {
        let path = WeightedGraph::new(3, &[(0, 1), (1, 2)], vec![1.0; 3]).unwrap();
        assert_eq!(path.check(&Clique::new(vec![0, 2])).unwrap_err(), "missing edge");
        assert!(path.check(&Clique::new(vec![1])).unwrap_err().starts_with("not maximal"));
        assert!(path.check(&Clique::new(vec![1, 2])).is_ok());
    }

    #[test]
    fn complement_involution() {
        let g = WeightedGraph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)], vec![1.0; 5]).unwrap();
        let c = g.complement();
        assert_eq!(c.num_edges(), 5);
        assert!((0..5).all(|v| c.degree(v) == 2));
        assert_eq!(c.complement(), g);
    }

    #[test]
    fn rejects_bad_graphs() {
        assert!(WeightedGraph::new(2, &[(0, 0)], vec![1.0; 2]).is_err());
        assert!(WeightedGraph::new(2, &[(0, 2)], vec![1.0; 2]).is_err());
        assert!(WeightedGraph::new(2, &[], vec![f64::NAN, 1.0]).is_err());
    }
}
