//! Columns and the restricted master problem of the set-covering
//! formulation of graph colouring.

use std::collections::HashSet;

use super::simplex::{Cmp, LinearProgram, LpSolution};
use crate::error::{Error, Result};
use crate::problems::WeightedGraph;

/// Maximal independent set of the colouring graph, sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MisColumn {
    vertices: Vec<usize>,
    coverage: Vec<u64>,
}

impl MisColumn {
    /// Builds a column without checking independence or maximality.
    pub fn unchecked(mut vertices: Vec<usize>, n: usize) -> Self {
        vertices.sort_unstable();
        vertices.dedup();
        let mut coverage = vec![0u64; n.div_ceil(64)];
        for &v in &vertices {
            coverage[v / 64] |= 1 << (v % 64);
        }
        Self { vertices, coverage }
    }

    /// Builds a column, rejecting sets that are not maximal independent sets
    /// of `graph`.
    pub fn new(graph: &WeightedGraph, vertices: Vec<usize>) -> Result<Self> {
        let col = Self::unchecked(vertices, graph.n());
        col.validate(graph)?;
        Ok(col)
    }

    pub fn validate(&self, graph: &WeightedGraph) -> Result<()> {
        let vs = &self.vertices;
        if let Some(&v) = vs.iter().find(|&&v| v >= graph.n()) {
            return Err(Error::Infeasible(format!("vertex {v} out of range")));
        }
        for (a, &u) in vs.iter().enumerate() {
            if let Some(&v) = vs[a + 1..].iter().find(|&&v| graph.adjacent(u, v)) {
                return Err(Error::Infeasible(format!("vertices {u} and {v} are adjacent")));
            }
        }
        if let Some(v) = (0..graph.n()).find(|&v| !self.covers(v) && vs.iter().all(|&u| !graph.adjacent(u, v))) {
            return Err(Error::Infeasible(format!("not maximal: vertex {v} can be added")));
        }
        Ok(())
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn covers(&self, v: usize) -> bool {
        self.coverage.get(v / 64).is_some_and(|w| w & (1 << (v % 64)) != 0)
    }

    pub fn coverage(&self) -> &[u64] {
        &self.coverage
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RmpSolution {
    /// Value of each column, in column order.
    pub z: Vec<f64>,
    /// Dual of each vertex covering row.
    pub duals: Vec<f64>,
    pub objective: f64,
    /// Largest complementary-slackness violation of this solve.
    pub cs_residual: f64,
    pub pivots: usize,
}

/// `min sum z` subject to every vertex being covered at least once by the
/// chosen columns, `z >= 0`.
#[derive(Debug, Clone)]
pub struct RestrictedMaster {
    graph: WeightedGraph,
    columns: Vec<MisColumn>,
    keys: HashSet<Vec<usize>>,
}

impl RestrictedMaster {
    pub fn new(graph: WeightedGraph) -> Self {
        Self { graph, columns: Vec::new(), keys: HashSet::new() }
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn columns(&self) -> &[MisColumn] {
        &self.columns
    }

    pub fn contains(&self, col: &MisColumn) -> bool {
        self.keys.contains(&col.vertices)
    }

    /// Validates and inserts `col`. Returns `false` for a column already
    /// present.
    pub fn add_column(&mut self, col: MisColumn) -> Result<bool> {
        col.validate(&self.graph)?;
        if !self.keys.insert(col.vertices.clone()) {
            return Ok(false);
        }
        self.columns.push(col);
        Ok(true)
    }

    pub fn uncovered(&self) -> Vec<usize> {
        (0..self.graph.n()).filter(|&v| !self.columns.iter().any(|c| c.covers(v))).collect()
    }

    pub fn linear_program(&self) -> LinearProgram {
        let mut lp = LinearProgram::new(vec![1.0; self.columns.len()]);
        for v in 0..self.graph.n() {
            let row = self.columns.iter().map(|c| if c.covers(v) { 1.0 } else { 0.0 }).collect();
            lp.add_row(row, Cmp::Ge, 1.0);
        }
        lp
    }

    pub fn solve(&self) -> Result<RmpSolution> {
        if let Some(&v) = self.uncovered().first() {
            return Err(Error::Infeasible(format!("vertex {v} is not covered by any column")));
        }
        let lp = self.linear_program();
        let sol: LpSolution = lp.solve()?;
        let cs_residual = lp.complementary_slackness(&sol);
        Ok(RmpSolution { z: sol.x, duals: sol.duals, objective: sol.objective, cs_residual, pivots: sol.pivots })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> WeightedGraph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        WeightedGraph::new(n, &edges, vec![1.0; n]).unwrap()
    }

    #[test]
    fn column_validation() {
        let c5 = cycle(5);
        assert!(MisColumn::new(&c5, vec![0, 2]).is_ok());
        assert!(MisColumn::new(&c5, vec![0, 1]).is_err());
        assert!(MisColumn::new(&c5, vec![0]).is_err());
        let c = MisColumn::unchecked(vec![2, 0, 2], 5);
        assert_eq!(c.vertices(), &[0, 2]);
        assert!(c.covers(2) && !c.covers(1));
    }

    #[test]
    fn lp_examples() {
        let edgeless = WeightedGraph::new(4, &[], vec![1.0; 4]).unwrap();
        let mut rmp = RestrictedMaster::new(edgeless);
        rmp.add_column(MisColumn::unchecked(vec![0, 1, 2, 3], 4)).unwrap();
        let s = rmp.solve().unwrap();
        assert!((s.objective - 1.0).abs() < 1e-12 && (s.z[0] - 1.0).abs() < 1e-12);

        let k4 = WeightedGraph::new(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], vec![1.0; 4]).unwrap();
        let mut rmp = RestrictedMaster::new(k4);
        for v in 0..4 {
            rmp.add_column(MisColumn::unchecked(vec![v], 4)).unwrap();
        }
        assert!((rmp.solve().unwrap().objective - 4.0).abs() < 1e-12);

        let mut rmp = RestrictedMaster::new(cycle(5));
        for i in 0..5 {
            assert!(rmp.add_column(MisColumn::unchecked(vec![i, (i + 2) % 5], 5)).unwrap());
        }
        assert!(!rmp.add_column(MisColumn::unchecked(vec![0, 2], 5)).unwrap());
        let s = rmp.solve().unwrap();
        assert!((s.objective - 2.5).abs() < 1e-9);
        assert!(s.cs_residual < 1e-8);
        assert!(s.duals.iter().all(|&d| d >= -1e-12));
    }

    #[test]
    fn uncovered_is_an_error() {
        let mut rmp = RestrictedMaster::new(cycle(5));
        rmp.add_column(MisColumn::unchecked(vec![0, 2], 5)).unwrap();
        assert!(matches!(rmp.solve(), Err(Error::Infeasible(_))));
    }
}
