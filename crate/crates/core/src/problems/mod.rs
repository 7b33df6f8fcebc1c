//! Problem backends.
//!
//! Each backend describes its decision variables, objective, feasibility
//! rules, problem-specific feature columns, and the constructive steps the
//! probabilistic sampler drives (start state, candidate set, fixing a
//! candidate and pruning the ones that now conflict).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

pub mod io;
pub mod mwcp;
pub mod op;
pub mod tsp;

pub use mwcp::{Clique, WeightedGraph};
pub use op::{OpInstance, Route};
pub use tsp::{Tour, TspInstance};

/// Numerical slack allowed when comparing route lengths to a budget.
pub const BUDGET_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    Mwcp,
    Tsp,
    Op,
}

impl ProblemKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ProblemKind::Mwcp => "mwcp",
            ProblemKind::Tsp => "tsp",
            ProblemKind::Op => "op",
        }
    }

    pub fn sense(self) -> Sense {
        match self {
            ProblemKind::Tsp => Sense::Minimize,
            ProblemKind::Mwcp | ProblemKind::Op => Sense::Maximize,
        }
    }

    /// Names of all feature columns, statistical ones first.
    pub fn feature_names(self) -> Vec<String> {
        let specific: &[&str] = match self {
            ProblemKind::Mwcp => &mwcp::FEATURE_NAMES,
            ProblemKind::Tsp => &tsp::FEATURE_NAMES,
            ProblemKind::Op => &op::FEATURE_NAMES,
        };
        crate::features::STAT_FEATURE_NAMES.iter().chain(specific).map(|s| s.to_string()).collect()
    }

    pub fn feature_dim(self) -> usize {
        self.feature_names().len()
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mwcp" => Ok(ProblemKind::Mwcp),
            "tsp" => Ok(ProblemKind::Tsp),
            "op" => Ok(ProblemKind::Op),
            other => Err(Error::invalid(format!("unknown problem kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Maximize,
    Minimize,
}

impl Sense {
    /// True if `a` is strictly better than `b`.
    #[inline]
    pub fn better(self, a: f64, b: f64) -> bool {
        match self {
            Sense::Maximize => a > b,
            Sense::Minimize => a < b,
        }
    }

    /// Ordering that sorts better objectives first.
    pub fn cmp_best_first(self, a: f64, b: f64) -> std::cmp::Ordering {
        match self {
            Sense::Maximize => b.total_cmp(&a),
            Sense::Minimize => a.total_cmp(&b),
        }
    }
}

/// Index of directed edge `(i, j)`, `i != j`, among the `n(n-1)` edges of a
/// complete digraph in lexicographic order.
#[inline]
pub fn edge_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i != j && i < n && j < n);
    i * (n - 1) + if j < i { j } else { j - 1 }
}

/// Inverse of [`edge_index`].
#[inline]
pub fn edge_endpoints(n: usize, idx: usize) -> (usize, usize) {
    let i = idx / (n - 1);
    let r = idx % (n - 1);
    (i, if r < i { r } else { r + 1 })
}

/// A combinatorial problem instance that the sampler and the ASP loop can
/// operate on.
pub trait Problem: Sync {
    type Solution: Clone + fmt::Debug + Send + Sync;
    /// Partial solution under construction plus its live candidate set.
    type State;

    const KIND: ProblemKind;

    fn num_vars(&self) -> usize;

    fn sense(&self) -> Sense {
        Self::KIND.sense()
    }

    fn objective(&self, solution: &Self::Solution) -> f64;

    /// Full constraint check, including the completeness condition the
    /// sampler guarantees (clique maximality, full tour, budget-maximal
    /// route). Returns the reason on failure.
    fn check(&self, solution: &Self::Solution) -> std::result::Result<(), String>;

    /// Sorted indices of the variables set to 1 in `solution`.
    fn active_vars(&self, solution: &Self::Solution) -> Vec<usize>;

    /// Encoding under which solutions the objective cannot tell apart compare
    /// equal.
    fn canonical_key(&self, solution: &Self::Solution) -> Vec<usize>;

    /// Representative form stored in the sample pool and used for labels.
    fn normalize(&self, solution: Self::Solution) -> Self::Solution {
        solution
    }

    /// Problem-specific feature columns, one row per variable.
    fn problem_features(&self) -> FeatureMatrix;

    fn ps_start(&self, sample_index: usize) -> Self::State;
    fn ps_candidates<'a>(&self, state: &'a Self::State) -> &'a [usize];
    /// Variable whose predicted probability weighs `candidate` in the draw.
    fn ps_variable(&self, state: &Self::State, candidate: usize) -> usize;
    /// Fix `candidate` to 1 and drop conflicting candidates.
    fn ps_fix(&self, state: &mut Self::State, candidate: usize);
    fn ps_finish(&self, state: Self::State) -> Self::Solution;

    /// Solution drawn for the initial pool. Defaults to the sampler with a
    /// uniform prediction.
    fn random_solution(&self, sample_index: usize, rng: &mut crate::engine::SampleRng) -> Self::Solution {
        let ones = vec![1.0; self.num_vars()];
        crate::engine::probabilistic_sample(self, &ones, sample_index, rng)
    }

    /// Extra solutions built from the prediction each iteration, offered to
    /// the pool after the regular samples.
    fn companions(&self, _p: &[f64]) -> Vec<Self::Solution> {
        Vec::new()
    }

    /// Size-scaled default number of samples per iteration.
    fn default_samples(&self) -> usize;

    fn default_pinned_fraction(&self) -> f64 {
        0.0
    }

    /// 0/1 label per variable for a reference (optimal) solution.
    fn labels(&self, solution: &Self::Solution) -> Vec<u8> {
        let mut y = vec![0u8; self.num_vars()];
        for v in self.active_vars(&self.normalize(solution.clone())) {
            y[v] = 1;
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_index_roundtrip() {
        for n in 2..7 {
            let mut seen = Vec::new();
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let idx = edge_index(n, i, j);
                    assert_eq!(edge_endpoints(n, idx), (i, j));
                    seen.push(idx);
                }
            }
            assert_eq!(seen, (0..n * (n - 1)).collect::<Vec<_>>());
        }
    }

    #[test]
    fn sense_ordering() {
        assert!(Sense::Maximize.better(2.0, 1.0));
        assert!(!Sense::Maximize.better(1.0, 1.0));
        assert!(Sense::Minimize.better(1.0, 2.0));
        let mut v = vec![1.0, 3.0, 2.0];
        v.sort_by(|a, b| Sense::Maximize.cmp_best_first(*a, *b));
        assert_eq!(v, vec![3.0, 2.0, 1.0]);
    }

    #[test]
    fn feature_dims() {
        assert_eq!(ProblemKind::Mwcp.feature_dim(), 6);
        assert_eq!(ProblemKind::Tsp.feature_dim(), 6);
        assert_eq!(ProblemKind::Op.feature_dim(), 5);
        assert_eq!("TSP".parse::<ProblemKind>().unwrap(), ProblemKind::Tsp);
        assert!("vrp".parse::<ProblemKind>().is_err());
    }
}
