//! Orienteering problem with the depot at location 0.

use serde::{Deserialize, Serialize};

use super::tsp::euclidean_matrix;
use super::{edge_index, Problem, ProblemKind, BUDGET_EPS};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

pub const FEATURE_NAMES: [&str; 3] = ["d_over_budget", "gain_from", "gain_to"];

#[derive(Debug, Clone, PartialEq)]
pub struct OpInstance {
    coords: Vec<[f64; 2]>,
    dist: Vec<f64>,
    prizes: Vec<f64>,
    budget: f64,
}

/// Visited non-depot locations in order. The route leaves from and returns
/// to the depot implicitly.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Route(pub Vec<usize>);

impl Route {
    pub fn locations(&self) -> &[usize] {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl OpInstance {
    pub fn new(coords: Vec<[f64; 2]>, prizes: Vec<f64>, budget: f64) -> Result<Self> {
        let n = coords.len();
        if n < 2 {
            return Err(Error::invalid(format!("OP needs at least 2 locations, got {n}")));
        }
        if prizes.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: prizes.len() });
        }
        if coords.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("location coordinates"));
        }
        if prizes.iter().any(|p| !p.is_finite()) {
            return Err(Error::NonFinite("prizes"));
        }
        if prizes.iter().any(|&p| p < 0.0) {
            return Err(Error::invalid("prizes must be nonnegative"));
        }
        if prizes[0] != 0.0 {
            return Err(Error::invalid("depot prize must be 0"));
        }
        if !budget.is_finite() || budget < 0.0 {
            return Err(Error::invalid(format!("budget must be finite and nonnegative, got {budget}")));
        }
        let dist = euclidean_matrix(&coords);
        Ok(Self { coords, dist, prizes, budget })
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    pub fn prizes(&self) -> &[f64] {
        &self.prizes
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.coords.len() + j]
    }

    /// Length of the open path depot -> route[0] -> ... -> route[last].
    pub fn open_length(&self, route: &[usize]) -> f64 {
        let mut cur = 0;
        let mut used = 0.0;
        for &j in route {
            used += self.dist(cur, j);
            cur = j;
        }
        used
    }

    /// Closed route length including the return to the depot.
    pub fn route_length(&self, route: &Route) -> f64 {
        let last = route.0.last().copied().unwrap_or(0);
        self.open_length(&route.0) + self.dist(last, 0)
    }

    pub fn route_prize(&self, route: &Route) -> f64 {
        route.0.iter().map(|&j| self.prizes[j]).sum()
    }

    /// Unvisited locations reachable from `current` with enough budget left
    /// to return to the depot afterwards.
    pub fn candidates(&self, visited: &[bool], current: usize, used: f64) -> Vec<usize> {
        (1..self.n())
            .filter(|&j| !visited[j] && used + self.dist(current, j) + self.dist(j, 0) <= self.budget + BUDGET_EPS)
            .collect()
    }

    /// Cheapest depot round trip to a single location; `None` when there is
    /// only the depot.
    pub fn cheapest_round_trip(&self) -> Option<f64> {
        (1..self.n()).map(|j| self.dist(0, j) + self.dist(j, 0)).min_by(f64::total_cmp)
    }

    /// Appends the lowest-index feasible location until the route is
    /// budget-maximal.
    pub fn extend_to_maximal(&self, route: &mut Route) {
        let mut visited = vec![false; self.n()];
        for &j in &route.0 {
            visited[j] = true;
        }
        loop {
            let cur = route.0.last().copied().unwrap_or(0);
            let used = self.open_length(&route.0);
            match self.candidates(&visited, cur, used).first() {
                Some(&j) => {
                    visited[j] = true;
                    route.0.push(j);
                }
                None => break,
            }
        }
    }
}

pub struct RouteState {
    n: usize,
    route: Vec<usize>,
    visited: Vec<bool>,
    used: f64,
    candidates: Vec<usize>,
}

impl Problem for OpInstance {
    type Solution = Route;
    type State = RouteState;

    const KIND: ProblemKind = ProblemKind::Op;

    fn num_vars(&self) -> usize {
        let n = self.n();
        n * (n - 1)
    }

    fn objective(&self, solution: &Route) -> f64 {
        self.route_prize(solution)
    }

    fn check(&self, solution: &Route) -> std::result::Result<(), String> {
        let n = self.n();
        let mut visited = vec![false; n];
        for &j in &solution.0 {
            if j == 0 || j >= n {
                return Err(format!("location {j} is not a valid non-depot location"));
            }
            if visited[j] {
                return Err(format!("location {j} visited more than once"));
            }
            visited[j] = true;
        }
        let length = self.route_length(solution);
        if length > self.budget + BUDGET_EPS {
            return Err(format!("route length {length} exceeds budget {}", self.budget));
        }
        let cur = solution.0.last().copied().unwrap_or(0);
        if let Some(j) = self.candidates(&visited, cur, self.open_length(&solution.0)).first() {
            return Err(format!("not budget-maximal: location {j} can still be appended"));
        }
        Ok(())
    }

    fn active_vars(&self, solution: &Route) -> Vec<usize> {
        let n = self.n();
        if solution.0.is_empty() {
            return Vec::new();
        }
        let mut vars = Vec::with_capacity(solution.0.len() + 1);
        let mut cur = 0;
        for &j in &solution.0 {
            vars.push(edge_index(n, cur, j));
            cur = j;
        }
        vars.push(edge_index(n, cur, 0));
        vars.sort_unstable();
        vars
    }

    fn canonical_key(&self, solution: &Route) -> Vec<usize> {
        let mut rev = solution.0.clone();
        rev.reverse();
        std::cmp::min(rev, solution.0.clone())
    }

    fn problem_features(&self) -> FeatureMatrix {
        let n = self.n();
        let gain = |i: usize, j: usize| {
            let d = self.dist(i, j);
            if d > 0.0 {
                Some(self.prizes[j] / d)
            } else {
                None
            }
        };
        let best_from: Vec<f64> =
            (0..n).map(|i| (0..n).filter(|&k| k != i).filter_map(|k| gain(i, k)).fold(0.0, f64::max)).collect();
        // normaliser for the incoming side weighs the prize of the origin k
        let best_to: Vec<f64> = (0..n)
            .map(|j| {
                (0..n)
                    .filter(|&k| k != j && self.dist(k, j) > 0.0)
                    .map(|k| self.prizes[k] / self.dist(k, j))
                    .fold(0.0, f64::max)
            })
            .collect();
        let mut m = FeatureMatrix::zeros(n * (n - 1), FEATURE_NAMES.iter().map(|s| s.to_string()).collect());
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                let row = m.row_mut(edge_index(n, i, j));
                row[0] = if self.budget > 0.0 { self.dist(i, j) / self.budget } else { 0.0 };
                if let Some(g) = gain(i, j) {
                    row[1] = if best_from[i] > 0.0 { g / best_from[i] } else { 0.0 };
                    row[2] = if best_to[j] > 0.0 { g / best_to[j] } else { 0.0 };
                }
            }
        }
        m
    }

    fn ps_start(&self, _sample_index: usize) -> RouteState {
        let n = self.n();
        let mut visited = vec![false; n];
        visited[0] = true;
        let candidates = self.candidates(&visited, 0, 0.0);
        RouteState { n, route: Vec::new(), visited, used: 0.0, candidates }
    }

    fn ps_candidates<'a>(&self, state: &'a RouteState) -> &'a [usize] {
        &state.candidates
    }

    fn ps_variable(&self, state: &RouteState, candidate: usize) -> usize {
        edge_index(state.n, state.route.last().copied().unwrap_or(0), candidate)
    }

    fn ps_fix(&self, state: &mut RouteState, candidate: usize) {
        let cur = state.route.last().copied().unwrap_or(0);
        state.used += self.dist(cur, candidate);
        state.visited[candidate] = true;
        state.route.push(candidate);
        state.candidates = self.candidates(&state.visited, candidate, state.used);
    }

    fn ps_finish(&self, state: RouteState) -> Route {
        Route(state.route)
    }

    fn default_samples(&self) -> usize {
        50 * self.n()
    }
}
