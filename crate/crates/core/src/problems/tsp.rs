//! Symmetric Euclidean travelling salesman problem.

use serde::{Deserialize, Serialize};

use super::{edge_index, Problem, ProblemKind};
use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

pub const FEATURE_NAMES: [&str; 4] = ["d_mean_from", "d_min_from", "d_mean_to", "d_min_to"];

#[derive(Debug, Clone, PartialEq)]
pub struct TspInstance {
    coords: Vec<[f64; 2]>,
    dist: Vec<f64>,
}

/// City permutation; the closing edge back to the first city is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tour(pub Vec<usize>);

impl Tour {
    pub fn cities(&self) -> &[usize] {
        &self.0
    }

    /// Rotation starting at city 0, oriented so the second city has the
    /// smaller index of the two neighbours of city 0.
    pub fn canonical(&self) -> Tour {
        let n = self.0.len();
        if n == 0 {
            return self.clone();
        }
        let start = self.0.iter().position(|&c| c == 0).unwrap_or(0);
        let mut rot: Vec<usize> = (0..n).map(|k| self.0[(start + k) % n]).collect();
        if n > 2 && rot[1] > rot[n - 1] {
            rot[1..].reverse();
        }
        Tour(rot)
    }

    pub fn reversed(&self) -> Tour {
        let mut v = self.0.clone();
        v.reverse();
        Tour(v)
    }
}

pub(crate) fn euclidean_matrix(coords: &[[f64; 2]]) -> Vec<f64> {
    let n = coords.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let dx = coords[i][0] - coords[j][0];
            let dy = coords[i][1] - coords[j][1];
            let v = dx.hypot(dy);
            d[i * n + j] = v;
            d[j * n + i] = v;
        }
    }
    d
}

impl TspInstance {
    pub fn new(coords: Vec<[f64; 2]>) -> Result<Self> {
        let n = coords.len();
        if n < 3 {
            return Err(Error::invalid(format!("TSP needs at least 3 cities, got {n}")));
        }
        if coords.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("city coordinates"));
        }
        let dist = euclidean_matrix(&coords);
        for i in 0..n {
            for j in i + 1..n {
                if dist[i * n + j] <= 0.0 {
                    return Err(Error::invalid(format!("cities {i} and {j} coincide")));
                }
            }
        }
        Ok(Self { coords, dist })
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[[f64; 2]] {
        &self.coords
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.coords.len() + j]
    }

    pub fn tour_length(&self, tour: &Tour) -> f64 {
        let c = &tour.0;
        if c.is_empty() {
            return 0.0;
        }
        let open: f64 = c.windows(2).map(|w| self.dist(w[0], w[1])).sum();
        open + self.dist(c[c.len() - 1], c[0])
    }
}

/// Per-city statistics over edges to all other cities: (mean, min, max).
pub(crate) fn edge_stats(n: usize, d: impl Fn(usize, usize) -> f64) -> Vec<(f64, f64, f64)> {
    (0..n)
        .map(|i| {
            let mut sum = 0.0;
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for k in (0..n).filter(|&k| k != i) {
                let v = d(i, k);
                sum += v;
                lo = lo.min(v);
                hi = hi.max(v);
            }
            (sum / (n - 1) as f64, lo, hi)
        })
        .collect()
}

pub struct TourState {
    n: usize,
    tour: Vec<usize>,
    unvisited: Vec<usize>,
}

impl Problem for TspInstance {
    type Solution = Tour;
    type State = TourState;

    const KIND: ProblemKind = ProblemKind::Tsp;

    fn num_vars(&self) -> usize {
        let n = self.n();
        n * (n - 1)
    }

    fn objective(&self, solution: &Tour) -> f64 {
        self.tour_length(solution)
    }

    fn check(&self, solution: &Tour) -> std::result::Result<(), String> {
        let n = self.n();
        if solution.0.len() != n {
            return Err(format!("tour visits {} cities, expected {n}", solution.0.len()));
        }
        let mut seen = vec![false; n];
        for &c in &solution.0 {
            if c >= n {
                return Err(format!("city {c} out of range"));
            }
            if seen[c] {
                return Err(format!("city {c} visited more than once"));
            }
            seen[c] = true;
        }
        Ok(())
    }

    fn active_vars(&self, solution: &Tour) -> Vec<usize> {
        let n = self.n();
        let c = &solution.0;
        let mut vars: Vec<usize> = (0..c.len()).map(|k| edge_index(n, c[k], c[(k + 1) % c.len()])).collect();
        vars.sort_unstable();
        vars
    }

    fn canonical_key(&self, solution: &Tour) -> Vec<usize> {
        solution.canonical().0
    }

    fn normalize(&self, solution: Tour) -> Tour {
        solution.canonical()
    }

    fn problem_features(&self) -> FeatureMatrix {
        let n = self.n();
        let stats = edge_stats(n, |i, k| self.dist(i, k));
        let rel = |v: f64, base: f64, lo: f64, hi: f64| {
            let den = hi - lo;
            if den > 0.0 {
                (v - base) / den
            } else {
                0.0
            }
        };
        let mut m = FeatureMatrix::zeros(n * (n - 1), FEATURE_NAMES.iter().map(|s| s.to_string()).collect());
        for i in 0..n {
            let (mean_i, min_i, max_i) = stats[i];
            for j in (0..n).filter(|&j| j != i) {
                let (mean_j, min_j, max_j) = stats[j];
                let d = self.dist(i, j);
                let row = m.row_mut(edge_index(n, i, j));
                row[0] = rel(d, mean_i, min_i, max_i);
                row[1] = rel(d, min_i, min_i, max_i);
                row[2] = rel(d, mean_j, min_j, max_j);
                row[3] = rel(d, min_j, min_j, max_j);
            }
        }
        m
    }

    fn ps_start(&self, sample_index: usize) -> TourState {
        let n = self.n();
        let start = sample_index % n;
        TourState { n, tour: vec![start], unvisited: (0..n).filter(|&c| c != start).collect() }
    }

    fn ps_candidates<'a>(&self, state: &'a TourState) -> &'a [usize] {
        &state.unvisited
    }

    fn ps_variable(&self, state: &TourState, candidate: usize) -> usize {
        edge_index(state.n, *state.tour.last().expect("tour has a start city"), candidate)
    }

    fn ps_fix(&self, state: &mut TourState, candidate: usize) {
        if let Ok(pos) = state.unvisited.binary_search(&candidate) {
            state.unvisited.remove(pos);
        }
        state.tour.push(candidate);
    }

    fn ps_finish(&self, state: TourState) -> Tour {
        Tour(state.tour)
    }

    fn random_solution(&self, _sample_index: usize, rng: &mut crate::engine::SampleRng) -> Tour {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..self.n()).collect();
        perm.shuffle(rng);
        Tour(perm)
    }

    fn companions(&self, p: &[f64]) -> Vec<Tour> {
        (0..self.n()).map(|s| crate::engine::greedy_construct(self, p, s)).collect()
    }

    fn default_samples(&self) -> usize {
        20 * self.n()
    }

    fn default_pinned_fraction(&self) -> f64 {
        0.5
    }
}
