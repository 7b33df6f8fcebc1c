//! Exact solvers for labeling small instances.
//!
//! Each solver refuses instances above its size guard with
//! [`Error::OracleGuard`] instead of running for an unbounded time.

use super::dataset::Labeled;
use crate::error::{Error, Result};
use crate::problems::{Clique, OpInstance, Route, Tour, TspInstance, WeightedGraph, BUDGET_EPS};

pub const MWCP_MAX_N: usize = 400;
pub const TSP_MAX_N: usize = 16;
pub const OP_MAX_N: usize = 14;

fn first_bit(bits: &[u64]) -> Option<usize> {
    bits.iter().position(|&w| w != 0).map(|w| w * 64 + bits[w].trailing_zeros() as usize)
}

fn is_empty(bits: &[u64]) -> bool {
    bits.iter().all(|&w| w == 0)
}

struct CliqueSearch<'a> {
    g: &'a WeightedGraph,
    current: Vec<usize>,
    best: Vec<usize>,
    best_w: f64,
}

impl CliqueSearch<'_> {
    /// Greedy colouring of `cand` into independent classes. Returns the
    /// vertices class by class together with, for each, the sum of the
    /// heaviest weights of its class and all earlier classes. A clique takes
    /// at most one vertex per class, which makes this an upper bound.
    fn colour(&self, cand: &[u64]) -> (Vec<usize>, Vec<f64>) {
        let mut uncoloured = cand.to_vec();
        let mut order = Vec::new();
        let mut bounds = Vec::new();
        let mut acc = 0.0;
        while !is_empty(&uncoloured) {
            let mut avail = uncoloured.clone();
            let mut class = Vec::new();
            while let Some(v) = first_bit(&avail) {
                class.push(v);
                avail[v / 64] &= !(1 << (v % 64));
                for (a, r) in avail.iter_mut().zip(self.g.row_bits(v)) {
                    *a &= !r;
                }
            }
            let heaviest = class.iter().map(|&v| self.g.weight(v)).fold(0.0, f64::max);
            acc += heaviest;
            for v in class {
                uncoloured[v / 64] &= !(1 << (v % 64));
                order.push(v);
                bounds.push(acc);
            }
        }
        (order, bounds)
    }

    fn expand(&mut self, mut cand: Vec<u64>, weight: f64) {
        if is_empty(&cand) {
            if weight > self.best_w {
                self.best_w = weight;
                self.best = self.current.clone();
            }
            return;
        }
        let (order, bounds) = self.colour(&cand);
        for k in (0..order.len()).rev() {
            if weight + bounds[k] <= self.best_w {
                return;
            }
            let v = order[k];
            let next: Vec<u64> = cand.iter().zip(self.g.row_bits(v)).map(|(c, r)| c & r).collect();
            self.current.push(v);
            self.expand(next, weight + self.g.weight(v));
            self.current.pop();
            cand[v / 64] &= !(1 << (v % 64));
        }
    }
}

/// Maximum-weight clique by branch and bound with a colouring bound. The
/// result is extended to a maximal clique (zero-weight vertices may be
/// added without changing the weight).
pub fn max_weight_clique(g: &WeightedGraph) -> Result<(Clique, f64)> {
    if g.n() > MWCP_MAX_N {
        return Err(Error::OracleGuard(format!("MWCP oracle limited to n <= {MWCP_MAX_N}, got {}", g.n())));
    }
    let mut cand = vec![0u64; g.words()];
    for v in 0..g.n() {
        cand[v / 64] |= 1 << (v % 64);
    }
    let mut search = CliqueSearch { g, current: Vec::new(), best: Vec::new(), best_w: f64::NEG_INFINITY };
    search.expand(cand, 0.0);
    let mut clique = Clique::new(search.best);
    g.extend_to_maximal(&mut clique);
    let w = g.clique_weight(&clique)?;
    Ok((clique, w))
}

pub fn exact_mwcp(g: &WeightedGraph) -> Result<Labeled<WeightedGraph>> {
    let (solution, objective) = max_weight_clique(g)?;
    Ok(Labeled { instance: g.clone(), solution, objective })
}

/// Held-Karp dynamic program over subsets of cities 1..n.
pub fn exact_tsp(inst: &TspInstance) -> Result<Labeled<TspInstance>> {
    let n = inst.n();
    if n > TSP_MAX_N {
        return Err(Error::OracleGuard(format!("TSP oracle limited to n <= {TSP_MAX_N}, got {n}")));
    }
    let m = n - 1;
    let full = (1usize << m) - 1;
    // dp[mask * m + j]: shortest path from city 0 through `mask`, ending at
    // city j + 1 (which is in `mask`)
    let mut dp = vec![f64::INFINITY; (1 << m) * m];
    let mut parent = vec![usize::MAX; (1 << m) * m];
    for j in 0..m {
        dp[(1 << j) * m + j] = inst.dist(0, j + 1);
    }
    for mask in 1..=full {
        for j in 0..m {
            let cur = dp[mask * m + j];
            if mask & (1 << j) == 0 || !cur.is_finite() {
                continue;
            }
            for k in 0..m {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let next = mask | (1 << k);
                let cand = cur + inst.dist(j + 1, k + 1);
                if cand < dp[next * m + k] {
                    dp[next * m + k] = cand;
                    parent[next * m + k] = j;
                }
            }
        }
    }
    let mut last = 0;
    let mut best = f64::INFINITY;
    for j in 0..m {
        let total = dp[full * m + j] + inst.dist(j + 1, 0);
        if total < best {
            best = total;
            last = j;
        }
    }
    let mut rev = Vec::with_capacity(n);
    let mut mask = full;
    let mut j = last;
    loop {
        rev.push(j + 1);
        let p = parent[mask * m + j];
        mask &= !(1 << j);
        if p == usize::MAX {
            break;
        }
        j = p;
    }
    rev.push(0);
    rev.reverse();
    let solution = Tour(rev).canonical();
    let objective = inst.tour_length(&solution);
    Ok(Labeled { instance: inst.clone(), solution, objective })
}

/// Best route by a dynamic program over visited subsets, then extended to a
/// budget-maximal route (prizes are nonnegative, so extending keeps it
/// optimal).
pub fn exact_op(inst: &OpInstance) -> Result<Labeled<OpInstance>> {
    let n = inst.n();
    if n > OP_MAX_N {
        return Err(Error::OracleGuard(format!("OP oracle limited to n <= {OP_MAX_N}, got {n}")));
    }
    let m = n - 1;
    let limit = inst.budget() + BUDGET_EPS;
    let mut dp = vec![f64::INFINITY; (1 << m) * m];
    let mut parent = vec![usize::MAX; (1 << m) * m];
    for j in 0..m {
        if inst.dist(0, j + 1) + inst.dist(j + 1, 0) <= limit {
            dp[(1 << j) * m + j] = inst.dist(0, j + 1);
        }
    }
    let mut best: Option<(f64, f64, usize, usize)> = None; // prize, length, mask, end
    for mask in 1usize..(1 << m) {
        let prize: f64 = (0..m).filter(|&j| mask & (1 << j) != 0).map(|j| inst.prizes()[j + 1]).sum();
        for j in 0..m {
            let cur = dp[mask * m + j];
            if mask & (1 << j) == 0 || !cur.is_finite() {
                continue;
            }
            let closed = cur + inst.dist(j + 1, 0);
            let improves = match best {
                None => true,
                Some((bp, bl, _, _)) => prize > bp || (prize == bp && closed < bl),
            };
            if improves {
                best = Some((prize, closed, mask, j));
            }
            for k in 0..m {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let step = cur + inst.dist(j + 1, k + 1);
                if step + inst.dist(k + 1, 0) > limit {
                    continue;
                }
                let next = mask | (1 << k);
                if step < dp[next * m + k] {
                    dp[next * m + k] = step;
                    parent[next * m + k] = j;
                }
            }
        }
    }
    let mut route = Vec::new();
    if let Some((_, _, mut mask, mut j)) = best {
        loop {
            route.push(j + 1);
            let p = parent[mask * m + j];
            mask &= !(1 << j);
            if p == usize::MAX {
                break;
            }
            j = p;
        }
        route.reverse();
    }
    let mut solution = Route(route);
    inst.extend_to_maximal(&mut solution);
    let objective = inst.route_prize(&solution);
    Ok(Labeled { instance: inst.clone(), solution, objective })
}
