//! The column generation loop.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::master::{MisColumn, RestrictedMaster, RmpSolution};
use super::pricing::{clamp_duals, price_exact, price_heuristic, HeuristicParams, PricerKind, NRC_TOL};
use crate::engine::sample_rng;
use crate::error::{Error, Result};
use crate::ml::{Calibration, LinearModel};
use crate::problems::{Clique, Problem, WeightedGraph};

pub const CG_TRACE_HEADER: &str = "iteration,lp_obj,new_columns,pricer,elapsed_ms";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CgConfig {
    pub seed: u64,
    /// Use the learned sampler before falling back to exact pricing.
    pub heuristic: bool,
    pub asp_iterations: usize,
    /// Samples per sampler iteration; defaults to the vertex count.
    pub asp_samples: Option<usize>,
    /// Columns added per heuristic round; defaults to the vertex count.
    pub column_cap: Option<usize>,
    /// Random initial columns; defaults to `10 n`.
    pub initial_columns: Option<usize>,
    pub max_iterations: usize,
}

impl Default for CgConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            heuristic: true,
            asp_iterations: 10,
            asp_samples: None,
            column_cap: None,
            initial_columns: None,
            max_iterations: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CgRecord {
    pub iteration: usize,
    pub lp_obj: f64,
    pub new_columns: usize,
    pub pricer: PricerKind,
    pub elapsed_ms: f64,
    pub cs_residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CgTrace {
    pub records: Vec<CgRecord>,
}

impl CgTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CG_TRACE_HEADER);
        out.push('\n');
        for r in &self.records {
            let _ = writeln!(
                out,
                "{},{},{},{},{:.3}",
                r.iteration,
                r.lp_obj,
                r.new_columns,
                r.pricer.as_str(),
                r.elapsed_ms
            );
        }
        out
    }

    /// Number of LP solves (one per record).
    pub fn lp_solves(&self) -> usize {
        self.records.len()
    }

    pub fn columns_added(&self) -> usize {
        self.records.iter().map(|r| r.new_columns).sum()
    }
}

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub objective: f64,
    pub columns: Vec<MisColumn>,
    pub trace: CgTrace,
    /// Reduced cost of the exact pricer's best column at termination.
    pub final_reduced_cost: f64,
    pub last_solution: RmpSolution,
}

/// Random maximal independent sets drawn by uniform sampling on the
/// complement graph (at most `10 count` attempts), followed by a greedy
/// cover that guarantees every vertex lies in some column.
pub fn init_columns(graph: &WeightedGraph, count: usize, seed: u64) -> Vec<MisColumn> {
    let n = graph.n();
    let comp = graph.complement();
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut out = Vec::new();
    for attempt in 0..10 * count {
        if out.len() >= count {
            break;
        }
        let mut rng = sample_rng(seed, 0, attempt);
        let c = comp.random_solution(attempt, &mut rng);
        if seen.insert(c.0.clone()) {
            out.push(MisColumn::unchecked(c.0, n));
        }
    }
    let mut covered = vec![false; n];
    for col in &out {
        for &v in col.vertices() {
            covered[v] = true;
        }
    }
    while let Some(v) = covered.iter().position(|&c| !c) {
        let mut set = Clique(vec![v]);
        comp.extend_to_maximal(&mut set);
        for &u in &set.0 {
            covered[u] = true;
        }
        if seen.insert(set.0.clone()) {
            out.push(MisColumn::unchecked(set.0, n));
        }
    }
    out
}

/// All maximal independent sets of `graph` (Bron-Kerbosch with pivoting on
/// the complement). Exponential; meant for small graphs.
pub fn all_maximal_independent_sets(graph: &WeightedGraph) -> Vec<MisColumn> {
    fn bk(g: &WeightedGraph, r: &mut Vec<usize>, p: Vec<usize>, x: Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if p.is_empty() && x.is_empty() {
            let mut s = r.clone();
            s.sort_unstable();
            out.push(s);
            return;
        }
        // neighbourhood in the complement = non-neighbours in g
        let nb = |u: usize, v: usize| u != v && !g.adjacent(u, v);
        let pivot = p
            .iter()
            .chain(&x)
            .copied()
            .max_by_key(|&u| p.iter().filter(|&&v| nb(u, v)).count())
            .expect("p or x nonempty");
        let branch: Vec<usize> = p.iter().copied().filter(|&v| !nb(pivot, v)).collect();
        let (mut p, mut x) = (p, x);
        for v in branch {
            r.push(v);
            let np = p.iter().copied().filter(|&u| nb(v, u)).collect();
            let nx = x.iter().copied().filter(|&u| nb(v, u)).collect();
            bk(g, r, np, nx, out);
            r.pop();
            p.retain(|&u| u != v);
            x.push(v);
        }
    }
    let mut sets = Vec::new();
    bk(graph, &mut Vec::new(), (0..graph.n()).collect(), Vec::new(), &mut sets);
    sets.sort();
    sets.into_iter().map(|s| MisColumn::unchecked(s, graph.n())).collect()
}

/// Heuristic pricer inputs: a classifier for the clique problem.
#[derive(Debug, Clone, Copy)]
pub struct PricingModel<'a> {
    pub model: &'a LinearModel,
    pub cal: &'a Calibration,
}

/// Column generation with the trace written into `trace` as it grows, so
/// callers keep it even when the loop fails.
pub fn cg_loop_with_trace(
    graph: &WeightedGraph,
    cfg: &CgConfig,
    pricer: Option<PricingModel<'_>>,
    trace: &mut CgTrace,
) -> Result<CgOutcome> {
    let n = graph.n();
    if cfg.heuristic && pricer.is_none() {
        return Err(Error::invalid("heuristic pricing needs a model"));
    }
    let start = Instant::now();
    let comp = graph.complement();
    let mut rmp = RestrictedMaster::new(graph.clone());
    for col in init_columns(graph, cfg.initial_columns.unwrap_or(10 * n), cfg.seed) {
        rmp.add_column(col)?;
    }
    let mut prev_obj = f64::INFINITY;
    for it in 1..=cfg.max_iterations {
        let sol = rmp.solve()?;
        if sol.objective > prev_obj + 1e-9 {
            return Err(Error::Numerical(format!(
                "LP objective rose from {prev_obj} to {} at iteration {it}",
                sol.objective
            )));
        }
        prev_obj = sol.objective;
        let duals = clamp_duals(&sol.duals);
        let mut record = |new_columns: usize, pricer: PricerKind| {
            trace.records.push(CgRecord {
                iteration: it,
                lp_obj: sol.objective,
                new_columns,
                pricer,
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
                cs_residual: sol.cs_residual,
            });
        };

        if let (true, Some(pm)) = (cfg.heuristic, pricer) {
            let params = HeuristicParams {
                iterations: cfg.asp_iterations,
                samples: cfg.asp_samples,
                seed: cfg.seed ^ ((it as u64) << 20),
                column_cap: cfg.column_cap,
            };
            let found = price_heuristic(&duals, &comp, pm.model, pm.cal, &params)?;
            let mut added = 0;
            for (col, _) in found.columns {
                if rmp.add_column(col)? {
                    added += 1;
                }
            }
            if added > 0 {
                record(added, PricerKind::Heuristic);
                continue;
            }
        }

        let (col, cost) = price_exact(&duals, &comp)?;
        if cost < -NRC_TOL {
            if !rmp.add_column(col)? {
                return Err(Error::Numerical(format!(
                    "exact pricer returned a column already in the master (reduced cost {cost:e})"
                )));
            }
            record(1, PricerKind::Exact);
            continue;
        }
        record(0, PricerKind::Exact);
        return Ok(CgOutcome {
            objective: sol.objective,
            columns: rmp.columns().to_vec(),
            trace: trace.clone(),
            final_reduced_cost: cost,
            last_solution: sol,
        });
    }
    Err(Error::NonConvergence { iterations: cfg.max_iterations })
}

/// Solves the LP relaxation of the set-covering colouring formulation by
/// column generation. With `pricer` set and `cfg.heuristic` on, each round
/// first tries the learned sampler and only calls the exact pricer when it
/// finds nothing.
pub fn cg_loop(graph: &WeightedGraph, cfg: &CgConfig, pricer: Option<PricingModel<'_>>) -> Result<CgOutcome> {
    let mut trace = CgTrace::default();
    cg_loop_with_trace(graph, cfg, pricer, &mut trace)
}

/// Weighted complement graphs of every exact pricing problem met while
/// running exact-only column generation on `graph`. Solving these to
/// optimality gives training data for the pricing classifier.
pub fn harvest_pricing_instances(graph: &WeightedGraph, cfg: &CgConfig) -> Result<Vec<WeightedGraph>> {
    let n = graph.n();
    let comp = graph.complement();
    let mut rmp = RestrictedMaster::new(graph.clone());
    for col in init_columns(graph, cfg.initial_columns.unwrap_or(10 * n), cfg.seed) {
        rmp.add_column(col)?;
    }
    let mut out = Vec::new();
    for _ in 0..cfg.max_iterations {
        let sol = rmp.solve()?;
        let duals = clamp_duals(&sol.duals);
        out.push(comp.with_weights(duals.clone())?);
        let (col, cost) = price_exact(&duals, &comp)?;
        if cost >= -NRC_TOL || !rmp.add_column(col)? {
            return Ok(out);
        }
    }
    Err(Error::NonConvergence { iterations: cfg.max_iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact_cfg() -> CgConfig {
        CgConfig { heuristic: false, ..CgConfig::default() }
    }

    #[test]
    fn small_graphs() {
        let edgeless = WeightedGraph::new(6, &[], vec![1.0; 6]).unwrap();
        assert_eq!(cg_loop(&edgeless, &exact_cfg(), None).unwrap().objective, 1.0);

        let k: Vec<_> = (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j))).collect();
        let k5 = WeightedGraph::new(5, &k, vec![1.0; 5]).unwrap();
        assert_eq!(cg_loop(&k5, &exact_cfg(), None).unwrap().objective, 5.0);

        let c5 = WeightedGraph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)], vec![1.0; 5]).unwrap();
        for seed in 0..5 {
            let cfg = CgConfig { seed, initial_columns: Some(1), ..exact_cfg() };
            let out = cg_loop(&c5, &cfg, None).unwrap();
            assert!((out.objective - 2.5).abs() < 1e-6);
            assert!(out.final_reduced_cost >= -1e-9);
        }
    }

    #[test]
    fn init_columns_cover() {
        let k: Vec<_> = (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j))).collect();
        let k4 = WeightedGraph::new(4, &k, vec![1.0; 4]).unwrap();
        let cols = init_columns(&k4, 40, 0);
        assert_eq!(cols.len(), 4);
        assert!(cols.iter().all(|c| c.len() == 1));

        let edgeless = WeightedGraph::new(4, &[], vec![1.0; 4]).unwrap();
        let cols = init_columns(&edgeless, 40, 0);
        assert_eq!(cols.len(), 1);
        assert_eq!(cols[0].vertices(), &[0, 1, 2, 3]);

        let g = crate::instances::gen_er(12, 0.4, 5).unwrap();
        let cols = init_columns(&g, 3, 1);
        assert!(cols.iter().all(|c| c.validate(&g).is_ok()));
        assert!((0..12).all(|v| cols.iter().any(|c| c.covers(v))));
    }

    #[test]
    fn mis_enumeration() {
        let c5 = WeightedGraph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)], vec![1.0; 5]).unwrap();
        let all = all_maximal_independent_sets(&c5);
        assert_eq!(all.len(), 5);
        assert!(all.iter().all(|c| c.len() == 2 && c.validate(&c5).is_ok()));
    }

    #[test]
    fn trace_csv() {
        let c5 = WeightedGraph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)], vec![1.0; 5]).unwrap();
        let out = cg_loop(&c5, &exact_cfg(), None).unwrap();
        let csv = out.trace.to_csv();
        assert!(csv.starts_with("iteration,lp_obj,new_columns,pricer,elapsed_ms\n"));
        assert!(csv.trim_end().lines().last().unwrap().contains(",0,exact,"));
    }

    #[test]
    fn heuristic_requires_model() {
        let g = WeightedGraph::new(3, &[], vec![1.0; 3]).unwrap();
        assert!(cg_loop(&g, &CgConfig::default(), None).is_err());
    }
}
