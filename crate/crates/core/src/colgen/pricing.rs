//! Pricing: finding independent sets with negative reduced cost.
//!
//! A set is independent in the colouring graph exactly when it is a clique
//! of the complement graph, so pricing is a maximum-weight clique problem on
//! the complement with the covering duals as vertex weights.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::master::MisColumn;
use crate::engine::{asp_run_observed, AspConfig};
use crate::error::Result;
use crate::instances::oracle::max_weight_clique;
use crate::ml::{Calibration, LinearModel};
use crate::problems::{Clique, WeightedGraph};

/// Columns with reduced cost below `-NRC_TOL` count as improving.
pub const NRC_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PricerKind {
    Heuristic,
    Exact,
}

impl PricerKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PricerKind::Heuristic => "heuristic",
            PricerKind::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone)]
pub struct PricingResult {
    /// Distinct columns with their reduced costs, ascending by cost.
    pub columns: Vec<(MisColumn, f64)>,
    pub pricer: PricerKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeuristicParams {
    pub iterations: usize,
    /// Samples per iteration; defaults to the vertex count.
    pub samples: Option<usize>,
    pub seed: u64,
    /// Maximum number of columns returned; defaults to the vertex count.
    pub column_cap: Option<usize>,
}

impl Default for HeuristicParams {
    fn default() -> Self {
        Self { iterations: 10, samples: None, seed: 0, column_cap: None }
    }
}

/// `1 - sum of the duals of the column's vertices`.
pub fn reduced_cost(vertices: &[usize], duals: &[f64]) -> f64 {
    1.0 - vertices.iter().map(|&v| duals[v]).sum::<f64>()
}

/// Duals with simplex noise below zero removed.
pub fn clamp_duals(duals: &[f64]) -> Vec<f64> {
    duals.iter().map(|&d| d.max(0.0)).collect()
}

/// Runs the adaptive sampler on the dual-weighted complement graph and
/// collects every distinct sampled set whose reduced cost is negative.
pub fn price_heuristic(
    duals: &[f64],
    complement: &WeightedGraph,
    model: &LinearModel,
    cal: &Calibration,
    params: &HeuristicParams,
) -> Result<PricingResult> {
    let n = complement.n();
    let weighted = complement.with_weights(clamp_duals(duals))?;
    let config = AspConfig {
        iterations: params.iterations,
        samples: params.samples.unwrap_or(n),
        pool_size: None,
        seed: params.seed,
        pinned_fraction: None,
        time_budget_ms: None,
        stall_iterations: None,
    };
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut found: Vec<(MisColumn, f64)> = Vec::new();
    asp_run_observed(&weighted, model, cal, &config, None, &mut |c: &Clique, _| {
        let cost = reduced_cost(&c.0, duals);
        if cost < -NRC_TOL && seen.insert(c.0.clone()) {
            found.push((MisColumn::unchecked(c.0.clone(), n), cost));
        }
    })?;
    found.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    found.truncate(params.column_cap.unwrap_or(n));
    Ok(PricingResult { columns: found, pricer: PricerKind::Heuristic })
}

/// Minimum-reduced-cost maximal independent set, found by the exact clique
/// solver on the complement.
pub fn price_exact(duals: &[f64], complement: &WeightedGraph) -> Result<(MisColumn, f64)> {
    let weighted = complement.with_weights(clamp_duals(duals))?;
    let (clique, _) = max_weight_clique(&weighted)?;
    let cost = reduced_cost(&clique.0, duals);
    Ok((MisColumn::unchecked(clique.0, complement.n()), cost))
}
