use std::fs;
use std::path::PathBuf;

use asp_core::colgen::{cg_loop_with_trace, harvest_pricing_instances, CgConfig, CgTrace, PricingModel};
use asp_core::problems::io::{parse_dimacs, write_dimacs};
use asp_core::{ModelFile, ProblemKind};
use serde::{Deserialize, Serialize};

use crate::config::{echo, require_out, resolve};
use crate::dataset::INSTANCES;
use crate::error::{usage, CliResult};
use crate::Shared;

#[derive(Debug, clap::Args, Serialize)]
pub struct CgArgs {
    /// DIMACS graph to colour
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
    /// MWCP model for heuristic pricing; without it only the exact pricer runs
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
    /// Ignore the model and price exactly
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub exact_only: bool,
    /// Sampler iterations per heuristic pricing round
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asp_iterations: Option<usize>,
    /// Samples per sampler iteration (default: n)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub asp_samples: Option<usize>,
    /// Columns added per heuristic round (default: n)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column_cap: Option<usize>,
    /// Random initial columns (default: 10 n)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub initial_columns: Option<usize>,
    /// Column generation iteration cap
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_iterations: Option<usize>,
    /// Also write the exact pricing problems met along the way as a dataset
    /// under <out>/pricing for training a pricing model
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub harvest: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CgRunConfig {
    pub graph: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub exact_only: bool,
    pub asp_iterations: usize,
    pub asp_samples: Option<usize>,
    pub column_cap: Option<usize>,
    pub initial_columns: Option<usize>,
    pub max_iterations: usize,
    pub harvest: bool,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for CgRunConfig {
    fn default() -> Self {
        let c = CgConfig::default();
        Self {
            graph: None,
            model: None,
            exact_only: false,
            asp_iterations: c.asp_iterations,
            asp_samples: None,
            column_cap: None,
            initial_columns: None,
            max_iterations: c.max_iterations,
            harvest: false,
            seed: 0,
            out: None,
            threads: None,
        }
    }
}

#[derive(Debug, Serialize)]
struct CgSummary {
    lp_bound: f64,
    columns: usize,
    lp_solves: usize,
    columns_added: usize,
    heuristic: bool,
    final_reduced_cost: f64,
}

fn trace_text(trace: &CgTrace, bound: Option<f64>) -> String {
    let mut s = trace.to_csv();
    if let Some(b) = bound {
        s.push_str(&format!("lp_bound,{b}\n"));
    }
    s
}

pub fn run(shared: &Shared, args: &CgArgs) -> CliResult<()> {
    let cfg: CgRunConfig = resolve(shared, args)?;
    let out = require_out(&cfg.out)?;
    let graph_path = cfg.graph.clone().ok_or_else(|| usage("missing --graph"))?;
    let graph = parse_dimacs(&fs::read_to_string(&graph_path)?)?;
    let model = match &cfg.model {
        Some(p) if !cfg.exact_only => {
            let m = ModelFile::load(p)?;
            if m.problem != ProblemKind::Mwcp {
                return Err(usage(format!("pricing needs an mwcp model, got {}", m.problem)));
            }
            Some(m)
        }
        _ => None,
    };
    let lm = model.as_ref().map(|m| (m.model(), m.calibration()));
    let core = CgConfig {
        seed: cfg.seed,
        heuristic: lm.is_some(),
        asp_iterations: cfg.asp_iterations,
        asp_samples: cfg.asp_samples,
        column_cap: cfg.column_cap,
        initial_columns: cfg.initial_columns,
        max_iterations: cfg.max_iterations,
    };
    let pricer = lm.as_ref().map(|(model, cal)| PricingModel { model, cal });
    fs::create_dir_all(&out)?;
    let mut trace = CgTrace::default();
    let result = cg_loop_with_trace(&graph, &core, pricer, &mut trace);
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            fs::write(out.join("cg_trace.csv"), trace_text(&trace, None))?;
            return Err(e.into());
        }
    };
    fs::write(out.join("cg_trace.csv"), trace_text(&outcome.trace, Some(outcome.objective)))?;
    let summary = CgSummary {
        lp_bound: outcome.objective,
        columns: outcome.columns.len(),
        lp_solves: outcome.trace.lp_solves(),
        columns_added: outcome.trace.columns_added(),
        heuristic: core.heuristic,
        final_reduced_cost: outcome.final_reduced_cost,
    };
    fs::write(out.join("cg.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    if cfg.harvest {
        let dir = out.join("pricing").join(INSTANCES);
        fs::create_dir_all(&dir)?;
        let exact_cfg = CgConfig { heuristic: false, ..core };
        for (i, g) in harvest_pricing_instances(&graph, &exact_cfg)?.iter().enumerate() {
            fs::write(dir.join(format!("pricing_{i:04}.col")), write_dimacs(g, &["dual-weighted complement".into()]))?;
        }
    }
    echo(&out, "cg", &cfg)
}
