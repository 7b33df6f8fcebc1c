use std::fs;
use std::path::{Path, PathBuf};

use asp_core::instances::primal_gap;
use asp_core::problems::{OpInstance, TspInstance, WeightedGraph};
use asp_core::{asp_run, AspConfig, AspOutcome, ModelFile, ProblemKind};
use serde::{Deserialize, Serialize};

use crate::config::{echo, require_out, resolve};
use crate::dataset::{instance_files, load_instances, load_label, stem, typed, CliProblem, LABELS};
use crate::error::{usage, CliResult};
use crate::Shared;

#[derive(Debug, clap::Args, Serialize)]
pub struct SolveArgs {
    /// Model file written by `train`
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
    /// Instance file or dataset directory
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    /// Directory of optimal solutions (default: <input>/labels when present)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub labels: Option<PathBuf>,
    /// Sampler iterations T (1 gives single-shot prediction)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    /// Samples per iteration M (default: problem preset)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Pool capacity (default: M)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pool_size: Option<usize>,
    /// Fraction of the initial pool that is never evicted (default: problem preset)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pinned_fraction: Option<f64>,
    /// Stop after this many milliseconds
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_budget_ms: Option<u64>,
    /// Stop after this many iterations without a pool change
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stall_iterations: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveConfig {
    pub model: Option<PathBuf>,
    pub input: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub iterations: usize,
    pub samples: Option<usize>,
    pub pool_size: Option<usize>,
    pub pinned_fraction: Option<f64>,
    pub time_budget_ms: Option<u64>,
    pub stall_iterations: Option<usize>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            model: None,
            input: None,
            labels: None,
            iterations: 10,
            samples: None,
            pool_size: None,
            pinned_fraction: None,
            time_budget_ms: None,
            stall_iterations: None,
            seed: 0,
            out: None,
            threads: None,
        }
    }
}

/// Per-instance result summary written as `run.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub problem: ProblemKind,
    pub method: String,
    pub iterations: usize,
    pub samples: usize,
    pub seed: u64,
    pub best_objective: f64,
    pub optimum: Option<f64>,
    pub primal_gap: Option<f64>,
    pub final_avg_precision: Option<f64>,
}

pub fn method_name(iterations: usize) -> &'static str {
    if iterations == 1 {
        "SSSP"
    } else {
        "ASP"
    }
}

struct SolvedInstance {
    name: String,
    solution_json: String,
    trace_csv: String,
    record: RunRecord,
}

fn solve_all<P: CliProblem>(
    instances: Vec<P>,
    files: &[PathBuf],
    labels: Option<&Path>,
    model: &ModelFile,
    cfg: &SolveConfig,
) -> CliResult<Vec<SolvedInstance>> {
    let lm = model.model();
    let cal = model.calibration();
    let mut out = Vec::with_capacity(instances.len());
    for (inst, f) in instances.iter().zip(files) {
        let reference = match labels {
            Some(dir) => Some(load_label(inst, f, dir)?),
            None => None,
        };
        let config = AspConfig {
            iterations: cfg.iterations,
            samples: cfg.samples.unwrap_or_else(|| inst.default_samples()),
            pool_size: cfg.pool_size,
            seed: cfg.seed,
            pinned_fraction: cfg.pinned_fraction,
            time_budget_ms: cfg.time_budget_ms,
            stall_iterations: cfg.stall_iterations,
        };
        let y = reference.as_ref().map(|l| l.labels());
        let outcome: AspOutcome<P::Solution> = asp_run(inst, &lm, &cal, &config, y.as_deref())?;
        let optimum = reference.as_ref().map(|l| l.objective);
        let gap = match optimum {
            Some(o) if o != 0.0 => Some(primal_gap(outcome.best_objective, o)?),
            _ => None,
        };
        let record = RunRecord {
            instance: stem(f),
            problem: P::KIND,
            method: method_name(cfg.iterations).to_string(),
            iterations: cfg.iterations,
            samples: config.samples,
            seed: cfg.seed,
            best_objective: outcome.best_objective,
            optimum,
            primal_gap: gap,
            final_avg_precision: outcome.trace.records.last().and_then(|r| r.avg_precision),
        };
        out.push(SolvedInstance {
            name: stem(f),
            solution_json: P::solution_file(&outcome.best, outcome.best_objective).to_json()?,
            trace_csv: outcome.trace.to_csv(),
            record,
        });
    }
    Ok(out)
}

pub fn run(shared: &Shared, args: &SolveArgs) -> CliResult<()> {
    let cfg: SolveConfig = resolve(shared, args)?;
    let out = require_out(&cfg.out)?;
    let model_path = cfg.model.clone().ok_or_else(|| usage("missing --model"))?;
    let input = cfg.input.clone().ok_or_else(|| usage("missing --input"))?;
    let model = ModelFile::load(&model_path)?;
    let files = instance_files(&input)?;
    let (kind, instances) = load_instances(&files)?;
    if kind != model.problem {
        return Err(usage(format!("model is for {}, instances are {kind}", model.problem)));
    }
    let labels = cfg.labels.clone().or_else(|| {
        let d = input.join(LABELS);
        d.is_dir().then_some(d)
    });
    let labels = labels.as_deref();
    let solved = match kind {
        ProblemKind::Mwcp => solve_all(typed::<WeightedGraph>(instances), &files, labels, &model, &cfg)?,
        ProblemKind::Tsp => solve_all(typed::<TspInstance>(instances), &files, labels, &model, &cfg)?,
        ProblemKind::Op => solve_all(typed::<OpInstance>(instances), &files, labels, &model, &cfg)?,
    };
    for s in solved {
        let dir = out.join(&s.name);
        fs::create_dir_all(&dir)?;
        fs::write(dir.join("solution.json"), s.solution_json)?;
        fs::write(dir.join("trace.csv"), s.trace_csv)?;
        fs::write(dir.join("run.json"), serde_json::to_string_pretty(&s.record)? + "\n")?;
    }
    echo(&out, "solve", &cfg)
}
