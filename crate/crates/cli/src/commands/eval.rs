use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use asp_core::instances::primal_gap;
use asp_core::ProblemKind;
use serde::{Deserialize, Serialize};

use super::solve::RunRecord;
use crate::config::{echo, require_out, resolve};
use crate::error::{usage, CliResult};
use crate::Shared;

#[derive(Debug, clap::Args, Serialize)]
pub struct EvalArgs {
    /// Output directories of `solve` runs
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub runs: Vec<PathBuf>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub runs: Vec<PathBuf>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

pub const SUMMARY_HEADER: &str = "method,run,iteration,instances,mean_best_obj,mean_primal_gap,mean_avg_precision";

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub iteration: usize,
    pub best_pool_obj: f64,
    pub avg_precision: Option<f64>,
}

pub fn parse_trace(text: &str) -> CliResult<Vec<TraceRow>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 5 {
            return Err(usage(format!("trace line {}: expected 5 columns", i + 1)));
        }
        let bad = |c: &str| usage(format!("trace line {}: bad value '{c}'", i + 1));
        rows.push(TraceRow {
            iteration: cols[0].parse().map_err(|_| bad(cols[0]))?,
            best_pool_obj: cols[1].parse().map_err(|_| bad(cols[1]))?,
            avg_precision: if cols[3].is_empty() { None } else { Some(cols[3].parse().map_err(|_| bad(cols[3]))?) },
        });
    }
    Ok(rows)
}

/// Per-instance run records with their parsed traces.
pub type RunData = Vec<(RunRecord, Vec<TraceRow>)>;

/// Best objectives, primal gaps and average precisions at one iteration.
type IterationValues = (Vec<f64>, Vec<f64>, Vec<f64>);

/// Run records and traces of every instance directory in a solve output.
pub fn load_run(dir: &Path) -> CliResult<RunData> {
    let mut subdirs: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| usage(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.join("run.json").is_file())
        .collect();
    subdirs.sort();
    if subdirs.is_empty() {
        return Err(usage(format!("{} holds no solve results", dir.display())));
    }
    let mut out = Vec::with_capacity(subdirs.len());
    for d in subdirs {
        let rec: RunRecord = serde_json::from_str(&fs::read_to_string(d.join("run.json"))?)?;
        let trace = parse_trace(&fs::read_to_string(d.join("trace.csv"))?)?;
        out.push((rec, trace));
    }
    Ok(out)
}

fn mean(xs: &[f64]) -> Option<f64> {
    (!xs.is_empty()).then(|| xs.iter().sum::<f64>() / xs.len() as f64)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Summary rows per run and iteration. Instances whose trace ended early
/// carry their last record forward.
pub fn summarize(runs: &[(String, RunData)]) -> CliResult<String> {
    let mut kinds: Vec<ProblemKind> = runs.iter().flat_map(|(_, r)| r.iter().map(|(rec, _)| rec.problem)).collect();
    kinds.dedup();
    if let Some(k) = kinds.iter().find(|&&k| k != kinds[0]) {
        return Err(usage(format!("refusing to mix problem kinds {} and {k}", kinds[0])));
    }
    let mut csv = String::from(SUMMARY_HEADER);
    csv.push('\n');
    for (name, records) in runs {
        let max_iter = records.iter().filter_map(|(_, t)| t.last().map(|r| r.iteration)).max().unwrap_or(0);
        let mut methods: Vec<&str> = records.iter().map(|(r, _)| r.method.as_str()).collect();
        methods.dedup();
        let method = if methods.len() == 1 { methods[0] } else { "mixed" };
        let mut by_iter: BTreeMap<usize, IterationValues> = BTreeMap::new();
        for (rec, trace) in records {
            for it in 1..=max_iter {
                let Some(row) = trace.iter().rev().find(|r| r.iteration <= it) else { continue };
                let e = by_iter.entry(it).or_default();
                e.0.push(row.best_pool_obj);
                if let Some(opt) = rec.optimum.filter(|&o| o != 0.0) {
                    e.1.push(primal_gap(row.best_pool_obj, opt)?);
                }
                if let Some(ap) = row.avg_precision {
                    e.2.push(ap);
                }
            }
        }
        for (it, (objs, gaps, aps)) in by_iter {
            let _ = writeln!(
                csv,
                "{method},{name},{it},{},{},{},{}",
                objs.len(),
                fmt_opt(mean(&objs)),
                fmt_opt(mean(&gaps)),
                fmt_opt(mean(&aps))
            );
        }
    }
    Ok(csv)
}

pub fn run(shared: &Shared, args: &EvalArgs) -> CliResult<()> {
    let cfg: EvalConfig = resolve(shared, args)?;
    let out = require_out(&cfg.out)?;
    if cfg.runs.is_empty() {
        return Err(usage("no run directories given"));
    }
    let mut runs = Vec::with_capacity(cfg.runs.len());
    for r in &cfg.runs {
        runs.push((r.display().to_string(), load_run(r)?));
    }
    let csv = summarize(&runs)?;
    fs::create_dir_all(&out)?;
    fs::write(out.join("summary.csv"), csv)?;
    echo(&out, "eval", &cfg)
}
