use std::fs;
use std::path::PathBuf;

use asp_core::instances::dataset::instance_seed;
use asp_core::instances::generate::WEIGHT_CONVENTION;
use asp_core::instances::{gen_ba, gen_er, gen_op, gen_tsp, PrizeScheme};
use asp_core::problems::io::AnyInstance;
use asp_core::ProblemKind;
use serde::{Deserialize, Serialize};

use crate::config::{echo, require_out, resolve};
use crate::dataset::INSTANCES;
use crate::error::{usage, CliResult};
use crate::Shared;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum GraphModel {
    #[default]
    Er,
    Ba,
}

#[derive(Debug, clap::Args, Serialize)]
pub struct GenArgs {
    /// mwcp, tsp or op
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemKind>,
    /// Number of instances
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    /// Vertices, cities or locations per instance
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Random graph model for mwcp
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<GraphModel>,
    /// Edge probability of ER graphs
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub density: Option<f64>,
    /// Edges per new vertex of BA graphs
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ba_m: Option<usize>,
    /// constant, uniform or distance (op)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prize_scheme: Option<PrizeScheme>,
    /// Mean optimal TSP tour length used to draw op budgets
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_tour_len: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub problem: Option<ProblemKind>,
    pub count: usize,
    pub n: usize,
    pub generator: GraphModel,
    pub density: f64,
    pub ba_m: usize,
    pub prize_scheme: PrizeScheme,
    /// Defaults to `0.7124 sqrt(n)`, the asymptotic optimal tour length of
    /// `n` uniform points in the unit square.
    pub mean_tour_len: Option<f64>,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            problem: None,
            count: 10,
            n: 30,
            generator: GraphModel::Er,
            density: 0.25,
            ba_m: 3,
            prize_scheme: PrizeScheme::Uniform,
            mean_tour_len: None,
            seed: 0,
            out: None,
            threads: None,
        }
    }
}

pub fn generate(cfg: &GenConfig, index: usize) -> CliResult<(AnyInstance, Vec<String>)> {
    let problem = cfg.problem.ok_or_else(|| usage("missing --problem"))?;
    let seed = instance_seed(cfg.seed, index);
    let n = cfg.n;
    Ok(match problem {
        ProblemKind::Mwcp => {
            let (g, desc) = match cfg.generator {
                GraphModel::Er => {
                    (gen_er(n, cfg.density, seed)?, format!("er n={n} density={} seed={seed}", cfg.density))
                }
                GraphModel::Ba => (gen_ba(n, cfg.ba_m, seed)?, format!("ba n={n} m={} seed={seed}", cfg.ba_m)),
            };
            (AnyInstance::Mwcp(g), vec![desc, WEIGHT_CONVENTION.to_string()])
        }
        ProblemKind::Tsp => (AnyInstance::Tsp(gen_tsp(n, seed)?), Vec::new()),
        ProblemKind::Op => {
            let d = cfg.mean_tour_len.unwrap_or(0.7124 * (n as f64).sqrt());
            (AnyInstance::Op(gen_op(n, cfg.prize_scheme, d, seed)?), Vec::new())
        }
    })
}

pub fn run(shared: &Shared, args: &GenArgs) -> CliResult<()> {
    let cfg: GenConfig = resolve(shared, args)?;
    let out = require_out(&cfg.out)?;
    if cfg.count == 0 {
        return Err(usage("--count must be at least 1"));
    }
    let mut files = Vec::with_capacity(cfg.count);
    for i in 0..cfg.count {
        let (inst, comments) = generate(&cfg, i)?;
        files.push((format!("inst_{i:04}.{}", inst.file_extension()), inst.to_file_string(&comments)?));
    }
    let dir = out.join(INSTANCES);
    fs::create_dir_all(&dir)?;
    for (name, text) in files {
        fs::write(dir.join(name), text)?;
    }
    echo(&out, "gen", &cfg)
}
