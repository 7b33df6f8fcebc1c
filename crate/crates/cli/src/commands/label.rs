use std::fs;
use std::path::{Path, PathBuf};

use asp_core::instances::Labeled;
use asp_core::problems::io::AnyInstance;
use asp_core::problems::{OpInstance, TspInstance, WeightedGraph};
use asp_core::{Error, ProblemKind};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{echo, resolve};
use crate::dataset::{instance_files, load_instances, stem, typed, CliProblem, LABELS};
use crate::error::{usage, CliResult};
use crate::Shared;

#[derive(Debug, clap::Args, Serialize)]
pub struct LabelArgs {
    /// Dataset directory (with instances/) or a single instance file
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LabelConfig {
    pub data: Option<PathBuf>,
    /// Defaults to the dataset directory.
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub threads: Option<usize>,
}

/// Solves every instance exactly. All guards are checked before any
/// solving starts, and nothing is returned unless every instance is solved.
pub fn label_all<P: CliProblem>(instances: &[P], files: &[PathBuf]) -> CliResult<Vec<(String, String)>> {
    for (inst, f) in instances.iter().zip(files) {
        if inst.size() > P::GUARD {
            return Err(Error::OracleGuard(format!(
                "{}: {} oracle limited to n <= {}, got {}",
                f.display(),
                P::KIND,
                P::GUARD,
                inst.size()
            ))
            .into());
        }
    }
    let labeled: Vec<asp_core::Result<Labeled<P>>> = instances.par_iter().map(|i| i.exact()).collect();
    let mut out = Vec::with_capacity(files.len());
    for (l, f) in labeled.into_iter().zip(files) {
        let l = l?;
        out.push((format!("{}.json", stem(f)), P::solution_file(&l.solution, l.objective).to_json()?));
    }
    Ok(out)
}

fn dispatch(kind: ProblemKind, instances: Vec<AnyInstance>, files: &[PathBuf]) -> CliResult<Vec<(String, String)>> {
    match kind {
        ProblemKind::Mwcp => label_all(&typed::<WeightedGraph>(instances), files),
        ProblemKind::Tsp => label_all(&typed::<TspInstance>(instances), files),
        ProblemKind::Op => label_all(&typed::<OpInstance>(instances), files),
    }
}

pub fn run(shared: &Shared, args: &LabelArgs) -> CliResult<()> {
    let cfg: LabelConfig = resolve(shared, args)?;
    let data = cfg.data.clone().ok_or_else(|| usage("missing --data"))?;
    let out = cfg.out.clone().unwrap_or_else(|| if data.is_file() { Path::new(".").into() } else { data.clone() });
    let files = instance_files(&data)?;
    let (kind, instances) = load_instances(&files)?;
    let labels = dispatch(kind, instances, &files)?;
    let dir = out.join(LABELS);
    fs::create_dir_all(&dir)?;
    for (name, text) in labels {
        fs::write(dir.join(name), text)?;
    }
    echo(&out, "label", &cfg)
}
