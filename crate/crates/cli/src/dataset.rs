//! Dataset directory layout: `instances/`, `labels/`, `features/`.

use std::fs;
use std::path::{Path, PathBuf};

use asp_core::instances::oracle::{exact_mwcp, exact_op, exact_tsp, MWCP_MAX_N, OP_MAX_N, TSP_MAX_N};
use asp_core::instances::Labeled;
use asp_core::problems::io::{AnyInstance, SolutionFile};
use asp_core::problems::{Clique, OpInstance, Route, Tour, TspInstance, WeightedGraph};
use asp_core::{Error, Problem, ProblemKind};

use crate::error::{usage, CliResult};

pub const INSTANCES: &str = "instances";
pub const LABELS: &str = "labels";
pub const FEATURES: &str = "features";

/// Instance files of a dataset directory (or of `dir` itself when it has
/// no `instances/` subdirectory), sorted by name.
pub fn instance_files(dir: &Path) -> CliResult<Vec<PathBuf>> {
    if dir.is_file() {
        return Ok(vec![dir.to_path_buf()]);
    }
    let sub = dir.join(INSTANCES);
    let root = if sub.is_dir() { sub } else { dir.to_path_buf() };
    let mut files: Vec<PathBuf> = fs::read_dir(&root)
        .map_err(|e| usage(format!("cannot read {}: {e}", root.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == "col" || e == "json" || e == "clq"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(usage(format!("no instance files in {}", root.display())));
    }
    Ok(files)
}

pub fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Loads instances and checks that they are all of one problem kind.
pub fn load_instances(files: &[PathBuf]) -> CliResult<(ProblemKind, Vec<AnyInstance>)> {
    let mut out = Vec::with_capacity(files.len());
    for f in files {
        out.push(AnyInstance::load(f).map_err(|e| usage(format!("{}: {e}", f.display())))?);
    }
    let kind = out[0].kind();
    if let Some((f, i)) = files.iter().zip(&out).find(|(_, i)| i.kind() != kind) {
        return Err(usage(format!("{} is a {} instance, expected {kind}", f.display(), i.kind())));
    }
    Ok((kind, out))
}

/// Per-problem glue between the core types and the file formats.
pub trait CliProblem: Problem + Clone + Send + Sync + Sized {
    const GUARD: usize;
    fn size(&self) -> usize;
    fn from_any(inst: AnyInstance) -> Option<Self>;
    fn exact(&self) -> asp_core::Result<Labeled<Self>>;
    fn solution_file(s: &Self::Solution, objective: f64) -> SolutionFile;
    fn from_vars(vars: Vec<usize>) -> Self::Solution;
}

impl CliProblem for WeightedGraph {
    const GUARD: usize = MWCP_MAX_N;
    fn size(&self) -> usize {
        self.n()
    }
    fn from_any(inst: AnyInstance) -> Option<Self> {
        match inst {
            AnyInstance::Mwcp(g) => Some(g),
            _ => None,
        }
    }
    fn exact(&self) -> asp_core::Result<Labeled<Self>> {
        exact_mwcp(self)
    }
    fn solution_file(s: &Clique, objective: f64) -> SolutionFile {
        SolutionFile::clique(s, objective)
    }
    fn from_vars(vars: Vec<usize>) -> Clique {
        Clique::new(vars)
    }
}

impl CliProblem for TspInstance {
    const GUARD: usize = TSP_MAX_N;
    fn size(&self) -> usize {
        self.n()
    }
    fn from_any(inst: AnyInstance) -> Option<Self> {
        match inst {
            AnyInstance::Tsp(t) => Some(t),
            _ => None,
        }
    }
    fn exact(&self) -> asp_core::Result<Labeled<Self>> {
        exact_tsp(self)
    }
    fn solution_file(s: &Tour, objective: f64) -> SolutionFile {
        SolutionFile::tour(s, objective)
    }
    fn from_vars(vars: Vec<usize>) -> Tour {
        Tour(vars)
    }
}

impl CliProblem for OpInstance {
    const GUARD: usize = OP_MAX_N;
    fn size(&self) -> usize {
        self.n()
    }
    fn from_any(inst: AnyInstance) -> Option<Self> {
        match inst {
            AnyInstance::Op(o) => Some(o),
            _ => None,
        }
    }
    fn exact(&self) -> asp_core::Result<Labeled<Self>> {
        exact_op(self)
    }
    fn solution_file(s: &Route, objective: f64) -> SolutionFile {
        SolutionFile::route(s, objective)
    }
    fn from_vars(vars: Vec<usize>) -> Route {
        Route(vars)
    }
}

pub fn typed<P: CliProblem>(instances: Vec<AnyInstance>) -> Vec<P> {
    instances.into_iter().map(|i| P::from_any(i).expect("kind checked on load")).collect()
}

/// Reads the label of `instance_file` from `labels_dir` and checks it
/// against the instance. The stored objective is replaced by the
/// re-evaluated one.
pub fn load_label<P: CliProblem>(inst: &P, instance_file: &Path, labels_dir: &Path) -> CliResult<Labeled<P>> {
    let path = labels_dir.join(format!("{}.json", stem(instance_file)));
    if !path.is_file() {
        return Err(usage(format!("unlabeled instance {}: no {}", instance_file.display(), path.display())));
    }
    let file = SolutionFile::load(&path)?;
    if file.problem != P::KIND {
        return Err(usage(format!("{} labels a {} solution, expected {}", path.display(), file.problem, P::KIND)));
    }
    let solution = P::from_vars(file.vars);
    inst.check(&solution).map_err(|r| Error::Infeasible(format!("{}: {r}", path.display())))?;
    let objective = inst.objective(&solution);
    Ok(Labeled { instance: inst.clone(), solution, objective })
}
