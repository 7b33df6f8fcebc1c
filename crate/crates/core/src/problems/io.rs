//! File formats: extended DIMACS graphs, JSON point-set instances and JSON
//! solution files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Clique, OpInstance, ProblemKind, Route, Tour, TspInstance, WeightedGraph};
use crate::error::{Error, Result};

/// Parses an extended DIMACS graph: `p edge <n> <m>`, `v <i> <w>`,
/// `e <i> <j>` with 1-based vertices. Vertices without a `v` line get
/// weight 1.
pub fn parse_dimacs(text: &str) -> Result<WeightedGraph> {
    let mut n = None;
    let mut weights: Vec<Option<f64>> = Vec::new();
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let err = |msg: &str| Error::Parse(format!("line {}: {msg}: '{line}'", lineno + 1));
        let mut tok = line.split_whitespace();
        match tok.next() {
            None | Some("c") | Some("%") => continue,
            Some("p") => {
                let _format = tok.next().ok_or_else(|| err("missing format"))?;
                let nv: usize = tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| err("bad vertex count"))?;
                n = Some(nv);
                weights = vec![None; nv];
            }
            Some("v") | Some("n") => {
                let nv = n.ok_or_else(|| err("vertex line before problem line"))?;
                let i: usize = tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| err("bad vertex id"))?;
                let w: f64 = tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| err("bad weight"))?;
                if i == 0 || i > nv {
                    return Err(err("vertex id out of range"));
                }
                weights[i - 1] = Some(w);
            }
            Some("e") => {
                let nv = n.ok_or_else(|| err("edge line before problem line"))?;
                let i: usize = tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| err("bad edge endpoint"))?;
                let j: usize = tok.next().and_then(|t| t.parse().ok()).ok_or_else(|| err("bad edge endpoint"))?;
                if i == 0 || j == 0 || i > nv || j > nv {
                    return Err(err("edge endpoint out of range"));
                }
                edges.push((i - 1, j - 1));
            }
            Some(_) => return Err(err("unrecognized line")),
        }
    }
    let n = n.ok_or_else(|| Error::Parse("missing 'p' line".into()))?;
    WeightedGraph::new(n, &edges, weights.into_iter().map(|w| w.unwrap_or(1.0)).collect())
}

pub fn write_dimacs(graph: &WeightedGraph, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        let _ = writeln!(out, "c {c}");
    }
    let _ = writeln!(out, "p edge {} {}", graph.n(), graph.num_edges());
    for (v, w) in graph.weights().iter().enumerate() {
        let _ = writeln!(out, "v {} {}", v + 1, w);
    }
    for (i, j) in graph.edges() {
        let _ = writeln!(out, "e {} {}", i + 1, j + 1);
    }
    out
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PointsFile {
    pub coords: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prizes: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depot: Option<usize>,
}

impl From<&TspInstance> for PointsFile {
    fn from(inst: &TspInstance) -> Self {
        PointsFile { coords: inst.coords().to_vec(), prizes: None, budget: None, depot: None }
    }
}

impl From<&OpInstance> for PointsFile {
    fn from(inst: &OpInstance) -> Self {
        PointsFile {
            coords: inst.coords().to_vec(),
            prizes: Some(inst.prizes().to_vec()),
            budget: Some(inst.budget()),
            depot: Some(0),
        }
    }
}

/// Any of the three instance types, as loaded from disk.
#[derive(Debug, Clone)]
pub enum AnyInstance {
    Mwcp(WeightedGraph),
    Tsp(TspInstance),
    Op(OpInstance),
}

impl AnyInstance {
    pub fn kind(&self) -> ProblemKind {
        match self {
            AnyInstance::Mwcp(_) => ProblemKind::Mwcp,
            AnyInstance::Tsp(_) => ProblemKind::Tsp,
            AnyInstance::Op(_) => ProblemKind::Op,
        }
    }

    pub fn from_points(file: PointsFile) -> Result<Self> {
        match (file.prizes, file.budget) {
            (None, None) => Ok(AnyInstance::Tsp(TspInstance::new(file.coords)?)),
            (Some(prizes), Some(budget)) => {
                if file.depot.unwrap_or(0) != 0 {
                    return Err(Error::invalid("depot must be location 0"));
                }
                Ok(AnyInstance::Op(OpInstance::new(file.coords, prizes, budget)?))
            }
            _ => Err(Error::Parse("OP instances need both 'prizes' and 'budget'".into())),
        }
    }

    /// Loads by extension: `.json` for point sets, anything else as DIMACS.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_points(serde_json::from_str(&text)?)
        } else {
            Ok(AnyInstance::Mwcp(parse_dimacs(&text)?))
        }
    }

    pub fn to_file_string(&self, comments: &[String]) -> Result<String> {
        Ok(match self {
            AnyInstance::Mwcp(g) => write_dimacs(g, comments),
            AnyInstance::Tsp(t) => serde_json::to_string_pretty(&PointsFile::from(t))? + "\n",
            AnyInstance::Op(o) => serde_json::to_string_pretty(&PointsFile::from(o))? + "\n",
        })
    }

    pub fn file_extension(&self) -> &'static str {
        match self {
            AnyInstance::Mwcp(_) => "col",
            _ => "json",
        }
    }
}

/// Solution file: vertex list (MWCP), city order (TSP) or visiting order
/// (OP), all 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub problem: ProblemKind,
    pub vars: Vec<usize>,
    pub objective: f64,
}

impl SolutionFile {
    pub fn clique(c: &Clique, objective: f64) -> Self {
        SolutionFile { problem: ProblemKind::Mwcp, vars: c.0.clone(), objective }
    }

    pub fn tour(t: &Tour, objective: f64) -> Self {
        SolutionFile { problem: ProblemKind::Tsp, vars: t.0.clone(), objective }
    }

    pub fn route(r: &Route, objective: f64) -> Self {
        SolutionFile { problem: ProblemKind::Op, vars: r.0.clone(), objective }
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}
