use std::fs;
use std::path::PathBuf;

use asp_core::engine::{tune_calibration, TuningTrial};
use asp_core::features::assemble_features;
use asp_core::instances::dataset::instance_seed;
use asp_core::instances::{build_training_set, Labeled};
use asp_core::ml::{class_weights, hinge_objective, train_svm};
use asp_core::problems::{OpInstance, TspInstance, WeightedGraph};
use asp_core::{uniform_init, AspConfig, Calibration, LinearModel, ModelFile, ProblemKind, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::config::{echo, require_out, resolve};
use crate::dataset::{instance_files, load_instances, load_label, stem, typed, CliProblem, FEATURES, LABELS};
use crate::error::{usage, CliResult};
use crate::Shared;

#[derive(Debug, clap::Args, Serialize)]
pub struct TrainArgs {
    /// Labeled dataset directory
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
    /// Initial pool size for feature extraction (default: problem preset)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m_init: Option<usize>,
    /// Training epochs
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epochs: Option<usize>,
    /// Initial step size
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta0: Option<f64>,
    /// Step-size decay per epoch
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
    /// Random-search trials for the logistic parameters (0 keeps 1, 0)
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tune_trials: Option<usize>,
    /// Sampler iterations per tuning run
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tune_iterations: Option<usize>,
    /// Number of training instances reused for tuning
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tune_instances: Option<usize>,
    /// Also write per-instance feature CSVs
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub dump_features: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainRunConfig {
    pub data: Option<PathBuf>,
    pub m_init: Option<usize>,
    pub epochs: usize,
    pub eta0: f64,
    pub decay: f64,
    pub tune_trials: usize,
    pub tune_iterations: usize,
    pub tune_instances: usize,
    pub dump_features: bool,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for TrainRunConfig {
    fn default() -> Self {
        let t = TrainConfig::default();
        Self {
            data: None,
            m_init: None,
            epochs: t.epochs,
            eta0: t.eta0,
            decay: t.decay,
            tune_trials: 32,
            tune_iterations: 5,
            tune_instances: 5,
            dump_features: false,
            seed: 0,
            out: None,
            threads: None,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct TrainSummary {
    pub problem: ProblemKind,
    pub instances: usize,
    pub examples: usize,
    pub positives: usize,
    pub r_plus: f64,
    pub r_minus: f64,
    pub hinge_objective: f64,
    pub training_accuracy: f64,
    pub tuning: Vec<TuningTrial>,
}

pub struct Trained {
    pub model: LinearModel,
    pub calibration: Calibration,
    pub summary: TrainSummary,
    pub feature_dumps: Vec<(String, String)>,
}

/// Trains and tunes a model on labeled instances.
pub fn train_on<P: CliProblem>(labeled: &[Labeled<P>], names: &[String], cfg: &TrainRunConfig) -> CliResult<Trained> {
    if labeled.is_empty() {
        return Err(usage("no labeled instances"));
    }
    let m_init = cfg.m_init.unwrap_or_else(|| labeled[0].instance.default_samples());
    let data = build_training_set(labeled, m_init, cfg.seed)?;
    let positives = data.iter().filter(|e| e.label == 1).count();
    let (r_plus, r_minus) = class_weights(positives, data.len() - positives)?;
    let tc = TrainConfig { r_plus, r_minus, epochs: cfg.epochs, eta0: cfg.eta0, decay: cfg.decay, seed: cfg.seed };
    let model = train_svm(&data, &tc)?;
    let correct = data.iter().filter(|e| (model.score(&e.features) >= 0.0) == (e.label == 1)).count();

    let (calibration, tuning) = if cfg.tune_trials == 0 {
        (Calibration::default(), Vec::new())
    } else {
        let k = cfg.tune_instances.clamp(1, labeled.len());
        let tune: Vec<P> = labeled[labeled.len() - k..].iter().map(|l| l.instance.clone()).collect();
        let asp = AspConfig::preset(&tune[0], cfg.tune_iterations.max(1), cfg.seed);
        tune_calibration(&model, &tune, cfg.tune_trials, &asp, cfg.seed)?
    };

    let mut feature_dumps = Vec::new();
    if cfg.dump_features {
        for (idx, (l, name)) in labeled.iter().zip(names).enumerate() {
            let pool = uniform_init(&l.instance, m_init, instance_seed(cfg.seed, idx));
            feature_dumps.push((format!("{name}.csv"), assemble_features(&l.instance, &pool)?.to_csv()));
        }
    }
    let summary = TrainSummary {
        problem: P::KIND,
        instances: labeled.len(),
        examples: data.len(),
        positives,
        r_plus,
        r_minus,
        hinge_objective: hinge_objective(&model, &data, r_plus, r_minus),
        training_accuracy: correct as f64 / data.len() as f64,
        tuning,
    };
    Ok(Trained { model, calibration, summary, feature_dumps })
}

fn load_and_train<P: CliProblem>(
    instances: Vec<P>,
    files: &[PathBuf],
    labels: &std::path::Path,
    cfg: &TrainRunConfig,
) -> CliResult<Trained> {
    let mut labeled = Vec::with_capacity(instances.len());
    for (inst, f) in instances.iter().zip(files) {
        labeled.push(load_label(inst, f, labels)?);
    }
    let names: Vec<String> = files.iter().map(|f| stem(f)).collect();
    train_on(&labeled, &names, cfg)
}

pub fn run(shared: &Shared, args: &TrainArgs) -> CliResult<()> {
    let cfg: TrainRunConfig = resolve(shared, args)?;
    let data = cfg.data.clone().ok_or_else(|| usage("missing --data"))?;
    let out = require_out(&cfg.out)?;
    let files = instance_files(&data)?;
    let labels = data.join(LABELS);
    let (kind, instances) = load_instances(&files)?;
    let trained = match kind {
        ProblemKind::Mwcp => load_and_train(typed::<WeightedGraph>(instances), &files, &labels, &cfg)?,
        ProblemKind::Tsp => load_and_train(typed::<TspInstance>(instances), &files, &labels, &cfg)?,
        ProblemKind::Op => load_and_train(typed::<OpInstance>(instances), &files, &labels, &cfg)?,
    };
    fs::create_dir_all(&out)?;
    ModelFile::new(kind, &trained.model, &trained.calibration).save(&out.join("model.json"))?;
    fs::write(out.join("train.json"), serde_json::to_string_pretty(&trained.summary)? + "\n")?;
    if !trained.feature_dumps.is_empty() {
        let dir = out.join(FEATURES);
        fs::create_dir_all(&dir)?;
        for (name, csv) in trained.feature_dumps {
            fs::write(dir.join(name), csv)?;
        }
    }
    echo(&out, "train", &cfg)
}
