//! Linear classifier with class-weighted hinge loss and logistic calibration
//! of its signed decision distances.

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::problems::ProblemKind;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub features: Vec<f64>,
    /// 1 if the variable is set in the reference optimum, else 0.
    pub label: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub w: Vec<f64>,
    pub b: f64,
}

/// Parameters of `p(d) = 1 / (1 + exp(-(beta0 d + beta1)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub beta0: f64,
    pub beta1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub r_plus: f64,
    pub r_minus: f64,
    pub epochs: usize,
    /// Initial step size; epoch `t` uses `eta0 / (1 + decay * t)`.
    pub eta0: f64,
    pub decay: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { r_plus: 1.0, r_minus: 1.0, epochs: 200, eta0: 0.01, decay: 0.1, seed: 0 }
    }
}

/// Penalty weights that balance the classes: `r_minus = 1`,
/// `r_plus = n_neg / n_pos`.
pub fn class_weights(n_pos: usize, n_neg: usize) -> Result<(f64, f64)> {
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::EmptyClass);
    }
    Ok((n_neg as f64 / n_pos as f64, 1.0))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl LinearModel {
    pub fn dim(&self) -> usize {
        self.w.len()
    }

    pub fn norm(&self) -> f64 {
        dot(&self.w, &self.w).sqrt()
    }

    /// Raw score `w.f + b`.
    pub fn score(&self, f: &[f64]) -> f64 {
        dot(&self.w, f) + self.b
    }

    /// Signed Euclidean distance `(w.f + b) / ||w||` from `f` to the
    /// separating hyperplane.
    pub fn decision_distance(&self, f: &[f64]) -> Result<f64> {
        if f.len() != self.w.len() {
            return Err(Error::DimensionMismatch { expected: self.w.len(), found: f.len() });
        }
        let norm = self.norm();
        if norm == 0.0 {
            return Err(Error::DegenerateModel);
        }
        Ok(self.score(f) / norm)
    }
}

impl Calibration {
    pub fn new(beta0: f64, beta1: f64) -> Result<Self> {
        if !(beta0 > 0.0) || !beta0.is_finite() || !beta1.is_finite() {
            return Err(Error::invalid(format!("calibration needs finite beta0 > 0, got ({beta0}, {beta1})")));
        }
        Ok(Self { beta0, beta1 })
    }

    /// Logistic map of a decision distance into [0, 1]. Saturates without
    /// producing NaN for extreme inputs.
    pub fn calibrate(&self, d: f64) -> f64 {
        let z = self.beta0 * d + self.beta1;
        if z.is_nan() {
            return 0.5;
        }
        if z >= 0.0 {
            1.0 / (1.0 + (-z).exp())
        } else {
            let e = z.exp();
            e / (1.0 + e)
        }
    }
}

impl Default for Calibration {
    fn default() -> Self {
        Self { beta0: 1.0, beta1: 0.0 }
    }
}

/// Per-row probabilities `calibrate(decision_distance(row))`.
pub fn predict(model: &LinearModel, cal: &Calibration, features: &FeatureMatrix) -> Result<Vec<f64>> {
    if features.rows() > 0 && features.cols() != model.dim() {
        return Err(Error::DimensionMismatch { expected: model.dim(), found: features.cols() });
    }
    let norm = model.norm();
    if norm == 0.0 {
        return Err(Error::DegenerateModel);
    }
    Ok(features.iter_rows().map(|row| cal.calibrate(model.score(row) / norm)).collect())
}

/// `0.5 |w|^2 + r_plus * sum_{y=1} xi + r_minus * sum_{y=0} xi` with hinge
/// slacks `xi = max(0, 1 - y (w.f + b))`, labels mapped to -1/+1.
pub fn hinge_objective(model: &LinearModel, data: &[TrainingExample], r_plus: f64, r_minus: f64) -> f64 {
    let mut obj = 0.5 * dot(&model.w, &model.w);
    for ex in data {
        let (y, r) = if ex.label == 1 { (1.0, r_plus) } else { (-1.0, r_minus) };
        obj += r * (1.0 - y * model.score(&ex.features)).max(0.0);
    }
    obj
}

fn validate(data: &[TrainingExample]) -> Result<usize> {
    let first = data.first().ok_or_else(|| Error::invalid("training data is empty"))?;
    let dim = first.features.len();
    let mut pos = 0;
    for ex in data {
        if ex.features.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: ex.features.len() });
        }
        if ex.features.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("training features"));
        }
        match ex.label {
            0 => {}
            1 => pos += 1,
            l => return Err(Error::invalid(format!("label {l} is not 0 or 1"))),
        }
    }
    if pos == 0 || pos == data.len() {
        return Err(Error::EmptyClass);
    }
    Ok(dim)
}

/// Trains `(w, b)` by seeded stochastic subgradient descent on the
/// class-weighted hinge objective. Each epoch visits every example once in a
/// shuffled order; the iterate with the lowest full objective at an epoch
/// boundary is returned.
pub fn train_svm(data: &[TrainingExample], config: &TrainConfig) -> Result<LinearModel> {
    let dim = validate(data)?;
    if !(config.r_plus > 0.0 && config.r_minus > 0.0) {
        return Err(Error::invalid("penalty weights must be positive"));
    }
    if config.epochs == 0 {
        return Err(Error::invalid("epochs must be positive"));
    }
    let n = data.len() as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut model = LinearModel { w: vec![0.0; dim], b: 0.0 };
    let mut best: Option<(f64, LinearModel)> = None;

    for epoch in 0..config.epochs {
        let eta = config.eta0 / (1.0 + config.decay * epoch as f64);
        order.shuffle(&mut rng);
        for &i in &order {
            let ex = &data[i];
            let (y, r) = if ex.label == 1 { (1.0, config.r_plus) } else { (-1.0, config.r_minus) };
            let margin = y * model.score(&ex.features);
            let shrink = 1.0 - eta / n;
            for w in &mut model.w {
                *w *= shrink;
            }
            if margin < 1.0 {
                let step = eta * r * y;
                for (w, f) in model.w.iter_mut().zip(&ex.features) {
                    *w += step * f;
                }
                model.b += step;
            }
        }
        let obj = hinge_objective(&model, data, config.r_plus, config.r_minus);
        if model.norm() > 0.0 && obj.is_finite() && best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, model.clone()));
        }
    }
    match best {
        Some((_, m)) if m.norm() > 0.0 => Ok(m),
        _ => Err(Error::DegenerateModel),
    }
}

/// Trained model as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub feature_names: Vec<String>,
    pub w: Vec<f64>,
    pub b: f64,
    pub beta0: f64,
    pub beta1: f64,
    pub problem: ProblemKind,
}

impl ModelFile {
    pub fn new(problem: ProblemKind, model: &LinearModel, cal: &Calibration) -> Self {
        ModelFile {
            feature_names: problem.feature_names(),
            w: model.w.clone(),
            b: model.b,
            beta0: cal.beta0,
            beta1: cal.beta1,
            problem,
        }
    }

    pub fn model(&self) -> LinearModel {
        LinearModel { w: self.w.clone(), b: self.b }
    }

    pub fn calibration(&self) -> Calibration {
        Calibration { beta0: self.beta0, beta1: self.beta1 }
    }

    pub fn validate(&self) -> Result<()> {
        let expected = self.problem.feature_names();
        if self.feature_names.len() != expected.len() {
            return Err(Error::DimensionMismatch { expected: expected.len(), found: self.feature_names.len() });
        }
        if self.feature_names != expected {
            return Err(Error::invalid(format!(
                "feature names {:?} do not match {} features {:?}",
                self.feature_names, self.problem, expected
            )));
        }
        if self.w.len() != expected.len() {
            return Err(Error::DimensionMismatch { expected: expected.len(), found: self.w.len() });
        }
        if self.w.iter().chain([&self.b, &self.beta0, &self.beta1]).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("model parameters"));
        }
        if self.beta0 <= 0.0 {
            return Err(Error::invalid("beta0 must be positive"));
        }
        if self.model().norm() == 0.0 {
            return Err(Error::DegenerateModel);
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: ModelFile = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    /// Writes through a temporary sibling file so readers never observe a
    /// partial model.
    pub fn save(&self, path: &Path) -> Result<()> {
        self.validate()?;
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, self.to_json()?)?;
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}
