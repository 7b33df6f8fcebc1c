//! Probabilistic sampling and the adaptive solution prediction loop.
//!
//! Each iteration recomputes the statistical features from the pool, asks
//! the classifier for per-variable probabilities, draws a batch of
//! solutions guided by them, and merges the batch into the pool. With a
//! single iteration the loop reduces to single-shot prediction.
//!
//! Samples in a batch use independent RNG streams keyed by
//! `(seed, iteration, sample index)` and are merged in index order, so the
//! result does not depend on how many worker threads draw them.

use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::assemble_with;
use crate::instances::metrics::average_precision;
use crate::ml::{predict, Calibration, LinearModel};
use crate::pool::SamplePool;
use crate::problems::{Problem, Sense};

pub type SampleRng = ChaCha8Rng;

/// RNG stream for one sample of one iteration. Iteration 0 is the initial
/// pool.
pub fn sample_rng(seed: u64, iteration: usize, index: usize) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((iteration as u64) << 32) | index as u64);
    rng
}

/// Index drawn with probability proportional to `weights`; uniform when the
/// total mass is zero.
pub fn draw_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    debug_assert!(!weights.is_empty());
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return rng.gen_range(0..weights.len());
    }
    let mut u = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if u < w {
            return i;
        }
        u -= w;
    }
    // rounding left a sliver of mass past the end
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
}

/// Builds a feasible solution by repeatedly drawing a candidate with
/// probability proportional to its predicted value and pruning the
/// candidates that conflict with it, until none remain.
pub fn probabilistic_sample<P: Problem + ?Sized>(
    problem: &P,
    p: &[f64],
    sample_index: usize,
    rng: &mut SampleRng,
) -> P::Solution {
    let mut state = problem.ps_start(sample_index);
    let mut weights = Vec::new();
    loop {
        let cands = problem.ps_candidates(&state);
        if cands.is_empty() {
            break;
        }
        weights.clear();
        weights.extend(cands.iter().map(|&c| p[problem.ps_variable(&state, c)]));
        let pick = cands[draw_index(&weights, rng)];
        problem.ps_fix(&mut state, pick);
    }
    problem.ps_finish(state)
}

/// Like [`probabilistic_sample`] but always takes the candidate with the
/// highest prediction, ties going to the lowest candidate index.
pub fn greedy_construct<P: Problem + ?Sized>(problem: &P, p: &[f64], sample_index: usize) -> P::Solution {
    let mut state = problem.ps_start(sample_index);
    loop {
        let cands = problem.ps_candidates(&state);
        let Some(&first) = cands.first() else { break };
        let mut pick = first;
        let mut best = p[problem.ps_variable(&state, first)];
        for &c in &cands[1..] {
            let v = p[problem.ps_variable(&state, c)];
            if v > best {
                best = v;
                pick = c;
            }
        }
        problem.ps_fix(&mut state, pick);
    }
    problem.ps_finish(state)
}

/// Pool of up to `size` distinct random solutions. Duplicates are redrawn,
/// giving up after `10 * size` attempts.
pub fn uniform_init<P: Problem>(problem: &P, size: usize, seed: u64) -> SamplePool<P::Solution> {
    let mut pool = SamplePool::new(size, problem.sense(), problem.num_vars());
    for attempt in 0..10 * size {
        if pool.len() >= size {
            break;
        }
        let mut rng = sample_rng(seed, 0, attempt);
        let s = problem.random_solution(attempt, &mut rng);
        let obj = problem.objective(&s);
        pool.update(problem, s, obj);
    }
    pool
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AspConfig {
    /// Number of predict/sample rounds.
    pub iterations: usize,
    /// Samples drawn per round.
    pub samples: usize,
    /// Pool capacity; defaults to `samples`.
    #[serde(default)]
    pub pool_size: Option<usize>,
    pub seed: u64,
    /// Fraction of the initial pool that is never evicted; defaults to the
    /// problem's preset.
    #[serde(default)]
    pub pinned_fraction: Option<f64>,
    #[serde(default)]
    pub time_budget_ms: Option<u64>,
    /// Stop after this many consecutive rounds without a pool change.
    #[serde(default)]
    pub stall_iterations: Option<usize>,
}

impl AspConfig {
    /// Size-scaled preset for `problem`: `n`, `20n` or `50n` samples.
    pub fn preset<P: Problem>(problem: &P, iterations: usize, seed: u64) -> Self {
        AspConfig {
            iterations,
            samples: problem.default_samples(),
            pool_size: None,
            seed,
            pinned_fraction: None,
            time_budget_ms: None,
            stall_iterations: None,
        }
    }

    pub fn pool_capacity(&self) -> usize {
        self.pool_size.unwrap_or(self.samples)
    }

    fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::invalid("iterations must be at least 1"));
        }
        if self.samples == 0 || self.pool_capacity() == 0 {
            return Err(Error::invalid("samples and pool size must be at least 1"));
        }
        if let Some(f) = self.pinned_fraction {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::invalid(format!("pinned fraction {f} outside [0, 1]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub best_pool_obj: f64,
    pub best_iter_obj: f64,
    pub avg_precision: Option<f64>,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AspTrace {
    pub records: Vec<TraceRecord>,
}

pub const TRACE_HEADER: &str = "iteration,best_pool_obj,best_iter_obj,avg_precision,elapsed_ms";

impl AspTrace {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(TRACE_HEADER);
        out.push('\n');
        for r in &self.records {
            let ap = r.avg_precision.map(|a| a.to_string()).unwrap_or_default();
            let _ = writeln!(out, "{},{},{},{},{:.3}", r.iteration, r.best_pool_obj, r.best_iter_obj, ap, r.elapsed_ms);
        }
        out
    }

    /// True if the best pool objective never gets worse from one record to
    /// the next.
    pub fn is_monotone(&self, sense: Sense) -> bool {
        self.records.windows(2).all(|w| !sense.better(w[0].best_pool_obj, w[1].best_pool_obj))
    }
}

#[derive(Debug, Clone)]
pub struct AspOutcome<S> {
    /// Prediction of the last iteration.
    pub prediction: Vec<f64>,
    /// Prediction made from the initial pool.
    pub initial_prediction: Vec<f64>,
    pub best: S,
    pub best_objective: f64,
    pub trace: AspTrace,
}

/// Runs the loop. `reference` holds 0/1 labels of a known optimum; when
/// given, the trace records the average precision of each prediction.
pub fn asp_run<P: Problem>(
    problem: &P,
    model: &LinearModel,
    cal: &Calibration,
    config: &AspConfig,
    reference: Option<&[u8]>,
) -> Result<AspOutcome<P::Solution>> {
    asp_run_observed(problem, model, cal, config, reference, &mut |_, _| {})
}

/// [`asp_run`] that also hands every drawn solution (samples and
/// companions, in merge order) to `observer`.
pub fn asp_run_observed<P: Problem>(
    problem: &P,
    model: &LinearModel,
    cal: &Calibration,
    config: &AspConfig,
    reference: Option<&[u8]>,
    observer: &mut dyn FnMut(&P::Solution, f64),
) -> Result<AspOutcome<P::Solution>> {
    config.validate()?;
    let dim = P::KIND.feature_dim();
    if model.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: model.dim() });
    }
    if let Some(r) = reference {
        if r.len() != problem.num_vars() {
            return Err(Error::DimensionMismatch { expected: problem.num_vars(), found: r.len() });
        }
    }
    let start = Instant::now();
    let sense = problem.sense();
    let static_cols = problem.problem_features();

    let mut pool = uniform_init(problem, config.pool_capacity(), config.seed);
    if pool.is_empty() {
        return Err(Error::invalid("could not build an initial solution"));
    }
    let pinned = config.pinned_fraction.unwrap_or_else(|| problem.default_pinned_fraction());
    pool.pin_first((pinned * pool.len() as f64).floor() as usize);

    let mut trace = AspTrace::default();
    let mut prediction = Vec::new();
    let mut initial_prediction = Vec::new();
    let mut stall = 0;

    for t in 1..=config.iterations {
        let features = assemble_with(&static_cols, &pool)?;
        prediction = predict(model, cal, &features)?;
        if t == 1 {
            initial_prediction = prediction.clone();
        }

        let p = &prediction;
        let mut batch: Vec<(P::Solution, f64)> = (0..config.samples)
            .into_par_iter()
            .map(|m| {
                let mut rng = sample_rng(config.seed, t, m);
                let s = probabilistic_sample(problem, p, m, &mut rng);
                let obj = problem.objective(&s);
                (s, obj)
            })
            .collect();
        batch.extend(problem.companions(p).into_iter().map(|s| {
            let obj = problem.objective(&s);
            (s, obj)
        }));

        let mut best_iter: Option<f64> = None;
        let mut changed = false;
        for (s, obj) in batch {
            observer(&s, obj);
            if best_iter.is_none_or(|b| sense.better(obj, b)) {
                best_iter = Some(obj);
            }
            changed |= pool.update(problem, s, obj);
        }

        let best_pool = pool.best().expect("pool is nonempty").objective;
        trace.records.push(TraceRecord {
            iteration: t,
            best_pool_obj: best_pool,
            best_iter_obj: best_iter.unwrap_or(best_pool),
            avg_precision: reference.map(|r| average_precision(p, r)).transpose()?,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        });

        stall = if changed { 0 } else { stall + 1 };
        if config.stall_iterations.is_some_and(|s| stall >= s) {
            break;
        }
        if config.time_budget_ms.is_some_and(|b| start.elapsed().as_millis() >= b as u128) {
            break;
        }
    }

    let best = pool.best().expect("pool is nonempty");
    Ok(AspOutcome {
        prediction,
        initial_prediction,
        best: best.solution.clone(),
        best_objective: best.objective,
        trace,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningTrial {
    pub calibration: Calibration,
    /// Mean best objective over the tuning instances.
    pub score: f64,
}

pub const BETA0_RANGE: (f64, f64) = (0.1, 20.0);
pub const BETA1_RANGE: (f64, f64) = (-5.0, 5.0);

/// Seeded random search over the logistic parameters. Every trial runs the
/// loop with `config` on each tuning instance and is scored by the mean best
/// objective; the first trial with the best score wins.
pub fn tune_calibration<P: Problem>(
    model: &LinearModel,
    instances: &[P],
    trials: usize,
    config: &AspConfig,
    seed: u64,
) -> Result<(Calibration, Vec<TuningTrial>)> {
    if instances.is_empty() || trials == 0 {
        return Err(Error::invalid("tuning needs at least one instance and one trial"));
    }
    let sense = P::KIND.sense();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut history = Vec::with_capacity(trials);
    for _ in 0..trials {
        let cal =
            Calibration::new(rng.gen_range(BETA0_RANGE.0..BETA0_RANGE.1), rng.gen_range(BETA1_RANGE.0..BETA1_RANGE.1))?;
        let mut total = 0.0;
        for inst in instances {
            total += asp_run(inst, model, &cal, config, None)?.best_objective;
        }
        history.push(TuningTrial { calibration: cal, score: total / instances.len() as f64 });
    }
    let best = history
        .iter()
        .fold(None::<&TuningTrial>, |acc, t| match acc {
            Some(a) if !sense.better(t.score, a.score) => Some(a),
            _ => Some(t),
        })
        .expect("at least one trial");
    Ok((best.calibration, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{Clique, OpInstance, TspInstance, WeightedGraph};

    #[test]
    fn draw_index_fallback_and_bias() {
        let mut rng = sample_rng(1, 0, 0);
        for _ in 0..100 {
            assert!(draw_index(&[0.0, 0.0, 0.0], &mut rng) < 3);
        }
        for _ in 0..100 {
            assert_eq!(draw_index(&[0.0, 2.0, 0.0], &mut rng), 1);
        }
    }

    #[test]
    fn complete_graph_gives_full_clique() {
        let g = WeightedGraph::new(3, &[(0, 1), (1, 2), (0, 2)], vec![1.0; 3]).unwrap();
        let mut rng = sample_rng(7, 1, 0);
        let c = probabilistic_sample(&g, &[0.3, 0.2, 0.9], 0, &mut rng);
        assert_eq!(c, Clique(vec![0, 1, 2]));
    }

    #[test]
    fn zero_probability_candidate_uses_fallback() {
        // edge 1-2 (0-based 0-1) plus isolated vertex 3 (0-based 2)
        let g = WeightedGraph::new(3, &[(0, 1)], vec![1.0; 3]).unwrap();
        for seed in 0..20 {
            let mut rng = sample_rng(seed, 1, 0);
            let c = probabilistic_sample(&g, &[1.0, 0.0, 0.0], 0, &mut rng);
            assert_eq!(c, Clique(vec![0, 1]));
        }
    }

    #[test]
    fn tsp_samples_are_tours() {
        let inst = TspInstance::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]).unwrap();
        let p = vec![0.5; 6];
        for m in 0..10 {
            let mut rng = sample_rng(3, 1, m);
            let t = probabilistic_sample(&inst, &p, m, &mut rng);
            assert!(inst.check(&t).is_ok());
            assert_eq!(t.0[0], m % 3);
        }
        let mut r0 = sample_rng(3, 1, 0);
        let mut r3 = sample_rng(3, 1, 3);
        assert_eq!(probabilistic_sample(&inst, &p, 0, &mut r0).0[0], probabilistic_sample(&inst, &p, 3, &mut r3).0[0]);
    }

    #[test]
    fn greedy_ties_go_to_lowest_index() {
        let coords: Vec<[f64; 2]> = (0..5).map(|i| [i as f64 * 0.17 % 1.0, (i * i) as f64 * 0.13 % 1.0]).collect();
        let inst = TspInstance::new(coords).unwrap();
        let t = greedy_construct(&inst, &[0.5; 20], 2);
        assert_eq!(t.0, vec![2, 0, 1, 3, 4]);
    }

    #[test]
    fn uniform_init_examples() {
        let tri = WeightedGraph::new(3, &[(0, 1), (1, 2), (0, 2)], vec![1.0; 3]).unwrap();
        assert_eq!(uniform_init(&tri, 5, 0).len(), 1);

        let sq = TspInstance::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let a = uniform_init(&sq, 3, 11);
        let b = uniform_init(&sq, 3, 11);
        assert_eq!(a.len(), 3);
        let keys = |p: &SamplePool<_>| p.entries().iter().map(|e| e.key.clone()).collect::<Vec<_>>();
        assert_eq!(keys(&a), keys(&b));

        let op = OpInstance::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![0.0, 1.0, 1.0], 1.0).unwrap();
        let pool = uniform_init(&op, 4, 0);
        assert_eq!(pool.len(), 1);
        assert!(pool.entries()[0].solution.is_empty());
        assert_eq!(pool.entries()[0].objective, 0.0);
    }

    #[test]
    fn config_validation() {
        let g = WeightedGraph::new(2, &[(0, 1)], vec![1.0; 2]).unwrap();
        let model = LinearModel { w: vec![1.0; 6], b: 0.0 };
        let mut cfg = AspConfig::preset(&g, 0, 0);
        assert!(asp_run(&g, &model, &Calibration::default(), &cfg, None).is_err());
        cfg.iterations = 1;
        cfg.pinned_fraction = Some(1.5);
        assert!(asp_run(&g, &model, &Calibration::default(), &cfg, None).is_err());
        cfg.pinned_fraction = None;
        let short = LinearModel { w: vec![1.0; 5], b: 0.0 };
        assert!(matches!(
            asp_run(&g, &short, &Calibration::default(), &cfg, None),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
