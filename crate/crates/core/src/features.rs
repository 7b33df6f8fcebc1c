//! Pool-derived statistical features and feature-matrix assembly.
//!
//! Two scores summarise how a variable behaves across the current pool:
//!
//! * the ranking score `sum_k s_ik / r_k`, where `s_ik` is the 0/1 value of
//!   variable `i` in entry `k` and `r_k` its rank (1 = best), divided by the
//!   largest score of the instance;
//! * the Pearson correlation between `s_ik` and the entry objectives,
//!   divided by the largest score (maximisation) or the smallest score
//!   (minimisation).
//!
//! Degenerate cases (constant series, all-zero divisors) produce 0.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::pool::SamplePool;
use crate::problems::{Problem, Sense};

pub const STAT_FEATURE_NAMES: [&str; 2] = ["ranking", "correlation"];

/// Dense row-major matrix with named columns, one row per decision variable.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    names: Vec<String>,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn zeros(rows: usize, names: Vec<String>) -> Self {
        let data = vec![0.0; rows * names.len()];
        Self { rows, names, data }
    }

    pub fn from_rows(rows: &[Vec<f64>], names: Vec<String>) -> Result<Self> {
        let cols = names.len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Ok(Self { rows: rows.len(), names, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let c = self.cols();
        &self.data[i * c..(i + 1) * c]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        let c = self.cols();
        &mut self.data[i * c..(i + 1) * c]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks(self.cols().max(1)).take(self.rows)
    }

    /// CSV dump with the column names as header.
    pub fn to_csv(&self) -> String {
        let mut out = self.names.join(",");
        out.push('\n');
        for row in self.iter_rows() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }
}

/// Raw ranking score of every variable.
pub fn ranking_scores_raw<S: Clone>(pool: &SamplePool<S>) -> Result<Vec<f64>> {
    let ranks = pool.ranks()?;
    let mut scores = vec![0.0; pool.num_vars()];
    for (entry, &r) in pool.entries().iter().zip(&ranks) {
        let inc = 1.0 / r as f64;
        for &v in &entry.vars {
            scores[v] += inc;
        }
    }
    Ok(scores)
}

pub fn ranking_score_raw<S: Clone>(pool: &SamplePool<S>, var: usize) -> Result<f64> {
    if var >= pool.num_vars() {
        return Err(Error::invalid(format!("variable {var} out of range")));
    }
    Ok(ranking_scores_raw(pool)?[var])
}

/// Divides by the maximum; an all-zero (or nonpositive) maximum gives zeros.
pub fn normalize_by_max(raw: &[f64]) -> Vec<f64> {
    let max = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max > 0.0 {
        raw.iter().map(|&x| x / max).collect()
    } else {
        vec![0.0; raw.len()]
    }
}

pub fn ranking_scores_normalized<S: Clone>(pool: &SamplePool<S>) -> Result<Vec<f64>> {
    Ok(normalize_by_max(&ranking_scores_raw(pool)?))
}

/// Raw Pearson correlation of every variable with the pool objectives.
pub fn correlation_scores<S: Clone>(pool: &SamplePool<S>) -> Result<Vec<f64>> {
    let k = pool.len();
    if k < 2 {
        return Err(Error::PoolTooSmall { needed: 2, found: k });
    }
    let objs: Vec<f64> = pool.entries().iter().map(|e| e.objective).collect();
    let (lo, hi) = objs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &o| (a.min(o), b.max(o)));
    if lo == hi {
        return Ok(vec![0.0; pool.num_vars()]);
    }
    let mean = objs.iter().sum::<f64>() / k as f64;
    let centered: Vec<f64> = objs.iter().map(|o| o - mean).collect();
    let ss_obj: f64 = centered.iter().map(|c| c * c).sum();

    // s is binary: cov = sum of centered objectives where s = 1 and
    // sum (s - mean_s)^2 = c (K - c) / K with c the count of ones.
    let mut count = vec![0usize; pool.num_vars()];
    let mut cov = vec![0.0; pool.num_vars()];
    for (entry, c) in pool.entries().iter().zip(&centered) {
        for &v in &entry.vars {
            count[v] += 1;
            cov[v] += c;
        }
    }
    let kf = k as f64;
    Ok(count
        .iter()
        .zip(&cov)
        .map(|(&c, &cv)| {
            if c == 0 || c == k {
                return 0.0;
            }
            let ss_var = c as f64 * (kf - c as f64) / kf;
            (cv / (ss_var * ss_obj).sqrt()).clamp(-1.0, 1.0)
        })
        .collect())
}

pub fn correlation_score<S: Clone>(pool: &SamplePool<S>, var: usize) -> Result<f64> {
    if var >= pool.num_vars() {
        return Err(Error::invalid(format!("variable {var} out of range")));
    }
    Ok(correlation_scores(pool)?[var])
}

/// Maximisation divides by the largest score, minimisation by the smallest.
/// A zero divisor gives zeros. No clamping is applied afterwards.
pub fn normalize_correlation(raw: &[f64], sense: Sense) -> Vec<f64> {
    let divisor = match sense {
        Sense::Maximize => raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        Sense::Minimize => raw.iter().cloned().fold(f64::INFINITY, f64::min),
    };
    if divisor == 0.0 || !divisor.is_finite() {
        return vec![0.0; raw.len()];
    }
    raw.iter().map(|&x| x / divisor).collect()
}

pub fn correlation_scores_normalized<S: Clone>(pool: &SamplePool<S>) -> Result<Vec<f64>> {
    Ok(normalize_correlation(&correlation_scores(pool)?, pool.sense()))
}

/// Prepends the two statistical columns to precomputed problem-specific
/// columns. A pool with a single entry has no objective variance, so its
/// correlation column is all zeros.
pub fn assemble_with<S: Clone>(problem_cols: &FeatureMatrix, pool: &SamplePool<S>) -> Result<FeatureMatrix> {
    let n = problem_cols.rows();
    if pool.num_vars() != n {
        return Err(Error::DimensionMismatch { expected: n, found: pool.num_vars() });
    }
    let ranking = ranking_scores_normalized(pool)?;
    let correlation = if pool.len() >= 2 { correlation_scores_normalized(pool)? } else { vec![0.0; n] };
    let names: Vec<String> =
        STAT_FEATURE_NAMES.iter().map(|s| s.to_string()).chain(problem_cols.names().iter().cloned()).collect();
    let mut m = FeatureMatrix::zeros(n, names);
    for i in 0..n {
        let row = m.row_mut(i);
        row[0] = ranking[i];
        row[1] = correlation[i];
        row[2..].copy_from_slice(problem_cols.row(i));
    }
    Ok(m)
}

pub fn assemble_features<P: Problem>(problem: &P, pool: &SamplePool<P::Solution>) -> Result<FeatureMatrix> {
    assemble_with(&problem.problem_features(), pool)
}
