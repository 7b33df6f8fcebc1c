//! Training data from instances with known optima.

use rayon::prelude::*;

use crate::engine::uniform_init;
use crate::error::{Error, Result};
use crate::features::assemble_features;
use crate::ml::TrainingExample;
use crate::problems::Problem;

/// An instance together with an optimal solution and its objective.
#[derive(Debug, Clone)]
pub struct Labeled<P: Problem> {
    pub instance: P,
    pub solution: P::Solution,
    pub objective: f64,
}

impl<P: Problem> Labeled<P> {
    /// Checks that the solution is feasible and that its objective
    /// re-evaluates to the stored value.
    pub fn verify(&self) -> Result<()> {
        self.instance.check(&self.solution).map_err(Error::Infeasible)?;
        let obj = self.instance.objective(&self.solution);
        if obj != self.objective {
            return Err(Error::invalid(format!("stored objective {} re-evaluates to {obj}", self.objective)));
        }
        Ok(())
    }

    pub fn labels(&self) -> Vec<u8> {
        self.instance.labels(&self.solution)
    }
}

/// Seed of the initial pool of instance `index`.
pub fn instance_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// One example per decision variable of every instance: features from a
/// uniform initial pool of size `m_init`, label 1 iff the variable is set in
/// the known optimum. Instances are processed in parallel and concatenated
/// in input order.
pub fn build_training_set<P: Problem + Send + Sync>(
    labeled: &[Labeled<P>],
    m_init: usize,
    seed: u64,
) -> Result<Vec<TrainingExample>> {
    if m_init == 0 {
        return Err(Error::invalid("initial pool size must be at least 1"));
    }
    let parts: Vec<Result<Vec<TrainingExample>>> = labeled
        .par_iter()
        .enumerate()
        .map(|(idx, l)| {
            l.instance.check(&l.solution).map_err(|r| Error::Infeasible(format!("instance {idx}: {r}")))?;
            let pool = uniform_init(&l.instance, m_init, instance_seed(seed, idx));
            let features = assemble_features(&l.instance, &pool)?;
            let labels = l.labels();
            Ok(features
                .iter_rows()
                .zip(labels)
                .map(|(row, label)| TrainingExample { features: row.to_vec(), label })
                .collect())
        })
        .collect();
    let mut out = Vec::new();
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}
