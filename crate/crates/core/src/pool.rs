//! Bounded pool of unique feasible solutions.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::problems::{Problem, Sense};

#[derive(Debug, Clone)]
pub struct PoolEntry<S> {
    pub solution: S,
    pub objective: f64,
    /// Canonical encoding used for duplicate detection and rank tie-breaks.
    pub key: Vec<usize>,
    /// Sorted indices of the variables set to 1.
    pub vars: Vec<usize>,
    pub pinned: bool,
}

#[derive(Debug, Clone)]
pub struct SamplePool<S> {
    entries: Vec<PoolEntry<S>>,
    keys: HashSet<Vec<usize>>,
    capacity: usize,
    sense: Sense,
    num_vars: usize,
}

impl<S: Clone> SamplePool<S> {
    pub fn new(capacity: usize, sense: Sense, num_vars: usize) -> Self {
        Self { entries: Vec::with_capacity(capacity), keys: HashSet::new(), capacity, sense, num_vars }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn entries(&self) -> &[PoolEntry<S>] {
        &self.entries
    }

    pub fn pinned_count(&self) -> usize {
        self.entries.iter().filter(|e| e.pinned).count()
    }

    pub fn contains_key(&self, key: &[usize]) -> bool {
        self.keys.contains(key)
    }

    /// Pins the first `count` entries in insertion order.
    pub fn pin_first(&mut self, count: usize) {
        for e in self.entries.iter_mut().take(count) {
            e.pinned = true;
        }
    }

    fn order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.entries.len()).collect();
        idx.sort_by(|&a, &b| {
            let (ea, eb) = (&self.entries[a], &self.entries[b]);
            self.sense.cmp_best_first(ea.objective, eb.objective).then_with(|| ea.key.cmp(&eb.key))
        });
        idx
    }

    /// Rank of each entry (1 = best), ties broken by ascending canonical key.
    pub fn ranks(&self) -> Result<Vec<usize>> {
        if self.entries.is_empty() {
            return Err(Error::EmptyPool);
        }
        let mut ranks = vec![0; self.entries.len()];
        for (r, i) in self.order().into_iter().enumerate() {
            ranks[i] = r + 1;
        }
        Ok(ranks)
    }

    pub fn best(&self) -> Option<&PoolEntry<S>> {
        self.order().first().map(|&i| &self.entries[i])
    }

    fn worst_unpinned(&self) -> Option<usize> {
        self.order().into_iter().rev().find(|&i| !self.entries[i].pinned)
    }

    /// Offers `candidate` to the pool. It enters if it is new and either the
    /// pool has room or it is strictly better than the worst unpinned entry,
    /// which it then replaces. Returns whether the pool changed.
    pub fn update<P>(&mut self, problem: &P, candidate: S, objective: f64) -> bool
    where
        P: Problem<Solution = S>,
    {
        let key = problem.canonical_key(&candidate);
        if self.keys.contains(&key) {
            return false;
        }
        let make = |solution: S, key: Vec<usize>| {
            let solution = problem.normalize(solution);
            let vars = problem.active_vars(&solution);
            PoolEntry { solution, objective, key, vars, pinned: false }
        };
        if self.entries.len() < self.capacity {
            self.keys.insert(key.clone());
            self.entries.push(make(candidate, key));
            return true;
        }
        let Some(w) = self.worst_unpinned() else {
            return false;
        };
        if !self.sense.better(objective, self.entries[w].objective) {
            return false;
        }
        self.keys.remove(&self.entries[w].key);
        self.keys.insert(key.clone());
        self.entries[w] = make(candidate, key);
        true
    }
}
