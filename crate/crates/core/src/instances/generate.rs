//! Seeded random instance generators.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problems::{OpInstance, TspInstance, WeightedGraph};

/// Benchmark vertex weight convention `((i + 1) mod 200) + 1` for 0-based
/// vertex `i`.
pub fn vertex_weight(i: usize) -> f64 {
    (((i + 1) % 200) + 1) as f64
}

pub const WEIGHT_CONVENTION: &str = "weights w_i = ((i+1) mod 200) + 1, i 0-based";

/// Erdős–Rényi graph: every pair is an edge independently with
/// probability `density`.
pub fn gen_er(n: usize, density: f64, seed: u64) -> Result<WeightedGraph> {
    if !(0.0..=1.0).contains(&density) {
        return Err(Error::invalid(format!("density {density} outside [0, 1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < density {
                edges.push((i, j));
            }
        }
    }
    WeightedGraph::new(n, &edges, (0..n).map(vertex_weight).collect())
}

/// Barabási–Albert graph: a star on `attach + 1` vertices, then each new
/// vertex links to `attach` distinct existing vertices chosen with
/// probability proportional to degree.
pub fn gen_ba(n: usize, attach: usize, seed: u64) -> Result<WeightedGraph> {
    if attach == 0 || attach >= n {
        return Err(Error::invalid(format!("BA attachment {attach} must be in 1..{n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges: Vec<(usize, usize)> = (1..=attach).map(|j| (0, j)).collect();
    // each vertex appears once per incident edge
    let mut repeated: Vec<usize> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    for v in attach + 1..n {
        let mut targets: Vec<usize> = Vec::with_capacity(attach);
        while targets.len() < attach {
            let t = *repeated.choose(&mut rng).expect("nonempty");
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for &t in &targets {
            edges.push((t, v));
            repeated.push(t);
            repeated.push(v);
        }
    }
    WeightedGraph::new(n, &edges, (0..n).map(vertex_weight).collect())
}

fn unit_square_points(n: usize, rng: &mut ChaCha8Rng) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = Vec::with_capacity(n);
    while pts.len() < n {
        let p = [rng.gen::<f64>(), rng.gen::<f64>()];
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    pts
}

/// `n` cities drawn uniformly from the unit square.
pub fn gen_tsp(n: usize, seed: u64) -> Result<TspInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TspInstance::new(unit_square_points(n, &mut rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrizeScheme {
    /// Every location is worth 1.
    Constant,
    /// `u / 100` with `u` uniform in `1..=100`.
    Uniform,
    /// `(1 + floor(99 d(depot, i) / max_k d(depot, k))) / 100`: farther
    /// locations are worth more, up to 1.
    Distance,
}

impl fmt::Display for PrizeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PrizeScheme::Constant => "constant",
            PrizeScheme::Uniform => "uniform",
            PrizeScheme::Distance => "distance",
        })
    }
}

impl FromStr for PrizeScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(PrizeScheme::Constant),
            "uniform" => Ok(PrizeScheme::Uniform),
            "distance" => Ok(PrizeScheme::Distance),
            other => Err(Error::invalid(format!("unknown prize scheme '{other}'"))),
        }
    }
}

/// Orienteering instance on `n` uniform points with location 0 as depot.
/// The budget is drawn from `[d/2 - 1, d/2 + 1]` for the supplied mean
/// optimal tour length `d`, and raised to the cheapest depot round trip if
/// it falls below it.
pub fn gen_op(n: usize, scheme: PrizeScheme, mean_tour_len: f64, seed: u64) -> Result<OpInstance> {
    if n < 2 {
        return Err(Error::invalid("OP needs at least 2 locations"));
    }
    if !mean_tour_len.is_finite() {
        return Err(Error::NonFinite("mean tour length"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coords = unit_square_points(n, &mut rng);
    let depot_dist: Vec<f64> = coords.iter().map(|c| (c[0] - coords[0][0]).hypot(c[1] - coords[0][1])).collect();
    let far = depot_dist.iter().cloned().fold(0.0, f64::max);
    let mut prizes = vec![0.0; n];
    for i in 1..n {
        prizes[i] = match scheme {
            PrizeScheme::Constant => 1.0,
            PrizeScheme::Uniform => rng.gen_range(1..=100) as f64 / 100.0,
            PrizeScheme::Distance => (1.0 + (99.0 * depot_dist[i] / far).floor()) / 100.0,
        };
    }
    let half = mean_tour_len / 2.0;
    let drawn = rng.gen_range(half - 1.0..=half + 1.0);
    let cheapest = (1..n).map(|j| 2.0 * depot_dist[j]).fold(f64::INFINITY, f64::min);
    OpInstance::new(coords, prizes, drawn.max(cheapest))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn er_extremes() {
        assert_eq!(gen_er(10, 1.0, 3).unwrap().num_edges(), 45);
        assert_eq!(gen_er(10, 0.0, 3).unwrap().num_edges(), 0);
        assert!(gen_er(10, 1.5, 3).is_err());
    }

    #[test]
    fn er_edge_count_within_binomial_band() {
        // Binomial(19900, 0.2): mean 3980, sd = sqrt(19900 * 0.2 * 0.8) ~ 56.4
        let pairs = 200.0 * 199.0 / 2.0;
        let sd = (pairs * 0.2 * 0.8f64).sqrt();
        for seed in 0..5 {
            let m = gen_er(200, 0.2, seed).unwrap().num_edges() as f64;
            assert!((m - pairs * 0.2).abs() <= 4.0 * sd, "seed {seed}: {m}");
        }
    }

    #[test]
    fn weights_follow_convention() {
        let g = gen_er(205, 0.1, 1).unwrap();
        assert_eq!(g.weight(0), 2.0);
        assert_eq!(g.weight(198), 200.0);
        assert_eq!(g.weight(199), 1.0);
    }

    #[test]
    fn ba_structure() {
        let g = gen_ba(50, 3, 9).unwrap();
        assert_eq!(g.num_edges(), 3 + 3 * (50 - 4));
        assert!((0..50).all(|v| g.degree(v) >= 1));
        assert!(gen_ba(5, 5, 0).is_err());
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(gen_er(30, 0.3, 5).unwrap(), gen_er(30, 0.3, 5).unwrap());
        assert_eq!(gen_ba(30, 2, 5).unwrap(), gen_ba(30, 2, 5).unwrap());
        assert_eq!(gen_tsp(20, 5).unwrap(), gen_tsp(20, 5).unwrap());
        assert_eq!(
            gen_op(20, PrizeScheme::Uniform, 4.0, 5).unwrap(),
            gen_op(20, PrizeScheme::Uniform, 4.0, 5).unwrap()
        );
    }

    #[test]
    fn op_prizes_and_budget() {
        let c = gen_op(12, PrizeScheme::Constant, 8.0, 2).unwrap();
        assert_eq!(c.prizes()[0], 0.0);
        assert!(c.prizes()[1..].iter().all(|&p| p == 1.0));
        assert!(c.coords().iter().flatten().all(|&x| (0.0..=1.0).contains(&x)));
        for seed in 0..20 {
            let b = gen_op(12, PrizeScheme::Constant, 8.0, seed).unwrap().budget();
            assert!((3.0..=5.0).contains(&b), "{b}");
        }
        let d = gen_op(12, PrizeScheme::Distance, 8.0, 2).unwrap();
        let max = d.prizes().iter().cloned().fold(0.0, f64::max);
        assert_eq!(max, 1.0);
        assert!(d.prizes()[1..].iter().all(|&p| p >= 0.01));
        let u = gen_op(12, PrizeScheme::Uniform, 8.0, 2).unwrap();
        assert!(u.prizes()[1..].iter().all(|&p| (0.01..=1.0).contains(&p)));
        // tiny budgets are raised to the cheapest round trip
        let t = gen_op(12, PrizeScheme::Constant, -10.0, 2).unwrap();
        assert_eq!(Some(t.budget()), t.cheapest_round_trip());
    }
}
