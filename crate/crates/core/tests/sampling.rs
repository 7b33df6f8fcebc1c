use asp_core::engine::{greedy_construct, probabilistic_sample, sample_rng};
use asp_core::features::assemble_features;
use asp_core::instances::{gen_er, gen_op, gen_tsp, PrizeScheme};
use asp_core::ml::predict;
use asp_core::problems::{edge_index, Clique, OpInstance, Route, TspInstance, WeightedGraph};
use asp_core::{asp_run, uniform_init, AspConfig, Calibration, LinearModel, Problem, ProblemKind};
use proptest::prelude::*;

fn model_for(kind: ProblemKind, seed: u64) -> LinearModel {
    let dim = kind.feature_dim();
    let w =
        (0..dim).map(|i| (((seed.wrapping_mul(31).wrapping_add(i as u64 * 17)) % 21) as f64 - 10.0) / 5.0).collect();
    LinearModel { w, b: 0.1 }
}

fn config(iterations: usize, samples: usize, seed: u64) -> AspConfig {
    AspConfig {
        iterations,
        samples,
        pool_size: None,
        seed,
        pinned_fraction: None,
        time_budget_ms: None,
        stall_iterations: None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mwcp_samples_are_feasible(
        n in 1usize..30,
        density in 0.0f64..=1.0,
        seed in any::<u64>(),
        p in prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], 30),
    ) {
        let g = gen_er(n, density, seed).unwrap();
        for m in 0..5 {
            let mut rng = sample_rng(seed, 1, m);
            let c = probabilistic_sample(&g, &p[..n], m, &mut rng);
            prop_assert!(g.check(&c).is_ok());
            prop_assert!(g.extension_vertex(c.vertices()).is_none(), "sample is not maximal");
        }
    }

    #[test]
    fn tsp_samples_are_feasible(n in 3usize..15, seed in any::<u64>(), zero in any::<bool>()) {
        let inst = gen_tsp(n, seed).unwrap();
        let p: Vec<f64> = (0..inst.num_vars()).map(|k| if zero && k % 3 == 0 { 0.0 } else { ((k * 7919) % 101) as f64 / 100.0 }).collect();
        for m in 0..5 {
            let mut rng = sample_rng(seed, 2, m);
            let t = probabilistic_sample(&inst, &p, m, &mut rng);
            prop_assert!(inst.check(&t).is_ok());
        }
    }

    #[test]
    fn op_samples_are_feasible(n in 2usize..20, seed in any::<u64>(), len in 0.5f64..4.0, scheme in 0usize..3) {
        let scheme = [PrizeScheme::Constant, PrizeScheme::Uniform, PrizeScheme::Distance][scheme];
        let inst = gen_op(n, scheme, len, seed).unwrap();
        let p: Vec<f64> = (0..inst.num_vars()).map(|k| ((k * 31) % 7) as f64 / 7.0).collect();
        for m in 0..5 {
            let mut rng = sample_rng(seed, 3, m);
            let r = probabilistic_sample(&inst, &p, m, &mut rng);
            prop_assert!(inst.check(&r).is_ok());
            let mut ext = r.clone();
            inst.extend_to_maximal(&mut ext);
            prop_assert_eq!(ext, r, "sample is not budget-maximal");
        }
    }
}

#[test]
fn draw_frequency_follows_prediction() {
    let g = WeightedGraph::new(2, &[], vec![1.0, 1.0]).unwrap();
    let draws = 100_000;
    let zeros = (0..draws)
        .filter(|&m| {
            let mut rng = sample_rng(99, 1, m);
            probabilistic_sample(&g, &[0.9, 0.1], m, &mut rng) == Clique(vec![0])
        })
        .count();
    let freq = zeros as f64 / draws as f64;
    assert!((freq - 0.9).abs() <= 0.01, "frequency {freq}");
}

#[test]
fn single_iteration_prediction_matches_initial_pool() {
    let cal = Calibration::new(3.0, 0.2).unwrap();
    for seed in 0..10 {
        let g = gen_er(25, 0.3, seed).unwrap();
        let model = model_for(ProblemKind::Mwcp, seed);
        let cfg = config(1, 25, seed);
        let out = asp_run(&g, &model, &cal, &cfg, None).unwrap();
        let pool = uniform_init(&g, 25, seed);
        let want = predict(&model, &cal, &assemble_features(&g, &pool).unwrap()).unwrap();
        assert_eq!(out.prediction, want);
        assert_eq!(out.initial_prediction, want);
    }
}

#[test]
fn traces_are_monotone_and_deterministic() {
    let cal = Calibration::new(5.0, 0.0).unwrap();
    for seed in 0..4 {
        let g = gen_er(30, 0.4, seed).unwrap();
        let m = model_for(ProblemKind::Mwcp, seed);
        let a = asp_run(&g, &m, &cal, &config(6, 30, seed), None).unwrap();
        let b = asp_run(&g, &m, &cal, &config(6, 30, seed), None).unwrap();
        assert!(a.trace.is_monotone(g.sense()));
        assert_eq!(a.best, b.best);
        assert_eq!(a.prediction, b.prediction);

        let t = gen_tsp(12, seed).unwrap();
        let m = model_for(ProblemKind::Tsp, seed);
        let a = asp_run(&t, &m, &cal, &config(4, 40, seed), None).unwrap();
        assert!(a.trace.is_monotone(t.sense()));
        assert!(t.check(&a.best).is_ok());

        let o = gen_op(12, PrizeScheme::Uniform, 2.0, seed).unwrap();
        let m = model_for(ProblemKind::Op, seed);
        let a = asp_run(&o, &m, &cal, &config(4, 40, seed), None).unwrap();
        assert!(a.trace.is_monotone(o.sense()));
        assert!(o.check(&a.best).is_ok());
    }
}

fn nearest_neighbour(inst: &TspInstance, start: usize) -> Vec<usize> {
    let n = inst.n();
    let mut tour = vec![start];
    let mut left: Vec<usize> = (0..n).filter(|&c| c != start).collect();
    while !left.is_empty() {
        let cur = *tour.last().unwrap();
        let (k, _) =
            left.iter().enumerate().min_by(|a, b| inst.dist(cur, *a.1).total_cmp(&inst.dist(cur, *b.1))).unwrap();
        tour.push(left.remove(k));
    }
    tour
}

#[test]
fn greedy_on_inverse_distance_is_nearest_neighbour() {
    for seed in 0..10 {
        let inst = gen_tsp(11, seed).unwrap();
        let n = inst.n();
        let mut p = vec![0.0; inst.num_vars()];
        for i in 0..n {
            for j in (0..n).filter(|&j| j != i) {
                p[edge_index(n, i, j)] = (-20.0 * inst.dist(i, j)).exp();
            }
        }
        for s in 0..n {
            assert_eq!(greedy_construct(&inst, &p, s).0, nearest_neighbour(&inst, s));
        }
    }
}

#[test]
fn op_single_candidate_is_taken_despite_zero_prediction() {
    let inst = OpInstance::new(vec![[0.0, 0.0], [0.1, 0.0], [10.0, 0.0]], vec![0.0, 1.0, 5.0], 0.5).unwrap();
    let p = vec![0.0; inst.num_vars()];
    for m in 0..20 {
        let mut rng = sample_rng(m as u64, 1, m);
        assert_eq!(probabilistic_sample(&inst, &p, m, &mut rng), Route(vec![1]));
    }
}
