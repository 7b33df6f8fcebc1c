use asp_core::features::{
    assemble_features, correlation_scores, normalize_by_max, ranking_scores_normalized, ranking_scores_raw,
};
use asp_core::instances::{average_precision, gen_er, gen_op, gen_tsp, PrizeScheme};
use asp_core::ml::{Calibration, LinearModel};
use asp_core::pool::SamplePool;
use asp_core::problems::{Clique, OpInstance, Problem, Sense, Tour, TspInstance, WeightedGraph};
use proptest::prelude::*;

/// Pool over an edgeless graph built from explicit vertex sets and
/// objectives.
fn build_pool(n: usize, sets: &[(Vec<usize>, i32)], sense: Sense) -> SamplePool<Clique> {
    let g = WeightedGraph::new(n, &[], vec![1.0; n]).unwrap();
    let mut pool = SamplePool::new(sets.len().max(1), sense, n);
    for (vs, obj) in sets {
        pool.update(&g, Clique::new(vs.clone()), *obj as f64);
    }
    pool
}

fn pool_strategy() -> impl Strategy<Value = (usize, Vec<(Vec<usize>, i32)>, bool)> {
    (2usize..12).prop_flat_map(|n| {
        (Just(n), prop::collection::vec((prop::collection::vec(0..n, 0..n), -20i32..20), 1..50), any::<bool>())
    })
}

fn reference_ranks(objs: &[f64], keys: &[Vec<usize>], sense: Sense) -> Vec<usize> {
    (0..objs.len())
        .map(|k| {
            1 + (0..objs.len())
                .filter(|&j| {
                    let better = match sense {
                        Sense::Maximize => objs[j] > objs[k],
                        Sense::Minimize => objs[j] < objs[k],
                    };
                    better || (objs[j] == objs[k] && keys[j] < keys[k])
                })
                .count()
        })
        .collect()
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

fn tsp_strategy() -> impl Strategy<Value = TspInstance> {
    prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 3..12)
        .prop_filter_map("distinct points", |pts| TspInstance::new(pts.into_iter().map(|(x, y)| [x, y]).collect()).ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn distance_is_scale_invariant(
        w in prop::collection::vec(-5.0f64..5.0, 1..6),
        b in -5.0f64..5.0,
        c in 0.01f64..100.0,
        seed in any::<u64>(),
    ) {
        prop_assume!(w.iter().any(|&x| x.abs() > 1e-3));
        let f: Vec<f64> = (0..w.len()).map(|i| ((seed >> (i * 8)) & 0xff) as f64 / 25.5 - 5.0).collect();
        let m = LinearModel { w: w.clone(), b };
        let scaled = LinearModel { w: w.iter().map(|x| x * c).collect(), b: b * c };
        let d1 = m.decision_distance(&f).unwrap();
        let d2 = scaled.decision_distance(&f).unwrap();
        prop_assert!((d1 - d2).abs() <= 1e-10 * (1.0 + d1.abs()));
    }

    #[test]
    fn calibration_is_monotone(beta0 in 0.1f64..20.0, beta1 in -5.0f64..5.0, d1 in -3.0f64..3.0, gap in 1e-3f64..3.0) {
        let cal = Calibration::new(beta0, beta1).unwrap();
        let (p1, p2) = (cal.calibrate(d1), cal.calibrate(d1 + gap));
        prop_assert!(p1 <= p2, "{} > {}", p1, p2);
        if p1 > 1e-6 && p2 < 1.0 - 1e-6 {
            prop_assert!(p1 < p2, "{} !< {}", p1, p2);
        }
        prop_assert!((0.0..=1.0).contains(&p1) && (0.0..=1.0).contains(&p2));
    }

    #[test]
    fn ranking_score_matches_double_loop((n, sets, max) in pool_strategy()) {
        let sense = if max { Sense::Maximize } else { Sense::Minimize };
        let pool = build_pool(n, &sets, sense);
        let objs: Vec<f64> = pool.entries().iter().map(|e| e.objective).collect();
        let keys: Vec<Vec<usize>> = pool.entries().iter().map(|e| e.key.clone()).collect();
        let ranks = reference_ranks(&objs, &keys, sense);
        prop_assert_eq!(&pool.ranks().unwrap(), &ranks);
        let got = ranking_scores_raw(&pool).unwrap();
        for (i, g) in got.iter().enumerate() {
            let mut want = 0.0;
            for (k, e) in pool.entries().iter().enumerate() {
                if e.vars.contains(&i) {
                    want += 1.0 / ranks[k] as f64;
                }
            }
            prop_assert!((g - want).abs() <= 1e-12);
        }
        // best entry has rank 1
        let best = pool.best().unwrap();
        let bi = pool.entries().iter().position(|e| e.key == best.key).unwrap();
        prop_assert_eq!(ranks[bi], 1);
    }

    #[test]
    fn normalized_ranking_in_unit_interval((n, sets, max) in pool_strategy()) {
        let sense = if max { Sense::Maximize } else { Sense::Minimize };
        let pool = build_pool(n, &sets, sense);
        let raw = ranking_scores_raw(&pool).unwrap();
        let norm = ranking_scores_normalized(&pool).unwrap();
        prop_assert!(norm.iter().all(|&x| (0.0..=1.0).contains(&x)));
        let argmax = |v: &[f64]| v.iter().enumerate().fold(0, |b, (i, &x)| if x > v[b] { i } else { b });
        if raw.iter().any(|&x| x > 0.0) {
            prop_assert_eq!(argmax(&raw), argmax(&norm));
        }
    }

    #[test]
    fn correlation_matches_two_pass((n, sets, max) in pool_strategy()) {
        let sense = if max { Sense::Maximize } else { Sense::Minimize };
        let pool = build_pool(n, &sets, sense);
        prop_assume!(pool.len() >= 2);
        let objs: Vec<f64> = pool.entries().iter().map(|e| e.objective).collect();
        let got = correlation_scores(&pool).unwrap();
        for (i, g) in got.iter().enumerate() {
            let s: Vec<f64> = pool.entries().iter().map(|e| if e.vars.contains(&i) { 1.0 } else { 0.0 }).collect();
            prop_assert!((g - pearson(&s, &objs)).abs() <= 1e-10);
        }
    }

    #[test]
    fn ap_invariant_under_monotone_transform(
        scores in prop::collection::vec(-10.0f64..10.0, 1..40),
        bits in prop::collection::vec(any::<bool>(), 40),
    ) {
        let labels: Vec<u8> = scores.iter().zip(&bits).map(|(_, &b)| u8::from(b)).collect();
        prop_assume!(labels.contains(&1));
        let a = average_precision(&scores, &labels).unwrap();
        let t: Vec<f64> = scores.iter().map(|s| (s / 3.0).exp() * 2.0 + 1.0).collect();
        let b = average_precision(&t, &labels).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn tour_reversal_symmetry(inst in tsp_strategy(), rot in 0usize..12) {
        let n = inst.n();
        let mut cities: Vec<usize> = (0..n).collect();
        cities.rotate_left(rot % n);
        let t = Tour(cities);
        let r = t.reversed();
        prop_assert!((inst.tour_length(&t) - inst.tour_length(&r)).abs() < 1e-12);
        prop_assert_eq!(inst.canonical_key(&t), inst.canonical_key(&r));
    }

    #[test]
    fn features_are_deterministic(seed in 0u64..1000) {
        let g = gen_er(15, 0.3, seed).unwrap();
        let pool = asp_core::uniform_init(&g, 10, seed);
        let a = assemble_features(&g, &pool).unwrap();
        let b = assemble_features(&g, &pool).unwrap();
        prop_assert_eq!(a.data(), b.data());
        prop_assert!(a.data().iter().all(|x| x.is_finite()));
        for row in a.iter_rows() {
            prop_assert!((0.0..=1.0).contains(&row[0]));
        }
    }
}

#[test]
fn normalization_degenerate_rule() {
    assert_eq!(normalize_by_max(&[0.0, 0.0, 0.0]), vec![0.0; 3]);
}

#[test]
fn op_features_finite_with_duplicates() {
    let inst =
        OpInstance::new(vec![[0.0, 0.0], [0.5, 0.5], [0.5, 0.5], [1.0, 0.0]], vec![0.0, 1.0, 2.0, 3.0], 3.0).unwrap();
    let f = inst.problem_features();
    assert_eq!(f.rows(), 12);
    assert!(f.data().iter().all(|x| x.is_finite()));
    let g = gen_op(10, PrizeScheme::Distance, 3.0, 1).unwrap();
    assert!(g.problem_features().data().iter().all(|x| x.is_finite()));
    let t = gen_tsp(10, 1).unwrap();
    assert_eq!(t.problem_features().rows(), 90);
}
