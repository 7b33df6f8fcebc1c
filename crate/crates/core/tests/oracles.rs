use asp_core::instances::{exact_mwcp, exact_op, exact_tsp, gen_er, gen_op, gen_tsp, PrizeScheme};
use asp_core::problems::{OpInstance, TspInstance, WeightedGraph, BUDGET_EPS};
use asp_core::Problem;

fn brute_mwcp(g: &WeightedGraph) -> f64 {
    let n = g.n();
    let mut best: f64 = 0.0;
    for mask in 0u32..(1 << n) {
        let vs: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let clique = vs.iter().enumerate().all(|(a, &u)| vs[a + 1..].iter().all(|&v| g.adjacent(u, v)));
        if clique {
            best = best.max(vs.iter().map(|&v| g.weight(v)).sum());
        }
    }
    best
}

fn permutations(items: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}

fn brute_tsp(inst: &TspInstance) -> f64 {
    let n = inst.n();
    let mut rest: Vec<usize> = (1..n).collect();
    let mut best = f64::INFINITY;
    permutations(&mut rest, 0, &mut |p| {
        let mut len = inst.dist(0, p[0]) + inst.dist(p[p.len() - 1], 0);
        len += p.windows(2).map(|w| inst.dist(w[0], w[1])).sum::<f64>();
        best = best.min(len);
    });
    best
}

fn brute_op(inst: &OpInstance) -> f64 {
    fn go(inst: &OpInstance, cur: usize, used: f64, prize: f64, visited: &mut [bool], best: &mut f64) {
        *best = best.max(prize);
        for j in 1..inst.n() {
            if visited[j] {
                continue;
            }
            let u = used + inst.dist(cur, j);
            if u + inst.dist(j, 0) <= inst.budget() + BUDGET_EPS {
                visited[j] = true;
                go(inst, j, u, prize + inst.prizes()[j], visited, best);
                visited[j] = false;
            }
        }
    }
    let mut best = 0.0;
    go(inst, 0, 0.0, 0.0, &mut vec![false; inst.n()], &mut best);
    best
}

#[test]
fn clique_oracle_matches_enumeration() {
    for seed in 0..50u64 {
        let n = 1 + (seed as usize % 12);
        let g = gen_er(n, 0.15 + 0.7 * (seed % 5) as f64 / 4.0, seed).unwrap();
        let l = exact_mwcp(&g).unwrap();
        l.verify().unwrap();
        assert!((l.objective - brute_mwcp(&g)).abs() < 1e-9, "seed {seed}");
        assert!(g.extension_vertex(&l.solution.0).is_none());
    }
}

#[test]
fn tour_oracle_matches_enumeration() {
    for seed in 0..50u64 {
        let n = 3 + (seed as usize % 6);
        let inst = gen_tsp(n, seed).unwrap();
        let l = exact_tsp(&inst).unwrap();
        l.verify().unwrap();
        assert!((l.objective - brute_tsp(&inst)).abs() < 1e-9, "seed {seed}");
        assert_eq!(l.solution, l.solution.canonical());
    }
}

#[test]
fn route_oracle_matches_enumeration() {
    let schemes = [PrizeScheme::Constant, PrizeScheme::Uniform, PrizeScheme::Distance];
    for seed in 0..50u64 {
        let n = 2 + (seed as usize % 7);
        let inst = gen_op(n, schemes[seed as usize % 3], 0.5 + (seed % 4) as f64 * 0.4, seed).unwrap();
        let l = exact_op(&inst).unwrap();
        l.verify().unwrap();
        assert!((l.objective - brute_op(&inst)).abs() < 1e-9, "seed {seed}");
        let mut ext = l.solution.clone();
        inst.extend_to_maximal(&mut ext);
        assert_eq!(ext, l.solution);
    }
}

#[test]
fn oracle_guards_trip() {
    assert!(exact_tsp(&gen_tsp(17, 0).unwrap()).is_err());
    assert!(exact_op(&gen_op(15, PrizeScheme::Constant, 1.0, 0).unwrap()).is_err());
    assert!(exact_mwcp(&gen_er(401, 0.01, 0).unwrap()).is_err());
    assert_eq!(gen_er(5, 0.0, 1).unwrap().num_vars(), 5);
}
