use hypergiant_core::params::ModelParams;
use hypergiant_core::simulate::{
    complex_count, components, connected_pairs, core, extended_core, extended_core_shuffled, mantle, mark, sample,
    tree_census, Hypergraph,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn binom(n: u64, r: u32) -> f64 {
    (0..u64::from(r)).map(|i| (n - i) as f64 / (i + 1) as f64).product()
}

#[test]
fn mean_edge_count_is_binomial() {
    let mp = ModelParams::from_lambda(3, 100_000, 1.3).unwrap();
    let mean = mp.p * binom(mp.n, mp.r);
    let sd = (mean * (1.0 - mp.p)).sqrt();
    let draws = 100;
    let mut total = 0usize;
    for seed in 0..draws {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        total += sample(&mp, &mut rng).unwrap().edge_count();
    }
    let avg = total as f64 / draws as f64;
    assert!((avg - mean).abs() <= 3.0 * sd / (draws as f64).sqrt(), "{avg} vs {mean}");
}

#[test]
fn zero_probability_gives_empty_graph() {
    let mp = ModelParams::from_p(3, 1000, 0.0).unwrap();
    let h = sample(&mp, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
    assert_eq!(h.edge_count(), 0);
    assert_eq!(components(&h).count(), 1000);
}

#[test]
fn mark_counts_are_binomial() {
    let h = Hypergraph::empty(3, 10_000);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let prob = 0.05;
    let trials = 50;
    let total: usize = (0..trials)
        .map(|_| mark(&h, prob, &mut rng).unwrap().marks.unwrap().len())
        .sum();
    let mean = 10_000.0 * prob;
    let sd = (mean * (1.0 - prob)).sqrt() / (trials as f64).sqrt();
    assert!((total as f64 / trials as f64 - mean).abs() <= 3.0 * sd);
    assert!(mark(&h, 0.0, &mut rng).unwrap().marks.unwrap().is_empty());
    assert_eq!(mark(&h, 1.0, &mut rng).unwrap().marks.unwrap().len(), 10_000);
}

fn random_graphs(count: usize, seed: u64) -> Vec<Hypergraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            let r = 2 + (i % 3) as u32;
            let n = rng.random_range(30..300u64);
            let lambda = rng.random_range(0.6..1.6);
            let mp = ModelParams::from_lambda(r, n, lambda).unwrap();
            sample(&mp, &mut rng).unwrap()
        })
        .collect()
}

#[test]
fn global_nullity_is_sum_of_local() {
    for h in random_graphs(40, 11) {
        let cs = components(&h);
        let r = u64::from(h.r);
        let local: u64 = cs.components.iter().map(|c| c.nullity).sum();
        let global = cs.count() as u64 + (r - 1) * h.edge_count() as u64 - u64::from(h.n);
        assert_eq!(local, global);
        assert_eq!(cs.components.iter().map(|c| c.order).sum::<u64>(), u64::from(h.n));
        if cs.l1() > 0 {
            assert_eq!((cs.l1() + cs.n1()) % (r - 1), 1 % (r - 1));
        }
    }
}

#[test]
fn extended_core_without_marks_is_core() {
    for h in random_graphs(20, 12) {
        assert_eq!(extended_core(&h), core(&h));
        let unmarked = h.clone().with_marks(Vec::new()).unwrap();
        assert_eq!(extended_core(&unmarked).vertices, core(&h).vertices);
    }
}

#[test]
fn peeling_is_confluent() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for h in random_graphs(20, 14) {
        let h = mark(&h, 0.05, &mut rng).unwrap();
        let reference = extended_core(&h);
        let plain = core(&h);
        for _ in 0..100 {
            assert_eq!(extended_core_shuffled(&h, &mut rng), reference);
            let mut unmarked = h.clone();
            unmarked.marks = None;
            assert_eq!(extended_core_shuffled(&unmarked, &mut rng), plain);
        }
        let core_set: std::collections::HashSet<_> = plain.vertices.iter().collect();
        let ext_set: std::collections::HashSet<_> = reference.vertices.iter().collect();
        assert!(core_set.is_subset(&ext_set));
    }
}

#[test]
fn mantle_partitions_by_attachment() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for h in random_graphs(10, 16) {
        let h = mark(&h, 0.1, &mut rng).unwrap();
        let ex = extended_core(&h).vertices;
        if ex.len() < 2 {
            continue;
        }
        let (a1, a0) = ex.split_at(ex.len() / 2);
        let m1 = mantle(&h, a1).unwrap();
        let m0 = mantle(&h, a0).unwrap();
        assert!(m1.iter().all(|v| !m0.contains(v)));
        let mut union = [m1, m0].concat();
        union.sort_unstable();
        assert_eq!(union, mantle(&h, &ex).unwrap());
        assert!(mantle(&h, &[]).unwrap().is_empty());
    }
}

fn supercritical_runs(lambda: f64, trials: u64, seed: u64) -> (ModelParams, Vec<(u64, u64)>) {
    let mp = ModelParams::from_lambda(3, 100_000, lambda).unwrap();
    let runs = (0..trials)
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t);
            let cs = components(&sample(&mp, &mut rng).unwrap());
            (cs.l1(), cs.l2())
        })
        .collect();
    (mp, runs)
}

#[test]
fn residual_is_subcritical() {
    for lambda in [1.1, 1.2] {
        let (mp, runs) = supercritical_runs(lambda, 200, 21);
        let eps = mp.eps;
        let b = runs.iter().map(|&(l1, _)| mp.residual_branching(l1)).sum::<f64>() / runs.len() as f64;
        assert!((1.0 - 5.0 * eps..=1.0 - 0.1 * eps).contains(&b), "lambda={lambda}: {b}");
        let dual = mp.rho_profile().unwrap().lambda_dual;
        assert!((b - dual).abs() < eps / 10.0, "lambda={lambda}: {b} vs {dual}");
    }
}

#[test]
fn second_component_tail() {
    for lambda in [1.1, 1.2] {
        let (mp, runs) = supercritical_runs(lambda, 200, 22);
        let bound = 20.0 / (mp.eps * mp.eps) * mp.eps3n().ln();
        let over = runs.iter().filter(|(_, l2)| *l2 as f64 > bound).count();
        assert!((over as f64) < 0.01 * runs.len() as f64, "lambda={lambda}: {over}");
    }
}

#[test]
fn theta_and_dumbbell_are_complex() {
    let theta = Hypergraph::from_edges(2, 4, &[vec![0, 1], vec![0, 2], vec![1, 2], vec![0, 3], vec![1, 3]]).unwrap();
    assert_eq!(components(&theta).n1(), 2);
    assert_eq!(complex_count(&theta), 1);
    let dumbbell = Hypergraph::from_edges(
        3,
        9,
        &[vec![0, 1, 2], vec![0, 1, 3], vec![3, 4, 5], vec![5, 6, 7], vec![5, 6, 8]],
    )
    .unwrap();
    assert_eq!(components(&dumbbell).n1(), 2);
    assert_eq!(complex_count(&dumbbell), 1);
    assert_eq!(core(&dumbbell).edges.len(), 5);
}

#[test]
fn census_of_edgeless_graph() {
    let h = Hypergraph::empty(3, 7);
    assert_eq!(connected_pairs(&h), 7);
    assert_eq!(tree_census(&h).get(&0), Some(&7));
    assert_eq!(complex_count(&h), 0);
}
