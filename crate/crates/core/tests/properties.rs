use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sparsecut::curve::{build_curve, check_chord_bound};
use sparsecut::graph::{cut_of, Graph};
use sparsecut::partition::{global_sparsest_cut, local_partition, GlobalParams, LocalParams};
use sparsecut::spectral::{certify_lower_bound, restricted_eigenpair};
use sparsecut::testbed::{exact_phi_k, random_connected, random_connected_subset};
use sparsecut::walk::{lazy_step, truncated_step, DenseDistribution, Masses, SparseDistribution};

fn graph_from(n: usize, p: f64, seed: u64) -> Graph {
    random_connected(n, p, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()
}

prop_compose! {
    fn connected_graph(max_n: usize)(n in 3..=max_n, p in 0.15f64..0.8, seed in any::<u64>()) -> Graph {
        graph_from(n, p, seed)
    }
}

prop_compose! {
    fn graph_and_subset(max_n: usize)(g in connected_graph(max_n), mask in any::<u32>()) -> (Graph, Vec<usize>) {
        let n = g.vertex_count();
        let mut members: Vec<usize> = (0..n).filter(|v| mask & (1 << v) != 0).collect();
        if members.is_empty() {
            members.push((mask as usize) % n);
        }
        (g, members)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_lists_build_simple_symmetric_graphs(
        n in 2usize..30,
        raw in prop::collection::vec((0usize..30, 0usize..30), 1..120),
    ) {
        let edges: Vec<(usize, usize)> = raw
            .into_iter()
            .map(|(u, v)| (u % n, v % n))
            .filter(|(u, v)| u != v)
            .collect();
        if let Ok(g) = Graph::from_edges(n, edges) {
            prop_assert_eq!(g.degrees().sum::<u64>(), 2 * g.edge_count() as u64);
            prop_assert_eq!(g.total_volume(), 2 * g.edge_count() as u64);
            for u in 0..n {
                let nbrs = g.neighbors(u);
                prop_assert!(nbrs.windows(2).all(|w| w[0] < w[1]));
                for &w in nbrs {
                    prop_assert!(w != u);
                    prop_assert!(g.neighbors(w).contains(&u));
                }
            }
            prop_assert_eq!(g.edges().count(), g.edge_count());
        }
    }

    #[test]
    fn cut_metrics((g, members) in graph_and_subset(14)) {
        let cut = cut_of(&g, &members).unwrap();
        let phi = cut.conductance();
        prop_assert!((0.0..=1.0).contains(&phi));
        prop_assert_eq!(cut.volume(), members.iter().map(|&v| g.degree(v)).sum::<u64>());
        let crossing = g
            .edges()
            .filter(|&(u, v)| members.contains(&u) != members.contains(&v))
            .count() as u64;
        prop_assert_eq!(cut.boundary(), crossing);

        let rest: Vec<usize> = (0..g.vertex_count()).filter(|v| !members.contains(v)).collect();
        if !rest.is_empty() {
            prop_assert_eq!(cut_of(&g, &rest).unwrap().boundary(), cut.boundary());
        }
    }

    #[test]
    fn lazy_walk_conserves_mass(g in connected_graph(16), seed in any::<u64>(), steps in 1usize..25) {
        let v = (seed as usize) % g.vertex_count();
        let mut p = DenseDistribution::point(&g, v).unwrap();
        for _ in 0..steps {
            p = lazy_step(&g, &p).unwrap();
            prop_assert!((p.total_mass() - 1.0).abs() < 1e-12);
            prop_assert!(p.as_slice().iter().all(|&m| m >= 0.0));
        }
    }

    #[test]
    fn truncation_sandwich_and_support_cost(
        g in connected_graph(20),
        seed in any::<u64>(),
        eps_exp in 1.0f64..4.0,
    ) {
        let eps = 10f64.powf(-eps_exp);
        let v = (seed as usize) % g.vertex_count();
        let mut exact = DenseDistribution::point(&g, v).unwrap();
        let mut trunc = SparseDistribution::point(&g, v).unwrap();
        let mut previous_mass = 1.0;
        for t in 1..=30 {
            exact = lazy_step(&g, &exact).unwrap();
            trunc = truncated_step(&g, &trunc, eps).unwrap().1;
            for u in 0..g.vertex_count() {
                let gap = exact.mass(u) - trunc.mass(u);
                prop_assert!(gap >= 0.0, "t={} u={} gap={}", t, u, gap);
                prop_assert!(gap <= eps * t as f64 * g.degree(u) as f64 + 1e-12);
            }
            prop_assert!(trunc.support_volume(&g) as f64 <= 1.0 / eps);
            prop_assert!(trunc.total_mass() <= previous_mass + 1e-15);
            previous_mass = trunc.total_mass();
        }
    }

    #[test]
    fn curves_are_concave_and_decrease(g in connected_graph(16), seed in any::<u64>()) {
        let v = (seed as usize) % g.vertex_count();
        let mut p = DenseDistribution::point(&g, v).unwrap();
        let mut prev = build_curve(&g, &p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..15 {
            p = lazy_step(&g, &p).unwrap();
            let next = build_curve(&g, &p);
            let slopes = next.slopes();
            prop_assert!(slopes.windows(2).all(|w| w[1] <= w[0] + 1e-12));
            for _ in 0..20 {
                let x = rng.gen_range(0.0..=g.total_volume() as f64);
                prop_assert!(next.eval(x).unwrap() <= prev.eval(x).unwrap() + 1e-12);
            }
            prop_assert!(check_chord_bound(&g, &prev, &next, g.total_volume(), 1e-9).is_empty());
            prev = next;
        }
    }

    #[test]
    fn truncated_curve_stays_below_exact(
        g in connected_graph(20),
        seed in any::<u64>(),
        eps_exp in 1.0f64..4.0,
    ) {
        let eps = 10f64.powf(-eps_exp);
        let v = (seed as usize) % g.vertex_count();
        let mut exact = DenseDistribution::point(&g, v).unwrap();
        let mut trunc = SparseDistribution::point(&g, v).unwrap();
        let mut prev_trunc = build_curve(&g, &trunc);
        for _ in 0..20 {
            exact = lazy_step(&g, &exact).unwrap();
            trunc = truncated_step(&g, &trunc, eps).unwrap().1;
            let c = build_curve(&g, &exact);
            let ct = build_curve(&g, &trunc);
            for &(x, y) in ct.points() {
                prop_assert!(y <= c.eval(x as f64).unwrap() + 1e-12);
            }
            prop_assert!(check_chord_bound(&g, &prev_trunc, &ct, g.total_volume(), 1e-9).is_empty());
            prev_trunc = ct;
        }
    }

    #[test]
    fn restricted_eigenvalue_is_below_conductance(g in connected_graph(14), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let size = rng.gen_range(1..=g.vertex_count());
        let subset = random_connected_subset(&g, size, &mut rng);
        let pair = restricted_eigenpair(&g, &subset, 1e-12).unwrap();
        let phi = cut_of(&g, &subset).unwrap().conductance();
        prop_assert!(pair.lambda >= -1e-10 && pair.lambda <= phi + 1e-10);
        prop_assert!(pair.vector.iter().all(|&x| x > 0.0));
        let total: f64 = pair.seed_distribution.iter().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn certificate_margins_hold(g in connected_graph(14), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let size = rng.gen_range(1..=g.vertex_count());
        let subset = random_connected_subset(&g, size, &mut rng);
        let cert = certify_lower_bound(&g, &subset, 40).unwrap();
        prop_assert!(cert.worst_margin() >= -1e-10);
        prop_assert_eq!(cert.steps.len(), 41);
    }

    #[test]
    fn phi_k_is_non_increasing(g in connected_graph(11)) {
        let min_degree = g.degrees().min().unwrap();
        let mut last = None;
        for k in min_degree..=g.total_volume() {
            let (phi, witness) = exact_phi_k(&g, k).unwrap();
            prop_assert!(witness.volume() <= k);
            prop_assert_eq!(witness.exact_conductance(), phi);
            if let Some(prev) = last {
                prop_assert!(phi <= prev);
            }
            last = Some(phi);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn global_outcomes_are_deterministic_and_capped(g in connected_graph(12), kf in 0.1f64..0.7) {
        let k = ((g.total_volume() as f64 * kf) as u64).max(2);
        let params = GlobalParams::new(k, 0.01).unwrap().with_horizon(40);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| global_sparsest_cut(&g, &params)).unwrap();
        let b = four.install(|| global_sparsest_cut(&g, &params)).unwrap();
        prop_assert_eq!(&a, &b);
        if let Some(o) = a {
            prop_assert!(o.best.volume() <= params.volume_cap());
            prop_assert_eq!(cut_of(&g, o.best.members()).unwrap(), o.best.clone());
        }
    }

    #[test]
    fn local_outcomes_are_deterministic_and_capped(g in connected_graph(16), seed in any::<u64>()) {
        let v = (seed as usize) % g.vertex_count();
        let k = (g.total_volume() / 3).max(4);
        let params = LocalParams::new(v, k, 0.05, 0.9).unwrap();
        let a = local_partition(&g, &params).unwrap();
        prop_assert_eq!(&a, &local_partition(&g, &params).unwrap());
        if let Some(o) = a.found() {
            prop_assert!(o.best.volume() <= params.volume_cap());
            prop_assert!(o.best.conductance() <= params.threshold());
            prop_assert_eq!(o.origin.seed, Some(v));
        }
    }
}
