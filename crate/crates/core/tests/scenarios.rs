//! Worked instances for each module, checked against independent oracles.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sparsecut::curve::{build_curve, check_chord_bound};
use sparsecut::graph::{cut_of, load_edge_list, write_edge_list, Conductance, Graph};
use sparsecut::partition::{
    find_local_seed, global_sparsest_cut, global_sparsest_cut_tight_volume, local_partition, sweep,
    tight_volume_params, GlobalParams, LocalOutcome, LocalParams,
};
use sparsecut::spectral::{
    best_seed_vertex, certify_lower_bound, restricted_eigenpair, retained_mass,
};
use sparsecut::testbed::{
    barbell, erdos_renyi, exact_phi_k, expander, random_connected, ring_of_cliques,
    ring_of_cliques_phi_k,
};
use sparsecut::walk::{
    lazy_step, run_walk, truncated_step, DenseDistribution, Masses, SparseDistribution,
    WalkSchedule,
};

#[test]
fn ring_of_cliques_round_trips_through_edge_list() {
    let g = ring_of_cliques(4, 5).unwrap().graph;
    let mut text = Vec::new();
    write_edge_list(&g, &mut text).unwrap();
    let loaded = load_edge_list(text.as_slice()).unwrap();
    assert_eq!(loaded.graph, g);
    assert_eq!(loaded.duplicate_edges, 0);
    assert!(loaded
        .labels
        .iter()
        .enumerate()
        .all(|(i, &l)| l == i as u64));
}

#[test]
fn erdos_renyi_sandwich_over_fifty_steps() {
    let g = erdos_renyi(200, 0.05, 1).unwrap();
    let eps = 1e-4;
    let v = 0;
    let mut exact = DenseDistribution::point(&g, v).unwrap();
    let mut trunc = SparseDistribution::point(&g, v).unwrap();
    for t in 1..=50 {
        exact = lazy_step(&g, &exact).unwrap();
        trunc = truncated_step(&g, &trunc, eps).unwrap().1;
        for u in 0..g.vertex_count() {
            let gap = exact.mass(u) - trunc.mass(u);
            assert!(gap >= 0.0);
            assert!(gap <= eps * t as f64 * g.degree(u) as f64 + 1e-12);
        }
        assert!(trunc.support_volume(&g) as f64 <= 1.0 / eps);
    }
}

#[test]
fn chord_bound_on_erdos_renyi_walks() {
    let g = erdos_renyi(100, 0.08, 2).unwrap();
    for truncation in [0.0, 1e-4] {
        let trace = run_walk(&g, 0, WalkSchedule::new(30, truncation).unwrap()).unwrap();
        let curves: Vec<_> = trace.steps.iter().map(|p| build_curve(&g, p)).collect();
        for w in curves.windows(2) {
            let violations = check_chord_bound(&g, &w[0], &w[1], g.total_volume(), 1e-9);
            assert!(violations.is_empty(), "{violations:?}");
        }
    }
}

/// Smallest eigenvalue of `I − D_S^{-1/2} A_S D_S^{-1/2}` by a dense solver.
fn dense_restricted_lambda(g: &Graph, subset: &[usize]) -> f64 {
    let s = subset.len();
    let m = DMatrix::from_fn(s, s, |i, j| {
        let (u, v) = (subset[i], subset[j]);
        if i == j {
            1.0
        } else if g.has_edge(u, v) {
            -1.0 / ((g.degree(u) * g.degree(v)) as f64).sqrt()
        } else {
            0.0
        }
    });
    m.symmetric_eigen().eigenvalues.min()
}

#[test]
fn barbell_triangle_eigenvalue_matches_dense_solver() {
    let inst = barbell(3).unwrap();
    let pair = restricted_eigenpair(&inst.graph, inst.planted.members(), 1e-13).unwrap();
    let oracle = dense_restricted_lambda(&inst.graph, inst.planted.members());
    assert!((pair.lambda - oracle).abs() < 1e-9);
    assert!(pair.lambda <= 1.0 / 7.0 + 1e-10);
}

#[test]
fn ring_clique_eigenvalues_match_dense_solver() {
    let inst = ring_of_cliques(5, 6).unwrap();
    for c in 0..5 {
        let members: Vec<usize> = (c * 6..c * 6 + 6).collect();
        let pair = restricted_eigenpair(&inst.graph, &members, 1e-13).unwrap();
        let oracle = dense_restricted_lambda(&inst.graph, &members);
        assert!((pair.lambda - oracle).abs() < 1e-9);
        assert!(pair.lambda <= inst.phi_planted.value() + 1e-10);
    }
}

#[test]
fn ring_clique_certificate_over_hundred_steps() {
    let inst = ring_of_cliques(5, 6).unwrap();
    let cert = certify_lower_bound(&inst.graph, inst.planted.members(), 100).unwrap();
    assert_eq!(cert.steps.len(), 101);
    assert!(cert.worst_margin() >= -1e-10);
    assert_eq!(cert.conductance, inst.phi_planted);
}

#[test]
fn best_seed_matches_exhaustive_evaluation() {
    let inst = ring_of_cliques(5, 6).unwrap();
    let members = inst.planted.members();
    let (v, achieved) = best_seed_vertex(&inst.graph, members, 50).unwrap();
    let exhaustive: Vec<f64> = members
        .iter()
        .map(|&u| retained_mass(&inst.graph, members, u, 50).unwrap())
        .collect();
    let max = exhaustive.iter().cloned().fold(f64::MIN, f64::max);
    assert_eq!(achieved, max);
    assert!(members.contains(&v));
    assert!(achieved >= (1.0 - inst.phi_planted.value() / 2.0).powi(50) - 1e-10);
}

#[test]
fn barbell_sweep_finds_left_triangle() {
    let g = barbell(3).unwrap().graph;
    let trace = run_walk(&g, 0, WalkSchedule::exact(20)).unwrap();
    let outcome = sweep(&g, &trace.steps, 7).unwrap().unwrap();
    assert_eq!(outcome.best.members(), &[0, 1, 2]);
    assert_eq!(outcome.best.exact_conductance(), Conductance::new(1, 7));
    let (oracle, _) = exact_phi_k(&g, 7).unwrap();
    assert_eq!(oracle, outcome.best.exact_conductance());
}

#[test]
fn global_on_ring_of_eight_cliques() {
    let inst = ring_of_cliques(8, 8).unwrap();
    let k = inst.planted.volume();
    let (phi_k, _) = ring_of_cliques_phi_k(8, 8, k).unwrap();
    let params = GlobalParams::new(k, 0.01).unwrap();
    let outcome = global_sparsest_cut(&inst.graph, &params).unwrap().unwrap();
    assert!(outcome.best.volume() <= params.volume_cap());
    assert!(outcome.best.conductance() <= params.guarantee(phi_k.value()));
    // the planted clique itself is the optimum under this cap
    assert_eq!(outcome.best.exact_conductance(), phi_k);
}

#[test]
fn global_bicriteria_against_exhaustive_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut checked = 0;
    for _ in 0..40 {
        let n = rng.gen_range(4..=12);
        let g = random_connected(n, rng.gen_range(0.2..0.6), &mut rng).unwrap();
        let k = rng.gen_range(2..=(2 * g.total_volume() / 3).max(2));
        let Ok((phi_k, _)) = exact_phi_k(&g, k) else {
            continue;
        };
        let params = GlobalParams::new(k, 0.01).unwrap();
        let Some(outcome) = global_sparsest_cut(&g, &params).unwrap() else {
            continue;
        };
        assert!(outcome.best.volume() <= params.volume_cap());
        if phi_k.value() < params.epsilon() {
            assert!(outcome.best.conductance() <= params.guarantee(phi_k.value()));
        }
        let tight = tight_volume_params(k, 0.75);
        if let (Ok(tight), true) = (tight, k >= 3) {
            let relaxed = 4.0 * (phi_k.value() * 2.0 * (k as f64).ln() / 0.75).sqrt();
            let outcome = global_sparsest_cut_tight_volume(&g, k, 0.75).unwrap();
            if let Some(o) = outcome {
                assert!(o.best.volume() as f64 <= 1.75 * k as f64);
                assert!(o.best.volume() <= tight.volume_cap());
                if phi_k.value() < tight.epsilon() {
                    assert!(o.best.conductance() <= relaxed);
                }
            }
        }
        checked += 1;
    }
    assert!(checked > 20);
}

#[test]
fn zero_conductance_component_is_returned() {
    // triangle plus a separate 4-cycle with a chord
    let g = Graph::from_edges(
        7,
        [
            (0, 1),
            (1, 2),
            (2, 0),
            (3, 4),
            (4, 5),
            (5, 6),
            (6, 3),
            (3, 5),
        ],
    )
    .unwrap();
    let params = GlobalParams::new(6, 0.01).unwrap();
    let outcome = global_sparsest_cut(&g, &params).unwrap().unwrap();
    assert_eq!(outcome.best.boundary(), 0);
    assert_eq!(outcome.best.members(), &[0, 1, 2]);
}

#[test]
fn local_recovery_on_ring_of_ten_cliques() {
    let inst = ring_of_cliques(10, 10).unwrap();
    let k = inst.planted.volume();
    let phi = inst.phi_planted.value();
    let clique: Vec<usize> = (40..50).collect();
    let params = LocalParams::new(0, k, phi, 0.2).unwrap();
    let seed = find_local_seed(&inst.graph, &clique, &params).unwrap();
    assert!(clique.contains(&seed));
    let outcome = local_partition(&inst.graph, &params.with_seed(seed)).unwrap();
    let found = outcome.found().expect("planted clique is recoverable");
    assert!(found.best.conductance() <= 8.0 * (phi / 0.2).sqrt());
    assert!(found.best.volume() <= params.volume_cap());
}

#[test]
fn best_seed_makes_local_partition_succeed_on_planted_sets() {
    for inst in [
        ring_of_cliques(6, 7).unwrap(),
        barbell(6).unwrap(),
        ring_of_cliques(3, 4).unwrap(),
    ] {
        let k = inst.planted.volume();
        let params = LocalParams::new(0, k, inst.phi_planted.value(), 0.5).unwrap();
        let seed = find_local_seed(&inst.graph, inst.planted.members(), &params).unwrap();
        let outcome = local_partition(&inst.graph, &params.with_seed(seed)).unwrap();
        assert!(outcome.found().is_some());
    }
}

#[test]
fn expander_seed_is_not_found() {
    let g = expander(2000, 3, 4).unwrap();
    let params = LocalParams::new(3, 20, 0.001, 0.5).unwrap();
    match local_partition(&g, &params).unwrap() {
        LocalOutcome::NotFound { best, work } => {
            assert!(work > 0);
            let best = best.expect("level sets under the cap exist");
            assert!(best.best.conductance() > params.threshold());
            assert!(best.best.volume() <= params.volume_cap());
            // no set under the cap on the best curve does better
            let check = cut_of(&g, best.best.members()).unwrap();
            assert_eq!(check, best.best);
        }
        LocalOutcome::Found(o) => panic!("unexpected cut {:?}", o.best.exact_conductance()),
    }
}
