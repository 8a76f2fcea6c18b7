//! Local spectral lower bound: the smallest eigenpair of the normalized
//! Laplacian restricted to a vertex set `S`, the seed distribution built
//! from its eigenvector, and certifiers for how much walk mass stays in `S`.
//!
//! The iteration runs on `N = ½(I + D_S^{-1/2} A_S D_S^{-1/2}) = I − 𝓛_S/2`,
//! which is similar to the restricted lazy walk `½(I + D_S⁻¹A_S)`, so both
//! share the spectral radius `ρ = 1 − λ_S/2`. `D` holds degrees in the whole
//! graph, not in the induced subgraph.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{cut_of, normalize_set, Conductance, Graph};
use crate::walk::{lazy_step, DenseDistribution, Masses};

/// Default tolerance on eigenpair convergence.
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

/// Tolerance applied when checking certified inequalities.
pub const CERTIFICATE_TOLERANCE: f64 = 1e-10;

/// Eigenpair tolerance used inside certificates. Errors in the eigenvector
/// accumulate linearly over the horizon, so this is much tighter than the
/// certificate tolerance.
const CERTIFY_EIGEN_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIteration {
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for PowerIteration {
    fn default() -> Self {
        PowerIteration {
            tolerance: DEFAULT_TOLERANCE,
            max_iterations: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalEigenpair {
    /// Sorted members of `S`.
    pub subset: Vec<usize>,
    /// Smallest eigenvalue of `𝓛_S`.
    pub lambda: f64,
    /// Positive eigenvector, scaled so that `Σ √d(v)·vector(v) = 1`.
    pub vector: Vec<f64>,
    /// `√d(v)·vector(v)`; a probability distribution on `S`.
    pub seed_distribution: Vec<f64>,
    pub iterations: usize,
}

impl LocalEigenpair {
    /// The seed distribution as a walk state on the whole graph.
    pub fn seed(&self, g: &Graph) -> DenseDistribution {
        let mut mass = vec![0.0; g.vertex_count()];
        for (&v, &m) in self.subset.iter().zip(&self.seed_distribution) {
            mass[v] = m;
        }
        DenseDistribution::from_vec(g, mass).expect("seed distribution is a probability vector")
    }

    /// Per-step retention factor `1 − λ_S/2`.
    pub fn retention(&self) -> f64 {
        1.0 - self.lambda / 2.0
    }
}

/// Induced adjacency of `S` in local indices, with `1/√d` weights.
struct Restricted {
    neighbors: Vec<Vec<usize>>,
    inv_sqrt_degree: Vec<f64>,
}

impl Restricted {
    fn new(g: &Graph, subset: &[usize]) -> Self {
        let index: HashMap<usize, usize> =
            subset.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let neighbors = subset
            .iter()
            .map(|&v| {
                g.neighbors(v)
                    .iter()
                    .filter_map(|w| index.get(w).copied())
                    .collect()
            })
            .collect();
        let inv_sqrt_degree = subset
            .iter()
            .map(|&v| 1.0 / (g.degree(v) as f64).sqrt())
            .collect();
        Restricted {
            neighbors,
            inv_sqrt_degree,
        }
    }

    /// `y = N x`.
    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, out) in y.iter_mut().enumerate() {
            let off: f64 = self.neighbors[i]
                .iter()
                .map(|&j| x[j] * self.inv_sqrt_degree[j])
                .sum();
            *out = 0.5 * (x[i] + self.inv_sqrt_degree[i] * off);
        }
    }
}

fn l2_normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
}

fn connected_subset(g: &Graph, subset: &[usize]) -> Result<Vec<usize>> {
    let subset = normalize_set(g, subset)?;
    let components = g.induced_components(&subset);
    if components > 1 {
        return Err(Error::DisconnectedSubset { components });
    }
    Ok(subset)
}

impl PowerIteration {
    pub fn new(tolerance: f64) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance.is_finite()) {
            return Err(Error::domain(format!(
                "tolerance {tolerance} must be positive"
            )));
        }
        Ok(PowerIteration {
            tolerance,
            ..Default::default()
        })
    }

    /// Iterates until successive Rayleigh quotients agree to a relative
    /// `tolerance` and the residual `‖Nx − ρx‖∞` drops below `tolerance`.
    pub fn solve(&self, g: &Graph, subset: &[usize]) -> Result<LocalEigenpair> {
        let subset = connected_subset(g, subset)?;
        let op = Restricted::new(g, &subset);
        let k = subset.len();

        // Start from D_S^{1/2}·1, whose Rayleigh quotient is already φ(S);
        // for this PSD operator the quotient only improves from there.
        let mut x: Vec<f64> = subset
            .iter()
            .map(|&v| (g.degree(v) as f64).sqrt())
            .collect();
        l2_normalize(&mut x);
        let mut y = vec![0.0; k];
        let mut rho_prev = f64::NAN;
        let mut residual = f64::INFINITY;
        let mut rho = 0.0;

        for iteration in 1..=self.max_iterations {
            op.apply(&x, &mut y);
            rho = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>();
            residual = x
                .iter()
                .zip(&y)
                .map(|(a, b)| (b - rho * a).abs())
                .fold(0.0, f64::max);
            let settled = (rho - rho_prev).abs() <= self.tolerance * rho.abs();
            if settled && residual < self.tolerance {
                return Ok(finish(g, subset, rho, x, iteration));
            }
            rho_prev = rho;
            x.copy_from_slice(&y);
            l2_normalize(&mut x);
        }
        Err(Error::NoConvergence {
            iterations: self.max_iterations,
            lambda: (2.0 * (1.0 - rho)).max(0.0),
            residual,
        })
    }
}

fn finish(
    g: &Graph,
    subset: Vec<usize>,
    rho: f64,
    x: Vec<f64>,
    iterations: usize,
) -> LocalEigenpair {
    let lambda = (2.0 * (1.0 - rho)).clamp(0.0, 2.0);
    let sqrt_d: Vec<f64> = subset
        .iter()
        .map(|&v| (g.degree(v) as f64).sqrt())
        .collect();
    let scale: f64 = x.iter().zip(&sqrt_d).map(|(a, s)| a * s).sum();
    let vector: Vec<f64> = x.iter().map(|a| a / scale).collect();
    let seed_distribution = vector.iter().zip(&sqrt_d).map(|(a, s)| a * s).collect();
    LocalEigenpair {
        subset,
        lambda,
        vector,
        seed_distribution,
        iterations,
    }
}

/// Smallest eigenpair of the restricted normalized Laplacian with default
/// iteration limits. `subset` must induce a connected subgraph.
pub fn restricted_eigenpair(g: &Graph, subset: &[usize], tolerance: f64) -> Result<LocalEigenpair> {
    PowerIteration::new(tolerance)?.solve(g, subset)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepMargin {
    pub t: usize,
    /// `p_t(S)` for the walk started from the seed distribution.
    pub retained: f64,
    /// `(1 − λ_S/2)^t · p_0(S)`.
    pub bound: f64,
    /// `retained − bound`.
    pub margin: f64,
    /// `min_v p_t(v) − (1 − λ_S/2)^t · p_0(v)` over `v ∈ S`.
    pub component_margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub eigenpair: LocalEigenpair,
    pub conductance: Conductance,
    pub steps: Vec<StepMargin>,
}

impl Certificate {
    pub fn worst_margin(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| s.margin.min(s.component_margin))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Runs the exact walk from the eigenvector seed for `horizon` steps and
/// checks, for every `t`, that `p_{t,S} ≥ (1 − λ_S/2)^t·p_{0,S}` both
/// componentwise and in total, within [`CERTIFICATE_TOLERANCE`].
pub fn certify_lower_bound(g: &Graph, subset: &[usize], horizon: usize) -> Result<Certificate> {
    let solver = PowerIteration {
        tolerance: CERTIFY_EIGEN_TOLERANCE,
        ..Default::default()
    };
    certify_lower_bound_with(g, subset, horizon, &solver, CERTIFICATE_TOLERANCE)
}

pub fn certify_lower_bound_with(
    g: &Graph,
    subset: &[usize],
    horizon: usize,
    solver: &PowerIteration,
    tolerance: f64,
) -> Result<Certificate> {
    let eigenpair = solver.solve(g, subset)?;
    let conductance = cut_of(g, &eigenpair.subset)?.exact_conductance();
    if eigenpair.lambda > conductance.value() + tolerance {
        return Err(Error::CertificateViolation {
            step: 0,
            margin: conductance.value() - eigenpair.lambda,
        });
    }

    let members = &eigenpair.subset;
    let initial = eigenpair.seed(g);
    let initial_mass = initial.mass_on(members);
    let rho = eigenpair.retention();

    let mut p = initial.clone();
    let mut steps = Vec::with_capacity(horizon + 1);
    for t in 0..=horizon {
        if t > 0 {
            p = lazy_step(g, &p)?;
        }
        let factor = rho.powi(t as i32);
        let retained = p.mass_on(members);
        let bound = factor * initial_mass;
        let component_margin = members
            .iter()
            .map(|&v| p.mass(v) - factor * initial.mass(v))
            .fold(f64::INFINITY, f64::min);
        let step = StepMargin {
            t,
            retained,
            bound,
            margin: retained - bound,
            component_margin,
        };
        let worst = step.margin.min(step.component_margin);
        if worst < -tolerance {
            return Err(Error::CertificateViolation {
                step: t,
                margin: worst,
            });
        }
        steps.push(step);
    }
    Ok(Certificate {
        eigenpair,
        conductance,
        steps,
    })
}

/// `p_T(S)` for the exact walk started at `v`.
pub fn retained_mass(g: &Graph, members: &[usize], v: usize, horizon: usize) -> Result<f64> {
    let mut p = DenseDistribution::point(g, v)?;
    for _ in 0..horizon {
        p = lazy_step(g, &p)?;
    }
    Ok(p.mass_on(members))
}

/// The vertex `v ∈ S` maximizing `p_T(S)` from `χ_v` (ties to the smaller
/// id), with the achieved value. Fails with a certificate violation if the
/// maximum is below `(1 − φ(S)/2)^T`.
pub fn best_seed_vertex(g: &Graph, subset: &[usize], horizon: usize) -> Result<(usize, f64)> {
    let members = connected_subset(g, subset)?;
    let phi = cut_of(g, &members)?.conductance();
    let values = members
        .par_iter()
        .map(|&v| retained_mass(g, &members, v, horizon))
        .collect::<Result<Vec<f64>>>()?;
    let (best, achieved) =
        members
            .iter()
            .zip(&values)
            .fold((members[0], values[0]), |acc, (&v, &val)| {
                if val > acc.1 {
                    (v, val)
                } else {
                    acc
                }
            });
    let floor = (1.0 - phi / 2.0).powi(horizon as i32);
    let margin = achieved - floor;
    if margin < -CERTIFICATE_TOLERANCE {
        return Err(Error::CertificateViolation {
            step: horizon,
            margin,
        });
    }
    Ok((best, achieved))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, SymmetricEigen};

    fn barbell3() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (2, 3)]).unwrap()
    }

    /// Smallest eigenvalue of the restricted normalized Laplacian from a
    /// dense symmetric eigensolver.
    fn dense_lambda(g: &Graph, subset: &[usize]) -> f64 {
        let k = subset.len();
        let m = DMatrix::from_fn(k, k, |i, j| {
            let (u, v) = (subset[i], subset[j]);
            if i == j {
                1.0
            } else if g.has_edge(u, v) {
                -1.0 / ((g.degree(u) * g.degree(v)) as f64).sqrt()
            } else {
                0.0
            }
        });
        SymmetricEigen::new(m)
            .eigenvalues
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn singleton_has_lambda_one() {
        let g = barbell3();
        let pair = restricted_eigenpair(&g, &[4], 1e-12).unwrap();
        assert!((pair.lambda - 1.0).abs() < 1e-12);
        assert_eq!(pair.seed_distribution, vec![1.0]);
    }

    #[test]
    fn whole_graph_gives_stationary_seed() {
        let g = barbell3();
        let all: Vec<_> = (0..6).collect();
        let pair = restricted_eigenpair(&g, &all, 1e-12).unwrap();
        assert!(pair.lambda.abs() < 1e-12);
        let pi = DenseDistribution::stationary(&g);
        for (v, &m) in pair.seed_distribution.iter().enumerate() {
            assert!((m - pi.mass(v)).abs() < 1e-12);
        }
    }

    #[test]
    fn triangle_matches_dense_solver() {
        let g = barbell3();
        let pair = restricted_eigenpair(&g, &[0, 1, 2], 1e-12).unwrap();
        let oracle = dense_lambda(&g, &[0, 1, 2]);
        assert!(
            (pair.lambda - oracle).abs() < 1e-9,
            "{} vs {oracle}",
            pair.lambda
        );
        assert!(pair.lambda <= 1.0 / 7.0 + 1e-10);
        assert!(pair.vector.iter().all(|&x| x > 0.0));
        let total: f64 = pair.seed_distribution.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn path_segment_matches_dense_solver() {
        let g = Graph::from_edges(12, (0..11).map(|i| (i, i + 1))).unwrap();
        let subset: Vec<_> = (2..9).collect();
        let pair = restricted_eigenpair(&g, &subset, 1e-12).unwrap();
        assert!((pair.lambda - dense_lambda(&g, &subset)).abs() < 1e-9);
    }

    #[test]
    fn disconnected_subset_rejected() {
        let g = barbell3();
        assert!(matches!(
            restricted_eigenpair(&g, &[0, 4], 1e-10),
            Err(Error::DisconnectedSubset { components: 2 })
        ));
        assert!(restricted_eigenpair(&g, &[], 1e-10).is_err());
        assert!(restricted_eigenpair(&g, &[0], 0.0).is_err());
    }

    #[test]
    fn iteration_cap_reports_best_estimate() {
        let g = Graph::from_edges(40, (0..39).map(|i| (i, i + 1))).unwrap();
        let subset: Vec<_> = (5..35).collect();
        let solver = PowerIteration {
            tolerance: 1e-12,
            max_iterations: 3,
        };
        match solver.solve(&g, &subset) {
            Err(Error::NoConvergence {
                iterations: 3,
                lambda,
                ..
            }) => assert!(lambda >= 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn certificate_on_whole_graph_is_tight() {
        let g = barbell3();
        let all: Vec<_> = (0..6).collect();
        let cert = certify_lower_bound(&g, &all, 20).unwrap();
        for s in &cert.steps {
            assert!((s.retained - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn certificate_base_case() {
        let g = barbell3();
        let cert = certify_lower_bound(&g, &[0, 1, 2], 0).unwrap();
        assert_eq!(cert.steps.len(), 1);
        assert_eq!(cert.steps[0].margin, 0.0);
        assert_eq!(cert.steps[0].component_margin, 0.0);
    }

    #[test]
    fn singleton_in_k2_loses_half_per_step() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        for t in [0, 1, 5, 12] {
            let (v, achieved) = best_seed_vertex(&g, &[1], t).unwrap();
            assert_eq!(v, 1);
            // mass on a K2 endpoint after t lazy steps from itself is 1/2
            let expected = if t == 0 { 1.0 } else { 0.5 };
            assert!((achieved - expected).abs() < 1e-15);
            assert!(achieved >= 0.5f64.powi(t as i32));
        }
    }

    #[test]
    fn best_seed_on_whole_graph_keeps_everything() {
        let g = barbell3();
        let all: Vec<_> = (0..6).collect();
        let (v, achieved) = best_seed_vertex(&g, &all, 9).unwrap();
        assert!(v < 6);
        assert!((achieved - 1.0).abs() < 1e-12);
    }

    #[test]
    fn best_seed_of_triangle_is_exhaustive_max() {
        let g = barbell3();
        let (v, achieved) = best_seed_vertex(&g, &[0, 1, 2], 10).unwrap();
        let values: Vec<f64> = (0..3)
            .map(|u| retained_mass(&g, &[0, 1, 2], u, 10).unwrap())
            .collect();
        let max = values.iter().copied().fold(f64::MIN, f64::max);
        assert_eq!(achieved, max);
        assert_eq!(values[v], max);
        assert!(v < 3);
    }
}
