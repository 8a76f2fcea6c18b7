//! Lazy random walks `p ↦ p·W` with `W = ½(I + D⁻¹A)`, in an exact dense
//! form and an ε-truncated sparse form whose per-step cost is bounded by the
//! volume of its support.
//!
//! Both step functions visit source vertices in increasing id order and
//! accumulate into each target in that same order, so a truncated step with
//! nothing truncated is bitwise identical to the dense step, and the dense
//! walk dominates the truncated one componentwise even in floating point.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Slack allowed on the total mass of a distribution.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Read access shared by the dense and sparse distributions.
pub trait Masses {
    /// `(vertex, mass)` pairs that can carry mass: every vertex for dense
    /// distributions, the support for sparse ones. Sorted by vertex id.
    fn entries(&self) -> Vec<(usize, f64)>;

    fn mass(&self, v: usize) -> f64;

    fn total_mass(&self) -> f64;

    /// Whether `entries` spans the whole vertex set.
    fn is_dense(&self) -> bool;

    fn mass_on(&self, members: &[usize]) -> f64 {
        members.iter().map(|&v| self.mass(v)).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseDistribution {
    mass: Vec<f64>,
}

impl DenseDistribution {
    /// All mass on `v` (the indicator `χ_v`).
    pub fn point(g: &Graph, v: usize) -> Result<Self> {
        check_vertex(g, v)?;
        let mut mass = vec![0.0; g.vertex_count()];
        mass[v] = 1.0;
        Ok(DenseDistribution { mass })
    }

    /// `π(v) = d(v) / 2m`.
    pub fn stationary(g: &Graph) -> Self {
        let total = g.total_volume() as f64;
        DenseDistribution {
            mass: g.degrees().map(|d| d as f64 / total).collect(),
        }
    }

    pub fn from_vec(g: &Graph, mass: Vec<f64>) -> Result<Self> {
        if mass.len() != g.vertex_count() {
            return Err(Error::domain(format!(
                "distribution has {} entries, graph has {} vertices",
                mass.len(),
                g.vertex_count()
            )));
        }
        if mass.iter().any(|m| !m.is_finite() || *m < 0.0) {
            return Err(Error::domain(
                "distribution entries must be finite and nonnegative",
            ));
        }
        let total: f64 = mass.iter().sum();
        if total > 1.0 + MASS_TOLERANCE {
            return Err(Error::domain(format!(
                "distribution has total mass {total} > 1"
            )));
        }
        Ok(DenseDistribution { mass })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn to_sparse(&self) -> SparseDistribution {
        SparseDistribution {
            entries: self
                .mass
                .iter()
                .enumerate()
                .filter(|(_, &m)| m > 0.0)
                .map(|(v, &m)| (v, m))
                .collect(),
        }
    }
}

impl Masses for DenseDistribution {
    fn entries(&self) -> Vec<(usize, f64)> {
        self.mass.iter().copied().enumerate().collect()
    }

    fn mass(&self, v: usize) -> f64 {
        self.mass[v]
    }

    fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }

    fn is_dense(&self) -> bool {
        true
    }
}

/// Mass on a sorted support; vertices off the support carry zero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseDistribution {
    entries: Vec<(usize, f64)>,
}

impl SparseDistribution {
    pub fn point(g: &Graph, v: usize) -> Result<Self> {
        check_vertex(g, v)?;
        Ok(SparseDistribution {
            entries: vec![(v, 1.0)],
        })
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().map(|&(v, _)| v)
    }

    pub fn support_len(&self) -> usize {
        self.entries.len()
    }

    pub fn support_volume(&self, g: &Graph) -> u64 {
        self.support().map(|v| g.degree(v)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn to_dense(&self, g: &Graph) -> DenseDistribution {
        let mut mass = vec![0.0; g.vertex_count()];
        for &(v, m) in &self.entries {
            mass[v] = m;
        }
        DenseDistribution { mass }
    }
}

impl Masses for SparseDistribution {
    fn entries(&self) -> Vec<(usize, f64)> {
        self.entries.clone()
    }

    fn mass(&self, v: usize) -> f64 {
        self.entries
            .binary_search_by_key(&v, |&(u, _)| u)
            .map_or(0.0, |i| self.entries[i].1)
    }

    fn total_mass(&self) -> f64 {
        self.entries.iter().map(|&(_, m)| m).sum()
    }

    fn is_dense(&self) -> bool {
        false
    }
}

/// Walk state: dense for exact walks, sparse for truncated ones.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Dense(DenseDistribution),
    Sparse(SparseDistribution),
}

impl Masses for Distribution {
    fn entries(&self) -> Vec<(usize, f64)> {
        match self {
            Distribution::Dense(d) => d.entries(),
            Distribution::Sparse(s) => s.entries(),
        }
    }

    fn mass(&self, v: usize) -> f64 {
        match self {
            Distribution::Dense(d) => d.mass(v),
            Distribution::Sparse(s) => s.mass(v),
        }
    }

    fn total_mass(&self) -> f64 {
        match self {
            Distribution::Dense(d) => d.total_mass(),
            Distribution::Sparse(s) => s.total_mass(),
        }
    }

    fn is_dense(&self) -> bool {
        matches!(self, Distribution::Dense(_))
    }
}

impl Distribution {
    /// Sum of degrees over vertices with nonzero mass.
    pub fn support_volume(&self, g: &Graph) -> u64 {
        match self {
            Distribution::Dense(d) => d
                .as_slice()
                .iter()
                .enumerate()
                .filter(|(_, &m)| m > 0.0)
                .map(|(v, _)| g.degree(v))
                .sum(),
            Distribution::Sparse(s) => s.support_volume(g),
        }
    }

    pub fn to_dense(&self, g: &Graph) -> DenseDistribution {
        match self {
            Distribution::Dense(d) => d.clone(),
            Distribution::Sparse(s) => s.to_dense(g),
        }
    }
}

fn check_vertex(g: &Graph, v: usize) -> Result<()> {
    if v >= g.vertex_count() {
        return Err(Error::domain(format!(
            "vertex {v} is out of range for a graph with {} vertices",
            g.vertex_count()
        )));
    }
    Ok(())
}

/// One exact lazy step.
pub fn lazy_step(g: &Graph, p: &DenseDistribution) -> Result<DenseDistribution> {
    if p.len() != g.vertex_count() {
        return Err(Error::domain(format!(
            "distribution has {} entries, graph has {} vertices",
            p.len(),
            g.vertex_count()
        )));
    }
    let mut out = vec![0.0; p.len()];
    for (u, &m) in p.mass.iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        out[u] += m * 0.5;
        let share = m / (2.0 * g.degree(u) as f64);
        for &w in g.neighbors(u) {
            out[w] += share;
        }
    }
    Ok(DenseDistribution { mass: out })
}

/// One truncated step: `q = p̃·W`, then every vertex with `q(v) < ε·d(v)` is
/// zeroed. Touches only the support of `p` and its neighbors.
pub fn truncated_step(
    g: &Graph,
    p: &SparseDistribution,
    epsilon: f64,
) -> Result<(SparseDistribution, SparseDistribution)> {
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::domain(format!(
            "truncation threshold {epsilon} must be >= 0"
        )));
    }
    if let Some(&(v, _)) = p.entries.last() {
        check_vertex(g, v)?;
    }

    let mut acc: HashMap<usize, f64> = HashMap::with_capacity(p.entries.len() * 4);
    for &(u, m) in &p.entries {
        *acc.entry(u).or_insert(0.0) += m * 0.5;
        let share = m / (2.0 * g.degree(u) as f64);
        for &w in g.neighbors(u) {
            *acc.entry(w).or_insert(0.0) += share;
        }
    }
    let mut q: Vec<(usize, f64)> = acc.into_iter().collect();
    q.sort_unstable_by_key(|&(v, _)| v);

    let kept = q
        .iter()
        .copied()
        .filter(|&(v, m)| m >= epsilon * g.degree(v) as f64)
        .collect();
    Ok((
        SparseDistribution { entries: q },
        SparseDistribution { entries: kept },
    ))
}

/// Horizon `T` and truncation threshold (0 for an exact walk).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkSchedule {
    pub horizon: usize,
    pub truncation: f64,
}

impl WalkSchedule {
    pub fn new(horizon: usize, truncation: f64) -> Result<Self> {
        if !(truncation >= 0.0 && truncation.is_finite()) {
            return Err(Error::domain(format!(
                "truncation threshold {truncation} must be finite and >= 0"
            )));
        }
        Ok(WalkSchedule {
            horizon,
            truncation,
        })
    }

    pub fn exact(horizon: usize) -> Self {
        WalkSchedule {
            horizon,
            truncation: 0.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.truncation == 0.0
    }
}

/// Streaming walker; yields `p_0, p_1, ...` one step at a time.
#[derive(Debug, Clone)]
pub struct Walker<'g> {
    graph: &'g Graph,
    current: Distribution,
    truncation: f64,
    step: usize,
    work: u64,
}

impl<'g> Walker<'g> {
    /// Starts from `χ_seed`. A zero threshold runs the exact dense walk.
    pub fn new(graph: &'g Graph, seed: usize, truncation: f64) -> Result<Self> {
        let schedule = WalkSchedule::new(0, truncation)?;
        let current = if schedule.is_exact() {
            Distribution::Dense(DenseDistribution::point(graph, seed)?)
        } else {
            Distribution::Sparse(SparseDistribution::point(graph, seed)?)
        };
        Ok(Self::from_distribution(graph, current, truncation))
    }

    pub fn from_distribution(graph: &'g Graph, start: Distribution, truncation: f64) -> Self {
        Walker {
            graph,
            current: start,
            truncation,
            step: 0,
            work: 0,
        }
    }

    pub fn current(&self) -> &Distribution {
        &self.current
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// Adjacency entries scanned so far.
    pub fn work(&self) -> u64 {
        self.work
    }

    pub fn advance(&mut self) {
        let g = self.graph;
        self.current = match &self.current {
            Distribution::Dense(p) => {
                self.work += g.total_volume();
                Distribution::Dense(lazy_step(g, p).expect("walker state matches its graph"))
            }
            Distribution::Sparse(p) => {
                self.work += p.support_volume(g);
                let (_, next) =
                    truncated_step(g, p, self.truncation).expect("walker state matches its graph");
                Distribution::Sparse(next)
            }
        };
        self.step += 1;
    }
}

/// A recorded walk `p_0 .. p_T` with per-step support volumes.
#[derive(Debug, Clone)]
pub struct WalkTrace {
    pub seed: usize,
    pub schedule: WalkSchedule,
    pub steps: Vec<Distribution>,
    /// `vol(support(p_t))` for each recorded step.
    pub support_volume: Vec<u64>,
    /// Adjacency entries scanned while stepping.
    pub work: u64,
}

pub fn run_walk(g: &Graph, seed: usize, schedule: WalkSchedule) -> Result<WalkTrace> {
    let mut walker = Walker::new(g, seed, schedule.truncation)?;
    let mut steps = Vec::with_capacity(schedule.horizon + 1);
    let mut support_volume = Vec::with_capacity(schedule.horizon + 1);
    loop {
        support_volume.push(walker.current().support_volume(g));
        steps.push(walker.current().clone());
        if walker.step() == schedule.horizon {
            break;
        }
        walker.advance();
    }
    Ok(WalkTrace {
        seed,
        schedule,
        steps,
        support_volume,
        work: walker.work(),
    })
}
