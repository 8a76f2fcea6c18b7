//! Sweep cuts over walk trajectories, the global small-sparsest-cut
//! procedure (a walk from every vertex) and the local procedure (one
//! truncated walk from a given seed).

use rayon::prelude::*;

use crate::curve::level_order;
use crate::error::{Error, Result};
use crate::graph::{cut_of, Conductance, Cut, Graph, PrefixTracker};
use crate::spectral::best_seed_vertex;
use crate::walk::{Distribution, Masses, Walker};

/// The global procedure runs with `ε` no larger than this.
pub const GLOBAL_EPSILON_CEILING: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalParams {
    k: u64,
    requested_epsilon: f64,
    horizon_override: Option<usize>,
}

impl GlobalParams {
    pub fn new(k: u64, epsilon: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain(format!(
                "volume budget k = {k} must be at least 2"
            )));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::domain(format!(
                "epsilon = {epsilon} must be positive"
            )));
        }
        Ok(GlobalParams {
            k,
            requested_epsilon: epsilon,
            horizon_override: None,
        })
    }

    pub fn with_horizon(mut self, horizon: usize) -> Self {
        self.horizon_override = Some(horizon);
        self
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    pub fn requested_epsilon(&self) -> f64 {
        self.requested_epsilon
    }

    /// `min(ε, 0.01)`.
    pub fn epsilon(&self) -> f64 {
        self.requested_epsilon.min(GLOBAL_EPSILON_CEILING)
    }

    /// Whether `ε > 1/k`, the regime in which the conductance guarantee is
    /// proven.
    pub fn meets_hypothesis(&self) -> bool {
        self.epsilon() > 1.0 / self.k as f64
    }

    /// `⌈ε·k²·ln k / 4⌉` unless overridden.
    pub fn horizon(&self) -> usize {
        self.horizon_override.unwrap_or_else(|| {
            let k = self.k as f64;
            ((self.epsilon() * k * k * k.ln() / 4.0).ceil() as usize).max(1)
        })
    }

    /// `⌊k^{1+ε}⌋`.
    pub fn volume_cap(&self) -> u64 {
        (self.k as f64).powf(1.0 + self.epsilon()).floor() as u64
    }

    /// `4·√(φ_k/ε)`, the conductance promised when `φ_k < ε`.
    pub fn guarantee(&self, phi_k: f64) -> f64 {
        4.0 * (phi_k / self.epsilon()).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalParams {
    pub seed: usize,
    pub k: u64,
    pub phi: f64,
    pub epsilon: f64,
}

impl LocalParams {
    pub fn new(seed: usize, k: u64, phi: f64, epsilon: f64) -> Result<Self> {
        if k < 2 {
            return Err(Error::domain(format!(
                "volume budget k = {k} must be at least 2"
            )));
        }
        if !(phi > 0.0 && phi <= 1.0) {
            return Err(Error::domain(format!(
                "target conductance phi = {phi} outside (0, 1]"
            )));
        }
        if !(epsilon.is_finite() && epsilon > 2.0 / k as f64) {
            return Err(Error::domain(format!(
                "epsilon = {epsilon} must exceed 2/k = {}",
                2.0 / k as f64
            )));
        }
        Ok(LocalParams {
            seed,
            k,
            phi,
            epsilon,
        })
    }

    pub fn with_seed(self, seed: usize) -> Self {
        LocalParams { seed, ..self }
    }

    /// `⌈ε·ln k / (2φ)⌉`.
    pub fn horizon(&self) -> usize {
        let k = self.k as f64;
        ((self.epsilon * k.ln() / (2.0 * self.phi)).ceil() as usize).max(1)
    }

    /// `k^{−1−ε} / (20T)`.
    pub fn truncation(&self) -> f64 {
        (self.k as f64).powf(-1.0 - self.epsilon) / (20.0 * self.horizon() as f64)
    }

    /// `⌊5·k^{1+ε}⌋`.
    pub fn volume_cap(&self) -> u64 {
        (5.0 * (self.k as f64).powf(1.0 + self.epsilon)).floor() as u64
    }

    /// `8·√(φ/ε)`; cuts above this conductance do not count as found.
    pub fn threshold(&self) -> f64 {
        8.0 * (self.phi / self.epsilon).sqrt()
    }

    /// Whether the parameters fall in the regime the recovery guarantee is
    /// proven for (`φ < 0.01`, `ε ≤ 0.01`, `k ≥ 1/ε`).
    pub fn in_proven_regime(&self) -> bool {
        self.phi < 0.01 && self.epsilon <= 0.01 && self.k as f64 >= 1.0 / self.epsilon
    }
}

/// Where a swept cut came from: walk seed, step `t`, prefix length `j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Origin {
    pub seed: Option<usize>,
    pub step: usize,
    pub prefix: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutcome {
    pub best: Cut,
    pub origin: Origin,
    /// `C_t(k)` per step of the winning walk, when requested.
    pub curve_trace: Option<Vec<f64>>,
    pub work: u64,
}

/// Total order used to pick the best cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Rank {
    conductance: Conductance,
    volume: u64,
    step: usize,
    prefix: usize,
    seed: Option<usize>,
}

impl SweepOutcome {
    fn rank(&self) -> Rank {
        Rank {
            conductance: self.best.exact_conductance(),
            volume: self.best.volume(),
            step: self.origin.step,
            prefix: self.origin.prefix,
            seed: self.origin.seed,
        }
    }
}

/// Running minimum over level sets of successive distributions.
struct Sweeper {
    cap: u64,
    trace_at: Option<u64>,
    trace: Vec<f64>,
    best: Option<(Rank, Cut)>,
}

impl Sweeper {
    fn new(cap: u64, trace_at: Option<u64>) -> Self {
        Sweeper {
            cap,
            trace_at,
            trace: Vec::new(),
            best: None,
        }
    }

    fn observe<M: Masses + ?Sized>(&mut self, g: &Graph, seed: Option<usize>, step: usize, p: &M) {
        let ranked = level_order(g, p);
        if let Some(x) = self.trace_at {
            self.trace
                .push(curve_value_at(g, &ranked, p.total_mass(), x));
        }
        let mut tracker = PrefixTracker::new(g, p.is_dense());
        for (j, &(v, _)) in ranked.iter().enumerate() {
            tracker.push(g, v);
            if tracker.volume() > self.cap {
                break;
            }
            let rank = Rank {
                conductance: Conductance::new(tracker.boundary(), tracker.volume()),
                volume: tracker.volume(),
                step,
                prefix: j + 1,
                seed,
            };
            if self.best.as_ref().is_none_or(|(b, _)| rank < *b) {
                let mut members: Vec<usize> = ranked[..=j].iter().map(|&(u, _)| u).collect();
                members.sort_unstable();
                let cut = Cut::from_parts(members, tracker.volume(), tracker.boundary());
                self.best = Some((rank, cut));
            }
        }
    }

    fn finish(self, work: u64) -> Option<SweepOutcome> {
        let trace = self.trace_at.map(|_| self.trace);
        self.best.map(|(rank, best)| SweepOutcome {
            best,
            origin: Origin {
                seed: rank.seed,
                step: rank.step,
                prefix: rank.prefix,
            },
            curve_trace: trace,
            work,
        })
    }
}

/// `C(x)` from a ranked list; past the ranked vertices the curve is flat.
fn curve_value_at(g: &Graph, ranked: &[(usize, f64)], total: f64, x: u64) -> f64 {
    let (mut vol, mut mass) = (0u64, 0.0f64);
    for &(v, m) in ranked {
        let d = g.degree(v);
        if vol + d >= x {
            return mass + m * (x - vol) as f64 / d as f64;
        }
        vol += d;
        mass += m;
    }
    total
}

/// Minimum-conductance level set, over every distribution in `trajectory`,
/// among prefixes of volume at most `vol_cap`. `None` when no prefix fits.
/// Ties go to smaller volume, then earlier step, then shorter prefix.
pub fn sweep(g: &Graph, trajectory: &[Distribution], vol_cap: u64) -> Result<Option<SweepOutcome>> {
    if trajectory.is_empty() {
        return Err(Error::domain("trajectory is empty"));
    }
    if vol_cap == 0 {
        return Err(Error::domain("volume cap must be at least 1"));
    }
    let mut sweeper = Sweeper::new(vol_cap, None);
    let mut work = 0;
    for (t, p) in trajectory.iter().enumerate() {
        sweeper.observe(g, None, t, p);
        work += p.support_volume(g);
    }
    Ok(sweeper.finish(work))
}

/// Sweeps every step of one walk from `seed`.
fn sweep_walk(
    g: &Graph,
    seed: usize,
    horizon: usize,
    truncation: f64,
    vol_cap: u64,
    trace_at: u64,
) -> Result<Option<SweepOutcome>> {
    let mut walker = Walker::new(g, seed, truncation)?;
    let mut sweeper = Sweeper::new(vol_cap, Some(trace_at));
    loop {
        sweeper.observe(g, Some(seed), walker.step(), walker.current());
        if walker.step() == horizon {
            break;
        }
        walker.advance();
    }
    Ok(sweeper.finish(walker.work()))
}

/// Runs an exact walk from every vertex for `T` steps and returns the best
/// level set of volume at most `k^{1+ε}`. Per-seed walks run on the current
/// rayon pool; `work` sums over all of them.
pub fn global_sparsest_cut(g: &Graph, params: &GlobalParams) -> Result<Option<SweepOutcome>> {
    if params.k() > g.total_volume() {
        return Err(Error::domain(format!(
            "k = {} exceeds the total volume {}",
            params.k(),
            g.total_volume()
        )));
    }
    let (horizon, cap) = (params.horizon(), params.volume_cap());
    let outcomes = (0..g.vertex_count())
        .into_par_iter()
        .map(|u| sweep_walk(g, u, horizon, 0.0, cap, params.k()))
        .collect::<Result<Vec<_>>>()?;

    let work = outcomes.iter().flatten().map(|o| o.work).sum();
    let best = outcomes
        .into_iter()
        .flatten()
        .min_by_key(SweepOutcome::rank)
        .map(|o| SweepOutcome { work, ..o });
    Ok(best)
}

/// Parameters for the `(1+ε)k` volume variant: exponent `ε/(2 ln k)`.
pub fn tight_volume_params(k: u64, epsilon: f64) -> Result<GlobalParams> {
    if k < 2 {
        return Err(Error::domain(format!(
            "volume budget k = {k} must be at least 2"
        )));
    }
    let ln_k = (k as f64).ln();
    let floor = 2.0 * ln_k / k as f64;
    if !(epsilon.is_finite() && epsilon > floor) {
        return Err(Error::domain(format!(
            "epsilon = {epsilon} must exceed 2 ln k / k = {floor}"
        )));
    }
    GlobalParams::new(k, epsilon / (2.0 * ln_k))
}

pub fn global_sparsest_cut_tight_volume(
    g: &Graph,
    k: u64,
    epsilon: f64,
) -> Result<Option<SweepOutcome>> {
    global_sparsest_cut(g, &tight_volume_params(k, epsilon)?)
}

#[derive(Debug, Clone, PartialEq)]
pub enum LocalOutcome {
    Found(SweepOutcome),
    /// No level set under the cap met the conductance threshold; `best` is
    /// the best one that fit the cap, if any.
    NotFound {
        best: Option<SweepOutcome>,
        work: u64,
    },
}

impl LocalOutcome {
    pub fn found(&self) -> Option<&SweepOutcome> {
        match self {
            LocalOutcome::Found(o) => Some(o),
            LocalOutcome::NotFound { .. } => None,
        }
    }

    pub fn work(&self) -> u64 {
        match self {
            LocalOutcome::Found(o) => o.work,
            LocalOutcome::NotFound { work, .. } => *work,
        }
    }
}

/// One truncated walk from `params.seed` with horizon `T` and threshold
/// `ε′`, swept with cap `5k^{1+ε}`. Only the support of each step is
/// touched, so the cost is bounded by `T/ε′` regardless of graph size.
pub fn local_partition(g: &Graph, params: &LocalParams) -> Result<LocalOutcome> {
    let outcome = sweep_walk(
        g,
        params.seed,
        params.horizon(),
        params.truncation(),
        params.volume_cap(),
        params.k,
    )?;
    Ok(match outcome {
        Some(o) if o.best.conductance() <= params.threshold() => LocalOutcome::Found(o),
        Some(o) => {
            let work = o.work;
            LocalOutcome::NotFound {
                best: Some(o),
                work,
            }
        }
        // nothing fit the cap; recompute the walk cost for reporting
        None => LocalOutcome::NotFound {
            best: None,
            work: walk_work(g, params)?,
        },
    })
}

fn walk_work(g: &Graph, params: &LocalParams) -> Result<u64> {
    let mut walker = Walker::new(g, params.seed, params.truncation())?;
    for _ in 0..params.horizon() {
        walker.advance();
    }
    Ok(walker.work())
}

/// A start vertex inside `target` that retains the most walk mass after
/// `params.horizon()` steps. Requires `target` connected with
/// `vol ≤ k` and `φ ≤ params.phi`.
pub fn find_local_seed(g: &Graph, target: &[usize], params: &LocalParams) -> Result<usize> {
    let cut = cut_of(g, target)?;
    let components = g.induced_components(cut.members());
    if components > 1 {
        return Err(Error::DisconnectedSubset { components });
    }
    if cut.volume() > params.k {
        return Err(Error::domain(format!(
            "target volume {} exceeds k = {}",
            cut.volume(),
            params.k
        )));
    }
    if cut.conductance() > params.phi {
        return Err(Error::domain(format!(
            "target conductance {} exceeds phi = {}",
            cut.exact_conductance(),
            params.phi
        )));
    }
    best_seed_vertex(g, cut.members(), params.horizon()).map(|(v, _)| v)
}
