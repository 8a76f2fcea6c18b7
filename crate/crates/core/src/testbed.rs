//! Synthetic graphs with planted sparse cuts, and exhaustive oracles for
//! `φ_k`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{cut_of, Conductance, Cut, Graph};

/// Largest vertex count [`exact_phi_k`] will enumerate.
pub const EXACT_LIMIT: usize = 22;

#[derive(Debug, Clone)]
pub struct PlantedInstance {
    pub graph: Graph,
    pub planted: Cut,
    pub phi_planted: Conductance,
}

impl PlantedInstance {
    fn new(graph: Graph, members: &[usize]) -> Self {
        let planted = cut_of(&graph, members).expect("planted set is valid");
        let phi_planted = planted.exact_conductance();
        PlantedInstance {
            graph,
            planted,
            phi_planted,
        }
    }
}

fn clique_edges(base: usize, size: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..size).flat_map(move |i| (i + 1..size).map(move |j| (base + i, base + j)))
}

/// `r ≥ 3` cliques of size `s ≥ 3` in a cycle, one bridge between
/// consecutive cliques. The planted set is clique 0 with conductance
/// `2/(s(s−1)+2)`.
pub fn ring_of_cliques(r: usize, s: usize) -> Result<PlantedInstance> {
    if r < 3 || s < 3 {
        return Err(Error::domain(format!(
            "ring of cliques needs r >= 3 and s >= 3, got r = {r}, s = {s}"
        )));
    }
    let n = r * s;
    let mut edges: Vec<_> = (0..r).flat_map(|c| clique_edges(c * s, s)).collect();
    edges.extend((0..r).map(|c| (c * s + s - 1, ((c + 1) * s) % n)));
    let graph = Graph::from_edges(n, edges)?;
    let members: Vec<usize> = (0..s).collect();
    Ok(PlantedInstance::new(graph, &members))
}

/// The exact `φ_k` of a ring of cliques when it follows from structure
/// alone: `k` between one clique volume `k₀` and `2k₀` (exclusive), with
/// `s ≥ 5` unless `k = k₀`. Any set that splits a clique pays at least
/// `s − 1` internal boundary edges; whole-clique sets under the cap are a
/// single clique.
pub fn ring_of_cliques_phi_k(r: usize, s: usize, k: u64) -> Option<(Conductance, Vec<usize>)> {
    if r < 3 || s < 3 {
        return None;
    }
    let k0 = (s * (s - 1) + 2) as u64;
    let applies = k == k0 || (s >= 5 && k > k0 && k < 2 * k0);
    applies.then(|| (Conductance::new(2, k0), (0..s).collect()))
}

/// The exact `φ_k` of `barbell(s)` for `k₀ ≤ k < 2k₀` with `k₀` one clique's
/// volume (`s ≥ 4` unless `k = k₀`). Splitting a clique costs `s − 1`
/// boundary edges and both whole cliques together exceed the cap.
pub fn barbell_phi_k(s: usize, k: u64) -> Option<(Conductance, Vec<usize>)> {
    if s < 3 {
        return None;
    }
    let k0 = (s * (s - 1) + 1) as u64;
    let applies = k == k0 || (s >= 4 && k > k0 && k < 2 * k0);
    applies.then(|| (Conductance::new(1, k0), (0..s).collect()))
}

/// Two `K_s` joined by one bridge; the planted set is the first clique.
pub fn barbell(s: usize) -> Result<PlantedInstance> {
    if s < 2 {
        return Err(Error::domain(format!("barbell needs s >= 2, got {s}")));
    }
    let mut edges: Vec<_> = clique_edges(0, s).chain(clique_edges(s, s)).collect();
    edges.push((s - 1, s));
    let graph = Graph::from_edges(2 * s, edges)?;
    let members: Vec<usize> = (0..s).collect();
    Ok(PlantedInstance::new(graph, &members))
}

pub fn path(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::domain(format!("path needs n >= 2, got {n}")));
    }
    Graph::from_edges(n, (0..n - 1).map(|i| (i, i + 1)))
}

pub fn complete(n: usize) -> Result<Graph> {
    if n < 2 {
        return Err(Error::domain(format!(
            "complete graph needs n >= 2, got {n}"
        )));
    }
    Graph::from_edges(n, clique_edges(0, n))
}

/// `G(n, p)` from a seeded ChaCha stream. Vertices left without neighbors are
/// dropped and the rest renumbered in increasing order, so the result may
/// have fewer than `n` vertices; disconnection is kept and reported by
/// [`Graph::is_connected`].
pub fn erdos_renyi(n: usize, p: f64, rng_seed: u64) -> Result<Graph> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(format!(
            "edge probability {p} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    compact(n, edges)
}

/// Union of `cycles` random Hamiltonian cycles on `n` vertices. Near
/// `2·cycles`-regular, connected, and an expander with high probability.
pub fn expander(n: usize, cycles: usize, rng_seed: u64) -> Result<Graph> {
    if n < 3 || cycles == 0 {
        return Err(Error::domain(format!(
            "expander needs n >= 3 and at least one cycle, got n = {n}, cycles = {cycles}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut edges = Vec::with_capacity(n * cycles);
    let mut perm: Vec<usize> = (0..n).collect();
    for _ in 0..cycles {
        perm.shuffle(&mut rng);
        edges.extend((0..n).map(|i| (perm[i], perm[(i + 1) % n])));
    }
    Graph::from_edges(n, edges)
}

/// The same graph under a seeded random permutation of vertex ids. Returns
/// the new graph and `map[old] = new`.
pub fn relabel(g: &Graph, rng_seed: u64) -> Result<(Graph, Vec<usize>)> {
    let mut map: Vec<usize> = (0..g.vertex_count()).collect();
    map.shuffle(&mut ChaCha8Rng::seed_from_u64(rng_seed));
    let graph = Graph::from_edges(g.vertex_count(), g.edges().map(|(u, v)| (map[u], map[v])))?;
    Ok((graph, map))
}

/// Uniformly sized random connected graph: `G(n, p)` resampled until
/// connected with no isolated vertex.
pub fn random_connected<R: Rng>(n: usize, p: f64, rng: &mut R) -> Result<Graph> {
    if n < 2 || !(p > 0.0 && p <= 1.0) {
        return Err(Error::domain(format!(
            "need n >= 2 and p in (0, 1], got n = {n}, p = {p}"
        )));
    }
    loop {
        let edges: Vec<_> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|_| rng.gen::<f64>() < p)
            .collect();
        if let Ok(g) = Graph::from_edges(n, edges) {
            if g.is_connected() {
                return Ok(g);
            }
        }
    }
}

/// A connected vertex set of the requested size grown from a random vertex
/// by repeatedly adding a random boundary neighbor. Smaller if the
/// component runs out.
pub fn random_connected_subset<R: Rng>(g: &Graph, size: usize, rng: &mut R) -> Vec<usize> {
    let start = rng.gen_range(0..g.vertex_count());
    let mut members = vec![start];
    let mut frontier: Vec<usize> = g.neighbors(start).to_vec();
    while members.len() < size && !frontier.is_empty() {
        let i = rng.gen_range(0..frontier.len());
        let v = frontier.swap_remove(i);
        if members.contains(&v) {
            continue;
        }
        members.push(v);
        frontier.extend(g.neighbors(v).iter().filter(|w| !members.contains(w)));
    }
    members.sort_unstable();
    members
}

fn compact(n: usize, edges: Vec<(usize, usize)>) -> Result<Graph> {
    let mut used = vec![false; n];
    for &(u, v) in &edges {
        used[u] = true;
        used[v] = true;
    }
    let mut id = vec![usize::MAX; n];
    let mut next = 0;
    for v in 0..n {
        if used[v] {
            id[v] = next;
            next += 1;
        }
    }
    Graph::from_edges(next, edges.into_iter().map(|(u, v)| (id[u], id[v])))
}

/// Exhaustive `φ_k(G) = min { φ(S) : S ≠ ∅, vol(S) ≤ k }` with exact
/// arithmetic. The witness is the lexicographically smallest sorted member
/// list among minimizers. Refuses graphs above [`EXACT_LIMIT`] vertices.
pub fn exact_phi_k(g: &Graph, k: u64) -> Result<(Conductance, Cut)> {
    let n = g.vertex_count();
    if n > EXACT_LIMIT {
        return Err(Error::Infeasible {
            n,
            limit: EXACT_LIMIT,
        });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (g.degree(v), v));
    let adjacency: Vec<u32> = (0..n)
        .map(|v| g.neighbors(v).iter().fold(0u32, |acc, &w| acc | (1 << w)))
        .collect();

    let mut search = Enumeration {
        g,
        k,
        order,
        adjacency,
        best: None,
    };
    search.descend(0, 0, 0, 0);
    let (phi, mask) = search
        .best
        .ok_or_else(|| Error::domain(format!("no nonempty vertex set has volume <= {k}")))?;
    let members = mask_members(mask);
    let cut = cut_of(g, &members)?;
    debug_assert_eq!(cut.exact_conductance(), phi);
    Ok((phi, cut))
}

/// Identifies a graph that is exactly `ring_of_cliques(r, s)` under the
/// generator's numbering.
pub fn recognize_ring_of_cliques(g: &Graph) -> Option<(usize, usize)> {
    let n = g.vertex_count();
    (3..=n / 3)
        .filter(|s| n.is_multiple_of(*s))
        .map(|s| (n / s, s))
        .find(|&(r, s)| ring_of_cliques(r, s).is_ok_and(|inst| inst.graph == *g))
}

/// Identifies a graph that is exactly `barbell(s)`.
pub fn recognize_barbell(g: &Graph) -> Option<usize> {
    let n = g.vertex_count();
    let s = n / 2;
    (n.is_multiple_of(2) && s >= 3 && barbell(s).is_ok_and(|inst| inst.graph == *g)).then_some(s)
}

/// `φ_k` by enumeration when the graph is small enough, otherwise from a
/// recognized structured instance; refuses everything else.
pub fn phi_k_oracle(g: &Graph, k: u64) -> Result<(Conductance, Cut)> {
    let n = g.vertex_count();
    if n <= EXACT_LIMIT {
        return exact_phi_k(g, k);
    }
    let promise = recognize_ring_of_cliques(g)
        .and_then(|(r, s)| ring_of_cliques_phi_k(r, s, k))
        .or_else(|| recognize_barbell(g).and_then(|s| barbell_phi_k(s, k)));
    match promise {
        Some((phi, members)) => Ok((phi, cut_of(g, &members)?)),
        None => Err(Error::Infeasible {
            n,
            limit: EXACT_LIMIT,
        }),
    }
}

fn mask_members(mask: u32) -> Vec<usize> {
    (0..32).filter(|&v| mask & (1 << v) != 0).collect()
}

struct Enumeration<'g> {
    g: &'g Graph,
    k: u64,
    /// Vertices by ascending degree, so a branch stops at the first vertex
    /// that no longer fits.
    order: Vec<usize>,
    adjacency: Vec<u32>,
    best: Option<(Conductance, u32)>,
}

impl Enumeration<'_> {
    fn descend(&mut self, from: usize, mask: u32, volume: u64, boundary: u64) {
        for i in from..self.order.len() {
            let v = self.order[i];
            let d = self.g.degree(v);
            if volume + d > self.k {
                break;
            }
            let internal = (self.adjacency[v] & mask).count_ones() as u64;
            let (next_mask, next_volume) = (mask | (1 << v), volume + d);
            let next_boundary = boundary + d - 2 * internal;
            self.consider(next_mask, Conductance::new(next_boundary, next_volume));
            self.descend(i + 1, next_mask, next_volume, next_boundary);
        }
    }

    fn consider(&mut self, mask: u32, phi: Conductance) {
        let better = match &self.best {
            None => true,
            Some((best_phi, best_mask)) => match phi.cmp(best_phi) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => mask_members(mask) < mask_members(*best_mask),
                std::cmp::Ordering::Greater => false,
            },
        };
        if better {
            self.best = Some((phi, mask));
        }
    }
}
