//! Immutable undirected graphs in compressed adjacency form, and the cut
//! metrics (volume, boundary, conductance) the walk and sweep code consume.

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};

/// Undirected simple graph. Vertex ids are dense `0..n`, every vertex has at
/// least one neighbor, and neighbor lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
    connected: bool,
}

impl Graph {
    /// Builds a graph on `n` vertices. Duplicate edges are collapsed.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::build(n, edges).map(|(g, _)| g)
    }

    /// Like [`Graph::from_edges`] but also reports how many duplicate edges
    /// were collapsed.
    pub(crate) fn build<I>(n: usize, edges: I) -> Result<(Self, usize)>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut lists = vec![Vec::new(); n];
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::domain(format!(
                    "edge ({u}, {v}) references a vertex outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::domain(format!("self-loop on vertex {u}")));
            }
            lists[u].push(v);
            lists[v].push(u);
        }
        if n == 0 || lists.iter().all(Vec::is_empty) {
            return Err(Error::EmptyGraph);
        }

        let mut removed = 0;
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for (v, mut list) in lists.into_iter().enumerate() {
            if list.is_empty() {
                return Err(Error::IsolatedVertex(v));
            }
            list.sort_unstable();
            let before = list.len();
            list.dedup();
            removed += before - list.len();
            targets.extend_from_slice(&list);
            offsets.push(targets.len());
        }

        let mut g = Graph {
            offsets,
            targets,
            connected: false,
        };
        g.connected = g.component_count() == 1;
        // each duplicate shows up once in both endpoint lists
        Ok((g, removed / 2))
    }

    pub fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// `2m`, the sum of all degrees.
    pub fn total_volume(&self) -> u64 {
        self.targets.len() as u64
    }

    #[inline]
    pub fn degree(&self, v: usize) -> u64 {
        (self.offsets[v + 1] - self.offsets[v]) as u64
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degrees(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.vertex_count()).map(|v| self.degree(v))
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`, ordered by `v`
    /// then `u`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertex_count()).flat_map(move |v| {
            self.neighbors(v)
                .iter()
                .take_while(move |&&u| u < v)
                .map(move |&u| (u, v))
        })
    }

    pub fn volume_of(&self, members: &[usize]) -> u64 {
        members.iter().map(|&v| self.degree(v)).sum()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    fn component_count(&self) -> usize {
        let n = self.vertex_count();
        let mut seen = vec![false; n];
        let mut components = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                for &w in self.neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        components
    }

    /// Number of connected components of the subgraph induced by `members`
    /// (which must be sorted and deduplicated).
    pub(crate) fn induced_components(&self, members: &[usize]) -> usize {
        let index: HashMap<usize, usize> =
            members.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut seen = vec![false; members.len()];
        let mut components = 0;
        let mut stack = Vec::new();
        for start in 0..members.len() {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(i) = stack.pop() {
                for w in self.neighbors(members[i]) {
                    if let Some(&j) = index.get(w) {
                        if !seen[j] {
                            seen[j] = true;
                            stack.push(j);
                        }
                    }
                }
            }
        }
        components
    }
}

/// Exact conductance `boundary / volume`, compared by cross-multiplication.
#[derive(Debug, Clone, Copy)]
pub struct Conductance {
    pub boundary: u64,
    pub volume: u64,
}

impl Conductance {
    pub fn new(boundary: u64, volume: u64) -> Self {
        debug_assert!(volume > 0);
        Conductance { boundary, volume }
    }

    pub fn value(&self) -> f64 {
        self.boundary as f64 / self.volume as f64
    }
}

impl PartialEq for Conductance {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Conductance {}

impl PartialOrd for Conductance {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Conductance {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.boundary as u128 * other.volume as u128;
        let rhs = other.boundary as u128 * self.volume as u128;
        lhs.cmp(&rhs)
    }
}

impl fmt::Display for Conductance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.boundary, self.volume)
    }
}

/// A nonempty vertex set with its volume and boundary size.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cut {
    members: Vec<usize>,
    volume: u64,
    boundary: u64,
}

impl Cut {
    /// `members` must already be sorted and deduplicated.
    pub(crate) fn from_parts(members: Vec<usize>, volume: u64, boundary: u64) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Cut {
            members,
            volume,
            boundary,
        }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn volume(&self) -> u64 {
        self.volume
    }

    pub fn boundary(&self) -> u64 {
        self.boundary
    }

    pub fn exact_conductance(&self) -> Conductance {
        Conductance::new(self.boundary, self.volume)
    }

    /// `|δ(S)| / vol(S)`; not symmetrized with the complement.
    pub fn conductance(&self) -> f64 {
        self.exact_conductance().value()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.members.binary_search(&v).is_ok()
    }
}

/// Materializes the cut of an arbitrary vertex set.
pub fn cut_of(g: &Graph, members: &[usize]) -> Result<Cut> {
    let members = normalize_set(g, members)?;
    let volume = g.volume_of(&members);
    let boundary = members
        .iter()
        .flat_map(|&v| g.neighbors(v))
        .filter(|w| members.binary_search(w).is_err())
        .count() as u64;
    Ok(Cut::from_parts(members, volume, boundary))
}

/// Sorts, deduplicates and range-checks a caller-provided vertex set.
pub(crate) fn normalize_set(g: &Graph, members: &[usize]) -> Result<Vec<usize>> {
    if members.is_empty() {
        return Err(Error::domain("vertex set is empty"));
    }
    let n = g.vertex_count();
    if let Some(&bad) = members.iter().find(|&&v| v >= n) {
        return Err(Error::domain(format!(
            "vertex {bad} is out of range for a graph with {n} vertices"
        )));
    }
    let mut members = members.to_vec();
    members.sort_unstable();
    members.dedup();
    Ok(members)
}

/// Tracks volume and boundary of a growing prefix `v_1, v_2, ...` in
/// `O(d(v))` per insertion.
pub(crate) struct PrefixTracker {
    inside: Membership,
    volume: u64,
    boundary: u64,
}

enum Membership {
    Dense(Vec<bool>),
    Sparse(HashSet<usize>),
}

impl PrefixTracker {
    /// `dense` trades an `O(n)` bitmap for hash lookups; use it when the
    /// prefix may cover the whole graph anyway.
    pub(crate) fn new(g: &Graph, dense: bool) -> Self {
        let inside = if dense {
            Membership::Dense(vec![false; g.vertex_count()])
        } else {
            Membership::Sparse(HashSet::new())
        };
        PrefixTracker {
            inside,
            volume: 0,
            boundary: 0,
        }
    }

    pub(crate) fn push(&mut self, g: &Graph, v: usize) {
        let internal = match &self.inside {
            Membership::Dense(bits) => g.neighbors(v).iter().filter(|&&w| bits[w]).count(),
            Membership::Sparse(set) => g.neighbors(v).iter().filter(|w| set.contains(w)).count(),
        } as u64;
        match &mut self.inside {
            Membership::Dense(bits) => bits[v] = true,
            Membership::Sparse(set) => {
                set.insert(v);
            }
        }
        let d = g.degree(v);
        self.volume += d;
        self.boundary = self.boundary + d - 2 * internal;
    }

    pub(crate) fn volume(&self) -> u64 {
        self.volume
    }

    pub(crate) fn boundary(&self) -> u64 {
        self.boundary
    }
}

/// A graph read from an edge-list file, with the original vertex labels.
#[derive(Debug, Clone)]
pub struct EdgeList {
    pub graph: Graph,
    /// Original label of each compacted vertex id.
    pub labels: Vec<u64>,
    pub duplicate_edges: usize,
    index: HashMap<u64, usize>,
}

impl EdgeList {
    pub fn label(&self, v: usize) -> u64 {
        self.labels[v]
    }

    pub fn vertex(&self, label: u64) -> Option<usize> {
        self.index.get(&label).copied()
    }
}

/// Reads whitespace-separated `u v` pairs, one per line. Lines starting with
/// `#` and blank lines are skipped. Labels are compacted to `0..n` in
/// first-seen order.
pub fn load_edge_list<R: BufRead>(reader: R) -> Result<EdgeList> {
    let mut index: HashMap<u64, usize> = HashMap::new();
    let mut labels = Vec::new();
    let mut edges = Vec::new();

    let mut intern = |label: u64| -> usize {
        *index.entry(label).or_insert_with(|| {
            labels.push(label);
            labels.len() - 1
        })
    };

    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let mut fields = text.split_whitespace();
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected two vertex ids, got {text:?}"),
            });
        };
        let parse = |s: &str| {
            s.parse::<u64>().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("invalid vertex id {s:?}"),
            })
        };
        let (a, b) = (parse(a)?, parse(b)?);
        if a == b {
            return Err(Error::SelfLoop {
                line: lineno,
                vertex: a,
            });
        }
        edges.push((intern(a), intern(b)));
    }

    let (graph, duplicate_edges) = Graph::build(labels.len(), edges)?;
    Ok(EdgeList {
        graph,
        labels,
        duplicate_edges,
        index,
    })
}

/// Writes `u v` lines grouped by the larger endpoint. Graphs whose vertices
/// each have a lower-numbered neighbor (every generator in
/// [`crate::testbed`]) reload with identical ids.
pub fn write_edge_list<W: Write>(g: &Graph, mut out: W) -> std::io::Result<()> {
    for (u, v) in g.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}
