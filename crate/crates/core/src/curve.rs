//! The Lovász–Simonovits curve of a distribution: vertices ranked by
//! `p(v)/d(v)`, and the concave piecewise-linear curve through the
//! cumulative `(volume, mass)` points of that ranking.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::graph::{Cut, Graph, PrefixTracker};
use crate::walk::Masses;

/// Ranks the entries of `p` by `p(v)/d(v)` descending, ties by ascending id.
pub fn level_order<M: Masses + ?Sized>(g: &Graph, p: &M) -> Vec<(usize, f64)> {
    let mut ranked: Vec<(usize, f64, f64)> = p
        .entries()
        .into_iter()
        .map(|(v, m)| (v, m, m / g.degree(v) as f64))
        .collect();
    ranked.sort_unstable_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .unwrap_or(Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    ranked.into_iter().map(|(v, m, _)| (v, m)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsCurve {
    /// `(x_j, y_j)` with `x_0 = 0` and a final point at `x = 2m`.
    points: Vec<(u64, f64)>,
    /// Vertices behind points `1..=order.len()`.
    order: Vec<usize>,
}

/// Builds the curve. Sparse inputs only produce extreme points over their
/// support; the curve then runs flat to `(2m, total mass)`.
pub fn build_curve<M: Masses + ?Sized>(g: &Graph, p: &M) -> LsCurve {
    let ranked = level_order(g, p);
    let mut points = Vec::with_capacity(ranked.len() + 2);
    points.push((0, 0.0));
    let (mut x, mut y) = (0u64, 0.0f64);
    for &(v, m) in &ranked {
        x += g.degree(v);
        y += m;
        points.push((x, y));
    }
    if x < g.total_volume() {
        points.push((g.total_volume(), y));
    }
    LsCurve {
        points,
        order: ranked.into_iter().map(|(v, _)| v).collect(),
    }
}

impl LsCurve {
    pub fn points(&self) -> &[(u64, f64)] {
        &self.points
    }

    /// The ranked vertices; level set `j` is `vertex_order()[..j]`.
    pub fn vertex_order(&self) -> &[usize] {
        &self.order
    }

    pub fn total_volume(&self) -> u64 {
        self.points.last().map_or(0, |p| p.0)
    }

    pub fn total_mass(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.1)
    }

    /// Linear interpolation between extreme points.
    pub fn eval(&self, x: f64) -> Result<f64> {
        let end = self.total_volume() as f64;
        if !(0.0..=end).contains(&x) {
            return Err(Error::domain(format!(
                "curve argument {x} outside [0, {end}]"
            )));
        }
        // first point with x_j >= x
        let j = self.points.partition_point(|&(xj, _)| (xj as f64) < x);
        if j == 0 {
            return Ok(self.points[0].1);
        }
        let (x1, y1) = self.points[j];
        if x1 as f64 == x {
            return Ok(y1);
        }
        let (x0, y0) = self.points[j - 1];
        let r = (x - x0 as f64) / (x1 - x0) as f64;
        Ok(y0 + r * (y1 - y0))
    }

    /// Slopes of consecutive segments; non-increasing up to roundoff.
    pub fn slopes(&self) -> Vec<f64> {
        self.points
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0) as f64)
            .collect()
    }

    /// Ranked prefixes whose volume stays within `vol_cap`.
    pub fn level_sets(&self, g: &Graph, vol_cap: u64) -> Vec<Cut> {
        let mut tracker = PrefixTracker::new(g, self.order.len() == g.vertex_count());
        let mut cuts = Vec::new();
        for (j, &v) in self.order.iter().enumerate() {
            tracker.push(g, v);
            if tracker.volume() > vol_cap {
                break;
            }
            let mut members = self.order[..=j].to_vec();
            members.sort_unstable();
            cuts.push(Cut::from_parts(
                members,
                tracker.volume(),
                tracker.boundary(),
            ));
        }
        cuts
    }
}

/// `f_t(x) = x/l + √x·(1 − φ₁²/8)^t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub cap: f64,
    pub phi1: f64,
    pub t: usize,
}

impl Envelope {
    pub fn new(cap: f64, phi1: f64, t: usize) -> Result<Self> {
        if !(cap >= 1.0 && cap.is_finite()) {
            return Err(Error::domain(format!("envelope cap {cap} must be >= 1")));
        }
        if !(0.0..=1.0).contains(&phi1) {
            return Err(Error::domain(format!(
                "envelope conductance {phi1} outside [0, 1]"
            )));
        }
        Ok(Envelope { cap, phi1, t })
    }

    pub fn value(&self, x: f64) -> f64 {
        let decay = (1.0 - self.phi1 * self.phi1 / 8.0).powi(self.t as i32);
        x / self.cap + x.sqrt() * decay
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChordViolation {
    /// Prefix length of the offending level set.
    pub prefix: usize,
    pub x: u64,
    pub conductance: f64,
    pub value: f64,
    pub chord: f64,
}

/// Checks `C_next(x) ≤ ½(C_prev(x − φx) + C_prev(x + φx)) + tol` at every
/// extreme point `x ≤ m` of `next` whose level set fits `vol_cap`, with `φ`
/// the conductance of that level set.
pub fn check_chord_bound(
    g: &Graph,
    prev: &LsCurve,
    next: &LsCurve,
    vol_cap: u64,
    tol: f64,
) -> Vec<ChordViolation> {
    let half = g.total_volume() / 2;
    let limit = half.min(vol_cap);
    let mut tracker = PrefixTracker::new(g, next.order.len() == g.vertex_count());
    let mut violations = Vec::new();
    for (j, &v) in next.order.iter().enumerate() {
        tracker.push(g, v);
        let (x, value) = next.points[j + 1];
        if x > limit {
            break;
        }
        let phi = tracker.boundary() as f64 / x as f64;
        let spread = phi * x as f64;
        let lo = (x as f64 - spread).max(0.0);
        let hi = (x as f64 + spread).min(prev.total_volume() as f64);
        let chord = 0.5
            * (prev.eval(lo).expect("lo within range") + prev.eval(hi).expect("hi within range"));
        if value > chord + tol {
            violations.push(ChordViolation {
                prefix: j + 1,
                x,
                conductance: phi,
                value,
                chord,
            });
        }
    }
    violations
}
