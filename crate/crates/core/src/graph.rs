//! Undirected simple graphs, degree queries, and the two seeded random-graph
//! samplers used by every other module.
//!
//! Vertices are dense indices `0..n`. Adjacency sets are ordered, so neighbor
//! iteration, edge iteration and everything derived from them is deterministic.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An unordered vertex pair with the canonical `u < v` orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
}

impl Edge {
    /// Canonicalizes the pair; panics on a self-loop.
    pub fn new(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "self-loops are not representable");
        if a < b {
            Edge { u: a, v: b }
        } else {
            Edge { u: b, v: a }
        }
    }

    pub fn touches(&self, w: usize) -> bool {
        self.u == w || self.v == w
    }

    /// The endpoint that is not `w`; panics if `w` is not an endpoint.
    pub fn other(&self, w: usize) -> usize {
        if self.u == w {
            self.v
        } else {
            assert_eq!(self.v, w, "vertex {w} is not an endpoint");
            self.u
        }
    }
}

/// Deterministic seed: a 64-bit value plus a stream id for per-trial derivation.
///
/// The generator is ChaCha8, a counter-based stream cipher RNG: equal
/// `(value, stream)` pairs always reproduce the same sample sequence, and
/// distinct streams are independent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seed {
    pub value: u64,
    pub stream: u64,
}

impl Seed {
    pub fn new(value: u64, stream: u64) -> Self {
        Seed { value, stream }
    }

    /// The RNG for this seed.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.value);
        rng.set_stream(self.stream);
        rng
    }

    /// A role-tagged sibling seed on the same stream. Different tags give
    /// independent generators, so one trial can feed several consumers
    /// (breaker, maker, reserves, ...) while keeping "trial i = stream i".
    pub fn role(&self, tag: u64) -> Seed {
        Seed {
            value: self.value ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15),
            stream: self.stream,
        }
    }
}

/// An undirected simple graph on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    m: usize,
    adj: Vec<BTreeSet<usize>>,
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("Graph", 2)?;
        s.serialize_field("n", &self.n)?;
        s.serialize_field("edges", &self.edges())?;
        s.end()
    }
}

impl Graph {
    /// The edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            m: 0,
            adj: vec![BTreeSet::new(); n],
        }
    }

    /// The complete graph K_n.
    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in (u + 1)..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    /// Builds a graph from an edge list, ignoring duplicates.
    pub fn from_edges<I: IntoIterator<Item = (usize, usize)>>(n: usize, edges: I) -> Self {
        let mut g = Graph::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    /// Inserts edge `uv`; returns false when it was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert!(u < self.n && v < self.n, "vertex out of range");
        assert_ne!(u, v, "self-loops are not allowed");
        if self.adj[u].insert(v) {
            self.adj[v].insert(u);
            self.m += 1;
            true
        } else {
            false
        }
    }

    /// Removes edge `uv`; returns false when it was absent.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        if u < self.n && v < self.n && self.adj[u].remove(&v) {
            self.adj[v].remove(&u);
            self.m -= 1;
            true
        } else {
            false
        }
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].contains(&v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Neighbors of `v` in ascending order.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[v].iter().copied()
    }

    pub fn neighbor_set(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    /// All edges in ascending lexicographic order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.m);
        for u in 0..self.n {
            for &v in self.adj[u].range((u + 1)..) {
                out.push(Edge { u, v });
            }
        }
        out
    }

    /// Minimum degree over all vertices; 0 for the empty vertex set is not
    /// defined, so `n >= 1` is required.
    pub fn min_degree(&self) -> usize {
        assert!(self.n >= 1, "min_degree needs at least one vertex");
        (0..self.n).map(|v| self.degree(v)).min().unwrap()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    /// Is `other` an edge-subgraph of `self` (same vertex set)?
    pub fn contains_subgraph(&self, other: &Graph) -> bool {
        other.n == self.n
            && other
                .edges()
                .iter()
                .all(|e| self.has_edge(e.u, e.v))
    }

    /// The graph obtained by deleting the edges of `h`.
    pub fn minus(&self, h: &Graph) -> Graph {
        assert_eq!(self.n, h.n, "vertex sets must match");
        let mut g = self.clone();
        for e in h.edges() {
            g.remove_edge(e.u, e.v);
        }
        g
    }

    /// The subgraph induced by `keep`, relabeled to `0..keep.len()` in the
    /// order given. Returns the graph and the map from new to old labels.
    pub fn induced(&self, keep: &[usize]) -> (Graph, Vec<usize>) {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let mut g = Graph::empty(keep.len());
        for (i, &v) in keep.iter().enumerate() {
            for &w in self.adj[v].range((v + 1)..) {
                if index[w] != usize::MAX {
                    g.add_edge(i, index[w]);
                }
            }
        }
        (g, keep.to_vec())
    }

    /// Connectivity via breadth-first search.
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }

    /// Writes the plain-text edge-list format: first line `n m`, then one
    /// line `u v` per edge in ascending lexicographic order.
    pub fn to_edge_list(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.m);
        for e in self.edges() {
            let _ = writeln!(s, "{} {}", e.u, e.v);
        }
        s
    }

    /// Parses the edge-list format. Input must be canonical (edges strictly
    /// ascending, `u < v`), so that write -> parse -> write is bit-exact.
    pub fn from_edge_list(text: &str) -> Result<Graph> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty edge-list input".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .ok_or_else(|| Error::Parse("missing vertex count".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad vertex count: {e}")))?;
        let m: usize = it
            .next()
            .ok_or_else(|| Error::Parse("missing edge count".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad edge count: {e}")))?;
        let mut g = Graph::empty(n);
        let mut prev: Option<(usize, usize)> = None;
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let u: usize = it
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing endpoint", i + 2)))?
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))?;
            let v: usize = it
                .next()
                .ok_or_else(|| Error::Parse(format!("line {}: missing endpoint", i + 2)))?
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))?;
            if u >= v {
                return Err(Error::Parse(format!(
                    "line {}: endpoints must satisfy u < v",
                    i + 2
                )));
            }
            if v >= n {
                return Err(Error::Parse(format!("line {}: vertex {v} >= n", i + 2)));
            }
            if let Some(p) = prev {
                if (u, v) <= p {
                    return Err(Error::Parse(format!(
                        "line {}: edges must be in ascending lexicographic order",
                        i + 2
                    )));
                }
            }
            prev = Some((u, v));
            g.add_edge(u, v);
        }
        if g.m != m {
            return Err(Error::Parse(format!(
                "header announced {m} edges but {} were listed",
                g.m
            )));
        }
        Ok(g)
    }

    /// Checks the structural invariants (symmetry, no loops, consistent
    /// edge count). Cheap enough for tests; not called on hot paths.
    pub fn validate(&self) -> Result<()> {
        let mut m = 0;
        for v in 0..self.n {
            for &w in &self.adj[v] {
                if w == v {
                    return Err(Error::Parse(format!("self-loop at {v}")));
                }
                if w >= self.n {
                    return Err(Error::Parse(format!("neighbor {w} out of range")));
                }
                if !self.adj[w].contains(&v) {
                    return Err(Error::Parse(format!("asymmetric pair ({v},{w})")));
                }
                if v < w {
                    m += 1;
                }
            }
        }
        if m != self.m {
            return Err(Error::Parse(format!(
                "edge count {} does not match adjacency ({m})",
                self.m
            )));
        }
        Ok(())
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::Parameter(format!("probability p = {p} not in [0, 1]")));
    }
    Ok(())
}

/// Samples G(n, p): every pair is an edge independently with probability `p`.
///
/// Pairs are visited in ascending lexicographic order and consume exactly one
/// coin each, so the output is a pure function of `(n, p, seed)`.
pub fn sample_gnp(n: usize, p: f64, seed: Seed) -> Result<Graph> {
    if n < 1 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    check_probability(p)?;
    let mut rng = seed.rng();
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.random_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    Ok(g)
}

/// Samples the random subgraph G(G, p): the vertex set is preserved and each
/// edge of `g` is kept independently with probability `p`.
pub fn sample_subgraph(g: &Graph, p: f64, seed: Seed) -> Result<Graph> {
    check_probability(p)?;
    let mut rng = seed.rng();
    let mut out = Graph::empty(g.vertex_count());
    for e in g.edges() {
        if rng.random_bool(p) {
            out.add_edge(e.u, e.v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gnp_p_zero_is_edgeless() {
        let g = sample_gnp(5, 0.0, Seed::new(7, 0)).unwrap();
        assert_eq!(g.vertex_count(), 5);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn gnp_p_one_is_complete() {
        let g = sample_gnp(5, 1.0, Seed::new(7, 0)).unwrap();
        assert_eq!(g.edge_count(), 10);
        assert_eq!(g, Graph::complete(5));
    }

    #[test]
    fn gnp_rejects_bad_p() {
        assert!(sample_gnp(5, -0.1, Seed::new(0, 0)).is_err());
        assert!(sample_gnp(5, 1.1, Seed::new(0, 0)).is_err());
    }

    #[test]
    fn gnp_is_deterministic() {
        let a = sample_gnp(40, 0.3, Seed::new(123, 4)).unwrap();
        let b = sample_gnp(40, 0.3, Seed::new(123, 4)).unwrap();
        assert_eq!(a, b);
        let c = sample_gnp(40, 0.3, Seed::new(123, 5)).unwrap();
        assert_ne!(a, c, "distinct streams should differ at this size");
    }

    #[test]
    fn gnp_edge_count_matches_binomial_moments() {
        // Monte Carlo over seeds: mean within 3 sigma-of-the-mean, and the
        // per-sample standard deviation within 4 sigma of its own sampling
        // error (loose but catches systematically broken coins).
        let n = 1000usize;
        let p = 0.01;
        let trials = 1000u64;
        let pairs = (n * (n - 1) / 2) as f64;
        let mu = pairs * p;
        let var = pairs * p * (1.0 - p);
        let counts: Vec<f64> = (0..trials)
            .map(|t| sample_gnp(n, p, Seed::new(99, t)).unwrap().edge_count() as f64)
            .collect();
        let mean = counts.iter().sum::<f64>() / trials as f64;
        let se = (var / trials as f64).sqrt();
        assert!(
            (mean - mu).abs() <= 3.0 * se,
            "mean {mean} vs expected {mu} (se {se})"
        );
        let sample_var =
            counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (trials as f64 - 1.0);
        assert!(
            (sample_var - var).abs() <= 4.0 * var * (2.0 / (trials as f64 - 1.0)).sqrt(),
            "variance {sample_var} vs expected {var}"
        );
    }

    #[test]
    fn subgraph_p_one_is_identity_and_p_zero_is_edgeless() {
        let g = sample_gnp(30, 0.4, Seed::new(5, 0)).unwrap();
        assert_eq!(sample_subgraph(&g, 1.0, Seed::new(1, 1)).unwrap(), g);
        let e = sample_subgraph(&g, 0.0, Seed::new(1, 1)).unwrap();
        assert_eq!(e.edge_count(), 0);
        assert_eq!(e.vertex_count(), g.vertex_count());
    }

    #[test]
    fn subgraph_of_k10_mean_edges() {
        let k10 = Graph::complete(10);
        let trials = 10_000u64;
        let total: usize = (0..trials)
            .map(|t| {
                sample_subgraph(&k10, 0.5, Seed::new(3, t))
                    .unwrap()
                    .edge_count()
            })
            .sum();
        let mean = total as f64 / trials as f64;
        let mu = 45.0 * 0.5;
        let se = (45.0 * 0.25 / trials as f64).sqrt();
        assert!((mean - mu).abs() <= 3.0 * se, "mean {mean} vs {mu}");
    }

    #[test]
    fn min_degree_examples() {
        assert_eq!(Graph::complete(4).min_degree(), 3);
        assert_eq!(Graph::empty(3).min_degree(), 0);
        let path5 = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert_eq!(path5.min_degree(), 1);
    }

    #[test]
    fn edge_list_round_trip_is_bit_exact() {
        let g = sample_gnp(25, 0.3, Seed::new(11, 2)).unwrap();
        let text = g.to_edge_list();
        let h = Graph::from_edge_list(&text).unwrap();
        assert_eq!(g, h);
        assert_eq!(h.to_edge_list(), text);
    }

    #[test]
    fn edge_list_rejects_malformed_input() {
        assert!(Graph::from_edge_list("").is_err());
        assert!(Graph::from_edge_list("2 1\n1 0\n").is_err()); // u >= v
        assert!(Graph::from_edge_list("3 2\n0 2\n0 1\n").is_err()); // out of order
        assert!(Graph::from_edge_list("2 2\n0 1\n").is_err()); // count mismatch
    }

    #[test]
    fn role_seeds_are_independent_streams() {
        let s = Seed::new(42, 7);
        let a = sample_gnp(20, 0.5, s.role(1)).unwrap();
        let b = sample_gnp(20, 0.5, s.role(2)).unwrap();
        assert_ne!(a, b);
        assert_eq!(a, sample_gnp(20, 0.5, s.role(1)).unwrap());
    }

    proptest! {
        #[test]
        fn sampled_subgraph_is_contained(seed in 0u64..500, p in 0.0f64..1.0) {
            let g = sample_gnp(18, 0.5, Seed::new(seed, 0)).unwrap();
            let h = sample_subgraph(&g, p, Seed::new(seed, 1)).unwrap();
            prop_assert!(g.contains_subgraph(&h));
            h.validate().unwrap();
        }

        #[test]
        fn gnp_respects_invariants(seed in 0u64..500, p in 0.0f64..1.0) {
            let g = sample_gnp(16, p, Seed::new(seed, 3)).unwrap();
            g.validate().unwrap();
            let degree_sum: usize = (0..16).map(|v| g.degree(v)).sum();
            prop_assert_eq!(degree_sum, 2 * g.edge_count());
        }
    }
}
