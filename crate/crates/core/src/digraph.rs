//! Directed graphs and the injective bipartite transform that reduces
//! directed games to undirected ones: vertex v splits into an out-copy a_v
//! and an in-copy b_v, and arc (u, v) becomes the edge a_u b_v.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Seed};

/// A loopless directed graph; antiparallel arc pairs are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Digraph {
    n: usize,
    arcs: BTreeSet<(usize, usize)>,
}

impl Digraph {
    pub fn empty(n: usize) -> Self {
        Digraph {
            n,
            arcs: BTreeSet::new(),
        }
    }

    /// The complete digraph: all n(n-1) ordered pairs.
    pub fn complete(n: usize) -> Self {
        let mut d = Digraph::empty(n);
        for u in 0..n {
            for v in 0..n {
                if u != v {
                    d.add_arc(u, v);
                }
            }
        }
        d
    }

    pub fn from_arcs<I: IntoIterator<Item = (usize, usize)>>(n: usize, arcs: I) -> Self {
        let mut d = Digraph::empty(n);
        for (u, v) in arcs {
            d.add_arc(u, v);
        }
        d
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn add_arc(&mut self, u: usize, v: usize) -> bool {
        assert!(u < self.n && v < self.n, "vertex out of range");
        assert_ne!(u, v, "loops are not allowed");
        self.arcs.insert((u, v))
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.arcs.contains(&(u, v))
    }

    /// Arcs in ascending lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.arcs.iter().copied()
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.arcs.range((v, 0)..(v + 1, 0)).count()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.arcs.iter().filter(|&&(_, w)| w == v).count()
    }

    /// min over vertices of both in- and out-degree.
    pub fn delta_zero(&self) -> usize {
        assert!(self.n >= 1);
        let mut outd = vec![0usize; self.n];
        let mut ind = vec![0usize; self.n];
        for &(u, v) in &self.arcs {
            outd[u] += 1;
            ind[v] += 1;
        }
        (0..self.n).map(|v| outd[v].min(ind[v])).min().unwrap()
    }

    /// The arc-list text format: header `n m`, then `u v` per arc meaning
    /// u -> v, ascending lexicographic order.
    pub fn to_arc_list(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {}", self.n, self.arcs.len());
        for (u, v) in self.arcs() {
            let _ = writeln!(s, "{u} {v}");
        }
        s
    }

    pub fn from_arc_list(text: &str) -> Result<Digraph> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty arc-list input".into()))?;
        let mut it = header.split_whitespace();
        let n: usize = it
            .next()
            .ok_or_else(|| Error::Parse("missing vertex count".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad vertex count: {e}")))?;
        let m: usize = it
            .next()
            .ok_or_else(|| Error::Parse("missing arc count".into()))?
            .parse()
            .map_err(|e| Error::Parse(format!("bad arc count: {e}")))?;
        let mut d = Digraph::empty(n);
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split_whitespace();
            let u: usize = it
                .next()
                .ok_or_else(|| Error::Parse("missing arc tail".into()))?
                .parse()
                .map_err(|e| Error::Parse(format!("{e}")))?;
            let v: usize = it
                .next()
                .ok_or_else(|| Error::Parse("missing arc head".into()))?
                .parse()
                .map_err(|e| Error::Parse(format!("{e}")))?;
            if u >= n || v >= n {
                return Err(Error::Parse(format!("arc ({u}, {v}) out of range")));
            }
            d.add_arc(u, v);
        }
        if d.arc_count() != m {
            return Err(Error::Parse(format!(
                "header announced {m} arcs but {} were listed",
                d.arc_count()
            )));
        }
        Ok(d)
    }
}

/// The bipartite transform: 2n vertices, parts A = 0..n (out-copies) and
/// B = n..2n (in-copies); arc (u, v) maps to edge (u, n + v).
pub fn to_bipartite(d: &Digraph) -> Graph {
    let n = d.vertex_count();
    let mut g = Graph::empty(2 * n);
    for (u, v) in d.arcs() {
        g.add_edge(u, n + v);
    }
    g
}

/// Inverts [`to_bipartite`]; errors when the graph is not in the image
/// (wrong parity or an edge inside a part).
pub fn from_bipartite(g: &Graph) -> Result<Digraph> {
    let two_n = g.vertex_count();
    if two_n % 2 != 0 {
        return Err(Error::Parameter("vertex count must be even".into()));
    }
    let n = two_n / 2;
    let mut d = Digraph::empty(n);
    for e in g.edges() {
        if e.u >= n || e.v < n {
            return Err(Error::Parameter(format!(
                "edge ({}, {}) does not join the two parts",
                e.u, e.v
            )));
        }
        let head = e.v - n;
        if e.u == head {
            return Err(Error::Parameter(format!(
                "edge ({}, {}) would be a loop",
                e.u, e.v
            )));
        }
        d.add_arc(e.u, head);
    }
    Ok(d)
}

/// Samples the random sub-digraph: every arc kept independently with
/// probability `p`, deterministic per seed (arcs visited in order).
pub fn sample_dnp(host: &Digraph, p: f64, seed: Seed) -> Result<Digraph> {
    if !(0.0..=1.0).contains(&p) || p.is_nan() {
        return Err(Error::Parameter(format!("probability p = {p} not in [0, 1]")));
    }
    let mut rng = seed.rng();
    let mut d = Digraph::empty(host.vertex_count());
    for (u, v) in host.arcs() {
        if rng.random_bool(p) {
            d.add_arc(u, v);
        }
    }
    Ok(d)
}

/// Uniform random digraph: every ordered pair is an arc with probability p.
pub fn sample_random_digraph(n: usize, p: f64, seed: Seed) -> Result<Digraph> {
    sample_dnp(&Digraph::complete(n), p, seed)
}
