//! Monotone property checkers: win conditions for games and targets for
//! resilience experiments. Every Yes carries a witness that an independent
//! validator accepts; heuristic modes answer Unknown instead of guessing.

pub mod trees;

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::posa;

pub use trees::{embed_tree, random_tree_with_bare_path, EmbedOutcome, TreeSpec};

/// Exact Hamiltonicity / pancyclicity are exponential subset DPs.
pub const EXACT_CYCLE_GATE: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CheckMode {
    Exact,
    Heuristic,
}

/// Witness payloads, serializable for reports.
#[derive(Clone, Debug, Serialize)]
pub enum Witness {
    SpanningTree(Vec<(usize, usize)>),
    Matching(Vec<(usize, usize)>),
    MinDegree(usize),
    Cycle(Vec<usize>),
    CyclesByLength(BTreeMap<usize, Vec<usize>>),
    Embeddings(Vec<Vec<usize>>),
}

impl Witness {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("witness serializes")
    }
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Yes(Witness),
    No,
    Unknown,
}

impl Outcome {
    pub fn is_yes(&self) -> bool {
        matches!(self, Outcome::Yes(_))
    }
}

/// Spanning tree of `g` when connected (parent edges of a BFS forest).
pub fn check_connectivity(g: &Graph) -> Option<Vec<(usize, usize)>> {
    let n = g.vertex_count();
    assert!(n >= 1, "connectivity needs at least one vertex");
    let mut seen = vec![false; n];
    let mut tree = Vec::with_capacity(n - 1);
    let mut queue = std::collections::VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for w in g.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                tree.push((v, w));
                queue.push_back(w);
            }
        }
    }
    (tree.len() == n - 1).then_some(tree)
}

/// Maximum matching (exact, Edmonds-style via petgraph). Returns the
/// matching when it covers floor(n/2) vertices pairs, i.e. all vertices but
/// at most one.
pub fn check_perfect_matching(g: &Graph) -> Option<Vec<(usize, usize)>> {
    let m = maximum_matching(g);
    (m.len() == g.vertex_count() / 2).then_some(m)
}

/// Exact maximum matching size and edges.
pub fn maximum_matching(g: &Graph) -> Vec<(usize, usize)> {
    use petgraph::graph::UnGraph;
    let mut pg = UnGraph::<(), ()>::default();
    let nodes: Vec<_> = (0..g.vertex_count()).map(|_| pg.add_node(())).collect();
    for e in g.edges() {
        pg.add_edge(nodes[e.u], nodes[e.v], ());
    }
    petgraph::algo::maximum_matching(&pg)
        .edges()
        .map(|(a, b)| (a.index(), b.index()))
        .collect()
}

/// A matching is a set of pairwise disjoint edges of `g`.
pub fn validate_matching(g: &Graph, matching: &[(usize, usize)]) -> bool {
    let mut used = vec![false; g.vertex_count()];
    for &(u, v) in matching {
        if u == v || !g.has_edge(u, v) || used[u] || used[v] {
            return false;
        }
        used[u] = true;
        used[v] = true;
    }
    true
}

/// A cycle is a closed simple walk of the stated length.
pub fn validate_cycle(g: &Graph, cycle: &[usize]) -> bool {
    let len = cycle.len();
    if len < 3 {
        return false;
    }
    let mut seen = std::collections::BTreeSet::new();
    for &v in cycle {
        if v >= g.vertex_count() || !seen.insert(v) {
            return false;
        }
    }
    (0..len).all(|i| g.has_edge(cycle[i], cycle[(i + 1) % len]))
}

#[derive(Clone, Debug)]
pub enum HamOutcome {
    Yes(Vec<usize>),
    No,
    Unknown,
}

/// Hamiltonicity. Exact mode is complete (bitmask DP) and gated to
/// [`EXACT_CYCLE_GATE`]; heuristic mode is rotation-based and sound on Yes.
pub fn check_hamiltonicity(g: &Graph, mode: CheckMode) -> Result<HamOutcome> {
    let n = g.vertex_count();
    match mode {
        CheckMode::Exact => {
            if n > EXACT_CYCLE_GATE {
                return Err(Error::ExactGate {
                    gate: EXACT_CYCLE_GATE,
                    n,
                });
            }
            Ok(match exact_ham_cycle(g) {
                Some(c) => {
                    debug_assert!(validate_cycle(g, &c));
                    HamOutcome::Yes(c)
                }
                None => HamOutcome::No,
            })
        }
        CheckMode::Heuristic => {
            if n < 3 {
                return Ok(HamOutcome::No);
            }
            if g.min_degree() < 2 {
                // No certificate is possible; the heuristic contract answers
                // Yes-with-witness or Unknown, never an uncertified No.
                return Ok(HamOutcome::Unknown);
            }
            for e in heuristic_anchor_edges(g) {
                if let Some(cycle) = posa::find_ham_cycle_through(g, e) {
                    if validate_cycle(g, &cycle) {
                        return Ok(HamOutcome::Yes(cycle));
                    }
                }
            }
            Ok(HamOutcome::Unknown)
        }
    }
}

/// Anchor pairs for the rotation search: edges at a minimum-degree vertex
/// (any Hamilton cycle must use two of them), then a few spread elsewhere.
fn heuristic_anchor_edges(g: &Graph) -> Vec<(usize, usize)> {
    let n = g.vertex_count();
    let vmin = (0..n).min_by_key(|&v| g.degree(v)).unwrap();
    let mut out: Vec<(usize, usize)> = g.neighbors(vmin).take(6).map(|w| (vmin, w)).collect();
    for e in g.edges() {
        if out.len() >= 10 {
            break;
        }
        if !e.touches(vmin) {
            out.push((e.u, e.v));
        }
    }
    out
}

/// Complete Hamilton-cycle search by subset DP with witness reconstruction.
fn exact_ham_cycle(g: &Graph) -> Option<Vec<usize>> {
    let n = g.vertex_count();
    if n < 3 {
        return None;
    }
    let mut adj = vec![0u32; n];
    for v in 0..n {
        for w in g.neighbors(v) {
            adj[v] |= 1 << w;
        }
    }
    // Paths anchored at vertex 0: reach[mask] = endpoints v of simple paths
    // 0 -> v spanning mask (mask always contains bit 0).
    let full: u32 = if n == 32 { u32::MAX } else { (1 << n) - 1 };
    let mut reach = vec![0u32; 1 << n];
    reach[1] = 1; // the trivial path at vertex 0
    for mask in 1u32..=full {
        if mask & 1 == 0 {
            continue;
        }
        let mut ends = reach[mask as usize];
        while ends != 0 {
            let v = ends.trailing_zeros() as usize;
            ends &= ends - 1;
            let mut ext = adj[v] & !mask;
            while ext != 0 {
                let w = ext.trailing_zeros() as usize;
                ext &= ext - 1;
                reach[(mask | 1 << w) as usize] |= 1 << w;
            }
        }
    }
    let closers = reach[full as usize] & adj[0] & !1u32;
    if closers == 0 {
        return None;
    }
    // Reconstruct backwards from any closer.
    let mut cycle = Vec::with_capacity(n);
    let mut v = closers.trailing_zeros() as usize;
    let mut mask = full;
    loop {
        cycle.push(v);
        if v == 0 {
            break;
        }
        let prev_mask = mask & !(1 << v);
        let cands = reach[prev_mask as usize] & adj[v];
        debug_assert_ne!(cands, 0, "DP reconstruction lost the path");
        v = cands.trailing_zeros() as usize;
        mask = prev_mask;
    }
    cycle.reverse(); // starts at 0, ends at the closer
    Some(cycle)
}

#[derive(Clone, Debug)]
pub enum PancyclicOutcome {
    /// A validated cycle for every length in [3, n].
    Yes(BTreeMap<usize, Vec<usize>>),
    /// Exact mode: no cycle of this length exists.
    No { missing: usize },
    /// Heuristic mode: these lengths were not found.
    Unknown { missing: Vec<usize> },
}

/// Pancyclicity: cycles of every length 3..=n. Exact mode enumerates by a
/// per-anchor subset DP (anchor = smallest vertex on the cycle).
pub fn check_pancyclicity(g: &Graph, mode: CheckMode) -> Result<PancyclicOutcome> {
    let n = g.vertex_count();
    if n < 3 {
        return Ok(PancyclicOutcome::No { missing: 3 });
    }
    match mode {
        CheckMode::Exact => {
            if n > EXACT_CYCLE_GATE {
                return Err(Error::ExactGate {
                    gate: EXACT_CYCLE_GATE,
                    n,
                });
            }
            let found = exact_all_cycle_lengths(g);
            for len in 3..=n {
                if !found.contains_key(&len) {
                    return Ok(PancyclicOutcome::No { missing: len });
                }
            }
            for (len, c) in &found {
                debug_assert_eq!(c.len(), *len);
                debug_assert!(validate_cycle(g, c));
            }
            Ok(PancyclicOutcome::Yes(found))
        }
        CheckMode::Heuristic => {
            let mut found: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            // A Hamilton cycle, when found, yields candidate vertex windows
            // for shorter cycles via induced subgraphs.
            let order: Vec<usize> = match check_hamiltonicity(g, CheckMode::Heuristic)? {
                HamOutcome::Yes(c) => {
                    found.insert(n, c.clone());
                    c
                }
                _ => (0..n).collect(),
            };
            for len in 3..n {
                if found.contains_key(&len) {
                    continue;
                }
                for offset in 0..(4usize.min(n)) {
                    let keep: Vec<usize> =
                        (0..len).map(|i| order[(i + offset * len) % n]).collect();
                    let (sub, map) = g.induced(&keep);
                    if sub.min_degree() < 2 {
                        continue;
                    }
                    if let HamOutcome::Yes(c) = check_hamiltonicity(&sub, CheckMode::Heuristic)? {
                        let lifted: Vec<usize> = c.into_iter().map(|v| map[v]).collect();
                        if validate_cycle(g, &lifted) {
                            found.insert(len, lifted);
                            break;
                        }
                    }
                }
            }
            let missing: Vec<usize> = (3..=n).filter(|l| !found.contains_key(l)).collect();
            if missing.is_empty() {
                Ok(PancyclicOutcome::Yes(found))
            } else {
                Ok(PancyclicOutcome::Unknown { missing })
            }
        }
    }
}

/// One validated cycle per achievable length, via per-anchor DP.
fn exact_all_cycle_lengths(g: &Graph) -> BTreeMap<usize, Vec<usize>> {
    let n = g.vertex_count();
    let mut found: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for s in 0..n {
        if found.len() == n - 2 {
            break; // every length in [3, n] already witnessed
        }
        // Universe: vertices >= s, relabeled 0..k with s -> 0.
        let verts: Vec<usize> = (s..n).collect();
        let k = verts.len();
        if k < 3 {
            break;
        }
        let mut adj = vec![0u32; k];
        for (i, &v) in verts.iter().enumerate() {
            for w in g.neighbors(v) {
                if w >= s {
                    adj[i] |= 1 << (w - s);
                }
            }
        }
        let full: u32 = (1 << k) - 1;
        let mut reach = vec![0u32; 1 << k];
        reach[1] = 1;
        for mask in 1u32..=full {
            if mask & 1 == 0 {
                continue;
            }
            let sz = mask.count_ones() as usize;
            let mut ends = reach[mask as usize];
            // Record a new cycle length when an endpoint closes back to s.
            if sz >= 3 && !found.contains_key(&sz) {
                let closers = ends & adj[0] & !1u32;
                if closers != 0 {
                    let cyc =
                        reconstruct_cycle(&reach, &adj, mask, closers.trailing_zeros() as usize);
                    found.insert(sz, cyc.into_iter().map(|i| verts[i]).collect());
                }
            }
            while ends != 0 {
                let v = ends.trailing_zeros() as usize;
                ends &= ends - 1;
                let mut ext = adj[v] & !mask;
                while ext != 0 {
                    let w = ext.trailing_zeros() as usize;
                    ext &= ext - 1;
                    reach[(mask | 1 << w) as usize] |= 1 << w;
                }
            }
        }
    }
    found
}

fn reconstruct_cycle(reach: &[u32], adj: &[u32], full: u32, last: usize) -> Vec<usize> {
    let mut cycle = Vec::new();
    let mut v = last;
    let mut mask = full;
    loop {
        cycle.push(v);
        if v == 0 {
            break;
        }
        let prev_mask = mask & !(1 << v);
        let cands = reach[prev_mask as usize] & adj[v];
        debug_assert_ne!(cands, 0);
        v = cands.trailing_zeros() as usize;
        mask = prev_mask;
    }
    cycle.reverse();
    cycle
}

/// The monotone increasing properties the lab plays for.
#[derive(Clone, Debug)]
pub enum PropertyId {
    Connectivity,
    PerfectMatching,
    MinDegree(usize),
    Hamiltonicity,
    Pancyclicity,
    TreeUniversal(Vec<TreeSpec>),
}

/// A property plus the checking mode; the engine's win condition.
#[derive(Clone, Debug)]
pub struct Property {
    pub id: PropertyId,
    pub mode: CheckMode,
}

impl Property {
    pub fn exact(id: PropertyId) -> Self {
        Property {
            id,
            mode: CheckMode::Exact,
        }
    }

    pub fn heuristic(id: PropertyId) -> Self {
        Property {
            id,
            mode: CheckMode::Heuristic,
        }
    }

    pub fn check(&self, g: &Graph) -> Outcome {
        match &self.id {
            PropertyId::Connectivity => match check_connectivity(g) {
                Some(t) => Outcome::Yes(Witness::SpanningTree(t)),
                None => Outcome::No,
            },
            PropertyId::PerfectMatching => match check_perfect_matching(g) {
                Some(m) => Outcome::Yes(Witness::Matching(m)),
                None => Outcome::No,
            },
            PropertyId::MinDegree(k) => {
                if g.vertex_count() > 0 && g.min_degree() >= *k {
                    Outcome::Yes(Witness::MinDegree(g.min_degree()))
                } else {
                    Outcome::No
                }
            }
            PropertyId::Hamiltonicity => match check_hamiltonicity(g, self.mode) {
                Ok(HamOutcome::Yes(c)) => Outcome::Yes(Witness::Cycle(c)),
                Ok(HamOutcome::No) => Outcome::No,
                Ok(HamOutcome::Unknown) => Outcome::Unknown,
                Err(_) => Outcome::Unknown,
            },
            PropertyId::Pancyclicity => match check_pancyclicity(g, self.mode) {
                Ok(PancyclicOutcome::Yes(m)) => Outcome::Yes(Witness::CyclesByLength(m)),
                Ok(PancyclicOutcome::No { .. }) => Outcome::No,
                Ok(PancyclicOutcome::Unknown { .. }) => Outcome::Unknown,
                Err(_) => Outcome::Unknown,
            },
            PropertyId::TreeUniversal(specs) => {
                let mut maps = Vec::with_capacity(specs.len());
                for (i, spec) in specs.iter().enumerate() {
                    let seed = crate::graph::Seed::new(0x7ee5, i as u64);
                    match trees::embed_tree(g, spec, 0.25, seed) {
                        Ok(EmbedOutcome::Embedded { map }) => maps.push(map),
                        _ => return Outcome::Unknown,
                    }
                }
                Outcome::Yes(Witness::Embeddings(maps))
            }
        }
    }
}

/// Parses a property name for the CLI: connectivity, perfect-matching,
/// min-degree:<k>, hamiltonicity, pancyclicity.
pub fn parse_property(name: &str, mode: CheckMode) -> Result<Property> {
    let id = if let Some(k) = name.strip_prefix("min-degree:") {
        PropertyId::MinDegree(
            k.parse()
                .map_err(|e| Error::Parameter(format!("bad min-degree bound: {e}")))?,
        )
    } else {
        match name {
            "connectivity" => PropertyId::Connectivity,
            "perfect-matching" => PropertyId::PerfectMatching,
            "hamiltonicity" => PropertyId::Hamiltonicity,
            "pancyclicity" => PropertyId::Pancyclicity,
            other => return Err(Error::Parameter(format!("unknown property '{other}'"))),
        }
    };
    Ok(Property { id, mode })
}
