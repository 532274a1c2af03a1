//! Bounded-degree spanning trees with a long bare path: instance generation
//! and the contract-embed-splice embedding pipeline.
//!
//! A bare path in a tree is a path whose interior vertices have degree
//! exactly two. To embed such a tree, the bare interior is cut out (its
//! endpoints joined by one contracted edge), the smaller tree is embedded
//! greedily, and the bare path is re-created as a Hamilton path on the
//! leftover vertices via booster absorption from a reserved edge set.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Graph, Seed};
use crate::posa::{self, HamPathResult};

/// A spanning-tree instance: the tree, its degree bound, and a designated
/// bare path `v_0 ... v_t` (so the path has `t` edges).
#[derive(Clone, Debug, Serialize)]
pub struct TreeSpec {
    pub tree: Graph,
    pub max_degree: usize,
    pub bare: Vec<usize>,
}

impl TreeSpec {
    /// Bare-path length `t` (edge count).
    pub fn bare_length(&self) -> usize {
        self.bare.len() - 1
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.tree.vertex_count();
        if self.tree.edge_count() != n - 1 || !self.tree.is_connected() {
            return Err(Error::Parameter("spec graph is not a tree".into()));
        }
        if self.tree.max_degree() > self.max_degree {
            return Err(Error::Parameter(format!(
                "tree has max degree {} > bound {}",
                self.tree.max_degree(),
                self.max_degree
            )));
        }
        if self.bare.len() < 2 {
            return Err(Error::Parameter("bare path needs at least one edge".into()));
        }
        for w in self.bare.windows(2) {
            if !self.tree.has_edge(w[0], w[1]) {
                return Err(Error::Parameter(format!(
                    "bare pair ({}, {}) is not a tree edge",
                    w[0], w[1]
                )));
            }
        }
        for &v in &self.bare[1..self.bare.len() - 1] {
            if self.tree.degree(v) != 2 {
                return Err(Error::Parameter(format!(
                    "interior bare vertex {v} has degree {} != 2",
                    self.tree.degree(v)
                )));
            }
        }
        let distinct: std::collections::BTreeSet<usize> = self.bare.iter().copied().collect();
        if distinct.len() != self.bare.len() {
            return Err(Error::Parameter("bare path repeats a vertex".into()));
        }
        Ok(())
    }

    /// The contracted tree: interior bare vertices deleted, endpoints joined
    /// by one edge. Returns the relabeled tree on `n - t + 1` vertices, the
    /// map from new labels to original tree labels, and the (new-label)
    /// contracted pair.
    pub fn contracted(&self) -> (Graph, Vec<usize>, (usize, usize)) {
        let n = self.tree.vertex_count();
        let interior: std::collections::BTreeSet<usize> =
            self.bare[1..self.bare.len() - 1].iter().copied().collect();
        let keep: Vec<usize> = (0..n).filter(|v| !interior.contains(v)).collect();
        let mut new_of = vec![usize::MAX; n];
        for (i, &v) in keep.iter().enumerate() {
            new_of[v] = i;
        }
        let mut t = Graph::empty(keep.len());
        for e in self.tree.edges() {
            if new_of[e.u] != usize::MAX && new_of[e.v] != usize::MAX {
                t.add_edge(new_of[e.u], new_of[e.v]);
            }
        }
        let pair = (new_of[self.bare[0]], new_of[*self.bare.last().unwrap()]);
        t.add_edge(pair.0, pair.1);
        (t, keep, pair)
    }
}

/// Samples a random degree-capped tree on `n` vertices with a designated
/// bare path of length `ceil(alpha * n)`: build the contracted tree first,
/// then subdivide one of its edges with the bare interior vertices.
pub fn random_tree_with_bare_path(
    n: usize,
    max_degree: usize,
    alpha: f64,
    seed: Seed,
) -> Result<TreeSpec> {
    if max_degree < 2 {
        return Err(Error::Parameter("degree bound must be at least 2".into()));
    }
    if !(alpha > 0.0) || alpha.is_nan() {
        return Err(Error::Parameter("alpha must be positive".into()));
    }
    let t = (alpha * n as f64).ceil() as usize;
    if t < 1 || t > n - 1 {
        return Err(Error::Parameter(format!(
            "bare length ceil(alpha n) = {t} must lie in [1, n-1]"
        )));
    }
    let m = n - t + 1; // contracted tree order, >= 2
    let mut rng = seed.rng();
    let mut tree = Graph::empty(n);
    let mut degree = vec![0usize; m];
    for v in 1..m {
        // Attach to a uniformly random earlier vertex with spare capacity;
        // the most recent leaf always qualifies, so this never stalls.
        let eligible: Vec<usize> = (0..v).filter(|&u| degree[u] < max_degree).collect();
        let u = eligible[rng.random_range(0..eligible.len())];
        tree.add_edge(u, v);
        degree[u] += 1;
        degree[v] += 1;
    }
    // Pick a random contracted-tree edge and subdivide it t-1 times.
    let edges = tree.edges();
    let e = edges[rng.random_range(0..edges.len())];
    let mut bare = Vec::with_capacity(t + 1);
    bare.push(e.u);
    if t > 1 {
        tree.remove_edge(e.u, e.v);
        let mut prev = e.u;
        for i in 0..(t - 1) {
            let w = m + i;
            tree.add_edge(prev, w);
            bare.push(w);
            prev = w;
        }
        tree.add_edge(prev, e.v);
    }
    bare.push(e.v);
    let spec = TreeSpec {
        tree,
        max_degree,
        bare,
    };
    spec.validate().expect("construction satisfies the invariants");
    Ok(spec)
}

/// Structured embedding result; failures name the stage that gave up.
#[derive(Clone, Debug, Serialize)]
pub enum EmbedOutcome {
    Embedded {
        /// map[tree vertex] = host vertex.
        map: Vec<usize>,
    },
    Failed {
        stage: &'static str,
        detail: String,
    },
}

impl EmbedOutcome {
    pub fn is_embedded(&self) -> bool {
        matches!(self, EmbedOutcome::Embedded { .. })
    }
}

/// Checks that `map` realizes `tree` as a subgraph of `g` (injective and
/// edge-preserving); the independent validator for every reported success.
pub fn validate_embedding(g: &Graph, tree: &Graph, map: &[usize]) -> bool {
    if map.len() != tree.vertex_count() {
        return false;
    }
    let distinct: std::collections::BTreeSet<usize> = map.iter().copied().collect();
    if distinct.len() != map.len() || map.iter().any(|&v| v >= g.vertex_count()) {
        return false;
    }
    tree.edges().iter().all(|e| g.has_edge(map[e.u], map[e.v]))
}

/// Embeds a spanning tree with a bare path into `g`.
///
/// Pipeline: reserve a `reservoir_fraction` of the host edges for booster
/// absorption, set aside a random vertex set of the bare-interior size,
/// greedily embed the contracted tree on the rest (DFS order, images chosen
/// by highest degree into the still-available vertices; the contracted pair
/// itself needs no host edge since the bare path replaces it), then connect
/// the two bare endpoints by a Hamilton path on the leftover vertices and
/// splice it in.
pub fn embed_tree(
    g: &Graph,
    spec: &TreeSpec,
    reservoir_fraction: f64,
    seed: Seed,
) -> Result<EmbedOutcome> {
    spec.validate()?;
    let n = g.vertex_count();
    if spec.tree.vertex_count() != n {
        return Err(Error::Parameter(format!(
            "tree order {} != host order {n}",
            spec.tree.vertex_count()
        )));
    }
    if !(0.0..1.0).contains(&reservoir_fraction) {
        return Err(Error::Parameter(
            "reservoir fraction must lie in [0, 1)".into(),
        ));
    }
    let t = spec.bare_length();

    // Edge split: main for embedding, reservoir for absorption.
    let mut main = Graph::empty(n);
    let mut reservoir = Graph::empty(n);
    let mut split_rng = seed.role(1).rng();
    for e in g.edges() {
        if split_rng.random_bool(reservoir_fraction) {
            reservoir.add_edge(e.u, e.v);
        } else {
            main.add_edge(e.u, e.v);
        }
    }

    // Random reserved vertex set of exactly the bare-interior size.
    let mut v0_rng = seed.role(2).rng();
    let mut verts: Vec<usize> = (0..n).collect();
    verts.shuffle(&mut v0_rng);
    let reserved: Vec<usize> = verts[..t - 1].to_vec();
    let mut available = vec![true; n];
    for &v in &reserved {
        available[v] = false;
    }

    // Greedy DFS embedding of the contracted tree.
    let (tprime, old_of, contracted_pair) = spec.contracted();
    let m = tprime.vertex_count();
    let mut image = vec![usize::MAX; m];
    let root = contracted_pair.0;
    let avail_degree = |v: usize, available: &[bool]| -> usize {
        main.neighbors(v).filter(|&w| available[w]).count()
    };
    let root_image = (0..n)
        .filter(|&v| available[v])
        .max_by_key(|&v| (avail_degree(v, &available), std::cmp::Reverse(v)));
    let Some(root_image) = root_image else {
        return Ok(EmbedOutcome::Failed {
            stage: "contracted-tree-embedding",
            detail: "no available vertex for the root".into(),
        });
    };
    image[root] = root_image;
    available[root_image] = false;

    // DFS order with larger subtrees first, so the scarce endgame
    // placements are leaves next to freshly placed parents.
    let order = dfs_order_heavy_first(&tprime, root);
    for &(parent, child) in &order {
        let crossing_fake = (parent, child) == contracted_pair
            || (child, parent) == contracted_pair;
        let candidate = if crossing_fake {
            (0..n)
                .filter(|&v| available[v])
                .max_by_key(|&v| (avail_degree(v, &available), std::cmp::Reverse(v)))
        } else {
            main.neighbors(image[parent])
                .filter(|&v| available[v])
                .max_by_key(|&v| (avail_degree(v, &available), std::cmp::Reverse(v)))
        };
        match candidate {
            Some(v) => {
                image[child] = v;
                available[v] = false;
            }
            None => {
                return Ok(EmbedOutcome::Failed {
                    stage: "contracted-tree-embedding",
                    detail: format!(
                        "no available image adjacent to host vertex {}",
                        image[parent]
                    ),
                });
            }
        }
    }

    // Leftover vertices plus the two bare endpoints carry the bare path.
    let x = image[contracted_pair.0];
    let y = image[contracted_pair.1];
    let mut vprime: Vec<usize> = reserved.clone();
    vprime.push(x);
    vprime.push(y);
    vprime.sort_unstable();
    let (sub_main, back) = main.induced(&vprime);
    let (sub_res, _) = reservoir.induced(&vprime);
    let sx = vprime.binary_search(&x).unwrap();
    let sy = vprime.binary_search(&y).unwrap();
    let path = match posa::hamilton_path_between(&sub_main, sx, sy, &sub_res)? {
        HamPathResult::Found { path, .. } => path,
        HamPathResult::Failed(f) => {
            return Ok(EmbedOutcome::Failed {
                stage: "bare-path-hamilton",
                detail: f.stage,
            });
        }
    };
    debug_assert_eq!(path.len(), t + 1);

    // Splice: bare[i] maps to the i-th path vertex.
    let mut map = vec![usize::MAX; n];
    for (new, &old) in old_of.iter().enumerate() {
        map[old] = image[new];
    }
    for (i, &bv) in spec.bare.iter().enumerate() {
        map[bv] = back[path[i]];
    }
    if !validate_embedding(g, &spec.tree, &map) {
        return Ok(EmbedOutcome::Failed {
            stage: "validation",
            detail: "constructed map is not an embedding".into(),
        });
    }
    Ok(EmbedOutcome::Embedded { map })
}

/// Parent-child DFS visit order, heavier subtrees first.
fn dfs_order_heavy_first(tree: &Graph, root: usize) -> Vec<(usize, usize)> {
    let n = tree.vertex_count();
    let mut size = vec![1usize; n];
    let mut parent = vec![usize::MAX; n];
    let mut order_stack = vec![root];
    let mut post = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    seen[root] = true;
    while let Some(v) = order_stack.pop() {
        post.push(v);
        for w in tree.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = v;
                order_stack.push(w);
            }
        }
    }
    for &v in post.iter().rev() {
        if parent[v] != usize::MAX {
            size[parent[v]] += size[v];
        }
    }
    let mut out = Vec::with_capacity(n - 1);
    let mut stack = vec![root];
    let mut visited = vec![false; n];
    visited[root] = true;
    while let Some(v) = stack.pop() {
        let mut kids: Vec<usize> = tree.neighbors(v).filter(|&w| !visited[w]).collect();
        kids.sort_by_key(|&w| (size[w], std::cmp::Reverse(w)));
        // Stack pops the last element first: ascending size in the stack
        // means heaviest subtree is embedded first.
        for &w in &kids {
            visited[w] = true;
            out.push((v, w));
        }
        for w in kids.into_iter().rev() {
            stack.push(w);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::sample_gnp;

    #[test]
    fn generator_edge_cases() {
        // alpha n = n - 1: the tree is a bare Hamilton path.
        let spec = random_tree_with_bare_path(10, 3, 0.9, Seed::new(1, 0)).unwrap();
        assert_eq!(spec.bare_length(), 9);
        assert_eq!(spec.tree.max_degree(), 2);

        // Degree bound 2 forces a path even for short bare sections.
        let spec = random_tree_with_bare_path(12, 2, 0.25, Seed::new(2, 0)).unwrap();
        assert_eq!(spec.tree.max_degree(), 2);
        spec.validate().unwrap();

        assert!(random_tree_with_bare_path(10, 1, 0.3, Seed::new(3, 0)).is_err());
        assert!(random_tree_with_bare_path(10, 3, 1.5, Seed::new(3, 0)).is_err());
    }

    #[test]
    fn generated_specs_always_validate() {
        for t in 0..50u64 {
            let spec = random_tree_with_bare_path(40, 3, 0.3, Seed::new(7, t)).unwrap();
            spec.validate().unwrap();
            assert_eq!(spec.tree.vertex_count(), 40);
            assert!(spec.bare_length() >= 12);
            let (tp, _, _) = spec.contracted();
            assert_eq!(tp.vertex_count(), 40 - spec.bare_length() + 1);
            assert_eq!(tp.edge_count(), tp.vertex_count() - 1);
        }
    }

    #[test]
    fn spec_validation_rejects_degree_violations() {
        let mut spec = random_tree_with_bare_path(12, 3, 0.3, Seed::new(9, 0)).unwrap();
        spec.max_degree = spec.tree.max_degree() - 1;
        assert!(spec.validate().is_err());
        assert!(embed_tree(&Graph::complete(12), &spec, 0.2, Seed::new(0, 0)).is_err());
    }

    #[test]
    fn hamilton_path_tree_on_complete_host() {
        // Bare path = the whole tree; reduces to a Hamilton x-y path.
        let spec = random_tree_with_bare_path(12, 3, 11.0 / 12.0, Seed::new(4, 1)).unwrap();
        assert_eq!(spec.bare_length(), 11);
        let g = Graph::complete(12);
        match embed_tree(&g, &spec, 0.2, Seed::new(5, 1)).unwrap() {
            EmbedOutcome::Embedded { map } => {
                assert!(validate_embedding(&g, &spec.tree, &map));
            }
            EmbedOutcome::Failed { stage, detail } => {
                panic!("embed failed at {stage}: {detail}")
            }
        }
    }

    #[test]
    fn embeds_into_dense_random_hosts() {
        let mut ok = 0usize;
        let trials = 40;
        for t in 0..trials {
            let g = sample_gnp(60, 0.5, Seed::new(600, t)).unwrap();
            let spec = random_tree_with_bare_path(60, 3, 0.3, Seed::new(601, t)).unwrap();
            match embed_tree(&g, &spec, 0.25, Seed::new(602, t)).unwrap() {
                EmbedOutcome::Embedded { map } => {
                    assert!(validate_embedding(&g, &spec.tree, &map));
                    ok += 1;
                }
                EmbedOutcome::Failed { .. } => {}
            }
        }
        assert!(ok * 10 >= trials as usize * 9, "only {ok}/{trials} embedded");
    }

    #[test]
    fn failure_reports_name_the_stage() {
        // A host that is far too sparse for any spanning tree.
        let g = Graph::from_edges(12, [(0, 1), (2, 3)]);
        let spec = random_tree_with_bare_path(12, 3, 0.3, Seed::new(10, 0)).unwrap();
        match embed_tree(&g, &spec, 0.2, Seed::new(11, 0)).unwrap() {
            EmbedOutcome::Failed { stage, .. } => {
                assert!(
                    stage == "contracted-tree-embedding" || stage == "bare-path-hamilton",
                    "unexpected stage {stage}"
                );
            }
            EmbedOutcome::Embedded { .. } => panic!("cannot embed into a near-empty host"),
        }
    }
}
