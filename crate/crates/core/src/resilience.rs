//! Global and local resilience estimation.
//!
//! The local resilience of G with respect to a monotone property P is the
//! least r such that deleting at most r*d(v) edges at every vertex v can
//! destroy P. Heuristic adversaries produce upper bounds (a found plan is a
//! proof); lower bounds come from exhaustive search, which is only feasible
//! at toy sizes. Reports keep this asymmetry explicit: a heuristic failure
//! to destroy is evidence of resilience, never proof.

use rand::seq::SliceRandom;
use serde::Serialize;

use crate::checkers::{
    check_connectivity, check_hamiltonicity, check_pancyclicity, maximum_matching, CheckMode,
    HamOutcome, PancyclicOutcome, Property, PropertyId,
};
use crate::error::{Error, Result};
use crate::graph::{Graph, Seed};

/// Exhaustive resilience search is gated to this many vertices.
pub const EXACT_RESILIENCE_GATE: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BudgetMode {
    /// At most floor(r * d_G(v)) deletions at every vertex.
    Local,
    /// At most r * e(G) deletions in total.
    Global,
}

/// A deletion set H together with the budget it was found under.
#[derive(Clone, Debug, Serialize)]
pub struct DeletionPlan {
    pub edges: Vec<(usize, usize)>,
    pub mode: BudgetMode,
    pub r: f64,
    pub heuristic: &'static str,
}

impl DeletionPlan {
    pub fn respects_budget(&self, g: &Graph) -> bool {
        match self.mode {
            BudgetMode::Local => {
                let mut cnt = vec![0usize; g.vertex_count()];
                for &(u, v) in &self.edges {
                    if !g.has_edge(u, v) {
                        return false;
                    }
                    cnt[u] += 1;
                    cnt[v] += 1;
                }
                (0..g.vertex_count())
                    .all(|v| cnt[v] as f64 <= (self.r * g.degree(v) as f64 + 1e-9).floor())
            }
            BudgetMode::Global => {
                self.edges.iter().all(|&(u, v)| g.has_edge(u, v))
                    && self.edges.len() as f64 <= self.r * g.edge_count() as f64 + 1e-9
            }
        }
    }

    /// The plan's own local cost: max over v of d_H(v) / d_G(v). This is the
    /// least r at which the plan itself is budget-respecting.
    pub fn local_cost(&self, g: &Graph) -> f64 {
        let mut cnt = vec![0usize; g.vertex_count()];
        for &(u, v) in &self.edges {
            cnt[u] += 1;
            cnt[v] += 1;
        }
        (0..g.vertex_count())
            .map(|v| {
                if g.degree(v) == 0 {
                    0.0
                } else {
                    cnt[v] as f64 / g.degree(v) as f64
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, g: &Graph) -> Graph {
        let mut out = g.clone();
        for &(u, v) in &self.edges {
            out.remove_edge(u, v);
        }
        out
    }
}

/// Certified refutation: true means `g` provably lacks the property. Sound,
/// not complete above the exact gates (then only necessary-condition
/// violations are recognized).
pub fn refute(property: &Property, g: &Graph) -> bool {
    let n = g.vertex_count();
    match &property.id {
        PropertyId::Connectivity => check_connectivity(g).is_none(),
        PropertyId::MinDegree(k) => n == 0 || g.min_degree() < *k,
        PropertyId::PerfectMatching => maximum_matching(g).len() < n / 2,
        PropertyId::Hamiltonicity => {
            if n < 3 {
                return true;
            }
            if n <= crate::checkers::EXACT_CYCLE_GATE {
                matches!(
                    check_hamiltonicity(g, CheckMode::Exact),
                    Ok(HamOutcome::No)
                )
            } else {
                g.min_degree() < 2 || check_connectivity(g).is_none() || has_cut_vertex(g)
            }
        }
        PropertyId::Pancyclicity => {
            if n < 3 {
                return true;
            }
            if n <= crate::checkers::EXACT_CYCLE_GATE {
                matches!(
                    check_pancyclicity(g, CheckMode::Exact),
                    Ok(PancyclicOutcome::No { .. })
                )
            } else {
                g.min_degree() < 2
                    || check_connectivity(g).is_none()
                    || has_cut_vertex(g)
                    || !has_triangle(g)
            }
        }
        PropertyId::TreeUniversal(_) => check_connectivity(g).is_none(),
    }
}

fn has_triangle(g: &Graph) -> bool {
    for e in g.edges() {
        let (a, b) = (e.u, e.v);
        if g.neighbors(a).any(|w| w != b && g.has_edge(w, b)) {
            return true;
        }
    }
    false
}

fn has_cut_vertex(g: &Graph) -> bool {
    // Tarjan articulation points; a Hamiltonian graph is 2-connected.
    let n = g.vertex_count();
    if n < 3 {
        return false;
    }
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0usize;
    // Iterative DFS from vertex 0 only (callers already know g is connected).
    let mut stack: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    let root = 0usize;
    let mut root_children = 0usize;
    disc[root] = timer;
    low[root] = timer;
    timer += 1;
    stack.push((root, usize::MAX, g.neighbors(root).collect()));
    while let Some((v, parent, todo)) = stack.last_mut() {
        if let Some(w) = todo.pop() {
            let (v, parent) = (*v, *parent);
            if disc[w] == usize::MAX {
                if v == root {
                    root_children += 1;
                }
                disc[w] = timer;
                low[w] = timer;
                timer += 1;
                stack.push((w, v, g.neighbors(w).collect()));
            } else if w != parent {
                low[v] = low[v].min(disc[w]);
            }
        } else {
            let (v, parent, _) = stack.pop().unwrap();
            if parent != usize::MAX {
                low[parent] = low[parent].min(low[v]);
                if parent != root && low[v] >= disc[parent] {
                    return true;
                }
            }
        }
    }
    root_children > 1
}

fn local_budgets(g: &Graph, r: f64) -> Vec<usize> {
    (0..g.vertex_count())
        .map(|v| (r * g.degree(v) as f64 + 1e-9).floor() as usize)
        .collect()
}

/// The degree a vertex must keep for the property to survive; starving a
/// vertex below it is a certified destruction.
fn degree_necessity(property: &Property) -> Option<usize> {
    match property.id {
        PropertyId::Connectivity | PropertyId::PerfectMatching | PropertyId::TreeUniversal(_) => {
            Some(1)
        }
        PropertyId::Hamiltonicity | PropertyId::Pancyclicity => Some(2),
        PropertyId::MinDegree(k) => Some(k),
    }
}

struct AttackContext<'a> {
    g: &'a Graph,
    property: &'a Property,
    r: f64,
    mode: BudgetMode,
}

impl AttackContext<'_> {
    fn try_plan(&self, edges: Vec<(usize, usize)>, heuristic: &'static str) -> Option<DeletionPlan> {
        let plan = DeletionPlan {
            edges,
            mode: self.mode,
            r: self.r,
            heuristic,
        };
        if !plan.respects_budget(self.g) {
            return None;
        }
        refute(self.property, &plan.apply(self.g)).then_some(plan)
    }
}

/// Starve each low-degree vertex below the property's degree necessity,
/// spending neighbor budgets greedily.
fn starvation_attack(ctx: &AttackContext) -> Option<DeletionPlan> {
    let g = ctx.g;
    let need = degree_necessity(ctx.property)?;
    let budgets = match ctx.mode {
        BudgetMode::Local => local_budgets(g, ctx.r),
        BudgetMode::Global => vec![usize::MAX; g.vertex_count()],
    };
    let global_cap = match ctx.mode {
        BudgetMode::Global => (ctx.r * g.edge_count() as f64 + 1e-9).floor() as usize,
        BudgetMode::Local => usize::MAX,
    };
    let mut order: Vec<usize> = (0..g.vertex_count()).collect();
    order.sort_by_key(|&v| g.degree(v));
    for &v in &order {
        let d = g.degree(v);
        if d < need {
            continue; // property already refutable without deletions
        }
        let must_drop = d - (need - 1);
        if must_drop > budgets[v].min(global_cap) {
            continue;
        }
        // Drop edges toward neighbors with the most budget headroom.
        let mut nbrs: Vec<usize> = g.neighbors(v).collect();
        nbrs.sort_by_key(|&u| std::cmp::Reverse(budgets[u]));
        let chosen: Vec<(usize, usize)> = nbrs
            .iter()
            .take(must_drop)
            .map(|&u| (v.min(u), v.max(u)))
            .collect();
        if chosen.len() == must_drop {
            if let Some(plan) = ctx.try_plan(chosen, "starvation") {
                return Some(plan);
            }
        }
    }
    None
}

/// Delete the crossing edges of a bipartition (optionally sparing a small
/// separator). Exhaustive over splits at toy sizes, sampled above.
fn cut_attack(ctx: &AttackContext, rng: &mut rand_chacha::ChaCha8Rng) -> Option<DeletionPlan> {
    let g = ctx.g;
    let n = g.vertex_count();
    let try_split = |side_a: &[bool], heuristic: &'static str| -> Option<DeletionPlan> {
        let crossing: Vec<(usize, usize)> = g
            .edges()
            .iter()
            .filter(|e| side_a[e.u] != side_a[e.v])
            .map(|e| (e.u, e.v))
            .collect();
        if crossing.is_empty() {
            return None;
        }
        ctx.try_plan(crossing, heuristic)
    };

    if n <= 14 {
        // All bipartitions and all splits around separators of size <= 2.
        let mut best: Option<DeletionPlan> = None;
        let mut consider = |plan: Option<DeletionPlan>| {
            if let Some(p) = plan {
                let better = match &best {
                    None => true,
                    Some(b) => p.local_cost(ctx.g) < b.local_cost(ctx.g) - 1e-12,
                };
                if better {
                    best = Some(p);
                }
            }
        };
        let mut seps: Vec<Vec<usize>> = vec![vec![]];
        seps.extend((0..n).map(|v| vec![v]));
        for v in 0..n {
            for w in (v + 1)..n {
                seps.push(vec![v, w]);
            }
        }
        for sep in seps {
            let rest: Vec<usize> = (0..n).filter(|v| !sep.contains(v)).collect();
            if rest.len() < 2 {
                continue;
            }
            // Fix rest[0] on side A; enumerate the remainder.
            for mask in 0u64..(1 << (rest.len() - 1)) {
                let mut side_a = vec![false; n];
                side_a[rest[0]] = true;
                for (i, &v) in rest[1..].iter().enumerate() {
                    side_a[v] = mask >> i & 1 == 1;
                }
                if side_a.iter().filter(|&&x| x).count() == rest.len() {
                    continue; // degenerate: everything on one side
                }
                // Separator vertices keep all their edges (side flag shared
                // with side A keeps sep-B edges... put separators on side A
                // and on side B in turn to spare their edges entirely).
                let mut with_sep_a = side_a.clone();
                for &s in &sep {
                    with_sep_a[s] = true;
                }
                consider(try_split(&with_sep_a, "separator-cut"));
                let mut with_sep_b = side_a.clone();
                for &s in &sep {
                    with_sep_b[s] = false;
                }
                consider(try_split(&with_sep_b, "separator-cut"));
            }
        }
        best
    } else {
        // Random near-balanced splits plus BFS balls.
        let mut plan = None;
        let mut verts: Vec<usize> = (0..n).collect();
        for _ in 0..60 {
            verts.shuffle(rng);
            let half = n / 2;
            let mut side_a = vec![false; n];
            for &v in &verts[..half] {
                side_a[v] = true;
            }
            if let Some(p) = try_split(&side_a, "random-cut") {
                plan = Some(p);
                break;
            }
        }
        if plan.is_none() {
            // BFS ball around each of a few roots.
            'outer: for root in 0..n.min(8) {
                let mut order = vec![root];
                let mut seen = vec![false; n];
                seen[root] = true;
                let mut i = 0;
                while i < order.len() {
                    let v = order[i];
                    i += 1;
                    for w in g.neighbors(v) {
                        if !seen[w] {
                            seen[w] = true;
                            order.push(w);
                        }
                    }
                }
                for frac in [4usize, 3, 2] {
                    let k = n / frac;
                    if k == 0 || k >= order.len() {
                        continue;
                    }
                    let mut side_a = vec![false; n];
                    for &v in &order[..k] {
                        side_a[v] = true;
                    }
                    if let Some(p) = try_split(&side_a, "bfs-ball-cut") {
                        plan = Some(p);
                        break 'outer;
                    }
                }
            }
        }
        plan
    }
}

/// Randomized local search: greedily sample deletion sets inside the budget
/// and keep anything the refuter certifies.
fn random_attack(ctx: &AttackContext, rng: &mut rand_chacha::ChaCha8Rng) -> Option<DeletionPlan> {
    let g = ctx.g;
    let budgets = match ctx.mode {
        BudgetMode::Local => local_budgets(g, ctx.r),
        BudgetMode::Global => vec![usize::MAX; g.vertex_count()],
    };
    let global_cap = match ctx.mode {
        BudgetMode::Global => (ctx.r * g.edge_count() as f64 + 1e-9).floor() as usize,
        BudgetMode::Local => usize::MAX,
    };
    let mut edges: Vec<(usize, usize)> = g.edges().iter().map(|e| (e.u, e.v)).collect();
    for _ in 0..120 {
        edges.shuffle(rng);
        let mut cnt = vec![0usize; g.vertex_count()];
        let mut chosen = Vec::new();
        for &(u, v) in &edges {
            if chosen.len() >= global_cap {
                break;
            }
            if cnt[u] < budgets[u] && cnt[v] < budgets[v] {
                cnt[u] += 1;
                cnt[v] += 1;
                chosen.push((u, v));
            }
        }
        if let Some(plan) = ctx.try_plan(chosen, "random-local-search") {
            return Some(plan);
        }
    }
    None
}

/// Which heuristic families to run.
#[derive(Clone, Copy, Debug)]
pub struct AttackOptions {
    pub starvation: bool,
    pub cuts: bool,
    pub random_search: bool,
}

impl Default for AttackOptions {
    fn default() -> Self {
        AttackOptions {
            starvation: true,
            cuts: true,
            random_search: true,
        }
    }
}

/// Searches for a budget-respecting deletion plan that destroys the
/// property (validated by the sound refuter). Returns the cheapest plan
/// found (by its own local cost), or None.
pub fn adversary_destroy(
    g: &Graph,
    property: &Property,
    r: f64,
    mode: BudgetMode,
    opts: AttackOptions,
    seed: Seed,
) -> Result<Option<DeletionPlan>> {
    if !(0.0..=1.0).contains(&r) || r.is_nan() {
        return Err(Error::Parameter(format!("r = {r} not in [0, 1]")));
    }
    // The empty plan first: a host that already lacks P needs no deletions.
    let empty = DeletionPlan {
        edges: vec![],
        mode,
        r,
        heuristic: "empty",
    };
    if refute(property, g) {
        return Ok(Some(empty));
    }
    let ctx = AttackContext {
        g,
        property,
        r,
        mode,
    };
    let mut rng = seed.rng();
    let mut best: Option<DeletionPlan> = None;
    fn consider(g: &Graph, best: &mut Option<DeletionPlan>, p: Option<DeletionPlan>) {
        if let Some(plan) = p {
            debug_assert!(plan.respects_budget(g));
            let better = match best {
                None => true,
                Some(b) => plan.local_cost(g) < b.local_cost(g) - 1e-12,
            };
            if better {
                *best = Some(plan);
            }
        }
    }
    if opts.starvation {
        consider(g, &mut best, starvation_attack(&ctx));
    }
    if opts.cuts {
        consider(g, &mut best, cut_attack(&ctx, &mut rng));
    }
    if opts.random_search && best.is_none() {
        consider(g, &mut best, random_attack(&ctx, &mut rng));
    }
    Ok(best)
}

/// Exact local resilience by exhaustive deletion-set search with cost and
/// destruction pruning; gated to [`EXACT_RESILIENCE_GATE`] vertices.
pub fn exact_local_resilience(g: &Graph, property: &Property) -> Result<f64> {
    let n = g.vertex_count();
    if n > EXACT_RESILIENCE_GATE {
        return Err(Error::ExactGate {
            gate: EXACT_RESILIENCE_GATE,
            n,
        });
    }
    if refute(property, g) {
        return Ok(0.0);
    }
    let edges = g.edges();
    let degrees: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut work = g.clone();
    let mut cnt = vec![0usize; n];
    let mut best = 1.0f64 + 1e-9;

    fn dfs(
        work: &mut Graph,
        property: &Property,
        edges: &[crate::graph::Edge],
        degrees: &[usize],
        cnt: &mut [usize],
        from: usize,
        cost: f64,
        best: &mut f64,
    ) {
        for i in from..edges.len() {
            let e = edges[i];
            let c = cost
                .max((cnt[e.u] + 1) as f64 / degrees[e.u] as f64)
                .max((cnt[e.v] + 1) as f64 / degrees[e.v] as f64);
            if c >= *best - 1e-12 {
                continue;
            }
            work.remove_edge(e.u, e.v);
            cnt[e.u] += 1;
            cnt[e.v] += 1;
            if refute(property, work) {
                *best = c;
            } else {
                dfs(work, property, edges, degrees, cnt, i + 1, c, best);
            }
            cnt[e.u] -= 1;
            cnt[e.v] -= 1;
            work.add_edge(e.u, e.v);
        }
    }
    dfs(
        &mut work, property, &edges, &degrees, &mut cnt, 0, 0.0, &mut best,
    );
    Ok(best.min(1.0))
}

/// Two-sided resilience estimate: `upper` is the cheapest heuristic plan's
/// own cost; `lower` is exact (and equals the truth) only at toy sizes.
#[derive(Clone, Debug, Serialize)]
pub struct ResilienceEstimate {
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
    /// Heuristic adversaries only give upper bounds; failures to destroy
    /// are evidence, not proof.
    pub one_sided: bool,
}

/// Binary search on r driving the heuristic adversary, plus the exhaustive
/// oracle when the graph is small enough.
pub fn estimate_local_resilience(
    g: &Graph,
    property: &Property,
    precision: f64,
    seed: Seed,
) -> Result<ResilienceEstimate> {
    if !(precision > 0.0) {
        return Err(Error::Parameter("precision must be positive".into()));
    }
    let mut lo = 0.0f64;
    let mut hi = 1.0f64;
    let mut best_plan_cost: Option<f64> = None;
    let mut stream = 0u64;
    while hi - lo > precision {
        let mid = 0.5 * (lo + hi);
        let plan = adversary_destroy(
            g,
            property,
            mid,
            BudgetMode::Local,
            AttackOptions::default(),
            seed.role(stream),
        )?;
        stream += 1;
        match plan {
            Some(p) => {
                let c = p.local_cost(g);
                best_plan_cost = Some(best_plan_cost.map_or(c, |b: f64| b.min(c)));
                hi = mid.min(c);
            }
            None => lo = mid,
        }
    }
    // One last probe at the top of the bracket to pin the plan cost.
    if best_plan_cost.is_none() {
        if let Some(p) = adversary_destroy(
            g,
            property,
            1.0,
            BudgetMode::Local,
            AttackOptions::default(),
            seed.role(stream),
        )? {
            best_plan_cost = Some(p.local_cost(g));
        }
    }
    let upper = best_plan_cost.unwrap_or(1.0);
    if g.vertex_count() <= EXACT_RESILIENCE_GATE {
        let exact = exact_local_resilience(g, property)?;
        Ok(ResilienceEstimate {
            lower: exact,
            upper,
            exact: (upper - exact).abs() <= 1e-9,
            one_sided: false,
        })
    } else {
        Ok(ResilienceEstimate {
            lower: 0.0,
            upper,
            exact: false,
            one_sided: true,
        })
    }
}

/// One row per trial of a (G, p, r)-resilience experiment.
#[derive(Clone, Debug, Serialize)]
pub struct GprTrial {
    pub trial: u64,
    pub seed: u64,
    pub r: f64,
    pub destroyed: bool,
    pub heuristic: String,
}

#[derive(Clone, Debug)]
pub struct GprReport {
    pub trials: Vec<GprTrial>,
    /// Fraction of trials where every heuristic attack failed.
    pub resilient_fraction: f64,
    /// Wilson 95% interval on that fraction.
    pub ci: (f64, f64),
    /// Heuristic adversary: failures are one-sided evidence of resilience,
    /// not proof.
    pub one_sided: bool,
}

impl GprReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("trial,seed,r,destroyed,heuristic\n");
        for t in &self.trials {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                t.trial, t.seed, t.r, t.destroyed, t.heuristic
            ));
        }
        s
    }
}

fn wilson_interval(successes: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let z = 1.96f64;
    let phat = successes as f64 / n as f64;
    let nf = n as f64;
    let denom = 1.0 + z * z / nf;
    let center = (phat + z * z / (2.0 * nf)) / denom;
    let half = (z / denom) * (phat * (1.0 - phat) / nf + z * z / (4.0 * nf * nf)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Monte Carlo check of "(G, p, r)-resilient": sample G' ~ G(host, p) per
/// trial and let the adversary try to destroy P within the local budget r.
pub fn check_gpr_resilient(
    host: &Graph,
    p: f64,
    r: f64,
    property: &Property,
    trials: u64,
    seed: Seed,
) -> Result<GprReport> {
    if trials < 1 {
        return Err(Error::Parameter("need at least one trial".into()));
    }
    let mut rows = Vec::with_capacity(trials as usize);
    let mut holds = 0usize;
    for t in 0..trials {
        let trial_seed = Seed::new(seed.value, seed.stream.wrapping_add(t));
        let gp = crate::graph::sample_subgraph(host, p, trial_seed.role(1))?;
        let plan = adversary_destroy(
            &gp,
            property,
            r,
            BudgetMode::Local,
            AttackOptions::default(),
            trial_seed.role(2),
        )?;
        let destroyed = plan.is_some();
        if !destroyed {
            holds += 1;
        }
        rows.push(GprTrial {
            trial: t,
            seed: trial_seed.stream,
            r,
            destroyed,
            heuristic: plan.map(|p| p.heuristic.to_string()).unwrap_or_default(),
        });
    }
    let frac = holds as f64 / trials as f64;
    Ok(GprReport {
        trials: rows,
        resilient_fraction: frac,
        ci: wilson_interval(holds, trials as usize),
        one_sided: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn conn() -> Property {
        Property::exact(PropertyId::Connectivity)
    }

    fn ham() -> Property {
        Property::exact(PropertyId::Hamiltonicity)
    }

    #[test]
    fn r_zero_finds_nothing_on_healthy_hosts() {
        let g = Graph::complete(6);
        let plan = adversary_destroy(
            &g,
            &conn(),
            0.0,
            BudgetMode::Local,
            AttackOptions::default(),
            Seed::new(0, 0),
        )
        .unwrap();
        assert!(plan.is_none());
    }

    #[test]
    fn r_one_isolates_a_vertex() {
        let g = Graph::complete(6);
        let plan = adversary_destroy(
            &g,
            &conn(),
            1.0,
            BudgetMode::Local,
            AttackOptions::default(),
            Seed::new(0, 0),
        )
        .unwrap()
        .expect("full budget always disconnects");
        assert!(plan.respects_budget(&g));
        assert!(refute(&conn(), &plan.apply(&g)));
    }

    #[test]
    fn exact_resilience_of_complete_graphs() {
        // Connectivity: ceil(n/2) / (n-1). Hamiltonicity: the Dirac bound
        // forces floor(d/2)+1 deletions somewhere; glued-clique or balanced
        // cuts achieve it.
        let cases = [
            (4usize, 2.0 / 3.0, 2.0 / 3.0),
            (5, 3.0 / 4.0, 2.0 / 4.0),
            (6, 3.0 / 5.0, 3.0 / 5.0),
            (7, 4.0 / 6.0, 3.0 / 6.0),
        ];
        for (n, conn_r, ham_r) in cases {
            let g = Graph::complete(n);
            let c = exact_local_resilience(&g, &conn()).unwrap();
            assert!((c - conn_r).abs() < 1e-9, "conn K{n}: {c} vs {conn_r}");
            let h = exact_local_resilience(&g, &ham()).unwrap();
            assert!((h - ham_r).abs() < 1e-9, "ham K{n}: {h} vs {ham_r}");
        }
    }

    #[test]
    fn estimator_matches_oracle_on_k6() {
        let g = Graph::complete(6);
        let est = estimate_local_resilience(&g, &conn(), 1.0 / 64.0, Seed::new(3, 0)).unwrap();
        assert!(est.exact, "estimate {est:?}");
        assert!((est.upper - 3.0 / 5.0).abs() < 1e-9);
    }

    #[test]
    fn budget_soundness_property() {
        for t in 0..30u64 {
            let g = crate::graph::sample_gnp(10, 0.55, Seed::new(14, t)).unwrap();
            if !g.is_connected() {
                continue;
            }
            for r in [0.2, 0.4, 0.7] {
                if let Some(plan) = adversary_destroy(
                    &g,
                    &conn(),
                    r,
                    BudgetMode::Local,
                    AttackOptions::default(),
                    Seed::new(15, t),
                )
                .unwrap()
                {
                    assert!(plan.respects_budget(&g));
                    assert!(refute(&conn(), &plan.apply(&g)));
                    assert!(plan.local_cost(&g) <= r + 1e-9);
                }
            }
        }
    }

    #[test]
    fn global_mode_budgets_count_edges() {
        let g = Graph::complete(6);
        let plan = adversary_destroy(
            &g,
            &conn(),
            0.4,
            BudgetMode::Global,
            AttackOptions::default(),
            Seed::new(9, 0),
        )
        .unwrap();
        if let Some(p) = plan {
            assert!(p.edges.len() as f64 <= 0.4 * 15.0 + 1e-9);
        }
    }

    #[test]
    fn gpr_extremes() {
        let host = Graph::complete(12);
        // r = 0: nothing can be deleted, so the property always survives.
        let rep = check_gpr_resilient(&host, 0.9, 0.0, &conn(), 20, Seed::new(5, 0)).unwrap();
        assert_eq!(rep.resilient_fraction, 1.0);
        // r = 1 against min-degree >= 1: isolating is always within budget.
        let md = Property::exact(PropertyId::MinDegree(1));
        let rep = check_gpr_resilient(&host, 0.9, 1.0, &md, 20, Seed::new(6, 0)).unwrap();
        assert_eq!(rep.resilient_fraction, 0.0);
        assert!(rep.one_sided);
        let csv = rep.to_csv();
        assert_eq!(csv.lines().count(), 21);
    }

    #[test]
    fn cut_vertex_detection() {
        let mut g = Graph::complete(4);
        // Glue another K4 at vertex 3.
        let mut big = Graph::empty(7);
        for e in g.edges() {
            big.add_edge(e.u, e.v);
        }
        for u in 3..7 {
            for v in (u + 1)..7 {
                big.add_edge(u, v);
            }
        }
        g = big;
        assert!(has_cut_vertex(&g));
        assert!(!has_cut_vertex(&Graph::complete(5)));
        let c8 = Graph::from_edges(8, (0..8).map(|i| (i, (i + 1) % 8)));
        assert!(!has_cut_vertex(&c8));
    }
}
