//! The (1:b) Maker-Breaker game loop on a graph board.
//!
//! Breaker moves first and claims `b` free edges per turn (all remaining
//! edges when fewer than `b` are left); Maker claims one edge or skips.
//! The winner is decided by a monotone property checker on Maker's final
//! graph, either per turn or at board exhaustion.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::checkers::{Outcome, Property, Witness};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Owner {
    Free,
    Maker,
    Breaker,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Player {
    Maker,
    Breaker,
}

/// Maker's move: claim a free edge or explicitly pass.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MakerMove {
    Claim(Edge),
    Skip,
}

/// Per-edge claim state for a running game.
#[derive(Clone, Debug)]
pub struct OwnershipBoard {
    base: Graph,
    bias: u64,
    edges: Vec<Edge>,
    edge_ix: HashMap<(usize, usize), usize>,
    incident: Vec<Vec<usize>>,
    owner: Vec<Owner>,
    /// Free edge indices; order changes as edges are claimed (swap-remove),
    /// but deterministically so given the claim sequence.
    free_pool: Vec<usize>,
    pool_pos: Vec<usize>,
    maker_count: usize,
    breaker_count: usize,
    maker_deg: Vec<usize>,
    breaker_deg: Vec<usize>,
    free_deg: Vec<usize>,
    maker_turns: usize,
    breaker_turns: usize,
}

impl OwnershipBoard {
    pub fn new(base: &Graph, bias: u64) -> Result<Self> {
        if bias < 1 {
            return Err(Error::Parameter("bias b must be at least 1".into()));
        }
        let n = base.vertex_count();
        let edges = base.edges();
        let mut edge_ix = HashMap::with_capacity(edges.len());
        let mut incident = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            edge_ix.insert((e.u, e.v), i);
            incident[e.u].push(i);
            incident[e.v].push(i);
        }
        let free_deg = (0..n).map(|v| base.degree(v)).collect();
        Ok(OwnershipBoard {
            base: base.clone(),
            bias,
            owner: vec![Owner::Free; edges.len()],
            free_pool: (0..edges.len()).collect(),
            pool_pos: (0..edges.len()).collect(),
            maker_count: 0,
            breaker_count: 0,
            maker_deg: vec![0; n],
            breaker_deg: vec![0; n],
            free_deg,
            maker_turns: 0,
            breaker_turns: 0,
            edges,
            edge_ix,
            incident,
        })
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn bias(&self) -> u64 {
        self.bias
    }

    pub fn vertex_count(&self) -> usize {
        self.base.vertex_count()
    }

    pub fn edge(&self, ix: usize) -> Edge {
        self.edges[ix]
    }

    pub fn edge_index(&self, e: Edge) -> Option<usize> {
        self.edge_ix.get(&(e.u, e.v)).copied()
    }

    pub fn owner_of(&self, e: Edge) -> Option<Owner> {
        self.edge_index(e).map(|i| self.owner[i])
    }

    pub fn is_free(&self, e: Edge) -> bool {
        self.owner_of(e) == Some(Owner::Free)
    }

    /// Free edge indices in pool order (deterministic but shuffled by claims).
    pub fn free_edge_indices(&self) -> &[usize] {
        &self.free_pool
    }

    pub fn free_count(&self) -> usize {
        self.free_pool.len()
    }

    pub fn maker_count(&self) -> usize {
        self.maker_count
    }

    pub fn breaker_count(&self) -> usize {
        self.breaker_count
    }

    pub fn maker_degree(&self, v: usize) -> usize {
        self.maker_deg[v]
    }

    pub fn breaker_degree(&self, v: usize) -> usize {
        self.breaker_deg[v]
    }

    pub fn free_degree(&self, v: usize) -> usize {
        self.free_deg[v]
    }

    /// Edge indices incident to `v` (fixed lexicographic order).
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn owner_by_index(&self, ix: usize) -> Owner {
        self.owner[ix]
    }

    fn claim_ix(&mut self, ix: usize, who: Player) -> Result<()> {
        if self.owner[ix] != Owner::Free {
            let e = self.edges[ix];
            return Err(Error::Protocol {
                offender: match who {
                    Player::Maker => "maker".into(),
                    Player::Breaker => "breaker".into(),
                },
                detail: format!("edge ({}, {}) is not free", e.u, e.v),
            });
        }
        self.owner[ix] = match who {
            Player::Maker => Owner::Maker,
            Player::Breaker => Owner::Breaker,
        };
        let pos = self.pool_pos[ix];
        let last = *self.free_pool.last().unwrap();
        self.free_pool.swap_remove(pos);
        if pos < self.free_pool.len() {
            self.pool_pos[last] = pos;
        }
        self.pool_pos[ix] = usize::MAX;
        let e = self.edges[ix];
        self.free_deg[e.u] -= 1;
        self.free_deg[e.v] -= 1;
        match who {
            Player::Maker => {
                self.maker_count += 1;
                self.maker_deg[e.u] += 1;
                self.maker_deg[e.v] += 1;
            }
            Player::Breaker => {
                self.breaker_count += 1;
                self.breaker_deg[e.u] += 1;
                self.breaker_deg[e.v] += 1;
            }
        }
        Ok(())
    }

    /// Claims an edge for a player; protocol error if unknown or not free.
    pub fn claim(&mut self, e: Edge, who: Player) -> Result<()> {
        let ix = self.edge_index(e).ok_or_else(|| Error::Protocol {
            offender: match who {
                Player::Maker => "maker".into(),
                Player::Breaker => "breaker".into(),
            },
            detail: format!("edge ({}, {}) is not on the board", e.u, e.v),
        })?;
        self.claim_ix(ix, who)
    }

    pub fn graph_of(&self, who: Player) -> Graph {
        let want = match who {
            Player::Maker => Owner::Maker,
            Player::Breaker => Owner::Breaker,
        };
        Graph::from_edges(
            self.base.vertex_count(),
            self.edges
                .iter()
                .zip(&self.owner)
                .filter(|(_, &o)| o == want)
                .map(|(e, _)| (e.u, e.v)),
        )
    }

    /// Free + Maker + Breaker must always partition the edge set.
    pub fn check_conservation(&self) -> bool {
        self.free_pool.len() + self.maker_count + self.breaker_count == self.edges.len()
    }
}

/// A Maker strategy. `on_breaker_move` is called after every Breaker turn
/// with the edges he just claimed; `on_game_end` fires once when the board
/// is exhausted (or the game stops early), letting stateful strategies
/// finalize their bookkeeping.
pub trait MakerStrategy {
    fn name(&self) -> String;
    fn on_breaker_move(&mut self, _board: &OwnershipBoard, _edges: &[Edge]) {}
    fn choose(&mut self, board: &OwnershipBoard) -> MakerMove;
    fn on_game_end(&mut self, _board: &OwnershipBoard) {}
}

/// A Breaker strategy: must return exactly `min(b, free)` distinct free edges.
pub trait BreakerStrategy {
    fn name(&self) -> String;
    fn choose(&mut self, board: &OwnershipBoard) -> Vec<Edge>;
}

/// When the property checker runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WinCheck {
    /// Only on the final Maker graph (default; cheap for expensive checkers).
    AtExhaustion,
    /// After every Maker move; fine for monotone properties.
    PerTurn,
}

#[derive(Clone, Debug)]
pub struct GameConfig {
    pub bias: u64,
    pub win_check: WinCheck,
    pub trace: bool,
}

impl GameConfig {
    pub fn new(bias: u64) -> Self {
        GameConfig {
            bias,
            win_check: WinCheck::AtExhaustion,
            trace: false,
        }
    }
}

/// One line of the optional per-move trace; `edge: null` encodes a skip.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MoveRecord {
    pub turn: usize,
    pub player: char,
    pub edge: Option<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct GameResult {
    pub winner: Player,
    pub maker_graph: Graph,
    pub breaker_graph: Graph,
    pub turns: usize,
    pub certificate: Option<Witness>,
    pub trace: Option<Vec<MoveRecord>>,
}

impl GameResult {
    pub fn trace_jsonl(&self) -> Option<String> {
        self.trace.as_ref().map(|t| {
            let mut s = String::new();
            for r in t {
                s.push_str(&serde_json::to_string(r).expect("record serializes"));
                s.push('\n');
            }
            s
        })
    }
}

/// Plays a full game. Breaker first; alternation continues until the board
/// is exhausted, or until Maker's graph satisfies the property when per-turn
/// checking is on. The winner is Maker iff the checker accepts his graph.
pub fn play_game(
    g: &Graph,
    cfg: &GameConfig,
    maker: &mut dyn MakerStrategy,
    breaker: &mut dyn BreakerStrategy,
    property: &Property,
) -> Result<GameResult> {
    let mut board = OwnershipBoard::new(g, cfg.bias)?;
    let mut trace = cfg.trace.then(Vec::new);
    let mut turn = 0usize;
    let mut early: Option<Witness> = None;

    while board.free_count() > 0 {
        let expected = (cfg.bias as usize).min(board.free_count());
        let claims = breaker.choose(&board);
        if claims.len() != expected {
            return Err(Error::Protocol {
                offender: breaker.name(),
                detail: format!(
                    "breaker returned {} edges, expected {expected} ({} free)",
                    claims.len(),
                    board.free_count()
                ),
            });
        }
        for &e in &claims {
            board.claim(e, Player::Breaker).map_err(|err| match err {
                Error::Protocol { detail, .. } => Error::Protocol {
                    offender: breaker.name(),
                    detail,
                },
                other => other,
            })?;
            if let Some(t) = trace.as_mut() {
                t.push(MoveRecord {
                    turn,
                    player: 'B',
                    edge: Some((e.u, e.v)),
                });
            }
        }
        board.breaker_turns += 1;
        maker.on_breaker_move(&board, &claims);

        if board.free_count() > 0 {
            match maker.choose(&board) {
                MakerMove::Claim(e) => {
                    board.claim(e, Player::Maker).map_err(|err| match err {
                        Error::Protocol { detail, .. } => Error::Protocol {
                            offender: maker.name(),
                            detail,
                        },
                        other => other,
                    })?;
                    if let Some(t) = trace.as_mut() {
                        t.push(MoveRecord {
                            turn,
                            player: 'M',
                            edge: Some((e.u, e.v)),
                        });
                    }
                }
                MakerMove::Skip => {
                    if let Some(t) = trace.as_mut() {
                        t.push(MoveRecord {
                            turn,
                            player: 'M',
                            edge: None,
                        });
                    }
                }
            }
            board.maker_turns += 1;
        }
        turn += 1;
        debug_assert!(board.check_conservation());

        if cfg.win_check == WinCheck::PerTurn {
            if let Outcome::Yes(w) = property.check(&board.graph_of(Player::Maker)) {
                early = Some(w);
                break;
            }
        }
    }

    maker.on_game_end(&board);
    let maker_graph = board.graph_of(Player::Maker);
    let breaker_graph = board.graph_of(Player::Breaker);
    let (winner, certificate) = match early {
        Some(w) => (Player::Maker, Some(w)),
        None => match property.check(&maker_graph) {
            Outcome::Yes(w) => (Player::Maker, Some(w)),
            _ => (Player::Breaker, None),
        },
    };
    Ok(GameResult {
        winner,
        maker_graph,
        breaker_graph,
        turns: turn,
        certificate,
        trace,
    })
}

/// Re-evaluates the property on the recorded Maker graph from scratch and
/// compares with the recorded winner.
pub fn check_win_claims(result: &GameResult, property: &Property) -> bool {
    let holds = matches!(property.check(&result.maker_graph), Outcome::Yes(_));
    holds == (result.winner == Player::Maker)
}

/// Maker that always passes; useful for stressing Breaker heuristics.
#[derive(Clone, Debug, Default)]
pub struct PassiveMaker;

impl MakerStrategy for PassiveMaker {
    fn name(&self) -> String {
        "passive".into()
    }

    fn choose(&mut self, _board: &OwnershipBoard) -> MakerMove {
        MakerMove::Skip
    }
}

/// Maker that claims a uniformly random free edge.
pub struct RandomMaker {
    rng: rand_chacha::ChaCha8Rng,
}

impl RandomMaker {
    pub fn new(seed: crate::graph::Seed) -> Self {
        RandomMaker { rng: seed.rng() }
    }
}

impl MakerStrategy for RandomMaker {
    fn name(&self) -> String {
        "random".into()
    }

    fn choose(&mut self, board: &OwnershipBoard) -> MakerMove {
        use rand::Rng;
        let pool = board.free_edge_indices();
        if pool.is_empty() {
            return MakerMove::Skip;
        }
        let ix = pool[self.rng.random_range(0..pool.len())];
        MakerMove::Claim(board.edge(ix))
    }
}

/// Maker for the connectivity game: joins the pair of his components with
/// the fewest free connecting edges (the most urgent link), breaking ties
/// toward the lexicographically least edge.
#[derive(Clone, Debug)]
pub struct ConnectivityMaker {
    parent: Vec<usize>,
}

impl ConnectivityMaker {
    pub fn new(n: usize) -> Self {
        ConnectivityMaker {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, v: usize) -> usize {
        if self.parent[v] != v {
            let root = self.find(self.parent[v]);
            self.parent[v] = root;
        }
        self.parent[v]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl MakerStrategy for ConnectivityMaker {
    fn name(&self) -> String {
        "connectivity-greedy".into()
    }

    fn choose(&mut self, board: &OwnershipBoard) -> MakerMove {
        // Free edges between distinct Maker components, bucketed by the
        // component-root pair. Iterate in edge order so ties are stable.
        let mut counts: HashMap<(usize, usize), (usize, Edge)> = HashMap::new();
        for ix in 0..board.base().edge_count() {
            if board.owner_by_index(ix) != Owner::Free {
                continue;
            }
            let e = board.edge(ix);
            let (ra, rb) = (self.find(e.u), self.find(e.v));
            if ra == rb {
                continue;
            }
            let key = (ra.min(rb), ra.max(rb));
            counts
                .entry(key)
                .and_modify(|(c, _)| *c += 1)
                .or_insert((1, e));
        }
        let mut best: Option<(usize, Edge)> = None;
        for (_, &(count, first_edge)) in counts.iter() {
            let better = match best {
                None => true,
                Some((bc, be)) => {
                    count < bc || (count == bc && (first_edge.u, first_edge.v) < (be.u, be.v))
                }
            };
            if better {
                best = Some((count, first_edge));
            }
        }
        if let Some((_, e)) = best {
            self.union(e.u, e.v);
            return MakerMove::Claim(e);
        }
        // No useful edge: take the least free edge (never hurts Maker).
        board
            .free_edge_indices()
            .iter()
            .map(|&ix| board.edge(ix))
            .min_by_key(|e| (e.u, e.v))
            .map(MakerMove::Claim)
            .unwrap_or(MakerMove::Skip)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::breakers::RandomBreaker;
    use crate::checkers::PropertyId;
    use crate::graph::Seed;

    fn connectivity() -> Property {
        Property::exact(PropertyId::Connectivity)
    }

    #[test]
    fn breaker_takes_the_single_edge_of_k2() {
        let g = Graph::complete(2);
        let mut maker = ConnectivityMaker::new(2);
        let mut breaker = RandomBreaker::new(Seed::new(0, 0));
        let cfg = GameConfig::new(1);
        let r = play_game(&g, &cfg, &mut maker, &mut breaker, &connectivity()).unwrap();
        assert_eq!(r.winner, Player::Breaker);
        assert_eq!(r.maker_graph.edge_count(), 0);
        assert_eq!(r.breaker_graph.edge_count(), 1);
    }

    #[test]
    fn connectivity_maker_beats_every_breaker_line_on_k4() {
        // Exhaustive game-tree search over all Breaker plays at b = 1.
        fn recurse(board: OwnershipBoard, maker: ConnectivityMaker, lines: &mut usize) {
            if board.free_count() == 0 {
                let mg = board.graph_of(Player::Maker);
                assert!(mg.is_connected(), "maker graph not spanning: {mg:?}");
                *lines += 1;
                return;
            }
            let free: Vec<usize> = board.free_edge_indices().to_vec();
            for ix in free {
                let mut b = board.clone();
                let mut m = maker.clone();
                b.claim(b.edge(ix), Player::Breaker).unwrap();
                if b.free_count() > 0 {
                    match m.choose(&b) {
                        MakerMove::Claim(e) => b.claim(e, Player::Maker).unwrap(),
                        MakerMove::Skip => panic!("connectivity maker should never skip here"),
                    }
                }
                recurse(b, m, lines);
            }
        }
        let g = Graph::complete(4);
        let board = OwnershipBoard::new(&g, 1).unwrap();
        let maker = ConnectivityMaker::new(4);
        let mut lines = 0usize;
        recurse(board, maker, &mut lines);
        assert_eq!(lines, 48, "6 * 4 * 2 breaker choice sequences");
    }

    #[test]
    fn per_turn_and_at_exhaustion_agree_for_monotone_properties() {
        for trial in 0..20u64 {
            let g = crate::graph::sample_gnp(10, 0.6, Seed::new(42, trial)).unwrap();
            let prop = connectivity();
            let run = |check| {
                let mut maker = ConnectivityMaker::new(10);
                let mut breaker = RandomBreaker::new(Seed::new(9, trial));
                let cfg = GameConfig {
                    bias: 1,
                    win_check: check,
                    trace: false,
                };
                play_game(&g, &cfg, &mut maker, &mut breaker, &prop).unwrap()
            };
            let a = run(WinCheck::AtExhaustion);
            let b = run(WinCheck::PerTurn);
            assert_eq!(a.winner, b.winner, "trial {trial}");
        }
    }

    #[test]
    fn recheck_agrees_with_recorded_winner() {
        for trial in 0..10u64 {
            let g = crate::graph::sample_gnp(12, 0.5, Seed::new(5, trial)).unwrap();
            let prop = connectivity();
            let mut maker = ConnectivityMaker::new(12);
            let mut breaker = RandomBreaker::new(Seed::new(6, trial));
            let cfg = GameConfig::new(2);
            let r = play_game(&g, &cfg, &mut maker, &mut breaker, &prop).unwrap();
            assert!(check_win_claims(&r, &prop));
            assert!(r.maker_graph.edges().iter().all(|e| g.has_edge(e.u, e.v)));
            assert!(r.breaker_graph.edges().iter().all(|e| g.has_edge(e.u, e.v)));
            let overlap = r
                .maker_graph
                .edges()
                .iter()
                .any(|e| r.breaker_graph.has_edge(e.u, e.v));
            assert!(!overlap, "claimed graphs must be edge-disjoint");
        }
    }

    #[test]
    fn skipping_maker_is_protocol_sound_and_loses_connectivity() {
        let g = Graph::complete(5);
        let mut maker = PassiveMaker;
        let mut breaker = RandomBreaker::new(Seed::new(1, 1));
        let cfg = GameConfig::new(3);
        let r = play_game(&g, &cfg, &mut maker, &mut breaker, &connectivity()).unwrap();
        assert_eq!(r.winner, Player::Breaker);
        assert_eq!(r.maker_graph.edge_count(), 0);
        assert_eq!(r.breaker_graph.edge_count(), 10);
    }

    #[test]
    fn trace_records_every_move() {
        let g = Graph::complete(4);
        let mut maker = ConnectivityMaker::new(4);
        let mut breaker = RandomBreaker::new(Seed::new(2, 0));
        let cfg = GameConfig {
            bias: 1,
            win_check: WinCheck::AtExhaustion,
            trace: true,
        };
        let r = play_game(&g, &cfg, &mut maker, &mut breaker, &connectivity()).unwrap();
        let trace = r.trace.as_ref().unwrap();
        let claims = trace.iter().filter(|m| m.edge.is_some()).count();
        assert_eq!(claims, 6, "all K4 edges get claimed");
        let jsonl = r.trace_jsonl().unwrap();
        assert_eq!(jsonl.lines().count(), trace.len());
    }

    #[test]
    fn bias_monotonicity_is_statistical() {
        // Win fraction for Maker should not increase with Breaker's bias.
        let trials = 200u64;
        let frac = |bias: u64| -> f64 {
            let mut wins = 0usize;
            for t in 0..trials {
                let g = crate::graph::sample_gnp(12, 0.6, Seed::new(77, t)).unwrap();
                let mut maker = ConnectivityMaker::new(12);
                let mut breaker = RandomBreaker::new(Seed::new(78, t));
                let cfg = GameConfig::new(bias);
                let r = play_game(&g, &cfg, &mut maker, &mut breaker, &connectivity()).unwrap();
                if r.winner == Player::Maker {
                    wins += 1;
                }
            }
            wins as f64 / trials as f64
        };
        let (f1, f2, f3) = (frac(1), frac(2), frac(3));
        assert!(f1 + 0.02 >= f2, "f(1)={f1} f(2)={f2}");
        assert!(f2 + 0.02 >= f3, "f(2)={f2} f(3)={f3}");
    }
}
