//! Breaker adversaries. These exist to exercise Maker strategies and the
//! engine's invariants; none of them is claimed optimal.

use std::collections::HashSet;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::engine::{BreakerStrategy, Owner, OwnershipBoard};
use crate::error::{Error, Result};
use crate::graph::{Edge, Seed};

/// Which adversary to run; a spec plus seed fully determines the play.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BreakerSpec {
    Random,
    MaxMakerDegree,
    Isolator,
    ScriptedReplay(Vec<(usize, usize)>),
}

impl BreakerSpec {
    pub fn build(&self, seed: Seed) -> Box<dyn BreakerStrategy> {
        match self {
            BreakerSpec::Random => Box::new(RandomBreaker::new(seed)),
            BreakerSpec::MaxMakerDegree => Box::new(MaxMakerDegreeBreaker::new(seed)),
            BreakerSpec::Isolator => Box::new(IsolatorBreaker),
            BreakerSpec::ScriptedReplay(moves) => Box::new(ScriptedBreaker::new(moves.clone())),
        }
    }

    pub fn parse(name: &str) -> Result<BreakerSpec> {
        match name {
            "random" => Ok(BreakerSpec::Random),
            "max-maker-degree" => Ok(BreakerSpec::MaxMakerDegree),
            "isolator" => Ok(BreakerSpec::Isolator),
            other => Err(Error::Parameter(format!("unknown breaker '{other}'"))),
        }
    }
}

fn budget(board: &OwnershipBoard) -> usize {
    (board.bias() as usize).min(board.free_count())
}

/// Claims `min(b, free)` edges uniformly at random without replacement.
pub struct RandomBreaker {
    rng: ChaCha8Rng,
}

impl RandomBreaker {
    pub fn new(seed: Seed) -> Self {
        RandomBreaker { rng: seed.rng() }
    }
}

impl BreakerStrategy for RandomBreaker {
    fn name(&self) -> String {
        "random".into()
    }

    fn choose(&mut self, board: &OwnershipBoard) -> Vec<Edge> {
        let pool = board.free_edge_indices();
        let want = budget(board);
        // Floyd's algorithm: `want` distinct positions in pool order.
        let mut picked: HashSet<usize> = HashSet::with_capacity(want);
        let n = pool.len();
        for j in (n - want)..n {
            let t = self.rng.random_range(0..=j);
            let pos = if picked.contains(&t) { j } else { t };
            picked.insert(pos);
        }
        picked.into_iter().map(|p| board.edge(pool[p])).collect()
    }
}

/// Tries to surround a Maker-untouched vertex: picks the zero-Maker-degree
/// vertex with the most free edges (falling back to the overall
/// max-free-degree vertex) and claims free edges there, spilling to the
/// next such vertex when the target runs out.
pub struct IsolatorBreaker;

impl IsolatorBreaker {
    fn target_order(board: &OwnershipBoard) -> Vec<usize> {
        let n = board.vertex_count();
        let mut untouched: Vec<usize> = (0..n)
            .filter(|&v| board.maker_degree(v) == 0 && board.free_degree(v) > 0)
            .collect();
        untouched.sort_by_key(|&v| (std::cmp::Reverse(board.free_degree(v)), v));
        let mut touched: Vec<usize> = (0..n)
            .filter(|&v| board.maker_degree(v) > 0 && board.free_degree(v) > 0)
            .collect();
        touched.sort_by_key(|&v| (std::cmp::Reverse(board.free_degree(v)), v));
        untouched.extend(touched);
        untouched
    }
}

impl BreakerStrategy for IsolatorBreaker {
    fn name(&self) -> String {
        "isolator".into()
    }

    fn choose(&mut self, board: &OwnershipBoard) -> Vec<Edge> {
        let want = budget(board);
        let mut out = Vec::with_capacity(want);
        let mut taken: HashSet<usize> = HashSet::new();
        for v in Self::target_order(board) {
            if out.len() == want {
                break;
            }
            for &ix in board.incident_edges(v) {
                if out.len() == want {
                    break;
                }
                if board.owner_by_index(ix) == Owner::Free && taken.insert(ix) {
                    out.push(board.edge(ix));
                }
            }
        }
        // The target order covers every vertex with a free edge, so the
        // budget is always met.
        out
    }
}

/// Repeatedly claims a free edge at the vertex of maximum Maker degree
/// (ties to the lowest index); random free edge when the Maker graph is
/// empty or the target vertex has no free edge.
pub struct MaxMakerDegreeBreaker {
    rng: ChaCha8Rng,
}

impl MaxMakerDegreeBreaker {
    pub fn new(seed: Seed) -> Self {
        MaxMakerDegreeBreaker { rng: seed.rng() }
    }
}

impl BreakerStrategy for MaxMakerDegreeBreaker {
    fn name(&self) -> String {
        "max-maker-degree".into()
    }

    fn choose(&mut self, board: &OwnershipBoard) -> Vec<Edge> {
        let want = budget(board);
        let mut out: Vec<Edge> = Vec::with_capacity(want);
        let mut taken: HashSet<usize> = HashSet::new();
        let n = board.vertex_count();
        while out.len() < want {
            let mut pick: Option<usize> = None;
            let hot = (0..n)
                .filter(|&v| board.maker_degree(v) > 0)
                .max_by_key(|&v| (board.maker_degree(v), std::cmp::Reverse(v)));
            if let Some(v) = hot {
                pick = board
                    .incident_edges(v)
                    .iter()
                    .copied()
                    .find(|&ix| board.owner_by_index(ix) == Owner::Free && !taken.contains(&ix));
            }
            let ix = match pick {
                Some(ix) => ix,
                None => {
                    // Random fallback over free edges not yet taken this turn.
                    let pool = board.free_edge_indices();
                    loop {
                        let cand = pool[self.rng.random_range(0..pool.len())];
                        if !taken.contains(&cand) {
                            break cand;
                        }
                    }
                }
            };
            taken.insert(ix);
            out.push(board.edge(ix));
        }
        out
    }
}

/// Replays a fixed move list; errors surface through the engine when a
/// scripted edge is not free.
pub struct ScriptedBreaker {
    moves: Vec<(usize, usize)>,
    at: usize,
}

impl ScriptedBreaker {
    pub fn new(moves: Vec<(usize, usize)>) -> Self {
        ScriptedBreaker { moves, at: 0 }
    }
}

impl BreakerStrategy for ScriptedBreaker {
    fn name(&self) -> String {
        "scripted".into()
    }

    fn choose(&mut self, board: &OwnershipBoard) -> Vec<Edge> {
        let want = budget(board);
        let mut out = Vec::with_capacity(want);
        while out.len() < want && self.at < self.moves.len() {
            let (u, v) = self.moves[self.at];
            self.at += 1;
            out.push(Edge::new(u, v));
        }
        out
    }
}
