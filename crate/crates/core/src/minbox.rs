//! The auxiliary MinBox(n, D, alpha, b) game.
//!
//! A (1:b) game on `n` disjoint boxes. Maker's goal is to own at least an
//! `alpha` fraction of every box. His strategy here always claims one free
//! element from a free *active* box of maximal danger value, which keeps the
//! danger of every active box below `b(ln n + 1)` throughout the game.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Seed;

/// Guard against the activity threshold `alpha * |F|` being computed a hair
/// above an intended exact integer.
const ACTIVITY_EPS: f64 = 1e-9;

/// Slack added to the danger bound before comparisons, absorbing the
/// floating-point evaluation of `b(ln n + 1)`. Game quantities are integers.
pub const DANGER_EPS: f64 = 1e-9;

/// One box: total size and per-player claim counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxState {
    pub size: usize,
    pub maker: usize,
    pub breaker: usize,
}

impl BoxState {
    pub fn free(&self) -> usize {
        self.size - self.maker - self.breaker
    }
}

/// Full MinBox position: boxes plus the game parameters.
#[derive(Clone, Debug)]
pub struct MinBoxState {
    boxes: Vec<BoxState>,
    /// Maker's target fraction, in (0, 1).
    alpha: f64,
    /// Breaker's bias b >= 1.
    bias: u64,
    /// Integer activity thresholds: box i is active iff `maker < threshold[i]`.
    thresholds: Vec<usize>,
    free_total: usize,
}

impl MinBoxState {
    /// Creates a game on boxes of the given sizes.
    pub fn new(sizes: &[usize], alpha: f64, bias: u64) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::Parameter("need at least one box".into()));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Parameter(format!("alpha = {alpha} not in (0, 1)")));
        }
        if bias < 1 {
            return Err(Error::Parameter("bias b must be at least 1".into()));
        }
        if let Some(&z) = sizes.iter().find(|&&s| s == 0) {
            return Err(Error::Parameter(format!("box size {z} must be >= 1")));
        }
        let thresholds = sizes
            .iter()
            .map(|&s| (alpha * s as f64 - ACTIVITY_EPS).ceil() as usize)
            .collect();
        Ok(MinBoxState {
            boxes: sizes
                .iter()
                .map(|&size| BoxState {
                    size,
                    maker: 0,
                    breaker: 0,
                })
                .collect(),
            alpha,
            bias,
            thresholds,
            free_total: sizes.iter().sum(),
        })
    }

    /// Uniform sizes: the classical MinBox(n, D, alpha, b) shape.
    pub fn uniform(n: usize, d: usize, alpha: f64, bias: u64) -> Result<Self> {
        Self::new(&vec![d; n], alpha, bias)
    }

    pub fn box_count(&self) -> usize {
        self.boxes.len()
    }

    pub fn boxes(&self) -> &[BoxState] {
        &self.boxes
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn bias(&self) -> u64 {
        self.bias
    }

    pub fn free_total(&self) -> usize {
        self.free_total
    }

    /// Minimum box size (the D parameter).
    pub fn min_size(&self) -> usize {
        self.boxes.iter().map(|b| b.size).min().unwrap()
    }

    /// danger(F) = w_B(F) - b * w_M(F); may be negative.
    pub fn danger(&self, ix: usize) -> i64 {
        let b = &self.boxes[ix];
        b.breaker as i64 - self.bias as i64 * b.maker as i64
    }

    /// Active: Maker still owns fewer than `alpha * |F|` elements. The
    /// threshold is precomputed in exact integer form, so this never goes
    /// stale and never wobbles with floating point.
    pub fn is_active(&self, ix: usize) -> bool {
        self.boxes[ix].maker < self.thresholds[ix]
    }

    pub fn is_free(&self, ix: usize) -> bool {
        self.boxes[ix].free() > 0
    }

    /// The integer activity threshold: box `ix` is active iff
    /// `maker < activity_threshold(ix)`.
    pub fn activity_threshold(&self, ix: usize) -> usize {
        self.thresholds[ix]
    }

    pub fn active_count(&self) -> usize {
        (0..self.boxes.len()).filter(|&i| self.is_active(i)).count()
    }

    /// Max danger over active boxes (free or not), None when none is active.
    pub fn max_active_danger(&self) -> Option<i64> {
        (0..self.boxes.len())
            .filter(|&i| self.is_active(i))
            .map(|i| self.danger(i))
            .max()
    }

    /// The box Maker's strategy would play: the lowest-indexed free active
    /// box of maximal danger, or None when no free active box exists.
    pub fn select_maker_box(&self) -> Option<usize> {
        let mut best: Option<(i64, usize)> = None;
        for i in 0..self.boxes.len() {
            if self.is_free(i) && self.is_active(i) {
                let d = self.danger(i);
                match best {
                    Some((bd, _)) if bd >= d => {}
                    _ => best = Some((d, i)),
                }
            }
        }
        best.map(|(_, i)| i)
    }

    /// Claims `count` free elements for Maker from box `ix`.
    pub fn maker_claim(&mut self, ix: usize, count: usize) -> Result<()> {
        let b = &mut self.boxes[ix];
        if b.free() < count {
            return Err(Error::Protocol {
                offender: "maker".into(),
                detail: format!("box {ix} has {} free elements, wanted {count}", b.free()),
            });
        }
        b.maker += count;
        self.free_total -= count;
        Ok(())
    }

    /// Executes one move of Maker's strategy; returns the claimed box.
    pub fn maker_move(&mut self) -> Option<usize> {
        let ix = self.select_maker_box()?;
        self.maker_claim(ix, 1).expect("selected box must be free");
        Some(ix)
    }

    /// Applies a Breaker claim list (one entry per claimed element).
    pub fn breaker_claim(&mut self, claims: &[usize]) -> Result<()> {
        if claims.len() as u64 > self.bias {
            return Err(Error::Protocol {
                offender: "breaker".into(),
                detail: format!("claimed {} > bias {}", claims.len(), self.bias),
            });
        }
        for &ix in claims {
            if ix >= self.boxes.len() {
                return Err(Error::Protocol {
                    offender: "breaker".into(),
                    detail: format!("box index {ix} out of range"),
                });
            }
            if self.boxes[ix].free() == 0 {
                return Err(Error::Protocol {
                    offender: "breaker".into(),
                    detail: format!("box {ix} has no free element"),
                });
            }
            self.boxes[ix].breaker += 1;
            self.free_total -= 1;
        }
        Ok(())
    }

    /// Verifies the per-box bookkeeping invariants.
    pub fn check_invariants(&self) -> Result<()> {
        let mut free = 0;
        for (i, b) in self.boxes.iter().enumerate() {
            if b.maker + b.breaker > b.size {
                return Err(Error::Parameter(format!("box {i} over-claimed")));
            }
            free += b.free();
        }
        if free != self.free_total {
            return Err(Error::Parameter("free-count ledger out of sync".into()));
        }
        Ok(())
    }
}

/// The danger bound of the max-danger strategy: `b (ln n + 1)`.
pub fn danger_bound(n: usize, bias: u64) -> f64 {
    bias as f64 * ((n as f64).ln() + 1.0)
}

/// Sufficient condition for Maker to end the game with no active box:
/// `alpha < 1/(1+b)` and `D >= b(ln n + 1) / (1 - alpha(b + 1))`.
pub fn win_hypotheses_hold(n: usize, d: usize, alpha: f64, bias: u64) -> bool {
    let b = bias as f64;
    alpha < 1.0 / (1.0 + b) && (d as f64) >= danger_bound(n, bias) / (1.0 - alpha * (b + 1.0))
}

/// A Breaker for the MinBox game. Must return exactly `budget` claims, each
/// targeting a box that still has a free element when the claim is applied
/// in order.
pub trait BoxAdversary {
    fn name(&self) -> &'static str;
    fn choose(&mut self, state: &MinBoxState, budget: usize, rng: &mut ChaCha8Rng) -> Vec<usize>;
}

/// Claims uniformly random free elements (without replacement).
pub struct RandomBoxBreaker;

impl BoxAdversary for RandomBoxBreaker {
    fn name(&self) -> &'static str {
        "random"
    }

    fn choose(&mut self, state: &MinBoxState, budget: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut free: Vec<usize> = state.boxes().iter().map(|b| b.free()).collect();
        let mut remaining: usize = free.iter().sum();
        let mut out = Vec::with_capacity(budget);
        for _ in 0..budget {
            let mut r = rng.random_range(0..remaining);
            for (ix, f) in free.iter_mut().enumerate() {
                if r < *f {
                    *f -= 1;
                    remaining -= 1;
                    out.push(ix);
                    break;
                }
                r -= *f;
            }
        }
        out
    }
}

/// Pumps the currently most dangerous free active box with every claim,
/// falling back to the fullest free box when no active box is free.
pub struct ConcentrateBoxBreaker;

impl BoxAdversary for ConcentrateBoxBreaker {
    fn name(&self) -> &'static str {
        "concentrate"
    }

    fn choose(&mut self, state: &MinBoxState, budget: usize, _rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut scratch = state.clone();
        let mut out = Vec::with_capacity(budget);
        for _ in 0..budget {
            let target = scratch
                .select_maker_box()
                .or_else(|| (0..scratch.box_count()).find(|&i| scratch.is_free(i)))
                .expect("budget respects the free count");
            scratch.breaker_claim(&[target]).unwrap();
            out.push(target);
        }
        out
    }
}

/// Spreads claims round-robin over free boxes.
pub struct SpreadBoxBreaker {
    cursor: usize,
}

impl SpreadBoxBreaker {
    pub fn new() -> Self {
        SpreadBoxBreaker { cursor: 0 }
    }
}

impl Default for SpreadBoxBreaker {
    fn default() -> Self {
        Self::new()
    }
}

impl BoxAdversary for SpreadBoxBreaker {
    fn name(&self) -> &'static str {
        "spread"
    }

    fn choose(&mut self, state: &MinBoxState, budget: usize, _rng: &mut ChaCha8Rng) -> Vec<usize> {
        let n = state.box_count();
        let mut free: Vec<usize> = state.boxes().iter().map(|b| b.free()).collect();
        let mut out = Vec::with_capacity(budget);
        while out.len() < budget {
            let ix = self.cursor % n;
            self.cursor += 1;
            if free[ix] > 0 {
                free[ix] -= 1;
                out.push(ix);
            }
        }
        out
    }
}

/// Builds the named adversary. Known names: random, concentrate, spread.
pub fn box_adversary(name: &str) -> Result<Box<dyn BoxAdversary>> {
    match name {
        "random" => Ok(Box::new(RandomBoxBreaker)),
        "concentrate" => Ok(Box::new(ConcentrateBoxBreaker)),
        "spread" => Ok(Box::new(SpreadBoxBreaker::new())),
        other => Err(Error::Parameter(format!("unknown box adversary '{other}'"))),
    }
}

/// One transcript record. Breaker turns emit one record per claimed element.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinBoxRecord {
    pub turn: usize,
    pub mover: char,
    /// Claimed box, or None for Maker's pass.
    #[serde(rename = "box")]
    pub box_ix: Option<usize>,
    pub danger_max_active: Option<i64>,
}

#[derive(Clone, Debug)]
pub struct MinBoxTranscript {
    pub records: Vec<MinBoxRecord>,
    pub final_state: MinBoxState,
    /// Maximum danger value ever observed on an active box.
    pub max_active_danger_seen: i64,
    /// Per-box Maker totals at the end of the game.
    pub final_maker: Vec<usize>,
}

impl MinBoxTranscript {
    /// One JSON object per line.
    pub fn to_jsonl(&self) -> String {
        let mut s = String::new();
        for r in &self.records {
            s.push_str(&serde_json::to_string(r).expect("record serializes"));
            s.push('\n');
        }
        s
    }

    pub fn maker_wins(&self) -> bool {
        self.final_state.active_count() == 0
    }
}

/// Plays a full MinBox game, Breaker first, until no free element remains.
///
/// With `allow_extra_claims`, Maker occasionally claims up to three extra
/// elements from his chosen box; the danger bound must survive this.
pub fn play_minbox(
    mut state: MinBoxState,
    adversary: &mut dyn BoxAdversary,
    allow_extra_claims: bool,
    seed: Seed,
) -> Result<MinBoxTranscript> {
    let mut rng = seed.rng();
    let mut extra_rng = seed.role(0xE7).rng();
    let mut records = Vec::new();
    let mut max_seen = i64::MIN;
    let mut turn = 0usize;

    let mut note = |state: &MinBoxState, records: &mut Vec<MinBoxRecord>, turn, mover, bx| {
        let danger = state.max_active_danger();
        if let Some(d) = danger {
            if d > max_seen {
                max_seen = d;
            }
        }
        records.push(MinBoxRecord {
            turn,
            mover,
            box_ix: bx,
            danger_max_active: danger,
        });
    };

    while state.free_total() > 0 {
        // Breaker moves first; he takes everything left when fewer than b remain.
        let budget = (state.bias() as usize).min(state.free_total());
        let claims = adversary.choose(&state, budget, &mut rng);
        if claims.len() != budget {
            return Err(Error::Protocol {
                offender: adversary.name().into(),
                detail: format!("returned {} claims, expected {budget}", claims.len()),
            });
        }
        for &ix in &claims {
            state.breaker_claim(&[ix])?;
            note(&state, &mut records, turn, 'B', Some(ix));
        }
        if state.free_total() == 0 {
            break;
        }

        match state.maker_move() {
            Some(ix) => {
                note(&state, &mut records, turn, 'M', Some(ix));
                if allow_extra_claims && extra_rng.random_bool(0.25) {
                    let extra = (extra_rng.random_range(1..=3usize)).min(state.boxes()[ix].free());
                    if extra > 0 {
                        state.maker_claim(ix, extra)?;
                        note(&state, &mut records, turn, 'M', Some(ix));
                    }
                }
            }
            None => note(&state, &mut records, turn, 'M', None),
        }
        turn += 1;
    }

    let final_maker = state.boxes().iter().map(|b| b.maker).collect();
    Ok(MinBoxTranscript {
        records,
        max_active_danger_seen: if max_seen == i64::MIN { 0 } else { max_seen },
        final_maker,
        final_state: state,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state_with(counts: &[(usize, usize, usize)], alpha: f64, bias: u64) -> MinBoxState {
        // (size, maker, breaker) triples for hand-built positions.
        let sizes: Vec<usize> = counts.iter().map(|c| c.0).collect();
        let mut s = MinBoxState::new(&sizes, alpha, bias).unwrap();
        for (i, &(_, m, b)) in counts.iter().enumerate() {
            s.maker_claim(i, m).unwrap();
            for _ in 0..b {
                s.breaker_claim(&[i]).unwrap();
            }
        }
        s
    }

    #[test]
    fn danger_examples() {
        let s = state_with(&[(20, 0, 0)], 0.5, 3);
        assert_eq!(s.danger(0), 0);
        let s = state_with(&[(20, 1, 5)], 0.5, 2);
        assert_eq!(s.danger(0), 3);
        let s = state_with(&[(20, 4, 0)], 0.5, 2);
        assert_eq!(s.danger(0), -8);
    }

    #[test]
    fn maker_prefers_max_danger_breaking_ties_low() {
        // dangers (2, 7, 7): boxes all free and active.
        let s = state_with(&[(30, 0, 2), (30, 0, 7), (30, 0, 7)], 0.9, 1);
        assert_eq!(s.select_maker_box(), Some(1));
    }

    #[test]
    fn maker_passes_without_free_active_box() {
        // Single box already at its target fraction: inactive.
        let mut s = state_with(&[(10, 4, 0)], 0.4, 1);
        assert!(!s.is_active(0));
        assert_eq!(s.maker_move(), None);
    }

    #[test]
    fn single_free_active_box_is_chosen() {
        let mut s = state_with(&[(10, 4, 0), (10, 0, 0)], 0.4, 1);
        assert_eq!(s.maker_move(), Some(1));
    }

    #[test]
    fn breaker_claim_edge_cases() {
        let mut s = state_with(&[(3, 0, 0)], 0.5, 2);
        s.breaker_claim(&[]).unwrap();
        assert_eq!(s.boxes()[0].breaker, 0);
        s.breaker_claim(&[0, 0]).unwrap();
        assert_eq!(s.boxes()[0].breaker, 2);
        s.maker_claim(0, 1).unwrap();
        // Box exhausted now.
        assert!(s.breaker_claim(&[0]).is_err());
    }

    #[test]
    fn activity_threshold_handles_float_dust() {
        // alpha * size = 0.1 * 40 which rounds up in f64; threshold must be 4.
        let mut s = MinBoxState::new(&[40], 0.1, 1).unwrap();
        s.maker_claim(0, 3).unwrap();
        assert!(s.is_active(0));
        s.maker_claim(0, 1).unwrap();
        assert!(!s.is_active(0), "w_M = 4 = alpha|F| must be inactive");
    }

    #[test]
    fn single_box_game_reaches_target() {
        // n=1, b=1, alpha=0.4, |F|=10: the adversary's play is forced, and the
        // win hypotheses hold (D = 10 >= 1*(ln 1 + 1)/(1 - 0.8) = 5).
        assert!(win_hypotheses_hold(1, 10, 0.4, 1));
        let s = MinBoxState::uniform(1, 10, 0.4, 1).unwrap();
        let mut adv = RandomBoxBreaker;
        let t = play_minbox(s, &mut adv, false, Seed::new(1, 0)).unwrap();
        assert!(t.final_maker[0] >= 4);
        assert!(t.maker_wins());
        // n = 1: bound is b(ln 1 + 1) = 1.
        assert!(t.max_active_danger_seen as f64 <= danger_bound(1, 1) + DANGER_EPS);
    }

    #[test]
    fn danger_bound_holds_across_adversaries_and_extras() {
        for n in [5usize, 40] {
            for bias in [1u64, 3] {
                for adv_name in ["random", "concentrate", "spread"] {
                    for extras in [false, true] {
                        for trial in 0..30u64 {
                            let s = MinBoxState::uniform(n, 12, 0.3, bias).unwrap();
                            let mut adv = box_adversary(adv_name).unwrap();
                            let t = play_minbox(s, adv.as_mut(), extras, Seed::new(7, trial))
                                .unwrap();
                            let bound = danger_bound(n, bias) + DANGER_EPS;
                            assert!(
                                (t.max_active_danger_seen as f64) <= bound,
                                "danger {} > bound {bound} (n={n} b={bias} adv={adv_name} extras={extras} trial={trial})",
                                t.max_active_danger_seen
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn win_condition_holds_under_hypotheses() {
        // alpha < 1/(1+b), D >= b(ln n + 1)/(1 - alpha(b+1)).
        let n = 25;
        let bias = 2u64;
        let alpha = 0.25; // < 1/3
        let d = (danger_bound(n, bias) / (1.0 - alpha * 3.0)).ceil() as usize;
        assert!(win_hypotheses_hold(n, d, alpha, bias));
        for adv_name in ["random", "concentrate", "spread"] {
            for trial in 0..50u64 {
                let s = MinBoxState::uniform(n, d, alpha, bias).unwrap();
                let mut adv = box_adversary(adv_name).unwrap();
                let t = play_minbox(s, adv.as_mut(), false, Seed::new(3, trial)).unwrap();
                assert!(t.maker_wins(), "adv={adv_name} trial={trial}");
            }
        }
    }

    #[test]
    fn heterogeneous_sizes_are_supported() {
        let sizes = [8usize, 20, 12, 40];
        let s = MinBoxState::new(&sizes, 0.3, 2).unwrap();
        assert_eq!(s.min_size(), 8);
        let mut adv = RandomBoxBreaker;
        let t = play_minbox(s, &mut adv, false, Seed::new(11, 0)).unwrap();
        t.final_state.check_invariants().unwrap();
        assert_eq!(t.final_state.free_total(), 0);
    }

    #[test]
    fn transcript_serializes_to_jsonl() {
        let s = MinBoxState::uniform(3, 4, 0.4, 1).unwrap();
        let mut adv = RandomBoxBreaker;
        let t = play_minbox(s, &mut adv, false, Seed::new(5, 0)).unwrap();
        let text = t.to_jsonl();
        assert_eq!(text.lines().count(), t.records.len());
        for line in text.lines() {
            let r: MinBoxRecord = serde_json::from_str(line).unwrap();
            assert!(r.mover == 'B' || r.mover == 'M');
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(MinBoxState::uniform(0, 5, 0.3, 1).is_err());
        assert!(MinBoxState::uniform(2, 5, 0.0, 1).is_err());
        assert!(MinBoxState::uniform(2, 5, 1.0, 1).is_err());
        assert!(MinBoxState::uniform(2, 5, 0.3, 0).is_err());
        assert!(MinBoxState::uniform(2, 0, 0.3, 1).is_err());
    }
}
