//! Maker's randomized edge-exposure strategy.
//!
//! Maker builds a hidden random subgraph G' of the host by tossing a biased
//! coin per edge ("exposing" it), claiming each revealed G'-edge that is
//! still free. A coupled MinBox game with one box per vertex (size four
//! times the degree, target fraction p/2, bias 2b) decides which vertex to
//! expose from: always the one whose box has the highest danger value. An
//! exposure round with no success is a type-I failure; a success landing on
//! a Breaker edge is a type-II failure. When no free active box remains,
//! the leftover pairs are exposed in one sweep (charging type-II failures
//! with probability p each) and Maker stops playing.

use std::collections::BTreeSet;

use rand_chacha::ChaCha8Rng;

use crate::engine::{MakerMove, MakerStrategy, OwnershipBoard};
use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, Seed};
use crate::minbox::MinBoxState;

/// How much of the theorem's hypothesis set to enforce at construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HypothesisCheck {
    /// The full hypothesis set: 0 < p < 1, 0 < eps <= 1/100,
    /// delta(G) >= 10 ln n / (eps p), and floor(eps/(20p)) >= 1.
    /// Unsatisfiable below a few thousand vertices; kept for fidelity.
    Strict,
    /// Desk-scale surrogate: 0 < p < 1, 0 < eps <= 1, bias >= 1, and the
    /// charge-safety condition p <= 3/4 - 1/(4 delta) under which no box
    /// can ever be exhausted.
    Surrogate,
    /// Only operational sanity (p in (0,1), bias >= 1, delta >= 1).
    Off,
}

#[derive(Clone, Copy, Debug)]
pub struct ExposureParams {
    /// Exposure probability for G'.
    pub p: f64,
    /// Resilience margin.
    pub eps: f64,
    /// Game bias; None derives floor(eps / (20 p)).
    pub bias: Option<u64>,
    pub check: HypothesisCheck,
}

impl ExposureParams {
    pub fn strict(p: f64, eps: f64) -> Self {
        ExposureParams {
            p,
            eps,
            bias: None,
            check: HypothesisCheck::Strict,
        }
    }

    pub fn surrogate(p: f64, eps: f64, bias: u64) -> Self {
        ExposureParams {
            p,
            eps,
            bias: Some(bias),
            check: HypothesisCheck::Surrogate,
        }
    }

    /// The bias the theorem derives from (p, eps).
    pub fn derived_bias(&self) -> u64 {
        (self.eps / (20.0 * self.p)).floor() as u64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Stage {
    One,
    Done,
}

/// The strategy state. One instance plays one game.
pub struct ExposureMaker {
    host: Graph,
    p: f64,
    eps: f64,
    bias: u64,
    /// Unexposed-neighbor sets U_v; symmetric.
    unexposed: Vec<BTreeSet<usize>>,
    f1: Vec<u8>,
    f2_stage1: Vec<u32>,
    /// Type-II failures counted at both endpoints (incidence counting).
    f2_incident_stage1: Vec<u32>,
    f2_stage2: Vec<u32>,
    sim: MinBoxState,
    g_prime: Graph,
    d_maker: Vec<usize>,
    d_breaker: Vec<usize>,
    stage: Stage,
    rng: ChaCha8Rng,
    /// Whether the Breaker-degree gate is a proven consequence of the
    /// parameters (then a violation is an internal error) or merely counted.
    gate_provable: bool,
    gate_violations: u64,
    /// Vertices with a nonempty U set when the final sweep started, or None
    /// while still in stage one.
    stage2_residue: Option<usize>,
    /// Whether the final sweep ran at board exhaustion rather than by the
    /// no-free-active-box trigger.
    finalized_at_exhaustion: bool,
    successes: u64,
    successes_first_coin: u64,
}

impl ExposureMaker {
    /// Validates the hypotheses for the chosen checking level and sets up
    /// the unexposed sets and the coupled MinBox game. Errors name the
    /// failed inequality.
    pub fn new(host: &Graph, params: &ExposureParams, seed: Seed) -> Result<Self> {
        let n = host.vertex_count();
        if n < 2 {
            return Err(Error::Config("need at least two vertices".into()));
        }
        let p = params.p;
        let eps = params.eps;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Config(format!("0 < p < 1 fails: p = {p}")));
        }
        let delta = host.min_degree();
        if delta < 1 {
            return Err(Error::Config(
                "delta(G) >= 1 fails: the host has an isolated vertex".into(),
            ));
        }
        let derived = params.derived_bias();
        let bias = params.bias.unwrap_or(derived);
        match params.check {
            HypothesisCheck::Strict => {
                if !(eps > 0.0 && eps <= 0.01) {
                    return Err(Error::Config(format!("0 < eps <= 1/100 fails: eps = {eps}")));
                }
                let need = 10.0 * (n as f64).ln() / (eps * p);
                if (delta as f64) < need {
                    return Err(Error::Config(format!(
                        "delta(G) >= 10 ln n/(eps p) fails: {delta} < {need:.1}"
                    )));
                }
                if derived < 1 {
                    return Err(Error::Config(format!(
                        "floor(eps/(20p)) >= 1 fails: floor({:.4}) = {derived}",
                        eps / (20.0 * p)
                    )));
                }
                if bias != derived {
                    return Err(Error::Config(format!(
                        "bias override {bias} != floor(eps/(20p)) = {derived}"
                    )));
                }
            }
            HypothesisCheck::Surrogate => {
                if !(eps > 0.0 && eps <= 1.0) {
                    return Err(Error::Config(format!("0 < eps <= 1 fails: eps = {eps}")));
                }
                if bias < 1 {
                    return Err(Error::Config(format!("bias >= 1 fails: bias = {bias}")));
                }
                let cap = 0.75 - 1.0 / (4.0 * delta as f64);
                if p > cap {
                    return Err(Error::Config(format!(
                        "charge safety p <= 3/4 - 1/(4 delta) fails: {p} > {cap:.4}"
                    )));
                }
            }
            HypothesisCheck::Off => {
                if bias < 1 {
                    return Err(Error::Config(format!("bias >= 1 fails: bias = {bias}")));
                }
            }
        }

        let sizes: Vec<usize> = (0..n).map(|v| 4 * host.degree(v)).collect();
        let sim = MinBoxState::new(&sizes, p / 2.0, 2 * bias)?;
        let unexposed: Vec<BTreeSet<usize>> =
            (0..n).map(|v| host.neighbors(v).collect()).collect();

        // The gate d_B(v) < eps d(v)/4 while the box is active is provable
        // when eps d/4 exceeds 2b (2pd + ln n + 1) for every degree.
        let two_b = 2.0 * bias as f64;
        let gate_provable = (0..n).all(|v| {
            let d = host.degree(v) as f64;
            eps * d / 4.0 > two_b * (2.0 * p * d + (n as f64).ln() + 1.0) + 1e-9
        });

        Ok(ExposureMaker {
            host: host.clone(),
            p,
            eps,
            bias,
            unexposed,
            f1: vec![0; n],
            f2_stage1: vec![0; n],
            f2_incident_stage1: vec![0; n],
            f2_stage2: vec![0; n],
            sim,
            g_prime: Graph::empty(n),
            d_maker: vec![0; n],
            d_breaker: vec![0; n],
            stage: Stage::One,
            rng: seed.rng(),
            gate_provable,
            gate_violations: 0,
            stage2_residue: None,
            finalized_at_exhaustion: false,
            successes: 0,
            successes_first_coin: 0,
        })
    }

    pub fn game_bias(&self) -> u64 {
        self.bias
    }

    pub fn gate_provable(&self) -> bool {
        self.gate_provable
    }

    pub fn gate_violations(&self) -> u64 {
        self.gate_violations
    }

    pub fn g_prime(&self) -> &Graph {
        &self.g_prime
    }

    pub fn sim(&self) -> &MinBoxState {
        &self.sim
    }

    pub fn unexposed_total(&self) -> usize {
        self.unexposed.iter().map(|s| s.len()).sum()
    }

    pub fn stage2_residue(&self) -> Option<usize> {
        self.stage2_residue
    }

    pub fn finalized_at_exhaustion(&self) -> bool {
        self.finalized_at_exhaustion
    }

    /// Fraction of stage-1 successes that came on the first coin toss.
    pub fn first_coin_success_stats(&self) -> (u64, u64) {
        (self.successes_first_coin, self.successes)
    }

    fn gate_check(&mut self, v: usize) {
        if self.sim.is_active(v) {
            let limit = self.eps * self.host.degree(v) as f64 / 4.0;
            if self.d_breaker[v] as f64 >= limit - 1e-9 {
                if self.gate_provable {
                    panic!(
                        "breaker-degree gate violated at vertex {v}: d_B = {} >= {limit}",
                        self.d_breaker[v]
                    );
                }
                self.gate_violations += 1;
            }
        }
    }

    /// Removes the exposed pair (v, u) from both unexposed sets.
    fn mark_exposed(&mut self, v: usize, u: usize) {
        let a = self.unexposed[v].remove(&u);
        let b = self.unexposed[u].remove(&v);
        debug_assert!(a && b, "edge ({v}, {u}) exposed twice");
    }

    fn type_one_failure(&mut self, v: usize) {
        self.f1[v] += 1;
        assert!(self.f1[v] <= 1, "second type-I failure at vertex {v}");
        let want = self.sim.activity_threshold(v).saturating_sub(1);
        let extra = want.min(self.sim.boxes()[v].free());
        if extra > 0 {
            self.sim
                .maker_claim(v, extra)
                .expect("free count was just read");
        }
    }

    /// The final exposure sweep. Remaining pairs get their coin; successes
    /// are charged as type-II failures at both endpoints. Afterwards Maker
    /// skips every move.
    fn stage_two(&mut self) {
        let n = self.host.vertex_count();
        self.stage2_residue = Some((0..n).filter(|&v| !self.unexposed[v].is_empty()).count());
        for v in 0..n {
            let partners: Vec<usize> = self.unexposed[v].range((v + 1)..).copied().collect();
            for u in partners {
                self.mark_exposed(v, u);
                if rand::Rng::random_bool(&mut self.rng, self.p) {
                    self.g_prime.add_edge(v, u);
                    self.f2_stage2[v] += 1;
                    self.f2_stage2[u] += 1;
                }
            }
        }
        debug_assert_eq!(self.unexposed_total(), 0);
        self.stage = Stage::Done;
    }

    /// Internal consistency checks used by tests; panics on violation.
    pub fn check_invariants(&self) {
        let n = self.host.vertex_count();
        for v in 0..n {
            assert!(self.f1[v] <= 1);
            for &u in &self.unexposed[v] {
                assert!(self.host.has_edge(v, u), "U_{v} strayed off N({v})");
                assert!(self.unexposed[u].contains(&v), "U sets asymmetric");
            }
            let b = self.sim.boxes()[v];
            let d = self.host.degree(v);
            assert!(b.breaker <= d, "w_B({v}) > d({v})");
            assert!(
                (b.maker as f64) < 1.0 + (1.0 + 2.0 * self.p) * d as f64,
                "w_M({v}) = {} out of range",
                b.maker
            );
            assert!(b.maker + b.breaker <= 4 * d, "box {v} over-claimed");
            // Exposed successes at v partition into Maker edges and
            // incident type-II failures.
            let dgp = self.g_prime.degree(v);
            assert_eq!(
                dgp,
                self.d_maker[v]
                    + self.f2_incident_stage1[v] as usize
                    + self.f2_stage2[v] as usize,
                "G' degree partition broken at {v}"
            );
        }
        assert!(self.g_prime.edges().iter().all(|e| self.host.has_edge(e.u, e.v)));
    }

    /// Per-vertex summary; `include_stage2_failures` folds the final-sweep
    /// type-II charges into the reported counter (they touch bookkeeping
    /// only, never Maker's graph).
    pub fn final_report(&self, include_stage2_failures: bool) -> ExposureReport {
        let n = self.host.vertex_count();
        let rows = (0..n)
            .map(|v| {
                let d_g = self.host.degree(v);
                let f2 = self.f2_stage1[v] + if include_stage2_failures {
                    self.f2_stage2[v]
                } else {
                    0
                };
                let d_gprime = self.g_prime.degree(v);
                VertexReport {
                    vertex: v,
                    d_g,
                    d_gprime,
                    d_maker: self.d_maker[v],
                    f1: self.f1[v],
                    f2_stage1: self.f2_stage1[v],
                    f2_stage2: self.f2_stage2[v],
                    flag_f2: f2 as f64 > 0.9 * self.eps * d_g as f64 * self.p + 1e-9,
                    flag_gprime_low: (d_gprime as f64) < 0.9 * d_g as f64 * self.p - 1e-9,
                }
            })
            .collect();
        ExposureReport {
            rows,
            p: self.p,
            eps: self.eps,
            bias: self.bias,
            stage2_residue_vertices: self.stage2_residue.unwrap_or(0),
            gate_provable: self.gate_provable,
            gate_violations: self.gate_violations,
            include_stage2_failures,
        }
    }
}

impl MakerStrategy for ExposureMaker {
    fn name(&self) -> String {
        "exposure".into()
    }

    fn on_breaker_move(&mut self, _board: &OwnershipBoard, edges: &[Edge]) {
        if self.stage == Stage::Done {
            return;
        }
        for e in edges {
            self.d_breaker[e.u] += 1;
            self.d_breaker[e.v] += 1;
            // One free element from both endpoint boxes per Breaker edge.
            // Claim-1 says neither box can be exhausted here.
            self.sim
                .breaker_claim(&[e.u])
                .unwrap_or_else(|_| panic!("box {} exhausted by a breaker charge", e.u));
            self.sim
                .breaker_claim(&[e.v])
                .unwrap_or_else(|_| panic!("box {} exhausted by a breaker charge", e.v));
            self.gate_check(e.u);
            self.gate_check(e.v);
        }
    }

    fn choose(&mut self, board: &OwnershipBoard) -> MakerMove {
        if self.stage == Stage::Done {
            return MakerMove::Skip;
        }
        let Some(v) = self.sim.select_maker_box() else {
            self.stage_two();
            return MakerMove::Skip;
        };
        self.sim.maker_claim(v, 1).expect("selected box is free");

        // Expose v's unexposed neighbors in ascending order until the first
        // coin success.
        let order: Vec<usize> = self.unexposed[v].iter().copied().collect();
        for (k, &u) in order.iter().enumerate() {
            if !rand::Rng::random_bool(&mut self.rng, self.p) {
                continue;
            }
            // Success at the (k+1)-st toss: edge vu enters G'; everything
            // up to and including it is now exposed.
            self.successes += 1;
            if k == 0 {
                self.successes_first_coin += 1;
            }
            for &w in &order[..=k] {
                self.mark_exposed(v, w);
            }
            self.g_prime.add_edge(v, u);
            let e = Edge::new(v, u);
            return if board.is_free(e) {
                self.sim
                    .maker_claim(u, 1)
                    .unwrap_or_else(|_| panic!("box {u} exhausted on an edge claim"));
                self.d_maker[v] += 1;
                self.d_maker[u] += 1;
                MakerMove::Claim(e)
            } else {
                self.f2_stage1[v] += 1;
                self.f2_incident_stage1[v] += 1;
                self.f2_incident_stage1[u] += 1;
                MakerMove::Skip
            };
        }
        // No success (vacuously so when U_v was empty): type-I failure.
        for &w in &order {
            self.mark_exposed(v, w);
        }
        self.type_one_failure(v);
        MakerMove::Skip
    }

    fn on_game_end(&mut self, _board: &OwnershipBoard) {
        if self.stage == Stage::One {
            // The board ran out before the simulated game did; finish the
            // exposure so G' is complete and reports are well-defined.
            self.finalized_at_exhaustion = true;
            self.stage_two();
        }
    }
}

/// One row of the final per-vertex report.
#[derive(Clone, Debug, serde::Serialize)]
pub struct VertexReport {
    pub vertex: usize,
    pub d_g: usize,
    pub d_gprime: usize,
    pub d_maker: usize,
    pub f1: u8,
    pub f2_stage1: u32,
    pub f2_stage2: u32,
    /// f_II(v) exceeded (9/10) eps d_G(v) p.
    pub flag_f2: bool,
    /// d_G'(v) fell below (9/10) d_G(v) p.
    pub flag_gprime_low: bool,
}

#[derive(Clone, Debug)]
pub struct ExposureReport {
    pub rows: Vec<VertexReport>,
    pub p: f64,
    pub eps: f64,
    pub bias: u64,
    pub stage2_residue_vertices: usize,
    pub gate_provable: bool,
    pub gate_violations: u64,
    pub include_stage2_failures: bool,
}

impl ExposureReport {
    pub fn any_flag(&self) -> bool {
        self.rows.iter().any(|r| r.flag_f2 || r.flag_gprime_low)
    }

    pub fn any_f2_flag(&self) -> bool {
        self.rows.iter().any(|r| r.flag_f2)
    }

    pub fn max_f2_ratio(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| {
                let f2 = r.f2_stage1
                    + if self.include_stage2_failures {
                        r.f2_stage2
                    } else {
                        0
                    };
                f2 as f64 / (r.d_g as f64 * self.p).max(1e-12)
            })
            .fold(0.0, f64::max)
    }

    pub fn min_maker_degree(&self) -> usize {
        self.rows.iter().map(|r| r.d_maker).min().unwrap_or(0)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(
            "vertex,d_g,d_gprime,d_maker,f1,f2_stage1,f2_stage2,flag_f2,flag_gprime_low\n",
        );
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.vertex,
                r.d_g,
                r.d_gprime,
                r.d_maker,
                r.f1,
                r.f2_stage1,
                r.f2_stage2,
                r.flag_f2,
                r.flag_gprime_low
            ));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::breakers::BreakerSpec;
    use crate::checkers::{Property, PropertyId};
    use crate::engine::{play_game, GameConfig};
    use crate::graph::sample_gnp;

    fn run_game(
        host: &Graph,
        params: &ExposureParams,
        breaker: &BreakerSpec,
        seed: Seed,
    ) -> ExposureMaker {
        let mut maker = ExposureMaker::new(host, params, seed.role(1)).unwrap();
        let mut b = breaker.build(seed.role(2));
        let cfg = GameConfig::new(maker.game_bias());
        let prop = Property::exact(PropertyId::MinDegree(0));
        play_game(host, &cfg, &mut maker, b.as_mut(), &prop).unwrap();
        maker
    }

    #[test]
    fn strict_mode_rejects_desk_scale_configs_by_name() {
        let host = Graph::complete(50);
        let err = ExposureMaker::new(&host, &ExposureParams::strict(0.2, 0.01), Seed::new(0, 0))
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("10 ln n"), "unexpected message: {msg}");
    }

    #[test]
    fn init_postconditions() {
        let host = sample_gnp(40, 0.6, Seed::new(8, 0)).unwrap();
        let maker = ExposureMaker::new(
            &host,
            &ExposureParams::surrogate(0.05, 1.0, 1),
            Seed::new(8, 1),
        )
        .unwrap();
        assert_eq!(maker.unexposed_total(), 2 * host.edge_count());
        for v in 0..40 {
            assert!(maker.sim.is_active(v), "every box starts active");
            assert_eq!(maker.sim.boxes()[v].size, 4 * host.degree(v));
        }
    }

    #[test]
    fn breaker_charges_touch_both_boxes() {
        let host = Graph::complete(6);
        let mut maker = ExposureMaker::new(
            &host,
            &ExposureParams::surrogate(0.05, 1.0, 1),
            Seed::new(1, 0),
        )
        .unwrap();
        let board = crate::engine::OwnershipBoard::new(&host, 1).unwrap();
        maker.on_breaker_move(&board, &[]);
        assert_eq!(maker.sim.boxes()[0].breaker, 0);
        maker.on_breaker_move(&board, &[Edge::new(0, 1)]);
        assert_eq!(maker.sim.boxes()[0].breaker, 1);
        assert_eq!(maker.sim.boxes()[1].breaker, 1);
        for _ in 0..3 {
            maker.on_breaker_move(&board, &[Edge::new(0, 2)]);
        }
        assert_eq!(maker.sim.boxes()[0].breaker, 4);
    }

    #[test]
    fn full_games_keep_deterministic_invariants() {
        let host = Graph::complete(24);
        for spec in [
            BreakerSpec::Random,
            BreakerSpec::Isolator,
            BreakerSpec::MaxMakerDegree,
        ] {
            for t in 0..10u64 {
                let maker = run_game(
                    &host,
                    &ExposureParams::surrogate(0.04, 1.0, 1),
                    &spec,
                    Seed::new(500, t),
                );
                maker.check_invariants();
                assert_eq!(maker.unexposed_total(), 0, "exposure incomplete");
            }
        }
    }

    #[test]
    fn exposure_is_deterministic_per_seed() {
        let host = Graph::complete(20);
        let p = ExposureParams::surrogate(0.05, 1.0, 1);
        let a = run_game(&host, &p, &BreakerSpec::Random, Seed::new(77, 3));
        let b = run_game(&host, &p, &BreakerSpec::Random, Seed::new(77, 3));
        assert_eq!(a.g_prime(), b.g_prime());
        assert_eq!(a.final_report(true).to_csv(), b.final_report(true).to_csv());
    }

    #[test]
    fn near_certain_coins_succeed_on_the_first_toss() {
        // p -> 1: the first unexposed neighbor is revealed immediately, so
        // every stage-1 success happens at k = 1.
        let host = Graph::complete(60);
        let params = ExposureParams {
            p: 1.0 - 1e-12,
            eps: 1.0,
            bias: Some(1),
            check: HypothesisCheck::Off,
        };
        let maker = run_game(&host, &params, &BreakerSpec::Random, Seed::new(31, 0));
        let (first, total) = maker.first_coin_success_stats();
        assert!(total > 0);
        assert_eq!(first, total, "a coin failed at p ~ 1");
    }

    #[test]
    fn gprime_marginals_match_p() {
        // Across seeded games each host edge should land in G' about p of
        // the time; 4-sigma binomial band on the total count.
        let host = Graph::complete(16);
        let p = 0.3;
        let trials = 200u64;
        let mut total = 0usize;
        for t in 0..trials {
            let params = ExposureParams {
                p,
                eps: 1.0,
                bias: Some(1),
                check: HypothesisCheck::Surrogate,
            };
            let maker = run_game(&host, &params, &BreakerSpec::Random, Seed::new(808, t));
            total += maker.g_prime().edge_count();
        }
        let n_coins = (trials as f64) * host.edge_count() as f64;
        let mu = n_coins * p;
        let sd = (n_coins * p * (1.0 - p)).sqrt();
        assert!(
            (total as f64 - mu).abs() <= 4.0 * sd,
            "total {total} vs mean {mu} (sd {sd})"
        );
    }

    #[test]
    fn report_flags_and_csv_round_trip() {
        let host = Graph::complete(24);
        let maker = run_game(
            &host,
            &ExposureParams::surrogate(0.04, 1.0, 1),
            &BreakerSpec::Random,
            Seed::new(12, 0),
        );
        let rep = maker.final_report(true);
        let csv = rep.to_csv();
        assert_eq!(csv.lines().count(), 25);
        assert!(csv.starts_with("vertex,"));
        let rep2 = maker.final_report(false);
        for (a, b) in rep.rows.iter().zip(&rep2.rows) {
            assert_eq!(a.d_maker, b.d_maker);
            // Excluding the sweep can only lower the flagged counter.
            assert!(a.f2_stage1 + a.f2_stage2 >= b.f2_stage1);
        }
    }

    #[test]
    fn stage_two_empties_every_unexposed_set() {
        let host = sample_gnp(30, 0.5, Seed::new(21, 0)).unwrap();
        let maker = run_game(
            &host,
            &ExposureParams::surrogate(0.05, 1.0, 1),
            &BreakerSpec::Random,
            Seed::new(21, 1),
        );
        assert_eq!(maker.unexposed_total(), 0);
        assert!(maker.stage2_residue().is_some());
    }
}
