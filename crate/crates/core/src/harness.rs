//! Monte Carlo experiment driver: scenario configs, deterministic parallel
//! trials, JSONL/CSV persistence, and the binomial tail utility.
//!
//! Reproducibility contract: trial i runs on stream-id i of the master
//! seed, records are merged in trial order, and nothing nondeterministic
//! (wall time, thread interleaving) is serialized. The same config yields
//! byte-identical record files at any thread count.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::breakers::BreakerSpec;
use crate::checkers::{parse_property, CheckMode, Property, PropertyId};
use crate::engine::{play_game, ConnectivityMaker, GameConfig, PassiveMaker, Player, RandomMaker};
use crate::error::{Error, Result};
use crate::exposure::{ExposureMaker, ExposureParams, HypothesisCheck};
use crate::graph::{sample_gnp, sample_subgraph, Graph, Seed};
use crate::minbox::{box_adversary, play_minbox, MinBoxState};
use crate::posa;
use crate::resilience::{adversary_destroy, AttackOptions, BudgetMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    MinBox,
    Game,
    Resilience,
    Boosters,
    TreeGame,
}

impl Scenario {
    pub fn parse(s: &str) -> Result<Scenario> {
        match s {
            "minbox" => Ok(Scenario::MinBox),
            "game" => Ok(Scenario::Game),
            "resilience" => Ok(Scenario::Resilience),
            "boosters" => Ok(Scenario::Boosters),
            "tree-game" => Ok(Scenario::TreeGame),
            other => Err(Error::Parameter(format!("unknown scenario '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::MinBox => "minbox",
            Scenario::Game => "game",
            Scenario::Resilience => "resilience",
            Scenario::Boosters => "boosters",
            Scenario::TreeGame => "tree-game",
        }
    }
}

/// Everything a run needs; serializes losslessly as flat key=value text.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub n: usize,
    pub p: f64,
    pub eps: f64,
    pub bias: u64,
    pub trials: u64,
    pub seed: u64,
    pub property: String,
    pub check_mode: String,
    pub maker: String,
    pub breaker: String,
    pub host_path: Option<String>,
    pub out_dir: Option<String>,
    // MinBox knobs.
    pub box_size: usize,
    pub alpha: f64,
    pub adversary: String,
    pub extra_claims: bool,
    // Resilience knobs.
    pub r: f64,
    // Booster diagnostics.
    pub expansion_k: usize,
    // Tree game knobs.
    pub tree_delta: usize,
    pub tree_alpha: f64,
    pub trees_per_game: usize,
    pub reservoir_fraction: f64,
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario) -> Self {
        ExperimentConfig {
            scenario,
            n: 32,
            p: 0.05,
            eps: 1.0,
            bias: 1,
            trials: 10,
            seed: 1,
            property: "connectivity".into(),
            check_mode: "exact".into(),
            maker: "exposure".into(),
            breaker: "random".into(),
            host_path: None,
            out_dir: None,
            box_size: 20,
            alpha: 0.3,
            adversary: "random".into(),
            extra_claims: false,
            r: 0.25,
            expansion_k: 1,
            tree_delta: 3,
            tree_alpha: 0.3,
            trees_per_game: 10,
            reservoir_fraction: 0.25,
        }
    }

    /// Canonical flat key=value form (sorted keys, one per line).
    pub fn to_kv(&self) -> String {
        let mut kv: BTreeMap<&str, String> = BTreeMap::new();
        kv.insert("scenario", self.scenario.name().into());
        kv.insert("n", self.n.to_string());
        kv.insert("p", self.p.to_string());
        kv.insert("eps", self.eps.to_string());
        kv.insert("bias", self.bias.to_string());
        kv.insert("trials", self.trials.to_string());
        kv.insert("seed", self.seed.to_string());
        kv.insert("property", self.property.clone());
        kv.insert("check_mode", self.check_mode.clone());
        kv.insert("maker", self.maker.clone());
        kv.insert("breaker", self.breaker.clone());
        if let Some(h) = &self.host_path {
            kv.insert("host_path", h.clone());
        }
        if let Some(o) = &self.out_dir {
            kv.insert("out_dir", o.clone());
        }
        kv.insert("box_size", self.box_size.to_string());
        kv.insert("alpha", self.alpha.to_string());
        kv.insert("adversary", self.adversary.clone());
        kv.insert("extra_claims", self.extra_claims.to_string());
        kv.insert("r", self.r.to_string());
        kv.insert("expansion_k", self.expansion_k.to_string());
        kv.insert("tree_delta", self.tree_delta.to_string());
        kv.insert("tree_alpha", self.tree_alpha.to_string());
        kv.insert("trees_per_game", self.trees_per_game.to_string());
        kv.insert("reservoir_fraction", self.reservoir_fraction.to_string());
        let mut s = String::new();
        for (k, v) in kv {
            s.push_str(k);
            s.push('=');
            s.push_str(&v);
            s.push('\n');
        }
        s
    }

    pub fn from_kv(text: &str) -> Result<Self> {
        let mut map: BTreeMap<&str, &str> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: missing '='", i + 1)))?;
            map.insert(k.trim(), v.trim());
        }
        let scenario = Scenario::parse(
            map.get("scenario")
                .ok_or_else(|| Error::Parse("missing key 'scenario'".into()))?,
        )?;
        let mut cfg = ExperimentConfig::new(scenario);
        fn set<T: std::str::FromStr>(map: &BTreeMap<&str, &str>, key: &str, out: &mut T) -> Result<()>
        where
            T::Err: std::fmt::Display,
        {
            if let Some(v) = map.get(key) {
                *out = v
                    .parse()
                    .map_err(|e| Error::Parse(format!("key '{key}': {e}")))?;
            }
            Ok(())
        }
        set(&map, "n", &mut cfg.n)?;
        set(&map, "p", &mut cfg.p)?;
        set(&map, "eps", &mut cfg.eps)?;
        set(&map, "bias", &mut cfg.bias)?;
        set(&map, "trials", &mut cfg.trials)?;
        set(&map, "seed", &mut cfg.seed)?;
        set(&map, "box_size", &mut cfg.box_size)?;
        set(&map, "alpha", &mut cfg.alpha)?;
        set(&map, "extra_claims", &mut cfg.extra_claims)?;
        set(&map, "r", &mut cfg.r)?;
        set(&map, "expansion_k", &mut cfg.expansion_k)?;
        set(&map, "tree_delta", &mut cfg.tree_delta)?;
        set(&map, "tree_alpha", &mut cfg.tree_alpha)?;
        set(&map, "trees_per_game", &mut cfg.trees_per_game)?;
        set(&map, "reservoir_fraction", &mut cfg.reservoir_fraction)?;
        for (key, field) in [
            ("property", &mut cfg.property),
            ("check_mode", &mut cfg.check_mode),
            ("maker", &mut cfg.maker),
            ("breaker", &mut cfg.breaker),
            ("adversary", &mut cfg.adversary),
        ] {
            if let Some(v) = map.get(key) {
                *field = v.to_string();
            }
        }
        cfg.host_path = map.get("host_path").map(|s| s.to_string());
        cfg.out_dir = map.get("out_dir").map(|s| s.to_string());
        Ok(cfg)
    }

    fn property(&self) -> Result<Property> {
        let mode = match self.check_mode.as_str() {
            "exact" => CheckMode::Exact,
            "heuristic" => CheckMode::Heuristic,
            other => return Err(Error::Parameter(format!("unknown check mode '{other}'"))),
        };
        parse_property(&self.property, mode)
    }

    fn host(&self) -> Result<Graph> {
        match &self.host_path {
            Some(path) => Graph::from_edge_list(&std::fs::read_to_string(path)?),
            None => Ok(Graph::complete(self.n)),
        }
    }
}

/// One trial's outcome. Wall time is kept in memory for operators but never
/// serialized; record files must be byte-identical across reruns.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub seed: u64,
    pub winner: Option<char>,
    pub turns: usize,
    pub stats: BTreeMap<String, f64>,
    #[serde(skip)]
    pub wall_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub scenario: String,
    pub trials: u64,
    pub maker_wins: u64,
    pub win_rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub mean_turns: f64,
    pub stat_means: BTreeMap<String, f64>,
    pub stat_maxima: BTreeMap<String, f64>,
}

impl Summary {
    pub fn to_csv(&self) -> String {
        let mut header = String::from("scenario,trials,maker_wins,win_rate,ci_low,ci_high,mean_turns");
        let mut row = format!(
            "{},{},{},{},{},{},{}",
            self.scenario,
            self.trials,
            self.maker_wins,
            self.win_rate,
            self.ci_low,
            self.ci_high,
            self.mean_turns
        );
        for (k, v) in &self.stat_means {
            header.push_str(&format!(",mean_{k}"));
            row.push_str(&format!(",{v}"));
        }
        for (k, v) in &self.stat_maxima {
            header.push_str(&format!(",max_{k}"));
            row.push_str(&format!(",{v}"));
        }
        format!("{header}\n{row}\n")
    }
}

/// Pure fold from records to summary, so persisted summaries are exactly
/// recomputable.
pub fn summarize(scenario: Scenario, records: &[TrialRecord]) -> Summary {
    let trials = records.len() as u64;
    let wins = records.iter().filter(|r| r.winner == Some('M')).count() as u64;
    let (lo, hi) = wilson(wins as usize, trials as usize);
    let mean_turns = if trials == 0 {
        0.0
    } else {
        records.iter().map(|r| r.turns as f64).sum::<f64>() / trials as f64
    };
    let mut means: BTreeMap<String, f64> = BTreeMap::new();
    let mut maxima: BTreeMap<String, f64> = BTreeMap::new();
    for r in records {
        for (k, v) in &r.stats {
            *means.entry(k.clone()).or_insert(0.0) += v;
            let m = maxima.entry(k.clone()).or_insert(f64::NEG_INFINITY);
            if *v > *m {
                *m = *v;
            }
        }
    }
    for v in means.values_mut() {
        *v /= trials.max(1) as f64;
    }
    Summary {
        scenario: scenario.name().into(),
        trials,
        maker_wins: wins,
        win_rate: if trials == 0 {
            0.0
        } else {
            wins as f64 / trials as f64
        },
        ci_low: lo,
        ci_high: hi,
        mean_turns,
        stat_means: means,
        stat_maxima: maxima,
    }
}

fn wilson(successes: usize, n: usize) -> (f64, f64) {
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

fn run_one_trial(cfg: &ExperimentConfig, host: &Graph, trial: u64) -> Result<TrialRecord> {
    let t0 = std::time::Instant::now();
    let seed = Seed::new(cfg.seed, trial);
    let mut stats: BTreeMap<String, f64> = BTreeMap::new();
    let mut winner = None;
    let mut turns = 0usize;
    match cfg.scenario {
        Scenario::MinBox => {
            let state = MinBoxState::uniform(cfg.n, cfg.box_size, cfg.alpha, cfg.bias)?;
            let mut adv = box_adversary(&cfg.adversary)?;
            let t = play_minbox(state, adv.as_mut(), cfg.extra_claims, seed)?;
            winner = Some(if t.maker_wins() { 'M' } else { 'B' });
            turns = t.records.last().map(|r| r.turn + 1).unwrap_or(0);
            stats.insert("max_active_danger".into(), t.max_active_danger_seen as f64);
            stats.insert(
                "final_active_boxes".into(),
                t.final_state.active_count() as f64,
            );
        }
        Scenario::Game => {
            let property = cfg.property()?;
            let breaker_spec = BreakerSpec::parse(&cfg.breaker)?;
            let mut breaker = breaker_spec.build(seed.role(2));
            let gcfg = GameConfig::new(cfg.bias);
            let result = match cfg.maker.as_str() {
                "exposure" => {
                    let params = ExposureParams {
                        p: cfg.p,
                        eps: cfg.eps,
                        bias: Some(cfg.bias),
                        check: HypothesisCheck::Surrogate,
                    };
                    let mut maker = ExposureMaker::new(host, &params, seed.role(1))?;
                    let r = play_game(host, &gcfg, &mut maker, breaker.as_mut(), &property)?;
                    let rep = maker.final_report(true);
                    stats.insert("max_f2_ratio".into(), rep.max_f2_ratio());
                    stats.insert("min_maker_degree".into(), rep.min_maker_degree() as f64);
                    stats.insert(
                        "stage2_residue".into(),
                        rep.stage2_residue_vertices as f64,
                    );
                    stats.insert("gate_violations".into(), rep.gate_violations as f64);
                    stats.insert("f2_flagged".into(), rep.any_f2_flag() as u64 as f64);
                    r
                }
                "connectivity" => {
                    let mut maker = ConnectivityMaker::new(host.vertex_count());
                    play_game(host, &gcfg, &mut maker, breaker.as_mut(), &property)?
                }
                "random" => {
                    let mut maker = RandomMaker::new(seed.role(1));
                    play_game(host, &gcfg, &mut maker, breaker.as_mut(), &property)?
                }
                "passive" => {
                    let mut maker = PassiveMaker;
                    play_game(host, &gcfg, &mut maker, breaker.as_mut(), &property)?
                }
                other => return Err(Error::Parameter(format!("unknown maker '{other}'"))),
            };
            winner = Some(if result.winner == Player::Maker { 'M' } else { 'B' });
            turns = result.turns;
            stats.insert(
                "maker_edges".into(),
                result.maker_graph.edge_count() as f64,
            );
        }
        Scenario::Resilience => {
            let gp = sample_subgraph(host, cfg.p, seed.role(1))?;
            let property = cfg.property()?;
            let plan = adversary_destroy(
                &gp,
                &property,
                cfg.r,
                BudgetMode::Local,
                AttackOptions::default(),
                seed.role(2),
            )?;
            let destroyed = plan.is_some();
            winner = Some(if destroyed { 'B' } else { 'M' });
            stats.insert("destroyed".into(), destroyed as u64 as f64);
            if let Some(p) = plan {
                stats.insert("plan_cost".into(), p.local_cost(&gp));
                stats.insert("plan_edges".into(), p.edges.len() as f64);
            }
        }
        Scenario::Boosters => {
            let g = sample_gnp(cfg.n, cfg.p, seed.role(1))?;
            let cert = posa::check_expansion(&g, cfg.expansion_k);
            stats.insert("expansion_verified".into(), cert.verified() as u64 as f64);
            if g.is_connected() {
                let rep = posa::find_e_boosters(&g, (0, 1))?;
                stats.insert("boosters".into(), rep.boosters.len() as f64);
                stats.insert("exact".into(), rep.exact as u64 as f64);
                stats.insert(
                    "already_hamiltonian".into(),
                    rep.already_hamiltonian as u64 as f64,
                );
            }
        }
        Scenario::TreeGame => {
            let property = Property::exact(PropertyId::Connectivity);
            let breaker_spec = BreakerSpec::parse(&cfg.breaker)?;
            let mut breaker = breaker_spec.build(seed.role(2));
            let params = ExposureParams {
                p: cfg.p,
                eps: cfg.eps,
                bias: Some(cfg.bias),
                check: HypothesisCheck::Surrogate,
            };
            let mut maker = ExposureMaker::new(host, &params, seed.role(1))?;
            let gcfg = GameConfig::new(cfg.bias);
            let result = play_game(host, &gcfg, &mut maker, breaker.as_mut(), &property)?;
            turns = result.turns;
            let mut ok = 0usize;
            for i in 0..cfg.trees_per_game {
                let spec = crate::checkers::random_tree_with_bare_path(
                    host.vertex_count(),
                    cfg.tree_delta,
                    cfg.tree_alpha,
                    seed.role(100 + i as u64),
                )?;
                let out = crate::checkers::embed_tree(
                    &result.maker_graph,
                    &spec,
                    cfg.reservoir_fraction,
                    seed.role(200 + i as u64),
                )?;
                if let crate::checkers::EmbedOutcome::Embedded { map } = &out {
                    assert!(crate::checkers::trees::validate_embedding(
                        &result.maker_graph,
                        &spec.tree,
                        map
                    ));
                    ok += 1;
                }
            }
            winner = Some(if ok == cfg.trees_per_game { 'M' } else { 'B' });
            stats.insert("embeds_ok".into(), ok as f64);
            stats.insert(
                "embed_rate".into(),
                ok as f64 / cfg.trees_per_game.max(1) as f64,
            );
        }
    }
    Ok(TrialRecord {
        trial,
        seed: trial,
        winner,
        turns,
        stats,
        wall_ms: t0.elapsed().as_secs_f64() * 1e3,
    })
}

#[derive(Debug)]
pub struct RunOutput {
    pub summary: Summary,
    pub records: Vec<TrialRecord>,
    pub records_path: Option<PathBuf>,
    pub summary_path: Option<PathBuf>,
}

/// Runs all trials (in parallel when `threads != Some(1)`), merges records
/// in trial order, and persists JSONL records plus a CSV summary when the
/// config names an output directory.
pub fn run_experiment(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<RunOutput> {
    let host = match cfg.scenario {
        Scenario::MinBox | Scenario::Boosters => Graph::empty(0),
        _ => cfg.host()?,
    };
    let indices: Vec<u64> = (0..cfg.trials).collect();
    let run = |i: &u64| run_one_trial(cfg, &host, *i);
    let results: Vec<Result<TrialRecord>> = match threads {
        Some(1) => indices.iter().map(run).collect(),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
            pool.install(|| {
                use rayon::prelude::*;
                indices.par_iter().map(run).collect()
            })
        }
        None => {
            use rayon::prelude::*;
            indices.par_iter().map(run).collect()
        }
    };
    let mut records = Vec::with_capacity(results.len());
    for r in results {
        records.push(r?);
    }
    let summary = summarize(cfg.scenario, &records);

    let (mut records_path, mut summary_path) = (None, None);
    if let Some(dir) = &cfg.out_dir {
        let dir = Path::new(dir);
        std::fs::create_dir_all(dir)?;
        let rp = dir.join("records.jsonl");
        let mut f = std::fs::File::create(&rp)?;
        for rec in &records {
            writeln!(f, "{}", serde_json::to_string(rec).expect("record serializes"))?;
        }
        f.flush()?;
        let sp = dir.join("summary.csv");
        std::fs::write(&sp, summary.to_csv())?;
        let cp = dir.join("config.kv");
        std::fs::write(&cp, cfg.to_kv())?;
        records_path = Some(rp);
        summary_path = Some(sp);
    }
    Ok(RunOutput {
        summary,
        records,
        records_path,
        summary_path,
    })
}

/// The binomial tail bound (e n p / k)^k for X ~ Bin(n, p): an upper bound
/// on P[X >= k] for every integer k >= 1 (evaluated for real k >= 1).
pub fn tail_bound(n: u64, p: f64, k: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Parameter("n must be at least 1".into()));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Parameter(format!("p = {p} not in (0, 1]")));
    }
    if !(k >= 1.0) {
        return Err(Error::Parameter(format!("k = {k} must be at least 1")));
    }
    Ok((std::f64::consts::E * n as f64 * p / k).powf(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial_tail_exact(n: u64, p: f64, k: u64) -> f64 {
        // Direct summation oracle, fine for n <= 30.
        let mut total = 0.0f64;
        for j in k..=n {
            let mut term = 1.0f64;
            for i in 0..j {
                term *= (n - i) as f64 / (i + 1) as f64;
            }
            total += term * p.powi(j as i32) * (1.0 - p).powi((n - j) as i32);
        }
        total.min(1.0)
    }

    #[test]
    fn tail_bound_dominates_exact_tail() {
        for n in 1..=30u64 {
            for &p in &[0.1, 0.5] {
                for k in 1..=n {
                    let bound = tail_bound(n, p, k as f64).unwrap();
                    let exact = binomial_tail_exact(n, p, k);
                    assert!(
                        bound >= exact - 1e-12,
                        "n={n} p={p} k={k}: bound {bound} < exact {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn tail_bound_at_k_equal_enp_is_one() {
        // k = e n p makes the base 1, so the bound is exactly 1.
        let v = tail_bound(10, 0.1, std::f64::consts::E).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tail_bound_above_n_still_dominates_zero() {
        let v = tail_bound(10, 0.5, 25.0).unwrap();
        assert!(v >= 0.0);
        assert_eq!(binomial_tail_exact(10, 0.5, 25.min(10)), 1.0_f64.min(1.0));
    }

    #[test]
    fn config_kv_round_trip_is_lossless() {
        let mut cfg = ExperimentConfig::new(Scenario::Game);
        cfg.n = 64;
        cfg.p = 0.04;
        cfg.property = "hamiltonicity".into();
        cfg.check_mode = "heuristic".into();
        cfg.host_path = Some("/tmp/host.gr".into());
        let text = cfg.to_kv();
        let back = ExperimentConfig::from_kv(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.to_kv(), text);
    }

    #[test]
    fn zero_trials_is_an_empty_success() {
        let mut cfg = ExperimentConfig::new(Scenario::MinBox);
        cfg.trials = 0;
        let out = run_experiment(&cfg, Some(1)).unwrap();
        assert_eq!(out.summary.trials, 0);
        assert!(out.records.is_empty());
    }

    #[test]
    fn summary_is_recomputable_from_records() {
        let mut cfg = ExperimentConfig::new(Scenario::MinBox);
        cfg.n = 12;
        cfg.trials = 8;
        let out = run_experiment(&cfg, Some(2)).unwrap();
        assert_eq!(summarize(cfg.scenario, &out.records), out.summary);
    }

    #[test]
    fn reruns_are_byte_identical_across_thread_counts() {
        let tmp = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig::new(Scenario::Game);
        cfg.n = 16;
        cfg.p = 0.05;
        cfg.bias = 1;
        cfg.trials = 6;
        cfg.maker = "exposure".into();
        cfg.property = "connectivity".into();
        let mut outputs = Vec::new();
        for (i, threads) in [Some(1), Some(4), None].into_iter().enumerate() {
            let dir = tmp.path().join(format!("run{i}"));
            cfg.out_dir = Some(dir.to_string_lossy().into_owned());
            let out = run_experiment(&cfg, threads).unwrap();
            outputs.push((
                std::fs::read(out.records_path.unwrap()).unwrap(),
                std::fs::read(out.summary_path.unwrap()).unwrap(),
            ));
        }
        assert_eq!(outputs[0], outputs[1]);
        assert_eq!(outputs[0], outputs[2]);
    }

    #[test]
    fn game_scenario_produces_exposure_stats() {
        let mut cfg = ExperimentConfig::new(Scenario::Game);
        cfg.n = 20;
        cfg.p = 0.05;
        cfg.trials = 3;
        let out = run_experiment(&cfg, Some(1)).unwrap();
        for r in &out.records {
            assert!(r.stats.contains_key("max_f2_ratio"));
            assert!(r.winner.is_some());
        }
    }
}
