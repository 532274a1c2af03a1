//! Command-line front end for the game lab.

use clap::{Args, Parser, Subcommand};

use mblab::breakers::BreakerSpec;
use mblab::checkers::{self, CheckMode};
use mblab::engine::{play_game, GameConfig, WinCheck};
use mblab::exposure::{ExposureMaker, ExposureParams, HypothesisCheck};
use mblab::graph::{sample_gnp, Graph, Seed};
use mblab::harness::{run_experiment, ExperimentConfig, Scenario};

#[derive(Parser)]
#[command(name = "mblab", version, about = "Biased Maker-Breaker game laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonOpts {
    /// Host vertex count (complete graph K_n unless --host is given).
    #[arg(long, default_value_t = 32)]
    n: usize,
    /// Exposure / subgraph probability.
    #[arg(long, default_value_t = 0.05)]
    p: f64,
    /// Resilience margin for the exposure strategy.
    #[arg(long, default_value_t = 1.0)]
    eps: f64,
    /// Breaker bias b.
    #[arg(long, default_value_t = 1)]
    bias: u64,
    /// Number of Monte Carlo trials.
    #[arg(long, default_value_t = 20)]
    trials: u64,
    /// Master seed; trial i uses stream-id i.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output directory (defaults to $MBLAB_OUT when set).
    #[arg(long)]
    out: Option<String>,
    /// Target property: connectivity, perfect-matching, min-degree:<k>,
    /// hamiltonicity, pancyclicity.
    #[arg(long, default_value = "connectivity")]
    property: String,
    /// exact | heuristic property checking.
    #[arg(long, default_value = "exact")]
    check_mode: String,
    /// Maker strategy: exposure, connectivity, random, passive.
    #[arg(long, default_value = "exposure")]
    maker: String,
    /// Breaker adversary: random, isolator, max-maker-degree.
    #[arg(long, default_value = "random")]
    breaker: String,
    /// Host graph edge-list file instead of K_n.
    #[arg(long)]
    host: Option<String>,
}

impl CommonOpts {
    fn apply(&self, cfg: &mut ExperimentConfig) {
        cfg.n = self.n;
        cfg.p = self.p;
        cfg.eps = self.eps;
        cfg.bias = self.bias;
        cfg.trials = self.trials;
        cfg.seed = self.seed;
        cfg.property = self.property.clone();
        cfg.check_mode = self.check_mode.clone();
        cfg.maker = self.maker.clone();
        cfg.breaker = self.breaker.clone();
        cfg.host_path = self.host.clone();
        cfg.out_dir = self
            .out
            .clone()
            .or_else(|| std::env::var("MBLAB_OUT").ok());
    }
}

#[derive(Subcommand)]
enum Command {
    /// Play one traced game and print the move log.
    Play {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Monte Carlo sweep over seeded game trials.
    Mc {
        #[command(flatten)]
        common: CommonOpts,
        /// Scenario: game, minbox, resilience, boosters, tree-game.
        #[arg(long, default_value = "game")]
        scenario: String,
        /// Load a key=value config file (flags override it).
        #[arg(long)]
        config: Option<String>,
    },
    /// Auxiliary MinBox game experiments.
    Minbox {
        #[command(flatten)]
        common: CommonOpts,
        /// Minimum box size D.
        #[arg(long, default_value_t = 20)]
        box_size: usize,
        /// Maker's target fraction alpha.
        #[arg(long, default_value_t = 0.3)]
        alpha: f64,
        /// Box adversary: random, concentrate, spread.
        #[arg(long, default_value = "random")]
        adversary: String,
        /// Let Maker occasionally claim extra elements.
        #[arg(long, default_value_t = false)]
        extra_claims: bool,
    },
    /// Resilience estimation experiments on random subgraphs.
    Resilience {
        #[command(flatten)]
        common: CommonOpts,
        /// Local deletion budget fraction r.
        #[arg(long, default_value_t = 0.25)]
        r: f64,
    },
    /// Rotation / expansion / booster diagnostics on random graphs.
    Boosters {
        #[command(flatten)]
        common: CommonOpts,
        /// Expansion parameter k.
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Generate graphs or tree specs.
    Gen {
        /// What to generate: gnp | tree.
        #[arg(long, default_value = "gnp")]
        what: String,
        #[arg(long, default_value_t = 32)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        p: f64,
        #[arg(long, default_value_t = 3)]
        tree_delta: usize,
        #[arg(long, default_value_t = 0.3)]
        tree_alpha: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file (stdout when omitted).
        #[arg(long)]
        out: Option<String>,
    },
}

fn emit(out: &Option<String>, text: &str) -> mblab::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run() -> mblab::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Play { common } => {
            let host = match &common.host {
                Some(path) => Graph::from_edge_list(&std::fs::read_to_string(path)?)?,
                None => Graph::complete(common.n),
            };
            let mode = if common.check_mode == "heuristic" {
                CheckMode::Heuristic
            } else {
                CheckMode::Exact
            };
            let property = checkers::parse_property(&common.property, mode)?;
            let seed = Seed::new(common.seed, 0);
            let spec = BreakerSpec::parse(&common.breaker)?;
            let mut breaker = spec.build(seed.role(2));
            let cfg = GameConfig {
                bias: common.bias,
                win_check: WinCheck::AtExhaustion,
                trace: true,
            };
            let result = match common.maker.as_str() {
                "exposure" => {
                    let params = ExposureParams {
                        p: common.p,
                        eps: common.eps,
                        bias: Some(common.bias),
                        check: HypothesisCheck::Surrogate,
                    };
                    let mut maker = ExposureMaker::new(&host, &params, seed.role(1))?;
                    let r = play_game(&host, &cfg, &mut maker, breaker.as_mut(), &property)?;
                    print!("{}", maker.final_report(true).to_csv());
                    r
                }
                "connectivity" => {
                    let mut maker = mblab::engine::ConnectivityMaker::new(host.vertex_count());
                    play_game(&host, &cfg, &mut maker, breaker.as_mut(), &property)?
                }
                "random" => {
                    let mut maker = mblab::engine::RandomMaker::new(seed.role(1));
                    play_game(&host, &cfg, &mut maker, breaker.as_mut(), &property)?
                }
                _ => {
                    let mut maker = mblab::engine::PassiveMaker;
                    play_game(&host, &cfg, &mut maker, breaker.as_mut(), &property)?
                }
            };
            if let Some(trace) = result.trace_jsonl() {
                emit(&common.out, &trace)?;
            }
            eprintln!(
                "winner: {:?} after {} turns (maker edges: {})",
                result.winner,
                result.turns,
                result.maker_graph.edge_count()
            );
            Ok(())
        }
        Command::Mc {
            common,
            scenario,
            config,
        } => {
            let mut cfg = match &config {
                Some(path) => ExperimentConfig::from_kv(&std::fs::read_to_string(path)?)?,
                None => ExperimentConfig::new(Scenario::parse(&scenario)?),
            };
            if config.is_none() {
                cfg.scenario = Scenario::parse(&scenario)?;
            }
            common.apply(&mut cfg);
            let out = run_experiment(&cfg, None)?;
            print!("{}", out.summary.to_csv());
            Ok(())
        }
        Command::Minbox {
            common,
            box_size,
            alpha,
            adversary,
            extra_claims,
        } => {
            let mut cfg = ExperimentConfig::new(Scenario::MinBox);
            common.apply(&mut cfg);
            cfg.box_size = box_size;
            cfg.alpha = alpha;
            cfg.adversary = adversary;
            cfg.extra_claims = extra_claims;
            let out = run_experiment(&cfg, None)?;
            print!("{}", out.summary.to_csv());
            Ok(())
        }
        Command::Resilience { common, r } => {
            let mut cfg = ExperimentConfig::new(Scenario::Resilience);
            common.apply(&mut cfg);
            cfg.r = r;
            let out = run_experiment(&cfg, None)?;
            print!("{}", out.summary.to_csv());
            Ok(())
        }
        Command::Boosters { common, k } => {
            let mut cfg = ExperimentConfig::new(Scenario::Boosters);
            common.apply(&mut cfg);
            cfg.expansion_k = k;
            let out = run_experiment(&cfg, None)?;
            print!("{}", out.summary.to_csv());
            Ok(())
        }
        Command::Gen {
            what,
            n,
            p,
            tree_delta,
            tree_alpha,
            seed,
            out,
        } => match what.as_str() {
            "gnp" => {
                let g = sample_gnp(n, p, Seed::new(seed, 0))?;
                emit(&out, &g.to_edge_list())
            }
            "tree" => {
                let spec =
                    checkers::random_tree_with_bare_path(n, tree_delta, tree_alpha, Seed::new(seed, 0))?;
                let json = serde_json::to_string_pretty(&spec.bare).expect("serializes");
                let mut text = spec.tree.to_edge_list();
                text.push_str("# bare path\n");
                text.push_str(&json);
                text.push('\n');
                emit(&out, &text)
            }
            other => Err(mblab::Error::Parameter(format!(
                "unknown generator '{other}'"
            ))),
        },
    }
}
