//! A simulation laboratory for biased (1:b) Maker-Breaker games on graphs:
//! the MinBox auxiliary game, Maker's randomized exposure strategy, the
//! rotation/booster machinery behind Hamilton-path construction, monotone
//! property checkers, local-resilience estimators, and a deterministic
//! Monte Carlo harness tying them together.

pub mod breakers;
pub mod checkers;
pub mod digraph;
pub mod engine;
pub mod error;
pub mod exposure;
pub mod graph;
pub mod harness;
pub mod minbox;
pub mod posa;
pub mod resilience;

pub use error::{Error, Result};
pub use graph::{Edge, Graph, Seed};
