//! Stochastic graph games with partial observation.
//!
//! Arenas, randomised finite-memory strategies, exact and sampled
//! evaluation, concurrent safety analysis and Muller games.

pub mod arena;
pub mod conditions;
pub mod document;
pub mod error;
pub mod evaluate;
pub mod gallery;
pub mod graph;
pub mod kuhn;
pub mod muller;
pub mod rational;
pub mod safety;
pub mod strategy;

pub use arena::{Arena, ArenaBuilder, ArenaClass, PlayPrefix, Side};
pub use conditions::{ColourSet, Condition, MullerFamily};
pub use error::{Error, Result};
pub use rational::{Distribution, Rational};
pub use strategy::{ExecutionState, Strategy, StrategyKind};
