//! Strategies as finite memory machines.
//!
//! A strategy owns an initial memory distribution, a memory update applied on
//! every new observation, and a next-action map applied at every step. The
//! [`StrategyKind`] tag says which of the three components may be randomised:
//!
//! | kind        | init   | update | act    |
//! |-------------|--------|--------|--------|
//! | pure        | Dirac  | Dirac  | Dirac  |
//! | behavioural | Dirac  | Dirac  | random |
//! | mixed       | random | Dirac  | Dirac  |
//! | general     | random | random | random |
//!
//! Both maps are indexed by the last received signal (or the blank, before
//! anything was observed) and the current memory state.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arena::{ActionId, Arena, Side, SignalId};
use crate::error::{Error, Result};
use crate::rational::{format_rational, Distribution, Rational};

pub type MemoryId = usize;

/// A signal or the blank observation that precedes the first signal.
pub type Observation = Option<SignalId>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Pure,
    Behavioural,
    Mixed,
    General,
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyKind::Pure => "pure",
            StrategyKind::Behavioural => "behavioural",
            StrategyKind::Mixed => "mixed",
            StrategyKind::General => "general",
        })
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pure" => Ok(StrategyKind::Pure),
            "behavioural" | "behavioral" => Ok(StrategyKind::Behavioural),
            "mixed" => Ok(StrategyKind::Mixed),
            "general" => Ok(StrategyKind::General),
            other => Err(Error::Malformed(format!("unknown strategy kind `{other}`"))),
        }
    }
}

/// Runtime state of a strategy: current memory and the last signal received.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExecutionState {
    pub memory: MemoryId,
    pub last: Observation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Strategy {
    side: Side,
    kind: StrategyKind,
    memory: Vec<String>,
    signal_count: usize,
    action_count: usize,
    init: Distribution<MemoryId>,
    update: Vec<Distribution<MemoryId>>,
    act: Vec<Distribution<ActionId>>,
}

fn obs_index(o: Observation) -> usize {
    o.map_or(0, |s| s + 1)
}

/// Every observation a player of `arena` can hold: the blank, then each signal.
pub fn observations(arena: &Arena, side: Side) -> impl Iterator<Item = Observation> {
    std::iter::once(None).chain((0..arena.signal_count(side)).map(Some))
}

impl Strategy {
    /// Validates and assembles a strategy. `update` and `act` are tables
    /// indexed by `observation_slot * |memory| + m`, the slot being 0 for the
    /// blank and `s + 1` for signal `s`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        arena: &Arena,
        side: Side,
        kind: StrategyKind,
        memory: Vec<String>,
        init: Distribution<MemoryId>,
        update: Vec<Distribution<MemoryId>>,
        act: Vec<Distribution<ActionId>>,
    ) -> Result<Strategy> {
        let strategy = Strategy {
            side,
            kind,
            memory,
            signal_count: arena.signal_count(side),
            action_count: arena.action_count(side),
            init,
            update,
            act,
        };
        strategy.validate()?;
        Ok(strategy)
    }

    /// Builds the tables from closures over `(observation, memory)`.
    pub fn from_fn(
        arena: &Arena,
        side: Side,
        kind: StrategyKind,
        memory: Vec<String>,
        init: Distribution<MemoryId>,
        mut update: impl FnMut(Observation, MemoryId) -> Distribution<MemoryId>,
        mut act: impl FnMut(Observation, MemoryId) -> Distribution<ActionId>,
    ) -> Result<Strategy> {
        let m = memory.len();
        let mut up = Vec::new();
        let mut ac = Vec::new();
        for o in observations(arena, side) {
            for mem in 0..m {
                up.push(update(o, mem));
                ac.push(act(o, mem));
            }
        }
        Strategy::new(arena, side, kind, memory, init, up, ac)
    }

    /// A memoryless strategy whose action depends on the last observation only.
    pub fn memoryless(
        arena: &Arena,
        side: Side,
        kind: StrategyKind,
        mut act: impl FnMut(Observation) -> Distribution<ActionId>,
    ) -> Result<Strategy> {
        Strategy::from_fn(
            arena,
            side,
            kind,
            vec!["m".into()],
            Distribution::dirac(0),
            |_, _| Distribution::dirac(0),
            |o, _| act(o),
        )
    }

    fn validate(&self) -> Result<()> {
        let m = self.memory.len();
        if m == 0 {
            return Err(Error::Malformed("strategy needs at least one memory state".into()));
        }
        let mut seen = HashSet::new();
        for name in &self.memory {
            if !seen.insert(name) {
                return Err(Error::DuplicateId(name.clone()));
            }
        }
        let slots = (self.signal_count + 1) * m;
        if self.update.len() != slots || self.act.len() != slots {
            return Err(Error::NonTotal(format!(
                "expected {slots} update/act entries, found {}/{}",
                self.update.len(),
                self.act.len()
            )));
        }
        let bad_memory = self
            .init
            .support()
            .chain(self.update.iter().flat_map(|d| d.support()))
            .any(|&k| k >= m);
        if bad_memory {
            return Err(Error::UnknownIdentifier("memory state out of range".into()));
        }
        if self.act.iter().flat_map(|d| d.support()).any(|&a| a >= self.action_count) {
            return Err(Error::UnknownIdentifier("action out of range".into()));
        }
        let dirac_init = self.init.is_dirac();
        let dirac_update = self.update.iter().all(Distribution::is_dirac);
        let dirac_act = self.act.iter().all(Distribution::is_dirac);
        let violation = match self.kind {
            StrategyKind::Pure if !(dirac_init && dirac_update && dirac_act) => {
                Some("a pure strategy must be deterministic everywhere")
            }
            StrategyKind::Behavioural if !dirac_init => {
                Some("a behavioural strategy has a deterministic initial memory")
            }
            StrategyKind::Behavioural if !dirac_update => {
                Some("a behavioural strategy has a deterministic memory update")
            }
            StrategyKind::Mixed if !dirac_update => {
                Some("a mixed strategy has a deterministic memory update")
            }
            StrategyKind::Mixed if !dirac_act => {
                Some("a mixed strategy has a deterministic next-action map")
            }
            _ => None,
        };
        match violation {
            Some(msg) => Err(Error::KindViolation(msg.into())),
            None => Ok(()),
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn kind(&self) -> StrategyKind {
        self.kind
    }

    pub fn memory_size(&self) -> usize {
        self.memory.len()
    }

    pub fn memory_names(&self) -> &[String] {
        &self.memory
    }

    pub fn signal_count(&self) -> usize {
        self.signal_count
    }

    pub fn action_count(&self) -> usize {
        self.action_count
    }

    pub fn init(&self) -> &Distribution<MemoryId> {
        &self.init
    }

    pub fn update_dist(&self, o: Observation, m: MemoryId) -> &Distribution<MemoryId> {
        &self.update[obs_index(o) * self.memory.len() + m]
    }

    pub fn act_dist(&self, o: Observation, m: MemoryId) -> &Distribution<ActionId> {
        &self.act[obs_index(o) * self.memory.len() + m]
    }

    /// `true` if the strategy's dimensions match `arena` for its side.
    pub fn fits(&self, arena: &Arena) -> bool {
        self.signal_count == arena.signal_count(self.side)
            && self.action_count == arena.action_count(self.side)
    }

    pub fn initial_states(&self) -> Distribution<ExecutionState> {
        self.init.map(|&memory| ExecutionState { memory, last: None })
    }

    /// Delivers one signal: the memory is updated and the signal recorded.
    pub fn observe(&self, state: ExecutionState, signal: SignalId) -> Distribution<ExecutionState> {
        self.update_dist(Some(signal), state.memory).map(|&memory| ExecutionState {
            memory,
            last: Some(signal),
        })
    }

    /// Delivers an optional signal, leaving the state untouched on `None`.
    pub fn observe_opt(
        &self,
        state: ExecutionState,
        signal: Option<SignalId>,
    ) -> Distribution<ExecutionState> {
        match signal {
            Some(s) => self.observe(state, s),
            None => Distribution::dirac(state),
        }
    }

    pub fn action(&self, state: ExecutionState) -> &Distribution<ActionId> {
        self.act_dist(state.last, state.memory)
    }

    /// One decision: optionally absorb `incoming`, then choose an action.
    ///
    /// Returns the marginal action distribution and the distribution of the
    /// successor state. Without a new signal the state is kept, so pure
    /// strategies repeat themselves while behavioural ones draw afresh.
    pub fn step(
        &self,
        state: ExecutionState,
        incoming: Option<SignalId>,
    ) -> Result<(Distribution<ActionId>, Distribution<ExecutionState>)> {
        if let Some(s) = incoming {
            if s >= self.signal_count {
                return Err(Error::UnknownSignal(s));
            }
        }
        if state.memory >= self.memory.len() {
            return Err(Error::UnknownIdentifier(format!("memory state {}", state.memory)));
        }
        let next = self.observe_opt(state, incoming);
        let actions = next.flat_map(|st| self.action(*st).clone());
        Ok((actions, next))
    }

    /// The same machine tagged as a general strategy.
    pub fn embed_general(&self) -> Strategy {
        Strategy {
            kind: StrategyKind::General,
            ..self.clone()
        }
    }

    /// Human-readable dump of the three tables.
    pub fn describe(&self, arena: &Arena) -> String {
        let obs_name = |o: Observation| match o {
            None => "blank".to_string(),
            Some(s) => arena.signal_name(self.side, s).to_string(),
        };
        let mut out = format!(
            "{} {} strategy, memory {{{}}}\n  init: {}\n",
            self.kind,
            self.side,
            self.memory.join(", "),
            self.init
                .iter()
                .map(|(&m, w)| format!("{}: {}", self.memory[m], format_rational(w)))
                .collect::<Vec<_>>()
                .join(", ")
        );
        for o in observations(arena, self.side) {
            for m in 0..self.memory.len() {
                let up = self
                    .update_dist(o, m)
                    .iter()
                    .map(|(&k, w)| format!("{}: {}", self.memory[k], format_rational(w)))
                    .collect::<Vec<_>>()
                    .join(", ");
                let act = self
                    .act_dist(o, m)
                    .iter()
                    .map(|(&a, w)| format!("{}: {}", arena.action_name(self.side, a), format_rational(w)))
                    .collect::<Vec<_>>()
                    .join(", ");
                out.push_str(&format!(
                    "  ({}, {}): update {{{}}} act {{{}}}\n",
                    obs_name(o),
                    self.memory[m],
                    up,
                    act
                ));
            }
        }
        out
    }
}

/// The mixed strategy drawing component `i` with probability `w_i`.
///
/// The memory is the disjoint union of the components' memories, so after the
/// initial draw each component runs on its own copy.
pub fn mixed_from_support(side: Side, pairs: &[(Rational, &Strategy)]) -> Result<Strategy> {
    let (_, first) = pairs
        .first()
        .ok_or_else(|| Error::WeightsNotNormalised("empty support".into()))?;
    let total: Rational = pairs.iter().map(|(w, _)| w.clone()).sum();
    if !total.is_one() || pairs.iter().any(|(w, _)| *w < Rational::zero()) {
        return Err(Error::WeightsNotNormalised(format!(
            "weights sum to {}",
            format_rational(&total)
        )));
    }
    for (_, s) in pairs {
        if s.kind != StrategyKind::Pure {
            return Err(Error::KindViolation(format!(
                "mixed support contains a {} strategy",
                s.kind
            )));
        }
        if s.side != side {
            return Err(Error::WrongSide(format!("expected {side}, found {}", s.side)));
        }
        if s.signal_count != first.signal_count || s.action_count != first.action_count {
            return Err(Error::Malformed("components belong to different arenas".into()));
        }
    }
    let mut offsets = Vec::with_capacity(pairs.len());
    let mut memory = Vec::new();
    for (i, (_, s)) in pairs.iter().enumerate() {
        offsets.push(memory.len());
        memory.extend(s.memory.iter().map(|name| format!("{i}:{name}")));
    }
    let total_memory = memory.len();
    let init = Distribution::new(pairs.iter().zip(&offsets).flat_map(|((w, s), &off)| {
        s.init.iter().map(move |(&m, p)| (m + off, w * p))
    }))?;
    let slots = first.signal_count + 1;
    let mut update = Vec::with_capacity(slots * total_memory);
    let mut act = Vec::with_capacity(slots * total_memory);
    for slot in 0..slots {
        for ((_, s), &off) in pairs.iter().zip(&offsets) {
            let m = s.memory.len();
            for mem in 0..m {
                update.push(s.update[slot * m + mem].map(|&k| k + off));
                act.push(s.act[slot * m + mem].clone());
            }
        }
    }
    let strategy = Strategy {
        side,
        kind: StrategyKind::Mixed,
        memory,
        signal_count: first.signal_count,
        action_count: first.action_count,
        init,
        update,
        act,
    };
    strategy.validate()?;
    Ok(strategy)
}
