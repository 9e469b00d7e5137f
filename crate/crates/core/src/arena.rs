//! Game arenas: vertices, both players' actions, a probabilistic transition
//! function, a partial colouring and partial observation maps.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{format_rational, Distribution, Rational};

pub type VertexId = usize;
pub type ActionId = usize;
pub type SignalId = usize;
pub type ColourId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Eve,
    Adam,
}

impl Side {
    pub fn opponent(self) -> Side {
        match self {
            Side::Eve => Side::Adam,
            Side::Adam => Side::Eve,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Eve => write!(f, "eve"),
            Side::Adam => write!(f, "adam"),
        }
    }
}

/// Per-player view of the arena: action names, signal names, and the two
/// halves of the observation map.
#[derive(Clone, Debug, PartialEq, Eq)]
struct PlayerData {
    actions: Vec<String>,
    signals: Vec<String>,
    vertex_obs: Vec<Option<SignalId>>,
    action_obs: Vec<Option<SignalId>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arena {
    vertices: Vec<String>,
    colours: Vec<String>,
    colouring: Vec<Option<ColourId>>,
    eve: PlayerData,
    adam: PlayerData,
    /// Indexed by `(v * |X| + x) * |Y| + y`.
    transitions: Vec<Distribution<VertexId>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ArenaClass {
    pub synchronous: bool,
    pub observable_actions: bool,
    pub perfect_information: bool,
    pub simple: bool,
}

/// A finite play prefix: a start vertex followed by `(eve action, adam action,
/// next vertex)` triples.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PlayPrefix {
    pub start: VertexId,
    pub steps: Vec<(ActionId, ActionId, VertexId)>,
}

impl PlayPrefix {
    pub fn new(start: VertexId) -> Self {
        PlayPrefix {
            start,
            steps: Vec::new(),
        }
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        std::iter::once(self.start).chain(self.steps.iter().map(|s| s.2))
    }

    /// Checks every step against the transition function.
    pub fn check(&self, arena: &Arena) -> Result<()> {
        if self.start >= arena.vertex_count() {
            return Err(Error::InconsistentPrefix(0));
        }
        let mut current = self.start;
        for (i, &(x, y, next)) in self.steps.iter().enumerate() {
            if x >= arena.action_count(Side::Eve)
                || y >= arena.action_count(Side::Adam)
                || next >= arena.vertex_count()
                || !arena.transition(current, x, y).contains(&next)
            {
                return Err(Error::InconsistentPrefix(i));
            }
            current = next;
        }
        Ok(())
    }
}

impl Arena {
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex_name(&self, v: VertexId) -> &str {
        &self.vertices[v]
    }

    pub fn vertex_index(&self, name: &str) -> Option<VertexId> {
        self.vertices.iter().position(|n| n == name)
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.vertices
    }

    fn player(&self, side: Side) -> &PlayerData {
        match side {
            Side::Eve => &self.eve,
            Side::Adam => &self.adam,
        }
    }

    pub fn action_count(&self, side: Side) -> usize {
        self.player(side).actions.len()
    }

    pub fn action_name(&self, side: Side, a: ActionId) -> &str {
        &self.player(side).actions[a]
    }

    pub fn action_index(&self, side: Side, name: &str) -> Option<ActionId> {
        self.player(side).actions.iter().position(|n| n == name)
    }

    pub fn signal_count(&self, side: Side) -> usize {
        self.player(side).signals.len()
    }

    pub fn signal_name(&self, side: Side, s: SignalId) -> &str {
        &self.player(side).signals[s]
    }

    pub fn signal_index(&self, side: Side, name: &str) -> Option<SignalId> {
        self.player(side).signals.iter().position(|n| n == name)
    }

    pub fn vertex_signal(&self, side: Side, v: VertexId) -> Option<SignalId> {
        self.player(side).vertex_obs[v]
    }

    pub fn action_signal(&self, side: Side, a: ActionId) -> Option<SignalId> {
        self.player(side).action_obs[a]
    }

    /// Signals that some vertex emits to `side`.
    pub fn vertex_signal_set(&self, side: Side) -> BTreeSet<SignalId> {
        self.player(side).vertex_obs.iter().flatten().copied().collect()
    }

    /// Signals that some own action emits to `side`.
    pub fn action_signal_set(&self, side: Side) -> BTreeSet<SignalId> {
        self.player(side).action_obs.iter().flatten().copied().collect()
    }

    pub fn colours(&self) -> &[String] {
        &self.colours
    }

    pub fn colour_index(&self, name: &str) -> Option<ColourId> {
        self.colours.iter().position(|n| n == name)
    }

    pub fn colour_of(&self, v: VertexId) -> Option<ColourId> {
        self.colouring[v]
    }

    pub fn vertices_coloured(&self, colours: &BTreeSet<ColourId>) -> BTreeSet<VertexId> {
        (0..self.vertex_count())
            .filter(|&v| self.colouring[v].is_some_and(|c| colours.contains(&c)))
            .collect()
    }

    pub fn transition(&self, v: VertexId, x: ActionId, y: ActionId) -> &Distribution<VertexId> {
        let nx = self.eve.actions.len();
        let ny = self.adam.actions.len();
        &self.transitions[(v * nx + x) * ny + y]
    }

    /// All vertices reachable in one step under some action pair.
    pub fn successors(&self, v: VertexId) -> BTreeSet<VertexId> {
        let mut out = BTreeSet::new();
        for x in 0..self.action_count(Side::Eve) {
            for y in 0..self.action_count(Side::Adam) {
                out.extend(self.transition(v, x, y).support().copied());
            }
        }
        out
    }

    /// `δ(v, x, y)` is the Dirac distribution on `v` for every action pair.
    pub fn is_absorbing(&self, v: VertexId) -> bool {
        (0..self.action_count(Side::Eve)).all(|x| {
            (0..self.action_count(Side::Adam))
                .all(|y| self.transition(v, x, y).point() == Some(&v))
        })
    }

    /// Which player alone determines the transition at `v`. `None` when the
    /// transition depends on both; a vertex that depends on neither is
    /// reported as Eve's.
    pub fn controller(&self, v: VertexId) -> Option<Side> {
        let nx = self.action_count(Side::Eve);
        let ny = self.action_count(Side::Adam);
        let only_x = (0..nx).all(|x| (1..ny).all(|y| self.transition(v, x, y) == self.transition(v, x, 0)));
        if only_x {
            return Some(Side::Eve);
        }
        let only_y = (0..ny).all(|y| (1..nx).all(|x| self.transition(v, x, y) == self.transition(v, 0, y)));
        only_y.then_some(Side::Adam)
    }

    pub fn classify(&self) -> ArenaClass {
        fn total(p: &PlayerData) -> bool {
            p.vertex_obs.iter().all(Option::is_some) && p.action_obs.iter().all(Option::is_some)
        }
        fn injective(obs: &[Option<SignalId>]) -> bool {
            let set: BTreeSet<_> = obs.iter().collect();
            set.len() == obs.len()
        }
        let synchronous = total(&self.eve) && total(&self.adam);
        let observable_actions =
            synchronous && injective(&self.eve.action_obs) && injective(&self.adam.action_obs);
        let perfect_information =
            synchronous && injective(&self.eve.vertex_obs) && injective(&self.adam.vertex_obs);
        let simple =
            perfect_information && (0..self.vertex_count()).all(|v| self.controller(v).is_some());
        ArenaClass {
            synchronous,
            observable_actions,
            perfect_information,
            simple,
        }
    }

    /// The signals `side` receives along `prefix`: for each visited vertex its
    /// signal, then the signal of the player's own action, skipping undefined
    /// observations.
    pub fn observation_trace(&self, prefix: &PlayPrefix, side: Side) -> Result<Vec<SignalId>> {
        prefix.check(self)?;
        let mut trace = Vec::new();
        let mut current = prefix.start;
        for &(x, y, next) in &prefix.steps {
            trace.extend(self.vertex_signal(side, current));
            let own = match side {
                Side::Eve => x,
                Side::Adam => y,
            };
            trace.extend(self.action_signal(side, own));
            current = next;
        }
        trace.extend(self.vertex_signal(side, current));
        Ok(trace)
    }

    /// A copy of this arena with one extra action for `side`, whose
    /// transitions are given by `row(v, other_action)`.
    pub fn with_extra_action(
        &self,
        side: Side,
        name: &str,
        signal: Option<&str>,
        mut row: impl FnMut(VertexId, ActionId) -> Distribution<VertexId>,
    ) -> Result<Arena> {
        let mut b = ArenaBuilder::from_arena(self);
        match side {
            Side::Eve => b.eve_action(name, signal),
            Side::Adam => b.adam_action(name, signal),
        };
        for v in 0..self.vertex_count() {
            for other in 0..self.action_count(side.opponent()) {
                let to: Vec<(&str, Rational)> = row(v, other)
                    .iter()
                    .map(|(&t, w)| (self.vertex_name(t), w.clone()))
                    .collect();
                let other_name = self.action_name(side.opponent(), other);
                match side {
                    Side::Eve => b.transition(self.vertex_name(v), name, other_name, to),
                    Side::Adam => b.transition(self.vertex_name(v), other_name, name, to),
                };
            }
        }
        b.build()
    }
}

/// String-keyed arena construction with full validation in [`ArenaBuilder::build`].
#[derive(Clone, Debug, Default)]
pub struct ArenaBuilder {
    vertices: Vec<(String, Option<String>, Option<String>, Option<String>)>,
    eve_actions: Vec<(String, Option<String>)>,
    adam_actions: Vec<(String, Option<String>)>,
    transitions: Vec<(String, String, String, Vec<(String, Rational)>)>,
}

pub const WILDCARD: &str = "*";

impl ArenaBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_arena(arena: &Arena) -> Self {
        let mut b = ArenaBuilder::new();
        for v in 0..arena.vertex_count() {
            b.vertex(
                arena.vertex_name(v),
                arena.colour_of(v).map(|c| arena.colours[c].as_str()),
                arena.vertex_signal(Side::Eve, v).map(|s| arena.signal_name(Side::Eve, s)),
                arena.vertex_signal(Side::Adam, v).map(|s| arena.signal_name(Side::Adam, s)),
            );
        }
        for x in 0..arena.action_count(Side::Eve) {
            b.eve_action(
                arena.action_name(Side::Eve, x),
                arena.action_signal(Side::Eve, x).map(|s| arena.signal_name(Side::Eve, s)),
            );
        }
        for y in 0..arena.action_count(Side::Adam) {
            b.adam_action(
                arena.action_name(Side::Adam, y),
                arena.action_signal(Side::Adam, y).map(|s| arena.signal_name(Side::Adam, s)),
            );
        }
        for v in 0..arena.vertex_count() {
            for x in 0..arena.action_count(Side::Eve) {
                for y in 0..arena.action_count(Side::Adam) {
                    let to = arena
                        .transition(v, x, y)
                        .iter()
                        .map(|(&t, w)| (arena.vertex_name(t), w.clone()))
                        .collect::<Vec<_>>();
                    b.transition(
                        arena.vertex_name(v),
                        arena.action_name(Side::Eve, x),
                        arena.action_name(Side::Adam, y),
                        to,
                    );
                }
            }
        }
        b
    }

    pub fn vertex(
        &mut self,
        id: &str,
        colour: Option<&str>,
        eve_signal: Option<&str>,
        adam_signal: Option<&str>,
    ) -> &mut Self {
        self.vertices.push((
            id.to_owned(),
            colour.map(str::to_owned),
            eve_signal.map(str::to_owned),
            adam_signal.map(str::to_owned),
        ));
        self
    }

    pub fn eve_action(&mut self, id: &str, signal: Option<&str>) -> &mut Self {
        self.eve_actions.push((id.to_owned(), signal.map(str::to_owned)));
        self
    }

    pub fn adam_action(&mut self, id: &str, signal: Option<&str>) -> &mut Self {
        self.adam_actions.push((id.to_owned(), signal.map(str::to_owned)));
        self
    }

    /// Adds `δ(from, eve, adam)`. Either action may be [`WILDCARD`], which
    /// expands to every action of that player.
    pub fn transition<S: AsRef<str>>(
        &mut self,
        from: &str,
        eve: &str,
        adam: &str,
        to: impl IntoIterator<Item = (S, Rational)>,
    ) -> &mut Self {
        self.transitions.push((
            from.to_owned(),
            eve.to_owned(),
            adam.to_owned(),
            to.into_iter().map(|(s, w)| (s.as_ref().to_owned(), w)).collect(),
        ));
        self
    }

    pub fn build(&self) -> Result<Arena> {
        if self.vertices.is_empty() {
            return Err(Error::Malformed("arena has no vertices".into()));
        }
        if self.eve_actions.is_empty() || self.adam_actions.is_empty() {
            return Err(Error::Malformed("both players need at least one action".into()));
        }
        let vertex_ix = index_unique(self.vertices.iter().map(|v| v.0.as_str()))?;
        let eve_ix = index_unique(self.eve_actions.iter().map(|a| a.0.as_str()))?;
        let adam_ix = index_unique(self.adam_actions.iter().map(|a| a.0.as_str()))?;
        for name in eve_ix.keys().chain(adam_ix.keys()) {
            if vertex_ix.contains_key(name) {
                return Err(Error::DuplicateId(name.to_string()));
            }
            if *name == WILDCARD {
                return Err(Error::Malformed("`*` is reserved".into()));
            }
        }

        let mut colours = Interner::default();
        let mut eve_signals = Interner::default();
        let mut adam_signals = Interner::default();
        let mut colouring = Vec::new();
        let mut eve_vertex_obs = Vec::new();
        let mut adam_vertex_obs = Vec::new();
        for (_, colour, es, as_) in &self.vertices {
            colouring.push(colour.as_deref().map(|c| colours.intern(c)));
            eve_vertex_obs.push(es.as_deref().map(|s| eve_signals.intern(s)));
            adam_vertex_obs.push(as_.as_deref().map(|s| adam_signals.intern(s)));
        }
        let eve_action_obs: Vec<_> = self
            .eve_actions
            .iter()
            .map(|(_, s)| s.as_deref().map(|s| eve_signals.intern(s)))
            .collect();
        let adam_action_obs: Vec<_> = self
            .adam_actions
            .iter()
            .map(|(_, s)| s.as_deref().map(|s| adam_signals.intern(s)))
            .collect();

        let (nv, nx, ny) = (self.vertices.len(), self.eve_actions.len(), self.adam_actions.len());
        let mut table: Vec<Option<Distribution<VertexId>>> = vec![None; nv * nx * ny];
        let lookup = |ix: &HashMap<&str, usize>, name: &str| {
            ix.get(name)
                .copied()
                .ok_or_else(|| Error::UnknownIdentifier(name.to_owned()))
        };
        let expand = |ix: &HashMap<&str, usize>, name: &str, n: usize| -> Result<Vec<usize>> {
            if name == WILDCARD {
                Ok((0..n).collect())
            } else {
                Ok(vec![lookup(ix, name)?])
            }
        };
        for (from, eve, adam, to) in &self.transitions {
            let v = lookup(&vertex_ix, from)?;
            let targets = to
                .iter()
                .map(|(t, w)| Ok((lookup(&vertex_ix, t)?, w.clone())))
                .collect::<Result<Vec<_>>>()?;
            for x in expand(&eve_ix, eve, nx)? {
                for y in expand(&adam_ix, adam, ny)? {
                    let describe = || {
                        format!(
                            "({}, {}, {})",
                            from, self.eve_actions[x].0, self.adam_actions[y].0
                        )
                    };
                    let dist = Distribution::new(targets.clone()).map_err(|e| match e {
                        Error::NotNormalised(msg) => {
                            Error::NotNormalised(format!("at {}: {}", describe(), msg))
                        }
                        other => other,
                    })?;
                    let slot = &mut table[(v * nx + x) * ny + y];
                    if slot.is_some() {
                        return Err(Error::DuplicateId(format!("transition {}", describe())));
                    }
                    *slot = Some(dist);
                }
            }
        }
        let mut transitions = Vec::with_capacity(table.len());
        for (i, slot) in table.into_iter().enumerate() {
            match slot {
                Some(d) => transitions.push(d),
                None => {
                    let (v, x, y) = (i / (nx * ny), (i / ny) % nx, i % ny);
                    return Err(Error::NonTotal(format!(
                        "no transition for ({}, {}, {})",
                        self.vertices[v].0, self.eve_actions[x].0, self.adam_actions[y].0
                    )));
                }
            }
        }

        Ok(Arena {
            vertices: self.vertices.iter().map(|v| v.0.clone()).collect(),
            colours: colours.names,
            colouring,
            eve: PlayerData {
                actions: self.eve_actions.iter().map(|a| a.0.clone()).collect(),
                signals: eve_signals.names,
                vertex_obs: eve_vertex_obs,
                action_obs: eve_action_obs,
            },
            adam: PlayerData {
                actions: self.adam_actions.iter().map(|a| a.0.clone()).collect(),
                signals: adam_signals.names,
                vertex_obs: adam_vertex_obs,
                action_obs: adam_action_obs,
            },
            transitions,
        })
    }
}

fn index_unique<'a>(names: impl Iterator<Item = &'a str>) -> Result<HashMap<&'a str, usize>> {
    let mut out = HashMap::new();
    for (i, n) in names.enumerate() {
        if out.insert(n, i).is_some() {
            return Err(Error::DuplicateId(n.to_owned()));
        }
    }
    Ok(out)
}

#[derive(Default)]
struct Interner {
    names: Vec<String>,
    index: HashMap<String, usize>,
}

impl Interner {
    fn intern(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), self.names.len() - 1);
        self.names.len() - 1
    }
}

/// Renders a distribution over vertices with vertex names.
pub fn describe_vertex_distribution(arena: &Arena, d: &Distribution<VertexId>) -> String {
    d.iter()
        .map(|(&v, w)| format!("{}: {}", arena.vertex_name(v), format_rational(w)))
        .collect::<Vec<_>>()
        .join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn loop_arena() -> ArenaBuilder {
        let mut b = ArenaBuilder::new();
        b.vertex("q", None, Some("s"), Some("t"))
            .eve_action("x", Some("sx"))
            .adam_action("y", Some("ty"))
            .transition("q", "x", "y", [("q", rat_int(1))]);
        b
    }

    #[test]
    fn single_self_loop_is_valid() {
        let arena = loop_arena().build().unwrap();
        assert_eq!(arena.vertex_count(), 1);
        assert!(arena.is_absorbing(0));
        let class = arena.classify();
        assert!(class.synchronous && class.simple);
    }

    #[test]
    fn rejects_unnormalised_distribution() {
        let mut b = ArenaBuilder::new();
        b.vertex("q", None, None, None)
            .vertex("r", None, None, None)
            .eve_action("x", None)
            .adam_action("y", None)
            .transition("q", "x", "y", [("q", rat(1, 2)), ("r", rat(1, 4))])
            .transition("r", "*", "*", [("r", rat_int(1))]);
        match b.build() {
            Err(Error::NotNormalised(msg)) => assert!(msg.contains("(q, x, y)"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_missing_duplicate_and_unknown() {
        let mut b = loop_arena();
        b.vertex("r", None, None, None);
        assert!(matches!(b.build(), Err(Error::NonTotal(_))));

        let mut b = loop_arena();
        b.transition("q", "x", "y", [("q", rat_int(1))]);
        assert!(matches!(b.build(), Err(Error::DuplicateId(_))));

        let mut b = loop_arena();
        b.vertex("q", None, None, None);
        assert!(matches!(b.build(), Err(Error::DuplicateId(_))));

        let mut b = ArenaBuilder::new();
        b.vertex("q", None, None, None)
            .eve_action("x", None)
            .adam_action("y", None)
            .transition("q", "x", "y", [("nowhere", rat_int(1))]);
        assert_eq!(b.build(), Err(Error::UnknownIdentifier("nowhere".into())));

        let mut b = ArenaBuilder::new();
        b.vertex("q", None, None, None)
            .eve_action("q", None)
            .adam_action("y", None)
            .transition("q", "q", "y", [("q", rat_int(1))]);
        assert!(matches!(b.build(), Err(Error::DuplicateId(_))));
    }

    #[test]
    fn inconsistent_prefix_is_reported() {
        let mut b = ArenaBuilder::new();
        b.vertex("a", None, Some("s"), None)
            .vertex("b", None, Some("s"), None)
            .eve_action("x", None)
            .adam_action("y", None)
            .transition("a", "*", "*", [("b", rat_int(1))])
            .transition("b", "*", "*", [("b", rat_int(1))]);
        let arena = b.build().unwrap();
        let bad = PlayPrefix {
            start: 0,
            steps: vec![(0, 0, 1), (0, 0, 0)],
        };
        assert_eq!(arena.observation_trace(&bad, Side::Eve), Err(Error::InconsistentPrefix(1)));
        let ok = PlayPrefix {
            start: 0,
            steps: vec![(0, 0, 1)],
        };
        assert_eq!(arena.observation_trace(&ok, Side::Eve).unwrap(), vec![0, 0]);
        assert!(arena.observation_trace(&ok, Side::Adam).unwrap().is_empty());
    }
}
