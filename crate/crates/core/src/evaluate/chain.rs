//! The Markov chain obtained by fixing both players' strategies.

use std::collections::{BTreeMap, HashMap, VecDeque};

use num_traits::{One, Zero};

use crate::arena::{ActionId, Arena, ColourId, Side, VertexId};
use crate::conditions::{inf_set_verdict, ColourSet, Condition};
use crate::error::{Error, Result};
use crate::graph::{backward_reachable, sccs};
use crate::rational::{Distribution, Rational};
use crate::strategy::{ExecutionState, Strategy};

use super::linear;

/// A chain state: the token's vertex and both execution states, taken
/// before the signals of `vertex` are delivered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChainState {
    pub vertex: VertexId,
    pub eve: ExecutionState,
    pub adam: ExecutionState,
}

#[derive(Clone, Debug)]
pub struct ProductChain {
    states: Vec<ChainState>,
    start: Distribution<usize>,
    step: Vec<Distribution<usize>>,
    colour: Vec<Option<ColourId>>,
}

pub(crate) fn check_strategy(arena: &Arena, strategy: &Strategy, side: Side) -> Result<()> {
    if strategy.side() != side {
        return Err(Error::WrongSide(format!(
            "expected a strategy for {side}, got one for {}",
            strategy.side()
        )));
    }
    if !strategy.fits(arena) {
        return Err(Error::Malformed(format!(
            "{side} strategy does not match the arena's actions and signals"
        )));
    }
    Ok(())
}

pub(crate) fn check_vertex(arena: &Arena, v: VertexId) -> Result<()> {
    if v >= arena.vertex_count() {
        return Err(Error::UnknownIdentifier(format!("vertex {v}")));
    }
    Ok(())
}

/// One move of a player standing at `v`: receive the vertex signal, choose
/// an action, receive the action signal. Yields (action, new state).
pub fn player_move(
    arena: &Arena,
    strategy: &Strategy,
    v: VertexId,
    state: ExecutionState,
) -> Distribution<(ActionId, ExecutionState)> {
    let side = strategy.side();
    strategy
        .observe_opt(state, arena.vertex_signal(side, v))
        .flat_map(|seen| {
            strategy.action(*seen).flat_map(|&a| {
                strategy
                    .observe_opt(*seen, arena.action_signal(side, a))
                    .map(|after| (a, *after))
            })
        })
}

fn chain_step(arena: &Arena, eve: &Strategy, adam: &Strategy, s: &ChainState) -> Distribution<ChainState> {
    player_move(arena, eve, s.vertex, s.eve).flat_map(|&(x, e)| {
        player_move(arena, adam, s.vertex, s.adam).flat_map(|&(y, a)| {
            arena
                .transition(s.vertex, x, y)
                .map(|&vertex| ChainState { vertex, eve: e, adam: a })
        })
    })
}

/// Explores the chain reachable from `start_vertex` under `eve` and `adam`.
pub fn product_chain(
    arena: &Arena,
    eve: &Strategy,
    adam: &Strategy,
    start_vertex: VertexId,
) -> Result<ProductChain> {
    check_strategy(arena, eve, Side::Eve)?;
    check_strategy(arena, adam, Side::Adam)?;
    check_vertex(arena, start_vertex)?;

    let initial = eve.initial_states().flat_map(|&e| {
        adam.initial_states().map(|&a| ChainState { vertex: start_vertex, eve: e, adam: a })
    });
    let mut index: HashMap<ChainState, usize> = HashMap::new();
    let mut states = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |s: ChainState, states: &mut Vec<ChainState>, queue: &mut VecDeque<usize>| {
        *index.entry(s).or_insert_with(|| {
            states.push(s);
            queue.push_back(states.len() - 1);
            states.len() - 1
        })
    };
    let start = initial.map(|s| intern(*s, &mut states, &mut queue));
    let mut step: Vec<Option<Distribution<usize>>> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let next = chain_step(arena, eve, adam, &states[i]);
        let d = next.map(|s| intern(*s, &mut states, &mut queue));
        if step.len() <= i {
            step.resize(i + 1, None);
        }
        step[i] = Some(d);
    }
    let step: Vec<_> = step.into_iter().map(|d| d.expect("every state explored")).collect();
    let colour = states.iter().map(|s| arena.colour_of(s.vertex)).collect();
    Ok(ProductChain { states, start, step, colour })
}

impl ProductChain {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[ChainState] {
        &self.states
    }

    pub fn start(&self) -> &Distribution<usize> {
        &self.start
    }

    pub fn step(&self, i: usize) -> &Distribution<usize> {
        &self.step[i]
    }

    pub fn colour(&self, i: usize) -> Option<ColourId> {
        self.colour[i]
    }

    fn successors(&self, i: usize) -> Vec<usize> {
        self.step[i].support().copied().collect()
    }

    fn coloured_in(&self, set: ColourSet) -> Vec<bool> {
        self.colour.iter().map(|c| c.is_some_and(|c| set.contains(c))).collect()
    }

    /// Probability of each vertex sequence of length `1..=max_len` starting
    /// the play (the cones of the play measure).
    pub fn cylinder_probabilities(&self, max_len: usize) -> BTreeMap<Vec<VertexId>, Rational> {
        let mut out = BTreeMap::new();
        if max_len == 0 {
            return out;
        }
        let mut frontier: BTreeMap<(Vec<VertexId>, usize), Rational> = BTreeMap::new();
        for (&s, p) in self.start.iter() {
            *frontier.entry((vec![self.states[s].vertex], s)).or_insert_with(Rational::zero) += p;
        }
        for len in 1..=max_len {
            for ((prefix, _), p) in &frontier {
                *out.entry(prefix.clone()).or_insert_with(Rational::zero) += p;
            }
            if len == max_len {
                break;
            }
            let mut next: BTreeMap<(Vec<VertexId>, usize), Rational> = BTreeMap::new();
            for ((prefix, s), p) in frontier {
                for (&t, q) in self.step[s].iter() {
                    let mut longer = prefix.clone();
                    longer.push(self.states[t].vertex);
                    *next.entry((longer, t)).or_insert_with(Rational::zero) += &p * q;
                }
            }
            frontier = next;
        }
        out
    }

    /// Per-state probability of eventually hitting a state in `target`.
    pub fn reach_values(&self, target: &[bool]) -> Vec<Rational> {
        let n = self.len();
        let can = backward_reachable(n, |i| self.successors(i), target);
        let mut value: Vec<Option<Rational>> = (0..n)
            .map(|i| {
                if target[i] {
                    Some(Rational::one())
                } else if !can[i] {
                    Some(Rational::zero())
                } else {
                    None
                }
            })
            .collect();
        // Components come sinks first, so every successor outside the
        // current component is already solved.
        for comp in sccs(n, &vec![true; n], |i| self.successors(i)) {
            let unknown: Vec<usize> = comp.into_iter().filter(|&i| value[i].is_none()).collect();
            if unknown.is_empty() {
                continue;
            }
            let pos: HashMap<usize, usize> = unknown.iter().enumerate().map(|(k, &i)| (i, k)).collect();
            let m = unknown.len();
            let mut a = vec![vec![Rational::zero(); m]; m];
            let mut b = vec![Rational::zero(); m];
            for (k, &i) in unknown.iter().enumerate() {
                a[k][k] += Rational::one();
                for (&j, p) in self.step[i].iter() {
                    match pos.get(&j) {
                        Some(&l) => a[k][l] -= p,
                        None => b[k] += p * value[j].as_ref().expect("solved earlier"),
                    }
                }
            }
            for (k, x) in linear::solve(a, b).into_iter().enumerate() {
                value[unknown[k]] = Some(x);
            }
        }
        value.into_iter().map(|v| v.expect("all states solved")).collect()
    }

    /// Bottom strongly connected components with their colour sets.
    pub fn bottom_components(&self) -> Vec<(Vec<usize>, ColourSet)> {
        let n = self.len();
        let comps = sccs(n, &vec![true; n], |i| self.successors(i));
        let mut comp_of = vec![0; n];
        for (k, c) in comps.iter().enumerate() {
            for &i in c {
                comp_of[i] = k;
            }
        }
        comps
            .iter()
            .enumerate()
            .filter(|(k, c)| c.iter().all(|&i| self.step[i].support().all(|&j| comp_of[j] == *k)))
            .map(|(_, c)| {
                let colours = c.iter().filter_map(|&i| self.colour[i]).collect();
                (c.clone(), colours)
            })
            .collect()
    }

    /// Per-state probability that the play from that state satisfies `condition`.
    pub fn state_values(&self, condition: &Condition) -> Vec<Rational> {
        match condition {
            Condition::Reach(t) => self.reach_values(&self.coloured_in(*t)),
            Condition::Safety(bad) => self
                .reach_values(&self.coloured_in(*bad))
                .into_iter()
                .map(|p| Rational::one() - p)
                .collect(),
            _ => {
                let mut good = vec![false; self.len()];
                for (comp, colours) in self.bottom_components() {
                    if inf_set_verdict(condition, colours, colours) {
                        for i in comp {
                            good[i] = true;
                        }
                    }
                }
                self.reach_values(&good)
            }
        }
    }
}

/// Exact probability that a play of the chain satisfies `condition`.
pub fn chain_probability(chain: &ProductChain, condition: &Condition) -> Rational {
    let values = chain.state_values(condition);
    chain.start.iter().map(|(&s, p)| p * &values[s]).sum()
}
