//! Best responses against a fixed strategy: the opponent controls an MDP
//! and sees everything, including the fixed player's memory.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::arena::{Arena, ColourId, Side, VertexId};
use crate::conditions::{ColourSet, Condition};
use crate::error::{Error, Result};
use crate::graph::{backward_reachable, SupportGraph};
use crate::rational::{to_f64, Distribution};
use crate::strategy::{ExecutionState, Strategy};

use super::chain::{check_strategy, check_vertex};

pub const TOLERANCE: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 1_000_000;

/// The fixed player's state has already absorbed the signal of `vertex`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductState {
    pub vertex: VertexId,
    pub fixed: ExecutionState,
}

#[derive(Clone, Debug)]
pub struct AdversarialProduct {
    controller: Side,
    states: Vec<ProductState>,
    start: Distribution<usize>,
    moves: Vec<Vec<Distribution<usize>>>,
    colour: Vec<Option<ColourId>>,
}

/// Builds the MDP in which the opponent of `fixed` picks an action at every
/// state with full knowledge of the current product state.
pub fn best_response_product(
    arena: &Arena,
    fixed: &Strategy,
    start_vertex: VertexId,
) -> Result<AdversarialProduct> {
    let side = fixed.side();
    check_strategy(arena, fixed, side)?;
    check_vertex(arena, start_vertex)?;
    let controller = side.opponent();
    let free_actions = arena.action_count(controller);

    let mut index: HashMap<ProductState, usize> = HashMap::new();
    let mut states = Vec::new();
    let mut queue = VecDeque::new();
    let mut intern = |s: ProductState, states: &mut Vec<ProductState>, queue: &mut VecDeque<usize>| {
        *index.entry(s).or_insert_with(|| {
            states.push(s);
            queue.push_back(states.len() - 1);
            states.len() - 1
        })
    };
    let arrive = |v: VertexId, e: &ExecutionState| {
        fixed
            .observe_opt(*e, arena.vertex_signal(side, v))
            .map(|&fixed| ProductState { vertex: v, fixed })
    };
    let start = fixed
        .initial_states()
        .flat_map(|e| arrive(start_vertex, e))
        .map(|s| intern(*s, &mut states, &mut queue));
    let mut moves: Vec<Vec<Distribution<usize>>> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let s = states[i];
        // The vertex signal is already absorbed: draw the action directly.
        let own = fixed.action(s.fixed).flat_map(|&a| {
            fixed
                .observe_opt(s.fixed, arena.action_signal(side, a))
                .map(|&e| (a, e))
        });
        let row: Vec<Distribution<usize>> = (0..free_actions)
            .map(|c| {
                own.flat_map(|&(a, e)| {
                    let (x, y) = match side {
                        Side::Eve => (a, c),
                        Side::Adam => (c, a),
                    };
                    arena.transition(s.vertex, x, y).flat_map(|&v| arrive(v, &e))
                })
                .map(|t| intern(*t, &mut states, &mut queue))
            })
            .collect();
        if moves.len() <= i {
            moves.resize(i + 1, Vec::new());
        }
        moves[i] = row;
    }
    let colour = states.iter().map(|s| arena.colour_of(s.vertex)).collect();
    Ok(AdversarialProduct { controller, states, start, moves, colour })
}

impl AdversarialProduct {
    /// The free side, who picks actions in this MDP.
    pub fn controller(&self) -> Side {
        self.controller
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[ProductState] {
        &self.states
    }

    pub fn start(&self) -> &Distribution<usize> {
        &self.start
    }

    pub fn moves(&self, i: usize) -> &[Distribution<usize>] {
        &self.moves[i]
    }

    pub fn colour(&self, i: usize) -> Option<ColourId> {
        self.colour[i]
    }

    /// States reachable from the start under some choice of the controller.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.len()];
        let mut stack: Vec<usize> = self.start.support().copied().collect();
        for &s in &stack {
            seen[s] = true;
        }
        while let Some(s) = stack.pop() {
            for d in &self.moves[s] {
                for &t in d.support() {
                    if !seen[t] {
                        seen[t] = true;
                        stack.push(t);
                    }
                }
            }
        }
        seen
    }

    fn support_graph(&self) -> SupportGraph {
        SupportGraph {
            succ: self
                .moves
                .iter()
                .map(|row| row.iter().map(|d| d.support().copied().collect()).collect())
                .collect(),
        }
    }

    fn coloured_in(&self, set: ColourSet) -> Vec<bool> {
        self.colour.iter().map(|c| c.is_some_and(|c| set.contains(c))).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Optimise {
    Max,
    Min,
}

impl Optimise {
    fn flip(self) -> Optimise {
        match self {
            Optimise::Max => Optimise::Min,
            Optimise::Min => Optimise::Max,
        }
    }
}

impl fmt::Display for Optimise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Optimise::Max => "max",
            Optimise::Min => "min",
        })
    }
}

impl FromStr for Optimise {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" => Ok(Optimise::Max),
            "min" => Ok(Optimise::Min),
            other => Err(Error::Malformed(format!("unknown optimisation mode `{other}`"))),
        }
    }
}

/// Optimal values of the controller for a condition, per product state.
#[derive(Clone, Debug)]
pub struct MdpSolution {
    pub values: Vec<f64>,
    /// States whose optimal value is exactly 1.
    pub value_one: Vec<bool>,
    /// States whose optimal value is exactly 0.
    pub value_zero: Vec<bool>,
    pub iterations: usize,
    start: Distribution<usize>,
}

impl MdpSolution {
    /// Value of the start distribution.
    pub fn initial_value(&self) -> f64 {
        self.start.iter().map(|(&s, p)| to_f64(p) * self.values[s]).sum()
    }

    pub fn initial_value_one(&self) -> bool {
        self.start.support().all(|&s| self.value_one[s])
    }

    pub fn initial_value_zero(&self) -> bool {
        self.start.support().all(|&s| self.value_zero[s])
    }

    fn complement(self) -> MdpSolution {
        MdpSolution {
            values: self.values.iter().map(|v| 1.0 - v).collect(),
            value_one: self.value_zero,
            value_zero: self.value_one,
            iterations: self.iterations,
            start: self.start,
        }
    }
}

struct Solver<'a> {
    product: &'a AdversarialProduct,
    graph: SupportGraph,
    probs: Vec<Vec<Vec<(usize, f64)>>>,
}

impl Solver<'_> {
    fn reach(&self, target: &[bool], mode: Optimise) -> MdpSolution {
        let n = self.product.len();
        let (one, zero) = match mode {
            Optimise::Max => {
                let positive = self.graph.positive_reach(target);
                (self.graph.almost_sure_reach(target), positive.iter().map(|p| !p).collect::<Vec<_>>())
            }
            Optimise::Min => {
                let avoid = self.graph.sure_avoid(target);
                // Positive chance of escaping to `avoid` without touching target.
                let escape = backward_reachable(
                    n,
                    |s| {
                        if target[s] {
                            Vec::new()
                        } else {
                            self.graph.succ[s].iter().flatten().copied().collect()
                        }
                    },
                    &avoid,
                );
                (escape.iter().map(|e| !e).collect(), avoid)
            }
        };
        let mut values: Vec<f64> = (0..n).map(|s| if one[s] { 1.0 } else { 0.0 }).collect();
        let mut iterations = 0;
        while iterations < MAX_ITERATIONS {
            iterations += 1;
            let mut delta: f64 = 0.0;
            for s in 0..n {
                if one[s] || zero[s] {
                    continue;
                }
                let choices = self.probs[s]
                    .iter()
                    .map(|row| row.iter().map(|&(t, p)| p * values[t]).sum::<f64>());
                let v = match mode {
                    Optimise::Max => choices.fold(f64::NEG_INFINITY, f64::max),
                    Optimise::Min => choices.fold(f64::INFINITY, f64::min),
                };
                delta = delta.max((v - values[s]).abs());
                values[s] = v;
            }
            if delta < TOLERANCE {
                break;
            }
        }
        MdpSolution {
            values,
            value_one: one,
            value_zero: zero,
            iterations,
            start: self.product.start.clone(),
        }
    }

    /// Max probability of visiting `target` infinitely often.
    fn buchi_max(&self, target: &[bool]) -> MdpSolution {
        let n = self.product.len();
        let mut good = vec![false; n];
        for mec in self.graph.mecs(&vec![true; n]) {
            if mec.iter().any(|&s| target[s]) {
                mec.iter().for_each(|&s| good[s] = true);
            }
        }
        self.reach(&good, Optimise::Max)
    }

    /// Max probability of eventually avoiding `bad` forever.
    fn cobuchi_max(&self, bad: &[bool]) -> MdpSolution {
        let n = self.product.len();
        let allowed: Vec<bool> = bad.iter().map(|b| !b).collect();
        let mut good = vec![false; n];
        for mec in self.graph.mecs(&allowed) {
            mec.iter().for_each(|&s| good[s] = true);
        }
        self.reach(&good, Optimise::Max)
    }
}

/// Optimal value of the product's controller for `condition`.
pub fn mdp_optimal(product: &AdversarialProduct, condition: &Condition, mode: Optimise) -> Result<MdpSolution> {
    let solver = Solver {
        product,
        graph: product.support_graph(),
        probs: product
            .moves
            .iter()
            .map(|row| {
                row.iter()
                    .map(|d| d.iter().map(|(&t, p)| (t, to_f64(p))).collect())
                    .collect()
            })
            .collect(),
    };
    Ok(match (condition, mode) {
        (Condition::Reach(t), mode) => solver.reach(&product.coloured_in(*t), mode),
        (Condition::Safety(b), mode) => solver.reach(&product.coloured_in(*b), mode.flip()).complement(),
        (Condition::Buchi(t), Optimise::Max) => solver.buchi_max(&product.coloured_in(*t)),
        (Condition::Buchi(t), Optimise::Min) => solver.cobuchi_max(&product.coloured_in(*t)).complement(),
        (Condition::CoBuchi(b), Optimise::Max) => solver.cobuchi_max(&product.coloured_in(*b)),
        (Condition::CoBuchi(b), Optimise::Min) => solver.buchi_max(&product.coloured_in(*b)).complement(),
        (other, _) => {
            return Err(Error::UnsupportedCondition(format!(
                "{} objectives are not solved on adversarial products",
                other.name()
            )))
        }
    })
}
