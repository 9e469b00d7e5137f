//! Latest appearance records: Muller games as parity games.

use std::collections::{HashMap, VecDeque};

use crate::arena::{Arena, ColourId, VertexId};
use crate::conditions::{validate_family, ColourSet, MullerFamily};
use crate::error::{Error, Result};

use super::parity::{check_simple_deterministic, move_to, ParityGame};

/// Colours ordered by most recent visit, and the position the last visited
/// colour held before it moved to the front.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LarState {
    pub order: Vec<ColourId>,
    pub hit: usize,
}

impl LarState {
    /// Colours in index order, hit 0.
    pub fn initial(colour_count: usize) -> LarState {
        LarState { order: (0..colour_count).collect(), hit: 0 }
    }

    /// Records a visit to colour `c`.
    pub fn enter(&self, c: ColourId) -> LarState {
        let hit = self.order.iter().position(|&d| d == c).expect("colour in the record");
        let mut order = Vec::with_capacity(self.order.len());
        order.push(c);
        order.extend(self.order.iter().copied().filter(|&d| d != c));
        LarState { order, hit }
    }

    /// The colours at positions `0..=hit`: the same set before and after
    /// the move to the front.
    pub fn hit_set(&self) -> ColourSet {
        self.order[..=self.hit].iter().copied().collect()
    }

    /// Min-even priority. A larger hit set dominates, so it gets a smaller
    /// priority, even iff the hit set belongs to `F`.
    pub fn priority(&self, family: &MullerFamily) -> u32 {
        let p = (self.hit + 1) as u32;
        let n = self.order.len() as u32;
        2 * (n - p) + u32::from(!family.contains(&self.hit_set()))
    }

    pub fn render(&self, colours: &[String]) -> String {
        let names: Vec<&str> = self.order.iter().map(|&c| colours[c].as_str()).collect();
        format!("{}/{}", names.join(""), self.hit)
    }
}

/// The parity game over `V x LarState` together with the meaning of its
/// vertices.
#[derive(Clone, Debug)]
pub struct LarProduct {
    pub game: ParityGame,
    pub states: Vec<(VertexId, LarState)>,
    index: HashMap<(VertexId, LarState), usize>,
    pub colour_count: usize,
}

impl LarProduct {
    pub fn index_of(&self, v: VertexId, lar: &LarState) -> Option<usize> {
        self.index.get(&(v, lar.clone())).copied()
    }

    /// The product vertex where a play starting at `v` begins.
    pub fn entry(&self, arena: &Arena, v: VertexId) -> usize {
        let c = arena.colour_of(v).expect("total colouring");
        self.index_of(v, &LarState::initial(self.colour_count).enter(c))
            .expect("every vertex is an entry")
    }
}

/// Builds the LAR product of a simple deterministic arena with total
/// colouring. Vertices are `(v, record after entering v)`.
pub fn lar_reduction(arena: &Arena, family: &MullerFamily) -> Result<LarProduct> {
    check_simple_deterministic(arena)?;
    let colour_count = arena.colours().len();
    validate_family(family, colour_count)?;
    let colour = |v: VertexId| {
        arena
            .colour_of(v)
            .ok_or_else(|| Error::ColouringNotTotal(arena.vertex_name(v).to_owned()))
    };
    for v in 0..arena.vertex_count() {
        colour(v)?;
    }
    let initial = LarState::initial(colour_count);
    let mut states: Vec<(VertexId, LarState)> = Vec::new();
    let mut index = HashMap::new();
    let mut queue = VecDeque::new();
    let mut intern = |key: (VertexId, LarState), states: &mut Vec<_>, queue: &mut VecDeque<usize>| {
        *index.entry(key.clone()).or_insert_with(|| {
            states.push(key);
            queue.push_back(states.len() - 1);
            states.len() - 1
        })
    };
    for v in 0..arena.vertex_count() {
        intern((v, initial.enter(colour(v)?)), &mut states, &mut queue);
    }
    let mut game = ParityGame { owner: Vec::new(), priority: Vec::new(), succ: Vec::new(), action: Vec::new() };
    while let Some(i) = queue.pop_front() {
        let (v, lar) = states[i].clone();
        let owner = arena.controller(v).expect("simple arena");
        let mut succ = Vec::new();
        let mut action = Vec::new();
        for a in 0..arena.action_count(owner) {
            let w = move_to(arena, v, owner, a);
            let j = intern((w, lar.enter(colour(w)?)), &mut states, &mut queue);
            if !succ.contains(&j) {
                succ.push(j);
                action.push(a);
            }
        }
        if game.owner.len() <= i {
            game.owner.resize(i + 1, owner);
            game.priority.resize(i + 1, 0);
            game.succ.resize(i + 1, Vec::new());
            game.action.resize(i + 1, Vec::new());
        }
        game.owner[i] = owner;
        game.priority[i] = lar.priority(family);
        game.succ[i] = succ;
        game.action[i] = action;
    }
    Ok(LarProduct { game, states, index, colour_count })
}
