//! Turn-based parity games (min-even convention) and the recursive
//! attractor-based solver.

use std::collections::BTreeMap;

use crate::arena::{ActionId, Arena, ColourId, Side};
use crate::error::{Error, Result};

/// A parity game on a finite graph. Eve wins a play iff the least priority
/// seen infinitely often is even.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityGame {
    pub owner: Vec<Side>,
    pub priority: Vec<u32>,
    pub succ: Vec<Vec<usize>>,
    /// `action[v][i]`: the owner's action leading to `succ[v][i]`.
    pub action: Vec<Vec<ActionId>>,
}

/// Checks the arena is turn-based with perfect information and Dirac
/// transitions.
pub(crate) fn check_simple_deterministic(arena: &Arena) -> Result<()> {
    let class = arena.classify();
    if !class.perfect_information {
        return Err(Error::NotSimple("observations are not perfect".into()));
    }
    if !class.simple {
        let v = (0..arena.vertex_count()).find(|&v| arena.controller(v).is_none()).unwrap_or(0);
        return Err(Error::NotSimple(format!("both players act at `{}`", arena.vertex_name(v))));
    }
    for v in 0..arena.vertex_count() {
        for x in 0..arena.action_count(Side::Eve) {
            for y in 0..arena.action_count(Side::Adam) {
                if !arena.transition(v, x, y).is_dirac() {
                    return Err(Error::NotDeterministic(arena.vertex_name(v).to_owned()));
                }
            }
        }
    }
    Ok(())
}

/// The successor reached when the controller of `v` plays `a`.
pub(crate) fn move_to(arena: &Arena, v: usize, owner: Side, a: ActionId) -> usize {
    let (x, y) = match owner {
        Side::Eve => (a, 0),
        Side::Adam => (0, a),
    };
    *arena.transition(v, x, y).point().expect("deterministic arena")
}

impl ParityGame {
    pub fn new(owner: Vec<Side>, priority: Vec<u32>, succ: Vec<Vec<usize>>) -> Result<ParityGame> {
        let n = owner.len();
        if priority.len() != n || succ.len() != n {
            return Err(Error::Malformed("owner, priority and successor lists differ in length".into()));
        }
        if let Some(v) = (0..n).find(|&v| succ[v].is_empty() || succ[v].iter().any(|&w| w >= n)) {
            return Err(Error::Malformed(format!("vertex {v} has no valid successor list")));
        }
        let action = succ.iter().map(|s| (0..s.len()).collect()).collect();
        Ok(ParityGame { owner, priority, succ, action })
    }

    /// The game played on a simple deterministic arena whose colours carry
    /// the given priorities.
    pub fn from_arena(arena: &Arena, priorities: &BTreeMap<ColourId, u32>) -> Result<ParityGame> {
        check_simple_deterministic(arena)?;
        let n = arena.vertex_count();
        let mut game = ParityGame { owner: Vec::new(), priority: Vec::new(), succ: Vec::new(), action: Vec::new() };
        for v in 0..n {
            let p = arena
                .colour_of(v)
                .and_then(|c| priorities.get(&c))
                .ok_or_else(|| Error::ColouringNotTotal(arena.vertex_name(v).to_owned()))?;
            let owner = arena.controller(v).expect("simple arena");
            let mut succ = Vec::new();
            let mut action = Vec::new();
            for a in 0..arena.action_count(owner) {
                let w = move_to(arena, v, owner, a);
                if !succ.contains(&w) {
                    succ.push(w);
                    action.push(a);
                }
            }
            game.owner.push(owner);
            game.priority.push(*p);
            game.succ.push(succ);
            game.action.push(action);
        }
        Ok(game)
    }

    pub fn len(&self) -> usize {
        self.owner.len()
    }

    pub fn is_empty(&self) -> bool {
        self.owner.is_empty()
    }
}

/// Winning regions and positional strategies. `strategy[v]` is the chosen
/// successor of `v` for its owner: winning if `v` lies in the owner's
/// region, arbitrary otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParitySolution {
    pub eve_region: Vec<bool>,
    pub strategy: Vec<usize>,
}

impl ParitySolution {
    pub fn winner(&self, v: usize) -> Side {
        if self.eve_region[v] {
            Side::Eve
        } else {
            Side::Adam
        }
    }
}

fn player_of(priority: u32) -> Side {
    if priority % 2 == 0 {
        Side::Eve
    } else {
        Side::Adam
    }
}

/// Attractor of `target` for `player` inside `alive`, with the attracting
/// choices recorded in `strategy`.
fn attractor(
    game: &ParityGame,
    alive: &[bool],
    player: Side,
    target: &[bool],
    strategy: &mut [usize],
) -> Vec<bool> {
    let mut attr = target.to_vec();
    loop {
        let mut changed = false;
        for v in 0..game.len() {
            if !alive[v] || attr[v] {
                continue;
            }
            let mut inside = game.succ[v].iter().filter(|&&w| alive[w]);
            if game.owner[v] == player {
                if let Some(&w) = game.succ[v].iter().find(|&&w| alive[w] && attr[w]) {
                    strategy[v] = w;
                    attr[v] = true;
                    changed = true;
                }
            } else if inside.all(|&w| attr[w]) {
                attr[v] = true;
                changed = true;
            }
        }
        if !changed {
            return attr;
        }
    }
}

/// Returns Eve's region inside `alive`; fills `strategy` for every vertex
/// of `alive` with its owner's winning choice where it wins.
fn zielonka(game: &ParityGame, alive: &[bool], strategy: &mut [usize]) -> Vec<bool> {
    let n = game.len();
    let Some(d) = (0..n).filter(|&v| alive[v]).map(|v| game.priority[v]).min() else {
        return vec![false; n];
    };
    let p = player_of(d);
    let top: Vec<bool> = (0..n).map(|v| alive[v] && game.priority[v] == d).collect();
    // Any successor inside the subgame will do for p at the top vertices.
    for v in (0..n).filter(|&v| top[v] && game.owner[v] == p) {
        strategy[v] = *game.succ[v].iter().find(|&&w| alive[w]).expect("subgames are traps");
    }
    let a = attractor(game, alive, p, &top, strategy);
    let rest: Vec<bool> = (0..n).map(|v| alive[v] && !a[v]).collect();
    let eve_rest = zielonka(game, &rest, strategy);
    let opp_rest: Vec<bool> = (0..n)
        .map(|v| rest[v] && (eve_rest[v] != (p == Side::Eve)))
        .collect();
    if !opp_rest.iter().any(|&b| b) {
        return (0..n).map(|v| alive[v] && p == Side::Eve).collect();
    }
    let b = attractor(game, alive, p.opponent(), &opp_rest, strategy);
    let remaining: Vec<bool> = (0..n).map(|v| alive[v] && !b[v]).collect();
    let eve_remaining = zielonka(game, &remaining, strategy);
    (0..n)
        .map(|v| match p {
            Side::Eve => eve_remaining[v],
            Side::Adam => alive[v] && (b[v] || eve_remaining[v]),
        })
        .collect()
}

pub fn solve_parity(game: &ParityGame) -> ParitySolution {
    let n = game.len();
    let mut strategy: Vec<usize> = game.succ.iter().map(|s| s[0]).collect();
    let eve_region = zielonka(game, &vec![true; n], &mut strategy);
    ParitySolution { eve_region, strategy }
}
