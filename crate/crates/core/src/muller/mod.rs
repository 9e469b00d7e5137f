//! Muller conditions: Zielonka trees, memory bounds and the LAR pipeline
//! for simple deterministic arenas.

pub mod lar;
pub mod parity;
pub mod zielonka;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::arena::{Arena, Side, VertexId};
use crate::conditions::MullerFamily;
use crate::error::{Error, Result};
use crate::rational::Distribution;
use crate::strategy::{Strategy, StrategyKind};

pub use lar::{lar_reduction, LarProduct, LarState};
pub use parity::{solve_parity, ParityGame, ParitySolution};
pub use zielonka::{memory_bounds, zielonka_tree, MemoryBounds, ZielonkaTree};

#[derive(Clone, Debug)]
pub struct MullerSolution {
    pub eve_region: BTreeSet<VertexId>,
    pub adam_region: BTreeSet<VertexId>,
    /// Pure, memory = reachable latest appearance records.
    pub eve_strategy: Strategy,
    pub product_size: usize,
}

/// Solves a Muller game on a simple deterministic arena through its LAR
/// product.
pub fn solve_simple_muller(arena: &Arena, family: &MullerFamily) -> Result<MullerSolution> {
    let product = lar_reduction(arena, family)?;
    let solution = solve_parity(&product.game);
    let (eve_region, adam_region): (BTreeSet<VertexId>, BTreeSet<VertexId>) =
        (0..arena.vertex_count()).partition(|&v| solution.eve_region[product.entry(arena, v)]);

    // Signals are injective on vertices; they must not double as action
    // signals, or updates could not tell a move from an arrival.
    let by_signal: HashMap<usize, VertexId> = (0..arena.vertex_count())
        .map(|v| (arena.vertex_signal(Side::Eve, v).expect("perfect information"), v))
        .collect();
    let action_signals = arena.action_signal_set(Side::Eve);
    if by_signal.keys().any(|s| action_signals.contains(s)) {
        return Err(Error::VertexSignalInsufficient(
            "arrivals, because vertex and action signals overlap".into(),
        ));
    }

    let initial = LarState::initial(product.colour_count);
    let mut records = vec![initial.clone()];
    let mut record_index: BTreeMap<LarState, usize> = BTreeMap::from([(initial, 0)]);
    let mut k = 0;
    while k < records.len() {
        for c in 0..product.colour_count {
            let next = records[k].enter(c);
            if !record_index.contains_key(&next) {
                record_index.insert(next.clone(), records.len());
                records.push(next);
            }
        }
        k += 1;
    }
    let names = records.iter().map(|r| r.render(arena.colours())).collect();
    let vertex_of = |o: Option<usize>| o.and_then(|s| by_signal.get(&s).copied());
    let eve_strategy = Strategy::from_fn(
        arena,
        Side::Eve,
        StrategyKind::Pure,
        names,
        Distribution::dirac(0),
        |o, m| match vertex_of(o) {
            Some(v) => {
                let c = arena.colour_of(v).expect("total colouring");
                Distribution::dirac(record_index[&records[m].enter(c)])
            }
            None => Distribution::dirac(m),
        },
        |o, m| {
            let chosen = vertex_of(o)
                .filter(|&v| arena.controller(v) == Some(Side::Eve))
                .and_then(|v| product.index_of(v, &records[m]))
                .map(|i| {
                    let k = product.game.succ[i]
                        .iter()
                        .position(|&w| w == solution.strategy[i])
                        .expect("strategy picks a successor");
                    product.game.action[i][k]
                });
            Distribution::dirac(chosen.unwrap_or(0))
        },
    )?;
    Ok(MullerSolution {
        eve_region,
        adam_region,
        eve_strategy,
        product_size: product.game.len(),
    })
}
