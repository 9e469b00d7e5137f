//! Built-in example games and the strategies that go with them.

use crate::arena::{Arena, Side};
use crate::conditions::{Condition, MullerFamily};
use crate::document::{parse_arena, parse_condition_doc};
use crate::error::{Error, Result};
use crate::rational::{Distribution, Rational};
use crate::strategy::{Strategy, StrategyKind};

pub const ARENAS: [&str; 4] = ["janken", "fig1", "dui", "snowball"];
pub const CONDITIONS: [&str; 1] = ["fig5-muller"];

pub fn source(name: &str) -> Option<&'static str> {
    Some(match name {
        "janken" => include_str!("../gallery/janken.json"),
        "fig1" => include_str!("../gallery/fig1.json"),
        "dui" => include_str!("../gallery/dui.json"),
        "snowball" => include_str!("../gallery/snowball.json"),
        "fig5-muller" => include_str!("../gallery/fig5-muller.json"),
        _ => return None,
    })
}

pub fn arena(name: &str) -> Result<Arena> {
    match source(name) {
        Some(text) if ARENAS.contains(&name) => parse_arena(text),
        _ => Err(Error::UnknownIdentifier(format!("gallery arena `{name}`"))),
    }
}

pub fn janken() -> Arena {
    arena("janken").expect("gallery file is valid")
}

/// Eve cannot tell vertices or her own actions apart; Adam sees vertices.
pub fn fig1() -> Arena {
    arena("fig1").expect("gallery file is valid")
}

/// Nobody observes anything; Adam has a single action.
pub fn dui() -> Arena {
    arena("dui").expect("gallery file is valid")
}

pub fn snowball() -> Arena {
    arena("snowball").expect("gallery file is valid")
}

/// The four-colour Muller condition: its colour names and family.
pub fn fig5_condition() -> (Vec<String>, MullerFamily) {
    let doc = parse_condition_doc(source("fig5-muller").unwrap()).expect("gallery file is valid");
    match Condition::parse(&doc.condition, &doc.colours).expect("gallery condition is valid") {
        Condition::Muller(f) => (doc.colours, f),
        _ => unreachable!("fig5-muller holds a Muller condition"),
    }
}

/// Memoryless, uniform over all actions whatever was observed.
pub fn uniform_behavioural(arena: &Arena, side: Side) -> Strategy {
    let n = arena.action_count(side);
    Strategy::memoryless(arena, side, StrategyKind::Behavioural, |_| Distribution::uniform(0..n))
        .expect("uniform strategy is well formed")
}

/// Always plays `action`.
pub fn constant(arena: &Arena, side: Side, action: &str) -> Result<Strategy> {
    let a = arena
        .action_index(side, action)
        .ok_or_else(|| Error::UnknownIdentifier(action.to_owned()))?;
    Strategy::memoryless(arena, side, StrategyKind::Pure, |_| Distribution::dirac(a))
}

/// Memoryless behavioural strategy playing `action` with probability `p` and
/// spreading the rest uniformly over the other actions.
pub fn biased(arena: &Arena, side: Side, action: &str, p: Rational) -> Result<Strategy> {
    let a = arena
        .action_index(side, action)
        .ok_or_else(|| Error::UnknownIdentifier(action.to_owned()))?;
    let n = arena.action_count(side);
    let rest = if n > 1 {
        (Rational::from_integer(1.into()) - &p) / Rational::from_integer(((n - 1) as i64).into())
    } else {
        Rational::from_integer(0.into())
    };
    let dist = Distribution::new((0..n).map(|b| (b, if b == a { p.clone() } else { rest.clone() })))?;
    Strategy::memoryless(arena, side, StrategyKind::Behavioural, |_| dist.clone())
}

/// Eve's general strategy on [`fig1`] with memory `a_even, a_odd, b_even,
/// b_odd`: on a vertex signal an even state moves uniformly to one of the odd
/// states and an odd state moves to the matching even state; action signals
/// leave the memory alone. The letter of the state is always played, so
/// from `init` she plays `aa` or `bb` with probability one half each.
pub fn four_memory_fig1(arena: &Arena) -> Result<Strategy> {
    let a = arena
        .action_index(Side::Eve, "a")
        .ok_or_else(|| Error::UnknownIdentifier("a".into()))?;
    let b = arena
        .action_index(Side::Eve, "b")
        .ok_or_else(|| Error::UnknownIdentifier("b".into()))?;
    let vertex_signals = arena.vertex_signal_set(Side::Eve);
    if vertex_signals.iter().any(|s| arena.action_signal_set(Side::Eve).contains(s)) {
        return Err(Error::VertexSignalInsufficient(
            "the parity of the play (vertex and action signals coincide)".into(),
        ));
    }
    // 0 = a_even, 1 = a_odd, 2 = b_even, 3 = b_odd
    let memory = ["a_even", "a_odd", "b_even", "b_odd"].map(String::from).to_vec();
    Strategy::from_fn(
        arena,
        Side::Eve,
        StrategyKind::General,
        memory,
        Distribution::uniform([0, 2]),
        |o, m| match o {
            Some(s) if vertex_signals.contains(&s) => {
                if m % 2 == 0 {
                    Distribution::uniform([1, 3])
                } else {
                    Distribution::dirac(m - 1)
                }
            }
            _ => Distribution::dirac(m),
        },
        |_, m| Distribution::dirac(if m < 2 { a } else { b }),
    )
}

/// Adam on [`snowball`]: hide until the `t`-th move (counting from 1), run then.
pub fn run_at_step(arena: &Arena, t: usize) -> Result<Strategy> {
    let run = arena
        .action_index(Side::Adam, "run")
        .ok_or_else(|| Error::UnknownIdentifier("run".into()))?;
    let hide = arena
        .action_index(Side::Adam, "hide")
        .ok_or_else(|| Error::UnknownIdentifier("hide".into()))?;
    let vertex_signals = arena.vertex_signal_set(Side::Adam);
    Strategy::from_fn(
        arena,
        Side::Adam,
        StrategyKind::Pure,
        (0..=t).map(|c| format!("seen{c}")).collect(),
        Distribution::dirac(0),
        |o, m| match o {
            Some(s) if vertex_signals.contains(&s) => Distribution::dirac((m + 1).min(t)),
            _ => Distribution::dirac(m),
        },
        |_, m| Distribution::dirac(if m == t { run } else { hide }),
    )
}
