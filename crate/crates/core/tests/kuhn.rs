//! Mixed and behavioural strategies on fig1 style arenas.

use randstrat::document::parse_arena;
use randstrat::kuhn::{behavioural_to_mixed, kuhn_translate};
use randstrat::rational::rat;
use randstrat::strategy::mixed_from_support;
use randstrat::{gallery, Arena, Distribution, ExecutionState, Side, Strategy, StrategyKind};

/// fig1 where Eve sees which action she played.
fn fig1_observable() -> Arena {
    let text = gallery::source("fig1")
        .unwrap()
        .replace(r#"{"id": "a", "eve_signal": "s'"}"#, r#"{"id": "a", "eve_signal": "sa"}"#)
        .replace(r#"{"id": "b", "eve_signal": "s'"}"#, r#"{"id": "b", "eve_signal": "sb"}"#);
    parse_arena(&text).unwrap()
}

fn signal(arena: &Arena, name: &str) -> usize {
    arena.signal_index(Side::Eve, name).unwrap()
}

/// Action distribution after feeding `signals` from the initial states.
fn action_after(s: &Strategy, signals: &[usize]) -> Distribution<usize> {
    let mut states = s.initial_states();
    for &sig in signals {
        states = states.flat_map(|&st: &ExecutionState| s.observe(st, sig));
    }
    states.flat_map(|&st| s.action(st).clone())
}

fn aa_bb(arena: &Arena) -> Strategy {
    let a = gallery::constant(arena, Side::Eve, "a").unwrap();
    let b = gallery::constant(arena, Side::Eve, "b").unwrap();
    mixed_from_support(Side::Eve, &[(rat(1, 2), &a), (rat(1, 2), &b)]).unwrap()
}

#[test]
fn first_action_is_a_coin_and_the_second_repeats_it() {
    let arena = fig1_observable();
    assert!(arena.classify().observable_actions);
    let out = kuhn_translate(&aa_bb(&arena), &arena, 2).unwrap();
    let s = out.strategy;
    assert_eq!(s.kind(), StrategyKind::Behavioural);
    let (sig, sa, sb) = (signal(&arena, "s"), signal(&arena, "sa"), signal(&arena, "sb"));
    assert_eq!(action_after(&s, &[sig]), Distribution::uniform([0, 1]));
    assert_eq!(action_after(&s, &[sig, sa, sig]), Distribution::dirac(0));
    assert_eq!(action_after(&s, &[sig, sb, sig]), Distribution::dirac(1));
}

#[test]
fn histories_mixing_both_actions_are_reported() {
    let arena = fig1_observable();
    // Decision points at horizon 3 include `s.sa.s.sb.s`, which neither
    // component produces.
    let out = kuhn_translate(&aa_bb(&arena), &arena, 3).unwrap();
    let (sa, sb) = (signal(&arena, "sa"), signal(&arena, "sb"));
    assert!(!out.zero_probability.is_empty());
    for h in &out.zero_probability {
        assert!(h.contains(&sa) && h.contains(&sb), "{h:?} is explained by a component");
    }
}

#[test]
fn single_component_translates_to_itself() {
    let arena = fig1_observable();
    let a = gallery::constant(&arena, Side::Eve, "a").unwrap();
    let mixed = mixed_from_support(Side::Eve, &[(rat(1, 1), &a)]).unwrap();
    let s = kuhn_translate(&mixed, &arena, 2).unwrap().strategy;
    let sig = signal(&arena, "s");
    let sa = signal(&arena, "sa");
    assert_eq!(action_after(&s, &[sig]), Distribution::dirac(0));
    assert_eq!(action_after(&s, &[sig, sa, sig]), Distribution::dirac(0));
}

#[test]
fn length_dependent_coin_expands_into_four_components() {
    let arena = gallery::fig1();
    let coin = gallery::uniform_behavioural(&arena, Side::Eve);
    let mixed = behavioural_to_mixed(&coin, &arena, 2).unwrap();
    let weights: Vec<_> = mixed.init().iter().map(|(_, p)| p.clone()).collect();
    assert_eq!(weights, vec![rat(1, 4); 4]);
}
