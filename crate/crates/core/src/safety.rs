//! Concurrent safety games: Adam's almost-sure region, the class preorder
//! on the rest of the arena and Eve's two-mode positive strategy.

use std::collections::{BTreeMap, BTreeSet};

use crate::arena::{ActionId, Arena, Side, VertexId};
use crate::error::{Error, Result};
use crate::evaluate::{belief_support_mdp, pomdp_qualitative, Question};
use crate::rational::Distribution;
use crate::strategy::{Strategy, StrategyKind};

fn check_absorbing(arena: &Arena, bad: &BTreeSet<VertexId>) -> Result<()> {
    for &v in bad {
        if v >= arena.vertex_count() {
            return Err(Error::UnknownIdentifier(format!("vertex {v}")));
        }
        if !arena.is_absorbing(v) {
            return Err(Error::BadNotAbsorbing(arena.vertex_name(v).to_owned()));
        }
    }
    Ok(())
}

fn support_within(arena: &Arena, q: VertexId, x: ActionId, y: ActionId, set: &[bool]) -> bool {
    arena.transition(q, x, y).support().all(|&r| set[r])
}

fn support_meets(arena: &Arena, q: VertexId, x: ActionId, y: ActionId, set: &[bool]) -> bool {
    arena.transition(q, x, y).support().any(|&r| set[r])
}

/// Adam can pick a support `A` such that whatever Eve plays the token stays
/// in `y_set` and moves into `x_set` with positive probability.
fn apre(arena: &Arena, q: VertexId, y_set: &[bool], x_set: &[bool]) -> bool {
    let ny = arena.action_count(Side::Adam);
    let nx = arena.action_count(Side::Eve);
    (1u64..(1u64 << ny)).any(|mask| {
        let chosen = || (0..ny).filter(move |y| mask >> y & 1 == 1);
        (0..nx).all(|x| {
            chosen().all(|y| support_within(arena, q, x, y, y_set))
                && chosen().any(|y| support_meets(arena, q, x, y, x_set))
        })
    })
}

/// Vertices from which Adam reaches `bad` with probability one whatever Eve
/// does.
pub fn adam_almost_sure_reach_region(arena: &Arena, bad: &BTreeSet<VertexId>) -> Result<BTreeSet<VertexId>> {
    check_absorbing(arena, bad)?;
    let n = arena.vertex_count();
    let mut y_set = vec![true; n];
    loop {
        let mut x_set: Vec<bool> = (0..n).map(|v| bad.contains(&v)).collect();
        loop {
            let grown: Vec<usize> = (0..n)
                .filter(|&q| !x_set[q] && y_set[q] && apre(arena, q, &y_set, &x_set))
                .collect();
            if grown.is_empty() {
                break;
            }
            grown.into_iter().for_each(|q| x_set[q] = true);
        }
        if x_set == y_set {
            return Ok((0..n).filter(|&v| y_set[v]).collect());
        }
        y_set = x_set;
    }
}

/// A total preorder `C_0 < C_1 < ... < C_k` on the vertices, with a safe
/// Eve action for every vertex outside `C_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreorderClasses {
    pub classes: Vec<BTreeSet<VertexId>>,
    pub safe_action: BTreeMap<VertexId, ActionId>,
}

impl PreorderClasses {
    pub fn class_of(&self, v: VertexId) -> Option<usize> {
        self.classes.iter().position(|c| c.contains(&v))
    }

    /// `[a, b] < [c] < ...` with vertex names.
    pub fn render(&self, arena: &Arena) -> String {
        self.classes
            .iter()
            .map(|c| {
                let names: Vec<&str> = c.iter().map(|&v| arena.vertex_name(v)).collect();
                format!("[{}]", names.join(", "))
            })
            .collect::<Vec<_>>()
            .join(" < ")
    }

    /// Lists every violated invariant; empty when the structure is valid.
    pub fn violations(&self, arena: &Arena, bad: &BTreeSet<VertexId>) -> Vec<String> {
        let mut out = Vec::new();
        let n = arena.vertex_count();
        let mut seen = vec![0usize; n];
        for c in &self.classes {
            for &v in c {
                if v < n {
                    seen[v] += 1;
                }
            }
        }
        if seen.iter().any(|&k| k != 1) {
            out.push("classes do not partition the vertices".to_owned());
            return out;
        }
        match adam_almost_sure_reach_region(arena, bad) {
            Ok(region) if self.classes.first() == Some(&region) => {}
            Ok(_) => out.push("bottom class differs from Adam's almost-sure region".to_owned()),
            Err(e) => out.push(e.to_string()),
        }
        let k = self.classes.len() - 1;
        for i in 1..=k {
            let at_least: Vec<bool> = (0..n).map(|v| self.class_of(v).is_some_and(|c| c >= i)).collect();
            let above: Vec<bool> = (0..n).map(|v| self.class_of(v).is_some_and(|c| c > i)).collect();
            for &q in &self.classes[i] {
                let Some(&s) = self.safe_action.get(&q) else {
                    out.push(format!("vertex `{}` has no safe action", arena.vertex_name(q)));
                    continue;
                };
                for y in 0..arena.action_count(Side::Adam) {
                    let ok = if i == k {
                        support_within(arena, q, s, y, &at_least)
                    } else {
                        support_within(arena, q, s, y, &at_least)
                            || (0..arena.action_count(Side::Eve)).any(|x| support_meets(arena, q, x, y, &above))
                    };
                    if !ok {
                        out.push(format!(
                            "safe action `{}` at `{}` fails against `{}`",
                            arena.action_name(Side::Eve, s),
                            arena.vertex_name(q),
                            arena.action_name(Side::Adam, y)
                        ));
                    }
                }
            }
        }
        out
    }
}

/// Actions of `q` that keep the class condition with `stay` the candidate
/// class and `above` the union of higher classes.
fn safe_actions(arena: &Arena, q: VertexId, stay: &[bool], above: &[bool]) -> Vec<ActionId> {
    let within: Vec<bool> = stay.iter().zip(above).map(|(a, b)| *a || *b).collect();
    (0..arena.action_count(Side::Eve))
        .filter(|&s| {
            (0..arena.action_count(Side::Adam)).all(|y| {
                support_within(arena, q, s, y, &within)
                    || (0..arena.action_count(Side::Eve)).any(|x| support_meets(arena, q, x, y, above))
            })
        })
        .collect()
}

/// Peels classes from the top: each round keeps the greatest set of
/// remaining vertices that have a safe action relative to it.
pub fn safety_preorder(arena: &Arena, bad: &BTreeSet<VertexId>) -> Result<PreorderClasses> {
    let n = arena.vertex_count();
    let bottom = adam_almost_sure_reach_region(arena, bad)?;
    let mut remaining: Vec<bool> = (0..n).map(|v| !bottom.contains(&v)).collect();
    let mut above = vec![false; n];
    let mut top_down: Vec<BTreeSet<VertexId>> = Vec::new();
    let mut safe_action = BTreeMap::new();
    while remaining.iter().any(|&r| r) {
        let mut cand = remaining.clone();
        loop {
            let drop: Vec<usize> = (0..n)
                .filter(|&q| cand[q] && safe_actions(arena, q, &cand, &above).is_empty())
                .collect();
            if drop.is_empty() {
                break;
            }
            drop.into_iter().for_each(|q| cand[q] = false);
        }
        let class: BTreeSet<VertexId> = (0..n).filter(|&q| cand[q]).collect();
        if class.is_empty() {
            return Err(Error::PeelingStuck(remaining.iter().filter(|&&r| r).count()));
        }
        for &q in &class {
            safe_action.insert(q, safe_actions(arena, q, &cand, &above)[0]);
        }
        for &q in &class {
            remaining[q] = false;
            above[q] = true;
        }
        top_down.push(class);
    }
    let mut classes = vec![bottom];
    classes.extend(top_down.into_iter().rev());
    let result = PreorderClasses { classes, safe_action };
    if !result.violations(arena, bad).is_empty() {
        return Err(Error::PeelingStuck(n - result.classes[0].len()));
    }
    Ok(result)
}

const SOUND: usize = 0;
const CHANCE: usize = 1;

/// Eve's two-mode strategy: in Sound she plays the safe action of the
/// current vertex, in Chance she plays uniformly. The mode is redrawn
/// uniformly whenever the token changes class. Memory is
/// `(mode, class index)`, numbered `mode * (k + 1) + class`.
pub fn sound_chance_strategy(arena: &Arena, classes: &PreorderClasses) -> Result<Strategy> {
    let n = arena.vertex_count();
    let mut by_signal: BTreeMap<usize, VertexId> = BTreeMap::new();
    for v in 0..n {
        let Some(s) = arena.vertex_signal(Side::Eve, v) else {
            return Err(Error::VertexSignalInsufficient(format!(
                "the class of `{}`, which emits no signal",
                arena.vertex_name(v)
            )));
        };
        if let Some(&w) = by_signal.get(&s) {
            if classes.class_of(v) != classes.class_of(w)
                || classes.safe_action.get(&v) != classes.safe_action.get(&w)
            {
                return Err(Error::VertexSignalInsufficient(format!(
                    "the class of `{}` and `{}`, which share a signal",
                    arena.vertex_name(w),
                    arena.vertex_name(v)
                )));
            }
        }
        by_signal.insert(s, v);
    }
    let action_signals = arena.action_signal_set(Side::Eve);
    if by_signal.keys().any(|s| action_signals.contains(s)) {
        return Err(Error::VertexSignalInsufficient(
            "vertices, because vertex and action signals overlap".into(),
        ));
    }
    let width = classes.classes.len();
    let class_of = |v: VertexId| classes.class_of(v).ok_or_else(|| Error::NonTotal(format!("vertex {v} has no class")));
    let mut vertex_class = BTreeMap::new();
    for (&s, &v) in &by_signal {
        vertex_class.insert(s, class_of(v)?);
    }
    let memory = [SOUND, CHANCE]
        .iter()
        .flat_map(|&mode| {
            (0..width).map(move |c| format!("{}/c{c}", if mode == SOUND { "Sound" } else { "Chance" }))
        })
        .collect();
    let eve_actions = arena.action_count(Side::Eve);
    Strategy::from_fn(
        arena,
        Side::Eve,
        StrategyKind::General,
        memory,
        Distribution::uniform([SOUND * width, CHANCE * width]),
        |o, m| match o.and_then(|s| vertex_class.get(&s)) {
            Some(&c) if c != m % width => Distribution::uniform([SOUND * width + c, CHANCE * width + c]),
            _ => Distribution::dirac(m),
        },
        |o, m| {
            if m / width == CHANCE {
                return Distribution::uniform(0..eve_actions);
            }
            let safe = o
                .and_then(|s| by_signal.get(&s))
                .and_then(|v| classes.safe_action.get(v));
            Distribution::dirac(safe.copied().unwrap_or(0))
        },
    )
}

/// `true` iff no observation-based Adam strategy reaches `bad` almost
/// surely against `eve` from `start`.
pub fn verify_positive(arena: &Arena, eve: &Strategy, start: VertexId, bad: &BTreeSet<VertexId>) -> Result<bool> {
    check_absorbing(arena, bad)?;
    if eve.side() != Side::Eve {
        return Err(Error::WrongSide("verify_positive expects an Eve strategy".into()));
    }
    let mdp = belief_support_mdp(arena, eve, start)?;
    Ok(!pomdp_qualitative(&mdp, bad, Question::AlmostSureReach)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arena::ArenaBuilder;
    use crate::evaluate::{chain_probability, product_chain};
    use crate::gallery;
    use crate::rational::{rat, rat_int};
    use crate::conditions::{ColourSet, Condition};

    fn snowball_bad() -> (Arena, BTreeSet<VertexId>) {
        let snow = gallery::snowball();
        let cross = snow.vertex_index("cross").unwrap();
        (snow, BTreeSet::from([cross]))
    }

    #[test]
    fn snowball_region_and_classes() {
        let (snow, bad) = snowball_bad();
        assert_eq!(adam_almost_sure_reach_region(&snow, &bad).unwrap(), bad);
        let classes = safety_preorder(&snow, &bad).unwrap();
        assert_eq!(classes.render(&snow), "[cross] < [init] < [safe]");
        let init = snow.vertex_index("init").unwrap();
        assert_eq!(snow.action_name(Side::Eve, classes.safe_action[&init]), "wait");
    }

    #[test]
    fn sound_chance_on_snowball() {
        let (snow, bad) = snowball_bad();
        let classes = safety_preorder(&snow, &bad).unwrap();
        let eve = sound_chance_strategy(&snow, &classes).unwrap();
        assert_eq!(eve.kind(), StrategyKind::General);
        let init = snow.vertex_index("init").unwrap();
        assert!(verify_positive(&snow, &eve, init, &bad).unwrap());
        let wait = gallery::constant(&snow, Side::Eve, "wait").unwrap();
        assert!(!verify_positive(&snow, &wait, init, &bad).unwrap());
        let cross = snow.vertex_index("cross").unwrap();
        assert!(!verify_positive(&snow, &eve, cross, &bad).unwrap());

        let left = Condition::Reach(ColourSet::singleton(snow.colour_index("safe").unwrap()));
        for t in 1..=3 {
            let adam = gallery::run_at_step(&snow, t).unwrap();
            let chain = product_chain(&snow, &eve, &adam, init).unwrap();
            let expected = (1..=t).fold(rat_int(1), |acc, _| acc * rat(1, 2)) * rat(1, 2);
            assert_eq!(chain_probability(&chain, &left), expected, "t = {t}");
        }
    }

    #[test]
    fn class_members_do_not_count_as_higher() {
        // `q2` may gamble on `bad` via `x0`; only `x1` keeps it safe even
        // though `x0` also reaches `q1` in the same class.
        let mut b = ArenaBuilder::new();
        for v in ["s", "q1", "q2", "bad"] {
            b.vertex(v, (v == "bad").then_some("bad"), Some(v), Some(v));
        }
        b.eve_action("x0", Some("x0")).eve_action("x1", Some("x1")).adam_action("y", Some("y"));
        b.transition("s", "*", "*", [("s", rat_int(1))])
            .transition("q1", "*", "*", [("s", rat_int(1))])
            .transition("q2", "x0", "*", [("bad", rat(1, 2)), ("q1", rat(1, 2))])
            .transition("q2", "x1", "*", [("q1", rat_int(1))])
            .transition("bad", "*", "*", [("bad", rat_int(1))]);
        let arena = b.build().unwrap();
        let bad = BTreeSet::from([3]);
        let classes = safety_preorder(&arena, &bad).unwrap();
        assert_eq!(classes.render(&arena), "[bad] < [s, q1, q2]");
        assert_eq!(classes.safe_action[&2], 1);
    }

    #[test]
    fn matching_pennies_repeat_is_lost_everywhere() {
        let mut b = ArenaBuilder::new();
        b.vertex("play", None, Some("p"), Some("p"))
            .vertex("bad", Some("bad"), Some("b"), Some("b"))
            .eve_action("h", Some("h"))
            .eve_action("t", Some("t"))
            .adam_action("H", Some("H"))
            .adam_action("T", Some("T"));
        for (x, y) in [("h", "H"), ("t", "T")] {
            b.transition("play", x, y, [("bad", rat_int(1))]);
        }
        for (x, y) in [("h", "T"), ("t", "H")] {
            b.transition("play", x, y, [("play", rat_int(1))]);
        }
        b.transition("bad", "*", "*", [("bad", rat_int(1))]);
        let arena = b.build().unwrap();
        let bad = BTreeSet::from([arena.vertex_index("bad").unwrap()]);
        assert_eq!(adam_almost_sure_reach_region(&arena, &bad).unwrap().len(), 2);
        let classes = safety_preorder(&arena, &bad).unwrap();
        assert_eq!(classes.classes.len(), 1);
    }

    #[test]
    fn bad_must_be_absorbing() {
        let snow = gallery::snowball();
        let init = snow.vertex_index("init").unwrap();
        assert!(matches!(
            adam_almost_sure_reach_region(&snow, &BTreeSet::from([init])),
            Err(Error::BadNotAbsorbing(_))
        ));
    }

    #[test]
    fn fig1_signals_do_not_determine_classes() {
        let fig1 = gallery::fig1();
        let bad = BTreeSet::from([fig1.vertex_index("cross").unwrap()]);
        let classes = safety_preorder(&fig1, &bad).unwrap();
        assert!(classes.violations(&fig1, &bad).is_empty());
        if classes.classes.len() > 1 {
            assert!(sound_chance_strategy(&fig1, &classes).is_err());
        }
    }
}
