//! Translations between behavioural and mixed strategies on synchronous
//! arenas, exact up to a horizon.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};

use crate::arena::{ActionId, Arena, SignalId};
use crate::error::{Error, Result};
use crate::rational::{Distribution, Rational};
use crate::strategy::{mixed_from_support, MemoryId, Observation, Strategy, StrategyKind};

/// Largest number of pure components `behavioural_to_mixed` will build.
pub const MAX_COMPONENTS: usize = 1 << 14;

fn require_kind(strategy: &Strategy, allowed: &[StrategyKind]) -> Result<()> {
    if allowed.contains(&strategy.kind()) {
        Ok(())
    } else {
        Err(Error::KindViolation(format!(
            "expected one of {allowed:?}, got a {} strategy",
            strategy.kind()
        )))
    }
}

/// A decision point of a behavioural strategy: step, last signal, memory.
type Situation = (usize, SignalId, MemoryId);

/// Replaces the per-step randomisation of a behavioural strategy by one
/// initial draw of a pure strategy, matching play distributions for the
/// first `horizon` moves.
///
/// Each pure component fixes an action for every decision point `(step,
/// signal, memory)` reachable within the horizon; its weight is the product
/// of the probabilities of the chosen actions.
pub fn behavioural_to_mixed(strategy: &Strategy, arena: &Arena, horizon: usize) -> Result<Strategy> {
    if !arena.classify().synchronous {
        return Err(Error::NotSynchronous);
    }
    require_kind(strategy, &[StrategyKind::Behavioural, StrategyKind::Pure])?;
    if !strategy.fits(arena) {
        return Err(Error::Malformed("strategy does not match the arena".into()));
    }
    let side = strategy.side();
    let point = |d: &Distribution<MemoryId>| *d.point().expect("deterministic memory");
    let vertex_signals = arena.vertex_signal_set(side);
    let action_signal = |a: ActionId| arena.action_signal(side, a).expect("synchronous");

    // Memory before the vertex signal of each step.
    let mut situations: Vec<Situation> = Vec::new();
    let mut before: BTreeSet<MemoryId> = BTreeSet::from([point(strategy.init())]);
    for t in 0..horizon {
        let mut next = BTreeSet::new();
        for &m in &before {
            for &s in &vertex_signals {
                let m1 = point(strategy.update_dist(Some(s), m));
                situations.push((t, s, m1));
                for &a in strategy.act_dist(Some(s), m1).support() {
                    next.insert(point(strategy.update_dist(Some(action_signal(a)), m1)));
                }
            }
        }
        before = next;
    }
    situations.sort_unstable();
    situations.dedup();

    let mut components: Vec<(Rational, BTreeMap<Situation, ActionId>)> = vec![(Rational::one(), BTreeMap::new())];
    for &sit in &situations {
        let (_, s, m) = sit;
        let dist = strategy.act_dist(Some(s), m);
        if components.len() * dist.len() > MAX_COMPONENTS {
            return Err(Error::UnsupportedQuestion(format!(
                "more than {MAX_COMPONENTS} pure components; lower the horizon"
            )));
        }
        components = components
            .into_iter()
            .flat_map(|(w, choice)| {
                dist.iter().map(move |(&a, p)| {
                    let mut choice = choice.clone();
                    choice.insert(sit, a);
                    (&w * p, choice)
                })
            })
            .collect();
    }

    // Component memory: (observations received, capped at 2h + 1) x M.
    let m_count = strategy.memory_size();
    let cap = 2 * horizon + 1;
    let names: Vec<String> = (0..=cap)
        .flat_map(|c| strategy.memory_names().iter().map(move |n| format!("{c}/{n}")))
        .collect();
    let pure: Vec<Strategy> = components
        .iter()
        .map(|(_, choice)| {
            Strategy::from_fn(
                arena,
                side,
                StrategyKind::Pure,
                names.clone(),
                Distribution::dirac(point(strategy.init())),
                |o, cm| {
                    let (c, m) = (cm / m_count, cm % m_count);
                    let c2 = if o.is_some() { (c + 1).min(cap) } else { c };
                    Distribution::dirac(c2 * m_count + point(strategy.update_dist(o, m)))
                },
                |o, cm| {
                    let (c, m) = (cm / m_count, cm % m_count);
                    let chosen = o.filter(|_| c % 2 == 1).and_then(|s| choice.get(&((c - 1) / 2, s, m)));
                    let fallback = *strategy.act_dist(o, m).support().next().expect("nonempty");
                    Distribution::dirac(chosen.copied().unwrap_or(fallback))
                },
            )
        })
        .collect::<Result<_>>()?;
    let pairs: Vec<(Rational, &Strategy)> = components.iter().map(|(w, _)| w.clone()).zip(pure.iter()).collect();
    mixed_from_support(side, &pairs)
}

/// A behavioural strategy over a tree of observation histories, with the
/// histories whose conditional distribution was undefined.
#[derive(Clone, Debug)]
pub struct KuhnTranslation {
    pub strategy: Strategy,
    /// Histories (as signal sequences) that no initial memory explains; the
    /// strategy plays the first action there.
    pub zero_probability: Vec<Vec<SignalId>>,
}

/// Turns a mixed strategy into a behavioural one whose action after each
/// observation history of length at most `2 * horizon + 1` is the
/// conditional action distribution of the mixed strategy given that history.
pub fn kuhn_translate(strategy: &Strategy, arena: &Arena, horizon: usize) -> Result<KuhnTranslation> {
    if !arena.classify().observable_actions {
        return Err(Error::NotObservableActions);
    }
    require_kind(strategy, &[StrategyKind::Mixed, StrategyKind::Pure])?;
    if !strategy.fits(arena) {
        return Err(Error::Malformed("strategy does not match the arena".into()));
    }
    let side = strategy.side();
    let point = |d: &Distribution<MemoryId>| *d.point().expect("deterministic memory");
    let vertex_signals: Vec<SignalId> = arena.vertex_signal_set(side).into_iter().collect();
    let action_signals: Vec<SignalId> = arena.action_signal_set(side).into_iter().collect();
    let action_of: HashMap<SignalId, ActionId> = (0..arena.action_count(side))
        .map(|a| (arena.action_signal(side, a).expect("synchronous"), a))
        .collect();
    let depth = 2 * horizon + 1;

    // Each node: the history, and for every initial memory still consistent
    // its weight and current memory.
    struct Node {
        history: Vec<SignalId>,
        alive: Vec<(MemoryId, Rational)>,
        children: HashMap<SignalId, usize>,
    }
    let mut nodes = vec![Node {
        history: Vec::new(),
        alive: strategy.init().iter().map(|(&m, p)| (m, p.clone())).collect(),
        children: HashMap::new(),
    }];
    let mut frontier = vec![0];
    for d in 0..depth {
        let signals = if d % 2 == 0 { &vertex_signals } else { &action_signals };
        let mut next = Vec::new();
        for &id in &frontier {
            for &s in signals {
                let alive: Vec<(MemoryId, Rational)> = nodes[id]
                    .alive
                    .iter()
                    .filter(|(m, _)| d % 2 == 0 || *strategy.act_dist(nodes[id].history.last().copied(), *m).point().expect("deterministic action") == action_of[&s])
                    .map(|(m, p)| (point(strategy.update_dist(Some(s), *m)), p.clone()))
                    .collect();
                let mut history = nodes[id].history.clone();
                history.push(s);
                nodes.push(Node { history, alive, children: HashMap::new() });
                let child = nodes.len() - 1;
                nodes[id].children.insert(s, child);
                next.push(child);
            }
        }
        frontier = next;
    }

    let sink = nodes.len();
    let mut zero_probability = Vec::new();
    let mut act_at: Vec<Distribution<ActionId>> = Vec::with_capacity(nodes.len());
    for node in &nodes {
        let total: Rational = node.alive.iter().map(|(_, p)| p.clone()).sum();
        let last: Observation = node.history.last().copied();
        if total.is_zero() {
            zero_probability.push(node.history.clone());
            act_at.push(Distribution::dirac(0));
            continue;
        }
        let posterior = node.alive.iter().map(|(m, p)| {
            let a = *strategy.act_dist(last, *m).point().expect("deterministic action");
            (a, p / &total)
        });
        act_at.push(Distribution::new(posterior)?);
    }
    // Only histories ending in a vertex signal are decision points.
    zero_probability.retain(|h| h.len() % 2 == 1 && h.len() < depth);

    let render = |h: &[SignalId]| {
        if h.is_empty() {
            "root".to_owned()
        } else {
            h.iter().map(|&s| arena.signal_name(side, s)).collect::<Vec<_>>().join(".")
        }
    };
    let mut names: Vec<String> = nodes.iter().map(|n| render(&n.history)).collect();
    names.push("sink".to_owned());
    let translated = Strategy::from_fn(
        arena,
        side,
        StrategyKind::Behavioural,
        names,
        Distribution::dirac(0),
        |o, m| {
            let next = match o {
                None => m,
                Some(s) if m < sink => nodes[m].children.get(&s).copied().unwrap_or(sink),
                Some(_) => sink,
            };
            Distribution::dirac(next)
        },
        |_, m| if m < sink { act_at[m].clone() } else { Distribution::dirac(0) },
    )?;
    Ok(KuhnTranslation { strategy: translated, zero_probability })
}
