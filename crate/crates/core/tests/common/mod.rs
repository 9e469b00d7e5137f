//! Random instance generators and brute-force oracles shared by the
//! integration tests. Nothing here calls the solvers it is used to check.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;

use randstrat::arena::VertexId;
use randstrat::conditions::ColourSet;
use randstrat::muller::ParityGame;
use randstrat::rational::rat;
use randstrat::strategy::ExecutionState;
use randstrat::{Arena, ArenaBuilder, Distribution, MullerFamily, Rational, Side, Strategy, StrategyKind};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random weights over `0..n` with a common denominator of at most
/// `max_den`, supported on at most `max_support` points.
pub fn random_weights<R: Rng + ?Sized>(rng: &mut R, n: usize, max_den: u32, max_support: usize) -> Vec<(usize, Rational)> {
    let den = rng.gen_range(1..=max_den);
    let k = rng.gen_range(1..=max_support.min(n).min(den as usize));
    let mut points: Vec<usize> = (0..n).collect();
    points.shuffle(rng);
    points.truncate(k);
    // Split `den` into k positive parts.
    let mut cuts: Vec<u32> = (1..den).collect();
    cuts.shuffle(rng);
    cuts.truncate(k - 1);
    cuts.sort_unstable();
    cuts.insert(0, 0);
    cuts.push(den);
    points
        .into_iter()
        .zip(cuts.windows(2))
        .map(|(p, w)| (p, rat((w[1] - w[0]) as i64, den as i64)))
        .collect()
}

pub fn random_distribution(rng: &mut impl Rng, n: usize, max_den: u32) -> Distribution<usize> {
    Distribution::new(random_weights(rng, n, max_den, 3)).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Info {
    /// Injective vertex signals, distinct action signals.
    Perfect,
    /// Total but possibly collapsing signals.
    Synchronous,
    /// Total signals, distinct action signals, collapsing vertex signals.
    ObservableActions,
    /// Some signals missing.
    Partial,
}

#[derive(Clone, Debug)]
pub struct Shape {
    pub vertices: usize,
    pub eve_actions: usize,
    pub adam_actions: usize,
    pub info: Info,
    pub turn_based: bool,
    pub deterministic: bool,
    /// Number of absorbing vertices coloured `bad`, taken from the end.
    pub bad: usize,
    /// Colour alphabet for the other vertices (`c0`, `c1`, ...).
    pub colours: usize,
    /// Every non-bad vertex gets a colour when set; otherwise about half do.
    pub total_colouring: bool,
    pub max_den: u32,
}

impl Shape {
    pub fn new(vertices: usize, eve_actions: usize, adam_actions: usize, info: Info) -> Shape {
        Shape {
            vertices,
            eve_actions,
            adam_actions,
            info,
            turn_based: false,
            deterministic: false,
            bad: 0,
            colours: 0,
            total_colouring: false,
            max_den: 4,
        }
    }
}

pub fn random_arena(rng: &mut impl Rng, shape: &Shape) -> Arena {
    let n = shape.vertices;
    let vname = |v: usize| format!("v{v}");
    let signal = |rng: &mut dyn rand::RngCore, distinct: String, pool: &str| -> Option<String> {
        match shape.info {
            Info::Perfect => Some(distinct),
            Info::Synchronous => Some(format!("{pool}{}", rng.gen_range(0..2))),
            Info::ObservableActions => Some(if pool == "p" { distinct } else { format!("{pool}{}", rng.gen_range(0..2)) }),
            Info::Partial => rng.gen_bool(0.6).then(|| format!("{pool}{}", rng.gen_range(0..2))),
        }
    };
    let mut b = ArenaBuilder::new();
    for v in 0..n {
        let colour = if v >= n - shape.bad {
            Some("bad".to_owned())
        } else if shape.colours > 0 && (shape.total_colouring || rng.gen_bool(0.5)) {
            Some(format!("c{}", rng.gen_range(0..shape.colours)))
        } else {
            None
        };
        let es = signal(rng, format!("e{v}"), "o");
        let as_ = signal(rng, format!("a{v}"), "o");
        b.vertex(&vname(v), colour.as_deref(), es.as_deref(), as_.as_deref());
    }
    for x in 0..shape.eve_actions {
        let s = signal(rng, format!("x{x}"), "p");
        b.eve_action(&format!("x{x}"), s.as_deref());
    }
    for y in 0..shape.adam_actions {
        let s = signal(rng, format!("y{y}"), "p");
        b.adam_action(&format!("y{y}"), s.as_deref());
    }
    let dist = |rng: &mut dyn rand::RngCore| -> Vec<(String, Rational)> {
        if shape.deterministic {
            vec![(vname(rng.gen_range(0..n)), rat(1, 1))]
        } else {
            random_weights(rng, n, shape.max_den, 3).into_iter().map(|(t, w)| (vname(t), w)).collect()
        }
    };
    for v in 0..n {
        if v >= n - shape.bad {
            b.transition(&vname(v), "*", "*", [(vname(v), rat(1, 1))]);
        } else if shape.turn_based {
            if rng.gen_bool(0.5) {
                for x in 0..shape.eve_actions {
                    let to = dist(rng);
                    b.transition(&vname(v), &format!("x{x}"), "*", to);
                }
            } else {
                for y in 0..shape.adam_actions {
                    let to = dist(rng);
                    b.transition(&vname(v), "*", &format!("y{y}"), to);
                }
            }
        } else {
            for x in 0..shape.eve_actions {
                for y in 0..shape.adam_actions {
                    let to = dist(rng);
                    b.transition(&vname(v), &format!("x{x}"), &format!("y{y}"), to);
                }
            }
        }
    }
    b.build().expect("generated arenas are valid")
}

/// A random strategy of the given kind with `memory` states; components
/// that the kind keeps deterministic are Dirac.
pub fn random_strategy(rng: &mut impl Rng, arena: &Arena, side: Side, kind: StrategyKind, memory: usize) -> Strategy {
    let actions = arena.action_count(side);
    let random_init = matches!(kind, StrategyKind::Mixed | StrategyKind::General);
    let random_update = kind == StrategyKind::General;
    let random_act = matches!(kind, StrategyKind::Behavioural | StrategyKind::General);
    let mut inner = ChaCha8Rng::seed_from_u64(rng.gen());
    let init = pick_static(&mut inner, memory, random_init);
    let mut r2 = ChaCha8Rng::seed_from_u64(inner.gen());
    let mut r3 = ChaCha8Rng::seed_from_u64(inner.gen());
    Strategy::from_fn(
        arena,
        side,
        kind,
        (0..memory).map(|m| format!("m{m}")).collect(),
        init,
        |_, _| pick_static(&mut r2, memory, random_update),
        |_, _| pick_static(&mut r3, actions, random_act),
    )
    .expect("generated strategies are valid")
}

fn pick_static(rng: &mut ChaCha8Rng, n: usize, random: bool) -> Distribution<usize> {
    if random {
        random_distribution(rng, n, 4)
    } else {
        Distribution::dirac(rng.gen_range(0..n))
    }
}

/// Every memoryless pure strategy of `side`: one action per observation.
pub fn all_pure_memoryless(arena: &Arena, side: Side) -> Vec<Strategy> {
    let slots = arena.signal_count(side) + 1;
    let actions = arena.action_count(side);
    let total = actions.pow(slots as u32);
    (0..total)
        .map(|code| {
            Strategy::memoryless(arena, side, StrategyKind::Pure, |o| {
                let slot = o.map_or(0, |s| s + 1);
                Distribution::dirac(code / actions.pow(slot as u32) % actions)
            })
            .unwrap()
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Play measure, computed straight from the defining recursion.

type Joint = (usize, usize, Option<usize>, usize, Option<usize>);

/// Absorbs an optional signal into a raw `(memory, last)` pair.
fn absorb(s: &Strategy, memory: usize, last: Option<usize>, signal: Option<usize>) -> Vec<((usize, Option<usize>), Rational)> {
    match signal {
        None => vec![((memory, last), rat(1, 1))],
        Some(sig) => s.update_dist(Some(sig), memory).iter().map(|(&m, p)| ((m, Some(sig)), p.clone())).collect(),
    }
}

/// One player's move from raw state at `v`: (action, memory, last, prob).
fn moves(arena: &Arena, s: &Strategy, v: usize, memory: usize, last: Option<usize>) -> Vec<(usize, usize, Option<usize>, Rational)> {
    let side = s.side();
    let mut out = Vec::new();
    for ((m1, l1), p1) in absorb(s, memory, last, arena.vertex_signal(side, v)) {
        for (&a, pa) in s.act_dist(l1, m1).iter() {
            for ((m2, l2), p2) in absorb(s, m1, l1, arena.action_signal(side, a)) {
                out.push((a, m2, l2, &p1 * pa * &p2));
            }
        }
    }
    out
}

/// Probability of every vertex sequence of length `1..=max_len`, by
/// recursion over prefixes with the joint memory distribution carried along.
pub fn naive_cylinders(arena: &Arena, eve: &Strategy, adam: &Strategy, start: VertexId, max_len: usize) -> BTreeMap<Vec<VertexId>, Rational> {
    let mut out = BTreeMap::new();
    let mut joint: BTreeMap<Joint, Rational> = BTreeMap::new();
    for (&me, pe) in eve.init().iter() {
        for (&ma, pa) in adam.init().iter() {
            *joint.entry((start, me, None, ma, None)).or_insert_with(Rational::zero) += pe * pa;
        }
    }
    recurse(arena, eve, adam, vec![start], joint, max_len, &mut out);
    out
}

fn recurse(
    arena: &Arena,
    eve: &Strategy,
    adam: &Strategy,
    prefix: Vec<VertexId>,
    joint: BTreeMap<Joint, Rational>,
    max_len: usize,
    out: &mut BTreeMap<Vec<VertexId>, Rational>,
) {
    let total: Rational = joint.values().cloned().sum();
    if total.is_zero() {
        return;
    }
    out.insert(prefix.clone(), total);
    if prefix.len() == max_len {
        return;
    }
    let mut by_next: BTreeMap<VertexId, BTreeMap<Joint, Rational>> = BTreeMap::new();
    for (&(v, me, le, ma, la), p) in &joint {
        for (x, me2, le2, px) in moves(arena, eve, v, me, le) {
            for (y, ma2, la2, py) in moves(arena, adam, v, ma, la) {
                for (&w, pw) in arena.transition(v, x, y).iter() {
                    *by_next.entry(w).or_default().entry((w, me2, le2, ma2, la2)).or_insert_with(Rational::zero) +=
                        p * &px * &py * pw;
                }
            }
        }
    }
    for (w, next) in by_next {
        let mut longer = prefix.clone();
        longer.push(w);
        recurse(arena, eve, adam, longer, next, max_len, out);
    }
}

// ---------------------------------------------------------------------------
// Graph helpers.

pub fn reachable(start: &[usize], succ: &dyn Fn(usize) -> Vec<usize>) -> BTreeSet<usize> {
    let mut seen: BTreeSet<usize> = start.iter().copied().collect();
    let mut stack: Vec<usize> = start.to_vec();
    while let Some(u) = stack.pop() {
        for w in succ(u) {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen
}

/// `true` if some cycle through vertices reachable from `start` has its
/// least priority of the given parity.
pub fn cycle_with_min_parity(succ: &[Vec<usize>], priority: &[u32], start: usize, parity: u32) -> bool {
    let from_start = reachable(&[start], &|u| succ[u].clone());
    for u in from_start.iter().copied().filter(|&u| priority[u] % 2 == parity) {
        let p = priority[u];
        let inside = |w: usize| from_start.contains(&w) && priority[w] >= p;
        let back = reachable(&succ[u].iter().copied().filter(|&w| inside(w)).collect::<Vec<_>>(), &|w| {
            succ[w].iter().copied().filter(|&z| inside(z)).collect()
        });
        if back.contains(&u) {
            return true;
        }
    }
    false
}

/// Graph where `fixed` follows `choice` and the other player moves freely.
pub fn restricted_succ(game: &ParityGame, fixed: Side, choice: &[usize]) -> Vec<Vec<usize>> {
    (0..game.len())
        .map(|v| if game.owner[v] == fixed { vec![choice[v]] } else { game.succ[v].clone() })
        .collect()
}

/// Eve's winning region by enumerating her positional strategies.
pub fn parity_brute_force(game: &ParityGame) -> Vec<bool> {
    let n = game.len();
    let eve: Vec<usize> = (0..n).filter(|&v| game.owner[v] == Side::Eve).collect();
    let mut win = vec![false; n];
    let mut idx = vec![0usize; eve.len()];
    loop {
        let mut choice: Vec<usize> = game.succ.iter().map(|s| s[0]).collect();
        for (k, &v) in eve.iter().enumerate() {
            choice[v] = game.succ[v][idx[k]];
        }
        let succ = restricted_succ(game, Side::Eve, &choice);
        for v in 0..n {
            if !win[v] && !cycle_with_min_parity(&succ, &game.priority, v, 1) {
                win[v] = true;
            }
        }
        // Next strategy in mixed radix.
        let mut k = 0;
        loop {
            if k == eve.len() {
                return win;
            }
            idx[k] += 1;
            if idx[k] < game.succ[eve[k]].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

pub fn random_parity_game(rng: &mut impl Rng, n: usize, max_priority: u32) -> ParityGame {
    let owner = (0..n).map(|_| if rng.gen_bool(0.5) { Side::Eve } else { Side::Adam }).collect();
    let priority = (0..n).map(|_| rng.gen_range(0..=max_priority)).collect();
    let succ = (0..n)
        .map(|_| {
            let k = rng.gen_range(1..=3.min(n));
            let mut s: Vec<usize> = (0..n).collect();
            s.shuffle(rng);
            s.truncate(k);
            s
        })
        .collect();
    ParityGame::new(owner, priority, succ).unwrap()
}

// ---------------------------------------------------------------------------
// Turn-based stochastic safety: positional enumeration.

/// Adam's almost-sure region for reaching `bad` on a turn-based arena:
/// some positional Adam strategy makes every positional Eve strategy reach
/// `bad` with probability one. Positional strategies suffice for both
/// sides here, so this is exact.
pub fn turn_based_adam_region(arena: &Arena, bad: &BTreeSet<VertexId>) -> BTreeSet<VertexId> {
    let n = arena.vertex_count();
    let owner: Vec<Side> = (0..n).map(|v| arena.controller(v).expect("turn-based")).collect();
    let of = |side: Side| -> Vec<usize> { (0..n).filter(|&v| owner[v] == side).collect() };
    let (eve_vs, adam_vs) = (of(Side::Eve), of(Side::Adam));
    let choices = |vs: &[usize], side: Side| -> Vec<Vec<usize>> {
        let k = arena.action_count(side);
        let mut all = vec![vec![0; n]];
        for &v in vs {
            all = all
                .into_iter()
                .flat_map(|c| (0..k).map(move |a| {
                    let mut c = c.clone();
                    c[v] = a;
                    c
                }))
                .collect();
        }
        all
    };
    let adam_choices = choices(&adam_vs, Side::Adam);
    let eve_choices = choices(&eve_vs, Side::Eve);
    let mut region = BTreeSet::new();
    for tau in &adam_choices {
        let mut wins: Vec<bool> = vec![true; n];
        for sigma in &eve_choices {
            let succ: Vec<Vec<usize>> = (0..n)
                .map(|v| arena.transition(v, sigma[v], tau[v]).support().copied().collect())
                .collect();
            for v in 0..n {
                if !wins[v] {
                    continue;
                }
                let ahead = reachable(&[v], &|u| succ[u].clone());
                let ok = ahead.iter().all(|&u| reachable(&[u], &|w| succ[w].clone()).iter().any(|w| bad.contains(w)));
                if !ok {
                    wins[v] = false;
                }
            }
        }
        region.extend((0..n).filter(|&v| wins[v]));
    }
    region
}

// ---------------------------------------------------------------------------
// Muller games on simple deterministic arenas.

pub struct MullerGraph {
    pub owner: Vec<Side>,
    pub colour: Vec<usize>,
    pub succ: Vec<Vec<usize>>,
}

pub fn muller_graph(arena: &Arena) -> MullerGraph {
    let n = arena.vertex_count();
    let mut owner = Vec::new();
    let mut succ = Vec::new();
    for v in 0..n {
        let side = arena.controller(v).expect("simple arena");
        let mut s = BTreeSet::new();
        for x in 0..arena.action_count(Side::Eve) {
            for y in 0..arena.action_count(Side::Adam) {
                s.insert(*arena.transition(v, x, y).point().expect("deterministic"));
            }
        }
        owner.push(side);
        succ.push(s.into_iter().collect());
    }
    MullerGraph { owner, colour: (0..n).map(|v| arena.colour_of(v).expect("total")).collect(), succ }
}

fn attractor(g: &MullerGraph, alive: &BTreeSet<usize>, side: Side, target: &BTreeSet<usize>) -> BTreeSet<usize> {
    let mut attr: BTreeSet<usize> = target.intersection(alive).copied().collect();
    loop {
        let before = attr.len();
        for &v in alive {
            if attr.contains(&v) {
                continue;
            }
            let inside: Vec<usize> = g.succ[v].iter().copied().filter(|w| alive.contains(w)).collect();
            let pulled = if g.owner[v] == side {
                inside.iter().any(|w| attr.contains(w))
            } else {
                inside.iter().all(|w| attr.contains(w))
            };
            if pulled {
                attr.insert(v);
            }
        }
        if attr.len() == before {
            return attr;
        }
    }
}

/// McNaughton's recursive algorithm; returns Eve's region inside `alive`.
pub fn mcnaughton(g: &MullerGraph, family: &MullerFamily, alive: &BTreeSet<usize>) -> BTreeSet<usize> {
    if alive.is_empty() {
        return BTreeSet::new();
    }
    let colours: ColourSet = alive.iter().map(|&v| g.colour[v]).collect();
    let good = if family.contains(&colours) { Side::Eve } else { Side::Adam };
    for c in colours.iter() {
        let target: BTreeSet<usize> = alive.iter().copied().filter(|&v| g.colour[v] == c).collect();
        let a = attractor(g, alive, good, &target);
        let rest: BTreeSet<usize> = alive.difference(&a).copied().collect();
        let eve_rest = mcnaughton(g, family, &rest);
        let opp: BTreeSet<usize> = match good {
            Side::Eve => rest.difference(&eve_rest).copied().collect(),
            Side::Adam => eve_rest,
        };
        if !opp.is_empty() {
            // The opponent wins its attractor to `opp`; solve what is left.
            let b = attractor(g, alive, good.opponent(), &opp);
            let left = mcnaughton(g, family, &alive.difference(&b).copied().collect());
            return match good {
                Side::Eve => left,
                Side::Adam => b.union(&left).copied().collect(),
            };
        }
    }
    match good {
        Side::Eve => alive.clone(),
        Side::Adam => BTreeSet::new(),
    }
}

/// Nodes `(vertex, Eve state)` of a deterministic arena played against a
/// fixed pure Eve strategy, with every Adam move kept.
pub struct PlayGraph {
    pub nodes: Vec<(usize, ExecutionState)>,
    pub succ: Vec<Vec<usize>>,
    pub start: usize,
}

pub fn play_graph(arena: &Arena, eve: &Strategy, start: VertexId) -> PlayGraph {
    let mut nodes = Vec::new();
    let mut index = HashMap::new();
    let mut queue = VecDeque::new();
    let init = *eve.initial_states().point().expect("pure");
    index.insert((start, init), 0);
    nodes.push((start, init));
    queue.push_back(0);
    let mut succ: Vec<Vec<usize>> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let (v, e) = nodes[i];
        let seen = *eve.observe_opt(e, arena.vertex_signal(Side::Eve, v)).point().unwrap();
        let x = *eve.action(seen).point().unwrap();
        let after = *eve.observe_opt(seen, arena.action_signal(Side::Eve, x)).point().unwrap();
        let mut out = BTreeSet::new();
        for y in 0..arena.action_count(Side::Adam) {
            let w = *arena.transition(v, x, y).point().unwrap();
            let key = (w, after);
            let j = *index.entry(key).or_insert_with(|| {
                nodes.push(key);
                queue.push_back(nodes.len() - 1);
                nodes.len() - 1
            });
            out.insert(j);
        }
        if succ.len() <= i {
            succ.resize(i + 1, Vec::new());
        }
        succ[i] = out.into_iter().collect();
    }
    succ.resize(nodes.len(), Vec::new());
    PlayGraph { nodes, succ, start: 0 }
}

/// Emerson-Lei style search: is there a strongly connected set of nodes
/// reachable from the start whose colour set is not in `F`?
pub fn losing_cycle_exists(arena: &Arena, g: &PlayGraph, family: &MullerFamily) -> bool {
    let colour = |i: usize| arena.colour_of(g.nodes[i].0).expect("total");
    let alive = reachable(&[g.start], &|u| g.succ[u].clone());
    search(g, family, &alive, &colour)
}

fn search(g: &PlayGraph, family: &MullerFamily, alive: &BTreeSet<usize>, colour: &dyn Fn(usize) -> usize) -> bool {
    for comp in components(g, alive) {
        let colours: ColourSet = comp.iter().map(|&i| colour(i)).collect();
        if !family.contains(&colours) {
            return true;
        }
        for c in colours.iter() {
            let rest: BTreeSet<usize> = comp.iter().copied().filter(|&i| colour(i) != c).collect();
            if search(g, family, &rest, colour) {
                return true;
            }
        }
    }
    false
}

/// Nontrivial strongly connected components of the subgraph on `alive`.
fn components(g: &PlayGraph, alive: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
    let mut done = BTreeSet::new();
    let mut out = Vec::new();
    for &u in alive {
        if done.contains(&u) {
            continue;
        }
        let fwd = reachable(&[u], &|w| g.succ[w].iter().copied().filter(|z| alive.contains(z)).collect());
        let comp: BTreeSet<usize> = fwd
            .iter()
            .copied()
            .filter(|&w| reachable(&[w], &|z| g.succ[z].iter().copied().filter(|q| alive.contains(q)).collect()).contains(&u))
            .collect();
        done.extend(comp.iter().copied());
        let nontrivial = comp.len() > 1 || g.succ[u].contains(&u);
        if nontrivial {
            out.push(comp);
        }
    }
    out
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Does Adam have a positional winning strategy on the play graph extended
/// with latest appearance records? Equivalently: is there a reachable cycle
/// of the product whose least record priority is odd?
pub fn adam_lar_counter_exists(arena: &Arena, g: &PlayGraph, family: &MullerFamily) -> bool {
    use randstrat::muller::LarState;
    let colours = arena.colours().len();
    let colour = |i: usize| arena.colour_of(g.nodes[i].0).expect("total");
    let mut nodes: Vec<(usize, LarState)> = Vec::new();
    let mut index: HashMap<(usize, LarState), usize> = HashMap::new();
    let mut succ: Vec<Vec<usize>> = Vec::new();
    let first = (g.start, LarState::initial(colours).enter(colour(g.start)));
    index.insert(first.clone(), 0);
    nodes.push(first);
    let mut k = 0;
    while k < nodes.len() {
        let (i, lar) = nodes[k].clone();
        let mut out = Vec::new();
        for &j in &g.succ[i] {
            let key = (j, lar.enter(colour(j)));
            let id = *index.entry(key.clone()).or_insert_with(|| {
                nodes.push(key);
                nodes.len() - 1
            });
            out.push(id);
        }
        succ.push(out);
        k += 1;
    }
    let priority: Vec<u32> = nodes.iter().map(|(_, l)| l.priority(family)).collect();
    cycle_with_min_parity(&succ, &priority, 0, 1)
}

/// A random nonempty-set family over `colours` colours.
pub fn random_family(rng: &mut impl Rng, colours: usize) -> MullerFamily {
    ColourSet::full(colours).subsets().filter(|s| !s.is_empty() && rng.gen_bool(0.5)).collect()
}
