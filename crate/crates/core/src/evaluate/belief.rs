//! Belief supports of an observation-based opponent of a fixed strategy.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::arena::{ActionId, Arena, Side, VertexId};
use crate::error::{Error, Result};
use crate::graph::SupportGraph;
use crate::strategy::{ExecutionState, Observation, Strategy};

use super::chain::{check_strategy, check_vertex};

/// A vertex together with the fixed player's state after its signal.
pub type Configuration = (VertexId, ExecutionState);

/// What the free player can know: the configurations compatible with his
/// observations so far, and the last signal he received.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Support {
    pub configs: BTreeSet<Configuration>,
    pub last: Observation,
}

#[derive(Clone, Debug)]
pub struct SupportMdp {
    arena: Arena,
    fixed: Strategy,
    free: Side,
    supports: Vec<Support>,
    initial: usize,
    /// `transitions[s][c]`: successor supports after free action `c`.
    transitions: Vec<Vec<Vec<usize>>>,
}

/// Explores the supports reachable from `start_vertex` when `fixed` is
/// played and its opponent only sees its own signals.
pub fn belief_support_mdp(arena: &Arena, fixed: &Strategy, start_vertex: VertexId) -> Result<SupportMdp> {
    check_strategy(arena, fixed, fixed.side())?;
    check_vertex(arena, start_vertex)?;
    let mut mdp = SupportMdp {
        arena: arena.clone(),
        fixed: fixed.clone(),
        free: fixed.side().opponent(),
        supports: Vec::new(),
        initial: 0,
        transitions: Vec::new(),
    };
    let init = mdp.initial_support(start_vertex);
    let mut index: HashMap<Support, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    index.insert(init.clone(), 0);
    mdp.supports.push(init);
    queue.push_back(0);
    while let Some(i) = queue.pop_front() {
        let mut row = Vec::new();
        for c in 0..arena.action_count(mdp.free) {
            let mut succ = Vec::new();
            for next in mdp.successors(&mdp.supports[i], c) {
                let j = match index.get(&next) {
                    Some(&j) => j,
                    None => {
                        let j = mdp.supports.len();
                        index.insert(next.clone(), j);
                        mdp.supports.push(next);
                        queue.push_back(j);
                        j
                    }
                };
                succ.push(j);
            }
            row.push(succ);
        }
        mdp.transitions.push(row);
    }
    Ok(mdp)
}

impl SupportMdp {
    fn arrive(&self, v: VertexId, e: ExecutionState) -> impl Iterator<Item = Configuration> + '_ {
        let side = self.fixed.side();
        let next: Vec<_> = self
            .fixed
            .observe_opt(e, self.arena.vertex_signal(side, v))
            .support()
            .map(|&e| (v, e))
            .collect();
        next.into_iter()
    }

    fn initial_support(&self, start: VertexId) -> Support {
        let configs = self
            .fixed
            .initial_states()
            .support()
            .flat_map(|&e| self.arrive(start, e).collect::<Vec<_>>())
            .collect();
        Support { configs, last: self.arena.vertex_signal(self.free, start) }
    }

    /// Successor configurations of `configs` after the free player plays
    /// `c`, grouped by the vertex signal he receives on arrival.
    fn groups<'a>(
        &self,
        configs: impl IntoIterator<Item = &'a Configuration>,
        c: ActionId,
    ) -> BTreeMap<Observation, BTreeSet<Configuration>> {
        let side = self.fixed.side();
        let mut groups: BTreeMap<Observation, BTreeSet<Configuration>> = BTreeMap::new();
        for &(v, e) in configs {
            for &a in self.fixed.action(e).support() {
                let after = self.fixed.observe_opt(e, self.arena.action_signal(side, a));
                let (x, y) = match side {
                    Side::Eve => (a, c),
                    Side::Adam => (c, a),
                };
                for &e2 in after.support() {
                    for &w in self.arena.transition(v, x, y).support() {
                        let key = self.arena.vertex_signal(self.free, w);
                        groups.entry(key).or_default().extend(self.arrive(w, e2));
                    }
                }
            }
        }
        groups
    }

    fn next_last(&self, support: &Support, key: Observation, c: ActionId) -> Observation {
        key.or(self.arena.action_signal(self.free, c)).or(support.last)
    }

    /// Successor supports after the free player plays `c`, one per signal
    /// he may receive on arrival.
    pub fn successors(&self, support: &Support, c: ActionId) -> Vec<Support> {
        self.groups(&support.configs, c)
            .into_iter()
            .map(|(key, configs)| Support { configs, last: self.next_last(support, key, c) })
            .collect()
    }

    /// The side choosing actions in this MDP.
    pub fn free_side(&self) -> Side {
        self.free
    }

    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }

    pub fn supports(&self) -> &[Support] {
        &self.supports
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn transitions(&self, s: usize, c: ActionId) -> &[usize] {
        &self.transitions[s][c]
    }

    pub fn arena(&self) -> &Arena {
        &self.arena
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Question {
    AlmostSureReach,
    PositiveReach,
}

impl fmt::Display for Question {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Question::AlmostSureReach => "almost_sure_reach",
            Question::PositiveReach => "positive_reach",
        })
    }
}

impl FromStr for Question {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "almost_sure_reach" => Ok(Question::AlmostSureReach),
            "positive_reach" => Ok(Question::PositiveReach),
            other => Err(Error::UnsupportedQuestion(other.to_owned())),
        }
    }
}

/// A support of the split graph: its configurations outside the target.
struct Node {
    support: Support,
    configs: Vec<Configuration>,
    /// `moves[c][k]`: where configuration `k` may go under action `c`, as
    /// `(node, configuration index)`; `None` stands for the target.
    moves: Vec<Vec<Vec<Option<(usize, usize)>>>>,
}

/// Decides whether the free player can reach `target` with probability one
/// (or positive probability) using only his observations.
///
/// Configurations in `target` are cut off as soon as they appear, so
/// targets need not be sinks. Almost-sure reachability is decided on the
/// product of configurations and supports: a support wins if, using only
/// actions that keep every successor support winning, each of its
/// configurations can still reach the target.
pub fn pomdp_qualitative(mdp: &SupportMdp, target: &BTreeSet<VertexId>, question: Question) -> Result<bool> {
    let actions = mdp.arena.action_count(mdp.free);
    let mut nodes: Vec<Node> = Vec::new();
    let mut index: HashMap<Support, usize> = HashMap::new();
    let mut queue: VecDeque<usize> = VecDeque::new();

    let mut intern = |support: Support, nodes: &mut Vec<Node>, queue: &mut VecDeque<usize>| -> Option<usize> {
        let rest: BTreeSet<Configuration> =
            support.configs.iter().filter(|(v, _)| !target.contains(v)).copied().collect();
        if rest.is_empty() {
            return None;
        }
        let node = Support { configs: rest, last: support.last };
        Some(*index.entry(node.clone()).or_insert_with(|| {
            nodes.push(Node {
                configs: node.configs.iter().copied().collect(),
                support: node,
                moves: Vec::new(),
            });
            queue.push_back(nodes.len() - 1);
            nodes.len() - 1
        }))
    };

    let init = &mdp.supports[mdp.initial];
    let hits_at_start = init.configs.iter().any(|(v, _)| target.contains(v));
    let Some(root) = intern(init.clone(), &mut nodes, &mut queue) else {
        return Ok(true);
    };
    while let Some(id) = queue.pop_front() {
        let support = nodes[id].support.clone();
        let mut moves = Vec::with_capacity(actions);
        for c in 0..actions {
            let groups = mdp.groups(&support.configs, c);
            let mut group_node: BTreeMap<Observation, Option<usize>> = BTreeMap::new();
            for (key, configs) in &groups {
                let next = Support { configs: configs.clone(), last: mdp.next_last(&support, *key, c) };
                group_node.insert(*key, intern(next, &mut nodes, &mut queue));
            }
            let per_config: Vec<Vec<Option<(usize, usize)>>> = support
                .configs
                .iter()
                .map(|cfg| {
                    let mut out = Vec::new();
                    for (key, succ) in mdp.groups([cfg], c) {
                        for t in succ {
                            let dest = match (target.contains(&t.0), group_node[&key]) {
                                (true, _) | (false, None) => None,
                                (false, Some(n)) => {
                                    let k = nodes[n].configs.binary_search(&t).expect("config in its group");
                                    Some((n, k))
                                }
                            };
                            out.push(dest);
                        }
                    }
                    out.sort_unstable();
                    out.dedup();
                    out
                })
                .collect();
            moves.push(per_config);
        }
        nodes[id].moves = moves;
    }

    if question == Question::PositiveReach {
        let graph = SupportGraph {
            succ: nodes
                .iter()
                .map(|n| {
                    (0..actions)
                        .map(|c| {
                            n.moves[c].iter().flatten().map(|d| d.map_or(nodes.len(), |(m, _)| m)).collect()
                        })
                        .collect()
                })
                .chain(std::iter::once(Vec::new()))
                .collect(),
        };
        let mut goal = vec![false; nodes.len() + 1];
        goal[nodes.len()] = true;
        return Ok(hits_at_start || graph.positive_reach(&goal)[root]);
    }

    let offset: Vec<usize> = nodes
        .iter()
        .scan(0, |acc, n| {
            let o = *acc;
            *acc += n.configs.len();
            Some(o)
        })
        .collect();
    let total = offset.last().map_or(0, |o| o + nodes.last().unwrap().configs.len());
    let mut win = vec![true; nodes.len()];
    loop {
        let allowed: Vec<Vec<usize>> = nodes
            .iter()
            .map(|n| {
                (0..actions)
                    .filter(|&c| n.moves[c].iter().flatten().all(|d| d.is_none_or(|(m, _)| win[m])))
                    .collect()
            })
            .collect();
        // Backward positive reachability of the target in the product,
        // restricted to allowed actions of winning supports.
        let goal = total;
        let mut preds = vec![Vec::new(); total + 1];
        for (i, n) in nodes.iter().enumerate() {
            if !win[i] {
                continue;
            }
            for &c in &allowed[i] {
                for (k, dests) in n.moves[c].iter().enumerate() {
                    for d in dests {
                        let to = d.map_or(goal, |(m, l)| offset[m] + l);
                        preds[to].push(offset[i] + k);
                    }
                }
            }
        }
        let mut reach = vec![false; total + 1];
        reach[goal] = true;
        let mut stack = vec![goal];
        while let Some(t) = stack.pop() {
            for &p in &preds[t] {
                if !reach[p] {
                    reach[p] = true;
                    stack.push(p);
                }
            }
        }
        let next: Vec<bool> = (0..nodes.len())
            .map(|i| win[i] && (0..nodes[i].configs.len()).all(|k| reach[offset[i] + k]))
            .collect();
        if next == win {
            return Ok(win[root]);
        }
        win = next;
    }
}
