//! Graph-level building blocks: strongly connected components, maximal end
//! components and the qualitative reachability fixpoints on MDPs given by
//! their successor supports.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

/// Strongly connected components of the graph restricted to `alive` nodes,
/// sinks first (reverse topological order).
pub fn sccs(n: usize, alive: &[bool], succ: impl Fn(usize) -> Vec<usize>) -> Vec<Vec<usize>> {
    let mut g: DiGraph<usize, ()> = DiGraph::with_capacity(n, n);
    let nodes: Vec<NodeIndex> = (0..n).map(|i| g.add_node(i)).collect();
    for i in (0..n).filter(|&i| alive[i]) {
        for j in succ(i) {
            if alive[j] {
                g.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    tarjan_scc(&g)
        .into_iter()
        .map(|c| c.into_iter().map(|ix| g[ix]).collect::<Vec<_>>())
        .filter(|c| alive[c[0]])
        .collect()
}

/// Nodes from which some node in `target` is reachable (target included).
pub fn backward_reachable(n: usize, succ: impl Fn(usize) -> Vec<usize>, target: &[bool]) -> Vec<bool> {
    let mut preds = vec![Vec::new(); n];
    for i in 0..n {
        for j in succ(i) {
            preds[j].push(i);
        }
    }
    let mut seen = target.to_vec();
    let mut stack: Vec<usize> = (0..n).filter(|&i| target[i]).collect();
    while let Some(j) = stack.pop() {
        for &i in &preds[j] {
            if !seen[i] {
                seen[i] = true;
                stack.push(i);
            }
        }
    }
    seen
}

/// An MDP seen only through supports: `succ[s][a]` is the set of states
/// reached with positive probability by action `a` from `s`.
#[derive(Clone, Debug, Default)]
pub struct SupportGraph {
    pub succ: Vec<Vec<Vec<usize>>>,
}

impl SupportGraph {
    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    fn all_successors(&self, s: usize) -> Vec<usize> {
        self.succ[s].iter().flatten().copied().collect()
    }

    /// States from which the controller can reach `target` with positive
    /// probability.
    pub fn positive_reach(&self, target: &[bool]) -> Vec<bool> {
        backward_reachable(self.len(), |s| self.all_successors(s), target)
    }

    /// States from which the controller reaches `target` with probability one.
    pub fn almost_sure_reach(&self, target: &[bool]) -> Vec<bool> {
        let n = self.len();
        let mut keep = vec![true; n];
        loop {
            // Least fixpoint: states that can make progress towards target
            // with an action that never leaves `keep`.
            let mut reach = target.to_vec();
            loop {
                let mut changed = false;
                for s in 0..n {
                    if reach[s] || !keep[s] {
                        continue;
                    }
                    let ok = self.succ[s].iter().any(|a| {
                        a.iter().all(|&t| keep[t]) && a.iter().any(|&t| reach[t])
                    });
                    if ok {
                        reach[s] = true;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
            }
            let next: Vec<bool> = (0..n).map(|s| keep[s] && reach[s]).collect();
            if next == keep {
                return keep;
            }
            keep = next;
        }
    }

    /// States from which the controller can avoid `bad` forever with
    /// certainty (greatest fixpoint of "some action stays inside").
    pub fn sure_avoid(&self, bad: &[bool]) -> Vec<bool> {
        let n = self.len();
        let mut keep: Vec<bool> = (0..n).map(|s| !bad[s]).collect();
        loop {
            let mut changed = false;
            for s in 0..n {
                if keep[s] && !self.succ[s].iter().any(|a| a.iter().all(|&t| keep[t])) {
                    keep[s] = false;
                    changed = true;
                }
            }
            if !changed {
                return keep;
            }
        }
    }

    /// Maximal end components inside `allowed`.
    pub fn mecs(&self, allowed: &[bool]) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut alive = allowed.to_vec();
        let mut actions: Vec<Vec<usize>> = (0..n)
            .map(|s| {
                (0..self.succ[s].len())
                    .filter(|&a| self.succ[s][a].iter().all(|&t| alive[t]))
                    .collect()
            })
            .collect();
        loop {
            for s in 0..n {
                if alive[s] && actions[s].is_empty() {
                    alive[s] = false;
                }
            }
            let comps = sccs(n, &alive, |s| {
                actions[s].iter().flat_map(|&a| self.succ[s][a].iter().copied()).collect()
            });
            let mut comp_of = vec![usize::MAX; n];
            for (i, c) in comps.iter().enumerate() {
                for &s in c {
                    comp_of[s] = i;
                }
            }
            let mut changed = false;
            for s in 0..n {
                if !alive[s] {
                    continue;
                }
                let before = actions[s].len();
                actions[s].retain(|&a| {
                    self.succ[s][a].iter().all(|&t| alive[t] && comp_of[t] == comp_of[s])
                });
                if actions[s].len() != before {
                    changed = true;
                }
                if actions[s].is_empty() {
                    alive[s] = false;
                    changed = true;
                }
            }
            if !changed {
                return comps.into_iter().filter(|c| c.iter().all(|&s| alive[s])).collect();
            }
        }
    }
}
