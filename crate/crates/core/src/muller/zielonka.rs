//! Zielonka trees of Muller conditions and the memory bounds they induce.

use serde::Serialize;

use crate::conditions::{ColourSet, MullerFamily};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZielonkaTree {
    pub label: ColourSet,
    pub in_f: bool,
    pub children: Vec<ZielonkaTree>,
}

/// Builds the tree of `family` over colours `0..colour_count`.
pub fn zielonka_tree(colour_count: usize, family: &MullerFamily) -> ZielonkaTree {
    build(ColourSet::full(colour_count), family)
}

fn build(label: ColourSet, family: &MullerFamily) -> ZielonkaTree {
    let in_f = family.contains(&label);
    let flipped: Vec<ColourSet> = label
        .subsets()
        .filter(|s| !s.is_empty() && *s != label && family.contains(s) != in_f)
        .collect();
    let mut maximal: Vec<ColourSet> = flipped
        .iter()
        .copied()
        .filter(|s| !flipped.iter().any(|t| t != s && s.is_subset(*t)))
        .collect();
    // Larger labels first, then lexicographically by their colours.
    maximal.sort_by_key(|s| (std::cmp::Reverse(s.len()), s.iter().collect::<Vec<_>>()));
    ZielonkaTree {
        label,
        in_f,
        children: maximal.into_iter().map(|s| build(s, family)).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MemoryBounds {
    pub pure: usize,
    pub behavioural_upper: usize,
    pub general: usize,
}

impl ZielonkaTree {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn node_count(&self) -> usize {
        1 + self.children.iter().map(ZielonkaTree::node_count).sum::<usize>()
    }

    pub fn leaf_count(&self) -> usize {
        if self.is_leaf() {
            1
        } else {
            self.children.iter().map(ZielonkaTree::leaf_count).sum()
        }
    }

    /// Every parent and child disagree on membership in `F`.
    pub fn alternates(&self) -> bool {
        self.children.iter().all(|c| c.in_f != self.in_f && c.alternates())
    }

    fn pure_bound(&self) -> usize {
        if self.is_leaf() {
            1
        } else if self.in_f {
            self.children.iter().map(ZielonkaTree::pure_bound).max().unwrap_or(1)
        } else {
            self.children.iter().map(ZielonkaTree::pure_bound).sum()
        }
    }

    fn behavioural_bound(&self) -> usize {
        if self.is_leaf() {
            1
        } else if self.in_f {
            self.children.iter().map(ZielonkaTree::behavioural_bound).max().unwrap_or(1)
        } else if self.children.iter().all(ZielonkaTree::is_leaf) {
            1
        } else {
            self.children.iter().map(ZielonkaTree::behavioural_bound).sum()
        }
    }

    fn general_bound(&self) -> usize {
        if self.is_leaf() {
            1
        } else if self.in_f {
            self.children.iter().map(ZielonkaTree::general_bound).max().unwrap_or(1)
        } else {
            let inner: usize = self
                .children
                .iter()
                .filter(|c| !c.is_leaf())
                .map(ZielonkaTree::general_bound)
                .sum();
            inner + usize::from(self.children.iter().any(ZielonkaTree::is_leaf))
        }
    }

    /// Indented rendering, one node per line.
    pub fn render(&self, colours: &[String]) -> String {
        let mut out = String::new();
        self.render_into(colours, 0, &mut out);
        out
    }

    fn render_into(&self, colours: &[String], depth: usize, out: &mut String) {
        out.push_str(&"  ".repeat(depth));
        out.push_str(&self.label.render(colours));
        out.push_str(if self.in_f { " in F\n" } else { " not in F\n" });
        for c in &self.children {
            c.render_into(colours, depth + 1, out);
        }
    }
}

/// Memory sufficient for Eve with pure, behavioural and general strategies.
/// The behavioural figure is an upper bound only.
pub fn memory_bounds(tree: &ZielonkaTree) -> MemoryBounds {
    MemoryBounds {
        pure: tree.pure_bound(),
        behavioural_upper: tree.behavioural_bound(),
        general: tree.general_bound(),
    }
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::gallery;

    fn set(cs: &[usize]) -> ColourSet {
        cs.iter().copied().collect()
    }

    #[test]
    fn fig5_shape_and_bounds() {
        let (colours, family) = gallery::fig5_condition();
        let tree = zielonka_tree(colours.len(), &family);
        assert!(!tree.in_f);
        let labels: BTreeSet<ColourSet> = tree.children.iter().map(|c| c.label).collect();
        assert_eq!(labels, [set(&[1, 2, 3]), set(&[0, 2, 3]), set(&[0, 1, 3])].into());
        let inner: Vec<&ZielonkaTree> = tree.children.iter().filter(|c| !c.is_leaf()).collect();
        assert_eq!(inner.len(), 1);
        let abd = inner[0];
        assert_eq!(abd.label, set(&[0, 1, 3]));
        assert_eq!(abd.children.len(), 1);
        let ab = &abd.children[0];
        assert_eq!(ab.label, set(&[0, 1]));
        let leaves: Vec<ColourSet> = ab.children.iter().map(|c| c.label).collect();
        assert_eq!(leaves, vec![set(&[0]), set(&[1])]);
        assert!(tree.alternates());
        assert_eq!(
            memory_bounds(&tree),
            MemoryBounds { pure: 4, behavioural_upper: 3, general: 2 }
        );
    }

    #[test]
    fn small_trees() {
        // Buchi on g read as a Muller condition over {g, r}.
        let buchi: MullerFamily = [set(&[0]), set(&[0, 1])].into();
        let tree = zielonka_tree(2, &buchi);
        assert!(tree.in_f);
        assert_eq!(tree.children.len(), 1);
        assert_eq!(tree.children[0].label, set(&[1]));
        assert_eq!(memory_bounds(&tree), MemoryBounds { pure: 1, behavioural_upper: 1, general: 1 });

        let single = zielonka_tree(1, &[set(&[0])].into());
        assert!(single.is_leaf() && single.in_f);

        let either: MullerFamily = [set(&[0]), set(&[1])].into();
        let tree = zielonka_tree(2, &either);
        assert_eq!(memory_bounds(&tree), MemoryBounds { pure: 2, behavioural_upper: 1, general: 1 });
    }
}
