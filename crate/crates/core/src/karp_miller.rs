//! Karp-Miller trees and covers for VAS and VASS.

use std::collections::VecDeque;
use std::fmt;

use crate::closed::DownBasis;
use crate::model::{encode_vassz, Layout, Vas, Vassz};
use crate::omega::{Natural, OmegaVec};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode<N, E> {
    pub label: OmegaVec<N>,
    pub parent: Option<usize>,
    /// How the node was produced from its parent; `None` at the root.
    pub edge: Option<E>,
    /// Set when the label repeats a strict ancestor's and the node was not expanded.
    pub closed: bool,
}

/// A labeled tree stored by index; children always come after their parent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledTree<N, E> {
    nodes: Vec<TreeNode<N, E>>,
}

pub type KmTree<N> = LabeledTree<N, String>;

impl<N: Natural, E> LabeledTree<N, E> {
    pub(crate) fn with_root(label: OmegaVec<N>) -> Self {
        LabeledTree {
            nodes: vec![TreeNode {
                label,
                parent: None,
                edge: None,
                closed: false,
            }],
        }
    }

    pub(crate) fn push(&mut self, parent: usize, label: OmegaVec<N>, edge: E) -> usize {
        self.nodes.push(TreeNode {
            label,
            parent: Some(parent),
            edge: Some(edge),
            closed: false,
        });
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[TreeNode<N, E>] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn children(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        (n + 1..self.nodes.len()).filter(move |&k| self.nodes[k].parent == Some(n))
    }

    pub fn strict_ancestors(&self, n: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::successors(self.nodes[n].parent, move |&k| self.nodes[k].parent)
    }

    pub fn depth(&self, n: usize) -> usize {
        self.strict_ancestors(n).count()
    }

    pub fn labels(&self) -> impl Iterator<Item = &OmegaVec<N>> {
        self.nodes.iter().map(|n| &n.label)
    }

    /// Minimal basis of the node labels.
    pub fn basis(&self) -> DownBasis<N> {
        let dim = self.nodes[0].label.dim();
        DownBasis::minimize(dim, self.labels().cloned()).expect("all labels share the root dimension")
    }

    /// Closes node `n` if its label equals a strict ancestor's; otherwise
    /// accelerates it against every smaller strict ancestor until nothing
    /// changes. Returns whether the node stays open.
    pub(crate) fn settle(&mut self, n: usize) -> bool {
        if self
            .strict_ancestors(n)
            .any(|a| self.nodes[a].label == self.nodes[n].label)
        {
            self.nodes[n].closed = true;
            return false;
        }
        let ancestors: Vec<usize> = self.strict_ancestors(n).collect();
        let mut x = self.nodes[n].label.clone();
        loop {
            let mut changed = false;
            for &a in &ancestors {
                let x0 = &self.nodes[a].label;
                if x0 != &x && x0.leq_unchecked(&x) {
                    let w = x0.widen(&x).expect("x0 ≤ x was just checked");
                    if w != x {
                        x = w;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        self.nodes[n].label = x;
        true
    }
}

impl<N: Natural, E: fmt::Display> LabeledTree<N, E> {
    /// Indented dump, one node per line: `label [edge]`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut stack = vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            out.push_str(&"  ".repeat(self.depth(n)));
            out.push_str(&node.label.to_string());
            if let Some(e) = &node.edge {
                out.push_str(&format!(" [{e}]"));
            }
            out.push('\n');
            let mut kids: Vec<usize> = self.children(n).collect();
            kids.reverse();
            stack.extend(kids);
        }
        out
    }
}

/// Builds the Karp-Miller tree, or `None` once it would exceed `max_nodes`.
pub fn km_tree_bounded<N: Natural>(v: &Vas<N>, max_nodes: usize) -> Option<KmTree<N>> {
    let mut tree = KmTree::with_root(v.init().clone());
    let mut queue = VecDeque::from([0usize]);
    while let Some(n) = queue.pop_front() {
        if !tree.settle(n) {
            continue;
        }
        let x = tree.nodes()[n].label.clone();
        for a in v.actions() {
            if let Some(y) = x.add_delta(&a.delta).expect("dimensions validated") {
                if tree.len() >= max_nodes {
                    return None;
                }
                let child = tree.push(n, y, a.name.clone());
                queue.push_back(child);
            }
        }
    }
    Some(tree)
}

/// The Karp-Miller tree of `v`.
pub fn km_tree<N: Natural>(v: &Vas<N>) -> KmTree<N> {
    km_tree_bounded(v, usize::MAX).expect("unbounded construction always completes")
}

/// Minimal basis of `Cover(v)`.
pub fn km_cover<N: Natural>(v: &Vas<N>) -> DownBasis<N> {
    km_tree(v).basis()
}

/// Karp-Miller cover of a VASS, ignoring any zero-test transitions, over
/// counters followed by one indicator per control state.
pub fn km_cover_vass<N: Natural>(s: &Vassz<N>) -> (DownBasis<N>, KmTree<N>, Layout) {
    let (flat, layout) = encode_vassz(s);
    let tree = km_tree(&flat.strip_zero_test());
    (layout.project_basis(&tree.basis()), tree, layout)
}
