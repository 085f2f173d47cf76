//! Binary decision trees shared by the tree ensembles.
//!
//! Nodes live in a flat vector; a sample goes left when
//! `x[feature] <= threshold`.

#[derive(Clone, Debug, PartialEq)]
pub enum Node<L> {
    Leaf(L),
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tree<L> {
    pub(crate) nodes: Vec<Node<L>>,
}

impl<L> Tree<L> {
    pub fn leaf(&self, x: &[f64]) -> &L {
        let mut i = 0;
        loop {
            match &self.nodes[i] {
                Node::Leaf(v) => return v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => i = if x[*feature] <= *threshold { *left } else { *right },
            }
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf(_))).count()
    }

    pub fn depth(&self) -> usize {
        fn go<L>(t: &Tree<L>, i: usize) -> usize {
            match &t.nodes[i] {
                Node::Leaf(_) => 0,
                Node::Split { left, right, .. } => 1 + go(t, *left).max(go(t, *right)),
            }
        }
        go(self, 0)
    }
}

/// Builds a tree depth-first. `grow` sees the samples reaching a node and
/// either returns a leaf value or a split `(feature, threshold)`.
pub(crate) fn build<L>(
    samples: Vec<usize>,
    x: &[Vec<f64>],
    mut grow: impl FnMut(&[usize], usize) -> Result<(usize, f64), L>,
) -> Tree<L> {
    let mut nodes = Vec::new();
    fn rec<L>(
        samples: Vec<usize>,
        depth: usize,
        x: &[Vec<f64>],
        nodes: &mut Vec<Node<L>>,
        grow: &mut impl FnMut(&[usize], usize) -> Result<(usize, f64), L>,
    ) -> usize {
        let id = nodes.len();
        match grow(&samples, depth) {
            Err(leaf) => {
                nodes.push(Node::Leaf(leaf));
                id
            }
            Ok((feature, threshold)) => {
                let (l, r): (Vec<usize>, Vec<usize>) = samples.iter().partition(|&&i| x[i][feature] <= threshold);
                nodes.push(Node::Split {
                    feature,
                    threshold,
                    left: 0,
                    right: 0,
                });
                let left = rec(l, depth + 1, x, nodes, grow);
                let right = rec(r, depth + 1, x, nodes, grow);
                nodes[id] = Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                };
                id
            }
        }
    }
    rec(samples, 0, x, &mut nodes, &mut grow);
    Tree { nodes }
}
