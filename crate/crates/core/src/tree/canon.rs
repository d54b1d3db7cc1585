//! Parenthesis encodings of rooted and unrooted trees.
//!
//! A rooted code is `(` + sorted child codes + `)`. The unrooted code is the
//! rooted code at the center, or the smaller of the two codes for a bicentral
//! tree. A root child whose edge carries a boundary weight is written with
//! `[`/`]` instead.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Tree, TreeError, Vertex};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalCode(String);

impl CanonicalCode {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn from_string(s: String) -> Self {
        CanonicalCode(s)
    }

    /// Vertex count encoded by the code.
    pub fn vertex_count(&self) -> usize {
        self.0.len() / 2
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn rooted_code(tree: &Tree, root: Vertex, marked: Option<Vertex>) -> CanonicalCode {
    let order = tree.bfs_order(root);
    let parent = tree.parents(root);
    let mut codes: Vec<String> = vec![String::new(); tree.n()];
    for &v in order.iter().rev() {
        let mut kids: Vec<String> = tree
            .neighbors(v)
            .iter()
            .filter(|&&(x, _)| parent[x] == Some(v))
            .map(|&(x, _)| std::mem::take(&mut codes[x]))
            .collect();
        kids.sort_unstable();
        let (open, close) = if marked == Some(v) && parent[v] == Some(root) {
            ('[', ']')
        } else {
            ('(', ')')
        };
        let mut s = String::with_capacity(2 + kids.iter().map(String::len).sum::<usize>());
        s.push(open);
        for k in kids {
            s.push_str(&k);
        }
        s.push(close);
        codes[v] = s;
    }
    CanonicalCode(std::mem::take(&mut codes[root]))
}

/// One or two centers, found by stripping leaves layer by layer.
pub(crate) fn centers(tree: &Tree) -> Vec<Vertex> {
    let n = tree.n();
    let mut deg: Vec<usize> = (0..n).map(|v| tree.degree(v)).collect();
    let mut layer: Vec<Vertex> = (0..n).filter(|&v| deg[v] <= 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &v in &layer {
            deg[v] = 0;
            for &(x, _) in tree.neighbors(v) {
                if deg[x] > 1 {
                    deg[x] -= 1;
                    if deg[x] == 1 {
                        next.push(x);
                    }
                }
            }
        }
        layer = next;
    }
    layer.sort_unstable();
    layer
}

pub(crate) fn unrooted_code(tree: &Tree) -> CanonicalCode {
    centers(tree)
        .into_iter()
        .map(|c| rooted_code(tree, c, None))
        .min()
        .expect("every tree has a center")
}

/// Rebuilds a unit-weight tree from a code, labeling vertices in preorder
/// (root = 0). Returns the tree and the marked root child, if any.
pub(crate) fn parse_code(code: &CanonicalCode) -> Result<(Tree, Option<Vertex>), TreeError> {
    let bad = || TreeError::SequenceParse(format!("malformed tree code {code}"));
    let mut edges = Vec::new();
    let mut stack: Vec<Vertex> = Vec::new();
    let mut next = 0;
    let mut marked = None;
    for ch in code.as_str().chars() {
        match ch {
            '(' | '[' => {
                if let Some(&p) = stack.last() {
                    edges.push((p, next));
                } else if next != 0 {
                    return Err(bad());
                }
                if ch == '[' {
                    marked = Some(next);
                }
                stack.push(next);
                next += 1;
            }
            ')' | ']' => {
                stack.pop().ok_or_else(bad)?;
            }
            _ => return Err(bad()),
        }
    }
    if !stack.is_empty() {
        return Err(bad());
    }
    Ok((Tree::from_edges(next, &edges)?, marked))
}

/// Canonical representative of the isomorphism class encoded by `code`.
pub fn tree_from_code(code: &CanonicalCode) -> Result<Tree, TreeError> {
    parse_code(code).map(|(t, _)| t)
}
