//! Exhaustive enumeration of unlabeled (and rooted) trees with a prescribed
//! degree sequence: decode every Prüfer word, deduplicate by canonical code.

use std::collections::BTreeSet;

use super::canon::{parse_code, rooted_code};
use super::prufer::{decode_prufer, multinomial, MultisetPermutations};
use super::{CanonicalCode, DegreeSequence, RootedBoundaryTree, Tree, TreeError};

/// Number of labeled trees on vertices `0..n` where vertex `i` has degree
/// `d_i`, i.e. `(n-2)! / prod (d_i - 1)!`. Saturates at `u128::MAX`.
pub fn labeled_count(seq: &DegreeSequence) -> u128 {
    let counts: Vec<usize> = seq.degrees().iter().map(|&d| d.saturating_sub(1)).collect();
    multinomial(&counts)
}

/// The multiset of the Prüfer word: vertex `i` repeated `d_i - 1` times.
pub(crate) fn prufer_multiset(seq: &DegreeSequence) -> Vec<usize> {
    seq.degrees()
        .iter()
        .enumerate()
        .flat_map(|(i, &d)| std::iter::repeat_n(i, d.saturating_sub(1)))
        .collect()
}

/// Canonical codes of the trees decoded from Prüfer ranks `start..start+count`.
pub fn unique_codes_in_range(
    seq: &DegreeSequence,
    start: u128,
    count: u128,
) -> BTreeSet<CanonicalCode> {
    let n = seq.len();
    MultisetPermutations::range(prufer_multiset(seq), start, count)
        .map(|word| decode_prufer(n, &word).canonical_code())
        .collect()
}

/// Every unlabeled tree with degree multiset `seq`, exactly once, ordered by
/// canonical code. Each tree is the canonical representative of its code.
pub fn enumerate_trees(seq: &DegreeSequence) -> Result<Vec<Tree>, TreeError> {
    let seq = seq.clone().validated()?;
    unique_codes_in_range(&seq, 0, labeled_count(&seq))
        .iter()
        .map(super::tree_from_code)
        .collect()
}

/// Every (tree, root) pair with degree multiset `seq`, up to rooted
/// isomorphism, ordered by rooted code. For `w0 != 1` each inequivalent
/// root edge carrying `w0` is a separate entry.
pub fn enumerate_rooted_trees(
    seq: &DegreeSequence,
    w0: f64,
) -> Result<Vec<RootedBoundaryTree>, TreeError> {
    if !(w0.is_finite() && w0 >= 1.0) {
        return Err(TreeError::BoundaryWeight(w0));
    }
    let mut codes = BTreeSet::new();
    for tree in enumerate_trees(seq)? {
        for root in 0..tree.n() {
            if w0 == 1.0 {
                codes.insert(rooted_code(&tree, root, None));
            } else {
                for &(nbr, _) in tree.neighbors(root) {
                    codes.insert(rooted_code(&tree, root, Some(nbr)));
                }
            }
        }
    }
    codes
        .iter()
        .map(|code| {
            let (tree, marked) = parse_code(code)?;
            match marked {
                Some(nbr) => RootedBoundaryTree::with_boundary_weight(tree, 0, nbr, w0),
                None => RootedBoundaryTree::new(tree, 0),
            }
        })
        .collect()
}

/// All tree sequences on `n` vertices, non-increasing, in lexicographically
/// decreasing order.
pub fn all_tree_sequences(n: usize) -> Vec<DegreeSequence> {
    if n < 2 {
        return Vec::new();
    }
    // Partitions of n - 2 into at most n parts, each part shifted by one.
    fn rec(left: usize, max: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        if slots == 0 {
            return;
        }
        for part in (1..=max.min(left)).rev() {
            cur.push(part);
            rec(left - part, part, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut parts = Vec::new();
    rec(n - 2, n - 2, n, &mut Vec::new(), &mut parts);
    parts
        .into_iter()
        .map(|p| {
            let mut d: Vec<usize> = p.into_iter().map(|x| x + 1).collect();
            d.resize(n, 1);
            DegreeSequence::new(d)
        })
        .collect()
}
