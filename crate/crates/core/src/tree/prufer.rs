//! Prüfer words over a degree sequence: multiset permutations in
//! lexicographic order, ranking/unranking, and decoding to labeled trees.

use super::{Tree, Vertex};

/// Lexicographic iterator over the distinct permutations of a multiset,
/// optionally bounded to `count` items starting from a given word.
#[derive(Debug, Clone)]
pub struct MultisetPermutations {
    current: Option<Vec<usize>>,
    remaining: Option<u128>,
}

impl MultisetPermutations {
    /// All distinct permutations of `items`, starting from the sorted one.
    pub fn new(mut items: Vec<usize>) -> Self {
        items.sort_unstable();
        MultisetPermutations {
            current: Some(items),
            remaining: None,
        }
    }

    /// `count` permutations starting at lexicographic rank `start`.
    pub fn range(items: Vec<usize>, start: u128, count: u128) -> Self {
        let current = unrank(items, start);
        MultisetPermutations {
            current,
            remaining: Some(count),
        }
    }
}

impl Iterator for MultisetPermutations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if let Some(r) = self.remaining.as_mut() {
            if *r == 0 {
                return None;
            }
            *r -= 1;
        }
        let word = self.current.take()?;
        let mut succ = word.clone();
        if next_permutation(&mut succ) {
            self.current = Some(succ);
        }
        Some(word)
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Number of distinct arrangements of a multiset with the given symbol
/// multiplicities, saturating at `u128::MAX`.
pub(crate) fn multinomial(counts: &[usize]) -> u128 {
    // Build up as a product of binomials to keep intermediates small.
    let mut total: u128 = 1;
    let mut placed: u128 = 0;
    for &c in counts {
        for k in 1..=c as u128 {
            placed += 1;
            total = match total.checked_mul(placed) {
                Some(x) => x / k,
                None => return u128::MAX,
            };
        }
    }
    total
}

/// Permutation of rank `rank` (0-based, lexicographic) of the multiset, or
/// `None` if the rank is out of range.
fn unrank(mut items: Vec<usize>, mut rank: u128) -> Option<Vec<usize>> {
    items.sort_unstable();
    let mut symbols: Vec<usize> = items.clone();
    symbols.dedup();
    let mut counts: Vec<usize> = symbols
        .iter()
        .map(|s| items.iter().filter(|&&x| x == *s).count())
        .collect();
    if rank >= multinomial(&counts) {
        return None;
    }
    let mut out = Vec::with_capacity(items.len());
    for _ in 0..items.len() {
        for i in 0..symbols.len() {
            if counts[i] == 0 {
                continue;
            }
            counts[i] -= 1;
            let block = multinomial(&counts);
            if rank < block {
                out.push(symbols[i]);
                break;
            }
            rank -= block;
            counts[i] += 1;
        }
    }
    Some(out)
}

/// Decodes a Prüfer word over vertices `0..n` (`word.len() == n - 2`).
pub fn decode_prufer(n: usize, word: &[Vertex]) -> Tree {
    assert!(n >= 2 && word.len() == n - 2, "Prüfer word length must be n - 2");
    let mut degree = vec![1usize; n];
    for &v in word {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    // Smallest current leaf, tracked with a moving pointer.
    let mut ptr = (0..n).find(|&v| degree[v] == 1).unwrap();
    let mut leaf = ptr;
    for &v in word {
        edges.push((leaf, v));
        degree[v] -= 1;
        if v < ptr && degree[v] == 1 {
            leaf = v;
        } else {
            ptr += 1;
            while degree[ptr] != 1 {
                ptr += 1;
            }
            leaf = ptr;
        }
    }
    // The last two leaves: `leaf` and n - 1.
    edges.push((leaf, n - 1));
    Tree::from_edges(n, &edges).expect("Prüfer decoding yields a tree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutations_of_small_multiset() {
        let all: Vec<_> = MultisetPermutations::new(vec![2, 1, 1]).collect();
        assert_eq!(all, vec![vec![1, 1, 2], vec![1, 2, 1], vec![2, 1, 1]]);
    }

    #[test]
    fn empty_multiset_has_one_permutation() {
        assert_eq!(MultisetPermutations::new(vec![]).count(), 1);
    }

    #[test]
    fn multinomial_values() {
        assert_eq!(multinomial(&[1, 1]), 2);
        assert_eq!(multinomial(&[2, 1, 1]), 12);
        assert_eq!(multinomial(&[]), 1);
        assert_eq!(multinomial(&[5]), 1);
    }

    #[test]
    fn ranges_tile_the_full_order() {
        let items = vec![0, 0, 1, 2, 2, 3];
        let full: Vec<_> = MultisetPermutations::new(items.clone()).collect();
        let total = full.len() as u128;
        let mut tiled = Vec::new();
        let mut start = 0;
        while start < total {
            let len = 7.min(total - start);
            tiled.extend(MultisetPermutations::range(items.clone(), start, len));
            start += len;
        }
        assert_eq!(tiled, full);
    }

    #[test]
    fn decode_known_word() {
        // Word (3,3,3,4) on 6 vertices: leaves 0,1,2 hang off 3, then 3-4, 4-5.
        let t = decode_prufer(6, &[3, 3, 3, 4]);
        let edges: Vec<_> = t.edges().into_iter().map(|(u, v, _)| (u, v)).collect();
        assert_eq!(edges, vec![(0, 3), (1, 3), (2, 3), (3, 4), (4, 5)]);
    }

    #[test]
    fn decode_two_vertices() {
        assert_eq!(decode_prufer(2, &[]).edges().len(), 1);
    }
}
