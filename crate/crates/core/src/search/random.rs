//! Seeded random instances for the sampled verification suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::tree::{decode_prufer, RootedBoundaryTree, Tree, Vertex};

/// Uniform labeled tree on `n` vertices via a random Prüfer word.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> Tree {
    assert!(n >= 2);
    let word: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    decode_prufer(n, &word)
}

/// Random caterpillar on `n >= 3` vertices: a spine path `0..k` with the
/// remaining vertices hung as pendants, both spine ends receiving at least
/// one (two when `k = 1`).
pub fn random_caterpillar<R: Rng>(rng: &mut R, n: usize) -> Tree {
    assert!(n >= 3);
    let k = rng.gen_range(1..=n - 2);
    let mut edges: Vec<(Vertex, Vertex)> = (1..k).map(|i| (i - 1, i)).collect();
    let mut next = k;
    let mut hang = |s: Vertex, edges: &mut Vec<(Vertex, Vertex)>| {
        edges.push((s, next));
        next += 1;
    };
    hang(0, &mut edges);
    hang(k - 1, &mut edges);
    for _ in 0..n - k - 2 {
        hang(rng.gen_range(0..k), &mut edges);
    }
    Tree::from_edges(n, &edges).expect("caterpillar construction")
}

/// A random rooted caterpillar whose root is a pendant vertex or a spine
/// end, so that it has a trunk. The boundary weight sits on the trunk edge.
pub fn random_rooted_caterpillar<R: Rng>(rng: &mut R, n: usize, w0: f64) -> RootedBoundaryTree {
    loop {
        let t = random_caterpillar(rng, n);
        let candidates: Vec<Vertex> = (0..n)
            .filter(|&v| {
                t.neighbors(v).iter().filter(|&&(u, _)| !t.is_pendant(u)).count() <= 1
            })
            .collect();
        let root = *candidates.choose(rng).expect("caterpillars have pendant vertices");
        if let Ok(rbt) = RootedBoundaryTree::with_trunk_boundary(t, root, w0) {
            if rbt.trunk().is_ok() {
                return rbt;
            }
        }
    }
}

/// Random rooted tree with a random boundary weight in `[1, 3]` on a random
/// root edge (unit weight half of the time).
pub fn random_rooted_tree<R: Rng>(rng: &mut R, n: usize) -> RootedBoundaryTree {
    let t = random_tree(rng, n);
    let root = rng.gen_range(0..n);
    let (nbr, _) = *t.neighbors(root).choose(rng).expect("trees are connected");
    let w0 = if rng.gen_bool(0.5) {
        1.0
    } else {
        rng.gen_range(1.0..=3.0)
    };
    RootedBoundaryTree::with_boundary_weight(t, root, nbr, w0).expect("valid boundary weight")
}
