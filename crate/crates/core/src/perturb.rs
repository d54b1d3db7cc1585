//! Moves on rooted boundary trees that strictly lower the first Dirichlet
//! eigenvalue, gluing of two rooted trees, and the structural predicates
//! describing minimizers.

use serde::Serialize;
use thiserror::Error;

use crate::nodal::{CharacteristicSet, FiedlerAnalysis};
use crate::spectral::{self, SpectralError};
use crate::tree::{DegreeSequence, EdgeMove, RootedBoundaryTree, Tree, TreeError, Vertex};

/// Default relative margin for "strictly smaller".
pub const DEFAULT_STRICT_MARGIN: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PerturbError {
    #[error("vertex {0} is not a pendant vertex")]
    NotPendant(Vertex),
    #[error("vertex {0} is not on the trunk")]
    OffTrunk(Vertex),
    #[error("vertex {0} is the root")]
    IsRoot(Vertex),
    #[error("pendant {w} is not attached to {vi}")]
    NotAttached { w: Vertex, vi: Vertex },
    #[error("need h({vi}) < h({vj})")]
    HeightOrder { vi: Vertex, vj: Vertex },
    #[error("moving the weighted boundary edge is not supported")]
    BoundaryEdge,
    #[error("invalid rearrangement paths: {0}")]
    InvalidPaths(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PerturbKind {
    P1,
    P2,
    Rearrange,
}

/// Before/after first Dirichlet eigenvalues of one move. `moved` lists
/// `(removed edge, added edge)`; a P2 insertion records the new edge with
/// the removed slot equal to it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationRecord {
    pub kind: PerturbKind,
    pub before_nu: f64,
    pub after_nu: f64,
    pub moved: Vec<EdgeMove>,
}

impl PerturbationRecord {
    pub fn measure(
        kind: PerturbKind,
        before: &RootedBoundaryTree,
        after: &RootedBoundaryTree,
        moved: Vec<EdgeMove>,
    ) -> Result<Self, SpectralError> {
        Ok(PerturbationRecord {
            kind,
            before_nu: spectral::dirichlet_nu(before)?.value,
            after_nu: spectral::dirichlet_nu(after)?.value,
            moved,
        })
    }

    /// `after < before` with relative gap larger than `margin`.
    pub fn strictly_decreased(&self, margin: f64) -> bool {
        self.after_nu < self.before_nu - margin * self.before_nu
    }
}

fn rebuild(rbt: &RootedBoundaryTree, tree: Tree) -> Result<RootedBoundaryTree, TreeError> {
    let out = RootedBoundaryTree::from_tree(tree, rbt.root())?;
    debug_assert_eq!(out.boundary_weight(), rbt.boundary_weight());
    Ok(out)
}

/// (P1): replace the edge `w vi` by `w vj`, where `w != root` is a pendant
/// attached to trunk vertex `vi` and `vj` is a trunk vertex farther from
/// the root.
pub fn perturb_p1(
    rbt: &RootedBoundaryTree,
    w: Vertex,
    vi: Vertex,
    vj: Vertex,
) -> Result<RootedBoundaryTree, PerturbError> {
    let trunk = rbt.trunk()?;
    let t = rbt.tree();
    let n = t.n();
    for x in [w, vi, vj] {
        if x >= n {
            return Err(TreeError::VertexOutOfRange { vertex: x, n }.into());
        }
    }
    if w == rbt.root() {
        return Err(PerturbError::IsRoot(w));
    }
    if !t.is_pendant(w) {
        return Err(PerturbError::NotPendant(w));
    }
    if t.weight(w, vi).is_none() {
        return Err(PerturbError::NotAttached { w, vi });
    }
    for x in [vi, vj] {
        if !trunk.contains(&x) {
            return Err(PerturbError::OffTrunk(x));
        }
    }
    if w == vj || rbt.height(vi) >= rbt.height(vj) {
        return Err(PerturbError::HeightOrder { vi, vj });
    }
    if vi == rbt.root() && rbt.boundary_edge() == Some(w) {
        return Err(PerturbError::BoundaryEdge);
    }
    let tree = t.rewired(&[((w, vi), (w, vj))])?;
    Ok(rebuild(rbt, tree)?)
}

/// (P2): attach a new pendant vertex (id `n`) to trunk vertex `vj != root`.
pub fn perturb_p2(rbt: &RootedBoundaryTree, vj: Vertex) -> Result<RootedBoundaryTree, PerturbError> {
    let trunk = rbt.trunk()?;
    if vj == rbt.root() {
        return Err(PerturbError::IsRoot(vj));
    }
    if !trunk.contains(&vj) {
        return Err(PerturbError::OffTrunk(vj));
    }
    let n = rbt.n();
    let mut edges = rbt.tree().edges();
    edges.push((vj, n, 1.0));
    let tree = Tree::from_weighted_edges(n + 1, &edges)?;
    Ok(rebuild(rbt, tree)?)
}

fn check_root_path(t: &Tree, root: Vertex, path: &[Vertex]) -> Result<(), PerturbError> {
    if path.first() != Some(&root) {
        return Err(PerturbError::InvalidPaths("path does not start at the root".into()));
    }
    let mut seen = vec![false; t.n()];
    for &v in path {
        if v >= t.n() || std::mem::replace(&mut seen[v], true) {
            return Err(PerturbError::InvalidPaths(format!("bad vertex {v} on path")));
        }
    }
    if path.windows(2).any(|e| t.weight(e[0], e[1]).is_none()) {
        return Err(PerturbError::InvalidPaths("consecutive vertices not adjacent".into()));
    }
    Ok(())
}

/// Branch rearrangement: given two root paths `(.., v, x_i, .., x_j)` and
/// `(.., v, y_i, .., y_k)` diverging after `v` and ending at pendants, with
/// `f(x_j) > f(y_i)` (the roles are exchanged otherwise), replace every
/// edge `y_i t` with `t != v` by `x_j t`. `f` is indexed by vertex (root
/// included). The degree multiset is unchanged.
pub fn rearrange_branches(
    rbt: &RootedBoundaryTree,
    f: &[f64],
    x_path: &[Vertex],
    y_path: &[Vertex],
) -> Result<RootedBoundaryTree, PerturbError> {
    let t = rbt.tree();
    if f.len() != t.n() {
        return Err(PerturbError::InvalidPaths("vector length mismatch".into()));
    }
    check_root_path(t, rbt.root(), x_path)?;
    check_root_path(t, rbt.root(), y_path)?;
    let split = x_path
        .iter()
        .zip(y_path)
        .position(|(a, b)| a != b)
        .ok_or_else(|| PerturbError::InvalidPaths("paths do not diverge".into()))?;
    let (mut xs, mut ys) = (&x_path[split..], &y_path[split..]);
    let v = x_path[split - 1];
    for p in [xs, ys] {
        if !t.is_pendant(*p.last().unwrap()) {
            return Err(PerturbError::InvalidPaths("path does not end at a pendant".into()));
        }
    }
    if ys.contains(&xs[0]) || xs.contains(&ys[0]) {
        return Err(PerturbError::InvalidPaths("paths rejoin".into()));
    }
    if f[*xs.last().unwrap()] <= f[ys[0]] {
        std::mem::swap(&mut xs, &mut ys);
        if f[*xs.last().unwrap()] <= f[ys[0]] {
            return Err(PerturbError::InvalidPaths(
                "neither orientation has f(x_j) > f(y_i)".into(),
            ));
        }
    }
    let x_end = *xs.last().unwrap();
    let y_first = ys[0];
    if t.is_pendant(y_first) {
        return Err(PerturbError::InvalidPaths("nothing hangs below y_i".into()));
    }
    let moves: Vec<_> = t
        .neighbors(y_first)
        .iter()
        .map(|&(x, _)| x)
        .filter(|&x| x != v)
        .map(|x| ((y_first, x), (x_end, x)))
        .collect();
    let tree = t.rewired(&moves)?;
    Ok(rebuild(rbt, tree)?)
}

/// Identifies the two roots into one interior vertex. `t1` keeps its ids;
/// the non-root vertices of `t2` follow in id order. Weights are kept.
pub fn glue(t1: &RootedBoundaryTree, t2: &RootedBoundaryTree) -> Tree {
    let n1 = t1.n();
    let mut index = vec![usize::MAX; t2.n()];
    index[t2.root()] = t1.root();
    for (i, v) in t2.interior().into_iter().enumerate() {
        index[v] = n1 + i;
    }
    let mut edges = t1.tree().edges();
    edges.extend(
        t2.tree()
            .edges()
            .into_iter()
            .map(|(u, v, w)| (index[u], index[v], w)),
    );
    Tree::from_weighted_edges(n1 + t2.n() - 1, &edges).expect("gluing two trees gives a tree")
}

/// Rooted caterpillar for `seq` whose root has degree `root_degree`: the
/// remaining non-pendant degrees form a path hanging off the root in
/// non-decreasing order, and all other neighbors of the root are pendants.
/// Ids: root 0, path 1..=k outward, then pendants of path vertices in path
/// order, then the root's pendants.
pub fn build_monotone_rooted_caterpillar(
    seq: &DegreeSequence,
    root_degree: usize,
) -> Result<RootedBoundaryTree, TreeError> {
    let seq = seq.clone().validated()?;
    let mut rest = seq.degrees().to_vec();
    let pos = rest
        .iter()
        .position(|&d| d == root_degree)
        .ok_or_else(|| TreeError::Unrealizable(format!("no vertex of degree {root_degree}")))?;
    rest.remove(pos);
    let mut spine: Vec<usize> = rest.iter().copied().filter(|&d| d >= 2).collect();
    spine.sort_unstable();
    let k = spine.len();
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    if k > 0 {
        edges.push((0, 1));
    }
    for i in 1..k {
        edges.push((i, i + 1));
    }
    let mut next = k + 1;
    for (i, &d) in spine.iter().enumerate() {
        let fixed = 1 + usize::from(i + 1 < k);
        for _ in fixed..d {
            edges.push((i + 1, next));
            next += 1;
        }
    }
    let root_pendants = root_degree - usize::from(k > 0);
    for _ in 0..root_pendants {
        edges.push((0, next));
        next += 1;
    }
    let tree = Tree::from_edges(next, &edges)?;
    if tree.degree_sequence() != seq.clone().sorted() {
        return Err(TreeError::Unrealizable(format!(
            "root degree {root_degree} with {seq}"
        )));
    }
    RootedBoundaryTree::new(tree, 0)
}

/// Non-pendant vertices other than the root, ordered outward from the
/// root, when they form a path starting next to (or at) the root.
fn outward_spine(rbt: &RootedBoundaryTree) -> Option<Vec<Vertex>> {
    let t = rbt.tree();
    let root = rbt.root();
    let mut spine = t.spine()?;
    if spine.is_empty() {
        return Some(spine);
    }
    if rbt.inner_root_neighbors().len() > 1 {
        return None;
    }
    let anchor = if t.is_pendant(root) {
        t.neighbors(root)[0].0
    } else {
        root
    };
    if spine.last() == Some(&anchor) {
        spine.reverse();
    }
    if spine[0] != anchor {
        // Hanging off the middle of the spine, or a pendant root whose
        // neighbor is itself pendant (n = 2 has an empty spine).
        return None;
    }
    spine.retain(|&v| v != root);
    Some(spine)
}

/// Caterpillar with at most one non-pendant root neighbor whose non-root,
/// non-pendant degrees are non-decreasing moving away from the root.
pub fn is_monotone_rooted_caterpillar(rbt: &RootedBoundaryTree) -> bool {
    match outward_spine(rbt) {
        Some(spine) => spine
            .windows(2)
            .all(|w| rbt.tree().degree(w[0]) <= rbt.tree().degree(w[1])),
        None => false,
    }
}

/// Shape of the rooted trees with minimal first Dirichlet eigenvalue for
/// their degree sequence: the root is a pendant vertex and the tree is a
/// monotone rooted caterpillar.
pub fn is_minimal_shape_rooted(rbt: &RootedBoundaryTree) -> bool {
    rbt.tree().is_pendant(rbt.root()) && is_monotone_rooted_caterpillar(rbt)
}

/// Caterpillar whose non-pendant vertices on each side of the Fiedler
/// vector (non-negative / non-positive, zeros on both) form a path whose
/// degrees are non-decreasing moving away from the characteristic set.
pub fn is_theorem1_shape(t: &Tree, analysis: &FiedlerAnalysis) -> bool {
    let spine = match t.spine() {
        Some(s) => s,
        None => return false,
    };
    let f = &analysis.fiedler;
    let tau = analysis.tau_zero;
    let anchors = match analysis.charset {
        CharacteristicSet::Vertex(c) => vec![c],
        CharacteristicSet::Edge { neg, pos } => vec![neg, pos],
    };
    let dist: Vec<usize> = (0..t.n())
        .map(|v| {
            anchors
                .iter()
                .map(|&a| t.distances_from(a)[v])
                .min()
                .unwrap()
        })
        .collect();
    let sides: [Box<dyn Fn(f64) -> bool>; 2] =
        [Box::new(|x| x >= -tau), Box::new(|x| x <= tau)];
    sides.iter().all(|on_side| {
        let positions: Vec<usize> = (0..spine.len()).filter(|&i| on_side(f[spine[i]])).collect();
        if positions.is_empty() {
            return true;
        }
        if positions.windows(2).any(|w| w[1] != w[0] + 1) {
            return false;
        }
        let path: Vec<Vertex> = positions.iter().map(|&i| spine[i]).collect();
        let start = (0..path.len()).min_by_key(|&i| dist[path[i]]).unwrap();
        let deg = |i: usize| t.degree(path[i]);
        (start..path.len().saturating_sub(1)).all(|i| deg(i) <= deg(i + 1))
            && (1..=start).all(|i| deg(i) <= deg(i - 1))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nodal::{analyze, DEFAULT_TAU_REL};
    use crate::spectral::{dirichlet_nu, rooted_path_nu};
    use crate::tree::{build_caterpillar, CaterpillarSpec};

    fn seq(s: &str) -> DegreeSequence {
        s.parse().unwrap()
    }

    /// Spine (3,2) with the root on a pendant of the degree-3 vertex.
    fn spine32_rooted() -> RootedBoundaryTree {
        // spine 0 (deg 3), 1 (deg 2); pendants 2,3 on 0 and 4 on 1.
        let t = build_caterpillar(&CaterpillarSpec::new(vec![3, 2])).unwrap();
        RootedBoundaryTree::new(t, 2).unwrap()
    }

    #[test]
    fn p1_to_the_head_lengthens_the_trunk() {
        let rbt = spine32_rooted();
        assert_eq!(rbt.trunk().unwrap(), vec![2, 0, 1, 4]);
        let after = perturb_p1(&rbt, 3, 0, 4).unwrap();
        assert_eq!(after.trunk().unwrap().len(), 5);
        let rec = PerturbationRecord::measure(PerturbKind::P1, &rbt, &after, vec![]).unwrap();
        assert!((rec.after_nu - rooted_path_nu(4)).abs() < 1e-12);
        assert!((rooted_path_nu(4) - 0.120_614_758_428_182_6).abs() < 1e-12);
        assert!(rec.strictly_decreased(DEFAULT_STRICT_MARGIN));
        assert_eq!(after.tree().degree_sequence(), seq("2,2,2,1,1"));
    }

    #[test]
    fn p1_preconditions() {
        let rbt = spine32_rooted();
        assert!(matches!(perturb_p1(&rbt, 1, 0, 4), Err(PerturbError::NotPendant(1))));
        assert!(matches!(perturb_p1(&rbt, 3, 1, 4), Err(PerturbError::NotAttached { .. })));
        assert!(matches!(perturb_p1(&rbt, 4, 1, 0), Err(PerturbError::HeightOrder { .. })));
        assert!(matches!(perturb_p1(&rbt, 2, 0, 1), Err(PerturbError::IsRoot(2))));
        assert!(matches!(perturb_p1(&rbt, 4, 1, 3), Err(PerturbError::OffTrunk(3))));
    }

    #[test]
    fn p2_on_rooted_paths() {
        let p3 = RootedBoundaryTree::new(Tree::path(3), 0).unwrap();
        let after = perturb_p2(&p3, 2).unwrap();
        assert!((dirichlet_nu(&after).unwrap().value - rooted_path_nu(3)).abs() < 1e-12);

        let p2 = RootedBoundaryTree::new(Tree::path(2), 0).unwrap();
        let after = perturb_p2(&p2, 1).unwrap();
        assert!((dirichlet_nu(&after).unwrap().value - rooted_path_nu(2)).abs() < 1e-12);

        let p4 = RootedBoundaryTree::new(Tree::path(4), 0).unwrap();
        let mid = perturb_p2(&p4, 2).unwrap();
        assert!(dirichlet_nu(&mid).unwrap().value < rooted_path_nu(3) - 1e-10);

        assert!(matches!(perturb_p2(&p4, 0), Err(PerturbError::IsRoot(0))));
    }

    #[test]
    fn spider_rearrangement() {
        // Legs 0-1-2, 0-3-4, 0-5-6; root at leaf 2.
        let rbt = RootedBoundaryTree::new(Tree::spider(&[2, 2, 2]), 2).unwrap();
        let g = spectral::with_root_zero(&rbt, &dirichlet_nu(&rbt).unwrap().vector);
        let after = rearrange_branches(&rbt, &g, &[2, 1, 0, 3, 4], &[2, 1, 0, 5, 6]).unwrap();
        assert_eq!(after.tree().degree_sequence(), rbt.tree().degree_sequence());
        assert!(after.tree().is_caterpillar());
        let before_nu = dirichlet_nu(&rbt).unwrap().value;
        let after_nu = dirichlet_nu(&after).unwrap().value;
        assert!(after_nu < before_nu * (1.0 - DEFAULT_STRICT_MARGIN));
    }

    #[test]
    fn rearrangement_rejects_bad_paths() {
        let rbt = RootedBoundaryTree::new(Tree::spider(&[2, 2, 2]), 2).unwrap();
        let g = vec![0.0; 7];
        assert!(rearrange_branches(&rbt, &g, &[2, 1, 0, 3, 4], &[2, 1, 0, 3, 4]).is_err());
        assert!(rearrange_branches(&rbt, &g, &[1, 0, 3, 4], &[1, 0, 5, 6]).is_err());
        assert!(rearrange_branches(&rbt, &g, &[2, 1, 0, 4], &[2, 1, 0, 5, 6]).is_err());
        // All-zero vector: no orientation satisfies the strict inequality.
        assert!(rearrange_branches(&rbt, &g, &[2, 1, 0, 3, 4], &[2, 1, 0, 5, 6]).is_err());
    }

    #[test]
    fn glue_examples() {
        let p3 = RootedBoundaryTree::new(Tree::path(3), 0).unwrap();
        let p2 = RootedBoundaryTree::new(Tree::path(2), 0).unwrap();
        let five = glue(&p3, &p3);
        assert_eq!(five.canonical_code(), Tree::path(5).canonical_code());
        let alpha = spectral::algebraic_connectivity(&five).unwrap().value;
        assert!((alpha - rooted_path_nu(2)).abs() < 1e-10);

        let four = glue(&p2, &p3);
        assert_eq!(four.canonical_code(), Tree::path(4).canonical_code());
        let alpha = spectral::algebraic_connectivity(&four).unwrap().value;
        assert!(alpha < 1.0 - 1e-8);

        let three = glue(&p2, &p2);
        let alpha = spectral::algebraic_connectivity(&three).unwrap().value;
        assert!((alpha - 1.0).abs() < 1e-12);
    }

    #[test]
    fn monotone_builder() {
        let rbt = build_monotone_rooted_caterpillar(&seq("2,2,1,1"), 1).unwrap();
        assert_eq!(rbt.tree().canonical_code(), Tree::path(4).canonical_code());
        assert_eq!(rbt.tree().degree(rbt.root()), 1);

        let rbt = build_monotone_rooted_caterpillar(&seq("3,2,2,2,1,1,1"), 1).unwrap();
        let degrees: Vec<usize> = (1..=4).map(|v| rbt.tree().degree(v)).collect();
        assert_eq!(degrees, vec![2, 2, 2, 3]);
        assert!(is_minimal_shape_rooted(&rbt));

        let rbt = build_monotone_rooted_caterpillar(&seq("3,3,1,1,1,1"), 1).unwrap();
        assert!(is_minimal_shape_rooted(&rbt));
        assert_eq!(rbt.tree().spine().unwrap().len(), 2);

        let rbt = build_monotone_rooted_caterpillar(&seq("3,3,1,1,1,1"), 3).unwrap();
        assert!(is_monotone_rooted_caterpillar(&rbt));
        assert!(!is_minimal_shape_rooted(&rbt));

        assert!(build_monotone_rooted_caterpillar(&seq("3,3,1,1,1,1"), 2).is_err());
        assert!(build_monotone_rooted_caterpillar(&seq("2,2,2"), 2).is_err());
    }

    #[test]
    fn minimal_shape_negatives() {
        // Spine degrees (3, 2) outward from a pendant root: decreasing.
        assert!(!is_minimal_shape_rooted(&spine32_rooted()));
        let spider = RootedBoundaryTree::new(Tree::spider(&[2, 2, 2]), 2).unwrap();
        assert!(!is_minimal_shape_rooted(&spider));
        // Pendant root hanging off the middle of the spine.
        let t = build_caterpillar(&CaterpillarSpec::new(vec![2, 3, 2])).unwrap();
        let middle_pendant = (0..t.n()).find(|&v| t.is_pendant(v) && t.weight(v, 1).is_some());
        let rbt = RootedBoundaryTree::new(t, middle_pendant.unwrap()).unwrap();
        assert!(!is_minimal_shape_rooted(&rbt));
    }

    #[test]
    fn theorem1_shape_examples() {
        for n in 2..8 {
            let p = Tree::path(n);
            assert!(is_theorem1_shape(&p, &analyze(&p, DEFAULT_TAU_REL).unwrap()));
        }
        let spider = Tree::spider(&[2, 2, 2]);
        let a = analyze(&spider, DEFAULT_TAU_REL).unwrap();
        assert!(!is_theorem1_shape(&spider, &a));
    }
}
