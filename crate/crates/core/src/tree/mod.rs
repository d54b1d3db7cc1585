//! Weighted trees, rooted boundary trees, degree sequences and caterpillars.
//!
//! Vertex ids are 0-based and contiguous. Every constructor validates the
//! tree invariants (n-1 edges, connected, no loops or parallel edges,
//! positive weights), so the rest of the crate can take a [`Tree`] at face
//! value.

mod canon;
mod enumerate;
pub mod io;
mod prufer;

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use canon::{tree_from_code, CanonicalCode};
pub use enumerate::{
    all_tree_sequences, enumerate_rooted_trees, enumerate_trees, labeled_count,
    unique_codes_in_range,
};
pub use prufer::{decode_prufer, MultisetPermutations};

pub type Vertex = usize;

/// An edge replaced by another: `(old, new)`.
pub type EdgeMove = ((Vertex, Vertex), (Vertex, Vertex));

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TreeError {
    #[error("a tree needs at least 2 vertices, got {0}")]
    TooSmall(usize),
    #[error("vertex {vertex} out of range for a tree on {n} vertices")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("parallel edge {0}-{1}")]
    ParallelEdge(Vertex, Vertex),
    #[error("edge {u}-{v} has non-positive or non-finite weight {weight}")]
    BadWeight { u: Vertex, v: Vertex, weight: f64 },
    #[error("a tree on {n} vertices has {expected} edges, got {got}")]
    EdgeCount { n: usize, expected: usize, got: usize },
    #[error("graph is not connected (it contains a cycle)")]
    Disconnected,
    #[error("invalid tree sequence {0}")]
    InvalidSequence(DegreeSequence),
    #[error("degree sequence parse error: {0}")]
    SequenceParse(String),
    #[error("unrealizable caterpillar: {0}")]
    Unrealizable(String),
    #[error("invalid rooted boundary tree: {0}")]
    InvalidRooted(String),
    #[error("trunk precondition violated: {0}")]
    NotRootedCaterpillar(String),
    #[error("boundary weight must be finite and >= 1, got {0}")]
    BoundaryWeight(f64),
    #[error("no edge {0}-{1}")]
    MissingEdge(Vertex, Vertex),
    #[error("operation requires unit edge weights")]
    NotUnitWeighted,
}

/// Weighted undirected tree stored as symmetric adjacency lists.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    adj: Vec<Vec<(Vertex, f64)>>,
}

impl Tree {
    /// Unit-weight tree from an edge list.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, TreeError> {
        let weighted: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        Self::from_weighted_edges(n, &weighted)
    }

    pub fn from_weighted_edges(
        n: usize,
        edges: &[(Vertex, Vertex, f64)],
    ) -> Result<Self, TreeError> {
        if n < 2 {
            return Err(TreeError::TooSmall(n));
        }
        if edges.len() != n - 1 {
            return Err(TreeError::EdgeCount {
                n,
                expected: n - 1,
                got: edges.len(),
            });
        }
        let mut adj: Vec<Vec<(Vertex, f64)>> = vec![Vec::new(); n];
        for &(u, v, w) in edges {
            for x in [u, v] {
                if x >= n {
                    return Err(TreeError::VertexOutOfRange { vertex: x, n });
                }
            }
            if u == v {
                return Err(TreeError::SelfLoop(u));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(TreeError::BadWeight { u, v, weight: w });
            }
            if adj[u].iter().any(|&(x, _)| x == v) {
                return Err(TreeError::ParallelEdge(u.min(v), u.max(v)));
            }
            adj[u].push((v, w));
            adj[v].push((u, w));
        }
        for list in &mut adj {
            list.sort_by_key(|&(x, _)| x);
        }
        let tree = Tree { adj };
        if tree.bfs_order(0).len() != n {
            return Err(TreeError::Disconnected);
        }
        Ok(tree)
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, &edges).expect("path is a tree")
    }

    /// Star with center 0 and `n - 1` leaves.
    pub fn star(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Self::from_edges(n, &edges).expect("star is a tree")
    }

    /// Spider with center 0 and one leg per entry of `legs` (leg lengths in edges).
    /// Leg vertices are numbered consecutively, leg by leg, outward from the center.
    pub fn spider(legs: &[usize]) -> Self {
        let mut edges = Vec::new();
        let mut next = 1;
        for &len in legs {
            let mut prev = 0;
            for _ in 0..len {
                edges.push((prev, next));
                prev = next;
                next += 1;
            }
        }
        Self::from_edges(next, &edges).expect("spider is a tree")
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, v: Vertex) -> &[(Vertex, f64)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn weight(&self, u: Vertex, v: Vertex) -> Option<f64> {
        self.adj
            .get(u)?
            .iter()
            .find(|&&(x, _)| x == v)
            .map(|&(_, w)| w)
    }

    /// Edges as `(u, v, w)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(Vertex, Vertex, f64)> {
        let mut out = Vec::with_capacity(self.n() - 1);
        for (u, list) in self.adj.iter().enumerate() {
            for &(v, w) in list {
                if u < v {
                    out.push((u, v, w));
                }
            }
        }
        out
    }

    pub fn is_unit_weighted(&self) -> bool {
        self.adj.iter().flatten().all(|&(_, w)| w == 1.0)
    }

    pub fn is_pendant(&self, v: Vertex) -> bool {
        self.degree(v) == 1
    }

    pub fn degree_sequence(&self) -> DegreeSequence {
        DegreeSequence::new((0..self.n()).map(|v| self.degree(v)).collect()).sorted()
    }

    /// True iff deleting all degree-1 vertices leaves a path (possibly empty
    /// or a single vertex).
    pub fn is_caterpillar(&self) -> bool {
        self.spine().is_some()
    }

    /// The non-pendant vertices in path order, or `None` when they do not
    /// induce a path. The orientation starts at the smaller-id endpoint.
    pub fn spine(&self) -> Option<Vec<Vertex>> {
        let inner: Vec<Vertex> = (0..self.n()).filter(|&v| !self.is_pendant(v)).collect();
        if inner.is_empty() {
            return Some(inner);
        }
        let inner_degree = |v: Vertex| {
            self.adj[v]
                .iter()
                .filter(|&&(x, _)| !self.is_pendant(x))
                .count()
        };
        let mut ends = Vec::new();
        for &v in &inner {
            match inner_degree(v) {
                0 | 1 => ends.push(v),
                2 => {}
                _ => return None,
            }
        }
        // The inner vertices of a tree always induce a subtree, so max degree 2
        // means it is a path.
        let start = ends[0];
        let mut order = vec![start];
        let mut prev = usize::MAX;
        let mut cur = start;
        loop {
            let next = self.adj[cur]
                .iter()
                .map(|&(x, _)| x)
                .find(|&x| x != prev && !self.is_pendant(x));
            match next {
                Some(x) => {
                    order.push(x);
                    prev = cur;
                    cur = x;
                }
                None => break,
            }
        }
        Some(order)
    }

    pub fn canonical_code(&self) -> CanonicalCode {
        canon::unrooted_code(self)
    }

    pub fn rooted_code(&self, root: Vertex) -> CanonicalCode {
        canon::rooted_code(self, root, None)
    }

    /// Vertices in breadth-first order from `start` (neighbors in id order).
    pub fn bfs_order(&self, start: Vertex) -> Vec<Vertex> {
        let mut seen = vec![false; self.n()];
        let mut order = Vec::with_capacity(self.n());
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &(x, _) in &self.adj[v] {
                if !seen[x] {
                    seen[x] = true;
                    queue.push_back(x);
                }
            }
        }
        order
    }

    /// Parent pointers for the tree rooted at `root` (`parent[root] == None`).
    pub fn parents(&self, root: Vertex) -> Vec<Option<Vertex>> {
        let mut parent = vec![None; self.n()];
        let mut seen = vec![false; self.n()];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &(x, _) in &self.adj[v] {
                if !seen[x] {
                    seen[x] = true;
                    parent[x] = Some(v);
                    queue.push_back(x);
                }
            }
        }
        parent
    }

    /// Unweighted distances (edge counts) from `v`.
    pub fn distances_from(&self, v: Vertex) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[v] = 0;
        for x in self.bfs_order(v) {
            for &(y, _) in &self.adj[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                }
            }
        }
        dist
    }

    /// The unique simple path from `a` to `b`, both ends included.
    pub fn path_between(&self, a: Vertex, b: Vertex) -> Vec<Vertex> {
        let parent = self.parents(a);
        let mut path = vec![b];
        let mut cur = b;
        while let Some(p) = parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }

    /// Connected components of the forest obtained by deleting `removed`,
    /// each sorted, listed by smallest member.
    pub fn components_without(&self, removed: Vertex) -> Vec<Vec<Vertex>> {
        let mut comp = vec![usize::MAX; self.n()];
        comp[removed] = 0;
        let mut out: Vec<Vec<Vertex>> = Vec::new();
        for s in 0..self.n() {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < members.len() {
                let v = members[i];
                i += 1;
                for &(x, _) in &self.adj[v] {
                    if comp[x] == usize::MAX {
                        comp[x] = id;
                        members.push(x);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Branches at `u` with respect to `root`: the components of the tree
    /// minus `u` that do not contain `root` (all of them when `u == root`).
    pub fn branches_at(&self, root: Vertex, u: Vertex) -> Result<Vec<Vec<Vertex>>, TreeError> {
        let n = self.n();
        for x in [root, u] {
            if x >= n {
                return Err(TreeError::VertexOutOfRange { vertex: x, n });
            }
        }
        Ok(self
            .components_without(u)
            .into_iter()
            .filter(|c| u == root || !c.contains(&root))
            .collect())
    }

    /// Induced subgraph on `keep` (which must induce a subtree). Vertices are
    /// renumbered in the order given; returns the tree and nothing else.
    pub fn induced(&self, keep: &[Vertex]) -> Result<Tree, TreeError> {
        let mut index = vec![usize::MAX; self.n()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let mut edges = Vec::new();
        for &(u, v, w) in &self.edges() {
            if index[u] != usize::MAX && index[v] != usize::MAX {
                edges.push((index[u], index[v], w));
            }
        }
        Tree::from_weighted_edges(keep.len(), &edges)
    }

    /// True iff the vertices in `set` induce a connected subgraph.
    pub fn induces_connected(&self, set: &[Vertex]) -> bool {
        if set.is_empty() {
            return false;
        }
        let mut inside = vec![false; self.n()];
        for &v in set {
            inside[v] = true;
        }
        let mut seen = vec![false; self.n()];
        let mut stack = vec![set[0]];
        seen[set[0]] = true;
        let mut count = 0;
        while let Some(v) = stack.pop() {
            count += 1;
            for &(x, _) in &self.adj[v] {
                if inside[x] && !seen[x] {
                    seen[x] = true;
                    stack.push(x);
                }
            }
        }
        count == set.len()
    }

    /// Same tree with `edges` rewired: every `(old, new)` pair replaces the
    /// edge `old` by `new`, keeping its weight.
    pub(crate) fn rewired(
        &self,
        moves: &[EdgeMove],
    ) -> Result<Tree, TreeError> {
        let mut edges = self.edges();
        for &((a, b), (c, d)) in moves {
            let pos = edges
                .iter()
                .position(|&(u, v, _)| (u, v) == (a.min(b), a.max(b)))
                .ok_or(TreeError::MissingEdge(a, b))?;
            let w = edges[pos].2;
            edges[pos] = (c.min(d), c.max(d), w);
        }
        Tree::from_weighted_edges(self.n(), &edges)
    }
}

/// Degree sequence `(d_0, ..., d_{n-1})`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DegreeSequence(Vec<usize>);

impl DegreeSequence {
    pub fn new(degrees: Vec<usize>) -> Self {
        DegreeSequence(degrees)
    }

    pub fn degrees(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Non-increasing order.
    pub fn sorted(mut self) -> Self {
        self.0.sort_unstable_by(|a, b| b.cmp(a));
        self
    }

    pub fn is_tree_sequence(&self) -> bool {
        validate_tree_sequence(self)
    }

    pub fn validated(self) -> Result<Self, TreeError> {
        if self.is_tree_sequence() {
            Ok(self)
        } else {
            Err(TreeError::InvalidSequence(self))
        }
    }

    pub fn pendant_count(&self) -> usize {
        self.0.iter().filter(|&&d| d == 1).count()
    }

    /// The non-pendant degrees, non-increasing.
    pub fn interior_degrees(&self) -> Vec<usize> {
        let mut inner: Vec<usize> = self.0.iter().copied().filter(|&d| d >= 2).collect();
        inner.sort_unstable_by(|a, b| b.cmp(a));
        inner
    }
}

impl fmt::Display for DegreeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl FromStr for DegreeSequence {
    type Err = TreeError;

    /// Comma-separated integers, e.g. `3,2,2,2,1,1,1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let degrees = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|e| TreeError::SequenceParse(format!("{p:?}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(DegreeSequence(degrees))
    }
}

/// True iff `n >= 2`, every degree is at least 1 and the degrees sum to `2(n-1)`.
pub fn validate_tree_sequence(seq: &DegreeSequence) -> bool {
    let n = seq.len();
    n >= 2 && seq.0.iter().all(|&d| d >= 1) && seq.0.iter().sum::<usize>() == 2 * (n - 1)
}

/// Ordered spine degrees of a caterpillar, each at least 2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaterpillarSpec {
    pub spine_degrees: Vec<usize>,
}

impl CaterpillarSpec {
    pub fn new(spine_degrees: Vec<usize>) -> Self {
        CaterpillarSpec { spine_degrees }
    }

    /// Number of pendant vertices the caterpillar will have.
    pub fn pendant_count(&self) -> usize {
        match self.spine_degrees.len() {
            0 => 2,
            _ => self.spine_degrees.iter().map(|d| d.saturating_sub(2)).sum::<usize>() + 2,
        }
    }

    /// True iff every spine degree is at least 2 and the caterpillar has the
    /// degree multiset `seq`.
    pub fn realizes(&self, seq: &DegreeSequence) -> bool {
        if self.spine_degrees.iter().any(|&d| d < 2) {
            return false;
        }
        let mut inner = self.spine_degrees.clone();
        inner.sort_unstable_by(|a, b| b.cmp(a));
        inner == seq.interior_degrees() && self.pendant_count() == seq.pendant_count()
    }
}

/// Caterpillar whose spine vertex `i` (id `i`) has degree `spine_degrees[i]`.
/// Pendants get ids after the spine, attached to spine vertices in order.
/// An empty spine yields the single edge.
pub fn build_caterpillar(spec: &CaterpillarSpec) -> Result<Tree, TreeError> {
    let spine = &spec.spine_degrees;
    if let Some(&d) = spine.iter().find(|&&d| d < 2) {
        return Err(TreeError::Unrealizable(format!("spine degree {d} < 2")));
    }
    if spine.is_empty() {
        return Ok(Tree::path(2));
    }
    let k = spine.len();
    let mut edges: Vec<(Vertex, Vertex)> = (1..k).map(|i| (i - 1, i)).collect();
    let mut next = k;
    for (i, &d) in spine.iter().enumerate() {
        let spine_nbrs = usize::from(i > 0) + usize::from(i + 1 < k);
        for _ in spine_nbrs..d {
            edges.push((i, next));
            next += 1;
        }
    }
    Tree::from_edges(next, &edges)
}

/// Tree with a single boundary vertex (the root). At most one root-incident
/// edge carries the boundary weight `w0 >= 1`; every other edge has weight 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedBoundaryTree {
    tree: Tree,
    root: Vertex,
    boundary_edge: Option<Vertex>,
    boundary_weight: f64,
}

impl RootedBoundaryTree {
    /// Unit-weight rooted tree (`w0 = 1`).
    pub fn new(tree: Tree, root: Vertex) -> Result<Self, TreeError> {
        Self::from_tree(tree, root)
    }

    /// Puts weight `w0` on the edge `root`-`neighbor` of a unit-weight tree.
    pub fn with_boundary_weight(
        tree: Tree,
        root: Vertex,
        neighbor: Vertex,
        w0: f64,
    ) -> Result<Self, TreeError> {
        if !tree.is_unit_weighted() {
            return Err(TreeError::NotUnitWeighted);
        }
        if root >= tree.n() {
            return Err(TreeError::VertexOutOfRange { vertex: root, n: tree.n() });
        }
        if tree.weight(root, neighbor).is_none() {
            return Err(TreeError::InvalidRooted(format!(
                "{neighbor} is not adjacent to root {root}"
            )));
        }
        if !(w0.is_finite() && w0 >= 1.0) {
            return Err(TreeError::BoundaryWeight(w0));
        }
        let mut edges = tree.edges();
        for e in &mut edges {
            if (e.0, e.1) == (root.min(neighbor), root.max(neighbor)) {
                e.2 = w0;
            }
        }
        let tree = Tree::from_weighted_edges(tree.n(), &edges)?;
        Self::from_tree(tree, root)
    }

    /// Puts `w0` on the root edge that starts the trunk candidate: the
    /// lexicographically smallest among the longest paths from the root.
    pub fn with_trunk_boundary(tree: Tree, root: Vertex, w0: f64) -> Result<Self, TreeError> {
        if root >= tree.n() {
            return Err(TreeError::VertexOutOfRange { vertex: root, n: tree.n() });
        }
        let nbr = longest_root_path(&tree, root)[1];
        Self::with_boundary_weight(tree, root, nbr, w0)
    }

    /// Validates an already-weighted tree: every non-root edge has weight 1,
    /// at most one root edge differs from 1 and that one is at least 1.
    pub fn from_tree(tree: Tree, root: Vertex) -> Result<Self, TreeError> {
        let n = tree.n();
        if root >= n {
            return Err(TreeError::VertexOutOfRange { vertex: root, n });
        }
        let mut boundary_edge = None;
        let mut boundary_weight = 1.0;
        for (u, v, w) in tree.edges() {
            if u != root && v != root {
                if w != 1.0 {
                    return Err(TreeError::InvalidRooted(format!(
                        "interior edge {u}-{v} has weight {w}"
                    )));
                }
                continue;
            }
            if w == 1.0 {
                continue;
            }
            if w < 1.0 {
                return Err(TreeError::BoundaryWeight(w));
            }
            if boundary_edge.is_some() {
                return Err(TreeError::InvalidRooted(
                    "more than one boundary edge carries a weight".into(),
                ));
            }
            boundary_edge = Some(if u == root { v } else { u });
            boundary_weight = w;
        }
        Ok(RootedBoundaryTree {
            tree,
            root,
            boundary_edge,
            boundary_weight,
        })
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    pub fn into_tree(self) -> Tree {
        self.tree
    }

    pub fn root(&self) -> Vertex {
        self.root
    }

    /// Root neighbor whose edge carries `w0`, when `w0 != 1`.
    pub fn boundary_edge(&self) -> Option<Vertex> {
        self.boundary_edge
    }

    pub fn boundary_weight(&self) -> f64 {
        self.boundary_weight
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    /// All vertices except the root, in id order.
    pub fn interior(&self) -> Vec<Vertex> {
        (0..self.n()).filter(|&v| v != self.root).collect()
    }

    /// Geodetic distance from the root.
    pub fn height(&self, v: Vertex) -> usize {
        self.tree.distances_from(self.root)[v]
    }

    /// Rooted canonical code; the subtree under a weighted boundary edge is
    /// bracketed differently so distinct placements of `w0` stay distinct.
    pub fn canonical_code(&self) -> CanonicalCode {
        canon::rooted_code(&self.tree, self.root, self.boundary_edge)
    }

    /// Non-pendant neighbors of the root.
    pub fn inner_root_neighbors(&self) -> Vec<Vertex> {
        self.tree
            .neighbors(self.root)
            .iter()
            .map(|&(x, _)| x)
            .filter(|&x| !self.tree.is_pendant(x))
            .collect()
    }

    /// Longest simple path from the root, ending at a pendant vertex (the
    /// head). Ties go to the lexicographically smallest vertex sequence.
    /// Requires a caterpillar with at most one non-pendant root neighbor.
    pub fn trunk(&self) -> Result<Vec<Vertex>, TreeError> {
        if !self.tree.is_caterpillar() {
            return Err(TreeError::NotRootedCaterpillar("not a caterpillar".into()));
        }
        if self.inner_root_neighbors().len() > 1 {
            return Err(TreeError::NotRootedCaterpillar(
                "more than one non-pendant root neighbor".into(),
            ));
        }
        Ok(longest_root_path(&self.tree, self.root))
    }
}

fn longest_root_path(tree: &Tree, root: Vertex) -> Vec<Vertex> {
    let dist = tree.distances_from(root);
    let depth = *dist.iter().max().expect("nonempty tree");
    (0..tree.n())
        .filter(|&v| dist[v] == depth)
        .map(|v| tree.path_between(root, v))
        .min()
        .expect("some vertex attains the depth")
}
