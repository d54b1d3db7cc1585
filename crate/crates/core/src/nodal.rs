//! Characteristic sets and weak nodal domains of Fiedler vectors on trees,
//! and the geometric split into two rooted boundary trees whose first
//! Dirichlet eigenvalues equal the algebraic connectivity.

use serde::Serialize;
use thiserror::Error;

use crate::spectral::{self, SpectralError};
use crate::tree::{RootedBoundaryTree, Tree, TreeError, Vertex};

/// Default relative zero threshold: `τ_zero = DEFAULT_TAU_REL · max|f|`.
pub const DEFAULT_TAU_REL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NodalError {
    #[error("ambiguous characteristic set: {0}")]
    AmbiguousCharacteristicSet(String),
    #[error("{side} nodal domain is disconnected")]
    DisconnectedDomain { side: &'static str },
    #[error("vector of length {got} for a tree on {n} vertices")]
    DimensionMismatch { n: usize, got: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// The vertex or edge separating the two nodal domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharacteristicSet {
    Vertex(Vertex),
    /// `neg` has the negative value, `pos` the positive one.
    Edge { neg: Vertex, pos: Vertex },
}

impl CharacteristicSet {
    pub fn kind(&self) -> &'static str {
        match self {
            CharacteristicSet::Vertex(_) => "vertex",
            CharacteristicSet::Edge { .. } => "edge",
        }
    }

    pub fn ids(&self) -> Vec<Vertex> {
        match *self {
            CharacteristicSet::Vertex(v) => vec![v],
            CharacteristicSet::Edge { neg, pos } => vec![neg, pos],
        }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.ids().contains(&v)
    }
}

impl Serialize for CharacteristicSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut ids = self.ids();
        ids.sort_unstable();
        let mut st = s.serialize_struct("CharacteristicSet", 4)?;
        st.serialize_field("kind", self.kind())?;
        st.serialize_field("ids", &ids)?;
        if let CharacteristicSet::Edge { neg, pos } = *self {
            st.serialize_field("neg", &neg)?;
            st.serialize_field("pos", &pos)?;
        }
        st.end()
    }
}

/// Algebraic connectivity, a Fiedler vector, its characteristic set and
/// the two weak nodal domains (sorted vertex ids).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiedlerAnalysis {
    pub alpha: f64,
    pub fiedler: Vec<f64>,
    #[serde(rename = "characteristic")]
    pub charset: CharacteristicSet,
    pub domain_pos: Vec<Vertex>,
    pub domain_neg: Vec<Vertex>,
    #[serde(skip)]
    pub tau_zero: f64,
}

pub fn tau_zero(f: &[f64], tau_rel: f64) -> f64 {
    tau_rel * f.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

fn check_len(t: &Tree, f: &[f64]) -> Result<(), NodalError> {
    if f.len() != t.n() {
        return Err(NodalError::DimensionMismatch { n: t.n(), got: f.len() });
    }
    Ok(())
}

pub fn characteristic_set(
    t: &Tree,
    f: &[f64],
    tau_rel: f64,
) -> Result<CharacteristicSet, NodalError> {
    check_len(t, f)?;
    let tau = tau_zero(f, tau_rel);
    let sign_changes: Vec<(Vertex, Vertex)> = t
        .edges()
        .into_iter()
        .filter_map(|(u, v, _)| {
            if f[u] < -tau && f[v] > tau {
                Some((u, v))
            } else if f[v] < -tau && f[u] > tau {
                Some((v, u))
            } else {
                None
            }
        })
        .collect();
    match sign_changes.as_slice() {
        [(neg, pos)] => return Ok(CharacteristicSet::Edge { neg: *neg, pos: *pos }),
        [] => {}
        many => {
            return Err(NodalError::AmbiguousCharacteristicSet(format!(
                "{} sign-change edges",
                many.len()
            )))
        }
    }
    if !f.iter().any(|&x| x > tau) || !f.iter().any(|&x| x < -tau) {
        return Err(NodalError::AmbiguousCharacteristicSet(
            "vector lacks strictly positive or strictly negative entries".into(),
        ));
    }
    // Zero vertices whose removal separates every positive from every negative vertex.
    let candidates: Vec<Vertex> = (0..t.n())
        .filter(|&v| f[v].abs() <= tau)
        .filter(|&v| {
            t.components_without(v).iter().all(|c| {
                !(c.iter().any(|&x| f[x] > tau) && c.iter().any(|&x| f[x] < -tau))
            })
        })
        .collect();
    match candidates.as_slice() {
        [v] => Ok(CharacteristicSet::Vertex(*v)),
        other => Err(NodalError::AmbiguousCharacteristicSet(format!(
            "{} separating zero vertices",
            other.len()
        ))),
    }
}

/// `pos = {f >= -τ}`, `neg = {f <= τ}`; both must induce connected subtrees.
pub fn nodal_domains(
    t: &Tree,
    f: &[f64],
    tau_rel: f64,
) -> Result<(Vec<Vertex>, Vec<Vertex>), NodalError> {
    check_len(t, f)?;
    let tau = tau_zero(f, tau_rel);
    let pos: Vec<Vertex> = (0..t.n()).filter(|&v| f[v] >= -tau).collect();
    let neg: Vec<Vertex> = (0..t.n()).filter(|&v| f[v] <= tau).collect();
    if !t.induces_connected(&pos) {
        return Err(NodalError::DisconnectedDomain { side: "non-negative" });
    }
    if !t.induces_connected(&neg) {
        return Err(NodalError::DisconnectedDomain { side: "non-positive" });
    }
    Ok((pos, neg))
}

/// Solves for α and a Fiedler vector, then derives the characteristic set
/// and nodal domains.
pub fn analyze(t: &Tree, tau_rel: f64) -> Result<FiedlerAnalysis, NodalError> {
    let pair = spectral::algebraic_connectivity(t)?;
    analyze_with(t, pair.value, pair.vector, tau_rel)
}

/// Analysis for a caller-supplied Fiedler vector.
pub fn analyze_with(
    t: &Tree,
    alpha: f64,
    fiedler: Vec<f64>,
    tau_rel: f64,
) -> Result<FiedlerAnalysis, NodalError> {
    let charset = characteristic_set(t, &fiedler, tau_rel)?;
    let (domain_pos, domain_neg) = nodal_domains(t, &fiedler, tau_rel)?;
    Ok(FiedlerAnalysis {
        alpha,
        tau_zero: tau_zero(&fiedler, tau_rel),
        fiedler,
        charset,
        domain_pos,
        domain_neg,
    })
}

/// One geometric nodal domain: a rooted boundary tree plus, for each of its
/// vertices, the original vertex (`None` for an inserted root).
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSide {
    pub rooted: RootedBoundaryTree,
    pub origin: Vec<Option<Vertex>>,
}

impl SplitSide {
    /// Original ids of the interior vertices.
    pub fn interior_origins(&self) -> Vec<Vertex> {
        self.rooted
            .interior()
            .into_iter()
            .filter_map(|v| self.origin[v])
            .collect()
    }
}

/// The two geometric nodal domains. `t1` is the non-negative side, `t2` the
/// non-positive side. `w1`/`w2` are the split weights of the edges
/// neg-v₀ and v₀-pos in the edge case.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometricSplit {
    pub t1: SplitSide,
    pub t2: SplitSide,
    pub w1: Option<f64>,
    pub w2: Option<f64>,
}

fn side_tree(
    t: &Tree,
    root: Option<Vertex>,
    interior: &[Vertex],
    root_edges: &[(Vertex, f64)],
) -> Result<SplitSide, NodalError> {
    // Root gets id 0, interior vertices follow in id order.
    let mut index = vec![usize::MAX; t.n()];
    let mut origin = vec![root];
    for (i, &v) in interior.iter().enumerate() {
        index[v] = i + 1;
        origin.push(Some(v));
    }
    let mut edges = Vec::new();
    for (u, v, w) in t.edges() {
        if index[u] != usize::MAX && index[v] != usize::MAX {
            edges.push((index[u], index[v], w));
        }
    }
    for &(v, w) in root_edges {
        edges.push((0, index[v], w));
    }
    let tree = Tree::from_weighted_edges(interior.len() + 1, &edges)?;
    Ok(SplitSide {
        rooted: RootedBoundaryTree::from_tree(tree, 0)?,
        origin,
    })
}

/// Splits `t` at the characteristic set of `analysis`. In the edge case a
/// new root v₀ is inserted on the edge with weights
/// `w1 = |f(w)-f(u)|/|f(u)|` (toward the negative end `u`) and
/// `w2 = |f(w)-f(u)|/|f(w)|` (toward the positive end `w`). In the vertex
/// case the characteristic vertex is the root of both sides; branches on
/// which f vanishes go to the side with fewer vertices so far (ties to the
/// positive side), in order of their smallest vertex.
pub fn geometric_split(t: &Tree, analysis: &FiedlerAnalysis) -> Result<GeometricSplit, NodalError> {
    if !t.is_unit_weighted() {
        return Err(TreeError::NotUnitWeighted.into());
    }
    let f = &analysis.fiedler;
    let tau = analysis.tau_zero;
    match analysis.charset {
        CharacteristicSet::Edge { neg: u, pos: w } => {
            let gap = (f[w] - f[u]).abs();
            let w1 = gap / f[u].abs();
            let w2 = gap / f[w].abs();
            let pos: Vec<Vertex> = analysis.domain_pos.clone();
            let neg: Vec<Vertex> = analysis.domain_neg.clone();
            let t1 = side_tree(t, None, &pos, &[(w, w2)])?;
            let t2 = side_tree(t, None, &neg, &[(u, w1)])?;
            Ok(GeometricSplit {
                t1,
                t2,
                w1: Some(w1),
                w2: Some(w2),
            })
        }
        CharacteristicSet::Vertex(c) => {
            let mut pos = Vec::new();
            let mut neg = Vec::new();
            let mut zero = Vec::new();
            for branch in t.components_without(c) {
                if branch.iter().any(|&v| f[v] > tau) {
                    pos.push(branch);
                } else if branch.iter().any(|&v| f[v] < -tau) {
                    neg.push(branch);
                } else {
                    zero.push(branch);
                }
            }
            let mut pos_count: usize = pos.iter().map(Vec::len).sum();
            let mut neg_count: usize = neg.iter().map(Vec::len).sum();
            for branch in zero {
                if neg_count < pos_count {
                    neg_count += branch.len();
                    neg.push(branch);
                } else {
                    pos_count += branch.len();
                    pos.push(branch);
                }
            }
            let side = |branches: Vec<Vec<Vertex>>| -> Result<SplitSide, NodalError> {
                let mut interior: Vec<Vertex> = branches.into_iter().flatten().collect();
                interior.sort_unstable();
                let root_edges: Vec<(Vertex, f64)> = t
                    .neighbors(c)
                    .iter()
                    .copied()
                    .filter(|(x, _)| interior.binary_search(x).is_ok())
                    .collect();
                side_tree(t, Some(c), &interior, &root_edges)
            };
            Ok(GeometricSplit {
                t1: side(pos)?,
                t2: side(neg)?,
                w1: None,
                w2: None,
            })
        }
    }
}

/// Relative residuals `|ν(tᵢ) - α| / α` of the two sides.
pub fn verify_split(split: &GeometricSplit, alpha: f64) -> Result<(f64, f64), NodalError> {
    let r = |side: &SplitSide| -> Result<f64, NodalError> {
        let nu = spectral::dirichlet_nu(&side.rooted)?.value;
        Ok((nu - alpha).abs() / alpha)
    };
    Ok((r(&split.t1)?, r(&split.t2)?))
}

/// Monotonicity check for a non-negative first Dirichlet
/// eigenvector `g` (indexed like the interior): along every path from the
/// root to a leaf, `g` strictly increases by more than τ at each step, or
/// stays within τ of zero throughout.
pub fn check_monotone_paths(rbt: &RootedBoundaryTree, g: &[f64], tau_rel: f64) -> bool {
    if g.len() + 1 != rbt.n() {
        return false;
    }
    let full = spectral::with_root_zero(rbt, g);
    let tau = tau_zero(&full, tau_rel);
    let t = rbt.tree();
    let root = rbt.root();
    (0..t.n())
        .filter(|&v| v != root && t.is_pendant(v))
        .all(|leaf| {
            let path = t.path_between(root, leaf);
            let all_zero = path.iter().all(|&v| full[v].abs() <= tau);
            let increasing = path.windows(2).all(|w| full[w[1]] > full[w[0]] + tau);
            all_zero || increasing
        })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_path_has_center_vertex() {
        let a = analyze(&Tree::path(3), DEFAULT_TAU_REL).unwrap();
        assert_eq!(a.charset, CharacteristicSet::Vertex(1));
        assert_eq!(a.domain_pos, vec![0, 1]);
        assert_eq!(a.domain_neg, vec![1, 2]);
    }

    #[test]
    fn four_path_has_middle_edge() {
        let a = analyze(&Tree::path(4), DEFAULT_TAU_REL).unwrap();
        assert_eq!(a.charset, CharacteristicSet::Edge { neg: 2, pos: 1 });
        assert_eq!(a.domain_pos, vec![0, 1]);
        assert_eq!(a.domain_neg, vec![2, 3]);
    }

    #[test]
    fn star_has_center_vertex() {
        let a = analyze(&Tree::star(4), DEFAULT_TAU_REL).unwrap();
        assert_eq!(a.charset, CharacteristicSet::Vertex(0));
    }

    #[test]
    fn star_with_explicit_eigenvector() {
        let t = Tree::star(4);
        let f = vec![0.0, 1.0, -1.0, 0.0];
        assert_eq!(
            characteristic_set(&t, &f, DEFAULT_TAU_REL).unwrap(),
            CharacteristicSet::Vertex(0)
        );
        let (pos, neg) = nodal_domains(&t, &f, DEFAULT_TAU_REL).unwrap();
        assert_eq!(pos, vec![0, 1, 3]);
        assert_eq!(neg, vec![0, 2, 3]);
        let analysis = analyze_with(&t, 1.0, f, DEFAULT_TAU_REL).unwrap();
        let split = geometric_split(&t, &analysis).unwrap();
        // The zero leaf joins the positive side on the size tie.
        assert_eq!(split.t1.interior_origins(), vec![1, 3]);
        assert_eq!(split.t2.interior_origins(), vec![2]);
        let (r1, r2) = verify_split(&split, 1.0).unwrap();
        assert!(r1 < 1e-12 && r2 < 1e-12);
    }

    #[test]
    fn two_sign_changes_are_ambiguous() {
        let f = vec![1.0, -1.0, 1.0, -1.0];
        assert!(matches!(
            characteristic_set(&Tree::path(4), &f, DEFAULT_TAU_REL),
            Err(NodalError::AmbiguousCharacteristicSet(_))
        ));
        assert!(matches!(
            nodal_domains(&Tree::path(4), &f, DEFAULT_TAU_REL),
            Err(NodalError::DisconnectedDomain { .. })
        ));
    }

    #[test]
    fn zero_vector_is_ambiguous() {
        assert!(characteristic_set(&Tree::path(3), &[0.0; 3], DEFAULT_TAU_REL).is_err());
    }

    #[test]
    fn four_path_split_weights() {
        let t = Tree::path(4);
        let a = analyze(&t, DEFAULT_TAU_REL).unwrap();
        let split = geometric_split(&t, &a).unwrap();
        assert!((split.w1.unwrap() - 2.0).abs() < 1e-12);
        assert!((split.w2.unwrap() - 2.0).abs() < 1e-12);
        // Interior order is (leaf, neighbor of v0): [[1, -1], [-1, 3]].
        let m = crate::spectral::dirichlet_matrix(&split.t1.rooted);
        assert_eq!(m.get(0, 0), 1.0);
        assert!((m.get(1, 1) - 3.0).abs() < 1e-12);
        let (r1, r2) = verify_split(&split, a.alpha).unwrap();
        assert!(r1 < 1e-10 && r2 < 1e-10);
    }

    #[test]
    fn five_path_split() {
        let t = Tree::path(5);
        let a = analyze(&t, DEFAULT_TAU_REL).unwrap();
        assert_eq!(a.charset, CharacteristicSet::Vertex(2));
        let split = geometric_split(&t, &a).unwrap();
        assert_eq!(split.t1.rooted.n(), 3);
        assert_eq!(split.t2.rooted.n(), 3);
        let (r1, r2) = verify_split(&split, a.alpha).unwrap();
        assert!(r1 < 1e-10 && r2 < 1e-10);
    }

    #[test]
    fn monotone_paths() {
        let rbt = RootedBoundaryTree::new(Tree::path(3), 0).unwrap();
        let g = crate::spectral::dirichlet_nu(&rbt).unwrap().vector;
        assert!(check_monotone_paths(&rbt, &g, DEFAULT_TAU_REL));
        assert!(!check_monotone_paths(&rbt, &[g[1], g[0]], DEFAULT_TAU_REL));

        let star = RootedBoundaryTree::new(Tree::star(5), 0).unwrap();
        let g = crate::spectral::dirichlet_nu(&star).unwrap().vector;
        assert_eq!(g.iter().filter(|&&x| x == 0.0).count(), 3);
        assert!(check_monotone_paths(&star, &g, DEFAULT_TAU_REL));
    }
}
