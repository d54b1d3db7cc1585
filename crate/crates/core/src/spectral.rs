//! Laplacian and Dirichlet matrices of trees and a dense symmetric
//! eigensolver for their smallest eigenpairs.
//!
//! The decomposition itself is delegated to `nalgebra`'s symmetric QR
//! iteration; this module owns ordering, the sign convention and the
//! residual certificate.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;
use thiserror::Error;

use crate::tree::{RootedBoundaryTree, Tree};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("requested {k} eigenpairs of a matrix of order {order}")]
    TooManyEigenpairs { k: usize, order: usize },
    #[error("eigensolver did not converge (order {0})")]
    NoConvergence(usize),
    #[error("eigenpair residual {residual:e} exceeds bound {bound:e}")]
    Residual { residual: f64, bound: f64 },
    #[error("Rayleigh quotient of the zero vector")]
    ZeroVector,
    #[error("vector of length {got} for a matrix of order {order}")]
    DimensionMismatch { order: usize, got: usize },
}

/// Dense symmetric matrix, row-major full storage.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    order: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(order: usize) -> Self {
        SymMatrix {
            order,
            data: vec![0.0; order * order],
        }
    }

    /// From rows; panics unless square and symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let order = rows.len();
        let mut m = SymMatrix::zeros(order);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), order, "matrix must be square");
            for (j, &x) in row.iter().enumerate() {
                m.data[i * order + j] = x;
            }
        }
        for i in 0..order {
            for j in 0..i {
                assert_eq!(m.get(i, j), m.get(j, i), "matrix must be symmetric");
            }
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.order + j]
    }

    fn add_sym(&mut self, i: usize, j: usize, x: f64) {
        self.data[i * self.order + j] += x;
        if i != j {
            self.data[j * self.order + i] += x;
        }
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.order.max(1)).map(<[f64]>::to_vec).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks(self.order)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.data
            .chunks(self.order.max(1))
            .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Principal submatrix on `idx`.
    pub fn submatrix(&self, idx: &[usize]) -> SymMatrix {
        let mut m = SymMatrix::zeros(idx.len());
        for (a, &i) in idx.iter().enumerate() {
            for (b, &j) in idx.iter().enumerate() {
                m.data[a * idx.len() + b] = self.get(i, j);
            }
        }
        m
    }
}

/// Eigenvalue, unit eigenvector and residual `||Mx - λx||₂`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
    pub residual: f64,
}

/// Bound on acceptable residuals for a matrix with the given infinity norm.
pub fn residual_bound(norm_inf: f64) -> f64 {
    1e-10 * (1.0 + norm_inf)
}

/// Weighted Laplacian `D - A`.
pub fn laplacian(t: &Tree) -> SymMatrix {
    let mut m = SymMatrix::zeros(t.n());
    for (u, v, w) in t.edges() {
        m.add_sym(u, u, w);
        m.add_sym(v, v, w);
        m.add_sym(u, v, -w);
    }
    m
}

/// Laplacian with the root's row and column deleted; rows follow
/// [`RootedBoundaryTree::interior`].
pub fn dirichlet_matrix(rbt: &RootedBoundaryTree) -> SymMatrix {
    let interior = rbt.interior();
    laplacian(rbt.tree()).submatrix(&interior)
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn residual(m: &SymMatrix, value: f64, x: &[f64]) -> f64 {
    let mx = m.mul_vec(x);
    norm(&mx.iter().zip(x).map(|(a, b)| a - value * b).collect::<Vec<_>>())
}

/// Flips `x` so its largest-magnitude entry is positive; among entries
/// within a relative 1e-9 of the maximum, the smallest index decides.
pub fn normalize_sign(x: &mut [f64]) {
    let max = x.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    if max == 0.0 {
        return;
    }
    let pivot = x
        .iter()
        .position(|v| v.abs() >= max * (1.0 - 1e-9))
        .expect("maximum is attained");
    if x[pivot] < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

/// The `k` algebraically smallest eigenpairs, ascending, with orthonormal
/// vectors under the sign convention of [`normalize_sign`].
pub fn eig_smallest(m: &SymMatrix, k: usize) -> Result<Vec<EigenPair>, SpectralError> {
    let order = m.order();
    if k > order {
        return Err(SpectralError::TooManyEigenpairs { k, order });
    }
    let dm = DMatrix::from_row_slice(order, order, &m.data);
    let eig = SymmetricEigen::try_new(dm, f64::EPSILON, 100_000)
        .ok_or(SpectralError::NoConvergence(order))?;
    let mut idx: Vec<usize> = (0..order).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let bound = residual_bound(m.norm_inf());
    idx.into_iter()
        .take(k)
        .map(|i| {
            let value = eig.eigenvalues[i];
            let mut vector: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            let len = norm(&vector);
            vector.iter_mut().for_each(|v| *v /= len);
            normalize_sign(&mut vector);
            let residual = residual(m, value, &vector);
            if residual > bound {
                return Err(SpectralError::Residual { residual, bound });
            }
            Ok(EigenPair {
                value,
                vector,
                residual,
            })
        })
        .collect()
}

/// `<f, Mf> / <f, f>`.
pub fn rayleigh(m: &SymMatrix, f: &[f64]) -> Result<f64, SpectralError> {
    if f.len() != m.order() {
        return Err(SpectralError::DimensionMismatch {
            order: m.order(),
            got: f.len(),
        });
    }
    let den: f64 = f.iter().map(|x| x * x).sum();
    if den == 0.0 {
        return Err(SpectralError::ZeroVector);
    }
    let num: f64 = m.mul_vec(f).iter().zip(f).map(|(a, b)| a * b).sum();
    Ok(num / den)
}

/// Edge-sum form `Σ w(uv)(f(u) - f(v))² / Σ f(v)²` of the Laplacian
/// Rayleigh quotient.
pub fn edge_rayleigh(t: &Tree, f: &[f64]) -> Result<f64, SpectralError> {
    if f.len() != t.n() {
        return Err(SpectralError::DimensionMismatch {
            order: t.n(),
            got: f.len(),
        });
    }
    let den: f64 = f.iter().map(|x| x * x).sum();
    if den == 0.0 {
        return Err(SpectralError::ZeroVector);
    }
    let num: f64 = t
        .edges()
        .iter()
        .map(|&(u, v, w)| w * (f[u] - f[v]).powi(2))
        .sum();
    Ok(num / den)
}

/// Second-smallest Laplacian eigenpair: `value` is the algebraic
/// connectivity and `vector` a Fiedler vector.
pub fn algebraic_connectivity(t: &Tree) -> Result<EigenPair, SpectralError> {
    let mut pairs = eig_smallest(&laplacian(t), 2)?;
    Ok(pairs.pop().expect("two eigenpairs"))
}

/// First Dirichlet eigenpair. The vector is indexed like
/// [`RootedBoundaryTree::interior`], non-negative, and supported on a single
/// branch at the root: the branch with the smallest eigenvalue, ties going
/// to the branch containing the smallest vertex id.
pub fn dirichlet_nu(rbt: &RootedBoundaryTree) -> Result<EigenPair, SpectralError> {
    let interior = rbt.interior();
    let full = dirichlet_matrix(rbt);
    let mut position = vec![usize::MAX; rbt.n()];
    for (i, &v) in interior.iter().enumerate() {
        position[v] = i;
    }
    let mut best: Option<(f64, Vec<usize>, Vec<f64>)> = None;
    for branch in rbt.tree().components_without(rbt.root()) {
        let idx: Vec<usize> = branch.iter().map(|&v| position[v]).collect();
        let pair = eig_smallest(&full.submatrix(&idx), 1)?.remove(0);
        let better = match &best {
            None => true,
            Some((value, _, _)) => pair.value < value - 1e-12 * value.abs().max(1.0),
        };
        if better {
            best = Some((pair.value, idx, pair.vector));
        }
    }
    let (value, idx, block) = best.expect("interior is nonempty");
    let mut vector = vec![0.0; interior.len()];
    for (&i, &x) in idx.iter().zip(&block) {
        vector[i] = x;
    }
    if vector.iter().sum::<f64>() < 0.0 {
        vector.iter_mut().for_each(|v| *v = -*v);
    }
    let residual = residual(&full, value, &vector);
    let bound = residual_bound(full.norm_inf());
    if residual > bound {
        return Err(SpectralError::Residual { residual, bound });
    }
    Ok(EigenPair {
        value,
        vector,
        residual,
    })
}

/// Spreads an interior-indexed vector over all vertices, with 0 at the root.
pub fn with_root_zero(rbt: &RootedBoundaryTree, interior_values: &[f64]) -> Vec<f64> {
    let mut full = vec![0.0; rbt.n()];
    for (&v, &x) in rbt.interior().iter().zip(interior_values) {
        full[v] = x;
    }
    full
}

/// Closed-form algebraic connectivity of the path on `n` vertices.
pub fn path_alpha(n: usize) -> f64 {
    2.0 * (1.0 - (std::f64::consts::PI / n as f64).cos())
}

/// Closed-form first Dirichlet eigenvalue of a path of `m` interior vertices
/// hanging off the root.
pub fn rooted_path_nu(m: usize) -> f64 {
    2.0 * (1.0 - (std::f64::consts::PI / (2 * m + 1) as f64).cos())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT5: f64 = 2.236_067_977_499_79;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn single_edge_laplacian() {
        let l = laplacian(&Tree::path(2));
        assert_eq!(l.rows(), vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
        let pairs = eig_smallest(&l, 2).unwrap();
        assert!(close(pairs[0].value, 0.0, 1e-12));
        assert!(close(pairs[1].value, 2.0, 1e-12));
    }

    #[test]
    fn weighted_edge_laplacian() {
        let t = Tree::from_weighted_edges(2, &[(0, 1, 2.0)]).unwrap();
        assert_eq!(laplacian(&t).rows(), vec![vec![2.0, -2.0], vec![-2.0, 2.0]]);
    }

    #[test]
    fn three_path_spectrum() {
        let l = laplacian(&Tree::path(3));
        assert_eq!(l.get(1, 1), 2.0);
        let values: Vec<f64> = eig_smallest(&l, 3).unwrap().iter().map(|p| p.value).collect();
        // 2(1 - cos(kπ/3)), k = 0, 1, 2
        for (v, want) in values.iter().zip([0.0, 1.0, 3.0]) {
            assert!(close(*v, want, 1e-12), "{v} vs {want}");
        }
    }

    #[test]
    fn four_path_and_star() {
        let pairs = eig_smallest(&laplacian(&Tree::path(4)), 2).unwrap();
        assert!(close(pairs[1].value, 2.0 - 2f64.sqrt(), 1e-12));
        let values: Vec<f64> = eig_smallest(&laplacian(&Tree::star(4)), 3)
            .unwrap()
            .iter()
            .map(|p| p.value)
            .collect();
        for (v, want) in values.iter().zip([0.0, 1.0, 1.0]) {
            assert!(close(*v, want, 1e-12));
        }
    }

    #[test]
    fn too_many_pairs() {
        assert!(matches!(
            eig_smallest(&laplacian(&Tree::path(3)), 4),
            Err(SpectralError::TooManyEigenpairs { .. })
        ));
    }

    #[test]
    fn rayleigh_examples() {
        let l2 = laplacian(&Tree::path(2));
        assert_eq!(rayleigh(&l2, &[1.0, -1.0]).unwrap(), 2.0);
        assert_eq!(rayleigh(&l2, &[3.0, 3.0]).unwrap(), 0.0);
        let l3 = laplacian(&Tree::path(3));
        assert!(close(rayleigh(&l3, &[1.0, 0.0, -1.0]).unwrap(), 1.0, 1e-15));
        assert_eq!(rayleigh(&l3, &[0.0; 3]), Err(SpectralError::ZeroVector));
        assert!(matches!(
            rayleigh(&l3, &[1.0]),
            Err(SpectralError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn fiedler_sign_convention() {
        // P3: f ∝ (1, 0, -1); the first of the tied extremes is positive.
        let pair = algebraic_connectivity(&Tree::path(3)).unwrap();
        assert!(pair.vector[0] > 0.0);
        assert!(pair.vector[1].abs() < 1e-12);
    }

    #[test]
    fn dirichlet_matrices() {
        let p3 = RootedBoundaryTree::new(Tree::path(3), 0).unwrap();
        assert_eq!(dirichlet_matrix(&p3).rows(), vec![vec![2.0, -1.0], vec![-1.0, 1.0]]);
        let weighted = RootedBoundaryTree::with_boundary_weight(Tree::path(3), 0, 1, 2.0).unwrap();
        assert_eq!(
            dirichlet_matrix(&weighted).rows(),
            vec![vec![3.0, -1.0], vec![-1.0, 1.0]]
        );
        assert!(close(dirichlet_nu(&weighted).unwrap().value, 2.0 - 2f64.sqrt(), 1e-12));
        let p2 = RootedBoundaryTree::new(Tree::path(2), 0).unwrap();
        assert_eq!(dirichlet_matrix(&p2).rows(), vec![vec![1.0]]);
        assert!(close(dirichlet_nu(&p2).unwrap().value, 1.0, 1e-12));
    }

    #[test]
    fn rooted_paths_match_closed_form() {
        let p3 = RootedBoundaryTree::new(Tree::path(3), 0).unwrap();
        let pair = dirichlet_nu(&p3).unwrap();
        assert!(close(pair.value, (3.0 - SQRT5) / 2.0, 1e-12));
        // Eigenvector ∝ (1, golden ratio): strictly increasing, positive.
        let ratio = pair.vector[1] / pair.vector[0];
        assert!(close(ratio, (1.0 + SQRT5) / 2.0, 1e-10));
        let p4 = RootedBoundaryTree::new(Tree::path(4), 0).unwrap();
        assert!(close(dirichlet_nu(&p4).unwrap().value, rooted_path_nu(3), 1e-12));
        assert!(close(rooted_path_nu(3), 0.198_062_264_195_162_1, 1e-12));
    }

    #[test]
    fn center_rooted_star_is_block_diagonal() {
        let rbt = RootedBoundaryTree::new(Tree::star(4), 0).unwrap();
        let pair = dirichlet_nu(&rbt).unwrap();
        assert!(close(pair.value, 1.0, 1e-12));
        // Supported on the first branch only.
        assert_eq!(pair.vector, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn leaf_rooted_star() {
        let rbt = RootedBoundaryTree::new(Tree::star(4), 1).unwrap();
        // Interior: center (degree 3) + two leaves; λ² - 4λ + 1 = 0.
        assert!(close(dirichlet_nu(&rbt).unwrap().value, 2.0 - 3f64.sqrt(), 1e-12));
    }
}
