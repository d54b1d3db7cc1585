//! Algebraic connectivity, Fiedler vectors and first Dirichlet eigenvalues
//! of trees, together with the tree moves and exhaustive searches used to
//! study trees of minimal algebraic connectivity for a given degree
//! sequence.
//!
//! - [`tree`]: trees, rooted boundary trees, canonical codes, enumeration.
//! - [`spectral`]: Laplacian / Dirichlet matrices and their eigenpairs.
//! - [`nodal`]: characteristic sets, weak nodal domains, geometric split.
//! - [`perturb`]: pendant moves, branch rearrangement, gluing, shape tests.
//! - [`search`]: extremal searches, the partition explorer, verify suites.

pub mod tree;
pub mod spectral;
pub mod nodal;
pub mod perturb;
pub mod search;
