//! Edge-containment order, order complexes, homology and Hodge spectra.

mod complex;
mod ecp;
mod eigen;
mod gf2;
mod hodge;

pub use complex::{Simplex, SimplicialComplex};
pub use ecp::{build_ecp, hasse, order_complex, order_complex_skeleton, transitive_closure, Ecp};
pub use eigen::{jacobi_eigenvalues, spectrum};
pub use gf2::{betti, boundary_gf2, boundary_rank_gf2, BettiVector, Gf2Matrix};
pub use hodge::{boundary_matrix_real, hodge, HodgeLaplacian, ZERO_EIGENVALUE_TOLERANCE};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TopologyError {
    #[error("simplex {0:?} is not strictly increasing")]
    UnsortedSimplex(Vec<usize>),
    #[error("simplex {simplex:?} is missing its face {face:?}")]
    MissingFace { simplex: Vec<usize>, face: Vec<usize> },
    #[error("duplicate simplex {0:?}")]
    DuplicateSimplex(Vec<usize>),
    #[error("empty simplex")]
    EmptySimplex,
    #[error("dimension {k} out of range for a complex of dimension {max}")]
    DimensionOutOfRange { k: usize, max: isize },
    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {diff}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },
    #[error("matrix data has length {len}, expected {n}x{n}")]
    BadShape { len: usize, n: usize },
}
