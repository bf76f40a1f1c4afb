//! Vietoris–Rips filtrations, persistence barcodes and diagram distances.

mod diagram;
mod hungarian;
mod reduction;
mod rips;
mod wasserstein;

pub use diagram::{Pair, PersistenceDiagram, DIAGRAM_HEADER};
pub use hungarian::min_cost_assignment;
pub use reduction::barcode;
pub use rips::{euclidean, vietoris_rips, Filtration};
pub use wasserstein::{diagonal_distance, point_distance, wasserstein, wasserstein_bars};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PersistenceError {
    #[error("point cloud is empty")]
    EmptyPointCloud,
    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("point {0} has a non-finite coordinate")]
    NonFinitePoint(usize),
    #[error("max_eps must be positive and finite, got {0}")]
    InvalidMaxEps(f64),
    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),
    #[error("diagram has an infinite bar in dimension {0}; truncate deaths before computing distances")]
    InfiniteBar(usize),
    #[error("Wasserstein order p must be >= 1, got {0}")]
    InvalidOrder(f64),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}
