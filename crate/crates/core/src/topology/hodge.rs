use super::complex::SimplicialComplex;
use super::TopologyError;

/// Eigenvalues below this count as zero when reading off kernel dimensions.
pub const ZERO_EIGENVALUE_TOLERANCE: f64 = 1e-8;

/// k-th Hodge Laplacian of a complex as a dense symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct HodgeLaplacian {
    pub k: usize,
    n: usize,
    data: Vec<f64>,
}

impl HodgeLaplacian {
    /// Wraps a row-major square matrix; symmetry is checked by
    /// [`super::spectrum`], not here.
    pub fn from_dense(k: usize, n: usize, data: Vec<f64>) -> Result<Self, TopologyError> {
        if data.len() != n * n {
            return Err(TopologyError::BadShape { len: data.len(), n });
        }
        Ok(HodgeLaplacian { k, n, data })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n.max(1)).map(<[f64]>::to_vec).collect()
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }
}

/// Signed boundary matrix from k-simplices to (k-1)-simplices, rows as
/// (k-1)-simplices. Orientation follows ascending vertex order and omitting
/// position `i` carries sign `(-1)^i`.
pub fn boundary_matrix_real(k: &SimplicialComplex, dim: usize) -> Vec<Vec<f64>> {
    let rows = if dim == 0 { 0 } else { k.count(dim - 1) };
    let cols = k.count(dim);
    let mut m = vec![vec![0.0; cols]; rows];
    if dim > 0 {
        #[allow(clippy::needless_range_loop)]
        for col in 0..cols {
            for (row, pos) in k.boundary_column(dim, col) {
                m[row][col] = sign(pos);
            }
        }
    }
    m
}

fn sign(pos: usize) -> f64 {
    if pos.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `L_k = B_k^T B_k + B_{k+1} B_{k+1}^T` with real signed boundary matrices.
pub fn hodge(complex: &SimplicialComplex, k: usize) -> Result<HodgeLaplacian, TopologyError> {
    if k as isize > complex.dim() {
        return Err(TopologyError::DimensionOutOfRange {
            k,
            max: complex.dim(),
        });
    }
    let n = complex.count(k);
    let mut l = HodgeLaplacian {
        k,
        n,
        data: vec![0.0; n * n],
    };
    // Down part: entry (i, j) sums products over shared (k-1)-faces.
    if k > 0 {
        let mut by_face: Vec<Vec<(usize, f64)>> = vec![Vec::new(); complex.count(k - 1)];
        for col in 0..n {
            for (face, pos) in complex.boundary_column(k, col) {
                by_face[face].push((col, sign(pos)));
            }
        }
        for entries in &by_face {
            for &(i, si) in entries {
                for &(j, sj) in entries {
                    l.add(i, j, si * sj);
                }
            }
        }
    }
    // Up part: each (k+1)-simplex contributes the outer product of its column.
    for col in 0..complex.count(k + 1) {
        let column = complex.boundary_column(k + 1, col);
        for &(i, pi) in &column {
            for &(j, pj) in &column {
                l.add(i, j, sign(pi) * sign(pj));
            }
        }
    }
    Ok(l)
}
