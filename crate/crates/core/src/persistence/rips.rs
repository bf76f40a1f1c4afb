use std::cmp::Ordering;

use super::PersistenceError;
use crate::topology::{Simplex, SimplicialComplex};

/// Simplices with birth values in processing order.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    entries: Vec<(Simplex, f64)>,
}

fn filtration_order(a: &(Simplex, f64), b: &(Simplex, f64)) -> Ordering {
    a.1.total_cmp(&b.1)
        .then(a.0.len().cmp(&b.0.len()))
        .then_with(|| a.0.cmp(&b.0))
}

impl Filtration {
    /// Sorts entries by (birth, dimension, lexicographic vertex order).
    pub fn new(mut entries: Vec<(Simplex, f64)>) -> Self {
        entries.sort_by(filtration_order);
        Filtration { entries }
    }

    /// Keeps the caller's order. [`super::barcode`] rejects orders in which a
    /// face comes after its coface.
    pub fn from_ordered(entries: Vec<(Simplex, f64)>) -> Self {
        Filtration { entries }
    }

    pub fn entries(&self) -> &[(Simplex, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The complex at the end of the filtration.
    pub fn complex(&self) -> SimplicialComplex {
        SimplicialComplex::from_maximal(self.entries.iter().map(|(s, _)| s.clone()))
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Vietoris–Rips filtration up to scale `max_eps`.
///
/// Vertices are born at 0, an edge at the distance between its endpoints and
/// a higher simplex at the largest edge among its vertices. Simplices up to
/// dimension `max_dim + 1` are generated so that deaths in `max_dim` are
/// complete.
pub fn vietoris_rips(
    points: &[Vec<f64>],
    max_eps: f64,
    max_dim: usize,
) -> Result<Filtration, PersistenceError> {
    let first = points.first().ok_or(PersistenceError::EmptyPointCloud)?;
    if !(max_eps > 0.0 && max_eps.is_finite()) {
        return Err(PersistenceError::InvalidMaxEps(max_eps));
    }
    for (i, p) in points.iter().enumerate() {
        if p.len() != first.len() {
            return Err(PersistenceError::DimensionMismatch {
                index: i,
                expected: first.len(),
                found: p.len(),
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(PersistenceError::NonFinitePoint(i));
        }
    }
    let n = points.len();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = euclidean(&points[i], &points[j]);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    // Higher-indexed neighbors only, so each clique is generated once.
    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| (i + 1..n).filter(|&j| dist[i * n + j] <= max_eps).collect())
        .collect();

    let max_size = max_dim + 2;
    let mut entries = Vec::new();
    let mut clique = Vec::with_capacity(max_size);
    for v in 0..n {
        clique.push(v);
        expand(&dist, n, &neighbors, &mut clique, &neighbors[v], 0.0, max_size, &mut entries);
        clique.pop();
    }
    Ok(Filtration::new(entries))
}

#[allow(clippy::too_many_arguments)]
fn expand(
    dist: &[f64],
    n: usize,
    neighbors: &[Vec<usize>],
    clique: &mut Vec<usize>,
    candidates: &[usize],
    birth: f64,
    max_size: usize,
    out: &mut Vec<(Simplex, f64)>,
) {
    out.push((clique.clone(), birth));
    if clique.len() == max_size {
        return;
    }
    for (ci, &c) in candidates.iter().enumerate() {
        let new_birth = clique
            .iter()
            .map(|&u| dist[u * n + c])
            .fold(birth, f64::max);
        let next: Vec<usize> = candidates[ci + 1..]
            .iter()
            .copied()
            .filter(|w| neighbors[c].binary_search(w).is_ok())
            .collect();
        clique.push(c);
        expand(dist, n, neighbors, clique, &next, new_birth, max_size, out);
        clique.pop();
    }
}
