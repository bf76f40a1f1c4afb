use super::{min_cost_assignment, Pair, PersistenceDiagram, PersistenceError};

/// Ground distance between two diagram points (L-infinity).
pub fn point_distance(a: &Pair, b: &Pair) -> f64 {
    (a.birth - b.birth).abs().max((a.death - b.death).abs())
}

/// L-infinity distance from a point to the diagonal.
pub fn diagonal_distance(a: &Pair) -> f64 {
    (a.death - a.birth) / 2.0
}

fn raise(x: f64, p: f64) -> f64 {
    if p == 1.0 {
        x
    } else {
        x.powf(p)
    }
}

/// p-Wasserstein distance between the dimension-`dim` parts of two diagrams,
/// with L-infinity ground metric and free matching to the diagonal.
///
/// Infinite bars must be truncated first (see
/// [`PersistenceDiagram::truncated`]).
pub fn wasserstein(
    a: &PersistenceDiagram,
    b: &PersistenceDiagram,
    dim: usize,
    p: f64,
) -> Result<f64, PersistenceError> {
    if p.is_nan() || p < 1.0 {
        return Err(PersistenceError::InvalidOrder(p));
    }
    if a.infinite_count(dim) > 0 || b.infinite_count(dim) > 0 {
        return Err(PersistenceError::InfiniteBar(dim));
    }
    Ok(wasserstein_bars(a.bars(dim), b.bars(dim), p))
}

/// Same as [`wasserstein`] on raw finite bar lists.
///
/// The cost matrix is `(n+m) x (n+m)`: rows are the points of `a` followed by
/// diagonal slots for `b`, columns are the points of `b` followed by diagonal
/// slots for `a`.
pub fn wasserstein_bars(a: &[Pair], b: &[Pair], p: f64) -> f64 {
    let (n, m) = (a.len(), b.len());
    let size = n + m;
    if size == 0 {
        return 0.0;
    }
    let mut cost = vec![vec![0.0; size]; size];
    for (i, pa) in a.iter().enumerate() {
        for (j, pb) in b.iter().enumerate() {
            cost[i][j] = raise(point_distance(pa, pb), p);
        }
        let to_diag = raise(diagonal_distance(pa), p);
        for c in cost[i].iter_mut().skip(m) {
            *c = to_diag;
        }
    }
    for (j, pb) in b.iter().enumerate() {
        let to_diag = raise(diagonal_distance(pb), p);
        for row in cost.iter_mut().skip(n) {
            row[j] = to_diag;
        }
    }
    let (assignment, _) = min_cost_assignment(&cost);
    // Sum in a fixed order (points of `a`, then unmatched points of `b`) so
    // the result does not depend on which diagonal slot a point landed in.
    let mut matched = vec![false; m];
    let mut total = 0.0;
    for (i, &c) in assignment.iter().take(n).enumerate() {
        total += cost[i][c];
        if c < m {
            matched[c] = true;
        }
    }
    for (j, pb) in b.iter().enumerate() {
        if !matched[j] {
            total += raise(diagonal_distance(pb), p);
        }
    }
    if p == 1.0 {
        total
    } else {
        total.powf(1.0 / p)
    }
}
