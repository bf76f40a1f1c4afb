use super::hodge::HodgeLaplacian;
use super::TopologyError;

const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Ascending eigenvalues of a Hodge Laplacian.
pub fn spectrum(l: &HodgeLaplacian) -> Result<Vec<f64>, TopologyError> {
    jacobi_eigenvalues(l.size(), l.data())
}

/// Eigenvalues of a symmetric row-major `n x n` matrix by cyclic Jacobi
/// rotations, iterated until the off-diagonal Frobenius norm drops below
/// `1e-12` (relative to the matrix norm when that exceeds one).
pub fn jacobi_eigenvalues(n: usize, data: &[f64]) -> Result<Vec<f64>, TopologyError> {
    if data.len() != n * n {
        return Err(TopologyError::BadShape { len: data.len(), n });
    }
    let scale = data.iter().map(|v| v * v).sum::<f64>().sqrt().max(1.0);
    for i in 0..n {
        for j in i + 1..n {
            let diff = (data[i * n + j] - data[j * n + i]).abs();
            if diff > 1e-12 * scale {
                return Err(TopologyError::NotSymmetric { i, j, diff });
            }
        }
    }
    let mut a = data.to_vec();
    let tol = OFF_DIAGONAL_TOLERANCE * scale;
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off < tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, n, p, q);
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Zeroes `a[p][q]` with one Jacobi rotation.
fn rotate(a: &mut [f64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    if apq == 0.0 {
        return;
    }
    let app = a[p * n + p];
    let aqq = a[q * n + q];
    let theta = (aqq - app) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    for k in 0..n {
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        a[k * n + p] = c * akp - s * akq;
        a[k * n + q] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[p * n + k];
        let aqk = a[q * n + k];
        a[p * n + k] = c * apk - s * aqk;
        a[q * n + k] = s * apk + c * aqk;
    }
    a[p * n + q] = 0.0;
    a[q * n + p] = 0.0;
}
