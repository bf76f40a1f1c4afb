//! Independent reference implementations used by the integration tests.
//! Everything here is deliberately naive: dense matrices, exhaustive search.
#![allow(dead_code)]

use flowtopo::persistence::Pair;
use flowtopo::SimplicialComplex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Face closure of `n_gen` random simplices on `n_vertices` vertices, each of
/// dimension at most `max_dim`.
pub fn random_complex(rng: &mut ChaCha8Rng, n_vertices: usize, max_dim: usize, n_gen: usize) -> SimplicialComplex {
    let gens: Vec<Vec<usize>> = (0..n_gen)
        .map(|_| {
            let size = rng.random_range(1..=max_dim + 1);
            let mut s: Vec<usize> = Vec::new();
            while s.len() < size.min(n_vertices) {
                let v = rng.random_range(0..n_vertices);
                if !s.contains(&v) {
                    s.push(v);
                }
            }
            s
        })
        .collect();
    SimplicialComplex::from_maximal(gens)
}

/// Signed boundary matrix (rows: (k-1)-faces, cols: k-simplices), built from
/// the simplex lists alone.
pub fn naive_boundary(c: &SimplicialComplex, k: usize) -> Vec<Vec<i64>> {
    if k == 0 {
        return Vec::new();
    }
    let rows = c.simplices(k - 1);
    let cols = c.simplices(k);
    let mut m = vec![vec![0i64; cols.len()]; rows.len()];
    for (j, s) in cols.iter().enumerate() {
        for omit in 0..s.len() {
            let face: Vec<usize> = s.iter().enumerate().filter(|&(p, _)| p != omit).map(|(_, &v)| v).collect();
            let i = rows.iter().position(|r| *r == face).expect("face present");
            m[i][j] = if omit % 2 == 0 { 1 } else { -1 };
        }
    }
    m
}

/// Rank by plain row reduction modulo a prime.
pub fn rank_mod(mut m: Vec<Vec<i64>>, p: i64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            *x = x.rem_euclid(p);
        }
    }
    let inv = |a: i64| {
        // Fermat
        let (mut base, mut e, mut r) = (a, p - 2, 1i64);
        while e > 0 {
            if e & 1 == 1 {
                r = r * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        r
    };
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(rank, piv);
        let f = inv(m[rank][col]);
        for x in m[rank].iter_mut() {
            *x = *x * f % p;
        }
        let pivot = m[rank].clone();
        for (r, row) in m.iter_mut().enumerate() {
            if r != rank && row[col] != 0 {
                let g = row[col];
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x = (*x - g * y).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn betti_with(c: &SimplicialComplex, max_dim: usize, p: i64) -> Vec<usize> {
    let ranks: Vec<usize> = (0..=max_dim + 1).map(|k| rank_mod(naive_boundary(c, k), p)).collect();
    (0..=max_dim).map(|k| c.count(k) - ranks[k] - ranks[k + 1]).collect()
}

pub fn naive_betti_gf2(c: &SimplicialComplex, max_dim: usize) -> Vec<usize> {
    betti_with(c, max_dim, 2)
}

/// Betti numbers over a large prime field; equal to the rational ones for
/// the small complexes used here.
pub fn naive_betti_q(c: &SimplicialComplex, max_dim: usize) -> Vec<usize> {
    betti_with(c, max_dim, 1_000_000_007)
}

pub fn random_cloud(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| rng.random_range(0.0..1.0)).collect()).collect()
}

/// Random finite diagram. With `dyadic`, coordinates are multiples of 1/8 so
/// every sum is exact.
pub fn random_bars(rng: &mut ChaCha8Rng, max_len: usize, dyadic: bool) -> Vec<Pair> {
    let n = rng.random_range(0..=max_len);
    (0..n)
        .map(|_| {
            if dyadic {
                let b = rng.random_range(0..16) as f64 / 8.0;
                let l = rng.random_range(1..16) as f64 / 8.0;
                Pair::new(b, b + l)
            } else {
                let b: f64 = rng.random_range(0.0..2.0);
                Pair::new(b, b + rng.random_range(0.01..2.0))
            }
        })
        .collect()
}

/// 1-Wasserstein by trying every partial matching of `a` into `b`. Costs are
/// summed over `a` in order, then over unmatched `b` in order.
pub fn brute_w1(a: &[Pair], b: &[Pair]) -> f64 {
    fn linf(x: &Pair, y: &Pair) -> f64 {
        (x.birth - y.birth).abs().max((x.death - y.death).abs())
    }
    fn half(x: &Pair) -> f64 {
        (x.death - x.birth) / 2.0
    }
    fn rec(a: &[Pair], b: &[Pair], i: usize, used: &mut Vec<bool>, acc: f64, best: &mut f64) {
        if i == a.len() {
            let mut total = acc;
            for (j, y) in b.iter().enumerate() {
                if !used[j] {
                    total += half(y);
                }
            }
            if total < *best {
                *best = total;
            }
            return;
        }
        rec(a, b, i + 1, used, acc + half(&a[i]), best);
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                rec(a, b, i + 1, used, acc + linf(&a[i], &b[j]), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    rec(a, b, 0, &mut vec![false; b.len()], 0.0, &mut best);
    best
}

/// Point on a smooth open curve in R^4, `t` in [-1, 1].
pub fn curve(t: f64) -> Vec<f64> {
    vec![t, t * t - 0.5, (1.5 * t).sin(), 0.5 * (2.0 * t).cos()]
}

pub fn manifold_samples(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| curve(rng.random_range(-1.0..1.0))).collect()
}

pub fn gaussian(rng: &mut ChaCha8Rng, sigma: f64) -> f64 {
    use rand_distr::{Distribution, Normal};
    Normal::new(0.0, sigma).unwrap().sample(rng)
}

/// A random unit direction scaled to `len`.
pub fn offset(rng: &mut ChaCha8Rng, d: usize, len: f64) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| gaussian(rng, 1.0)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x * len / n).collect()
}

pub fn mse(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64
}

/// Denoising and detection results on the curve fixture.
pub struct ManifoldRun {
    pub noisy_mse: f64,
    pub denoised_mse: f64,
    pub accuracy: f64,
}

pub fn manifold_run(seed: u64) -> ManifoldRun {
    use flowtopo::autoencoder::{Mlp, TrainConfig};
    let mut r = rng(seed);
    let train = manifold_samples(&mut r, 256);
    let held_out = manifold_samples(&mut r, 200);
    let mut net = Mlp::new(4, 16, 1, seed).unwrap();
    let cfg = TrainConfig {
        learning_rate: 0.02,
        epochs: 400,
        seed,
        ..TrainConfig::default()
    };
    net.train(&train, &cfg).unwrap();

    let clean = manifold_samples(&mut r, 200);
    let (mut noisy_total, mut denoised_total) = (0.0, 0.0);
    for x in &clean {
        let noisy: Vec<f64> = x.iter().map(|v| v + gaussian(&mut r, 0.1)).collect();
        noisy_total += mse(&noisy, x);
        denoised_total += mse(&net.denoise(&noisy).unwrap(), x);
    }

    let threshold = net.calibrate_threshold(&held_out).unwrap();
    let on = manifold_samples(&mut r, 200);
    let off: Vec<Vec<f64>> = manifold_samples(&mut r, 200)
        .into_iter()
        .map(|x| {
            let o = offset(&mut r, 4, 1.0);
            x.iter().zip(&o).map(|(a, b)| a + b).collect()
        })
        .collect();
    let correct = on.iter().filter(|x| !net.detect(x, threshold).unwrap()).count()
        + off.iter().filter(|x| net.detect(x, threshold).unwrap()).count();
    ManifoldRun {
        noisy_mse: noisy_total / clean.len() as f64,
        denoised_mse: denoised_total / clean.len() as f64,
        accuracy: correct as f64 / 400.0,
    }
}

/// Largest relative gap between analytic and central-difference gradients,
/// over every parameter of a random net. Gradients smaller than 1e-6 in
/// both are compared on an absolute scale.
pub fn worst_gradient_error(seed: u64, sizes: &[usize]) -> f64 {
    use flowtopo::autoencoder::Mlp;
    let mut r = rng(seed);
    let mut net = Mlp::with_sizes_unchecked(sizes, seed).unwrap();
    // random biases too, so no unit sits exactly at the kink
    let params: Vec<f64> = net.params().iter().map(|_| r.random_range(-1.0..1.0)).collect();
    net.set_params(&params).unwrap();
    let batch: Vec<Vec<f64>> = (0..4).map(|_| (0..sizes[0]).map(|_| r.random_range(-1.0..1.0)).collect()).collect();
    let (_, grad) = net.loss_and_gradient(&batch).unwrap();
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for i in 0..params.len() {
        let mut p = params.clone();
        p[i] += h;
        net.set_params(&p).unwrap();
        let up = net.loss_and_gradient(&batch).unwrap().0;
        p[i] -= 2.0 * h;
        net.set_params(&p).unwrap();
        let down = net.loss_and_gradient(&batch).unwrap().0;
        let numeric = (up - down) / (2.0 * h);
        let rel = (grad[i] - numeric).abs() / grad[i].abs().max(numeric.abs()).max(1e-6);
        worst = worst.max(rel);
    }
    net.set_params(&params).unwrap();
    worst
}
