use super::complex::SimplicialComplex;

/// Dense GF(2) matrix with rows packed into 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    words: usize,
    data: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words = cols.div_ceil(64);
        Gf2Matrix {
            rows,
            cols,
            words,
            data: vec![0; rows * words],
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r * self.words + c / 64] >> (c % 64) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        let w = &mut self.data[r * self.words + c / 64];
        if bit {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    pub fn flip(&mut self, r: usize, c: usize) {
        self.data[r * self.words + c / 64] ^= 1 << (c % 64);
    }

    /// Rank by forward elimination; consumes a copy of the matrix.
    pub fn rank(&self) -> usize {
        let mut m = self.data.clone();
        let w = self.words;
        let mut rank = 0;
        for c in 0..self.cols {
            let (word, bit) = (c / 64, 1u64 << (c % 64));
            let Some(p) = (rank..self.rows).find(|&r| m[r * w + word] & bit != 0) else {
                continue;
            };
            if p != rank {
                for k in 0..w {
                    m.swap(p * w + k, rank * w + k);
                }
            }
            for r in rank + 1..self.rows {
                if m[r * w + word] & bit != 0 {
                    // only words from `word` onward can be nonzero in the pivot row
                    for k in word..w {
                        m[r * w + k] ^= m[rank * w + k];
                    }
                }
            }
            rank += 1;
            if rank == self.rows {
                break;
            }
        }
        rank
    }
}

/// Boundary map from k-simplices to (k-1)-simplices over GF(2). Zero for
/// k = 0 or when the complex has no k-simplices.
pub fn boundary_gf2(k: &SimplicialComplex, dim: usize) -> Gf2Matrix {
    if dim == 0 || k.count(dim) == 0 {
        return Gf2Matrix::zeros(k.count(dim.saturating_sub(1)), k.count(dim));
    }
    let mut m = Gf2Matrix::zeros(k.count(dim - 1), k.count(dim));
    for col in 0..k.count(dim) {
        for (row, _) in k.boundary_column(dim, col) {
            m.set(row, col, true);
        }
    }
    m
}

pub fn boundary_rank_gf2(k: &SimplicialComplex, dim: usize) -> usize {
    if dim == 0 || k.count(dim) == 0 {
        0
    } else {
        boundary_gf2(k, dim).rank()
    }
}

/// Betti numbers over GF(2), indexed by dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiVector {
    pub betti: Vec<usize>,
}

impl BettiVector {
    pub fn get(&self, k: usize) -> usize {
        self.betti.get(k).copied().unwrap_or(0)
    }
}

/// Betti numbers for dimensions `0..=max_dim`. Stored `(max_dim+1)`-simplices,
/// when present, are used for the last boundary rank.
pub fn betti(k: &SimplicialComplex, max_dim: usize) -> BettiVector {
    let ranks: Vec<usize> = (0..=max_dim + 1).map(|d| boundary_rank_gf2(k, d)).collect();
    let betti = (0..=max_dim)
        .map(|d| k.count(d) - ranks[d] - ranks[d + 1])
        .collect();
    BettiVector { betti }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_basics() {
        let mut m = Gf2Matrix::zeros(3, 3);
        for i in 0..3 {
            m.set(i, i, true);
        }
        assert_eq!(m.rank(), 3);
        m.set(2, 0, true);
        m.set(2, 1, true);
        m.set(2, 2, false);
        // row 2 = row 0 + row 1
        assert_eq!(m.rank(), 2);
        assert!(m.get(2, 0));
        m.flip(2, 0);
        assert!(!m.get(2, 0));
        assert_eq!(Gf2Matrix::zeros(0, 5).rank(), 0);
    }

    #[test]
    fn rank_across_word_boundary() {
        let mut m = Gf2Matrix::zeros(2, 130);
        m.set(0, 129, true);
        m.set(1, 129, true);
        m.set(1, 64, true);
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn canonical_betti() {
        let hollow = SimplicialComplex::from_maximal([vec![0, 1], vec![1, 2], vec![0, 2]]);
        assert_eq!(betti(&hollow, 1).betti, vec![1, 1]);
        let sphere = SimplicialComplex::from_maximal([
            vec![0, 1, 2],
            vec![0, 1, 3],
            vec![0, 2, 3],
            vec![1, 2, 3],
        ]);
        assert_eq!(betti(&sphere, 2).betti, vec![1, 0, 1]);
        let two = SimplicialComplex::from_maximal([vec![0], vec![1]]);
        assert_eq!(betti(&two, 0).betti, vec![2]);
        let filled = SimplicialComplex::from_maximal([vec![0, 1, 2]]);
        assert_eq!(betti(&filled, 1).betti, vec![1, 0]);
        assert_eq!(betti(&filled, 3).betti, vec![1, 0, 0, 0]);
    }
}
