use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use super::TopologyError;

/// Strictly increasing vertex indices.
pub type Simplex = Vec<usize>;

/// Downward-closed set of simplices, stored per dimension in lexicographic
/// order.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimplicialComplex {
    by_dim: Vec<Vec<Simplex>>,
    index: Vec<HashMap<Simplex, usize>>,
}

fn faces(s: &[usize]) -> impl Iterator<Item = Simplex> + '_ {
    (0..s.len()).map(move |i| {
        let mut f = s.to_vec();
        f.remove(i);
        f
    })
}

impl SimplicialComplex {
    /// Validates and stores an explicit simplex list. Every face of every
    /// simplex must be present; duplicates are rejected.
    pub fn new<I>(simplices: I) -> Result<Self, TopologyError>
    where
        I: IntoIterator<Item = Simplex>,
    {
        let mut seen: BTreeSet<Simplex> = BTreeSet::new();
        for s in simplices {
            if s.is_empty() {
                return Err(TopologyError::EmptySimplex);
            }
            if s.windows(2).any(|w| w[0] >= w[1]) {
                return Err(TopologyError::UnsortedSimplex(s));
            }
            if !seen.insert(s.clone()) {
                return Err(TopologyError::DuplicateSimplex(s));
            }
        }
        for s in &seen {
            if s.len() > 1 {
                if let Some(face) = faces(s).find(|f| !seen.contains(f)) {
                    return Err(TopologyError::MissingFace {
                        simplex: s.clone(),
                        face,
                    });
                }
            }
        }
        Ok(Self::from_sorted_set(seen))
    }

    /// Closure of the given simplices under taking faces. Input vertex lists
    /// are sorted and deduplicated first.
    pub fn from_maximal<I>(generators: I) -> Self
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let mut all: BTreeSet<Simplex> = BTreeSet::new();
        for mut g in generators {
            g.sort_unstable();
            g.dedup();
            if g.is_empty() {
                continue;
            }
            let n = g.len();
            for mask in 1u64..(1u64 << n) {
                let s: Simplex = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| g[i]).collect();
                all.insert(s);
            }
        }
        Self::from_sorted_set(all)
    }

    pub(crate) fn from_sorted_set(set: BTreeSet<Simplex>) -> Self {
        let mut by_dim: Vec<Vec<Simplex>> = Vec::new();
        for s in set {
            let d = s.len() - 1;
            if by_dim.len() <= d {
                by_dim.resize_with(d + 1, Vec::new);
            }
            by_dim[d].push(s);
        }
        let index = by_dim
            .iter()
            .map(|list| list.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect())
            .collect();
        SimplicialComplex { by_dim, index }
    }

    /// Highest simplex dimension, or -1 for the empty complex.
    pub fn dim(&self) -> isize {
        self.by_dim.len() as isize - 1
    }

    /// k-simplices in lexicographic order.
    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.by_dim.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices(k).len()
    }

    /// Simplex counts for dimensions `0..=dim`.
    pub fn counts(&self) -> Vec<usize> {
        self.by_dim.iter().map(Vec::len).collect()
    }

    pub fn total(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        let d = s.len().checked_sub(1)?;
        self.index.get(d)?.get(s).copied()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        self.index_of(s).is_some()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flatten()
    }

    /// Alternating sum of simplex counts.
    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(k, l)| if k % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }

    /// Faces of the k-simplex at `col` as `(row index among (k-1)-simplices,
    /// omitted position)`.
    pub(crate) fn boundary_column(&self, k: usize, col: usize) -> Vec<(usize, usize)> {
        let s = &self.by_dim[k][col];
        faces(s)
            .enumerate()
            .map(|(pos, f)| (self.index[k - 1][&f], pos))
            .collect()
    }

    /// One simplex per line, space-separated vertices, dimension-ascending
    /// then lexicographic.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for s in self.iter() {
            let mut first = true;
            for v in s {
                if !first {
                    out.push(' ');
                }
                first = false;
                let _ = write!(out, "{v}");
            }
            out.push('\n');
        }
        out
    }
}
