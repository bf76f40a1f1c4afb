use std::fmt::Write as _;

use super::PersistenceError;

pub const DIAGRAM_HEADER: &str = "dim,birth,death";

/// One bar. `death` is `f64::INFINITY` for classes that never die.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair {
    pub birth: f64,
    pub death: f64,
}

impl Pair {
    pub fn new(birth: f64, death: f64) -> Self {
        Pair { birth, death }
    }

    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }
}

/// Bars grouped by homology dimension, each group sorted by (birth, death).
/// Zero-persistence pairs are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PersistenceDiagram {
    dims: Vec<Vec<Pair>>,
}

impl PersistenceDiagram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a bar, dropping it if `death <= birth`.
    pub fn push(&mut self, dim: usize, birth: f64, death: f64) {
        if death <= birth {
            return;
        }
        if self.dims.len() <= dim {
            self.dims.resize_with(dim + 1, Vec::new);
        }
        self.dims[dim].push(Pair { birth, death });
    }

    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (usize, f64, f64)>,
    {
        let mut d = Self::new();
        for (dim, b, e) in pairs {
            d.push(dim, b, e);
        }
        d.sort();
        d
    }

    pub(crate) fn sort(&mut self) {
        for bars in &mut self.dims {
            bars.sort_by(|a, b| a.birth.total_cmp(&b.birth).then(a.death.total_cmp(&b.death)));
        }
    }

    /// Bars in dimension `k` (empty if none).
    pub fn bars(&self, k: usize) -> &[Pair] {
        self.dims.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    /// One past the highest dimension that has ever held a bar.
    pub fn n_dims(&self) -> usize {
        self.dims.len()
    }

    pub fn infinite_count(&self, k: usize) -> usize {
        self.bars(k).iter().filter(|p| p.is_infinite()).count()
    }

    pub fn total_bars(&self) -> usize {
        self.dims.iter().map(Vec::len).sum()
    }

    /// Copy with every infinite death replaced by `cap`. Bars born at or after
    /// `cap` vanish.
    pub fn truncated(&self, cap: f64) -> Self {
        let mut d = Self::new();
        for (k, bars) in self.dims.iter().enumerate() {
            for p in bars {
                d.push(k, p.birth, p.death.min(cap));
            }
        }
        d.sort();
        d
    }

    /// Copy keeping only dimensions `0..=max_dim`.
    pub fn restricted(&self, max_dim: usize) -> Self {
        let mut d = self.clone();
        d.dims.truncate(max_dim + 1);
        d
    }

    /// CSV rows `dim,birth,death` ordered by (dim, birth, death); infinite
    /// deaths are written as `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(DIAGRAM_HEADER);
        out.push('\n');
        for (k, bars) in self.dims.iter().enumerate() {
            for p in bars {
                if p.is_infinite() {
                    let _ = writeln!(out, "{k},{},inf", p.birth);
                } else {
                    let _ = writeln!(out, "{k},{},{}", p.birth, p.death);
                }
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, PersistenceError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim_end_matches('\r') == DIAGRAM_HEADER => {}
            _ => {
                return Err(PersistenceError::Parse {
                    line: 1,
                    reason: format!("expected header `{DIAGRAM_HEADER}`"),
                })
            }
        }
        let mut d = Self::new();
        for (i, line) in lines {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            let bad = |reason: String| PersistenceError::Parse { line: i + 1, reason };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 3 {
                return Err(bad(format!("expected 3 fields, found {}", f.len())));
            }
            let dim: usize = f[0].trim().parse().map_err(|_| bad(format!("bad dim `{}`", f[0])))?;
            let birth: f64 = f[1].trim().parse().map_err(|_| bad(format!("bad birth `{}`", f[1])))?;
            let death: f64 = f[2].trim().parse().map_err(|_| bad(format!("bad death `{}`", f[2])))?;
            d.push(dim, birth, death);
        }
        d.sort();
        Ok(d)
    }
}
