use std::collections::HashMap;

use super::{Filtration, PersistenceDiagram, PersistenceError};

/// Persistence diagram by the standard left-to-right column reduction of the
/// GF(2) boundary matrix.
pub fn barcode(f: &Filtration) -> Result<PersistenceDiagram, PersistenceError> {
    let entries = f.entries();
    let mut position: HashMap<&[usize], usize> = HashMap::with_capacity(entries.len());
    for (i, (s, _)) in entries.iter().enumerate() {
        if s.is_empty() || s.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PersistenceError::InvalidFiltration(format!(
                "simplex {s:?} is not a strictly increasing vertex list"
            )));
        }
        if position.insert(s.as_slice(), i).is_some() {
            return Err(PersistenceError::InvalidFiltration(format!(
                "duplicate simplex {s:?}"
            )));
        }
    }

    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(entries.len());
    for (j, (s, birth)) in entries.iter().enumerate() {
        let mut col = Vec::with_capacity(s.len());
        if s.len() > 1 {
            for omit in 0..s.len() {
                let face: Vec<usize> = s
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != omit)
                    .map(|(_, &v)| v)
                    .collect();
                let i = *position.get(face.as_slice()).ok_or_else(|| {
                    PersistenceError::InvalidFiltration(format!(
                        "face {face:?} of {s:?} is missing"
                    ))
                })?;
                if i > j || entries[i].1 > *birth {
                    return Err(PersistenceError::InvalidFiltration(format!(
                        "face {face:?} enters after its coface {s:?}"
                    )));
                }
                col.push(i);
            }
            col.sort_unstable();
        }
        columns.push(col);
    }

    // pivot_of[row] = column whose reduced lowest entry is `row`
    let mut pivot_of: Vec<Option<usize>> = vec![None; entries.len()];
    let mut diagram = PersistenceDiagram::new();
    for j in 0..columns.len() {
        while let Some(&low) = columns[j].last() {
            match pivot_of[low] {
                Some(k) => {
                    let reduced = symmetric_difference(&columns[j], &columns[k]);
                    columns[j] = reduced;
                }
                None => {
                    pivot_of[low] = Some(j);
                    let dim = entries[low].0.len() - 1;
                    diagram.push(dim, entries[low].1, entries[j].1);
                    break;
                }
            }
        }
    }
    for (i, (s, birth)) in entries.iter().enumerate() {
        if columns[i].is_empty() && pivot_of[i].is_none() {
            diagram.push(s.len() - 1, *birth, f64::INFINITY);
        }
    }
    diagram.sort();
    Ok(diagram)
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
