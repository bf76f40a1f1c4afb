//! Per-window summary vectors.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::BufRead;

use super::DetectorError;
use crate::flow::TimeWindow;
use crate::hypergraph::build_hypergraph;
use crate::par::{self, Execution};
use crate::topology::{betti, build_ecp, order_complex_skeleton};

/// A named window statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Feature {
    NRecords,
    NUniqueSip,
    NUniqueDport,
    MaxEdgeSize,
    MeanEdgeSize,
    MaxEcpInDegree,
    MaxEcpOutDegree,
    RbsBeta0,
    RbsBeta1,
    MaxSupportMultiplicity,
}

impl Feature {
    pub const ALL: [Feature; 10] = [
        Feature::NRecords,
        Feature::NUniqueSip,
        Feature::NUniqueDport,
        Feature::MaxEdgeSize,
        Feature::MeanEdgeSize,
        Feature::MaxEcpInDegree,
        Feature::MaxEcpOutDegree,
        Feature::RbsBeta0,
        Feature::RbsBeta1,
        Feature::MaxSupportMultiplicity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::NRecords => "n_records",
            Feature::NUniqueSip => "n_unique_sIP",
            Feature::NUniqueDport => "n_unique_dPort",
            Feature::MaxEdgeSize => "max_edge_size",
            Feature::MeanEdgeSize => "mean_edge_size",
            Feature::MaxEcpInDegree => "max_ecp_in_degree",
            Feature::MaxEcpOutDegree => "max_ecp_out_degree",
            Feature::RbsBeta0 => "rbs_beta0",
            Feature::RbsBeta1 => "rbs_beta1",
            Feature::MaxSupportMultiplicity => "max_support_multiplicity",
        }
    }

    pub fn from_name(name: &str) -> Option<Feature> {
        Feature::ALL.into_iter().find(|f| f.name() == name)
    }

    fn needs_topology(self) -> bool {
        matches!(self, Feature::RbsBeta0 | Feature::RbsBeta1)
    }

    fn needs_ecp(self) -> bool {
        matches!(self, Feature::MaxEcpInDegree | Feature::MaxEcpOutDegree) || self.needs_topology()
    }
}

/// Ordered list of features making up a vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSet(Vec<Feature>);

impl Default for FeatureSet {
    fn default() -> Self {
        FeatureSet(Feature::ALL.to_vec())
    }
}

impl FeatureSet {
    pub fn new(features: Vec<Feature>) -> Result<Self, DetectorError> {
        if features.is_empty() {
            return Err(DetectorError::EmptyFeatureSet);
        }
        let mut seen = BTreeSet::new();
        for f in &features {
            if !seen.insert(*f) {
                return Err(DetectorError::DuplicateFeature(f.name().to_string()));
            }
        }
        Ok(FeatureSet(features))
    }

    /// Parses a comma-separated list of feature names.
    pub fn parse(list: &str) -> Result<Self, DetectorError> {
        let features = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| Feature::from_name(s).ok_or_else(|| DetectorError::UnknownFeature(s.into())))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(features)
    }

    pub fn features(&self) -> &[Feature] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.0.iter().map(|f| f.name().to_string()).collect()
    }

    pub fn position(&self, f: Feature) -> Option<usize> {
        self.0.iter().position(|&g| g == f)
    }
}

/// A window summary: one finite value per feature of the run's set.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub window_start: f64,
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(window_start: f64, values: Vec<f64>) -> Result<Self, DetectorError> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(DetectorError::NonFinite { index: i });
        }
        Ok(FeatureVector {
            window_start,
            values,
        })
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }
}

/// Computes the requested features for one window. The order complex and its
/// Betti numbers are only built when a Betti feature is requested.
pub fn summarize_window(w: &TimeWindow, set: &FeatureSet) -> FeatureVector {
    let h = build_hypergraph(w);
    let stats = h.stats();
    let want_ecp = set.features().iter().any(|f| f.needs_ecp());
    let want_topo = set.features().iter().any(|f| f.needs_topology());
    let ecp = want_ecp.then(|| build_ecp(&h));
    let betti = match (&ecp, want_topo) {
        (Some(ecp), true) => betti(&order_complex_skeleton(ecp, 2), 1),
        _ => crate::topology::BettiVector { betti: vec![0, 0] },
    };
    let values = set
        .features()
        .iter()
        .map(|f| match f {
            Feature::NRecords => w.sessions.len() as f64,
            Feature::NUniqueSip => stats.n_vertices as f64,
            Feature::NUniqueDport => stats.n_edges as f64,
            Feature::MaxEdgeSize => stats.max_edge_size as f64,
            Feature::MeanEdgeSize => stats.mean_edge_size,
            Feature::MaxEcpInDegree => ecp.as_ref().map_or(0, |e| e.max_in_degree()) as f64,
            Feature::MaxEcpOutDegree => ecp.as_ref().map_or(0, |e| e.max_out_degree()) as f64,
            Feature::RbsBeta0 => betti.get(0) as f64,
            Feature::RbsBeta1 => betti.get(1) as f64,
            Feature::MaxSupportMultiplicity => stats.max_support_multiplicity as f64,
        })
        .collect();
    FeatureVector {
        window_start: w.start,
        values,
    }
}

/// [`summarize_window`] over many windows, fanned out according to `exec`.
pub fn summarize_windows(
    windows: &[TimeWindow],
    set: &FeatureSet,
    exec: Execution,
) -> Vec<FeatureVector> {
    par::map(exec, windows, |w| summarize_window(w, set))
}

/// Pairs, windows and summarizes raw flow records in one go.
pub fn summarize_flows(
    flows: &[crate::flow::FlowRecord],
    width: f64,
    origin: f64,
    set: &FeatureSet,
    exec: Execution,
) -> Result<Vec<FeatureVector>, crate::flow::IngestError> {
    let sessions = crate::flow::pair_bidirectional(flows);
    let windows = crate::flow::window(&sessions, width, origin)?;
    Ok(summarize_windows(&windows, set, exec))
}

/// CSV with header `window_start,<feature names>`.
pub fn features_to_csv(names: &[String], vectors: &[FeatureVector]) -> String {
    let mut out = String::from("window_start");
    for n in names {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for v in vectors {
        let _ = write!(out, "{}", v.window_start);
        for x in &v.values {
            let _ = write!(out, ",{x}");
        }
        out.push('\n');
    }
    out
}

/// Parses a feature CSV, returning the coordinate names and the vectors.
pub fn features_from_csv<R: BufRead>(
    reader: R,
) -> Result<(Vec<String>, Vec<FeatureVector>), DetectorError> {
    let mut lines = reader.lines();
    let header = lines
        .next()
        .ok_or_else(|| DetectorError::Parse { line: 1, reason: "missing header".into() })?
        .map_err(|e| DetectorError::Parse { line: 1, reason: e.to_string() })?;
    let header = header.trim_end_matches('\r');
    let mut cols = header.split(',');
    if cols.next() != Some("window_start") {
        return Err(DetectorError::Parse {
            line: 1,
            reason: "first column must be `window_start`".into(),
        });
    }
    let names: Vec<String> = cols.map(|s| s.trim().to_string()).collect();
    if names.is_empty() {
        return Err(DetectorError::EmptyFeatureSet);
    }
    let mut vectors = Vec::new();
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let line = line.map_err(|e| DetectorError::Parse { line: n, reason: e.to_string() })?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let nums = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| DetectorError::Parse { line: n, reason: e.to_string() })?;
        if nums.len() != names.len() + 1 {
            return Err(DetectorError::Parse {
                line: n,
                reason: format!("expected {} fields, found {}", names.len() + 1, nums.len()),
            });
        }
        let v = FeatureVector::new(nums[0], nums[1..].to_vec())
            .map_err(|e| DetectorError::Parse { line: n, reason: e.to_string() })?;
        vectors.push(v);
    }
    Ok((names, vectors))
}
