//! Sliding baseline point cloud with a cached persistence diagram.

use std::collections::VecDeque;

use serde::Serialize;

use super::{DetectorError, FeatureVector};
use crate::par::{self, Execution};
use crate::persistence::{barcode, vietoris_rips, wasserstein, PersistenceDiagram};

/// Multiplier applied to the calibrated score quantile.
pub const THRESHOLD_SLACK: f64 = 1.5;

/// Score reductions and deviations closer than this count as ties during
/// attribution, so round-off does not pick the winner.
const TIE_TOLERANCE: f64 = 1e-9;

/// Per-coordinate z-score parameters, frozen when the baseline is created.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Population mean and standard deviation; a zero deviation becomes 1.
    pub fn fit(rows: &[Vec<f64>]) -> Self {
        let d = rows.first().map_or(0, Vec::len);
        let n = rows.len().max(1) as f64;
        let mean: Vec<f64> = (0..d)
            .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n)
            .collect();
        let std = (0..d)
            .map(|j| {
                let var = rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum::<f64>() / n;
                let s = var.sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        Standardizer { mean, std }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }

    pub fn invert(&self, z: &[f64]) -> Vec<f64> {
        z.iter()
            .zip(self.mean.iter().zip(&self.std))
            .map(|(v, (m, s))| v * s + m)
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// Outcome of scoring one window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnomalyReport {
    pub window_start: f64,
    pub score: f64,
    pub threshold: f64,
    pub anomalous: bool,
    pub attribution: Option<String>,
}

impl AnomalyReport {
    /// One JSON object, keys in fixed order, no trailing newline.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("report fields are always serializable")
    }
}

/// The anomaly-free reference cloud.
///
/// Points are standardized with parameters fitted at creation and kept
/// oldest-first. `diagram` always holds the truncated diagram of the current
/// points, restricted to dimensions `0..=max_dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    points: VecDeque<Vec<f64>>,
    diagram: PersistenceDiagram,
    scaler: Standardizer,
    names: Vec<String>,
    max_eps: f64,
    max_dim: usize,
}

impl Baseline {
    /// Builds the baseline from exactly `capacity` anomaly-free vectors.
    pub fn new(
        vectors: &[FeatureVector],
        names: &[String],
        capacity: usize,
        max_eps: f64,
        max_dim: usize,
    ) -> Result<Self, DetectorError> {
        if capacity < 3 {
            return Err(DetectorError::CapacityTooSmall(capacity));
        }
        if vectors.len() != capacity {
            return Err(DetectorError::WrongBaselineSize {
                expected: capacity,
                found: vectors.len(),
            });
        }
        if !(max_eps > 0.0 && max_eps.is_finite()) {
            return Err(DetectorError::InvalidParameter(format!(
                "max_eps must be positive and finite, got {max_eps}"
            )));
        }
        let d = names.len();
        if let Some(v) = vectors.iter().find(|v| v.dim() != d) {
            return Err(DetectorError::DimensionMismatch {
                expected: d,
                found: v.dim(),
            });
        }
        let raw: Vec<Vec<f64>> = vectors.iter().map(|v| v.values.clone()).collect();
        let scaler = Standardizer::fit(&raw);
        let points: VecDeque<Vec<f64>> = raw.iter().map(|r| scaler.apply(r)).collect();
        let diagram = diagram_of(points.iter(), max_eps, max_dim);
        Ok(Baseline {
            points,
            diagram,
            scaler,
            names: names.to_vec(),
            max_eps,
            max_dim,
        })
    }

    pub fn capacity(&self) -> usize {
        self.points.len()
    }

    /// Standardized points, oldest first.
    pub fn points(&self) -> impl ExactSizeIterator<Item = &Vec<f64>> {
        self.points.iter()
    }

    pub fn diagram(&self) -> &PersistenceDiagram {
        &self.diagram
    }

    pub fn scaler(&self) -> &Standardizer {
        &self.scaler
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn max_eps(&self) -> f64 {
        self.max_eps
    }

    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    /// Diagram recomputed from the current points, ignoring the cache.
    pub fn recompute_diagram(&self) -> PersistenceDiagram {
        diagram_of(self.points.iter(), self.max_eps, self.max_dim)
    }

    /// True when the cached diagram matches a from-scratch recomputation.
    pub fn is_coherent(&self) -> bool {
        self.diagram == self.recompute_diagram()
    }

    pub fn standardize(&self, v: &FeatureVector) -> Result<Vec<f64>, DetectorError> {
        if v.dim() != self.scaler.dim() {
            return Err(DetectorError::DimensionMismatch {
                expected: self.scaler.dim(),
                found: v.dim(),
            });
        }
        Ok(self.scaler.apply(&v.values))
    }

    /// Anomaly score of a raw feature vector.
    pub fn score(&self, v: &FeatureVector) -> Result<f64, DetectorError> {
        Ok(self.score_standardized(&self.standardize(v)?))
    }

    /// Score of an already standardized point: summed 1-Wasserstein distance,
    /// over dimensions `0..=max_dim`, between the diagram of the baseline
    /// plus the point and the cached baseline diagram.
    pub fn score_standardized(&self, z: &[f64]) -> f64 {
        let with = diagram_of(self.points.iter().chain(std::iter::once(&z.to_vec())), self.max_eps, self.max_dim);
        diagram_distance(&with, &self.diagram, self.max_dim)
    }

    /// Leave-one-out threshold: each baseline point is scored against the
    /// others; the result is `THRESHOLD_SLACK` times the `quantile` of those
    /// scores (linear interpolation between order statistics).
    pub fn calibrate_threshold(&self, quantile: f64) -> Result<f64, DetectorError> {
        self.calibrate_threshold_with(quantile, Execution::default())
    }

    pub fn calibrate_threshold_with(
        &self,
        quantile: f64,
        exec: Execution,
    ) -> Result<f64, DetectorError> {
        if !(quantile > 0.0 && quantile <= 1.0) {
            return Err(DetectorError::InvalidParameter(format!(
                "quantile must be in (0, 1], got {quantile}"
            )));
        }
        let scores = self.leave_one_out_scores(exec);
        Ok(THRESHOLD_SLACK * quantile_of(&scores, quantile))
    }

    /// Score of each baseline point against the baseline without it.
    pub fn leave_one_out_scores(&self, exec: Execution) -> Vec<f64> {
        par::map_range(exec, self.points.len(), |i| {
            let others = self
                .points
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, p)| p);
            let without = diagram_of(others, self.max_eps, self.max_dim);
            diagram_distance(&self.diagram, &without, self.max_dim)
        })
    }

    /// Index of the coordinate whose replacement by the current baseline
    /// mean lowers the score the most. Ties go to the coordinate furthest
    /// from that mean, then to the lowest index.
    pub fn attribute(&self, v: &FeatureVector) -> Result<usize, DetectorError> {
        self.attribute_with(v, Execution::default())
    }

    pub fn attribute_with(&self, v: &FeatureVector, exec: Execution) -> Result<usize, DetectorError> {
        let z = self.standardize(v)?;
        let base = self.score_standardized(&z);
        let centroid = self.centroid();
        let reductions = par::map_range(exec, z.len(), |i| {
            let mut alt = z.clone();
            alt[i] = centroid[i];
            base - self.score_standardized(&alt)
        });
        // A point far past max_eps in several coordinates saturates the
        // score, so every single replacement ties; the standardized
        // deviation then decides, and the lowest index after that.
        let dev: Vec<f64> = z.iter().zip(&centroid).map(|(a, c)| (a - c).abs()).collect();
        let mut best = 0;
        for i in 1..z.len() {
            let dr = reductions[i] - reductions[best];
            if dr > TIE_TOLERANCE || (dr >= -TIE_TOLERANCE && dev[i] > dev[best] + TIE_TOLERANCE) {
                best = i;
            }
        }
        Ok(best)
    }

    /// Mean of the current standardized points.
    pub fn centroid(&self) -> Vec<f64> {
        let n = self.points.len() as f64;
        (0..self.scaler.dim())
            .map(|j| self.points.iter().map(|p| p[j]).sum::<f64>() / n)
            .collect()
    }

    /// Scores `v`. A window at or under the threshold replaces the oldest
    /// point; an anomalous one leaves the baseline untouched and gets an
    /// attribution.
    pub fn step(
        self,
        v: &FeatureVector,
        threshold: f64,
    ) -> Result<(AnomalyReport, Baseline), DetectorError> {
        let z = self.standardize(v)?;
        let score = self.score_standardized(&z);
        let anomalous = score > threshold;
        let mut report = AnomalyReport {
            window_start: v.window_start,
            score,
            threshold,
            anomalous,
            attribution: None,
        };
        if anomalous {
            let idx = self.attribute(v)?;
            report.attribution = Some(self.names[idx].clone());
            return Ok((report, self));
        }
        let mut next = self;
        next.points.pop_front();
        next.points.push_back(z);
        next.diagram = next.recompute_diagram();
        Ok((report, next))
    }
}

/// Truncated diagram of a point cloud, dimensions `0..=max_dim`.
pub(crate) fn diagram_of<'a, I>(points: I, max_eps: f64, max_dim: usize) -> PersistenceDiagram
where
    I: Iterator<Item = &'a Vec<f64>>,
{
    let pts: Vec<Vec<f64>> = points.cloned().collect();
    let f = vietoris_rips(&pts, max_eps, max_dim).expect("baseline points are finite and consistent");
    barcode(&f)
        .expect("Rips filtrations are valid")
        .restricted(max_dim)
        .truncated(max_eps)
}

fn diagram_distance(a: &PersistenceDiagram, b: &PersistenceDiagram, max_dim: usize) -> f64 {
    (0..=max_dim)
        .map(|k| wasserstein(a, b, k, 1.0).expect("diagrams are truncated"))
        .sum()
}

/// Linear-interpolation quantile of unsorted data; `q` in (0, 1].
pub fn quantile_of(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let h = (v.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}
