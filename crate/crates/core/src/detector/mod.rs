//! Sliding-baseline persistent-homology anomaly detector.
//!
//! Each window becomes a [`FeatureVector`]. The first `capacity` vectors form
//! the [`Baseline`]; every later vector is scored by how much adding it moves
//! the baseline's persistence diagram (Wasserstein distance). Windows under
//! the calibrated threshold rotate into the baseline, anomalous ones do not.

mod baseline;
mod features;

pub use baseline::{quantile_of, AnomalyReport, Baseline, Standardizer, THRESHOLD_SLACK};
pub use features::{
    features_from_csv, features_to_csv, summarize_flows, summarize_window, summarize_windows, Feature, FeatureSet,
    FeatureVector,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DetectorError {
    #[error("baseline capacity must be at least 3, got {0}")]
    CapacityTooSmall(usize),
    #[error("baseline needs exactly {expected} vectors, got {found}")]
    WrongBaselineSize { expected: usize, found: usize },
    #[error("vector has {found} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coordinate {index} is not finite")]
    NonFinite { index: usize },
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("feature `{0}` listed twice")]
    DuplicateFeature(String),
    #[error("feature set is empty")]
    EmptyFeatureSet,
    #[error("{0}")]
    InvalidParameter(String),
    #[error("not enough windows: need more than {capacity} to score anything, got {found}")]
    TooFewWindows { capacity: usize, found: usize },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// Parameters of a detection run.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorConfig {
    pub capacity: usize,
    pub max_eps: f64,
    pub max_dim: usize,
    pub quantile: f64,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            capacity: 20,
            max_eps: 20.0,
            max_dim: 1,
            quantile: 0.99,
        }
    }
}

/// Result of [`run`].
#[derive(Debug, Clone)]
pub struct DetectionRun {
    pub threshold: f64,
    /// One report per vector after the initial baseline.
    pub reports: Vec<AnomalyReport>,
    pub baseline: Baseline,
}

/// Uses the first `capacity` vectors as the baseline, calibrates the
/// threshold once, then steps through the remaining vectors in order.
pub fn run(
    vectors: &[FeatureVector],
    names: &[String],
    cfg: &DetectorConfig,
) -> Result<DetectionRun, DetectorError> {
    run_with_observer(vectors, names, cfg, |_, _| {})
}

/// Like [`run`], calling `observe(report, baseline_after_step)` after each
/// step.
pub fn run_with_observer<F>(
    vectors: &[FeatureVector],
    names: &[String],
    cfg: &DetectorConfig,
    mut observe: F,
) -> Result<DetectionRun, DetectorError>
where
    F: FnMut(&AnomalyReport, &Baseline),
{
    if vectors.len() < cfg.capacity {
        return Err(DetectorError::TooFewWindows {
            capacity: cfg.capacity,
            found: vectors.len(),
        });
    }
    let (initial, rest) = vectors.split_at(cfg.capacity);
    let mut baseline = Baseline::new(initial, names, cfg.capacity, cfg.max_eps, cfg.max_dim)?;
    let threshold = baseline.calibrate_threshold(cfg.quantile)?;
    let mut reports = Vec::with_capacity(rest.len());
    for v in rest {
        let (report, next) = baseline.step(v, threshold)?;
        observe(&report, &next);
        baseline = next;
        reports.push(report);
    }
    Ok(DetectionRun {
        threshold,
        reports,
        baseline,
    })
}

/// Reports as JSON lines, each terminated by `\n`.
pub fn reports_to_jsonl(reports: &[AnomalyReport]) -> String {
    let mut out = String::new();
    for r in reports {
        out.push_str(&r.to_json_line());
        out.push('\n');
    }
    out
}
