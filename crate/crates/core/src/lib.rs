//! Topological anomaly detection for netflow logs.
//!
//! The pipeline runs in stages, each usable on its own:
//!
//! * [`flow`] parses netflow CSV, pairs unidirectional records into sessions
//!   and cuts the session stream into fixed-width time windows.
//! * [`hypergraph`] turns a window into a source-IP / destination-port
//!   hypergraph.
//! * [`topology`] builds the edge-containment order of a hypergraph, its Hasse
//!   diagram and order complex, and computes GF(2) Betti numbers and Hodge
//!   Laplacian spectra.
//! * [`persistence`] builds Vietoris–Rips filtrations, reduces them to
//!   persistence diagrams and compares diagrams with the Wasserstein distance.
//! * [`detector`] summarizes windows as feature vectors and scores each new
//!   window against a sliding baseline point cloud.
//! * [`autoencoder`] is a small feedforward autoencoder used for direct
//!   detection and for denoising feature vectors.
//! * [`synth`] generates seeded synthetic traffic with injected port scans.
//!
//! Data-parallel loops go through [`par`]; with the `parallel` feature
//! disabled everything runs on the calling thread.

pub mod autoencoder;
pub mod config;
pub mod detector;
pub mod flow;
pub mod hypergraph;
pub mod par;
pub mod persistence;
pub mod synth;
pub mod topology;

pub use detector::{AnomalyReport, Baseline, Feature, FeatureSet, FeatureVector};
pub use flow::{FlowRecord, SessionRecord, TimeWindow};
pub use hypergraph::{FlowHypergraph, Hypergraph, HypergraphStats};
pub use par::Execution;
pub use persistence::{Filtration, PersistenceDiagram};
pub use topology::{BettiVector, Ecp, HodgeLaplacian, SimplicialComplex};
