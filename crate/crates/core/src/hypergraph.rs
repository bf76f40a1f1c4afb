//! Labeled hypergraphs and the per-window source-IP / destination-port
//! construction.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{Display, Write as _};
use std::net::Ipv4Addr;

use crate::flow::TimeWindow;

/// Hypergraph with labeled edges. Distinct labels may share a support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph<V: Ord, E: Ord> {
    vertices: BTreeSet<V>,
    edges: BTreeMap<E, BTreeSet<V>>,
}

/// Vertices are client IPs, edges are server ports.
pub type FlowHypergraph = Hypergraph<Ipv4Addr, u16>;

impl<V: Ord + Clone, E: Ord + Clone> Default for Hypergraph<V, E> {
    fn default() -> Self {
        Self::new()
    }
}

impl<V: Ord + Clone, E: Ord + Clone> Hypergraph<V, E> {
    pub fn new() -> Self {
        Hypergraph {
            vertices: BTreeSet::new(),
            edges: BTreeMap::new(),
        }
    }

    /// Records that `vertex` belongs to edge `label`.
    pub fn add_incidence(&mut self, vertex: V, label: E) {
        self.vertices.insert(vertex.clone());
        self.edges.entry(label).or_default().insert(vertex);
    }

    /// Builds a hypergraph from `(label, support)` pairs. Empty supports are
    /// skipped since every edge must contain a vertex.
    pub fn from_edges<I, S>(edges: I) -> Self
    where
        I: IntoIterator<Item = (E, S)>,
        S: IntoIterator<Item = V>,
    {
        let mut h = Self::new();
        for (label, support) in edges {
            for v in support {
                h.add_incidence(v, label.clone());
            }
        }
        h
    }

    pub fn vertices(&self) -> &BTreeSet<V> {
        &self.vertices
    }

    /// Edges in ascending label order.
    pub fn edges(&self) -> &BTreeMap<E, BTreeSet<V>> {
        &self.edges
    }

    pub fn support(&self, label: &E) -> Option<&BTreeSet<V>> {
        self.edges.get(label)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Number of edges containing `v`.
    pub fn vertex_degree(&self, v: &V) -> usize {
        self.edges.values().filter(|s| s.contains(v)).count()
    }

    pub fn stats(&self) -> HypergraphStats {
        let mut degree: BTreeMap<&V, usize> = BTreeMap::new();
        for support in self.edges.values() {
            for v in support {
                *degree.entry(v).or_default() += 1;
            }
        }
        let sizes: Vec<usize> = self.edges.values().map(BTreeSet::len).collect();
        let mut multiplicity: BTreeMap<&BTreeSet<V>, usize> = BTreeMap::new();
        for support in self.edges.values() {
            *multiplicity.entry(support).or_default() += 1;
        }
        HypergraphStats {
            n_vertices: self.vertices.len(),
            n_edges: self.edges.len(),
            max_vertex_degree: degree.values().copied().max().unwrap_or(0),
            max_edge_size: sizes.iter().copied().max().unwrap_or(0),
            mean_edge_size: if sizes.is_empty() {
                0.0
            } else {
                sizes.iter().sum::<usize>() as f64 / sizes.len() as f64
            },
            max_support_multiplicity: multiplicity.values().copied().max().unwrap_or(0),
        }
    }
}

impl<V: Ord + Clone + Display, E: Ord + Clone + Display> Hypergraph<V, E> {
    /// One line per edge, `label: v1 v2 ...`, labels ascending and vertices in
    /// their natural order.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (label, support) in &self.edges {
            let _ = write!(out, "{label}:");
            for v in support {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HypergraphStats {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub max_vertex_degree: usize,
    pub max_edge_size: usize,
    pub mean_edge_size: f64,
    /// Largest number of distinct edge labels sharing one identical support.
    pub max_support_multiplicity: usize,
}

/// Hypergraph of a window: client IPs as vertices, one edge per server port
/// holding every client that contacted it.
pub fn build_hypergraph(w: &TimeWindow) -> FlowHypergraph {
    let mut h = FlowHypergraph::new();
    for s in &w.sessions {
        h.add_incidence(s.client_ip, s.server_port);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flow::SessionRecord;
    use proptest::prelude::*;

    fn ip(last: u8) -> Ipv4Addr {
        Ipv4Addr::new(10, 0, 0, last)
    }

    fn session(client: Ipv4Addr, port: u16) -> SessionRecord {
        SessionRecord {
            client_ip: client,
            server_ip: Ipv4Addr::new(10, 1, 0, 1),
            client_port: 50000,
            server_port: port,
            start: 0.0,
            end: 1.0,
            constituent_count: 1,
        }
    }

    fn window_of(sessions: Vec<SessionRecord>) -> TimeWindow {
        TimeWindow {
            start: 0.0,
            width: 300.0,
            sessions,
        }
    }

    fn scan_window() -> TimeWindow {
        let s = ip(1);
        let mut sessions: Vec<_> = (1..=5).map(|p| session(s, p)).collect();
        sessions.extend([session(s, 80), session(ip(2), 80), session(ip(3), 80)]);
        window_of(sessions)
    }

    #[test]
    fn three_session_example() {
        let w = window_of(vec![session(ip(1), 80), session(ip(2), 80), session(ip(1), 22)]);
        let h = build_hypergraph(&w);
        assert_eq!(h.vertices().iter().copied().collect::<Vec<_>>(), vec![ip(1), ip(2)]);
        assert_eq!(h.support(&80).unwrap().len(), 2);
        assert_eq!(h.support(&22).unwrap().iter().copied().collect::<Vec<_>>(), vec![ip(1)]);
        let st = h.stats();
        assert_eq!(st.n_vertices, 2);
        assert_eq!(st.n_edges, 2);
        assert_eq!(st.max_vertex_degree, 2);
        assert_eq!(st.max_edge_size, 2);
        assert_eq!(st.mean_edge_size, 1.5);
        assert_eq!(st.max_support_multiplicity, 1);
        assert_eq!(h.dump(), "22: 10.0.0.1\n80: 10.0.0.1 10.0.0.2\n");
    }

    #[test]
    fn scan_example() {
        let h = build_hypergraph(&scan_window());
        assert_eq!(h.n_edges(), 6);
        for p in 1..=5u16 {
            assert_eq!(h.support(&p).unwrap().len(), 1);
        }
        assert_eq!(h.support(&80).unwrap().len(), 3);
        assert_eq!(h.stats().max_support_multiplicity, 5);
    }

    #[test]
    fn empty_window() {
        let h = build_hypergraph(&window_of(vec![]));
        assert!(h.is_empty());
        assert_eq!(h.stats(), HypergraphStats::default());
        assert_eq!(h.dump(), "");
    }

    fn arb_sessions() -> impl Strategy<Value = Vec<(u8, u16)>> {
        prop::collection::vec((0u8..8, 0u16..6), 0..30)
    }

    proptest! {
        #[test]
        fn order_independent(pairs in arb_sessions(), seed in any::<u64>()) {
            let sessions: Vec<_> = pairs.iter().map(|&(i, p)| session(ip(i), p)).collect();
            let mut shuffled = sessions.clone();
            // deterministic permutation from the seed
            let n = shuffled.len();
            if n > 1 {
                let mut s = seed;
                for i in (1..n).rev() {
                    s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    shuffled.swap(i, (s >> 33) as usize % (i + 1));
                }
            }
            prop_assert_eq!(build_hypergraph(&window_of(sessions)), build_hypergraph(&window_of(shuffled)));
        }

        #[test]
        fn incidence_double_count(pairs in arb_sessions()) {
            let sessions: Vec<_> = pairs.iter().map(|&(i, p)| session(ip(i), p)).collect();
            let h = build_hypergraph(&window_of(sessions));
            let by_vertex: usize = h.vertices().iter().map(|v| h.vertex_degree(v)).sum();
            let by_edge: usize = h.edges().values().map(|s| s.len()).sum();
            prop_assert_eq!(by_vertex, by_edge);
            for support in h.edges().values() {
                prop_assert!(!support.is_empty());
                prop_assert!(support.is_subset(h.vertices()));
            }
            let st = h.stats();
            prop_assert!(st.mean_edge_size <= st.max_edge_size as f64);
        }

        #[test]
        fn adding_a_session_never_decreases_counts(pairs in arb_sessions(), extra in (0u8..8, 0u16..6)) {
            let mut sessions: Vec<_> = pairs.iter().map(|&(i, p)| session(ip(i), p)).collect();
            let before = build_hypergraph(&window_of(sessions.clone())).stats();
            sessions.push(session(ip(extra.0), extra.1));
            let after = build_hypergraph(&window_of(sessions)).stats();
            prop_assert!(after.n_vertices >= before.n_vertices);
            prop_assert!(after.n_edges >= before.n_edges);
            prop_assert!(after.max_vertex_degree >= before.max_vertex_degree);
            prop_assert!(after.max_edge_size >= before.max_edge_size);
        }
    }
}
