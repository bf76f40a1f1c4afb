use std::collections::BTreeSet;

use super::complex::{Simplex, SimplicialComplex};
use crate::hypergraph::Hypergraph;

/// Edge-containment order: one node per hyperedge label, an arc `(e, f)` when
/// the support of `e` is a proper subset of the support of `f`.
///
/// Arcs are node-index pairs. Nodes are in ascending label order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ecp<E> {
    labels: Vec<E>,
    support_sizes: Vec<usize>,
    arcs: BTreeSet<(usize, usize)>,
}

impl<E: Clone> Ecp<E> {
    /// Builds an order directly from arcs. Returns `None` if an arc is a
    /// self-loop, points outside the node range, or closes a cycle.
    pub fn from_arcs<I>(labels: Vec<E>, arcs: I) -> Option<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let n = labels.len();
        let arcs: BTreeSet<(usize, usize)> = arcs.into_iter().collect();
        if arcs.iter().any(|&(a, b)| a == b || a >= n || b >= n) {
            return None;
        }
        let ecp = Ecp {
            support_sizes: vec![0; n],
            labels,
            arcs,
        };
        ecp.topological_order().map(|_| ecp)
    }

    pub fn labels(&self) -> &[E] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn arcs(&self) -> &BTreeSet<(usize, usize)> {
        &self.arcs
    }

    /// Support size of each node; zeros when built with [`Ecp::from_arcs`].
    pub fn support_sizes(&self) -> &[usize] {
        &self.support_sizes
    }

    /// Number of edges contained in node `i`.
    pub fn in_degree(&self, i: usize) -> usize {
        self.arcs.iter().filter(|&&(_, b)| b == i).count()
    }

    /// Number of edges containing node `i`.
    pub fn out_degree(&self, i: usize) -> usize {
        self.arcs.iter().filter(|&&(a, _)| a == i).count()
    }

    fn degrees(&self) -> (Vec<usize>, Vec<usize>) {
        let mut ins = vec![0; self.len()];
        let mut outs = vec![0; self.len()];
        for &(a, b) in &self.arcs {
            outs[a] += 1;
            ins[b] += 1;
        }
        (ins, outs)
    }

    pub fn max_in_degree(&self) -> usize {
        self.degrees().0.into_iter().max().unwrap_or(0)
    }

    pub fn max_out_degree(&self) -> usize {
        self.degrees().1.into_iter().max().unwrap_or(0)
    }

    fn successors(&self) -> Vec<Vec<usize>> {
        let mut succ = vec![Vec::new(); self.len()];
        for &(a, b) in &self.arcs {
            succ[a].push(b);
        }
        succ
    }

    /// Kahn's algorithm; `None` on a cycle.
    fn topological_order(&self) -> Option<Vec<usize>> {
        let succ = self.successors();
        let (mut indeg, _) = self.degrees();
        let mut ready: Vec<usize> = (0..self.len()).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(self.len());
        while let Some(i) = ready.pop() {
            order.push(i);
            for &j in &succ[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.push(j);
                }
            }
        }
        (order.len() == self.len()).then_some(order)
    }

    /// Strict successors of each node under the transitive closure.
    fn reachability(&self) -> Vec<BTreeSet<usize>> {
        let succ = self.successors();
        let order = self
            .topological_order()
            .expect("ECP arcs must be acyclic");
        let mut reach: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); self.len()];
        for &i in order.iter().rev() {
            let mut r = BTreeSet::new();
            for &j in &succ[i] {
                r.insert(j);
                r.extend(reach[j].iter().copied());
            }
            reach[i] = r;
        }
        reach
    }
}

/// Proper-containment order on the edges of `h`. Edges with identical
/// supports are incomparable.
pub fn build_ecp<V: Ord + Clone, E: Ord + Clone>(h: &Hypergraph<V, E>) -> Ecp<E> {
    let (labels, supports): (Vec<E>, Vec<_>) =
        h.edges().iter().map(|(l, s)| (l.clone(), s)).unzip();
    let mut arcs = BTreeSet::new();
    for (i, a) in supports.iter().enumerate() {
        for (j, b) in supports.iter().enumerate() {
            if a.len() < b.len() && a.is_subset(b) {
                arcs.insert((i, j));
            }
        }
    }
    Ecp {
        support_sizes: supports.iter().map(|s| s.len()).collect(),
        labels,
        arcs,
    }
}

/// Same nodes, arcs replaced by their transitive closure.
pub fn transitive_closure<E: Clone>(ecp: &Ecp<E>) -> Ecp<E> {
    let reach = ecp.reachability();
    let arcs = reach
        .iter()
        .enumerate()
        .flat_map(|(i, r)| r.iter().map(move |&j| (i, j)))
        .collect();
    Ecp {
        labels: ecp.labels.clone(),
        support_sizes: ecp.support_sizes.clone(),
        arcs,
    }
}

/// Transitive reduction: an arc of the closure survives iff no node lies
/// strictly between its endpoints.
pub fn hasse<E: Clone>(ecp: &Ecp<E>) -> Ecp<E> {
    let reach = ecp.reachability();
    let mut arcs = BTreeSet::new();
    for (e, above) in reach.iter().enumerate() {
        for &f in above {
            let covered = above.iter().any(|&g| g != f && reach[g].contains(&f));
            if !covered {
                arcs.insert((e, f));
            }
        }
    }
    Ecp {
        labels: ecp.labels.clone(),
        support_sizes: ecp.support_sizes.clone(),
        arcs,
    }
}

/// Order complex: one k-simplex per chain `e0 < e1 < ... < ek`.
pub fn order_complex<E: Clone>(ecp: &Ecp<E>) -> SimplicialComplex {
    order_complex_skeleton(ecp, usize::MAX)
}

/// Order complex truncated to chains of at most `max_dim + 1` nodes.
pub fn order_complex_skeleton<E: Clone>(ecp: &Ecp<E>, max_dim: usize) -> SimplicialComplex {
    let reach = ecp.reachability();
    let mut chains: BTreeSet<Simplex> = BTreeSet::new();
    let mut stack: Vec<usize> = Vec::new();
    for start in 0..ecp.len() {
        stack.push(start);
        extend_chains(&reach, &mut stack, max_dim, &mut chains);
        stack.pop();
    }
    SimplicialComplex::from_sorted_set(chains)
}

fn extend_chains(
    reach: &[BTreeSet<usize>],
    chain: &mut Vec<usize>,
    max_dim: usize,
    out: &mut BTreeSet<Simplex>,
) {
    let mut s = chain.clone();
    s.sort_unstable();
    out.insert(s);
    if chain.len() > max_dim {
        return;
    }
    let top = *chain.last().unwrap();
    for &next in &reach[top] {
        chain.push(next);
        extend_chains(reach, chain, max_dim, out);
        chain.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::betti;

    fn letters(edges: &[(&'static str, &[char])]) -> Hypergraph<char, &'static str> {
        Hypergraph::from_edges(edges.iter().map(|(l, s)| (*l, s.iter().copied())))
    }

    #[test]
    fn nested_chain() {
        let h = letters(&[("x", &['a']), ("y", &['a', 'b']), ("z", &['a', 'b', 'c'])]);
        let ecp = build_ecp(&h);
        assert_eq!(ecp.labels(), &["x", "y", "z"]);
        assert_eq!(
            ecp.arcs().iter().copied().collect::<Vec<_>>(),
            vec![(0, 1), (0, 2), (1, 2)]
        );
        let k = order_complex(&ecp);
        assert_eq!(k.counts(), vec![3, 3, 1]);
        let h2 = hasse(&ecp);
        assert_eq!(h2.arcs().iter().copied().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn scan_in_degree() {
        let mut edges: Vec<(u16, Vec<char>)> = (1..=5).map(|p| (p, vec!['s'])).collect();
        edges.push((80, vec!['s', 'x', 'y']));
        let h = Hypergraph::from_edges(edges);
        let ecp = build_ecp(&h);
        let e80 = ecp.labels().iter().position(|&l| l == 80).unwrap();
        assert_eq!(ecp.in_degree(e80), 5);
        assert_eq!(ecp.max_in_degree(), 5);
        assert_eq!(ecp.max_out_degree(), 1);
        assert_eq!(ecp.arcs().len(), 5);
    }

    #[test]
    fn antichain() {
        let h = letters(&[("x", &['a']), ("y", &['b']), ("z", &['c', 'd'])]);
        let ecp = build_ecp(&h);
        assert!(ecp.arcs().is_empty());
        assert_eq!(hasse(&ecp), ecp);
        let k = order_complex(&ecp);
        assert_eq!(k.counts(), vec![3]);
        assert_eq!(betti(&k, 0).betti, vec![3]);
    }

    #[test]
    fn equal_supports_are_incomparable() {
        let h = letters(&[("x", &['a', 'b']), ("y", &['a', 'b'])]);
        assert!(build_ecp(&h).arcs().is_empty());
    }

    #[test]
    fn shortcut_removed() {
        let ecp = Ecp::from_arcs(vec!['a', 'b', 'c'], [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(
            hasse(&ecp).arcs().iter().copied().collect::<Vec<_>>(),
            vec![(0, 1), (1, 2)]
        );
    }

    #[test]
    fn from_arcs_rejects_cycles() {
        assert!(Ecp::from_arcs(vec![0, 1], [(0, 1), (1, 0)]).is_none());
        assert!(Ecp::from_arcs(vec![0], [(0, 0)]).is_none());
        assert!(Ecp::from_arcs(vec![0], [(0, 3)]).is_none());
    }

    #[test]
    fn skeleton_truncates() {
        let ecp = Ecp::from_arcs(vec![0, 1, 2, 3], [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(order_complex(&ecp).counts(), vec![4, 6, 4, 1]);
        assert_eq!(order_complex_skeleton(&ecp, 1).counts(), vec![4, 6]);
    }
}
