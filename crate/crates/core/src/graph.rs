//! Simple graphs over a dense vertex set `0..n`.

use std::collections::HashSet;

use crate::error::{Error, Result};

/// A vertex pair. Undirected edges are always stored with the smaller index first.
pub type Edge = (usize, usize);

/// Simple graph (no self-loops, no multi-edges) on vertices `0..n`.
///
/// `adjacency` holds out-neighbors for directed graphs and all neighbors for
/// undirected ones; it is kept in sync with `edges` by every mutation.
#[derive(Debug, Clone)]
pub struct Graph {
    n: usize,
    directed: bool,
    edges: HashSet<Edge>,
    adjacency: Vec<Vec<usize>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.directed == other.directed && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl Graph {
    pub fn new(n: usize, directed: bool) -> Self {
        Graph {
            n,
            directed,
            edges: HashSet::new(),
            adjacency: vec![Vec::new(); n],
        }
    }

    pub fn undirected(n: usize) -> Self {
        Self::new(n, false)
    }

    /// Builds a graph from an edge list; duplicates collapse.
    pub fn from_edges<I>(n: usize, directed: bool, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = Edge>,
    {
        let mut g = Self::new(n, directed);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::undirected(n);
        for u in 0..n {
            for v in (u + 1)..n {
                g.insert_canonical((u, v));
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Canonical form of a pair, validating bounds and rejecting self-loops.
    pub fn canonical(&self, u: usize, v: usize) -> Result<Edge> {
        if u >= self.n || v >= self.n {
            return Err(Error::VertexOutOfRange {
                vertex: u.max(v),
                n: self.n,
            });
        }
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        Ok(if self.directed || u < v { (u, v) } else { (v, u) })
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let e = if self.directed || u < v { (u, v) } else { (v, u) };
        self.edges.contains(&e)
    }

    /// Adds an edge; returns `false` if it was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        let e = self.canonical(u, v)?;
        Ok(self.insert_canonical(e))
    }

    /// Removes an edge; returns `false` if it was absent.
    pub fn remove_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        let e = self.canonical(u, v)?;
        Ok(self.remove_canonical(e))
    }

    /// Flips the presence of an edge. Returns `true` if the edge is present afterwards.
    pub fn toggle_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        let e = self.canonical(u, v)?;
        if self.remove_canonical(e) {
            Ok(false)
        } else {
            self.insert_canonical(e);
            Ok(true)
        }
    }

    /// Appends an isolated vertex and returns its index.
    pub fn add_vertex(&mut self) -> usize {
        self.adjacency.push(Vec::new());
        self.n += 1;
        self.n - 1
    }

    pub(crate) fn insert_canonical(&mut self, e: Edge) -> bool {
        if !self.edges.insert(e) {
            return false;
        }
        self.adjacency[e.0].push(e.1);
        if !self.directed {
            self.adjacency[e.1].push(e.0);
        }
        true
    }

    pub(crate) fn remove_canonical(&mut self, e: Edge) -> bool {
        if !self.edges.remove(&e) {
            return false;
        }
        detach(&mut self.adjacency[e.0], e.1);
        if !self.directed {
            detach(&mut self.adjacency[e.1], e.0);
        }
        true
    }

    pub fn contains(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    /// Unordered iteration over the canonical edges.
    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter()
    }

    /// Canonical edges in lexicographic order.
    pub fn sorted_edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self.edges.iter().copied().collect();
        out.sort_unstable();
        out
    }

    pub fn edge_set(&self) -> &HashSet<Edge> {
        &self.edges
    }

    /// Number of possible edge slots: `n(n-1)/2`, or `n(n-1)` when directed.
    pub fn max_edit_distance(&self) -> u64 {
        max_edit_distance(self.n, self.directed)
    }

    pub fn check_compatible(&self, other: &Graph) -> Result<()> {
        if self.n != other.n || self.directed != other.directed {
            return Err(Error::Incompatible {
                left: (self.n, self.directed),
                right: (other.n, other.directed),
            });
        }
        Ok(())
    }
}

fn detach(list: &mut Vec<usize>, v: usize) {
    if let Some(pos) = list.iter().position(|&w| w == v) {
        list.swap_remove(pos);
    }
}

/// Largest possible edit distance between two graphs on `n` vertices.
pub fn max_edit_distance(n: usize, directed: bool) -> u64 {
    let n = n as u64;
    let ordered = n * n.saturating_sub(1);
    if directed {
        ordered
    } else {
        ordered / 2
    }
}

/// Number of edge edits separating `g` and `h`: the size of the symmetric
/// difference of their edge sets.
pub fn edit_distance(g: &Graph, h: &Graph) -> Result<u64> {
    g.check_compatible(h)?;
    let (small, large) = if g.edge_count() <= h.edge_count() {
        (g, h)
    } else {
        (h, g)
    };
    let shared = small.edges().filter(|e| large.contains(e)).count();
    Ok((g.edge_count() + h.edge_count() - 2 * shared) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn path3() -> Graph {
        Graph::from_edges(3, false, [(0, 1), (1, 2)]).unwrap()
    }

    #[test]
    fn edit_distance_examples() {
        let g = path3();
        assert_eq!(edit_distance(&g, &g).unwrap(), 0);
        assert_eq!(
            edit_distance(&Graph::undirected(5), &Graph::complete(5)).unwrap(),
            10
        );
        assert_eq!(edit_distance(&g, &Graph::complete(3)).unwrap(), 1);
    }

    #[test]
    fn edit_distance_rejects_mismatch() {
        let err = edit_distance(&Graph::undirected(3), &Graph::undirected(4));
        assert!(matches!(err, Err(Error::Incompatible { .. })));
        let err = edit_distance(&Graph::new(3, true), &Graph::undirected(3));
        assert!(matches!(err, Err(Error::Incompatible { .. })));
    }

    #[test]
    fn toggle_examples() {
        let mut g = path3();
        let orig = g.clone();
        assert!(g.toggle_edge(0, 2).unwrap());
        assert_eq!(g.edge_count(), 3);
        assert!(!g.toggle_edge(2, 0).unwrap());
        assert_eq!(g, orig);
        g.toggle_edge(1, 0).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!(matches!(g.toggle_edge(1, 1), Err(Error::SelfLoop(1))));
        assert!(g.toggle_edge(0, 3).is_err());
    }

    #[test]
    fn max_edit_distance_examples() {
        assert_eq!(max_edit_distance(50, false), 1225);
        assert_eq!(max_edit_distance(2, false), 1);
        assert_eq!(max_edit_distance(3, true), 6);
    }

    #[test]
    fn directed_edges_are_ordered() {
        let mut g = Graph::new(3, true);
        g.add_edge(1, 0).unwrap();
        assert!(g.has_edge(1, 0));
        assert!(!g.has_edge(0, 1));
        g.add_edge(0, 1).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.neighbors(0), &[1]);
    }

    fn arb_graph(n: usize) -> impl Strategy<Value = Graph> {
        let slots = (n * (n - 1)) / 2;
        proptest::collection::vec(any::<bool>(), slots).prop_map(move |bits| {
            let mut g = Graph::undirected(n);
            let mut i = 0;
            for u in 0..n {
                for v in (u + 1)..n {
                    if bits[i] {
                        g.add_edge(u, v).unwrap();
                    }
                    i += 1;
                }
            }
            g
        })
    }

    fn degree_sum(g: &Graph) -> usize {
        (0..g.n()).map(|v| g.degree(v)).sum()
    }

    proptest! {
        #[test]
        fn edit_distance_is_a_metric(a in arb_graph(6), b in arb_graph(6), c in arb_graph(6)) {
            let ab = edit_distance(&a, &b).unwrap();
            prop_assert_eq!(ab, edit_distance(&b, &a).unwrap());
            prop_assert_eq!(edit_distance(&a, &a).unwrap(), 0);
            prop_assert!(ab > 0 || a == b);
            let ac = edit_distance(&a, &c).unwrap();
            let cb = edit_distance(&c, &b).unwrap();
            prop_assert!(ab <= ac + cb);
        }

        #[test]
        fn toggle_moves_distance_by_one(a in arb_graph(6), h in arb_graph(6), u in 0usize..6, v in 0usize..6) {
            prop_assume!(u != v);
            let before = edit_distance(&a, &h).unwrap();
            let mut g = a.clone();
            g.toggle_edge(u, v).unwrap();
            let after = edit_distance(&g, &h).unwrap();
            prop_assert_eq!(before.abs_diff(after), 1);
            prop_assert_eq!(degree_sum(&g), 2 * g.edge_count());
        }
    }
}
