//! Clustering statistics, in batch form and maintained incrementally under
//! edge toggles.
//!
//! Both paths reduce to the same integer counters (per-vertex triangles and
//! degrees) and the same final floating-point reduction, so incremental and
//! batch values agree bit for bit. Statistics are defined for undirected graphs.

use std::collections::BTreeMap;
use std::io::Write;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::interpolate::Trace;

#[derive(Debug, Clone, PartialEq)]
pub struct StatRow {
    pub step: u64,
    pub distance: u64,
    pub edges: usize,
    pub mean_cc: f64,
    pub global_cc: f64,
    pub extra: BTreeMap<String, f64>,
}

pub const STAT_HEADER: [&str; 5] = ["step", "d", "edges", "mean_cc", "global_cc"];

fn pairs(k: u64) -> u64 {
    k * k.saturating_sub(1) / 2
}

/// Triangles through each vertex.
pub fn vertex_triangles(g: &Graph) -> Vec<u64> {
    (0..g.n())
        .map(|v| {
            let nb = g.neighbors(v);
            let mut t = 0;
            for (i, &a) in nb.iter().enumerate() {
                for &b in &nb[i + 1..] {
                    if g.has_edge(a, b) {
                        t += 1;
                    }
                }
            }
            t
        })
        .collect()
}

/// Connected neighbor pairs over all neighbor pairs; 0 for degree below 2.
pub fn local_clustering(g: &Graph, v: usize) -> f64 {
    let nb = g.neighbors(v);
    let possible = pairs(nb.len() as u64);
    if possible == 0 {
        return 0.0;
    }
    let mut closed = 0u64;
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            if g.has_edge(a, b) {
                closed += 1;
            }
        }
    }
    closed as f64 / possible as f64
}

fn mean_from_counts(triangles: &[u64], degrees: impl Iterator<Item = u64>) -> f64 {
    if triangles.is_empty() {
        return 0.0;
    }
    let sum: f64 = triangles
        .iter()
        .zip(degrees)
        .map(|(&t, d)| {
            let p = pairs(d);
            if p == 0 {
                0.0
            } else {
                t as f64 / p as f64
            }
        })
        .sum();
    sum / triangles.len() as f64
}

fn global_from_counts(closed_wedges: u64, wedges: u64) -> f64 {
    if wedges == 0 {
        0.0
    } else {
        closed_wedges as f64 / wedges as f64
    }
}

/// Mean of the local clustering coefficients over all vertices.
pub fn mean_clustering(g: &Graph) -> f64 {
    mean_from_counts(
        &vertex_triangles(g),
        (0..g.n()).map(|v| g.degree(v) as u64),
    )
}

/// `3 * triangles / wedges`, 0 when there are no wedges.
pub fn global_clustering(g: &Graph) -> f64 {
    let closed: u64 = vertex_triangles(g).iter().sum();
    let wedges: u64 = (0..g.n()).map(|v| pairs(g.degree(v) as u64)).sum();
    global_from_counts(closed, wedges)
}

/// A graph together with exact triangle and wedge counters.
#[derive(Debug, Clone)]
pub struct ClusteringTracker {
    graph: Graph,
    triangles: Vec<u64>,
    total_triangles: u64,
    wedges: u64,
}

impl ClusteringTracker {
    pub fn new(graph: Graph) -> Result<Self> {
        if graph.is_directed() {
            return Err(Error::InvalidParameter(
                "clustering statistics need an undirected graph".into(),
            ));
        }
        let triangles = vertex_triangles(&graph);
        let total_triangles = triangles.iter().sum::<u64>() / 3;
        let wedges = (0..graph.n()).map(|v| pairs(graph.degree(v) as u64)).sum();
        Ok(ClusteringTracker {
            graph,
            triangles,
            total_triangles,
            wedges,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn triangles(&self) -> u64 {
        self.total_triangles
    }

    pub fn vertex_triangles(&self) -> &[u64] {
        &self.triangles
    }

    pub fn wedges(&self) -> u64 {
        self.wedges
    }

    fn common_neighbors(&self, u: usize, v: usize) -> Vec<usize> {
        let (a, b) = if self.graph.degree(u) <= self.graph.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        self.graph
            .neighbors(a)
            .iter()
            .copied()
            .filter(|&w| w != b && self.graph.has_edge(w, b))
            .collect()
    }

    /// Toggles `(u, v)`, updating counters in `O(min degree)`. Returns whether
    /// the edge is present afterwards.
    pub fn toggle(&mut self, u: usize, v: usize) -> Result<bool> {
        let present = self.graph.has_edge(u, v);
        let common = self.common_neighbors(u, v);
        let c = common.len() as u64;
        let (du, dv) = (self.graph.degree(u) as u64, self.graph.degree(v) as u64);
        if present {
            for &w in &common {
                self.triangles[w] -= 1;
            }
            self.triangles[u] -= c;
            self.triangles[v] -= c;
            self.total_triangles -= c;
            self.wedges -= (du - 1) + (dv - 1);
        } else {
            for &w in &common {
                self.triangles[w] += 1;
            }
            self.triangles[u] += c;
            self.triangles[v] += c;
            self.total_triangles += c;
            self.wedges += du + dv;
        }
        self.graph.toggle_edge(u, v)
    }

    pub fn add_vertex(&mut self) -> usize {
        self.triangles.push(0);
        self.graph.add_vertex()
    }

    pub fn mean_clustering(&self) -> f64 {
        mean_from_counts(
            &self.triangles,
            (0..self.graph.n()).map(|v| self.graph.degree(v) as u64),
        )
    }

    pub fn global_clustering(&self) -> f64 {
        global_from_counts(3 * self.total_triangles, self.wedges)
    }

    pub fn row(&self, step: u64, distance: u64) -> StatRow {
        StatRow {
            step,
            distance,
            edges: self.graph.edge_count(),
            mean_cc: self.mean_clustering(),
            global_cc: self.global_clustering(),
            extra: BTreeMap::new(),
        }
    }
}

/// Batch statistics row for a graph.
pub fn stat_row(g: &Graph, step: u64, distance: u64) -> StatRow {
    StatRow {
        step,
        distance,
        edges: g.edge_count(),
        mean_cc: mean_clustering(g),
        global_cc: global_clustering(g),
        extra: BTreeMap::new(),
    }
}

/// Replays `trace` from `start`, emitting a row for the start graph, every
/// `every`-th step, and the final step.
pub fn stats_along_trace(start: &Graph, trace: &Trace, every: u64) -> Result<Vec<StatRow>> {
    if start.n() != trace.n || start.is_directed() != trace.directed {
        return Err(Error::ReplayMismatch {
            step: 0,
            reason: "start graph shape differs from the trace header".into(),
        });
    }
    let every = every.max(1);
    let mut tracker = ClusteringTracker::new(start.clone())?;
    let mut rows = vec![tracker.row(0, trace.initial_distance)];
    let last = trace.steps.len();
    for (i, step) in trace.steps.iter().enumerate() {
        let (u, v) = step.mv.edge;
        if tracker.toggle(u, v)? != step.expected_presence_after() {
            return Err(Error::ReplayMismatch {
                step: i,
                reason: format!("edge ({u}, {v}) was not in the expected state"),
            });
        }
        let taken = i as u64 + 1;
        if taken % every == 0 || i + 1 == last {
            rows.push(tracker.row(taken, step.distance));
        }
    }
    Ok(rows)
}

/// Writes rows as CSV with header `step,d,edges,mean_cc,global_cc` plus any
/// `extra` keys found on the first row.
pub fn write_stats_csv<W: Write>(out: W, rows: &[StatRow]) -> Result<()> {
    let extra_keys: Vec<String> = rows
        .first()
        .map(|r| r.extra.keys().cloned().collect())
        .unwrap_or_default();
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = STAT_HEADER.iter().map(|s| s.to_string()).collect();
    header.extend(extra_keys.iter().cloned());
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![
            r.step.to_string(),
            r.distance.to_string(),
            r.edges.to_string(),
            r.mean_cc.to_string(),
            r.global_cc.to_string(),
        ];
        for k in &extra_keys {
            rec.push(r.extra.get(k).map_or_else(String::new, |x| x.to_string()));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::erdos_renyi;
    use crate::interpolate::{interpolate, InterpolationConfig, StopMode};

    fn k4_minus_edge() -> Graph {
        let mut g = Graph::complete(4);
        g.remove_edge(0, 1).unwrap();
        g
    }

    /// Enumerates neighbor pairs of each vertex directly from the edge set.
    fn brute_local(g: &Graph, v: usize) -> f64 {
        let nb: Vec<usize> = (0..g.n()).filter(|&w| w != v && g.has_edge(v, w)).collect();
        if nb.len() < 2 {
            return 0.0;
        }
        let mut closed = 0;
        let mut total = 0;
        for a in 0..nb.len() {
            for b in (a + 1)..nb.len() {
                total += 1;
                if g.has_edge(nb[a], nb[b]) {
                    closed += 1;
                }
            }
        }
        closed as f64 / total as f64
    }

    #[test]
    fn local_examples() {
        let star = Graph::from_edges(5, false, (1..5).map(|v| (0, v))).unwrap();
        assert_eq!(local_clustering(&star, 0), 0.0);
        assert_eq!(local_clustering(&star, 3), 0.0);
        let tri = Graph::complete(3);
        for v in 0..3 {
            assert_eq!(local_clustering(&tri, v), 1.0);
        }
    }

    #[test]
    fn mean_examples() {
        assert_eq!(mean_clustering(&Graph::complete(3)), 1.0);
        let tri_plus = Graph::from_edges(4, false, [(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(mean_clustering(&tri_plus), 0.75);
        let g = k4_minus_edge();
        let oracle = (0..4).map(|v| brute_local(&g, v)).sum::<f64>() / 4.0;
        assert!((mean_clustering(&g) - oracle).abs() < 1e-15);
        // vertices 0 and 1: 1 of 1 pair; vertices 2 and 3: 2 of 3 pairs
        assert!((oracle - (1.0 + 1.0 + 2.0 / 3.0 + 2.0 / 3.0) / 4.0).abs() < 1e-15);
    }

    #[test]
    fn global_examples() {
        let p3 = Graph::from_edges(3, false, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(global_clustering(&p3), 0.0);
        assert_eq!(global_clustering(&Graph::complete(3)), 1.0);
        assert_eq!(global_clustering(&k4_minus_edge()), 0.75);
        assert_eq!(global_clustering(&Graph::undirected(4)), 0.0);
    }

    #[test]
    fn global_is_relabeling_invariant() {
        let g = erdos_renyi(30, 0.3, 3);
        let perm: Vec<usize> = (0..30).map(|v| (v * 7 + 3) % 30).collect();
        let h = Graph::from_edges(30, false, g.edges().map(|&(u, v)| (perm[u], perm[v]))).unwrap();
        assert_eq!(global_clustering(&g), global_clustering(&h));
    }

    #[test]
    fn trace_stats_edge_cases() {
        let g = erdos_renyi(12, 0.4, 1);
        let t = interpolate(&g, &g, &InterpolationConfig::default()).unwrap();
        let rows = stats_along_trace(&g, &t, 1).unwrap();
        assert_eq!(rows, vec![stat_row(&g, 0, 0)]);

        let mut h = g.clone();
        let missing = (0..12)
            .flat_map(|u| ((u + 1)..12).map(move |v| (u, v)))
            .find(|&(u, v)| !g.has_edge(u, v))
            .unwrap();
        h.add_edge(missing.0, missing.1).unwrap();
        let t = interpolate(&g, &h, &InterpolationConfig::exact(0.01, 2)).unwrap();
        assert_eq!(t.len(), 1);
        let rows = stats_along_trace(&g, &t, 1).unwrap();
        assert_eq!(rows.last().unwrap(), &stat_row(&h, 1, 0));
    }

    #[test]
    fn incremental_equals_batch() {
        let a = erdos_renyi(50, 0.2, 1);
        let b = erdos_renyi(50, 0.2, 2);
        let cfg = InterpolationConfig {
            rate: 50.0,
            target_distance: 100,
            stop: StopMode::FixedSteps(10_000),
            seed: 3,
            ..Default::default()
        };
        let trace = interpolate(&a, &b, &cfg).unwrap();
        let rows = stats_along_trace(&a, &trace, 97).unwrap();
        assert_eq!(rows.len(), 2 + 10_000 / 97);
        let mut g = a.clone();
        let mut checked = 0;
        trace
            .replay_with(&mut g, |i, g, _| {
                let taken = i as u64 + 1;
                if let Some(row) = rows.iter().find(|r| r.step == taken) {
                    assert_eq!(row, &stat_row(g, taken, row.distance));
                    checked += 1;
                }
            })
            .unwrap();
        assert_eq!(checked, rows.len() - 1);
    }

    #[test]
    fn replay_mismatch_is_reported() {
        let a = erdos_renyi(10, 0.5, 1);
        let b = erdos_renyi(10, 0.5, 2);
        let trace = interpolate(&a, &b, &InterpolationConfig::exact(1.0, 0)).unwrap();
        let err = stats_along_trace(&b, &trace, 1);
        assert!(matches!(err, Err(Error::ReplayMismatch { .. })));
    }

    #[test]
    fn csv_header() {
        let rows = vec![stat_row(&Graph::complete(3), 0, 2)];
        let mut buf = Vec::new();
        write_stats_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "step,d,edges,mean_cc,global_cc\n0,2,3,1,1\n");
    }
}
