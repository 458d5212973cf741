//! Random graph generators and growth-model baselines.

use std::collections::BTreeSet;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};
use crate::interpolate::{rng_from_seed, trial_seed};
use crate::stats::{ClusteringTracker, StatRow};

/// Each pair independently present with probability `p`.
pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Graph {
    let mut rng = rng_from_seed(seed);
    let mut g = Graph::undirected(n);
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < p {
                g.insert_canonical((u, v));
            }
        }
    }
    g
}

/// Uniform random simple graph with exactly `m` edges, by rejection; meant
/// for sparse graphs where `m` is well below the number of pairs.
pub fn random_edges(n: usize, m: usize, seed: u64) -> Result<Graph> {
    let pairs = crate::graph::max_edit_distance(n, false);
    if m as u64 > pairs {
        return Err(Error::InvalidParameter(format!("{m} edges do not fit on {n} vertices")));
    }
    let mut rng = rng_from_seed(seed);
    let mut g = Graph::undirected(n);
    if 2 * m as u64 > pairs {
        // dense: pick slots directly
        for slot in index::sample(&mut rng, pairs as usize, m) {
            g.insert_canonical(crate::ledger::edge_of(slot as u64, n, false));
        }
        return Ok(g);
    }
    while g.edge_count() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v {
            g.add_edge(u, v)?;
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SbmSpec {
    pub block_sizes: Vec<usize>,
    pub p: f64,
    pub q: f64,
}

impl SbmSpec {
    pub fn new(block_sizes: Vec<usize>, p: f64, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) || !(0.0..=1.0).contains(&q) || q > p {
            return Err(Error::InvalidParameter(format!(
                "need 0 <= q <= p <= 1, got p={p} q={q}"
            )));
        }
        Ok(SbmSpec { block_sizes, p, q })
    }

    pub fn n(&self) -> usize {
        self.block_sizes.iter().sum()
    }

    /// Contiguous block labels: the first `block_sizes[0]` vertices get label 0, etc.
    pub fn labels(&self) -> Vec<usize> {
        self.block_sizes
            .iter()
            .enumerate()
            .flat_map(|(b, &size)| std::iter::repeat(b).take(size))
            .collect()
    }
}

/// Stochastic block model with contiguous blocks; returns the graph and planted labels.
pub fn sbm(spec: &SbmSpec, seed: u64) -> (Graph, Vec<usize>) {
    let labels = spec.labels();
    (planted_partition(&labels, spec.p, spec.q, seed), labels)
}

/// Block model over arbitrary vertex labels: pairs with equal labels connect
/// with probability `p`, others with `q`.
pub fn planted_partition(labels: &[usize], p: f64, q: f64, seed: u64) -> Graph {
    let n = labels.len();
    let mut rng = rng_from_seed(seed);
    let mut g = Graph::undirected(n);
    for u in 0..n {
        for v in (u + 1)..n {
            let prob = if labels[u] == labels[v] { p } else { q };
            if rng.gen::<f64>() < prob {
                g.insert_canonical((u, v));
            }
        }
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthModel {
    /// Each new node links to `m` distinct existing nodes chosen uniformly.
    Uniform { m: usize },
    /// Each new node links to `m` degree-proportional draws, duplicates collapsed.
    Preferential { m: usize },
    /// Random-parent plus friend-of-friend growth: `m_r` random parents linked with probability
    /// `p_r`, then `m_n` of their neighbors linked with probability `p_n`.
    TriangleClosing {
        m_r: usize,
        p_r: f64,
        m_n: usize,
        p_n: f64,
    },
}

impl GrowthModel {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            GrowthModel::Uniform { m } | GrowthModel::Preferential { m } => m >= 1,
            GrowthModel::TriangleClosing { m_r, p_r, p_n, .. } => {
                m_r >= 1 && (0.0..=1.0).contains(&p_r) && (0.0..=1.0).contains(&p_n)
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid growth model {self:?}")))
        }
    }

    /// Size of the clique the model conventionally starts from.
    pub fn start_clique_size(&self) -> usize {
        match *self {
            GrowthModel::Uniform { m } | GrowthModel::Preferential { m } => m,
            GrowthModel::TriangleClosing { m_r, m_n, .. } => m_r + m_n + 1,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GrowthModel::Uniform { .. } => "uniform",
            GrowthModel::Preferential { .. } => "preferential",
            GrowthModel::TriangleClosing { .. } => "triangle_closing",
        }
    }
}

/// Picks the nodes a new node attaches to, among existing nodes `0..existing`.
pub fn choose_attachments<R: Rng + ?Sized>(
    g: &Graph,
    existing: usize,
    model: &GrowthModel,
    rng: &mut R,
) -> Vec<usize> {
    if existing == 0 {
        return Vec::new();
    }
    match *model {
        GrowthModel::Uniform { m } => {
            let mut picked = index::sample(rng, existing, m.min(existing)).into_vec();
            picked.sort_unstable();
            picked
        }
        GrowthModel::Preferential { m } => {
            let degrees: Vec<usize> = (0..existing).map(|v| g.degree(v)).collect();
            let mut picked: BTreeSet<usize> = BTreeSet::new();
            match WeightedIndex::new(&degrees) {
                Ok(dist) => {
                    for _ in 0..m {
                        picked.insert(dist.sample(rng));
                    }
                }
                // no edges yet: uniform draws
                Err(_) => {
                    for _ in 0..m {
                        picked.insert(rng.gen_range(0..existing));
                    }
                }
            }
            picked.into_iter().collect()
        }
        GrowthModel::TriangleClosing { m_r, p_r, m_n, p_n } => {
            let parents = index::sample(rng, existing, m_r.min(existing)).into_vec();
            let mut chosen: BTreeSet<usize> = BTreeSet::new();
            for &p in &parents {
                if rng.gen::<f64>() < p_r {
                    chosen.insert(p);
                }
            }
            let pool: Vec<usize> = parents
                .iter()
                .flat_map(|&p| g.neighbors(p).iter().copied())
                .filter(|&w| w < existing && !chosen.contains(&w))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let picks = index::sample(rng, pool.len(), m_n.min(pool.len())).into_vec();
            for i in picks {
                if rng.gen::<f64>() < p_n {
                    chosen.insert(pool[i]);
                }
            }
            chosen.into_iter().collect()
        }
    }
}

/// Adds one node attached per `model`. Nodes `0..existing` count as present;
/// the new node is `existing` if that vertex exists, else a freshly appended one.
/// Returns the new node.
pub fn grow_step<R: Rng + ?Sized>(
    g: &mut Graph,
    existing: usize,
    model: &GrowthModel,
    rng: &mut R,
) -> Result<usize> {
    let targets = choose_attachments(g, existing, model, rng);
    let node = if existing < g.n() {
        existing
    } else {
        g.add_vertex()
    };
    for t in targets {
        g.add_edge(node, t)?;
    }
    Ok(node)
}

/// How a decaying baseline picks the neighbor to disconnect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayWeighting {
    Uniform,
    InverseDegree,
    /// Weight `1 / (1 + triangles(neighbor))`.
    InverseTriangles,
}

impl From<&GrowthModel> for DecayWeighting {
    fn from(m: &GrowthModel) -> Self {
        match m {
            GrowthModel::Uniform { .. } => DecayWeighting::Uniform,
            GrowthModel::Preferential { .. } => DecayWeighting::InverseDegree,
            GrowthModel::TriangleClosing { .. } => DecayWeighting::InverseTriangles,
        }
    }
}

/// Chooses which neighbor of `node` to cut. `triangles(w)` gives the number of
/// triangles through `w`.
pub fn choose_severed_neighbor<R, F>(
    g: &Graph,
    node: usize,
    weighting: DecayWeighting,
    triangles: F,
    rng: &mut R,
) -> Option<usize>
where
    R: Rng + ?Sized,
    F: Fn(usize) -> u64,
{
    let mut nb = g.neighbors(node).to_vec();
    if nb.is_empty() {
        return None;
    }
    nb.sort_unstable();
    let weights: Vec<f64> = nb
        .iter()
        .map(|&w| match weighting {
            DecayWeighting::Uniform => 1.0,
            DecayWeighting::InverseDegree => 1.0 / g.degree(w) as f64,
            DecayWeighting::InverseTriangles => 1.0 / (1.0 + triangles(w) as f64),
        })
        .collect();
    let dist = WeightedIndex::new(&weights).expect("weights are positive");
    Some(nb[dist.sample(rng)])
}

fn local_triangles(g: &Graph, w: usize) -> u64 {
    let nb = g.neighbors(w);
    let mut t = 0;
    for (i, &a) in nb.iter().enumerate() {
        for &b in &nb[i + 1..] {
            if g.has_edge(a, b) {
                t += 1;
            }
        }
    }
    t
}

fn pick_non_isolated<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> usize {
    loop {
        let v = rng.gen_range(0..g.n());
        if g.degree(v) > 0 {
            return v;
        }
    }
}

/// Removes one edge: a uniformly random non-isolated node drops one neighbor
/// chosen per the model's weighting.
pub fn decay_step<R: Rng + ?Sized>(g: &mut Graph, model: &GrowthModel, rng: &mut R) -> Result<Edge> {
    if g.edge_count() == 0 {
        return Err(Error::InvalidParameter("cannot decay a graph with no edges".into()));
    }
    let node = pick_non_isolated(g, rng);
    let w = choose_severed_neighbor(g, node, model.into(), |w| local_triangles(g, w), rng)
        .expect("node has neighbors");
    g.remove_edge(node, w)?;
    Ok(g.canonical(node, w)?)
}

/// Statistics trajectory of a growth-model baseline.
#[derive(Debug, Clone)]
pub struct GrowthRecord {
    pub rows: Vec<StatRow>,
    /// Edge edits performed.
    pub steps: u64,
    /// Whether the edge count reached the target.
    pub reached: bool,
    pub graph: Graph,
}

/// Starts from a clique on `start_clique_size` vertices (padded with isolated
/// vertices up to `target.n()`) and grows or decays until the edge count
/// equals the target's.
pub fn extrapolate(
    start_clique_size: usize,
    model: &GrowthModel,
    target: &Graph,
    seed: u64,
) -> Result<GrowthRecord> {
    let n = target.n().max(start_clique_size);
    let mut start = Graph::undirected(n);
    for u in 0..start_clique_size {
        for v in (u + 1)..start_clique_size {
            start.add_edge(u, v)?;
        }
    }
    run_baseline(start, start_clique_size, model, target, seed, 1)
}

/// Same as [`extrapolate`] but starting from an existing snapshot. Vertices up to
/// the last non-isolated one count as already present.
pub fn extrapolate_from(
    start: &Graph,
    model: &GrowthModel,
    target: &Graph,
    seed: u64,
    every: u64,
) -> Result<GrowthRecord> {
    let existing = (0..start.n())
        .rev()
        .find(|&v| start.degree(v) > 0)
        .map_or(0, |v| v + 1);
    run_baseline(start.clone(), existing, model, target, seed, every)
}

/// Baselines between consecutive snapshots, each restarting from the earlier
/// snapshot. Pair `i` uses seed `trial_seed(seed, i)`.
pub fn extrapolate_sequence(
    snapshots: &[Graph],
    model: &GrowthModel,
    seed: u64,
    every: u64,
) -> Result<Vec<GrowthRecord>> {
    snapshots
        .windows(2)
        .enumerate()
        .map(|(i, pair)| extrapolate_from(&pair[0], model, &pair[1], trial_seed(seed, i as u64), every))
        .collect()
}

fn run_baseline(
    start: Graph,
    mut existing: usize,
    model: &GrowthModel,
    target: &Graph,
    seed: u64,
    every: u64,
) -> Result<GrowthRecord> {
    model.validate()?;
    let every = every.max(1);
    let goal = target.edge_count();
    let mut rng = rng_from_seed(seed);
    let mut distance = crate::graph::edit_distance(&start, target).unwrap_or_else(|_| {
        // sizes differ: count edges not shared
        let shared = start.edges().filter(|e| target.contains(e)).count();
        (start.edge_count() + goal - 2 * shared) as u64
    });
    let mut tracker = ClusteringTracker::new(start)?;
    let mut rows = vec![tracker.row(0, distance)];
    let mut steps = 0u64;
    // Growth can stall (e.g. zero attachment probabilities); bound the node count.
    let node_cap = target.n() + 10 * goal + 1000;
    let mut pending: Vec<(usize, usize)> = Vec::new();
    let mut reached = true;
    while tracker.graph().edge_count() != goal {
        if tracker.graph().edge_count() < goal {
            if pending.is_empty() {
                if existing >= node_cap {
                    reached = false;
                    break;
                }
                let targets = choose_attachments(tracker.graph(), existing, model, &mut rng);
                let node = if existing < tracker.graph().n() {
                    existing
                } else {
                    tracker.add_vertex()
                };
                existing += 1;
                pending.extend(targets.into_iter().rev().map(|t| (node, t)));
                continue;
            }
            let (u, v) = pending.pop().expect("nonempty");
            distance = toggle_tracked(&mut tracker, target, u, v, distance)?;
            steps += 1;
        } else {
            let node = pick_non_isolated(tracker.graph(), &mut rng);
            let tri = tracker.vertex_triangles();
            let w = choose_severed_neighbor(tracker.graph(), node, model.into(), |w| tri[w], &mut rng)
                .expect("node has neighbors");
            distance = toggle_tracked(&mut tracker, target, node, w, distance)?;
            steps += 1;
        }
        if steps % every == 0 {
            rows.push(tracker.row(steps, distance));
        }
    }
    if rows.last().map(|r| r.step) != Some(steps) {
        rows.push(tracker.row(steps, distance));
    }
    Ok(GrowthRecord {
        rows,
        steps,
        reached,
        graph: tracker.into_graph(),
    })
}

/// Toggles `(u, v)` and returns the updated edit distance to `target`.
fn toggle_tracked(tracker: &mut ClusteringTracker, target: &Graph, u: usize, v: usize, distance: u64) -> Result<u64> {
    let present = tracker.toggle(u, v)?;
    Ok(if present == target.has_edge(u, v) {
        distance - 1
    } else {
        distance + 1
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interpolate::InterpRng;
    use crate::stats::mean_clustering;

    fn rng(seed: u64) -> InterpRng {
        rng_from_seed(seed)
    }

    #[test]
    fn erdos_renyi_examples() {
        assert_eq!(erdos_renyi(20, 0.0, 1).edge_count(), 0);
        assert_eq!(erdos_renyi(20, 1.0, 1).edge_count(), 190);
        assert_eq!(erdos_renyi(20, 0.3, 5), erdos_renyi(20, 0.3, 5));
        // mean 612.5, sd = sqrt(1225 / 4) = 17.5
        let batch: Vec<usize> = (0..20).map(|s| erdos_renyi(50, 0.5, s).edge_count()).collect();
        for &m in &batch {
            assert!((m as f64 - 612.5).abs() < 4.0 * 17.5);
        }
        let mean = batch.iter().sum::<usize>() as f64 / batch.len() as f64;
        assert!((mean - 612.5).abs() < 4.0 * 17.5 / (batch.len() as f64).sqrt());
    }

    #[test]
    fn random_edges_examples() {
        let g = random_edges(100_000, 5_000, 1).unwrap();
        assert_eq!(g.edge_count(), 5_000);
        assert_eq!(random_edges(10, 40, 2).unwrap().edge_count(), 40);
        assert_eq!(random_edges(10, 45, 2).unwrap(), Graph::complete(10));
        assert!(random_edges(10, 46, 2).is_err());
        assert_eq!(random_edges(500, 300, 3).unwrap(), random_edges(500, 300, 3).unwrap());
    }

    #[test]
    fn sbm_examples() {
        let flat = SbmSpec::new(vec![10, 15, 5], 0.3, 0.3).unwrap();
        assert_eq!(sbm(&flat, 9).0, erdos_renyi(30, 0.3, 9));
        let one = SbmSpec::new(vec![30], 0.6, 0.1).unwrap();
        assert_eq!(sbm(&one, 4).0, erdos_renyi(30, 0.6, 4));

        let spec = SbmSpec::new(vec![60, 60], 0.9, 0.1).unwrap();
        let (g, labels) = sbm(&spec, 11);
        let (mut inside, mut across) = (0usize, 0usize);
        for &(u, v) in g.edges() {
            if labels[u] == labels[v] {
                inside += 1;
            } else {
                across += 1;
            }
        }
        let inside_density = inside as f64 / (2.0 * 1770.0);
        let across_density = across as f64 / 3600.0;
        assert!((inside_density - 0.9).abs() < 0.02);
        assert!((across_density - 0.1).abs() < 0.02);
        assert!(SbmSpec::new(vec![5], 0.1, 0.2).is_err());
    }

    #[test]
    fn uniform_attachment_is_fair() {
        let k2 = Graph::complete(2);
        let mut r = rng(1);
        let trials = 100_000;
        let mut first = 0;
        for _ in 0..trials {
            let t = choose_attachments(&k2, 2, &GrowthModel::Uniform { m: 1 }, &mut r);
            assert_eq!(t.len(), 1);
            if t[0] == 0 {
                first += 1;
            }
        }
        assert!((first as f64 / trials as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn preferential_attachment_follows_degree() {
        let star = Graph::from_edges(6, false, (1..6).map(|v| (0, v))).unwrap();
        let mut r = rng(2);
        let trials = 100_000;
        let mut center = 0;
        for _ in 0..trials {
            let t = choose_attachments(&star, 6, &GrowthModel::Preferential { m: 1 }, &mut r);
            if t == [0] {
                center += 1;
            }
        }
        assert!((center as f64 / trials as f64 - 0.5).abs() < 0.01);

        let empty = Graph::undirected(4);
        let t = choose_attachments(&empty, 4, &GrowthModel::Preferential { m: 3 }, &mut r);
        assert!(!t.is_empty() && t.len() <= 3);
    }

    #[test]
    fn triangle_closing_mean_degree() {
        let model = GrowthModel::TriangleClosing {
            m_r: 5,
            p_r: 0.5,
            m_n: 1,
            p_n: 0.5,
        };
        let base = erdos_renyi(300, 0.05, 3);
        let mut r = rng(4);
        let trials = 40_000;
        let mut total = 0usize;
        for _ in 0..trials {
            total += choose_attachments(&base, 300, &model, &mut r).len();
        }
        let mean = total as f64 / trials as f64;
        assert!((mean - 3.0).abs() / 3.0 < 0.02, "{mean}");
    }

    #[test]
    fn grow_step_is_simple() {
        let models = [
            GrowthModel::Uniform { m: 3 },
            GrowthModel::Preferential { m: 3 },
            GrowthModel::TriangleClosing {
                m_r: 2,
                p_r: 0.9,
                m_n: 2,
                p_n: 0.9,
            },
        ];
        for model in &models {
            let mut g = Graph::complete(4);
            let mut r = rng(5);
            for _ in 0..200 {
                let existing = g.n();
                let node = grow_step(&mut g, existing, model, &mut r).unwrap();
                assert_eq!(node, existing);
                assert!(!g.has_edge(node, node));
            }
            let degree_sum: usize = (0..g.n()).map(|v| g.degree(v)).sum();
            assert_eq!(degree_sum, 2 * g.edge_count());
        }
    }

    #[test]
    fn decay_examples() {
        let mut g = Graph::from_edges(4, false, [(1, 3)]).unwrap();
        let e = decay_step(&mut g, &GrowthModel::Uniform { m: 1 }, &mut rng(1)).unwrap();
        assert_eq!(e, (1, 3));
        assert_eq!(g.edge_count(), 0);
        assert!(decay_step(&mut g, &GrowthModel::Uniform { m: 1 }, &mut rng(1)).is_err());

        let star = Graph::from_edges(5, false, (1..5).map(|v| (0, v))).unwrap();
        let w = choose_severed_neighbor(&star, 2, DecayWeighting::Uniform, |_| 0, &mut rng(3));
        assert_eq!(w, Some(0));
    }

    #[test]
    fn triangle_weighted_decay_frequencies() {
        // 0 links to 1 and 2; vertex 1 lies on triangle 1-4-5, vertex 2 on none.
        let g = Graph::from_edges(6, false, [(0, 1), (0, 2), (1, 4), (1, 5), (4, 5)]).unwrap();
        let tri = crate::stats::vertex_triangles(&g);
        assert_eq!((tri[1], tri[2]), (1, 0));
        let mut r = rng(8);
        let trials = 60_000;
        let mut cut_one = 0;
        for _ in 0..trials {
            let w = choose_severed_neighbor(&g, 0, DecayWeighting::InverseTriangles, |w| tri[w], &mut r);
            if w == Some(1) {
                cut_one += 1;
            }
        }
        // weights 1/2 and 1/1
        let expected = 0.5 / 1.5;
        let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
        assert!((cut_one as f64 / trials as f64 - expected).abs() < 4.0 * sigma);
    }

    #[test]
    fn inverse_degree_decay_frequencies() {
        // neighbors of 0: vertex 1 (degree 1) and vertex 2 (degree 3)
        let g = Graph::from_edges(5, false, [(0, 1), (0, 2), (2, 3), (2, 4)]).unwrap();
        let mut r = rng(9);
        let trials = 60_000;
        let mut cut_one = 0;
        for _ in 0..trials {
            if choose_severed_neighbor(&g, 0, DecayWeighting::InverseDegree, |_| 0, &mut r) == Some(1) {
                cut_one += 1;
            }
        }
        let expected = 1.0 / (1.0 + 1.0 / 3.0);
        let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
        assert!((cut_one as f64 / trials as f64 - expected).abs() < 4.0 * sigma);
    }

    #[test]
    fn extrapolate_examples() {
        let target = Graph::complete(3);
        let rec = extrapolate(3, &GrowthModel::Uniform { m: 3 }, &target, 1).unwrap();
        assert_eq!(rec.steps, 0);
        assert_eq!(rec.rows.len(), 1);

        let target = erdos_renyi(80, 0.08, 2);
        for model in [
            GrowthModel::Uniform { m: 3 },
            GrowthModel::Preferential { m: 3 },
            GrowthModel::TriangleClosing {
                m_r: 5,
                p_r: 0.5,
                m_n: 1,
                p_n: 0.5,
            },
        ] {
            let rec = extrapolate(model.start_clique_size(), &model, &target, 3).unwrap();
            assert!(rec.reached);
            assert_eq!(rec.graph.edge_count(), target.edge_count());
            assert_eq!(rec.rows.last().unwrap().edges, target.edge_count());
            assert_eq!(rec.rows.last().unwrap().step, rec.steps);
        }
    }

    #[test]
    fn extrapolate_decays_when_target_is_smaller() {
        let start = erdos_renyi(30, 0.3, 1);
        let target = erdos_renyi(30, 0.1, 2);
        let model = GrowthModel::TriangleClosing {
            m_r: 2,
            p_r: 0.5,
            m_n: 2,
            p_n: 0.5,
        };
        let rec = extrapolate_from(&start, &model, &target, 4, 1).unwrap();
        assert_eq!(rec.graph.edge_count(), target.edge_count());
        assert_eq!(rec.steps as usize, start.edge_count() - target.edge_count());
        assert!(rec.rows.windows(2).all(|w| w[1].edges + 1 == w[0].edges));
    }

    #[test]
    fn extrapolate_is_deterministic() {
        let target = erdos_renyi(40, 0.1, 2);
        let model = GrowthModel::Preferential { m: 2 };
        let a = extrapolate(2, &model, &target, 5).unwrap();
        let b = extrapolate(2, &model, &target, 5).unwrap();
        assert_eq!(a.rows, b.rows);
    }

    #[test]
    fn stalled_growth_is_flagged() {
        let target = erdos_renyi(20, 0.3, 1);
        let model = GrowthModel::TriangleClosing {
            m_r: 2,
            p_r: 0.0,
            m_n: 2,
            p_n: 0.0,
        };
        let rec = extrapolate(3, &model, &target, 1).unwrap();
        assert!(!rec.reached);
    }

    #[test]
    fn growth_misses_clustered_target() {
        // A clustered target: many small dense blocks.
        let spec = SbmSpec::new(vec![10; 20], 0.8, 0.01).unwrap();
        let (target, _) = sbm(&spec, 6);
        let avg_degree = 2.0 * target.edge_count() as f64 / target.n() as f64;
        let m = avg_degree.round() as usize / 2;
        for model in [GrowthModel::Uniform { m }, GrowthModel::Preferential { m }] {
            let rec = extrapolate(m, &model, &target, 7).unwrap();
            assert!(rec.rows.last().unwrap().mean_cc < mean_clustering(&target));
        }
    }
}
