//! Normalized adjacency spectra, subspace distances and spectral clustering,
//! plus the block-model transition experiment built on them.

use std::io::Write;

use itertools::Itertools;
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::planted_partition;
use crate::graph::Graph;
use crate::interpolate::{interpolate, rng_from_seed, trial_seed, InterpolationConfig, StopMode};

/// `D^{-1/2} A D^{-1/2}`; rows and columns of isolated vertices are zero.
pub fn normalized_adjacency(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let scale: Vec<f64> = (0..n)
        .map(|v| match g.degree(v) {
            0 => 0.0,
            d => 1.0 / (d as f64).sqrt(),
        })
        .collect();
    let mut m = DMatrix::zeros(n, n);
    for &(u, v) in g.edges() {
        let w = scale[u] * scale[v];
        m[(u, v)] = w;
        m[(v, u)] = w;
    }
    m
}

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct SymmetricSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl SymmetricSpectrum {
    /// Eigenvectors of the `k` largest eigenvalues, as columns.
    pub fn top(&self, k: usize) -> DMatrix<f64> {
        self.eigenvectors.columns(0, k).into_owned()
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for j in 0..n {
        for i in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Full eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
pub fn eigen_symmetric(m: &DMatrix<f64>) -> Result<SymmetricSpectrum> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::InvalidParameter(format!(
            "expected a square matrix, got {}x{}",
            n,
            m.ncols()
        )));
    }
    let scale = m.amax().max(1.0);
    let asym = (m - m.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric(asym));
    }

    let mut a = m.clone();
    let mut v = DMatrix::<f64>::identity(n, n);
    let threshold = 1e-12 * a.norm().max(1.0);
    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) < threshold {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate_columns(&mut a, p, q, c, s);
                rotate_rows(&mut a, p, q, c, s);
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                rotate_columns(&mut v, p, q, c, s);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymmetricSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn rotate_columns(a: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..a.nrows() {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
}

fn rotate_rows(a: &mut DMatrix<f64>, p: usize, q: usize, c: f64, s: f64) {
    for k in 0..a.ncols() {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
}

fn check_orthonormal(u: &DMatrix<f64>) -> Result<()> {
    let gram = u.transpose() * u;
    let dev = (gram - DMatrix::<f64>::identity(u.ncols(), u.ncols())).amax();
    if dev > 1e-8 {
        return Err(Error::NotOrthonormal(dev));
    }
    Ok(())
}

/// Sine of the largest principal angle between the column spans of `u` and
/// `v`, i.e. `sqrt(1 - sigma_min(u^T v)^2)`.
///
/// Evaluated as the spectral norm of `v - u (u^T v)`, which equals the same
/// quantity but keeps full precision when the subspaces nearly coincide.
pub fn subspace_distance(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<f64> {
    if u.shape() != v.shape() {
        return Err(Error::InvalidParameter(format!(
            "basis shapes differ: {:?} vs {:?}",
            u.shape(),
            v.shape()
        )));
    }
    check_orthonormal(u)?;
    check_orthonormal(v)?;
    if u.ncols() == 0 {
        return Ok(0.0);
    }
    let residual = v - u * (u.transpose() * v);
    let sigma = residual
        .singular_values()
        .iter()
        .copied()
        .fold(0.0f64, f64::max);
    Ok(sigma.clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterAssignment {
    pub labels: Vec<usize>,
    pub k: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct ClusterOptions {
    pub restarts: usize,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        ClusterOptions {
            restarts: 10,
            max_iterations: 300,
            seed: 0,
        }
    }
}

pub fn spectral_cluster(g: &Graph, k: usize) -> Result<ClusterAssignment> {
    spectral_cluster_with(g, k, &ClusterOptions::default())
}

pub fn spectral_cluster_with(g: &Graph, k: usize, opts: &ClusterOptions) -> Result<ClusterAssignment> {
    if k <= 1 {
        return Ok(ClusterAssignment {
            labels: vec![0; g.n()],
            k: 1,
        });
    }
    let spectrum = eigen_symmetric(&normalized_adjacency(g))?;
    cluster_spectrum(&spectrum, k, opts)
}

/// k-means on the row-normalized top-`k` eigenvectors of an already computed spectrum.
pub fn cluster_spectrum(spectrum: &SymmetricSpectrum, k: usize, opts: &ClusterOptions) -> Result<ClusterAssignment> {
    let n = spectrum.eigenvectors.nrows();
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("cannot form {k} clusters from {n} points")));
    }
    let top = spectrum.top(k);
    let points: Vec<Vec<f64>> = (0..n)
        .map(|r| {
            let row: Vec<f64> = top.row(r).iter().copied().collect();
            let norm = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                row.iter().map(|x| x / norm).collect()
            } else {
                row
            }
        })
        .collect();
    let labels = kmeans(&points, k, opts);
    Ok(ClusterAssignment { labels, k })
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Best-of-restarts k-means++ / Lloyd clustering by within-cluster sum of squares.
fn kmeans(points: &[Vec<f64>], k: usize, opts: &ClusterOptions) -> Vec<usize> {
    let mut rng = rng_from_seed(opts.seed);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for _ in 0..opts.restarts.max(1) {
        let (wcss, labels) = lloyd(points, seed_centers(points, k, &mut rng), opts.max_iterations);
        if best.as_ref().map_or(true, |(b, _)| wcss < *b) {
            best = Some((wcss, labels));
        }
    }
    best.expect("at least one restart").1
}

fn seed_centers<R: Rng + ?Sized>(points: &[Vec<f64>], k: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let mut centers = vec![points[rng.gen_range(0..points.len())].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut x = rng.gen::<f64>() * total;
            let mut pick = points.len() - 1;
            for (i, &w) in d2.iter().enumerate() {
                if x < w {
                    pick = i;
                    break;
                }
                x -= w;
            }
            pick
        } else {
            rng.gen_range(0..points.len())
        };
        centers.push(points[next].clone());
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &centers[centers.len() - 1]));
        }
    }
    centers
}

fn nearest(p: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    centers
        .iter()
        .enumerate()
        .map(|(c, ctr)| (c, sq_dist(p, ctr)))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc })
}

fn lloyd(points: &[Vec<f64>], mut centers: Vec<Vec<f64>>, max_iterations: usize) -> (f64, Vec<usize>) {
    let k = centers.len();
    let dim = points[0].len();
    let mut labels = vec![usize::MAX; points.len()];
    for _ in 0..max_iterations {
        let mut changed = false;
        for (i, p) in points.iter().enumerate() {
            let (c, _) = nearest(p, &centers);
            if labels[i] != c {
                labels[i] = c;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, x) in sums[l].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            } else {
                // empty cluster: restart it at the worst-served point
                let far = points
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (i, sq_dist(p, &centers[labels[i]])))
                    .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc })
                    .0;
                centers[c] = points[far].clone();
                labels[far] = c;
            }
        }
    }
    let wcss = points
        .iter()
        .zip(&labels)
        .map(|(p, &l)| sq_dist(p, &centers[l]))
        .sum();
    (wcss, labels)
}

/// Largest fraction of vertices on which `assignment` agrees with `truth`
/// over all relabelings. Exhaustive, so limited to at most 5 clusters.
pub fn recovery_rate(assignment: &ClusterAssignment, truth: &[usize]) -> Result<f64> {
    let labels = &assignment.labels;
    if labels.len() != truth.len() {
        return Err(Error::InvalidParameter(format!(
            "assignment has {} labels, truth has {}",
            labels.len(),
            truth.len()
        )));
    }
    if labels.is_empty() {
        return Ok(1.0);
    }
    let k = labels
        .iter()
        .chain(truth)
        .copied()
        .max()
        .map_or(0, |m| m + 1)
        .max(assignment.k);
    if k > 5 {
        return Err(Error::InvalidParameter(format!(
            "recovery rate enumerates label permutations; {k} clusters is too many"
        )));
    }
    let mut confusion = vec![vec![0usize; k]; k];
    for (&a, &t) in labels.iter().zip(truth) {
        confusion[a][t] += 1;
    }
    let best = (0..k)
        .permutations(k)
        .map(|perm| (0..k).map(|a| confusion[a][perm[a]]).sum::<usize>())
        .max()
        .unwrap_or(0);
    Ok(best as f64 / labels.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    /// Two blocks; the second splits into two equal halves.
    Split,
    /// Two blocks become three blocks drawn independently of the first partition.
    Independent,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Split => "split",
            Scenario::Independent => "independent",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TransitionConfig {
    pub n: usize,
    pub p: f64,
    pub q: f64,
    pub rate: f64,
    pub target_distance: u64,
    pub seed: u64,
    /// Spectra are computed every `stride` steps, plus at the first and last step.
    pub stride: u64,
    /// Dimension of the compared eigenspaces and number of clusters.
    pub k: usize,
    /// Number of equispaced points on the straight line between the two
    /// normalized adjacency matrices.
    pub linear_points: usize,
    pub cluster: ClusterOptions,
}

impl Default for TransitionConfig {
    fn default() -> Self {
        TransitionConfig {
            n: 120,
            p: 0.9,
            q: 0.1,
            rate: 1.0,
            target_distance: 0,
            seed: 0,
            stride: 25,
            k: 3,
            linear_points: 51,
            cluster: ClusterOptions::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TransitionRow {
    pub step: u64,
    pub distance: u64,
    pub recovery: f64,
    pub subspace_distance: f64,
    /// Full spectrum, descending.
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LinearRow {
    pub t: f64,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct TransitionResult {
    pub scenario: Scenario,
    pub rows: Vec<TransitionRow>,
    pub linear: Vec<LinearRow>,
    pub total_steps: u64,
    pub truth: Vec<usize>,
    pub start: Graph,
    pub target: Graph,
}

impl TransitionResult {
    /// Mean recovery over sampled rows whose step lies in `[lo, hi]` as a
    /// fraction of the trajectory length.
    pub fn mean_recovery(&self, lo: f64, hi: f64) -> f64 {
        let total = self.total_steps.max(1) as f64;
        let picked: Vec<f64> = self
            .rows
            .iter()
            .filter(|r| {
                let f = r.step as f64 / total;
                f >= lo && f <= hi
            })
            .map(|r| r.recovery)
            .collect();
        picked.iter().sum::<f64>() / picked.len().max(1) as f64
    }

    /// Fraction of the trajectory after which recovery stays at or above `level`.
    pub fn settle_fraction(&self, level: f64) -> f64 {
        let total = self.total_steps.max(1) as f64;
        let mut settle = self.total_steps;
        for r in self.rows.iter().rev() {
            if r.recovery < level {
                break;
            }
            settle = r.step;
        }
        settle as f64 / total
    }
}

fn scenario_graphs(scenario: Scenario, cfg: &TransitionConfig) -> Result<(Graph, Graph, Vec<usize>)> {
    let n = cfg.n;
    let half = n / 2;
    let divisible = match scenario {
        Scenario::Split => n % 4 == 0,
        Scenario::Independent => n % 6 == 0,
    };
    if !divisible || !(0.0..=1.0).contains(&cfg.p) || !(0.0..=1.0).contains(&cfg.q) {
        return Err(Error::InvalidParameter(format!(
            "{} scenario needs block sizes dividing n={n} and probabilities in [0, 1]",
            scenario.name()
        )));
    }
    let start_labels: Vec<usize> = (0..n).map(|v| usize::from(v >= half)).collect();
    let truth: Vec<usize> = match scenario {
        Scenario::Split => (0..n)
            .map(|v| match v {
                v if v < half => 0,
                v if v < half + half / 2 => 1,
                _ => 2,
            })
            .collect(),
        Scenario::Independent => {
            let mut labels: Vec<usize> = (0..n).map(|v| v / (n / 3)).collect();
            labels.shuffle(&mut rng_from_seed(trial_seed(cfg.seed, 2)));
            labels
        }
    };
    let start = planted_partition(&start_labels, cfg.p, cfg.q, trial_seed(cfg.seed, 0));
    let target = planted_partition(&truth, cfg.p, cfg.q, trial_seed(cfg.seed, 1));
    Ok((start, target, truth))
}

/// Interpolates from a two-block graph to a three-block graph and tracks how
/// well spectral clustering recovers the final blocks along the way.
pub fn sbm_transition_experiment(scenario: Scenario, cfg: &TransitionConfig) -> Result<TransitionResult> {
    let (start, target, truth) = scenario_graphs(scenario, cfg)?;
    let icfg = InterpolationConfig {
        rate: cfg.rate,
        target_distance: cfg.target_distance,
        stop: StopMode::UntilTarget,
        seed: trial_seed(cfg.seed, 3),
        ..InterpolationConfig::default()
    };
    let trace = interpolate(&start, &target, &icfg)?;
    let target_spectrum = eigen_symmetric(&normalized_adjacency(&target))?;
    let target_basis = target_spectrum.top(cfg.k);

    // Collect the sampled graphs first, then analyse them in parallel.
    let stride = cfg.stride.max(1);
    let total = trace.len() as u64;
    let mut samples = vec![(0u64, trace.initial_distance, start.clone())];
    let mut g = start.clone();
    for (i, step) in trace.steps.iter().enumerate() {
        let (u, v) = step.mv.edge;
        g.toggle_edge(u, v)?;
        let taken = i as u64 + 1;
        if taken % stride == 0 || taken == total {
            samples.push((taken, step.distance, g.clone()));
        }
    }

    let rows = samples
        .into_par_iter()
        .map(|(step, distance, g)| {
            let spectrum = eigen_symmetric(&normalized_adjacency(&g))?;
            let assignment = cluster_spectrum(&spectrum, cfg.k, &cfg.cluster)?;
            Ok(TransitionRow {
                step,
                distance,
                recovery: recovery_rate(&assignment, &truth)?,
                subspace_distance: subspace_distance(&spectrum.top(cfg.k), &target_basis)?,
                eigenvalues: spectrum.eigenvalues,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let linear = linear_spectra(&start, &target, cfg.linear_points)?;
    Ok(TransitionResult {
        scenario,
        rows,
        linear,
        total_steps: total,
        truth,
        start,
        target,
    })
}

/// Spectra of `(1 - t) N(start) + t N(target)` at `points` equispaced `t` in [0, 1].
pub fn linear_spectra(start: &Graph, target: &Graph, points: usize) -> Result<Vec<LinearRow>> {
    let a = normalized_adjacency(start);
    let b = normalized_adjacency(target);
    (0..points)
        .into_par_iter()
        .map(|i| {
            let t = if points > 1 { i as f64 / (points - 1) as f64 } else { 1.0 };
            let m = &a * (1.0 - t) + &b * t;
            Ok(LinearRow {
                t,
                eigenvalues: eigen_symmetric(&m)?.eigenvalues,
            })
        })
        .collect()
}

/// `step,recovery,subspace_distance,eig1..eigK` with the `k` largest eigenvalues.
pub fn write_transition_csv<W: Write>(out: W, rows: &[TransitionRow], k: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["step".to_string(), "recovery".into(), "subspace_distance".into()];
    header.extend((1..=k).map(|i| format!("eig{i}")));
    w.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.step.to_string(), r.recovery.to_string(), r.subspace_distance.to_string()];
        rec.extend(r.eigenvalues.iter().take(k).map(|x| x.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Long format: one `step,index,eigenvalue` line per eigenvalue.
pub fn write_spectrum_csv<W: Write>(out: W, rows: &[TransitionRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["step", "index", "eigenvalue"])?;
    for r in rows {
        for (i, x) in r.eigenvalues.iter().enumerate() {
            w.write_record([r.step.to_string(), (i + 1).to_string(), x.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Long format for the straight-line comparison: `t,index,eigenvalue`.
pub fn write_linear_csv<W: Write>(out: W, rows: &[LinearRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "index", "eigenvalue"])?;
    for r in rows {
        for (i, x) in r.eigenvalues.iter().enumerate() {
            w.write_record([r.t.to_string(), (i + 1).to_string(), x.to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{sbm, SbmSpec};
    use proptest::prelude::*;
    use rand::Rng;

    fn random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = rng_from_seed(seed);
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let x: f64 = rng.gen_range(-1.0..1.0);
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        m
    }

    fn random_basis(n: usize, k: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = rng_from_seed(seed);
        let m = DMatrix::from_fn(n, k, |_, _| rng.gen_range(-1.0..1.0));
        m.qr().q().columns(0, k).into_owned()
    }

    fn residual(m: &DMatrix<f64>, s: &SymmetricSpectrum) -> f64 {
        let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(s.eigenvalues.clone()));
        (m * &s.eigenvectors - &s.eigenvectors * lambda).amax()
    }

    #[test]
    fn normalized_adjacency_examples() {
        let edge = Graph::complete(2);
        let m = normalized_adjacency(&edge);
        assert_eq!(m[(0, 1)], 1.0);
        assert_eq!(m[(1, 0)], 1.0);
        let s = eigen_symmetric(&m).unwrap();
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((s.eigenvalues[1] + 1.0).abs() < 1e-14);

        let k3 = eigen_symmetric(&normalized_adjacency(&Graph::complete(3))).unwrap();
        assert!((k3.eigenvalues[0] - 1.0).abs() < 1e-14);

        let g = Graph::from_edges(4, false, [(0, 1), (1, 2)]).unwrap();
        let m = normalized_adjacency(&g);
        assert!(m.row(3).iter().all(|&x| x == 0.0));
        assert!(m.column(3).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn eigen_examples() {
        let s = eigen_symmetric(&DMatrix::identity(3, 3)).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 1.0, 1.0]);

        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 2.0]));
        let s = eigen_symmetric(&d).unwrap();
        assert_eq!(s.eigenvalues, vec![3.0, 2.0, 1.0]);
        let expected = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        assert_eq!(s.eigenvectors, expected);

        let mut bad = DMatrix::identity(2, 2);
        bad[(0, 1)] = 1e-6;
        assert!(matches!(eigen_symmetric(&bad), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn random_symmetric_residual() {
        for seed in 0..5 {
            let m = random_symmetric(20, seed);
            let s = eigen_symmetric(&m).unwrap();
            assert!(residual(&m, &s) < 1e-8);
            let gram = s.eigenvectors.transpose() * &s.eigenvectors;
            assert!((gram - DMatrix::<f64>::identity(20, 20)).amax() < 1e-10);
            assert!(s.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
            // trace is preserved
            let tr: f64 = s.eigenvalues.iter().sum();
            assert!((tr - m.trace()).abs() < 1e-10);
        }
    }

    #[test]
    fn eigenvalues_match_nalgebra() {
        let m = random_symmetric(30, 9);
        let ours = eigen_symmetric(&m).unwrap().eigenvalues;
        let mut theirs: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        theirs.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn sbm_spectrum_residual() {
        let (g, _) = sbm(&SbmSpec::new(vec![40, 40, 40], 0.9, 0.1).unwrap(), 1);
        let m = normalized_adjacency(&g);
        let s = eigen_symmetric(&m).unwrap();
        assert!(residual(&m, &s) < 1e-8);
        assert!((s.eigenvalues[0] - 1.0).abs() < 1e-10);
    }

    /// sqrt(1 - lambda_min) of (U^T V)^T (U^T V), with lambda_min from Jacobi.
    fn singular_value_oracle(u: &DMatrix<f64>, v: &DMatrix<f64>) -> f64 {
        let p = u.transpose() * v;
        let gram = p.transpose() * &p;
        let s = eigen_symmetric(&gram).unwrap();
        let lmin = *s.eigenvalues.last().unwrap();
        (1.0 - lmin).max(0.0).sqrt()
    }

    #[test]
    fn subspace_distance_examples() {
        let u = random_basis(120, 3, 1);
        assert!(subspace_distance(&u, &u).unwrap() < 1e-12);

        let e = DMatrix::<f64>::identity(6, 6);
        let a = e.columns(0, 3).into_owned();
        let b = e.columns(3, 3).into_owned();
        assert!((subspace_distance(&a, &b).unwrap() - 1.0).abs() < 1e-15);

        for seed in 0..5 {
            let u = random_basis(120, 3, 2 * seed);
            let v = random_basis(120, 3, 2 * seed + 1);
            let d = subspace_distance(&u, &v).unwrap();
            assert!((d - singular_value_oracle(&u, &v)).abs() < 1e-10);
        }

        let mut skew = random_basis(10, 2, 3);
        skew[(0, 0)] += 1e-3;
        assert!(matches!(
            subspace_distance(&skew, &random_basis(10, 2, 4)),
            Err(Error::NotOrthonormal(_))
        ));
    }

    #[test]
    fn subspace_distance_ignores_basis_choice() {
        let u = random_basis(50, 3, 5);
        let rot = random_basis(3, 3, 6);
        let v = random_basis(50, 3, 7);
        let a = subspace_distance(&u, &v).unwrap();
        let b = subspace_distance(&(&u * rot), &v).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn subspace_distance_symmetric(seed in 0u64..10_000, k in 1usize..5) {
            let u = random_basis(30, k, seed);
            let v = random_basis(30, k, seed + 77_777);
            let a = subspace_distance(&u, &v).unwrap();
            let b = subspace_distance(&v, &u).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!(subspace_distance(&u, &u).unwrap() < 1e-12);
        }

        #[test]
        fn recovery_at_least_chance(labels in proptest::collection::vec(0usize..3, 30)) {
            let truth: Vec<usize> = (0..30).map(|v| v / 10).collect();
            let r = recovery_rate(&ClusterAssignment { labels, k: 3 }, &truth).unwrap();
            prop_assert!(r >= 1.0 / 3.0 - 1e-12 && r <= 1.0);
        }
    }

    #[test]
    fn recovery_examples() {
        let truth: Vec<usize> = (0..120).map(|v| v / 40).collect();
        let same = ClusterAssignment {
            labels: truth.clone(),
            k: 3,
        };
        assert_eq!(recovery_rate(&same, &truth).unwrap(), 1.0);
        let permuted = ClusterAssignment {
            labels: truth.iter().map(|&l| (l + 1) % 3).collect(),
            k: 3,
        };
        assert_eq!(recovery_rate(&permuted, &truth).unwrap(), 1.0);
        let mut flipped = same.clone();
        flipped.labels[7] = 2;
        assert_eq!(recovery_rate(&flipped, &truth).unwrap(), 119.0 / 120.0);

        let six = ClusterAssignment {
            labels: (0..6).collect(),
            k: 6,
        };
        assert!(recovery_rate(&six, &[0, 1, 2, 3, 4, 5]).is_err());
        assert!(recovery_rate(&same, &truth[..10]).is_err());
    }

    #[test]
    fn clustering_examples() {
        let mut g = Graph::undirected(8);
        for block in [0..4, 4..8] {
            for u in block.clone() {
                for v in (u + 1)..block.end {
                    g.add_edge(u, v).unwrap();
                }
            }
        }
        let a = spectral_cluster(&g, 2).unwrap();
        assert!(a.labels[..4].iter().all(|&l| l == a.labels[0]));
        assert!(a.labels[4..].iter().all(|&l| l == a.labels[4]));
        assert_ne!(a.labels[0], a.labels[4]);

        let one = spectral_cluster(&g, 1).unwrap();
        assert_eq!(one.labels, vec![0; 8]);

        let (g, truth) = sbm(&SbmSpec::new(vec![40, 40, 40], 0.9, 0.1).unwrap(), 3);
        let a = spectral_cluster(&g, 3).unwrap();
        assert!(a.labels.iter().all(|&l| l < 3));
        assert!(recovery_rate(&a, &truth).unwrap() >= 0.95);
        assert_eq!(spectral_cluster(&g, 3).unwrap(), a);
    }

    #[test]
    fn eigenvalues_move_continuously() {
        let cfg = TransitionConfig::default();
        let (start, target, _) = scenario_graphs(Scenario::Split, &cfg).unwrap();
        let trace = interpolate(&start, &target, &InterpolationConfig::exact(1.0, 4)).unwrap();
        let mut g = start.clone();
        let mut prev = eigen_symmetric(&normalized_adjacency(&g)).unwrap().eigenvalues;
        for step in trace.steps.iter().take(150) {
            g.toggle_edge(step.mv.edge.0, step.mv.edge.1).unwrap();
            let now = eigen_symmetric(&normalized_adjacency(&g)).unwrap().eigenvalues;
            let jump = now.iter().zip(&prev).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(jump < 0.5, "{jump}");
            prev = now;
        }
    }

    #[test]
    fn transition_final_step_matches_target() {
        let cfg = TransitionConfig {
            n: 48,
            stride: 100,
            linear_points: 5,
            ..TransitionConfig::default()
        };
        let res = sbm_transition_experiment(Scenario::Independent, &cfg).unwrap();
        let last = res.rows.last().unwrap();
        assert_eq!(last.step, res.total_steps);
        assert_eq!(last.distance, 0);
        assert!(last.subspace_distance < 1e-12);
        let direct = cluster_spectrum(
            &eigen_symmetric(&normalized_adjacency(&res.target)).unwrap(),
            3,
            &cfg.cluster,
        )
        .unwrap();
        assert_eq!(last.recovery, recovery_rate(&direct, &res.truth).unwrap());
        assert_eq!(res.linear.len(), 5);
        assert_eq!(res.linear[0].eigenvalues, res.rows[0].eigenvalues);

        let mut buf = Vec::new();
        write_transition_csv(&mut buf, &res.rows, 3).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("step,recovery,subspace_distance,eig1,eig2,eig3\n0,"));
        assert!(sbm_transition_experiment(Scenario::Split, &TransitionConfig { n: 50, ..cfg }).is_err());
    }
}
