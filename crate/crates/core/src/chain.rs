//! The edit-distance chain: states `0..=d_m`, moving down with probability
//! `phi(i)` and up with `1 - phi(i)`.
//!
//! Everything here assumes the logistic advancing probability.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{max_edit_distance, Graph};
use crate::interpolate::{rng_from_seed, step, trial_seed, AdvancingProbability, InterpolationConfig};
use crate::ledger::{edge_of, slot_of, MoveLedger};

#[derive(Debug, Clone, Copy)]
pub struct DistanceChain {
    phi: AdvancingProbability,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitingMethod {
    ExactEigenvector,
    ClosedFormApprox,
}

/// Weights over the contiguous state range starting at `first_state`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitingDistribution {
    pub first_state: u64,
    pub weights: Vec<f64>,
    pub method: LimitingMethod,
    /// `false` when the closed form was evaluated outside the regime where it
    /// is known to approximate the chain.
    pub hypotheses_hold: bool,
}

impl LimitingDistribution {
    pub fn weight(&self, state: u64) -> Option<f64> {
        state
            .checked_sub(self.first_state)
            .and_then(|i| self.weights.get(i as usize).copied())
    }

    pub fn states(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.weights
            .iter()
            .enumerate()
            .map(move |(i, &w)| (self.first_state + i as u64, w))
    }
}

impl DistanceChain {
    pub fn new(rate: f64, target_distance: u64, max_distance: u64) -> Result<Self> {
        if max_distance == 0 {
            return Err(Error::InvalidParameter(
                "the chain needs at least two states".into(),
            ));
        }
        Ok(DistanceChain {
            phi: AdvancingProbability::new(rate, target_distance, max_distance)?,
        })
    }

    pub fn max_distance(&self) -> u64 {
        self.phi.max_distance()
    }

    pub fn advancing_probability(&self) -> &AdvancingProbability {
        &self.phi
    }

    /// Dense row-stochastic transition matrix, row `i` = state `i`.
    pub fn transition_matrix(&self) -> DMatrix<f64> {
        let m = self.max_distance() as usize;
        let mut p = DMatrix::zeros(m + 1, m + 1);
        for i in 0..=m {
            let down = self.phi.phi(i as u64);
            if i > 0 {
                p[(i, i - 1)] = down;
            }
            if i < m {
                p[(i, i + 1)] = 1.0 - down;
            }
        }
        p
    }

    /// Time-averaged limiting distribution from the product recursion
    /// `v[i+1] = v[i] (1 - phi(i)) / phi(i+1)`, accumulated in log space.
    pub fn exact_limiting_distribution(&self) -> LimitingDistribution {
        let m = self.max_distance();
        let mut logw = Vec::with_capacity(m as usize + 1);
        let mut acc = 0.0;
        logw.push(acc);
        for i in 0..m {
            acc += self.phi.ln_one_minus_phi(i) - self.phi.ln_phi(i + 1);
            logw.push(acc);
        }
        let top = logw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_norm = top + logw.iter().map(|l| (l - top).exp()).sum::<f64>().ln();
        LimitingDistribution {
            first_state: 0,
            weights: logw.iter().map(|l| (l - log_norm).exp()).collect(),
            method: LimitingMethod::ExactEigenvector,
            hypotheses_hold: true,
        }
    }
}

/// Closed-form approximation of the limiting weights at `d_t - k_max ..= d_t + k_max`.
///
/// The approximation is symmetric in `k` and assumes `d_m >= 2 d_t`,
/// `d_t >= 2` and `k_max < d_t`; outside that regime it is still evaluated but
/// `hypotheses_hold` is cleared.
pub fn approx_limiting_distribution(
    target_distance: u64,
    rate: f64,
    k_max: u64,
    max_distance: u64,
) -> Result<LimitingDistribution> {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::InvalidParameter(format!("rate must be positive, got {rate}")));
    }
    if k_max > target_distance {
        return Err(Error::InvalidParameter(format!(
            "k_max = {k_max} exceeds the target distance {target_distance}"
        )));
    }
    let dt = target_distance as f64;
    let hypotheses_hold =
        max_distance >= 2 * target_distance && target_distance >= 2 && k_max < target_distance;
    let tail = (-(dt - 1.0) * dt / (2.0 * rate)).exp();
    let bulk: f64 = (0..target_distance.saturating_sub(1))
        .map(|i| {
            let i = i as f64;
            (-i * (i + 1.0) / (2.0 * rate)).exp()
        })
        .sum();
    let denom = 2.0 * (tail + 2.0 * bulk);
    let at = |k: u64| {
        let k = k as f64;
        ((-k * (k - 1.0) / (2.0 * rate)).exp() + (-k * (k + 1.0) / (2.0 * rate)).exp()) / denom
    };
    let weights = (0..=2 * k_max)
        .map(|j| at(j.abs_diff(k_max)))
        .collect();
    Ok(LimitingDistribution {
        first_state: target_distance - k_max,
        weights,
        method: LimitingMethod::ClosedFormApprox,
        hypotheses_hold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HittingTime {
    pub value: f64,
    /// The leading `d_o - d_t` term plus every series term kept.
    pub terms_used: usize,
}

/// Expected number of steps to first reach `d_t` from `d_o`, by the closed-form
/// series. Series terms are kept while they exceed `tol`; `f64::EPSILON` keeps
/// every term above machine precision.
pub fn expected_hitting_time(
    d_o: u64,
    d_t: u64,
    d_m: u64,
    rate: f64,
    tol: f64,
) -> Result<HittingTime> {
    if d_o < d_t {
        return Err(Error::UnsupportedRegime { d_o, d_t });
    }
    if d_o > d_m {
        return Err(Error::InvalidParameter(format!(
            "initial distance {d_o} exceeds the maximum {d_m}"
        )));
    }
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::InvalidParameter(format!("rate must be positive, got {rate}")));
    }
    if d_o == d_t {
        return Ok(HittingTime {
            value: 0.0,
            terms_used: 0,
        });
    }
    let gap = (d_o - d_t) as f64;
    let mut series = 0.0;
    let mut kept = 0;
    for k in 1..=(d_m - d_o) {
        let k = k as f64;
        let term = (-k * (k + 1.0) / (2.0 * rate)).exp() * (-(-k * gap / rate).exp_m1())
            / (-(-k / rate).exp_m1());
        // terms decrease in k
        if !(term > tol) {
            break;
        }
        series += term;
        kept += 1;
    }
    Ok(HittingTime {
        value: gap + 2.0 * series,
        terms_used: 1 + kept,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HittingSample {
    pub times: Vec<u64>,
}

impl HittingSample {
    pub fn mean(&self) -> f64 {
        self.times.iter().map(|&t| t as f64).sum::<f64>() / self.times.len() as f64
    }

    /// Unbiased sample variance.
    pub fn variance(&self) -> f64 {
        if self.times.len() < 2 {
            return 0.0;
        }
        let m = self.mean();
        self.times
            .iter()
            .map(|&t| (t as f64 - m).powi(2))
            .sum::<f64>()
            / (self.times.len() - 1) as f64
    }

    /// Nearest-rank quantile, `q` in `[0, 1]`.
    pub fn quantile(&self, q: f64) -> u64 {
        let mut sorted = self.times.clone();
        sorted.sort_unstable();
        let rank = ((q.clamp(0.0, 1.0) * sorted.len() as f64).ceil() as usize).max(1);
        sorted[rank - 1]
    }
}

/// First-passage step counts to `cfg.target_distance`, one independently
/// seeded run per trial (run `i` uses `trial_seed(cfg.seed, i)`).
pub fn empirical_hitting_time(
    start: &Graph,
    target: &Graph,
    cfg: &InterpolationConfig,
    trials: usize,
) -> Result<HittingSample> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let base = MoveLedger::build(start, target)?;
    let phi = AdvancingProbability::new(cfg.rate, cfg.target_distance, base.universe())?;
    let times = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_from_seed(trial_seed(cfg.seed, i));
            let mut g = start.clone();
            let mut ledger = base.clone();
            let mut steps = 0u64;
            while ledger.distance() != cfg.target_distance {
                if cfg.step_limit.is_some_and(|l| steps >= l) {
                    return Err(Error::StepLimit(steps));
                }
                step(&mut g, &mut ledger, &phi, &mut rng, cfg.allow_false_edges)?;
                steps += 1;
            }
            Ok(steps)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(HittingSample { times })
}

/// Smallest multiple of `grid_step` whose expected hitting time is closest to
/// `target_steps` (ties go to the smaller rate).
pub fn fit_rate(d_o: u64, d_t: u64, d_m: u64, target_steps: f64, grid_step: f64) -> Result<f64> {
    if !(grid_step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "grid step must be positive, got {grid_step}"
        )));
    }
    const MAX_GRID_POINTS: u64 = 1_000_000;
    let eval = |k: u64| -> Result<f64> {
        Ok(expected_hitting_time(d_o, d_t, d_m, k as f64 * grid_step, f64::EPSILON)?.value)
    };
    let mut prev = eval(1)?;
    let mut best_k = 1;
    let mut best_gap = (prev - target_steps).abs();
    for k in 2..=MAX_GRID_POINTS {
        if prev >= target_steps {
            // hitting time increases with the rate, so the gap only grows from here
            break;
        }
        let h = eval(k)?;
        let gap = (h - target_steps).abs();
        if gap < best_gap {
            best_gap = gap;
            best_k = k;
        }
        if h <= prev {
            // saturated: further rates cannot get closer
            break;
        }
        prev = h;
    }
    Ok(best_k as f64 * grid_step)
}

/// Stationary weights of the chain on whole graphs, by exhaustive enumeration.
#[derive(Debug, Clone)]
pub struct LayerReport {
    /// Edge-indicator bitmask of each state (bit `i` = edge slot `i`).
    pub states: Vec<u32>,
    pub weights: Vec<f64>,
    /// Layer (edit distance to the target) of each state.
    pub layers: Vec<u64>,
    /// Largest `max - min` weight gap within one layer, over supported states.
    pub max_layer_spread: f64,
    /// Total weight on graphs that are not subgraphs of the target.
    pub mass_off_subgraphs: f64,
}

impl LayerReport {
    pub fn is_uniform_within_layers(&self, tol: f64) -> bool {
        self.max_layer_spread <= tol
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        let top = self.layers.iter().copied().max().unwrap_or(0);
        let mut sizes = vec![0; top as usize + 1];
        for &l in &self.layers {
            sizes[l as usize] += 1;
        }
        sizes
    }
}

/// Builds the full graph-space chain for `target.n() <= 4` under uniform move
/// selection and returns its stationary vector with per-layer uniformity checks.
///
/// With `allow_false_edges` off, only subgraphs of the target can carry
/// mass and the uniformity check is taken over them.
pub fn layer_uniformity_oracle(
    target: &Graph,
    rate: f64,
    target_distance: u64,
    allow_false_edges: bool,
) -> Result<LayerReport> {
    let n = target.n();
    if n > 4 {
        return Err(Error::TooLarge(n));
    }
    if n < 2 || target.is_directed() {
        return Err(Error::InvalidParameter(
            "enumeration needs an undirected graph with at least two vertices".into(),
        ));
    }
    let slots = max_edit_distance(n, false);
    let phi = AdvancingProbability::new(rate, target_distance, slots)?;
    let tmask: u32 = target
        .edges()
        .map(|&e| 1u32 << slot_of(e, n, false))
        .sum();
    let count = 1usize << slots;
    let mut p = DMatrix::<f64>::zeros(count, count);
    for x in 0..count as u32 {
        let d = (x ^ tmask).count_ones() as u64;
        let differ: Vec<u32> = (0..slots as u32).filter(|b| (x ^ tmask) >> b & 1 == 1).collect();
        let regress: Vec<u32> = (0..slots as u32)
            .filter(|b| (x ^ tmask) >> b & 1 == 0)
            .filter(|b| allow_false_edges || tmask >> b & 1 == 1)
            .collect();
        if differ.is_empty() && regress.is_empty() {
            p[(x as usize, x as usize)] = 1.0;
            continue;
        }
        let advance_p = if regress.is_empty() { 1.0 } else { phi.phi(d) };
        for &b in &differ {
            p[(x as usize, (x ^ (1 << b)) as usize)] += advance_p / differ.len() as f64;
        }
        for &b in &regress {
            p[(x as usize, (x ^ (1 << b)) as usize)] += (1.0 - advance_p) / regress.len() as f64;
        }
    }
    // pi (P - I) = 0 with the last equation replaced by sum(pi) = 1
    let mut a = p.transpose() - DMatrix::identity(count, count);
    for j in 0..count {
        a[(count - 1, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(count);
    rhs[count - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidParameter("graph chain has no unique stationary vector".into()))?;

    let states: Vec<u32> = (0..count as u32).collect();
    let layers: Vec<u64> = states.iter().map(|&x| (x ^ tmask).count_ones() as u64).collect();
    let is_subgraph = |x: u32| x & !tmask == 0;
    let mut lo = vec![f64::INFINITY; slots as usize + 1];
    let mut hi = vec![f64::NEG_INFINITY; slots as usize + 1];
    let mut off = 0.0;
    for &x in &states {
        let w = pi[x as usize];
        if !allow_false_edges && !is_subgraph(x) {
            off += w;
            continue;
        }
        let l = layers[x as usize] as usize;
        lo[l] = lo[l].min(w);
        hi[l] = hi[l].max(w);
    }
    if allow_false_edges {
        off = states
            .iter()
            .filter(|&&x| !is_subgraph(x))
            .map(|&x| pi[x as usize])
            .sum();
    }
    let spread = lo
        .iter()
        .zip(&hi)
        .filter(|(l, _)| l.is_finite())
        .map(|(l, h)| h - l)
        .fold(0.0, f64::max);
    Ok(LayerReport {
        states,
        weights: pi.iter().copied().collect(),
        layers,
        max_layer_spread: spread,
        mass_off_subgraphs: off,
    })
}

/// Graph whose edges are the set bits of `mask`.
pub fn graph_from_mask(n: usize, mask: u32) -> Graph {
    let mut g = Graph::undirected(n);
    for b in 0..max_edit_distance(n, false) {
        if mask >> b & 1 == 1 {
            let (u, v) = edge_of(b, n, false);
            g.add_edge(u, v).expect("slot edges are valid");
        }
    }
    g
}
