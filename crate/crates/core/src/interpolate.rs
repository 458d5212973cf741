//! The interpolation process: a biased walk on graphs that advances toward a
//! target with probability `phi(d)` and regresses otherwise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::ledger::{MoveLedger, SignedEdge};

/// Random generator used by every stochastic routine in the crate.
pub type InterpRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> InterpRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for the `index`-th independent trial of a run seeded with `base`.
pub fn trial_seed(base: u64, index: u64) -> u64 {
    base.wrapping_add(index)
}

/// The standard logistic function, evaluated without overflow for large `|x|`.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(logistic(x))`.
pub fn ln_logistic(x: f64) -> f64 {
    // -softplus(-x)
    let y = -x;
    -(y.max(0.0) + (-y.abs()).exp().ln_1p())
}

/// Advancing probability `phi(d) = f((d - d_t) / s)` with the boundary values
/// `phi(0) = 0` and `phi(d_m) = 1` imposed exactly.
#[derive(Debug, Clone, Copy)]
pub struct AdvancingProbability {
    rate: f64,
    target_distance: u64,
    max_distance: u64,
    sigmoid: fn(f64) -> f64,
}

impl AdvancingProbability {
    pub fn new(rate: f64, target_distance: u64, max_distance: u64) -> Result<Self> {
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "rate must be positive and finite, got {rate}"
            )));
        }
        if target_distance > max_distance {
            return Err(Error::InvalidParameter(format!(
                "target distance {target_distance} exceeds maximum distance {max_distance}"
            )));
        }
        Ok(AdvancingProbability {
            rate,
            target_distance,
            max_distance,
            sigmoid: logistic,
        })
    }

    /// Replaces the logistic with another sigmoid. The analytic results in
    /// [`crate::chain`] assume the logistic.
    pub fn with_sigmoid(mut self, sigmoid: fn(f64) -> f64) -> Self {
        self.sigmoid = sigmoid;
        self
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn target_distance(&self) -> u64 {
        self.target_distance
    }

    pub fn max_distance(&self) -> u64 {
        self.max_distance
    }

    fn scaled(&self, d: u64) -> f64 {
        (d as f64 - self.target_distance as f64) / self.rate
    }

    pub fn phi(&self, d: u64) -> f64 {
        if d == 0 {
            0.0
        } else if d >= self.max_distance {
            1.0
        } else {
            (self.sigmoid)(self.scaled(d))
        }
    }

    /// `ln phi(d)` for the logistic, accurate where `phi` rounds to 0 or 1.
    pub fn ln_phi(&self, d: u64) -> f64 {
        if d == 0 {
            f64::NEG_INFINITY
        } else if d >= self.max_distance {
            0.0
        } else {
            ln_logistic(self.scaled(d))
        }
    }

    /// `ln(1 - phi(d))` for the logistic.
    pub fn ln_one_minus_phi(&self, d: u64) -> f64 {
        if d == 0 {
            0.0
        } else if d >= self.max_distance {
            f64::NEG_INFINITY
        } else {
            ln_logistic(-self.scaled(d))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopMode {
    FixedSteps(u64),
    /// Stop the first time the edit distance equals the target distance.
    UntilDistance,
    /// Stop the first time the current graph equals the target graph.
    UntilTarget,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationConfig {
    pub rate: f64,
    pub target_distance: u64,
    pub stop: StopMode,
    pub allow_false_edges: bool,
    pub seed: u64,
    /// Statistics stride; `None` picks one from the graph size.
    pub stat_sample_every: Option<u64>,
    /// Abort with [`Error::StepLimit`] after this many steps.
    pub step_limit: Option<u64>,
}

impl Default for InterpolationConfig {
    fn default() -> Self {
        InterpolationConfig {
            rate: 1.0,
            target_distance: 0,
            stop: StopMode::UntilTarget,
            allow_false_edges: true,
            seed: 0,
            stat_sample_every: None,
            step_limit: None,
        }
    }
}

impl InterpolationConfig {
    /// Exact interpolation: target distance 0, run until the target is reached.
    pub fn exact(rate: f64, seed: u64) -> Self {
        InterpolationConfig {
            rate,
            seed,
            ..Default::default()
        }
    }

    /// Statistics stride: the configured value, else 1 for graphs of at most
    /// 200 vertices and `max(1, steps / 2000)` beyond.
    pub fn stat_stride(&self, n: usize, steps: u64) -> u64 {
        match self.stat_sample_every {
            Some(k) => k.max(1),
            None if n <= 200 => 1,
            None => (steps / 2000).max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Advance,
    Regress,
    /// A regressing move was drawn but none was legal, so the step advanced.
    Fallback,
}

impl Direction {
    pub fn is_advancing(self) -> bool {
        !matches!(self, Direction::Regress)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub mv: SignedEdge,
    pub direction: Direction,
    /// Edit distance after the step.
    pub distance: u64,
}

/// Edit sequence applied to a starting graph.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub n: usize,
    pub directed: bool,
    pub initial_distance: u64,
    pub config: InterpolationConfig,
    pub steps: Vec<Step>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn final_distance(&self) -> u64 {
        self.steps
            .last()
            .map_or(self.initial_distance, |s| s.distance)
    }

    /// Edit distances before the first step and after each step.
    pub fn distances(&self) -> Vec<u64> {
        std::iter::once(self.initial_distance)
            .chain(self.steps.iter().map(|s| s.distance))
            .collect()
    }

    pub fn fallback_count(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| s.direction == Direction::Fallback)
            .count()
    }

    /// Applies every edit to a copy of `start`, checking that each one adds
    /// or deletes as its direction and sign require.
    pub fn replay(&self, start: &Graph) -> Result<Graph> {
        let mut g = start.clone();
        self.replay_with(&mut g, |_, _, _| {})?;
        Ok(g)
    }

    /// Replays in place, calling `visit(step_index, graph_after, step)` after each edit.
    pub fn replay_with<F>(&self, g: &mut Graph, mut visit: F) -> Result<()>
    where
        F: FnMut(usize, &Graph, &Step),
    {
        if g.n() != self.n || g.is_directed() != self.directed {
            return Err(Error::ReplayMismatch {
                step: 0,
                reason: "start graph shape differs from the trace header".into(),
            });
        }
        for (i, step) in self.steps.iter().enumerate() {
            let (u, v) = step.mv.edge;
            let expect_present = step.expected_presence_after();
            if g.toggle_edge(u, v)? != expect_present {
                return Err(Error::ReplayMismatch {
                    step: i,
                    reason: format!("edge ({u}, {v}) was not in the expected state"),
                });
            }
            visit(i, g, step);
        }
        Ok(())
    }
}

impl Step {
    /// Whether the edited edge is present once the step has been applied.
    pub fn expected_presence_after(&self) -> bool {
        use crate::ledger::Sign;
        // Advancing adds target edges and deletes the rest; regressing does the reverse.
        (self.mv.sign == Sign::Plus) == self.direction.is_advancing()
    }
}

/// One transition of the chain. Toggles an edge in `g`, updates the ledger
/// and returns the move made.
pub fn step<R: Rng + ?Sized>(
    g: &mut Graph,
    ledger: &mut MoveLedger,
    p: &AdvancingProbability,
    rng: &mut R,
    allow_false_edges: bool,
) -> Result<Step> {
    let d = ledger.distance();
    let coin: f64 = rng.gen();
    let (mv, direction) = if coin < p.phi(d) {
        (ledger.sample_advancing(rng)?, Direction::Advance)
    } else {
        match ledger.sample_regressing(rng, allow_false_edges) {
            Ok(mv) => (mv, Direction::Regress),
            Err(Error::RegressingExhausted) if d > 0 => {
                (ledger.sample_advancing(rng)?, Direction::Fallback)
            }
            Err(e) => return Err(e),
        }
    };
    ledger.apply(mv, direction.is_advancing())?;
    g.toggle_edge(mv.edge.0, mv.edge.1)?;
    Ok(Step {
        mv,
        direction,
        distance: ledger.distance(),
    })
}

/// A running interpolation that owns its state.
#[derive(Debug, Clone)]
pub struct Interpolator {
    current: Graph,
    ledger: MoveLedger,
    phi: AdvancingProbability,
    allow_false_edges: bool,
    rng: InterpRng,
}

impl Interpolator {
    pub fn new(start: &Graph, target: &Graph, cfg: &InterpolationConfig) -> Result<Self> {
        let ledger = MoveLedger::build(start, target)?;
        let phi = AdvancingProbability::new(cfg.rate, cfg.target_distance, ledger.universe())?;
        Ok(Interpolator {
            current: start.clone(),
            ledger,
            phi,
            allow_false_edges: cfg.allow_false_edges,
            rng: rng_from_seed(cfg.seed),
        })
    }

    pub fn step(&mut self) -> Result<Step> {
        step(
            &mut self.current,
            &mut self.ledger,
            &self.phi,
            &mut self.rng,
            self.allow_false_edges,
        )
    }

    pub fn distance(&self) -> u64 {
        self.ledger.distance()
    }

    pub fn graph(&self) -> &Graph {
        &self.current
    }

    pub fn ledger(&self) -> &MoveLedger {
        &self.ledger
    }

    pub fn advancing_probability(&self) -> &AdvancingProbability {
        &self.phi
    }
}

/// Runs the chain from `start` toward `target` until the configured stop condition.
pub fn interpolate(start: &Graph, target: &Graph, cfg: &InterpolationConfig) -> Result<Trace> {
    let mut run = Interpolator::new(start, target, cfg)?;
    let initial_distance = run.distance();
    let mut steps = Vec::new();
    let done = |d: u64, taken: u64| match cfg.stop {
        StopMode::FixedSteps(t) => taken >= t,
        StopMode::UntilDistance => d == cfg.target_distance,
        StopMode::UntilTarget => d == 0,
    };
    while !done(run.distance(), steps.len() as u64) {
        if let Some(limit) = cfg.step_limit {
            if steps.len() as u64 >= limit {
                return Err(Error::StepLimit(limit));
            }
        }
        steps.push(run.step()?);
    }
    Ok(Trace {
        n: start.n(),
        directed: start.is_directed(),
        initial_distance,
        config: *cfg,
        steps,
    })
}

/// Interpolates each consecutive pair of snapshots. Pair `i` runs with seed
/// `trial_seed(cfg.seed, i)`.
pub fn interpolate_sequence(snapshots: &[Graph], cfg: &InterpolationConfig) -> Result<Vec<Trace>> {
    if snapshots.len() < 2 {
        return Err(Error::InvalidParameter(
            "need at least two snapshots".into(),
        ));
    }
    snapshots
        .windows(2)
        .enumerate()
        .map(|(i, pair)| {
            let pair_cfg = InterpolationConfig {
                seed: trial_seed(cfg.seed, i as u64),
                ..*cfg
            };
            interpolate(&pair[0], &pair[1], &pair_cfg)
        })
        .collect()
}
