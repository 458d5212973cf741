//! Sampleable set of signed edges: the nonzero entries of `target - current`.
//!
//! Entries live in a dense array with a hash index into it, so membership,
//! insertion, swap-removal and uniform sampling are all O(1). Regressing moves
//! (the zero entries) are never stored; they are drawn by rejection against the
//! index, with an exact rank-based fallback when rejection is unlikely to succeed.

use std::collections::{HashMap, HashSet};

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph};

/// Rejection attempts before a regressing draw switches to the exact fallback.
pub const REJECTION_CAP: usize = 64;

/// Whether an edge belongs to the target graph (`Plus`) or not (`Minus`).
///
/// For an entry of the ledger this is the value of `target - current`: `Plus`
/// means the advancing move adds the edge, `Minus` that it deletes it. For a
/// regressing move it is the value the entry takes after the move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i8) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignedEdge {
    pub edge: Edge,
    pub sign: Sign,
}

impl SignedEdge {
    pub fn new(edge: Edge, sign: Sign) -> Self {
        SignedEdge { edge, sign }
    }
}

#[derive(Debug, Clone)]
pub struct MoveLedger {
    n: usize,
    directed: bool,
    universe: u64,
    entries: Vec<SignedEdge>,
    index: HashMap<Edge, usize>,
    target: HashSet<Edge>,
    target_list: Vec<Edge>,
    // entries signed Plus, i.e. target edges currently missing
    missing_target: usize,
}

impl MoveLedger {
    /// Initializes the ledger with the signed symmetric difference of `current` and `target`.
    pub fn build(current: &Graph, target: &Graph) -> Result<Self> {
        current.check_compatible(target)?;
        let mut entries: Vec<SignedEdge> = current
            .edges()
            .filter(|e| !target.contains(e))
            .map(|&e| SignedEdge::new(e, Sign::Minus))
            .chain(
                target
                    .edges()
                    .filter(|e| !current.contains(e))
                    .map(|&e| SignedEdge::new(e, Sign::Plus)),
            )
            .collect();
        // Hash-set iteration order is not reproducible; sampling must be.
        entries.sort_unstable();
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, se)| (se.edge, i))
            .collect();
        let missing_target = entries.iter().filter(|se| se.sign == Sign::Plus).count();
        Ok(MoveLedger {
            n: current.n(),
            directed: current.is_directed(),
            universe: current.max_edit_distance(),
            entries,
            index,
            target: target.edge_set().clone(),
            target_list: target.sorted_edges(),
            missing_target,
        })
    }

    /// Current edit distance (number of advancing moves).
    pub fn distance(&self) -> u64 {
        self.entries.len() as u64
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn universe(&self) -> u64 {
        self.universe
    }

    pub fn regressing_count(&self) -> u64 {
        self.universe - self.distance()
    }

    /// Regressing moves available when false edges are disallowed: shared edges.
    pub fn shared_edge_count(&self) -> usize {
        self.target.len() - self.missing_target
    }

    pub fn entries(&self) -> &[SignedEdge] {
        &self.entries
    }

    pub fn get(&self, edge: &Edge) -> Option<SignedEdge> {
        self.index.get(edge).map(|&i| self.entries[i])
    }

    pub fn in_target(&self, edge: &Edge) -> bool {
        self.target.contains(edge)
    }

    pub fn sample_advancing<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SignedEdge> {
        if self.entries.is_empty() {
            return Err(Error::NoAdvancingMove);
        }
        Ok(self.entries[rng.gen_range(0..self.entries.len())])
    }

    /// Draws a uniformly random regressing move.
    ///
    /// With `allow_false_edges` the draw is uniform over every zero entry; otherwise
    /// only over shared edges (deleting one of them). Returns
    /// [`Error::RegressingExhausted`] when the candidate set is empty.
    pub fn sample_regressing<R: Rng + ?Sized>(
        &self,
        rng: &mut R,
        allow_false_edges: bool,
    ) -> Result<SignedEdge> {
        if allow_false_edges {
            self.sample_zero_entry(rng)
        } else {
            self.sample_shared_edge(rng)
        }
    }

    fn signed(&self, edge: Edge) -> SignedEdge {
        let sign = if self.target.contains(&edge) {
            Sign::Plus
        } else {
            Sign::Minus
        };
        SignedEdge::new(edge, sign)
    }

    fn sample_zero_entry<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SignedEdge> {
        let zeros = self.regressing_count();
        if zeros == 0 {
            return Err(Error::RegressingExhausted);
        }
        if self.distance() <= self.universe / 2 {
            let mut attempts = 0;
            while attempts < REJECTION_CAP {
                let u = rng.gen_range(0..self.n);
                let v = rng.gen_range(0..self.n);
                if u == v {
                    continue;
                }
                attempts += 1;
                let e = if self.directed || u < v { (u, v) } else { (v, u) };
                if !self.index.contains_key(&e) {
                    return Ok(self.signed(e));
                }
            }
        }
        // Exact fallback: pick a rank among the zero slots and skip over the
        // sorted nonzero slots to locate it.
        let mut taken: Vec<u64> = self
            .entries
            .iter()
            .map(|se| slot_of(se.edge, self.n, self.directed))
            .collect();
        taken.sort_unstable();
        let mut slot = rng.gen_range(0..zeros);
        for &t in &taken {
            if t <= slot {
                slot += 1;
            } else {
                break;
            }
        }
        Ok(self.signed(edge_of(slot, self.n, self.directed)))
    }

    fn sample_shared_edge<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SignedEdge> {
        let shared = self.shared_edge_count();
        if shared == 0 {
            return Err(Error::RegressingExhausted);
        }
        for _ in 0..REJECTION_CAP {
            let e = self.target_list[rng.gen_range(0..self.target_list.len())];
            if !self.index.contains_key(&e) {
                return Ok(SignedEdge::new(e, Sign::Plus));
            }
        }
        let candidates: Vec<Edge> = self
            .target_list
            .iter()
            .copied()
            .filter(|e| !self.index.contains_key(e))
            .collect();
        debug_assert_eq!(candidates.len(), shared);
        Ok(SignedEdge::new(
            candidates[rng.gen_range(0..candidates.len())],
            Sign::Plus,
        ))
    }

    /// Records a move. An advancing move removes its entry (swap-remove); a
    /// regressing move inserts one.
    pub fn apply(&mut self, mv: SignedEdge, advancing: bool) -> Result<()> {
        let expected = self.signed(mv.edge).sign;
        if mv.sign != expected {
            return Err(Error::IllegalMove {
                edge: mv.edge,
                reason: "sign disagrees with target membership",
            });
        }
        if advancing {
            let Some(pos) = self.index.remove(&mv.edge) else {
                return Err(Error::IllegalMove {
                    edge: mv.edge,
                    reason: "advancing move on a zero entry",
                });
            };
            self.entries.swap_remove(pos);
            if let Some(moved) = self.entries.get(pos) {
                self.index.insert(moved.edge, pos);
            }
            if mv.sign == Sign::Plus {
                self.missing_target -= 1;
            }
        } else {
            if self.index.contains_key(&mv.edge) {
                return Err(Error::IllegalMove {
                    edge: mv.edge,
                    reason: "regressing move on a nonzero entry",
                });
            }
            self.index.insert(mv.edge, self.entries.len());
            self.entries.push(mv);
            if mv.sign == Sign::Plus {
                self.missing_target += 1;
            }
        }
        Ok(())
    }

    /// Entries in canonical order, for comparing ledgers built along different paths.
    pub fn sorted_entries(&self) -> Vec<SignedEdge> {
        let mut v = self.entries.clone();
        v.sort_unstable();
        v
    }

    #[cfg(test)]
    fn check_index(&self) {
        assert_eq!(self.index.len(), self.entries.len());
        for (i, se) in self.entries.iter().enumerate() {
            assert_eq!(self.index[&se.edge], i);
        }
    }
}

/// Linear slot of an edge among all `max_edit_distance` possible edges.
pub fn slot_of(edge: Edge, n: usize, directed: bool) -> u64 {
    let (u, v) = (edge.0 as u64, edge.1 as u64);
    let n = n as u64;
    if directed {
        u * (n - 1) + if v < u { v } else { v - 1 }
    } else {
        // pairs (u, v) with u < v, row by row
        u * n - u * (u + 1) / 2 + (v - u - 1)
    }
}

pub fn edge_of(slot: u64, n: usize, directed: bool) -> Edge {
    let n64 = n as u64;
    if directed {
        let u = slot / (n64 - 1);
        let r = slot % (n64 - 1);
        let v = if r < u { r } else { r + 1 };
        (u as usize, v as usize)
    } else {
        let mut u = 0u64;
        let mut rest = slot;
        // row u holds n - 1 - u slots
        loop {
            let row = n64 - 1 - u;
            if rest < row {
                return (u as usize, (u + 1 + rest) as usize);
            }
            rest -= row;
            u += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn g(n: usize, edges: &[Edge]) -> Graph {
        Graph::from_edges(n, false, edges.iter().copied()).unwrap()
    }

    /// Pearson chi-square statistic against equal expected counts.
    fn chi_square(counts: &[u64]) -> f64 {
        let total: u64 = counts.iter().sum();
        let expected = total as f64 / counts.len() as f64;
        counts
            .iter()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum()
    }

    // Upper 0.001 quantiles of the chi-square distribution.
    const CHI2_999_DF1: f64 = 10.828;
    const CHI2_999_DF2: f64 = 13.816;

    #[test]
    fn build_examples() {
        let a = g(3, &[(0, 1)]);
        assert!(MoveLedger::build(&a, &a).unwrap().is_empty());

        let l = MoveLedger::build(&Graph::undirected(3), &a).unwrap();
        assert_eq!(l.entries(), &[SignedEdge::new((0, 1), Sign::Plus)]);

        let b = g(3, &[(1, 2)]);
        let l = MoveLedger::build(&a, &b).unwrap();
        assert_eq!(
            l.sorted_entries(),
            vec![
                SignedEdge::new((0, 1), Sign::Minus),
                SignedEdge::new((1, 2), Sign::Plus)
            ]
        );
        assert_eq!(l.distance(), 2);
        assert_eq!(l.regressing_count(), 1);
        assert!(MoveLedger::build(&a, &Graph::undirected(4)).is_err());
    }

    #[test]
    fn sample_advancing_examples() {
        let a = g(3, &[(0, 1)]);
        let l = MoveLedger::build(&Graph::undirected(3), &a).unwrap();
        let mut r = rng(1);
        for _ in 0..100 {
            assert_eq!(
                l.sample_advancing(&mut r).unwrap(),
                SignedEdge::new((0, 1), Sign::Plus)
            );
        }
        let empty = MoveLedger::build(&a, &a).unwrap();
        assert!(matches!(
            empty.sample_advancing(&mut r),
            Err(Error::NoAdvancingMove)
        ));
    }

    #[test]
    fn sample_advancing_is_uniform() {
        let l = MoveLedger::build(&g(3, &[(0, 1)]), &g(3, &[(1, 2)])).unwrap();
        let mut r = rng(7);
        let mut counts = [0u64; 2];
        let draws = 100_000;
        for _ in 0..draws {
            let se = l.sample_advancing(&mut r).unwrap();
            counts[usize::from(se.edge == (1, 2))] += 1;
        }
        for &c in &counts {
            assert!((c as f64 / draws as f64 - 0.5).abs() < 0.01);
        }
        assert!(chi_square(&counts) < CHI2_999_DF1);
    }

    #[test]
    fn sample_regressing_examples() {
        let k2 = g(2, &[(0, 1)]);
        let l = MoveLedger::build(&k2, &k2).unwrap();
        let mut r = rng(3);
        for _ in 0..50 {
            assert_eq!(
                l.sample_regressing(&mut r, true).unwrap(),
                SignedEdge::new((0, 1), Sign::Plus)
            );
        }

        let empty = Graph::undirected(3);
        let l = MoveLedger::build(&empty, &empty).unwrap();
        let mut counts = [0u64; 3];
        let draws = 100_000;
        for _ in 0..draws {
            let se = l.sample_regressing(&mut r, true).unwrap();
            assert_eq!(se.sign, Sign::Minus);
            counts[slot_of(se.edge, 3, false) as usize] += 1;
        }
        for &c in &counts {
            assert!((c as f64 / draws as f64 - 1.0 / 3.0).abs() < 0.01);
        }
        assert!(chi_square(&counts) < CHI2_999_DF2);

        // nothing shared with the target: no deletable edge
        let l = MoveLedger::build(&g(3, &[(0, 1)]), &g(3, &[(1, 2)])).unwrap();
        assert!(matches!(
            l.sample_regressing(&mut r, false),
            Err(Error::RegressingExhausted)
        ));
        let l = MoveLedger::build(&empty, &empty).unwrap();
        assert!(matches!(
            l.sample_regressing(&mut r, false),
            Err(Error::RegressingExhausted)
        ));
    }

    #[test]
    fn dense_fallback_is_uniform_over_zero_entries() {
        // complete start, empty target: 9 of 10 slots nonzero after one regress
        let mut start = Graph::complete(5);
        start.remove_edge(1, 3).unwrap();
        let l = MoveLedger::build(&start, &Graph::undirected(5)).unwrap();
        assert_eq!(l.regressing_count(), 1);
        let mut r = rng(11);
        for _ in 0..20 {
            assert_eq!(
                l.sample_regressing(&mut r, true).unwrap(),
                SignedEdge::new((1, 3), Sign::Minus)
            );
        }

        // three zeros among 10 slots, far past the rejection regime
        let mut start = Graph::complete(5);
        for &(u, v) in &[(0, 4), (1, 2), (2, 3)] {
            start.remove_edge(u, v).unwrap();
        }
        let l = MoveLedger::build(&start, &Graph::undirected(5)).unwrap();
        let mut counts = HashMap::new();
        for _ in 0..30_000 {
            *counts
                .entry(l.sample_regressing(&mut r, true).unwrap().edge)
                .or_insert(0u64) += 1;
        }
        assert_eq!(counts.len(), 3);
        let c: Vec<u64> = counts.values().copied().collect();
        assert!(chi_square(&c) < CHI2_999_DF2);
    }

    #[test]
    fn rejection_draws_are_cheap_when_sparse() {
        // Count raw universe draws needed per accepted regressing move.
        let n = 40;
        let mut r = rng(5);
        let a = crate::generators::erdos_renyi(n, 0.05, 1);
        let b = crate::generators::erdos_renyi(n, 0.05, 2);
        let l = MoveLedger::build(&a, &b).unwrap();
        assert!(l.distance() <= l.universe() / 2);
        let accept = l.regressing_count() as f64 / l.universe() as f64;
        let trials = 20_000;
        let mut rejected = 0u64;
        for _ in 0..trials {
            loop {
                let u = r.gen_range(0..n);
                let v = r.gen_range(0..n);
                if u == v {
                    continue;
                }
                let e = (u.min(v), u.max(v));
                if l.get(&e).is_none() {
                    break;
                }
                rejected += 1;
            }
        }
        let per_draw = rejected as f64 / trials as f64;
        assert!(per_draw <= 1.0, "{per_draw}");
        assert!((per_draw - (1.0 / accept - 1.0)).abs() < 0.05);
    }

    #[test]
    fn apply_examples() {
        let a = g(3, &[(0, 1)]);
        let mut l = MoveLedger::build(&Graph::undirected(3), &a).unwrap();
        l.apply(SignedEdge::new((0, 1), Sign::Plus), true).unwrap();
        assert!(l.is_empty());

        let mut l = MoveLedger::build(&a, &a).unwrap();
        l.apply(SignedEdge::new((0, 1), Sign::Plus), false).unwrap();
        assert_eq!(l.entries(), &[SignedEdge::new((0, 1), Sign::Plus)]);

        let b = g(3, &[(1, 2)]);
        let mut l = MoveLedger::build(&a, &b).unwrap();
        let orig = l.sorted_entries();
        let mv = SignedEdge::new((0, 1), Sign::Minus);
        l.apply(mv, true).unwrap();
        l.apply(mv, false).unwrap();
        assert_eq!(l.sorted_entries(), orig);
    }

    #[test]
    fn apply_rejects_illegal_moves() {
        let a = g(3, &[(0, 1)]);
        let mut l = MoveLedger::build(&a, &a).unwrap();
        assert!(l.apply(SignedEdge::new((0, 1), Sign::Plus), true).is_err());
        assert!(l.apply(SignedEdge::new((0, 1), Sign::Minus), false).is_err());
        l.apply(SignedEdge::new((1, 2), Sign::Minus), false).unwrap();
        assert!(l.apply(SignedEdge::new((1, 2), Sign::Minus), false).is_err());
    }

    #[test]
    fn slots_roundtrip() {
        for &directed in &[false, true] {
            for n in 2..8 {
                let m = crate::graph::max_edit_distance(n, directed);
                for s in 0..m {
                    let e = edge_of(s, n, directed);
                    assert_ne!(e.0, e.1);
                    assert!(directed || e.0 < e.1);
                    assert_eq!(slot_of(e, n, directed), s);
                }
            }
        }
    }

    #[test]
    fn incremental_matches_rebuild() {
        use crate::graph::max_edit_distance;
        for seed in 0..40u64 {
            let mut r = rng(seed);
            let n = r.gen_range(2..=8);
            let directed = seed % 4 == 3;
            let rand_graph = |r: &mut ChaCha8Rng| {
                let mut gr = Graph::new(n, directed);
                for s in 0..max_edit_distance(n, directed) {
                    if r.gen_bool(0.4) {
                        let e = edge_of(s, n, directed);
                        gr.add_edge(e.0, e.1).unwrap();
                    }
                }
                gr
            };
            let mut current = rand_graph(&mut r);
            let target = rand_graph(&mut r);
            let allow = seed % 2 == 0;
            let mut l = MoveLedger::build(&current, &target).unwrap();
            for _ in 0..200 {
                let advance = r.gen_bool(0.5);
                let picked = if advance {
                    l.sample_advancing(&mut r)
                } else {
                    l.sample_regressing(&mut r, allow)
                };
                let Ok(mv) = picked else { continue };
                l.apply(mv, advance).unwrap();
                current.toggle_edge(mv.edge.0, mv.edge.1).unwrap();
                l.check_index();
                let rebuilt = MoveLedger::build(&current, &target).unwrap();
                assert_eq!(l.sorted_entries(), rebuilt.sorted_entries());
                assert_eq!(l.shared_edge_count(), rebuilt.shared_edge_count());
            }
        }
    }
}
