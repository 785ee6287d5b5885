//! Exact solvers over hypergraphs: maximum (weighted) independent sets,
//! enumeration of maximal and maximum independent sets, bounded-depth
//! hitting sets, and the membership tests "in every / in some maximum
//! independent set".
//!
//! Everything is phrased through hitting sets (vertex covers of the
//! hypergraph): the complement of a hitting set is an independent set, the
//! complement of a minimal one is maximal, and of a minimum one is maximum.
//! The searches branch on the smallest hyperedge not yet hit. In the `i`-th
//! branch the `i`-th vertex of that edge joins the hitting set and the
//! earlier ones are committed to the independent set, so every hitting set
//! is reached along exactly one path.

use std::fmt;
use std::ops::{Add, Sub};
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::hypergraph::{Hypergraph, HypergraphError, VertexId, VertexSet};
use crate::model::Weight;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("solve budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
}

/// Resource caps for the exact searches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveBudget {
    /// Largest hypergraph (vertex count) a solver accepts.
    pub max_vertices: usize,
    /// Cap on the hitting-set search depth `k`.
    pub max_depth: usize,
    pub time_limit: Option<Duration>,
    /// Cap on search-tree nodes per call.
    pub max_nodes: Option<u64>,
}

impl Default for SolveBudget {
    fn default() -> Self {
        SolveBudget {
            max_vertices: 1_000_000,
            max_depth: usize::MAX,
            time_limit: None,
            max_nodes: None,
        }
    }
}

/// Search-tree statistics of one solver call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub max_depth: usize,
}

impl SearchStats {
    fn absorb(&mut self, other: SearchStats) {
        self.nodes += other.nodes;
        self.max_depth = self.max_depth.max(other.max_depth);
    }
}

impl fmt::Display for SearchStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "nodes={} depth={}", self.nodes, self.max_depth)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaResult {
    pub size: usize,
    pub witness: VertexSet,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedAlphaResult {
    pub value: Weight,
    pub witness: VertexSet,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HittingSetResult {
    pub size: usize,
    pub witness: VertexSet,
    pub stats: SearchStats,
}

pub(crate) trait Cost: Copy + Ord + Add<Output = Self> + Sub<Output = Self> {
    const ZERO: Self;
}

impl Cost for u64 {
    const ZERO: Self = 0;
}

impl Cost for Weight {
    const ZERO: Self = Weight::ZERO;
}

/// Local dense view of the non-isolated part of a hypergraph.
struct Problem<C> {
    ids: Vec<VertexId>,
    edges: Vec<Vec<usize>>,
    incidence: Vec<Vec<usize>>,
    cost: Vec<C>,
}

impl<C: Cost> Problem<C> {
    fn new(h: &Hypergraph, cost_of: impl Fn(VertexId) -> C) -> Self {
        let mut ids: Vec<VertexId> = h.edges().iter().flatten().copied().collect();
        ids.sort_unstable();
        ids.dedup();
        let local = |v: &VertexId| ids.binary_search(v).unwrap();
        let edges: Vec<Vec<usize>> = h
            .edges()
            .iter()
            .map(|e| e.iter().map(local).collect())
            .collect();
        let mut incidence = vec![Vec::new(); ids.len()];
        for (ei, e) in edges.iter().enumerate() {
            for &v in e {
                incidence[v].push(ei);
            }
        }
        let cost = ids.iter().map(|&v| cost_of(v)).collect();
        Problem {
            ids,
            edges,
            incidence,
            cost,
        }
    }
}

/// Runs `f` with at least `RED_ZONE` bytes of stack left, growing the
/// stack on the heap when needed. The searches recurse once per chosen
/// vertex, which can be deep on large inputs.
fn with_stack<R>(f: impl FnOnce() -> R) -> R {
    const RED_ZONE: usize = 64 * 1024;
    const GROW_BY: usize = 4 * 1024 * 1024;
    stacker::maybe_grow(RED_ZONE, GROW_BY, f)
}

/// A hitting set built by repeatedly taking the vertex that hits the most
/// unhit edges (cheaper first on ties), then dropping vertices made
/// redundant. Seeds branch and bound with a finite upper bound.
fn greedy_cover<C: Cost>(p: &Problem<C>) -> (C, Vec<usize>) {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let mut hit = vec![false; p.edges.len()];
    let mut degree: Vec<usize> = p.incidence.iter().map(Vec::len).collect();
    let mut heap: BinaryHeap<(usize, Reverse<C>, Reverse<usize>)> = (0..p.ids.len())
        .map(|v| (degree[v], Reverse(p.cost[v]), Reverse(v)))
        .collect();
    let mut chosen = Vec::new();
    while let Some((d, _, Reverse(v))) = heap.pop() {
        if d == 0 {
            break;
        }
        // degrees only shrink, so a stale entry is re-queued with its
        // current value
        if d != degree[v] {
            heap.push((degree[v], Reverse(p.cost[v]), Reverse(v)));
            continue;
        }
        chosen.push(v);
        for &e in &p.incidence[v] {
            if !hit[e] {
                hit[e] = true;
                for &u in &p.edges[e] {
                    degree[u] -= 1;
                }
            }
        }
    }
    let mut hits = vec![0u32; p.edges.len()];
    for &v in &chosen {
        for &e in &p.incidence[v] {
            hits[e] += 1;
        }
    }
    // costliest first, drop any vertex all of whose edges are hit twice
    chosen.sort_by_key(|&v| Reverse(p.cost[v]));
    chosen.retain(|&v| {
        let redundant = p.incidence[v].iter().all(|&e| hits[e] > 1);
        if redundant {
            for &e in &p.incidence[v] {
                hits[e] -= 1;
            }
        }
        !redundant
    });
    let cost = chosen.iter().fold(C::ZERO, |acc, &v| acc + p.cost[v]);
    (cost, chosen)
}

enum Pick {
    AllHit,
    Infeasible,
    Edge(usize),
}

struct Search<'a, C> {
    p: &'a Problem<C>,
    in_cover: Vec<bool>,
    banned: Vec<bool>,
    hits: Vec<u32>,
    chosen: Vec<usize>,
    stamp: Vec<u32>,
    epoch: u32,
    stats: SearchStats,
    budget: &'a SolveBudget,
    /// Deadline from `budget.time_limit`. The clock is read only when a
    /// limit is set, because some targets (plain wasm32) have no clock.
    deadline: Option<Instant>,
}

impl<'a, C: Cost> Search<'a, C> {
    fn new(p: &'a Problem<C>, budget: &'a SolveBudget) -> Self {
        Search {
            p,
            in_cover: vec![false; p.ids.len()],
            banned: vec![false; p.ids.len()],
            hits: vec![0; p.edges.len()],
            chosen: Vec::new(),
            stamp: vec![0; p.ids.len()],
            epoch: 0,
            stats: SearchStats::default(),
            budget,
            deadline: budget.time_limit.map(|limit| Instant::now() + limit),
        }
    }

    fn tick(&mut self) -> Result<(), SolveError> {
        self.stats.nodes += 1;
        self.stats.max_depth = self.stats.max_depth.max(self.chosen.len());
        if let Some(max) = self.budget.max_nodes {
            if self.stats.nodes > max {
                return Err(SolveError::BudgetExceeded(format!(
                    "more than {max} search nodes"
                )));
            }
        }
        if self.stats.nodes.is_multiple_of(1024) {
            if let Some(deadline) = self.deadline {
                if Instant::now() > deadline {
                    let limit = self.budget.time_limit.unwrap_or_default();
                    return Err(SolveError::BudgetExceeded(format!("time limit {limit:?}")));
                }
            }
        }
        Ok(())
    }

    fn add(&mut self, v: usize) {
        self.in_cover[v] = true;
        self.chosen.push(v);
        for &e in &self.p.incidence[v] {
            self.hits[e] += 1;
        }
    }

    fn remove(&mut self, v: usize) {
        self.in_cover[v] = false;
        self.chosen.pop();
        for &e in &self.p.incidence[v] {
            self.hits[e] -= 1;
        }
    }

    /// The unhit edge with fewest selectable vertices (ties: lowest index).
    fn pick(&self) -> Pick {
        let mut best: Option<(usize, usize)> = None;
        for (ei, e) in self.p.edges.iter().enumerate() {
            if self.hits[ei] > 0 {
                continue;
            }
            let free = e.iter().filter(|&&v| !self.banned[v]).count();
            if free == 0 {
                return Pick::Infeasible;
            }
            if best.is_none_or(|(_, f)| free < f) {
                best = Some((ei, free));
                if free == 1 {
                    break;
                }
            }
        }
        match best {
            Some((ei, _)) => Pick::Edge(ei),
            None => Pick::AllHit,
        }
    }

    fn free_vertices(&self, ei: usize) -> Vec<usize> {
        self.p.edges[ei]
            .iter()
            .copied()
            .filter(|&v| !self.banned[v])
            .collect()
    }

    /// Lower bound on the cost still needed: a greedy packing of pairwise
    /// disjoint unhit edges, each charged its cheapest selectable vertex.
    fn packing_bound(&mut self) -> C {
        self.epoch += 1;
        let epoch = self.epoch;
        let mut lb = C::ZERO;
        for (ei, e) in self.p.edges.iter().enumerate() {
            if self.hits[ei] > 0 {
                continue;
            }
            if e.iter().any(|&v| !self.banned[v] && self.stamp[v] == epoch) {
                continue;
            }
            let mut cheapest: Option<C> = None;
            for &v in e {
                if !self.banned[v] {
                    self.stamp[v] = epoch;
                    let c = self.p.cost[v];
                    cheapest = Some(cheapest.map_or(c, |m: C| m.min(c)));
                }
            }
            if let Some(c) = cheapest {
                lb = lb + c;
            }
        }
        lb
    }

    fn every_chosen_has_private_edge(&self) -> bool {
        self.chosen
            .iter()
            .all(|&c| self.p.incidence[c].iter().any(|&e| self.hits[e] == 1))
    }

    fn min_cover(&mut self, cur: C, best: &mut Option<(C, Vec<usize>)>) -> Result<(), SolveError> {
        self.tick()?;
        let ei = match self.pick() {
            Pick::Infeasible => return Ok(()),
            Pick::AllHit => {
                if best.as_ref().is_none_or(|(b, _)| cur < *b) {
                    *best = Some((cur, self.chosen.clone()));
                }
                return Ok(());
            }
            Pick::Edge(ei) => ei,
        };
        if let Some((b, _)) = best {
            let b = *b;
            if cur + self.packing_bound() >= b {
                return Ok(());
            }
        }
        let free = self.free_vertices(ei);
        let mut result = Ok(());
        for &v in &free {
            self.add(v);
            result = with_stack(|| self.min_cover(cur + self.p.cost[v], best));
            self.remove(v);
            self.banned[v] = true;
            if result.is_err() {
                break;
            }
        }
        for &v in &free {
            self.banned[v] = false;
        }
        result
    }

    fn minimal_covers(
        &mut self,
        cur: C,
        bound: Option<C>,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<(), SolveError> {
        self.tick()?;
        if let Some(b) = bound {
            if cur > b {
                return Ok(());
            }
        }
        let ei = match self.pick() {
            Pick::Infeasible => return Ok(()),
            Pick::AllHit => {
                out.push(self.chosen.clone());
                return Ok(());
            }
            Pick::Edge(ei) => ei,
        };
        if let Some(b) = bound {
            if cur + self.packing_bound() > b {
                return Ok(());
            }
        }
        let free = self.free_vertices(ei);
        let mut result = Ok(());
        for &v in &free {
            self.add(v);
            if self.every_chosen_has_private_edge() {
                result = with_stack(|| self.minimal_covers(cur + self.p.cost[v], bound, out));
            }
            self.remove(v);
            self.banned[v] = true;
            if result.is_err() {
                break;
            }
        }
        for &v in &free {
            self.banned[v] = false;
        }
        result
    }
}

impl Search<'_, u64> {
    /// Bounded search tree: is there a hitting set with at most `k` more
    /// vertices? On success `chosen` holds one.
    fn decide(&mut self, k: usize) -> Result<bool, SolveError> {
        self.tick()?;
        let ei = match self.pick() {
            Pick::AllHit => return Ok(true),
            Pick::Infeasible => return Ok(false),
            Pick::Edge(ei) => ei,
        };
        if k == 0 || self.packing_bound() > k as u64 {
            return Ok(false);
        }
        let free = self.free_vertices(ei);
        let mut found = Ok(false);
        let mut banned_here = Vec::new();
        for &v in &free {
            self.add(v);
            found = with_stack(|| self.decide(k - 1));
            if matches!(found, Ok(true)) {
                break;
            }
            self.remove(v);
            if found.is_err() {
                break;
            }
            self.banned[v] = true;
            banned_here.push(v);
        }
        for v in banned_here {
            self.banned[v] = false;
        }
        found
    }
}

fn check_size(h: &Hypergraph, budget: &SolveBudget) -> Result<(), SolveError> {
    if h.vertex_count() > budget.max_vertices {
        return Err(SolveError::BudgetExceeded(format!(
            "{} vertices exceed the limit of {}",
            h.vertex_count(),
            budget.max_vertices
        )));
    }
    Ok(())
}

fn to_ids<C>(p: &Problem<C>, local: &[usize]) -> VertexSet {
    local.iter().map(|&v| p.ids[v]).collect()
}

fn complement(h: &Hypergraph, cover: &VertexSet) -> VertexSet {
    h.vertices()
        .iter()
        .copied()
        .filter(|v| !cover.contains(v))
        .collect()
}

/// Minimum total cost of a hitting set, with one optimal set.
fn min_cover<C: Cost>(
    h: &Hypergraph,
    cost_of: impl Fn(VertexId) -> C,
    budget: &SolveBudget,
) -> Result<(C, VertexSet, SearchStats), SolveError> {
    check_size(h, budget)?;
    let p = Problem::new(h, cost_of);
    let mut s = Search::new(&p, budget);
    let mut best = Some(greedy_cover(&p));
    s.min_cover(C::ZERO, &mut best)?;
    let stats = s.stats;
    match best {
        Some((c, cover)) => Ok((c, to_ids(&p, &cover), stats)),
        // only possible when an edge is empty, which Hypergraph forbids
        None => unreachable!("every hypergraph has a hitting set"),
    }
}

/// Minimum hitting-set size `tau(h)`, unbounded.
pub fn tau(h: &Hypergraph, budget: &SolveBudget) -> Result<usize, SolveError> {
    Ok(min_cover(h, |_| 1u64, budget)?.0 as usize)
}

/// Maximum independent set size `alpha(h) = |V| - tau(h)`.
pub fn alpha_size(h: &Hypergraph, budget: &SolveBudget) -> Result<usize, SolveError> {
    Ok(h.vertex_count() - tau(h, budget)?)
}

/// Maximum weight of an independent set.
pub fn alpha_weight(
    h: &Hypergraph,
    w: impl Fn(VertexId) -> Weight,
    budget: &SolveBudget,
) -> Result<Weight, SolveError> {
    let total: Weight = h.vertices().iter().map(|&v| w(v)).sum();
    Ok(total - min_cover(h, &w, budget)?.0)
}

/// Lexicographically least optimal independent set: scan vertices in id
/// order and keep each one whenever an optimum containing it remains.
fn least_optimal_witness<C: Cost>(
    h: &Hypergraph,
    cost_of: &impl Fn(VertexId) -> C,
    target: C,
    budget: &SolveBudget,
    stats: &mut SearchStats,
) -> Result<VertexSet, SolveError> {
    let value = |g: &Hypergraph, stats: &mut SearchStats| -> Result<C, SolveError> {
        let total = g.vertices().iter().fold(C::ZERO, |a, &v| a + cost_of(v));
        let (c, _, st) = min_cover(g, cost_of, budget)?;
        stats.absorb(st);
        Ok(total - c)
    };
    let mut g = h.clone();
    let mut remaining = target;
    let mut witness = VertexSet::new();
    let order: Vec<VertexId> = h.vertices().to_vec();
    for v in order {
        if !g.contains_vertex(v) {
            continue;
        }
        let isolated = !g.edges().iter().any(|e| e.contains(&v));
        if isolated {
            witness.insert(v);
            remaining = remaining - cost_of(v);
            g = g.restrict(&VertexSet::from([v]));
            continue;
        }
        match g.condition_on(v) {
            Ok(cond) if value(&cond, stats)? + cost_of(v) == remaining => {
                witness.insert(v);
                remaining = remaining - cost_of(v);
                g = cond;
            }
            Ok(_) | Err(HypergraphError::ForcedOut(_)) => {
                g = g.restrict(&VertexSet::from([v]));
            }
            Err(e) => return Err(e.into()),
        }
    }
    debug_assert!(remaining == C::ZERO);
    Ok(witness)
}

/// Exact maximum independent set with its lexicographically least witness.
pub fn alpha(h: &Hypergraph, budget: &SolveBudget) -> Result<AlphaResult, SolveError> {
    let unit = |_| 1u64;
    let (c, _, mut stats) = min_cover(h, unit, budget)?;
    let size = h.vertex_count() - c as usize;
    let witness = least_optimal_witness(h, &unit, size as u64, budget, &mut stats)?;
    Ok(AlphaResult {
        size,
        witness,
        stats,
    })
}

/// Maximum-weight independent set with its lexicographically least witness.
pub fn alpha_weighted(
    h: &Hypergraph,
    w: impl Fn(VertexId) -> Weight,
    budget: &SolveBudget,
) -> Result<WeightedAlphaResult, SolveError> {
    let total: Weight = h.vertices().iter().map(|&v| w(v)).sum();
    let (c, _, mut stats) = min_cover(h, &w, budget)?;
    let value = total - c;
    let witness = least_optimal_witness(h, &w, value, budget, &mut stats)?;
    Ok(WeightedAlphaResult {
        value,
        witness,
        stats,
    })
}

fn covers_to_sorted_sets<C>(
    h: &Hypergraph,
    p: &Problem<C>,
    covers: Vec<Vec<usize>>,
) -> Vec<VertexSet> {
    let mut out: Vec<VertexSet> = covers
        .iter()
        .map(|c| complement(h, &to_ids(p, c)))
        .collect();
    out.sort();
    out
}

/// Every maximal independent set, once each, in canonical order.
pub fn enumerate_maximal_is(
    h: &Hypergraph,
    budget: &SolveBudget,
) -> Result<Vec<VertexSet>, SolveError> {
    check_size(h, budget)?;
    let p = Problem::new(h, |_| 1u64);
    let mut s = Search::new(&p, budget);
    let mut covers = Vec::new();
    s.minimal_covers(0, None, &mut covers)?;
    Ok(covers_to_sorted_sets(h, &p, covers))
}

fn enumerate_optimal<C: Cost>(
    h: &Hypergraph,
    cost_of: impl Fn(VertexId) -> C,
    budget: &SolveBudget,
) -> Result<Vec<VertexSet>, SolveError> {
    check_size(h, budget)?;
    let (best, _, _) = min_cover(h, &cost_of, budget)?;
    let p = Problem::new(h, &cost_of);
    let mut s = Search::new(&p, budget);
    let mut covers = Vec::new();
    s.minimal_covers(C::ZERO, Some(best), &mut covers)?;
    let covers = covers
        .into_iter()
        .filter(|c| c.iter().fold(C::ZERO, |a, &v| a + p.cost[v]) == best)
        .collect();
    Ok(covers_to_sorted_sets(h, &p, covers))
}

/// Every maximum-cardinality independent set, in canonical order. Same
/// output as filtering [`enumerate_maximal_is`] to size `alpha`, but the
/// search is cut at cover size `tau`.
pub fn enumerate_maximum_is(
    h: &Hypergraph,
    budget: &SolveBudget,
) -> Result<Vec<VertexSet>, SolveError> {
    enumerate_optimal(h, |_| 1u64, budget)
}

/// Every maximum-weight independent set, in canonical order.
pub fn enumerate_max_weight_is(
    h: &Hypergraph,
    w: impl Fn(VertexId) -> Weight,
    budget: &SolveBudget,
) -> Result<Vec<VertexSet>, SolveError> {
    enumerate_optimal(h, w, budget)
}

/// Size of a minimum hitting set if it is at most `k_max`, found by binary
/// search over `k` on the bounded search tree. `None` means every hitting
/// set is larger than `k_max`.
pub fn min_hitting_set(h: &Hypergraph, k_max: usize) -> Option<HittingSetResult> {
    min_hitting_set_with(h, k_max, &SolveBudget::default())
        .ok()
        .flatten()
}

pub fn min_hitting_set_with(
    h: &Hypergraph,
    k_max: usize,
    budget: &SolveBudget,
) -> Result<Option<HittingSetResult>, SolveError> {
    let p = Problem::new(h, |_| 1u64);
    let mut stats = SearchStats::default();
    let mut run = |k: usize| -> Result<Option<VertexSet>, SolveError> {
        let mut s = Search::new(&p, budget);
        let found = s.decide(k)?;
        stats.absorb(s.stats);
        Ok(found.then(|| to_ids(&p, &s.chosen)))
    };
    let Some(mut witness) = run(k_max)? else {
        return Ok(None);
    };
    let (mut lo, mut hi) = (0usize, witness.len().min(k_max));
    // invariant: a hitting set of size hi exists (witness), none below lo
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match run(mid)? {
            Some(w) => {
                hi = w.len().min(mid);
                witness = w;
            }
            None => lo = mid + 1,
        }
    }
    Ok(Some(HittingSetResult {
        size: hi,
        witness,
        stats,
    }))
}

/// True iff `v` lies in every maximum independent set, decided as
/// `tau(h) == tau(h - v)`.
pub fn in_all_maximum_is(
    h: &Hypergraph,
    v: VertexId,
    budget: &SolveBudget,
) -> Result<bool, SolveError> {
    if !h.contains_vertex(v) {
        return Err(HypergraphError::UnknownVertex(v).into());
    }
    let without = h.restrict(&VertexSet::from([v]));
    Ok(tau(h, budget)? == tau(&without, budget)?)
}

/// True iff some maximum independent set contains `v`, decided as
/// `1 + alpha(condition_on(h, v)) == alpha(h)`.
pub fn in_some_maximum_is(
    h: &Hypergraph,
    v: VertexId,
    budget: &SolveBudget,
) -> Result<bool, SolveError> {
    match h.condition_on(v) {
        Ok(cond) => Ok(1 + alpha_size(&cond, budget)? == alpha_size(h, budget)?),
        Err(HypergraphError::ForcedOut(_)) => Ok(false),
        Err(e) => Err(e.into()),
    }
}

/// Weighted membership: `v` is in every maximum-weight independent set iff
/// deleting it lowers the optimum.
pub fn in_all_max_weight_is(
    h: &Hypergraph,
    v: VertexId,
    w: impl Fn(VertexId) -> Weight,
    budget: &SolveBudget,
) -> Result<bool, SolveError> {
    if !h.contains_vertex(v) {
        return Err(HypergraphError::UnknownVertex(v).into());
    }
    let without = h.restrict(&VertexSet::from([v]));
    Ok(alpha_weight(&without, &w, budget)? < alpha_weight(h, &w, budget)?)
}

pub fn in_some_max_weight_is(
    h: &Hypergraph,
    v: VertexId,
    w: impl Fn(VertexId) -> Weight,
    budget: &SolveBudget,
) -> Result<bool, SolveError> {
    match h.condition_on(v) {
        Ok(cond) => Ok(alpha_weight(&cond, &w, budget)? + w(v) == alpha_weight(h, &w, budget)?),
        Err(HypergraphError::ForcedOut(_)) => Ok(false),
        Err(e) => Err(e.into()),
    }
}

/// Commits every vertex of `include` to the independent set and deletes
/// every vertex of `exclude`. Returns the reduced hypergraph and the number
/// of vertices removed besides `include` (forced-out neighbours and
/// `exclude`), or `None` if the constraints clash.
pub(crate) fn fix_vertices(
    h: &Hypergraph,
    include: &[VertexId],
    exclude: &[VertexId],
) -> Result<Option<Hypergraph>, SolveError> {
    let mut g = h.clone();
    let ex: VertexSet = exclude.iter().copied().collect();
    // conditioning removes a vertex, so a repeated one must be seen once
    let include: Vec<VertexId> = include
        .iter()
        .copied()
        .collect::<VertexSet>()
        .into_iter()
        .collect();
    if include.iter().any(|v| ex.contains(v)) {
        return Ok(None);
    }
    for &v in &include {
        if !g.contains_vertex(v) {
            return Ok(None);
        }
        let forced = g.forced_out_by(v);
        if forced.iter().any(|u| include.contains(u)) {
            return Ok(None);
        }
        g = match g.condition_on(v) {
            Ok(c) => c,
            Err(HypergraphError::ForcedOut(_)) => return Ok(None),
            Err(e) => return Err(e.into()),
        };
    }
    let present: VertexSet = ex.into_iter().filter(|&v| g.contains_vertex(v)).collect();
    Ok(Some(g.restrict(&present)))
}

/// True iff some maximum independent set contains all of `include` and
/// none of `exclude`.
pub fn exists_maximum_is_with(
    h: &Hypergraph,
    include: &[VertexId],
    exclude: &[VertexId],
    budget: &SolveBudget,
) -> Result<bool, SolveError> {
    let Some(g) = fix_vertices(h, include, exclude)? else {
        return Ok(false);
    };
    let mut inc: Vec<VertexId> = include.to_vec();
    inc.sort_unstable();
    inc.dedup();
    Ok(inc.len() + alpha_size(&g, budget)? == alpha_size(h, budget)?)
}

/// Weighted form of [`exists_maximum_is_with`].
pub fn exists_max_weight_is_with(
    h: &Hypergraph,
    include: &[VertexId],
    exclude: &[VertexId],
    w: impl Fn(VertexId) -> Weight,
    budget: &SolveBudget,
) -> Result<bool, SolveError> {
    let Some(g) = fix_vertices(h, include, exclude)? else {
        return Ok(false);
    };
    let mut inc: Vec<VertexId> = include.to_vec();
    inc.sort_unstable();
    inc.dedup();
    let fixed: Weight = inc.iter().map(|&v| w(v)).sum();
    Ok(fixed + alpha_weight(&g, &w, budget)? == alpha_weight(h, &w, budget)?)
}
