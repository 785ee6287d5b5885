//! Incremental consistent query answering: the base instance is consistent
//! and a short update sequence is applied to it.
//!
//! Every conflict of `U(D)` then involves a tuple created by the updates, so
//! the conflict hypergraph can be built by seeding joins at those tuples
//! only, and its minimum hitting set has at most `m` vertices (the created
//! tuples themselves hit every edge). The cardinality questions are answered
//! with the bounded-depth hitting-set search under binary search.

use std::collections::BTreeSet;

use log::warn;
use thiserror::Error;

use crate::answer::{self, evaluate_on, vacuous_answer, AnswerError, AnswerMode, AnswerSet, Query};
use crate::denial::{is_consistent, minimize_sets, violation_images_touching, ConstraintSet};
use crate::eval::TupleIndex;
use crate::hypergraph::{Hypergraph, VertexId, VertexSet};
use crate::model::{apply_update, DbTuple, Instance, ModelError, UpdateOp, UpdateSequence};
use crate::repairs::{a_repairs_near, RepairError, Semantics};
use crate::solve::{self, min_hitting_set_with, SolveBudget, SolveError};

#[derive(Debug, Error)]
pub enum IncrementalError {
    #[error("the base instance violates the constraints")]
    BaseInconsistent,
    #[error("{m} updates exceed the allowed ratio {ratio} of a base with {base} tuples")]
    TooManyUpdates { m: usize, base: usize, ratio: f64 },
    #[error("unsupported by the incremental path: {0}")]
    UnsupportedQueryClass(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Answer(#[from] AnswerError),
}

impl From<RepairError> for IncrementalError {
    fn from(e: RepairError) -> Self {
        IncrementalError::Answer(e.into())
    }
}

#[derive(Debug, Clone)]
pub struct IncrementalProblem {
    pub base: Instance,
    pub seq: UpdateSequence,
    pub ics: ConstraintSet,
    pub query: Query,
    pub semantics: Semantics,
    pub budget: SolveBudget,
    /// Skip the consistency check of `base`. Answers are wrong if the base
    /// is in fact inconsistent.
    pub trust_base: bool,
    /// When set to `c`, refuse sequences with `m >= c * |D|`; the
    /// incremental path pays off only for short sequences. Off by default.
    pub max_update_ratio: Option<f64>,
}

impl IncrementalProblem {
    pub fn new(
        base: Instance,
        seq: UpdateSequence,
        ics: ConstraintSet,
        query: Query,
        semantics: Semantics,
    ) -> Self {
        IncrementalProblem {
            base,
            seq,
            ics,
            query,
            semantics,
            budget: SolveBudget::default(),
            trust_base: false,
            max_update_ratio: None,
        }
    }
}

/// The part of `U(D)`'s conflict structure reachable from updated tuples.
#[derive(Debug, Clone)]
pub struct TouchedRegion {
    updated: Vec<DbTuple>,
    /// Vertex table: updated tuples plus every tuple on a local edge.
    tuples: Vec<DbTuple>,
    graph: Hypergraph,
    result: Instance,
    k_max: usize,
}

impl TouchedRegion {
    /// Tuples of `U(D)` that are not in `D`, sorted.
    pub fn updated_tuples(&self) -> &[DbTuple] {
        &self.updated
    }

    /// Hyperedges of `U(D)`'s conflict hypergraph, as tuple sets.
    pub fn local_edges(&self) -> BTreeSet<BTreeSet<DbTuple>> {
        self.graph
            .edges()
            .iter()
            .map(|e| e.iter().map(|&v| self.tuples[v as usize].clone()).collect())
            .collect()
    }

    pub fn graph(&self) -> &Hypergraph {
        &self.graph
    }

    pub fn tuple(&self, v: VertexId) -> &DbTuple {
        &self.tuples[v as usize]
    }

    pub fn vertex_of(&self, t: &DbTuple) -> Option<VertexId> {
        self.tuples.binary_search(t).ok().map(|i| i as VertexId)
    }

    /// The updated instance `U(D)`.
    pub fn result(&self) -> &Instance {
        &self.result
    }

    /// Search-depth cap: `m * a`, or `m` for insert-only sequences.
    pub fn k_max(&self) -> usize {
        self.k_max
    }
}

fn region(
    base: &Instance,
    seq: &UpdateSequence,
    ics: &ConstraintSet,
    check: bool,
) -> Result<TouchedRegion, IncrementalError> {
    if check && !is_consistent(base, ics) {
        return Err(IncrementalError::BaseInconsistent);
    }
    let result = apply_update(base, seq)?;
    let index = TupleIndex::new(&result);
    // U(D) \ D can only hold tuples the sequence writes
    let mut focus: Vec<u32> = seq
        .ops
        .iter()
        .filter_map(|op| match op {
            UpdateOp::Insert(t, _) => Some(t.clone()),
            UpdateOp::Change {
                target,
                attribute,
                value,
            } => Some(target.with_arg(*attribute, value.clone())),
            UpdateOp::Delete(_) => None,
        })
        .filter(|t| !base.contains(t))
        .filter_map(|t| index.id_of(&t))
        .collect();
    focus.sort_unstable();
    focus.dedup();
    let mut images = Vec::new();
    for c in ics.constraints() {
        images.extend(violation_images_touching(&index, c, &|_| true, &focus));
    }
    let edges = minimize_sets(images);

    let mut ids: Vec<u32> = focus
        .iter()
        .copied()
        .chain(edges.iter().flatten().copied())
        .collect();
    ids.sort_unstable();
    ids.dedup();
    // index ids follow the canonical tuple order, so `tuples` stays sorted
    let tuples: Vec<DbTuple> = ids.iter().map(|&id| index.tuple(id).clone()).collect();
    let local = |id: &u32| ids.binary_search(id).unwrap() as VertexId;
    // local ids are order-preserving, so the edges stay sorted and minimal
    let graph = Hypergraph::from_minimal(
        (0..ids.len() as VertexId).collect(),
        edges
            .iter()
            .map(|e| e.iter().map(local).collect())
            .collect(),
    );
    let updated = focus.iter().map(|&id| index.tuple(id).clone()).collect();

    let m = seq.len();
    let a = result.schema().max_arity().max(1);
    let k_max = if seq.is_insert_only() { m } else { m * a };
    Ok(TouchedRegion {
        updated,
        tuples,
        graph,
        result,
        k_max,
    })
}

/// Conflicts of `U(D)`, found by pinning one atom of each constraint to an
/// updated tuple. Fails if the base is inconsistent.
pub fn touched_region(
    base: &Instance,
    seq: &UpdateSequence,
    ics: &ConstraintSet,
) -> Result<TouchedRegion, IncrementalError> {
    region(base, seq, ics, true)
}

fn check_ratio(p: &IncrementalProblem) -> Result<(), IncrementalError> {
    match p.max_update_ratio {
        Some(ratio) if p.seq.len() as f64 >= ratio * p.base.len() as f64 => {
            Err(IncrementalError::TooManyUpdates {
                m: p.seq.len(),
                base: p.base.len(),
                ratio,
            })
        }
        _ => Ok(()),
    }
}

fn problem_region(p: &IncrementalProblem) -> Result<TouchedRegion, IncrementalError> {
    check_ratio(p)?;
    region(&p.base, &p.seq, &p.ics, !p.trust_base)
}

fn tau(
    g: &Hypergraph,
    r: &TouchedRegion,
    budget: &SolveBudget,
) -> Result<Option<usize>, IncrementalError> {
    let k = r.k_max.min(budget.max_depth);
    Ok(min_hitting_set_with(g, k, budget)?.map(|h| h.size))
}

/// Minimum number of deletions making `U(D)` consistent.
pub fn incremental_c_distance(
    base: &Instance,
    seq: &UpdateSequence,
    ics: &ConstraintSet,
) -> Result<usize, IncrementalError> {
    let r = touched_region(base, seq, ics)?;
    region_tau(&r, &SolveBudget::default())
}

fn region_tau(r: &TouchedRegion, budget: &SolveBudget) -> Result<usize, IncrementalError> {
    tau(&r.graph, r, budget)?.ok_or_else(|| {
        // the updated tuples form a hitting set of size <= m <= k_max
        SolveError::BudgetExceeded(format!("no hitting set within depth {}", r.k_max)).into()
    })
}

/// `v` is in every C-repair iff deleting it leaves tau unchanged.
fn region_in_all(
    r: &TouchedRegion,
    v: VertexId,
    tau_h: usize,
    budget: &SolveBudget,
) -> Result<bool, IncrementalError> {
    let without = r.graph.restrict(&VertexSet::from([v]));
    Ok(tau(&without, r, budget)? == Some(tau_h))
}

/// Some C-repair keeps all of `include` and none of `exclude` iff
/// `tau(h) = |removed besides include| + tau(h fixed)`.
fn region_exists(
    r: &TouchedRegion,
    include: &[VertexId],
    exclude: &[VertexId],
    tau_h: usize,
    budget: &SolveBudget,
) -> Result<bool, IncrementalError> {
    let Some(g) = solve::fix_vertices(&r.graph, include, exclude)? else {
        return Ok(false);
    };
    let kept: BTreeSet<VertexId> = include.iter().copied().collect();
    let removed = r.graph.vertex_count() - g.vertex_count() - kept.len();
    if removed > tau_h {
        return Ok(false);
    }
    Ok(tau(&g, r, budget)?.is_some_and(|t| removed + t == tau_h))
}

fn ground_literals(q: &Query) -> Result<(Vec<(bool, DbTuple)>, bool), IncrementalError> {
    q.ground_literals().ok_or_else(|| {
        IncrementalError::UnsupportedQueryClass(
            "only ground atoms and ground literal conjunctions".into(),
        )
    })
}

fn require_c(p: &IncrementalProblem) -> Result<(), IncrementalError> {
    if p.semantics != Semantics::C {
        return Err(IncrementalError::UnsupportedQueryClass(format!(
            "semantics {} (the bounded search covers C)",
            p.semantics
        )));
    }
    Ok(())
}

/// Certain answer under C-repairs for a ground atom or ground literal
/// conjunction.
pub fn incremental_certain(p: &IncrementalProblem) -> Result<AnswerSet, IncrementalError> {
    require_c(p)?;
    let (lits, cmp_ok) = ground_literals(&p.query)?;
    let r = problem_region(p)?;
    if !cmp_ok {
        return Ok(AnswerSet::boolean(false));
    }
    let tau_h = region_tau(&r, &p.budget)?;
    for (positive, t) in lits {
        let present = r.result.contains(&t);
        let holds = match (present, r.vertex_of(&t)) {
            (false, _) => !positive,
            // outside the region: in every repair
            (true, None) => positive,
            (true, Some(v)) => {
                if positive {
                    region_in_all(&r, v, tau_h, &p.budget)?
                } else {
                    !region_exists(&r, &[v], &[], tau_h, &p.budget)?
                }
            }
        };
        if !holds {
            return Ok(AnswerSet::boolean(false));
        }
    }
    Ok(AnswerSet::boolean(true))
}

/// Possible answer under C-repairs for a ground atom or ground literal
/// conjunction.
pub fn incremental_possible(p: &IncrementalProblem) -> Result<AnswerSet, IncrementalError> {
    require_c(p)?;
    let (lits, cmp_ok) = ground_literals(&p.query)?;
    let r = problem_region(p)?;
    if !cmp_ok {
        return Ok(AnswerSet::boolean(false));
    }
    let tau_h = region_tau(&r, &p.budget)?;
    let mut include = Vec::new();
    let mut exclude = Vec::new();
    for (positive, t) in lits {
        match (positive, r.result.contains(&t), r.vertex_of(&t)) {
            (true, false, _) => return Ok(AnswerSet::boolean(false)),
            (false, false, _) => {}
            (true, true, None) => {}
            (false, true, None) => return Ok(AnswerSet::boolean(false)),
            (true, true, Some(v)) => include.push(v),
            (false, true, Some(v)) => exclude.push(v),
        }
    }
    Ok(AnswerSet::boolean(region_exists(
        &r, &include, &exclude, tau_h, &p.budget,
    )?))
}

/// Answers under S-repairs: the S-repairs of `U(D)` are the maximal
/// independent sets of the region plus every tuple outside it.
pub fn incremental_s_answers(
    p: &IncrementalProblem,
    mode: AnswerMode,
) -> Result<AnswerSet, IncrementalError> {
    if p.semantics != Semantics::S {
        return Err(IncrementalError::UnsupportedQueryClass(format!(
            "semantics {}",
            p.semantics
        )));
    }
    p.query.validate().map_err(AnswerError::from)?;
    let r = problem_region(p)?;
    let index = TupleIndex::new(&r.result);
    let region_ids: Vec<u32> = r.tuples.iter().map(|t| index.id_of(t).unwrap()).collect();
    let sets = solve::enumerate_maximal_is(&r.graph, &p.budget)?;
    let vars: Vec<String> = p
        .query
        .free_variables()
        .into_iter()
        .map(String::from)
        .collect();
    let mut mask = vec![true; index.len()];
    let mut acc: Option<AnswerSet> = None;
    for s in &sets {
        for (v, &id) in region_ids.iter().enumerate() {
            mask[id as usize] = s.contains(&(v as VertexId));
        }
        let a = evaluate_on(&index, &|id| mask[id as usize], &p.query);
        acc = Some(match acc {
            None => a,
            Some(mut prev) => {
                match mode {
                    AnswerMode::Certain => prev.tuples.retain(|t| a.tuples.contains(t)),
                    AnswerMode::Possible => prev.tuples.extend(a.tuples),
                }
                prev
            }
        });
    }
    let mut out = acc.expect("an S-repair always exists");
    out.variables = vars;
    Ok(out)
}

pub fn incremental_s_certain(p: &IncrementalProblem) -> Result<AnswerSet, IncrementalError> {
    incremental_s_answers(p, AnswerMode::Certain)
}

pub fn incremental_s_possible(p: &IncrementalProblem) -> Result<AnswerSet, IncrementalError> {
    incremental_s_answers(p, AnswerMode::Possible)
}

/// Answers under bounded attribute-change repairs for change-only update
/// sequences. Over an empty repair set the answer is vacuous.
pub fn incremental_a_answers(
    p: &IncrementalProblem,
    mode: AnswerMode,
) -> Result<AnswerSet, IncrementalError> {
    let Semantics::BoundedA(spec) = &p.semantics else {
        return Err(IncrementalError::UnsupportedQueryClass(format!(
            "semantics {}",
            p.semantics
        )));
    };
    if !p.seq.is_change_only() {
        return Err(IncrementalError::UnsupportedQueryClass(
            "attribute repairs take change-only update sequences".into(),
        ));
    }
    p.query.validate().map_err(AnswerError::from)?;
    if !p.trust_base && !is_consistent(&p.base, &p.ics) {
        return Err(IncrementalError::BaseInconsistent);
    }
    let result = apply_update(&p.base, &p.seq)?;
    let vars: Vec<String> = p
        .query
        .free_variables()
        .into_iter()
        .map(String::from)
        .collect();
    match a_repairs_near(&result, &p.base, &p.ics, spec) {
        Ok(reps) => {
            let mut acc: Option<AnswerSet> = None;
            for rep in &reps {
                let a = evaluate_on(&TupleIndex::new(&rep.result), &|_| true, &p.query);
                acc = Some(match acc {
                    None => a,
                    Some(mut prev) => {
                        match mode {
                            AnswerMode::Certain => prev.tuples.retain(|t| a.tuples.contains(t)),
                            AnswerMode::Possible => prev.tuples.extend(a.tuples),
                        }
                        prev
                    }
                });
            }
            let mut out = acc.expect("at least one repair");
            out.variables = vars;
            Ok(out)
        }
        Err(RepairError::NoRepair) => Ok(vacuous_answer(&result, &p.query, mode)),
        Err(e) => Err(e.into()),
    }
}

pub fn incremental_a_certain(p: &IncrementalProblem) -> Result<AnswerSet, IncrementalError> {
    incremental_a_answers(p, AnswerMode::Certain)
}

/// Dispatches to the incremental algorithm for the problem's semantics and
/// query class. Unsupported combinations are answered on the static path
/// over `U(D)` after a logged warning.
pub fn incremental_answer(
    p: &IncrementalProblem,
    mode: AnswerMode,
) -> Result<AnswerSet, IncrementalError> {
    check_ratio(p)?;
    let attempt = match (&p.semantics, mode) {
        (Semantics::C, AnswerMode::Certain) => incremental_certain(p),
        (Semantics::C, AnswerMode::Possible) => incremental_possible(p),
        (Semantics::S, _) => incremental_s_answers(p, mode),
        (Semantics::BoundedA(_), _) => incremental_a_answers(p, mode),
        (Semantics::WeightedC, _) => Err(IncrementalError::UnsupportedQueryClass(
            "weighted semantics".into(),
        )),
    };
    match attempt {
        Err(IncrementalError::UnsupportedQueryClass(why)) => {
            warn!("incremental path unavailable ({why}); answering on the static path");
            if !p.trust_base && !is_consistent(&p.base, &p.ics) {
                return Err(IncrementalError::BaseInconsistent);
            }
            let result = apply_update(&p.base, &p.seq)?;
            Ok(answer::answers(
                &result,
                &p.ics,
                &p.query,
                &p.semantics,
                mode,
                &p.budget,
            )?)
        }
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::UpdateOp;
    use crate::syntax::{parse_constraints, parse_instance, parse_query};
    use crate::tuple;

    fn fd() -> ConstraintSet {
        parse_constraints(":- P(x,y,z), P(x,u,w), y != u.").unwrap()
    }

    fn d2() -> Instance {
        parse_instance("P(a,c,d)\nP(a,c,e)").unwrap()
    }

    fn insert(t: DbTuple) -> UpdateSequence {
        UpdateSequence::new(vec![UpdateOp::insert(t)])
    }

    fn problem(base: Instance, seq: UpdateSequence, q: &str, sem: Semantics) -> IncrementalProblem {
        IncrementalProblem::new(base, seq, fd(), parse_query(q).unwrap(), sem)
    }

    #[test]
    fn example3_first_case() {
        let seq = insert(tuple!("P", "a", "f", "d"));
        let r = touched_region(&d2(), &seq, &fd()).unwrap();
        assert_eq!(r.updated_tuples(), &[tuple!("P", "a", "f", "d")]);
        assert_eq!(r.local_edges().len(), 2);
        assert!(r
            .local_edges()
            .iter()
            .all(|e| e.contains(&tuple!("P", "a", "f", "d"))));
        assert_eq!(incremental_c_distance(&d2(), &seq, &fd()).unwrap(), 1);
        let p = problem(d2(), seq.clone(), "P(a,c,d)", Semantics::C);
        assert!(incremental_certain(&p).unwrap().is_yes());
        let p = problem(d2(), seq, "P(a,f,d)", Semantics::C);
        assert!(!incremental_possible(&p).unwrap().is_yes());
    }

    #[test]
    fn example3_second_case() {
        let base = parse_instance("P(a,c,d)").unwrap();
        let seq = insert(tuple!("P", "a", "f", "d"));
        let p = problem(base.clone(), seq.clone(), "P(a,c,d)", Semantics::C);
        assert!(!incremental_certain(&p).unwrap().is_yes());
        assert!(incremental_possible(&p).unwrap().is_yes());
        let p = problem(base, seq, "P(a,f,d)", Semantics::C);
        assert!(incremental_possible(&p).unwrap().is_yes());
    }

    #[test]
    fn empty_sequence_and_untouched_tuples() {
        let r = touched_region(&d2(), &UpdateSequence::default(), &fd()).unwrap();
        assert!(r.updated_tuples().is_empty());
        assert!(r.local_edges().is_empty());
        assert_eq!(
            incremental_c_distance(&d2(), &UpdateSequence::default(), &fd()).unwrap(),
            0
        );
        let base = parse_instance("P(a,c,d)\nP(b,c,d)").unwrap();
        let p = problem(
            base,
            insert(tuple!("P", "a", "f", "d")),
            "P(b,c,d)",
            Semantics::C,
        );
        assert!(incremental_certain(&p).unwrap().is_yes());
    }

    #[test]
    fn inconsistent_base_is_rejected() {
        let base = parse_instance("P(a,b,c)\nP(a,c,d)").unwrap();
        assert!(matches!(
            touched_region(&base, &UpdateSequence::default(), &fd()),
            Err(IncrementalError::BaseInconsistent)
        ));
    }

    #[test]
    fn update_ratio_is_enforced_only_when_set() {
        let seq = insert(tuple!("P", "a", "f", "d"));
        let mut p = problem(d2(), seq, "P(a,c,d)", Semantics::C);
        assert!(incremental_answer(&p, AnswerMode::Certain).is_ok());
        // one update against two base tuples
        p.max_update_ratio = Some(0.5);
        assert!(matches!(
            incremental_answer(&p, AnswerMode::Certain),
            Err(IncrementalError::TooManyUpdates { m: 1, base: 2, .. })
        ));
        p.max_update_ratio = Some(0.6);
        assert!(incremental_answer(&p, AnswerMode::Certain).is_ok());
    }

    #[test]
    fn s_semantics_via_enumeration() {
        let p = problem(
            d2(),
            insert(tuple!("P", "a", "b", "c")),
            "P(a,c,d)",
            Semantics::S,
        );
        assert!(!incremental_s_certain(&p).unwrap().is_yes());
        let p = problem(
            d2(),
            insert(tuple!("P", "a", "b", "c")),
            "P(a,c,d)",
            Semantics::C,
        );
        assert!(incremental_certain(&p).unwrap().is_yes());
    }

    #[test]
    fn unsupported_queries_fall_back() {
        let p = problem(
            d2(),
            insert(tuple!("P", "a", "b", "c")),
            "? P(x,y,z)",
            Semantics::C,
        );
        assert!(matches!(
            incremental_certain(&p),
            Err(IncrementalError::UnsupportedQueryClass(_))
        ));
        let a = incremental_answer(&p, AnswerMode::Certain).unwrap();
        assert_eq!(a.len(), 2);
    }
}
